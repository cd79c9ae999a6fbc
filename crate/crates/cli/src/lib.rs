//! Command-line front door: loads a job document, runs the requested task
//! against the family/metric catalogs, and writes a deterministic report.

pub mod jobspec;
pub mod report;
pub mod tasks;

use std::fmt;

pub use jobspec::{parse_job, Job, Task};
pub use report::{Check, Report};
pub use tasks::{run_job, RunOutput};

/// Errors that terminate a run before any checks are evaluated; all map to
/// exit code 1. Check failures are not errors -- they produce a report and
/// exit code 2.
#[derive(Debug)]
pub enum CliError {
    /// malformed or invalid configuration, with the offending field path
    Schema {
        path: String,
        message: String,
    },
    /// evaluation left a declared domain or a numeric kernel failed
    Domain(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        1
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema { path, message } => write!(f, "config error at {path}: {message}"),
            CliError::Domain(msg) => write!(f, "domain error: {msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Load a config file, apply command-line overrides, run, and write the
/// artifact. Returns the exit code together with the artifact text.
pub fn run_from_config(
    task: &str,
    config_path: &str,
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
    out_path: Option<&str>,
) -> Result<(i32, String), CliError> {
    let text = std::fs::read_to_string(config_path)?;
    let mut file: jobspec::JobFile = serde_json::from_str(&text)
        .map_err(|e| CliError::schema("<config>", format!("invalid job document: {e}")))?;

    file.task = task.to_string();
    if let Some(s) = seed {
        file.seed = s;
    }
    if let Some(n) = samples {
        file.samples = n;
    }
    if let Some(t) = tol {
        let mut tf = file.tol.unwrap_or(jobspec::TolFile {
            abs_tol: None,
            rel_tol: None,
            fd_step: None,
        });
        tf.abs_tol = Some(t);
        file.tol = Some(tf);
    }

    let mut job = jobspec::validate_job(file)?;
    if let Some(p) = out_path {
        job.output_path = Some(p.to_string());
    }

    let result = tasks::run_job(&job)?;
    match &job.output_path {
        Some(path) => std::fs::write(path, result.artifact.as_bytes())?,
        None => print!("{}", result.artifact),
    }
    Ok((result.exit_code, result.artifact))
}
