//! Job configuration: parsing, validation, and construction of the
//! family/metric objects a task runs against.
//!
//! Validation failures name the offending field path so config mistakes
//! are diagnosable from the error message alone.

use serde::Deserialize;
use serde_json::Value;

use spraylab_core::families::{
    BasePoint, Family, FamilySpec, IsotropicUvProfile, ScalarFn, Sign, FAMILY_NAMES,
};
use spraylab_core::finsler::{MetricSpec, METRIC_NAMES};
use spraylab_core::ToleranceConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classify,
    Curvature,
    Geodesic,
    Verify,
    FlagCurv,
}

impl Task {
    pub fn parse(s: &str) -> Result<Task, CliError> {
        match s {
            "classify" => Ok(Task::Classify),
            "curvature" => Ok(Task::Curvature),
            "geodesic" => Ok(Task::Geodesic),
            "verify" => Ok(Task::Verify),
            "flagcurv" => Ok(Task::FlagCurv),
            other => Err(CliError::schema(
                "task",
                format!("unknown task '{other}' (known: classify, curvature, geodesic, verify, flagcurv)"),
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Curvature => "curvature",
            Task::Geodesic => "geodesic",
            Task::Verify => "verify",
            Task::FlagCurv => "flagcurv",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub spray: SourceFile,
    /// optional in the file; the CLI positional argument overrides it
    #[serde(default)]
    pub task: String,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<TolFile>,
    #[serde(default)]
    pub output: Option<OutputFile>,
    #[serde(default)]
    pub geodesic: Option<GeodesicFile>,
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceFile {
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub metric: Option<String>,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolFile {
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicFile {
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub y0: Option<Vec<f64>>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
}

/// What the job runs against: a spray family, or a metric whose induced
/// spray stands in for it.
pub enum Source {
    Family(Family),
    Metric { spec: MetricSpec, name: String },
}

/// Fully validated job ready to execute.
pub struct Job {
    pub source: Source,
    pub source_name: String,
    pub dim: usize,
    pub task: Task,
    pub samples: usize,
    pub seed: u64,
    pub tol: ToleranceConfig,
    pub output_path: Option<String>,
    pub output_format: Option<String>,
    pub geodesic: Option<GeodesicFile>,
}

pub fn parse_job(text: &str) -> Result<Job, CliError> {
    let file: JobFile = serde_json::from_str(text)
        .map_err(|e| CliError::schema("<config>", format!("invalid job document: {e}")))?;
    validate_job(file)
}

pub fn validate_job(file: JobFile) -> Result<Job, CliError> {
    let task = Task::parse(&file.task)?;
    if file.spray.dim < 2 {
        return Err(CliError::schema("spray.dim", "dimension must be >= 2"));
    }
    if file.samples < 1 {
        return Err(CliError::schema("samples", "sample count must be >= 1"));
    }

    let mut tol = ToleranceConfig::default();
    if let Some(t) = &file.tol {
        if let Some(v) = t.abs_tol {
            tol.abs_tol = v;
        }
        if let Some(v) = t.rel_tol {
            tol.rel_tol = v;
        }
        if let Some(v) = t.fd_step {
            tol.fd_step = v;
        }
    }
    let tol = tol
        .validated()
        .map_err(|e| CliError::schema("tol", e.to_string()))?;

    let (source, source_name) = match (&file.spray.family, &file.spray.metric) {
        (Some(_), Some(_)) => {
            return Err(CliError::schema(
                "spray",
                "give either 'family' or 'metric', not both",
            ))
        }
        (None, None) => {
            return Err(CliError::schema(
                "spray",
                "one of 'family' or 'metric' is required",
            ))
        }
        (Some(name), None) => {
            let spec = family_spec(name, &file.spray.params)?;
            let family = spec
                .build()
                .map_err(|e| CliError::schema("spray.params", e.to_string()))?;
            (Source::Family(family), name.clone())
        }
        (None, Some(name)) => {
            let spec = metric_spec(name, &file.spray.params)?;
            (
                Source::Metric {
                    spec,
                    name: name.clone(),
                },
                name.clone(),
            )
        }
    };

    if let Some(out) = &file.output {
        if let Some(fmt) = &out.format {
            let ok = matches!(fmt.as_str(), "json-doc" | "csv");
            if !ok {
                return Err(CliError::schema(
                    "output.format",
                    format!("unknown format '{fmt}' (known: json-doc, csv)"),
                ));
            }
            if task == Task::Geodesic && fmt != "csv" {
                return Err(CliError::schema(
                    "output.format",
                    "geodesic traces serialize as csv",
                ));
            }
            if task != Task::Geodesic && fmt != "json-doc" {
                return Err(CliError::schema(
                    "output.format",
                    "reports serialize as json-doc",
                ));
            }
        }
    }

    Ok(Job {
        source,
        source_name,
        dim: file.spray.dim,
        task,
        samples: file.samples,
        seed: file.seed,
        tol,
        output_path: file.output.as_ref().and_then(|o| o.path.clone()),
        output_format: file.output.as_ref().and_then(|o| o.format.clone()),
        geodesic: file.geodesic,
    })
}

fn get_f64(
    params: &serde_json::Map<String, Value>,
    key: &str,
    default: f64,
) -> Result<f64, CliError> {
    match params.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n.as_f64().ok_or_else(|| {
            CliError::schema(format!("spray.params.{key}"), "not representable as f64")
        }),
        Some(_) => Err(CliError::schema(
            format!("spray.params.{key}"),
            "expected a number",
        )),
    }
}

fn get_f64_array(params: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<f64>, CliError> {
    let path = format!("spray.params.{key}");
    match params.get(key) {
        None => Err(CliError::schema(path, "required array is missing")),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| CliError::schema(path.clone(), "array entries must be numbers"))
            })
            .collect(),
        Some(_) => Err(CliError::schema(path, "expected an array of numbers")),
    }
}

fn get_sign(params: &serde_json::Map<String, Value>, key: &str) -> Result<Sign, CliError> {
    match params.get(key).and_then(|v| v.as_str()) {
        None | Some("+") => Ok(Sign::Plus),
        Some("-") => Ok(Sign::Minus),
        Some(other) => Err(CliError::schema(
            format!("spray.params.{key}"),
            format!("expected \"+\" or \"-\", got \"{other}\""),
        )),
    }
}

fn scalar_fn(
    params: &serde_json::Map<String, Value>,
    key: &str,
    default: ScalarFn,
) -> Result<ScalarFn, CliError> {
    let path = format!("spray.params.{key}");
    let spec = match params.get(key) {
        None => return Ok(default),
        Some(Value::Object(o)) => o,
        Some(_) => {
            return Err(CliError::schema(
                path,
                "expected an object like {\"kind\": \"poly\", \"coeffs\": [0, 1]}",
            ))
        }
    };
    let kind = spec
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::schema(path.clone(), "missing 'kind'"))?;
    let num = |k: &str, d: f64| spec.get(k).and_then(|v| v.as_f64()).unwrap_or(d);
    match kind {
        "poly" => {
            let coeffs = spec
                .get("coeffs")
                .and_then(|v| v.as_array())
                .ok_or_else(|| CliError::schema(path.clone(), "poly needs 'coeffs'"))?
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| CliError::schema(path.clone(), "coeffs must be numbers"))
                })
                .collect::<Result<Vec<f64>, CliError>>()?;
            Ok(ScalarFn::Poly(coeffs))
        }
        "exp" => Ok(ScalarFn::Exp {
            amplitude: num("amplitude", 1.0),
            rate: num("rate", 1.0),
        }),
        "inv_sqrt_shift" => Ok(ScalarFn::InvSqrtShift {
            num: num("num", 1.0),
            shift: num("shift", 1.0),
        }),
        "cos" => Ok(ScalarFn::Cos {
            amplitude: num("amplitude", 1.0),
            rate: num("rate", 1.0),
        }),
        other => Err(CliError::schema(
            path,
            format!("unknown function kind '{other}' (known: poly, exp, inv_sqrt_shift, cos)"),
        )),
    }
}

fn family_spec(
    name: &str,
    params: &serde_json::Map<String, Value>,
) -> Result<FamilySpec, CliError> {
    match name {
        "flat" => Ok(FamilySpec::Flat),
        "spaceform" => Ok(FamilySpec::Spaceform {
            mu: get_f64(params, "mu", 1.0)?,
        }),
        "isotropic_uv" => Ok(FamilySpec::IsotropicUv {
            u: scalar_fn(params, "u", ScalarFn::Poly(vec![0.0, 1.0]))?,
            v: scalar_fn(params, "v", ScalarFn::Poly(vec![0.0, 1.0]))?,
        }),
        "zero_curvature" => Ok(FamilySpec::ZeroCurvature {
            c: get_f64(params, "c", 1.0)?,
            sign: get_sign(params, "sign")?,
        }),
        "quadratic_example" => Ok(FamilySpec::QuadraticExample {
            c1: get_f64(params, "c1", 0.0)?,
            c2: get_f64(params, "c2", 0.0)?,
        }),
        "funk" => Ok(FamilySpec::Funk {
            c: get_f64(params, "C", 0.0)?,
        }),
        "weakiso1" => Ok(FamilySpec::WeakIso1 {
            mu: get_f64(params, "mu", 1.0)?,
            eps: get_f64(params, "eps", 1.0)?,
        }),
        "weakiso2" => Ok(FamilySpec::WeakIso2 {
            b: get_f64(params, "b", 1.0)?,
            c: get_f64(params, "c", 1.0)?,
        }),
        "custom_tabulated" => {
            let r_grid = get_f64_array(params, "r_grid")?;
            let s_grid = get_f64_array(params, "s_grid")?;
            let rows = match params.get("values") {
                Some(Value::Array(rows)) => rows
                    .iter()
                    .map(|row| match row {
                        Value::Array(items) => items
                            .iter()
                            .map(|v| {
                                v.as_f64().ok_or_else(|| {
                                    CliError::schema(
                                        "spray.params.values",
                                        "entries must be numbers",
                                    )
                                })
                            })
                            .collect::<Result<Vec<f64>, CliError>>(),
                        _ => Err(CliError::schema(
                            "spray.params.values",
                            "expected an array of rows",
                        )),
                    })
                    .collect::<Result<Vec<Vec<f64>>, CliError>>()?,
                _ => {
                    return Err(CliError::schema(
                        "spray.params.values",
                        "required matrix is missing",
                    ))
                }
            };
            Ok(FamilySpec::CustomTabulated {
                r_grid,
                s_grid,
                values: rows,
            })
        }
        other => Err(CliError::schema(
            "spray.family",
            format!(
                "unknown family '{other}' (known: {})",
                FAMILY_NAMES.join(", ")
            ),
        )),
    }
}

fn metric_spec(
    name: &str,
    params: &serde_json::Map<String, Value>,
) -> Result<MetricSpec, CliError> {
    match name {
        "minkowski" => Ok(MetricSpec::Minkowski),
        "spaceform_alpha" => Ok(MetricSpec::SpaceformAlpha {
            mu: get_f64(params, "mu", 1.0)?,
        }),
        "funk" => Ok(MetricSpec::Funk),
        "berwald" => Ok(MetricSpec::Berwald {
            c: get_f64(params, "c", 1.0)?,
            plus: matches!(get_sign(params, "sign")?, Sign::Plus),
        }),
        other => Err(CliError::schema(
            "spray.metric",
            format!(
                "unknown metric '{other}' (known: {})",
                METRIC_NAMES.join(", ")
            ),
        )),
    }
}

/// The isotropic family built straight from params, for verify-task jet
/// sweeps that want the profile rather than the erased Family.
pub fn isotropic_profile_from(u: ScalarFn, v: ScalarFn) -> IsotropicUvProfile {
    let mut p = IsotropicUvProfile::new(u, v);
    p.s0 = BasePoint::HalfSqrtR;
    p
}
