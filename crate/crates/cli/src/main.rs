use clap::Parser;

/// Spray-geometry toolkit: residual classification, curvature dumps,
/// geodesic traces, invariant verification, and flag-curvature sweeps for
/// spherically symmetric sprays and their metrics.
#[derive(Parser)]
#[command(name = "spraylab", version, about)]
struct Args {
    /// classify | curvature | geodesic | verify | flagcurv
    task: String,

    /// Path to the job document (JSON)
    #[arg(long)]
    config: String,

    /// Override the job's random seed
    #[arg(long)]
    seed: Option<u64>,

    /// Override the job's sample count
    #[arg(long)]
    samples: Option<usize>,

    /// Override the job's absolute residual tolerance
    #[arg(long)]
    tol: Option<f64>,

    /// Write the artifact here instead of the configured path/stdout
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    let args = Args::parse();
    match spraylab::run_from_config(
        &args.task,
        &args.config,
        args.seed,
        args.samples,
        args.tol,
        args.out.as_deref(),
    ) {
        Ok((code, _)) => std::process::exit(code),
        Err(e) => {
            eprintln!("spraylab: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
