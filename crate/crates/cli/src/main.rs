use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use jetcalc_cli::{run, CliError, Overrides};

/// Check torsion, curvature, Ricci, deflection and Bianchi identities of an
/// h-normal connection described by a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "jetcalc", version)]
struct Args {
    /// Manifest file (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the manifest tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Overrides the manifest sampling seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let io = |path: &PathBuf| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    let text = std::fs::read_to_string(&args.manifest).map_err(io(&args.manifest))?;
    let report = run(
        &text,
        Overrides {
            tolerance: args.tolerance,
            seed: args.seed,
        },
    )?;
    print!("{}", report.table());
    if let Some(out) = &args.out {
        std::fs::write(out, report.to_json()).map_err(io(out))?;
    }
    Ok(report.all_pass)
}
