//! `rho-interp`: configuration-driven verification runner.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rho-interp", about = "Interpolation-theory verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config in verify mode and write its reports.
    Run { config: PathBuf },
    /// Measure suite constants over the calibration seed set and freeze them.
    Calibrate { config: PathBuf },
    /// Merge report JSONs into a summary CSV (stdout or --out).
    Summary {
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn init_workers() {
    // Worker count only affects scheduling, never results.
    if let Ok(v) = std::env::var("RHO_INTERP_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_workers();
    match cli.command {
        Command::Run { config } => match rho_interp_cli::run_config(&config) {
            Ok((report, files)) => {
                let status = if report.pass { "PASS" } else { "FAIL" };
                let worst = report
                    .get_measurement("worst")
                    .map(|v| format!(" worst={v}"))
                    .unwrap_or_default();
                println!("{}: {status}{worst}", report.check);
                for f in files {
                    println!("  wrote {}", f.display());
                }
                if report.pass {
                    ExitCode::SUCCESS
                } else {
                    for flag in &report.flags {
                        eprintln!("  {flag}");
                    }
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Calibrate { config } => match rho_interp_cli::run_calibrate(&config) {
            Ok((file, path)) => {
                println!("calibrated {} constants -> {}", file.constants.len(), path.display());
                for (k, v) in &file.constants {
                    println!("  {k} = {v}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Summary { reports, out } => match rho_interp_cli::summarize(&reports) {
            Ok(csv) => {
                if let Some(path) = out {
                    if let Err(e) = std::fs::write(&path, &csv) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                    println!("wrote {}", path.display());
                } else {
                    print!("{csv}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
