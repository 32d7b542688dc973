use clap::{Args, Parser, Subcommand};
use interface_crack_cli::{run_reference, run_solve, run_sweep, run_verify, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Interface-crack solver with curvature-dependent surface tension.
#[derive(Parser)]
#[command(name = "interface-crack", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result files.
    #[arg(long)]
    out: PathBuf,
    /// Override the Taylor order from the config.
    #[arg(long)]
    order: Option<usize>,
    /// Override the points per output curve.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the Taylor-vs-Taylor verification tolerance.
    #[arg(long = "tolerance-taylor")]
    tolerance_taylor: Option<f64>,
    /// Override the Taylor-vs-spline verification tolerance.
    #[arg(long = "tolerance-spline")]
    tolerance_spline: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            order: self.order,
            samples: self.samples,
            tolerance_taylor: self.tolerance_taylor,
            tolerance_spline: self.tolerance_spline,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configuration and write coefficients, curves and fits.
    Solve(CommonArgs),
    /// Cross-validate the Taylor solution against a finer order and the
    /// spline discretization (exit 3 on tolerance breach).
    Verify(CommonArgs),
    /// Sweep a parameter and tabulate maxima and singularity coefficients.
    Sweep(CommonArgs),
    /// Compare against the classical pressurized-crack displacements for a
    /// list of surface-tension magnitudes.
    Reference(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(&args.config, &args.out, &args.overrides()).map(|o| {
            println!(
                "solved: condition {:.3e}, k1 {:.6e}, k2 {:.6e} -> {}",
                o.condition_estimate,
                o.k1_right,
                o.k2_right,
                o.manifest_path.display()
            );
        }),
        Command::Verify(args) => run_verify(&args.config, &args.out, &args.overrides()).map(|o| {
            println!(
                "verified: taylor gap {:.3e} (tol {:.3e}), spline gap {:.3e} (tol {:.3e})",
                o.taylor_gap, o.tolerance_taylor, o.spline_gap, o.tolerance_spline
            );
        }),
        Command::Sweep(args) => run_sweep(&args.config, &args.out, &args.overrides()).map(|o| {
            println!(
                "swept {} steps ({} failed)",
                o.rows.len(),
                o.failed_steps
            );
        }),
        Command::Reference(args) => {
            run_reference(&args.config, &args.out, &args.overrides()).map(|()| {
                println!("reference curves written");
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
