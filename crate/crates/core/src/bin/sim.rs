use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tqd_cooling::cli::{
    format_checks, preset, run_point, run_preset, run_sweep, verify_battery, write_csv, write_csv_file,
    write_preset_csv, Axis, PresetName, RunConfig,
};
use tqd_cooling::{Error, Result};

#[derive(Parser)]
#[command(name = "sim", about = "Triple-dot resonator cooling simulator")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the sweep (or single point) described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a figure preset and write its CSV.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the structural verification battery.
    Verify,
    /// Evaluate one mechanical frequency and print the row.
    Point {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
    },
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    match run(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(e.exit_status() as u8)
        }
    }
}

fn run(args: Args) -> Result<ExitCode> {
    match args.cmd {
        Cmd::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let (axis, rows) = match &cfg.sweep {
                Some(s) => (s.axis, run_sweep(&cfg)?),
                None => (Axis::OmegaM, vec![run_point(&cfg)?]),
            };
            match &cfg.output {
                Some(path) => write_csv_file(path, axis, &[(None, &rows)])?,
                None => write_csv(std::io::stdout().lock(), axis, &[(None, &rows)])?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Preset { name, out } => {
            let p = preset(name.parse::<PresetName>()?);
            let results = run_preset(&p)?;
            write_preset_csv(&out, &p, &results)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify => {
            let checks = verify_battery();
            print!("{}", format_checks(&checks));
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", checks.len());
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Point { config, omega } => {
            let cfg = RunConfig::load(&config)?;
            if !(omega > 0.0 && omega.is_finite()) {
                return Err(Error::Config(format!("--omega must be positive, got {omega}")));
            }
            let row = run_point(&cfg.at_omega(omega))?;
            write_csv(std::io::stdout().lock(), Axis::OmegaM, &[(None, std::slice::from_ref(&row))])?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
