use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gravloc::kv::KeyValues;
use gravloc_cli::{run, write_config_failure, Command, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "gravloc", version, about = "Entropic localization under nonunitary Newtonian gravity")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scaled coupling G M^3 R / hbar^2
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Grid points per axis (power of two)
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Scaled time step
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Total scaled time
    #[arg(long, global = true)]
    time: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Closed-form localization estimates for a physical scenario
    Estimate,
    /// Tabulate the meta-ball potential against its overlap integral
    Potential,
    /// s-wave bound levels of the relative motion
    Spectrum,
    /// Self-localization threshold coupling and mass
    Threshold,
    /// Evolve the product-Gaussian meta-state and trace out the partner
    Evolve,
    /// Run spectrum or evolve over a list of couplings in parallel
    Sweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Estimate => Command::Estimate,
            Sub::Potential => Command::Potential,
            Sub::Spectrum => Command::Spectrum,
            Sub::Threshold => Command::Threshold,
            Sub::Evolve => Command::Evolve,
            Sub::Sweep => Command::Sweep,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = Command::from(cli.command);
    let text = match &cli.config {
        None => String::new(),
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
    };
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        kappa: cli.kappa,
        grid: cli.grid,
        dt: cli.dt,
        time: cli.time,
    };
    let cfg = match RunConfig::build(command, &text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            let dir = cli.out.clone().unwrap_or_else(|| {
                KeyValues::parse(&text)
                    .ok()
                    .and_then(|kv| kv.get_str("out").map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from("out"))
            });
            if let Err(w) = write_config_failure(&dir, command, &text, &e) {
                eprintln!("error: {w}");
            }
            return ExitCode::from(e.exit_code());
        }
    };
    let outcome = run(&cfg);
    match (&outcome.error, &outcome.summary) {
        (Some(e), _) => eprintln!("error: {e}"),
        (None, Some(s)) => {
            println!("{}", serde_json::to_string_pretty(s).unwrap_or_default());
            eprintln!("wrote {}", cfg.out.display());
        }
        (None, None) => {}
    }
    ExitCode::from(outcome.exit_code)
}
