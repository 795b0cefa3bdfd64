use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fso_dnn::harness::{self, config::parse_grid, ExperimentConfig};
use fso_dnn::Error;

#[derive(Parser)]
#[command(
    name = "fso-dnn",
    version,
    about = "FSO-MIMO link simulation and learned detectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured learned detector
    Train(Common),
    /// Evaluate SER over an Es/N0 grid
    Sweep(Common),
    /// Check sampled turbulence against its moments and pdf
    ValidateChannel(Common),
    /// Plot SER CSV files into one SVG
    Plot {
        /// SER CSV files
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "SER vs Es/N0")]
        title: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated dB values
    #[arg(long)]
    grid: Option<String>,
    /// key=value override, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load(c: &Common) -> fso_dnn::Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.apply_overrides(&c.overrides)?;
    if let Some(seed) = c.seed {
        cfg.train.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.output_dir = out.clone();
    }
    if let Some(trials) = c.trials {
        cfg.trials = trials;
    }
    if let Some(grid) = &c.grid {
        cfg.grid = parse_grid(grid).map_err(|msg| Error::ConfigValue {
            key: "grid".into(),
            msg,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> fso_dnn::Result<()> {
    match cli.command {
        Command::Train(c) => {
            let cfg = load(&c)?;
            let m = harness::cmd_train(&cfg)?;
            println!(
                "trained {} in {:.1} s -> {}",
                cfg.scenario.detector,
                m.duration_seconds,
                cfg.output_dir.display()
            );
        }
        Command::Sweep(c) => {
            let cfg = load(&c)?;
            let (curve, _) = harness::cmd_sweep(&cfg)?;
            print!("{}", harness::csv::write_ser_csv(&curve));
        }
        Command::ValidateChannel(c) => {
            let cfg = load(&c)?;
            let (report, _) = harness::cmd_validate_channel(&cfg)?;
            print!("{}", report.to_text());
        }
        Command::Plot { inputs, out, title } => {
            harness::cmd_plot(&inputs, &out, &title)?;
            println!("wrote {}", out.join("plot.svg").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
