//! `brandsim` command-line front end.
//!
//! Exit codes: 0 on success (a run that does not converge is still a
//! success), 2 for configuration errors, 3 for I/O errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brandsim::{
    emit_csv, emit_summary, emit_sweep_csv, ensemble_parallel, load_config, run, sweep_param,
    Result, SimConfig, SimError,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "brandsim",
    version,
    about = "Brand adoption by customer wish imitation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its time series as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `seed` from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for `timeseries.csv`; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run independent replications and write a summary.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for `summary.txt`; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Run one ensemble per value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. `0.1,0.5,1.0`.
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for `sweep.csv`; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
}

fn config_with_seed(path: &Path, seed: Option<u64>) -> Result<SimConfig> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn sink(out: Option<&Path>, file: &str) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Box::new(BufWriter::new(File::create(dir.join(file))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let cfg = config_with_seed(&config, seed)?;
            let result = run(&cfg)?;
            emit_csv(
                &mut sink(out.as_deref(), "timeseries.csv")?,
                cfg.brands,
                &result.records,
            )?;
            match result.converged_at {
                Some(t) => eprintln!("consensus reached at sweep {t}"),
                None => eprintln!("no consensus after {} sweeps", result.final_population.t()),
            }
        }
        Command::Ensemble {
            config,
            runs,
            seed,
            out,
            parallel,
        } => {
            let cfg = config_with_seed(&config, seed)?;
            let summary = ensemble_parallel(&cfg, runs, parallel)?;
            emit_summary(&mut sink(out.as_deref(), "summary.txt")?, &summary)?;
        }
        Command::Sweep {
            config,
            param,
            values,
            runs,
            seed,
            out,
            parallel,
        } => {
            let cfg = config_with_seed(&config, seed)?;
            let values: Vec<String> = values
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(String::from)
                .collect();
            let rows = sweep_param(&cfg, &param, &values, runs, parallel)?;
            let width = rows
                .iter()
                .map(|(_, s)| s.dominant_brand_histogram.len())
                .max()
                .unwrap_or(cfg.brands);
            emit_sweep_csv(
                &mut sink(out.as_deref(), "sweep.csv")?,
                &param,
                width,
                &rows,
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("brandsim: {err}");
            match err {
                SimError::Config { .. } => ExitCode::from(2),
                SimError::Io(_) => ExitCode::from(3),
            }
        }
    }
}
