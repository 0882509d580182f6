//! Seeded runs, ensembles and one-parameter sweeps.

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::dynamics::sweep;
use crate::error::{Result, SimError};
use crate::metrics::{check_epsilon, dominant_brand, fluctuation, TimeSeriesRecord};
use crate::model::{init_population, Population};
use crate::rng::{derive_child_seed, SimRng};

/// Parameters `sweep_param` accepts.
pub const SWEEPABLE: &[&str] = &[
    "p_copy",
    "leader_count",
    "shop_teach_rate",
    "K",
    "N",
    "p_unknown",
];

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<TimeSeriesRecord>,
    pub final_population: Population,
    /// Sweep at which the fluctuation first fell below `epsilon`.
    pub converged_at: Option<u64>,
}

fn simulate(cfg: &SimConfig, keep_records: bool) -> Result<RunOutput> {
    cfg.validate()?;
    check_epsilon(cfg.epsilon)?;
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let mut pop = init_population(cfg, &mut rng)?;
    let params = cfg.kernel_params();

    let mut records = Vec::new();
    let mut fl = fluctuation(&pop)?;
    let observe = TimeSeriesRecord::with_fluctuation;
    if keep_records {
        records.push(observe(&pop, fl));
    }
    while fl >= cfg.epsilon && pop.t() < cfg.max_sweeps {
        sweep(&mut pop, cfg.mode, &params, &mut rng)?;
        fl = fluctuation(&pop)?;
        let last = fl < cfg.epsilon || pop.t() == cfg.max_sweeps;
        if keep_records && (last || pop.t() % cfg.record_every == 0) {
            records.push(observe(&pop, fl));
        }
    }
    let converged_at = (fl < cfg.epsilon).then(|| pop.t());
    Ok(RunOutput {
        records,
        final_population: pop,
        converged_at,
    })
}

/// Runs one simulation from `cfg.seed` until consensus or `max_sweeps`.
///
/// A record is taken at `t = 0`, every `record_every` sweeps, and at the
/// final sweep.
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    simulate(cfg, true)
}

/// What an ensemble keeps from each replication.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub converged_at: Option<u64>,
    pub dominant: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    pub runs: usize,
    pub consensus_fraction: f64,
    /// Mean over converged runs; `None` when no run converged.
    pub mean_sweeps_to_consensus: Option<f64>,
    /// Final dominant brand frequencies over converged runs (all zero when
    /// none converged).
    pub dominant_brand_histogram: Vec<f64>,
}

impl EnsembleSummary {
    /// Folds replication outcomes. Order of `outcomes` does not matter.
    pub fn from_outcomes(brands: usize, outcomes: &[RunOutcome]) -> Self {
        let mut converged = 0u64;
        let mut sweeps = 0u128;
        let mut hist = vec![0u64; brands];
        for o in outcomes {
            if let Some(t) = o.converged_at {
                converged += 1;
                sweeps += u128::from(t);
                hist[o.dominant] += 1;
            }
        }
        let runs = outcomes.len();
        EnsembleSummary {
            runs,
            consensus_fraction: if runs == 0 {
                0.0
            } else {
                converged as f64 / runs as f64
            },
            mean_sweeps_to_consensus: (converged > 0).then(|| sweeps as f64 / converged as f64),
            dominant_brand_histogram: hist
                .into_iter()
                .map(|n| {
                    if converged == 0 {
                        0.0
                    } else {
                        n as f64 / converged as f64
                    }
                })
                .collect(),
        }
    }
}

fn replicate(cfg: &SimConfig, index: u64) -> Result<RunOutcome> {
    let seed = derive_child_seed(cfg.seed, index);
    let child = SimConfig {
        seed,
        ..cfg.clone()
    };
    let out = simulate(&child, false)?;
    let shares = crate::metrics::brand_shares(&out.final_population);
    Ok(RunOutcome {
        seed,
        converged_at: out.converged_at,
        dominant: dominant_brand(&shares)?,
    })
}

/// Runs `runs` replications serially, replication `i` seeded with
/// `derive_child_seed(cfg.seed, i)`.
pub fn ensemble(cfg: &SimConfig, runs: usize) -> Result<EnsembleSummary> {
    ensemble_outcomes(cfg, runs, 1).map(|o| EnsembleSummary::from_outcomes(cfg.brands, &o))
}

/// Like [`ensemble`], spread over `workers` threads. The summary does not
/// depend on `workers`.
pub fn ensemble_parallel(cfg: &SimConfig, runs: usize, workers: usize) -> Result<EnsembleSummary> {
    ensemble_outcomes(cfg, runs, workers).map(|o| EnsembleSummary::from_outcomes(cfg.brands, &o))
}

/// Per-replication outcomes in replication order.
pub fn ensemble_outcomes(cfg: &SimConfig, runs: usize, workers: usize) -> Result<Vec<RunOutcome>> {
    if runs < 1 {
        return Err(SimError::config("an ensemble needs at least one run"));
    }
    if workers < 1 {
        return Err(SimError::config("at least one worker is required"));
    }
    cfg.validate()?;
    if workers == 1 {
        return (0..runs as u64).map(|i| replicate(cfg, i)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..runs as u64)
            .into_par_iter()
            .map(|i| replicate(cfg, i))
            .collect()
    })
}

/// One ensemble per value of `param`, all from the same base seed.
pub fn sweep_param(
    cfg: &SimConfig,
    param: &str,
    values: &[String],
    runs: usize,
    workers: usize,
) -> Result<Vec<(String, EnsembleSummary)>> {
    if !SWEEPABLE.contains(&param) {
        return Err(SimError::config_key(
            param,
            format!(
                "cannot sweep this parameter (expected one of {})",
                SWEEPABLE.join(", ")
            ),
        ));
    }
    values
        .iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.set(param, v)?;
            c.validate()?;
            Ok((v.trim().to_owned(), ensemble_parallel(&c, runs, workers)?))
        })
        .collect()
}
