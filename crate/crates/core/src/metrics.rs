//! Observables: wish dispersion, brand shares and consensus.

use crate::error::{Result, SimError};
use crate::model::Population;

/// One row of a run's time series.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: u64,
    pub fluctuation: f64,
    pub shares: Vec<f64>,
    pub dominant: usize,
}

impl TimeSeriesRecord {
    pub fn observe(pop: &Population) -> Self {
        let fl = fluctuation(pop).expect("population always has two customers");
        TimeSeriesRecord::with_fluctuation(pop, fl)
    }

    /// Record for `pop` with an already computed fluctuation.
    pub(crate) fn with_fluctuation(pop: &Population, fluctuation: f64) -> Self {
        let shares = brand_shares(pop);
        let dominant = dominant_brand(&shares).expect("population always has a brand");
        TimeSeriesRecord {
            t: pop.t(),
            fluctuation,
            shares,
            dominant,
        }
    }
}

/// Mean wish distance over all `K(K-1)/2` unordered customer pairs.
///
/// Computed slot by slot through the identity
/// `sum_{a<b} (x_a - x_b)^2 = K * sum_a (x_a - mean)^2`, so the cost is
/// `O(K * S)`. A slot on which every customer agrees bitwise contributes
/// exactly zero, which makes the result exactly `0.0` iff all wishes are
/// identical.
pub fn fluctuation(pop: &Population) -> Result<f64> {
    let k = pop.len();
    if k < 2 {
        return Err(SimError::config_key("K", "fluctuation needs two customers"));
    }
    let customers = pop.customers();
    let slots = pop.schema().slots();
    let kf = k as f64;
    let mut total = 0.0;
    for s in 0..slots {
        let first = customers[0].wish.as_slice()[s];
        if customers.iter().all(|c| c.wish.as_slice()[s] == first) {
            continue;
        }
        let mean = customers.iter().map(|c| c.wish.as_slice()[s]).sum::<f64>() / kf;
        let ss: f64 = customers
            .iter()
            .map(|c| {
                let d = c.wish.as_slice()[s] - mean;
                d * d
            })
            .sum();
        total += kf * ss;
    }
    let pairs = kf * (kf - 1.0) / 2.0;
    Ok(total / (pairs * slots as f64))
}

/// Fraction of customers affiliated with each brand.
pub fn brand_shares(pop: &Population) -> Vec<f64> {
    let mut counts = vec![0usize; pop.brands().len()];
    for c in pop.customers() {
        counts[c.affiliation] += 1;
    }
    let k = pop.len() as f64;
    counts.into_iter().map(|n| n as f64 / k).collect()
}

/// Whether the wish fluctuation has fallen strictly below `epsilon`.
pub fn consensus_reached(pop: &Population, epsilon: f64) -> Result<bool> {
    check_epsilon(epsilon)?;
    Ok(fluctuation(pop)? < epsilon)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(SimError::config_key("epsilon", "must be positive"))
    }
}

/// Argmax of `shares`, ties to the smallest index.
pub fn dominant_brand(shares: &[f64]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (b, &s) in shares.iter().enumerate() {
        match best {
            Some((_, bs)) if s <= bs => {}
            _ => best = Some((b, s)),
        }
    }
    best.map(|(b, _)| b)
        .ok_or_else(|| SimError::config("dominant brand of an empty share vector"))
}
