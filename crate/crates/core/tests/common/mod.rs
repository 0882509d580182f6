//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the simulator's dynamics or metrics. The replay
//! works on plain nested vectors and consumes raw ChaCha8 output through its
//! own copies of the documented draw transforms.

#![allow(dead_code)]

use brandsim::{Mode, Population, SimConfig};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct RawDraws(ChaCha8Rng);

impl RawDraws {
    pub fn new(seed: u64) -> Self {
        RawDraws(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        let x = self.0.next_u64();
        (x >> 11) as f64 / 9_007_199_254_740_992.0
    }

    pub fn open_unit(&mut self) -> f64 {
        1.0 - self.unit()
    }

    /// Lemire: high word of `x * n`, rejecting low words below `2^64 mod n`.
    pub fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        let reject_below = (u64::MAX - n + 1) % n;
        loop {
            let product = (self.0.next_u64() as u128) * (n as u128);
            let low = product as u64;
            if low >= reject_below {
                return (product >> 64) as usize;
            }
        }
    }
}

/// Nested-vector mirror of a population.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub jmax: Vec<usize>,
    pub brands: Vec<Vec<Vec<f64>>>,
    pub shops: Vec<u32>,
    pub wishes: Vec<Vec<Vec<f64>>>,
    pub ranks: Vec<f64>,
    pub affiliations: Vec<usize>,
    pub t: u64,
}

pub fn naive_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    for (ra, rb) in a.iter().zip(b) {
        assert_eq!(ra.len(), rb.len());
        for (x, y) in ra.iter().zip(rb) {
            sum += (x - y) * (x - y);
            count += 1;
        }
    }
    sum / count as f64
}

pub fn naive_argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    best
}

pub fn naive_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

pub fn naive_fluctuation(wishes: &[Vec<Vec<f64>>]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0;
    for a in 0..wishes.len() {
        for b in a + 1..wishes.len() {
            sum += naive_distance(&wishes[a], &wishes[b]);
            pairs += 1;
        }
    }
    sum / pairs as f64
}

pub fn naive_shares(affiliations: &[usize], brands: usize) -> Vec<f64> {
    (0..brands)
        .map(|b| {
            affiliations.iter().filter(|&&a| a == b).count() as f64 / affiliations.len() as f64
        })
        .collect()
}

impl Replay {
    /// Mirrors a library population as nested rows.
    pub fn from_population(pop: &Population) -> Replay {
        let schema = pop.schema();
        let rows = |w: &brandsim::WishProfile| -> Vec<Vec<f64>> {
            (0..schema.needs())
                .map(|i| w.row(schema, i).to_vec())
                .collect()
        };
        Replay {
            jmax: schema.jmax().iter().map(|&j| j as usize).collect(),
            brands: pop.brands().iter().map(|b| rows(&b.assortment)).collect(),
            shops: pop.brands().iter().map(|b| b.shop_count).collect(),
            wishes: pop.customers().iter().map(|c| rows(&c.wish)).collect(),
            ranks: pop.customers().iter().map(|c| c.rank).collect(),
            affiliations: pop.customers().iter().map(|c| c.affiliation).collect(),
            t: pop.t(),
        }
    }

    pub fn init(cfg: &SimConfig, draws: &mut RawDraws) -> Replay {
        let jmax: Vec<usize> = (0..cfg.needs).map(|_| 1 + draws.below(5)).collect();
        let mut brands = Vec::new();
        for _ in 0..cfg.brands {
            let rows: Vec<Vec<f64>> = jmax
                .iter()
                .map(|&j| (0..j).map(|_| draws.open_unit()).collect())
                .collect();
            brands.push(rows);
        }
        let mut wishes = Vec::new();
        let mut ranks = Vec::new();
        for _ in 0..cfg.customers {
            let mut rows = Vec::new();
            for &j in &jmax {
                let mut row = Vec::new();
                for _ in 0..j {
                    let coin = draws.unit();
                    row.push(if coin < cfg.p_unknown {
                        0.0
                    } else {
                        draws.open_unit()
                    });
                }
                rows.push(row);
            }
            wishes.push(rows);
            ranks.push(draws.unit());
        }
        // Promote the highest ranks.
        for _ in 0..cfg.leader_count {
            let mut top: Option<usize> = None;
            for k in 0..ranks.len() {
                if ranks[k] == 1.0 {
                    continue;
                }
                if top.is_none_or(|t| ranks[k] > ranks[t]) {
                    top = Some(k);
                }
            }
            let k = top.unwrap();
            ranks[k] = 1.0;
            if let Some(b) = cfg.aligned_leader_brand {
                wishes[k] = brands[b].clone();
            }
        }
        let mut r = Replay {
            jmax,
            brands,
            shops: cfg.shop_counts.clone(),
            wishes,
            ranks,
            affiliations: vec![0; cfg.customers],
            t: 0,
        };
        r.reassign();
        r
    }

    fn reassign(&mut self) {
        for k in 0..self.wishes.len() {
            let d: Vec<f64> = self
                .brands
                .iter()
                .map(|b| naive_distance(&self.wishes[k], b))
                .collect();
            self.affiliations[k] = naive_argmin(&d);
        }
    }

    /// Returns `(need, sub, value)` to write, consuming draws as documented.
    fn attempt(
        &self,
        draws: &mut RawDraws,
        source: &[Vec<f64>],
        p: f64,
    ) -> Option<(usize, usize, f64)> {
        let i = draws.below(self.jmax.len());
        let j = draws.below(self.jmax[i]);
        let v = source[i][j];
        if v == 0.0 {
            return None;
        }
        (draws.unit() < p).then_some((i, j, v))
    }

    pub fn sweep(&mut self, cfg: &SimConfig, draws: &mut RawDraws) {
        let k = self.wishes.len();
        for _ in 0..k {
            let a = draws.below(k);
            let mut b = draws.below(k - 1);
            if b >= a {
                b += 1;
            }
            let (learner, source, p) = match cfg.mode {
                Mode::Equality => (a, b, cfg.p_copy),
                Mode::Hierarchy => {
                    if self.ranks[a] == self.ranks[b] {
                        continue;
                    }
                    if self.ranks[a] < self.ranks[b] {
                        (
                            a,
                            b,
                            (cfg.p_copy * (self.ranks[b] - self.ranks[a])).min(1.0),
                        )
                    } else {
                        (
                            b,
                            a,
                            (cfg.p_copy * (self.ranks[a] - self.ranks[b])).min(1.0),
                        )
                    }
                }
            };
            let src = self.wishes[source].clone();
            if let Some((i, j, v)) = self.attempt(draws, &src, p) {
                self.wishes[learner][i][j] = v;
            }
        }

        let leaders: Vec<usize> = (0..k).filter(|&c| self.ranks[c] == 1.0).collect();
        for &leader in &leaders {
            let mut pool: Vec<usize> = (0..k).filter(|&c| self.ranks[c] != 1.0).collect();
            let n = pool.len();
            for s in 0..cfg.leader_pupils.min(n) {
                let r = s + draws.below(n - s);
                pool.swap(s, r);
                let pupil = pool[s];
                let src = self.wishes[leader].clone();
                if let Some((i, j, v)) = self.attempt(draws, &src, cfg.p_copy) {
                    self.wishes[pupil][i][j] = v;
                }
            }
        }

        for b in 0..self.brands.len() {
            let n = (cfg.shop_teach_rate * self.shops[b] as f64).round() as usize;
            for _ in 0..n {
                let c = draws.below(k);
                let src = self.brands[b].clone();
                if let Some((i, j, v)) = self.attempt(draws, &src, cfg.p_copy) {
                    self.wishes[c][i][j] = v;
                }
            }
        }

        self.reassign();
        self.t += 1;
    }
}

/// Bitwise comparison of two replays, with a description of the first
/// difference.
pub fn first_difference(a: &Replay, b: &Replay) -> Option<String> {
    if a.jmax != b.jmax {
        return Some(format!("schema {:?} vs {:?}", a.jmax, b.jmax));
    }
    if a.t != b.t {
        return Some(format!("t {} vs {}", a.t, b.t));
    }
    let bits =
        |rows: &Vec<Vec<f64>>| -> Vec<u64> { rows.iter().flatten().map(|v| v.to_bits()).collect() };
    for (k, (x, y)) in a.wishes.iter().zip(&b.wishes).enumerate() {
        if bits(x) != bits(y) {
            return Some(format!("customer {k} wish {x:?} vs {y:?}"));
        }
    }
    for (n, (x, y)) in a.brands.iter().zip(&b.brands).enumerate() {
        if bits(x) != bits(y) {
            return Some(format!("brand {n} assortment differs"));
        }
    }
    let rbits = |r: &Vec<f64>| -> Vec<u64> { r.iter().map(|v| v.to_bits()).collect() };
    if rbits(&a.ranks) != rbits(&b.ranks) {
        return Some(format!("ranks {:?} vs {:?}", a.ranks, b.ranks));
    }
    if a.affiliations != b.affiliations {
        return Some(format!(
            "affiliations {:?} vs {:?}",
            a.affiliations, b.affiliations
        ));
    }
    None
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against U[0, 1).
pub fn ks_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i as f64 + 1.0) / n - x;
            let below = x - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov critical value for significance `alpha` and
/// sample size `n`.
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Pearson chi-square statistic of observed counts against a uniform pmf.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}
