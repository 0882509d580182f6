//! Interaction kernels and the sweep scheduler.
//!
//! All updates are single-slot verbatim copies: a learner overwrites one
//! subentry of its wish with the corresponding subentry of a source (another
//! customer, a leader, or a brand's assortment). Values are never averaged,
//! so every entry ever observed was present at initialization.
//!
//! Within one sweep the random stream is consumed in this order:
//!
//! 1. `K` pair events. Each draws `first = below(K)`, then
//!    `second = below(K - 1)` shifted up by one if `>= first`, then (unless
//!    it is a hierarchy no-op) one copy attempt.
//! 2. Leader teaching. For each leader in index order, pupils are drawn by a
//!    partial Fisher-Yates shuffle over the followers in index order
//!    (`swap(s, s + below(n - s))`), each pupil immediately followed by its
//!    copy attempt.
//! 3. Shop teaching. For each brand in index order,
//!    `round(shop_teach_rate * shop_count)` events, each drawing a customer
//!    with `below(K)` followed by a copy attempt.
//!
//! A copy attempt draws `need = below(M)`, `sub = below(jmax[need])` and,
//! only when the source entry is known, one `chance(p)` coin.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::model::{NeedSchema, Population, WishProfile};
use crate::rng::SimRng;

/// How peers influence each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Any customer may learn from any other with probability `p_copy`.
    Equality,
    /// Only the lower-ranked customer learns, with probability
    /// `p_copy * (rank_high - rank_low)`.
    Hierarchy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equality => "equality",
            Mode::Hierarchy => "hierarchy",
        })
    }
}

impl FromStr for Mode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equality" => Ok(Mode::Equality),
            "hierarchy" => Ok(Mode::Hierarchy),
            other => Err(SimError::config_key(
                "mode",
                format!("expected `equality` or `hierarchy`, got `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub p_copy: f64,
    /// Pupils each leader teaches per sweep.
    pub leader_pupils: usize,
    /// Teaching events per shop per sweep.
    pub shop_teach_rate: f64,
}

impl KernelParams {
    fn validate(&self, customers: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_copy) {
            return Err(SimError::config_key("p_copy", "must lie in [0, 1]"));
        }
        if self.leader_pupils >= customers {
            return Err(SimError::config_key(
                "leader_pupils",
                "must be at most K - 1",
            ));
        }
        if !(self.shop_teach_rate.is_finite() && self.shop_teach_rate >= 0.0) {
            return Err(SimError::config_key(
                "shop_teach_rate",
                "must be a finite non-negative number",
            ));
        }
        Ok(())
    }
}

/// Outcome of one copy attempt: which subentry was drawn and whether it was
/// written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopyAttempt {
    pub need: usize,
    pub sub: usize,
    pub copied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEvent {
    /// The two customers in draw order.
    pub first: usize,
    pub second: usize,
    /// Roles. For a hierarchy no-op (equal ranks) these are `first` and
    /// `second` and `attempt` is `None`.
    pub learner: usize,
    pub source: usize,
    pub attempt: Option<CopyAttempt>,
}

impl PairEvent {
    pub fn copied(&self) -> bool {
        self.attempt.is_some_and(|a| a.copied)
    }
}

/// Every interaction a sweep performs, in order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    Pair(PairEvent),
    Leader {
        leader: usize,
        pupil: usize,
        attempt: CopyAttempt,
    },
    Shop {
        brand: usize,
        customer: usize,
        attempt: CopyAttempt,
    },
}

impl Event {
    /// `(learner, attempt)` if a copy was attempted.
    pub fn attempt(&self) -> Option<(usize, CopyAttempt)> {
        match *self {
            Event::Pair(p) => p.attempt.map(|a| (p.learner, a)),
            Event::Leader { pupil, attempt, .. } => Some((pupil, attempt)),
            Event::Shop {
                customer, attempt, ..
            } => Some((customer, attempt)),
        }
    }
}

/// Tallies from one sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub pair_events: usize,
    pub pair_copies: usize,
    pub leader_events: usize,
    pub leader_copies: usize,
    pub shop_events: usize,
    pub shop_copies: usize,
}

/// Draws a subentry and, if the source knows it, copies it with
/// probability `p`. Returns the attempt and the `(slot, value)` to write.
#[inline]
fn draw_copy(
    schema: &NeedSchema,
    source: &[f64],
    p: f64,
    rng: &mut SimRng,
) -> (CopyAttempt, Option<(usize, f64)>) {
    let need = rng.below(schema.needs());
    let sub = rng.below(schema.subentries(need));
    let slot = schema.slot(need, sub);
    let value = source[slot];
    if value == 0.0 {
        return (
            CopyAttempt {
                need,
                sub,
                copied: false,
            },
            None,
        );
    }
    let copied = rng.chance(p);
    (
        CopyAttempt { need, sub, copied },
        copied.then_some((slot, value)),
    )
}

/// One copy attempt from `source` into `learner`.
///
/// Draws a need uniformly, then a subentry of it uniformly. An unknown
/// source entry never transmits; otherwise the learner takes the source
/// value with probability `p`. Panics if the profiles do not match
/// `schema`.
pub fn copy_entry(
    schema: &NeedSchema,
    learner: &mut WishProfile,
    source: &WishProfile,
    p: f64,
    rng: &mut SimRng,
) -> CopyAttempt {
    assert_eq!(
        learner.as_slice().len(),
        schema.slots(),
        "learner shape mismatch"
    );
    assert_eq!(
        source.as_slice().len(),
        schema.slots(),
        "source shape mismatch"
    );
    let (attempt, write) = draw_copy(schema, source.as_slice(), p, rng);
    if let Some((slot, value)) = write {
        learner.set_slot(slot, value);
    }
    attempt
}

/// Copy attempt from customer `source` into customer `learner`.
fn copy_between(
    pop: &mut Population,
    learner: usize,
    source: usize,
    p: f64,
    rng: &mut SimRng,
) -> CopyAttempt {
    let (attempt, write) = draw_copy(
        pop.schema(),
        pop.customers()[source].wish.as_slice(),
        p,
        rng,
    );
    if let Some((slot, value)) = write {
        pop.write_slot(learner, slot, value);
    }
    attempt
}

/// One peer interaction between a uniformly drawn pair of distinct
/// customers.
pub fn pair_step(
    pop: &mut Population,
    mode: Mode,
    params: &KernelParams,
    rng: &mut SimRng,
) -> Result<PairEvent> {
    let k = pop.len();
    if k < 2 {
        return Err(SimError::config_key(
            "K",
            "pair interactions need two customers",
        ));
    }
    let first = rng.below(k);
    let mut second = rng.below(k - 1);
    if second >= first {
        second += 1;
    }

    let (learner, source, p) = match mode {
        Mode::Equality => (first, second, params.p_copy),
        Mode::Hierarchy => {
            let r1 = pop.customers()[first].rank;
            let r2 = pop.customers()[second].rank;
            if r1 == r2 {
                return Ok(PairEvent {
                    first,
                    second,
                    learner: first,
                    source: second,
                    attempt: None,
                });
            }
            let (low, high) = if r1 < r2 {
                (first, second)
            } else {
                (second, first)
            };
            let gap = (r1 - r2).abs();
            (low, high, (params.p_copy * gap).clamp(0.0, 1.0))
        }
    };
    let attempt = copy_between(pop, learner, source, p, rng);
    Ok(PairEvent {
        first,
        second,
        learner,
        source,
        attempt: Some(attempt),
    })
}

fn leader_step_with<F: FnMut(&Event)>(
    pop: &mut Population,
    params: &KernelParams,
    rng: &mut SimRng,
    pool: &mut Vec<usize>,
    observe: &mut F,
) -> (usize, usize) {
    let mut events = 0;
    let mut copies = 0;
    for li in 0..pop.leaders().len() {
        let leader = pop.leaders()[li];
        pool.clear();
        pool.extend_from_slice(pop.followers());
        let n = pool.len();
        let pupils = params.leader_pupils.min(n);
        for s in 0..pupils {
            let r = s + rng.below(n - s);
            pool.swap(s, r);
            let pupil = pool[s];
            let attempt = copy_between(pop, pupil, leader, params.p_copy, rng);
            events += 1;
            copies += usize::from(attempt.copied);
            observe(&Event::Leader {
                leader,
                pupil,
                attempt,
            });
        }
    }
    (events, copies)
}

/// Every rank-1 leader teaches `leader_pupils` distinct followers. Returns
/// the number of successful copies.
///
/// When fewer followers exist than `leader_pupils`, every follower is
/// taught once.
pub fn leader_step(pop: &mut Population, params: &KernelParams, rng: &mut SimRng) -> usize {
    leader_step_with(pop, params, rng, &mut Vec::new(), &mut |_| {}).1
}

/// Number of teaching events a brand with `shop_count` shops performs per
/// sweep.
pub fn shop_events(shop_teach_rate: f64, shop_count: u32) -> usize {
    (shop_teach_rate * f64::from(shop_count)).round() as usize
}

fn shop_step_with<F: FnMut(&Event)>(
    pop: &mut Population,
    params: &KernelParams,
    rng: &mut SimRng,
    observe: &mut F,
) -> (usize, usize) {
    let mut events = 0;
    let mut copies = 0;
    let k = pop.len();
    for brand in 0..pop.brands().len() {
        let n = shop_events(params.shop_teach_rate, pop.brands()[brand].shop_count);
        for _ in 0..n {
            let customer = rng.below(k);
            let (attempt, write) = draw_copy(
                pop.schema(),
                pop.brands()[brand].assortment.as_slice(),
                params.p_copy,
                rng,
            );
            if let Some((slot, value)) = write {
                pop.write_slot(customer, slot, value);
            }
            events += 1;
            copies += usize::from(attempt.copied);
            observe(&Event::Shop {
                brand,
                customer,
                attempt,
            });
        }
    }
    (events, copies)
}

/// Brand shops teach their assortment to random customers. Returns the
/// number of successful copies.
pub fn shop_step(pop: &mut Population, params: &KernelParams, rng: &mut SimRng) -> usize {
    shop_step_with(pop, params, rng, &mut |_| {}).1
}

/// One time unit: `K` pair events, then leader teaching, then shop
/// teaching; affiliations are refreshed and `t` advances by one.
pub fn sweep(
    pop: &mut Population,
    mode: Mode,
    params: &KernelParams,
    rng: &mut SimRng,
) -> Result<SweepStats> {
    sweep_observed(pop, mode, params, rng, |_| {})
}

/// [`sweep`], reporting every event to `observe` as it happens.
pub fn sweep_observed<F: FnMut(&Event)>(
    pop: &mut Population,
    mode: Mode,
    params: &KernelParams,
    rng: &mut SimRng,
    mut observe: F,
) -> Result<SweepStats> {
    params.validate(pop.len())?;
    let mut stats = SweepStats::default();
    for _ in 0..pop.len() {
        let ev = pair_step(pop, mode, params, rng)?;
        stats.pair_events += 1;
        stats.pair_copies += usize::from(ev.copied());
        observe(&Event::Pair(ev));
    }
    let (events, copies) = leader_step_with(pop, params, rng, &mut Vec::new(), &mut observe);
    stats.leader_events = events;
    stats.leader_copies = copies;
    let (events, copies) = shop_step_with(pop, params, rng, &mut observe);
    stats.shop_events = events;
    stats.shop_copies = copies;

    pop.refresh_affiliations();
    pop.advance_clock();
    Ok(stats)
}
