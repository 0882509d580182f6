//! Domain types: the need schema, wish profiles, customers, brands and the
//! population that ties them together.
//!
//! A wish profile is a ragged matrix with one row per need and `jmax[i]`
//! subentries in row `i`. It is stored flat, row after row; the owning
//! [`NeedSchema`] maps `(need, subentry)` to a flat slot. An entry of exactly
//! `0.0` marks an unknown need; known entries lie in `(0, 1]`.

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::rng::SimRng;

/// Upper bound on subentries per need.
pub const MAX_SUBENTRIES: u8 = 5;

/// Per-need subentry counts, shared by every customer and brand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeedSchema {
    jmax: Vec<u8>,
    offsets: Vec<usize>,
    slots: usize,
}

impl NeedSchema {
    pub fn new(jmax: Vec<u8>) -> Result<Self> {
        if jmax.is_empty() {
            return Err(SimError::config_key("M", "at least one need is required"));
        }
        if let Some(bad) = jmax.iter().find(|&&j| !(1..=MAX_SUBENTRIES).contains(&j)) {
            return Err(SimError::config(format!(
                "subentry count {bad} outside 1..={MAX_SUBENTRIES}"
            )));
        }
        let mut offsets = Vec::with_capacity(jmax.len());
        let mut slots = 0;
        for &j in &jmax {
            offsets.push(slots);
            slots += usize::from(j);
        }
        Ok(NeedSchema {
            jmax,
            offsets,
            slots,
        })
    }

    /// Draws `needs` subentry counts independently and uniformly from `1..=5`.
    ///
    /// Consumes one `below(5)` per need, in need order.
    pub fn random(needs: usize, rng: &mut SimRng) -> Result<Self> {
        if needs < 1 {
            return Err(SimError::config_key("M", "at least one need is required"));
        }
        let jmax = (0..needs)
            .map(|_| 1 + rng.below(usize::from(MAX_SUBENTRIES)) as u8)
            .collect();
        NeedSchema::new(jmax)
    }

    /// Number of needs, `M`.
    pub fn needs(&self) -> usize {
        self.jmax.len()
    }

    pub fn jmax(&self) -> &[u8] {
        &self.jmax
    }

    pub fn subentries(&self, need: usize) -> usize {
        usize::from(self.jmax[need])
    }

    /// Total number of active slots, `S = sum(jmax)`.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Flat slot of subentry `sub` of need `need`.
    #[inline]
    pub fn slot(&self, need: usize, sub: usize) -> usize {
        debug_assert!(sub < self.subentries(need));
        self.offsets[need] + sub
    }

    pub fn row_range(&self, need: usize) -> std::ops::Range<usize> {
        let start = self.offsets[need];
        start..start + self.subentries(need)
    }
}

/// A customer's needs matrix (or a brand's assortment), stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct WishProfile {
    entries: Vec<f64>,
}

impl WishProfile {
    /// Every need unknown.
    pub fn unknown(schema: &NeedSchema) -> Self {
        WishProfile {
            entries: vec![0.0; schema.slots()],
        }
    }

    pub fn from_rows(schema: &NeedSchema, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != schema.needs() {
            return Err(SimError::config(format!(
                "profile has {} rows, schema has {} needs",
                rows.len(),
                schema.needs()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.subentries(i) {
                return Err(SimError::config(format!(
                    "row {i} has {} subentries, schema expects {}",
                    row.len(),
                    schema.subentries(i)
                )));
            }
        }
        WishProfile::from_flat(schema, rows.concat())
    }

    pub fn from_flat(schema: &NeedSchema, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != schema.slots() {
            return Err(SimError::config(format!(
                "profile has {} slots, schema has {}",
                entries.len(),
                schema.slots()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&v| !is_valid_entry(v)) {
            return Err(SimError::config(format!(
                "entry {bad} is neither 0 (unknown) nor in (0, 1]"
            )));
        }
        Ok(WishProfile { entries })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row<'a>(&'a self, schema: &NeedSchema, need: usize) -> &'a [f64] {
        &self.entries[schema.row_range(need)]
    }

    pub fn get(&self, schema: &NeedSchema, need: usize, sub: usize) -> f64 {
        self.entries[schema.slot(need, sub)]
    }

    pub fn is_fully_known(&self) -> bool {
        self.entries.iter().all(|&v| v != 0.0)
    }

    #[inline]
    pub(crate) fn set_slot(&mut self, slot: usize, value: f64) {
        self.entries[slot] = value;
    }
}

fn is_valid_entry(v: f64) -> bool {
    v == 0.0 || (v > 0.0 && v <= 1.0)
}

/// Mean squared difference over all active slots.
///
/// Unknown entries take part as the literal value 0. Both profiles must
/// come from the same schema; a length mismatch is a bug and panics.
pub fn distance(a: &WishProfile, b: &WishProfile) -> f64 {
    assert_eq!(
        a.entries.len(),
        b.entries.len(),
        "distance between profiles of different shapes"
    );
    let sum: f64 = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    sum / a.entries.len() as f64
}

/// Index of the brand whose assortment is closest to `wish`; ties go to the
/// smallest index.
pub fn assign_brand(wish: &WishProfile, brands: &[BrandProfile]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (b, brand) in brands.iter().enumerate() {
        let d = distance(wish, &brand.assortment);
        match best {
            Some((_, bd)) if d >= bd => {}
            _ => best = Some((b, d)),
        }
    }
    best.map(|(b, _)| b)
        .ok_or_else(|| SimError::config_key("N", "no brands to choose from"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Customer {
    pub id: usize,
    pub wish: WishProfile,
    /// Influence weight in `[0, 1)`, or exactly `1.0` for a leader.
    pub rank: f64,
    pub affiliation: usize,
}

impl Customer {
    pub fn is_leader(&self) -> bool {
        self.rank == 1.0
    }
}

/// A brand: a fixed, fully known assortment sold through `shop_count` shops.
#[derive(Clone, Debug, PartialEq)]
pub struct BrandProfile {
    pub id: usize,
    pub assortment: WishProfile,
    pub shop_count: u32,
}

impl BrandProfile {
    pub fn new(id: usize, assortment: WishProfile, shop_count: u32) -> Result<Self> {
        if !assortment.is_fully_known() {
            return Err(SimError::config(format!(
                "brand {id} assortment contains unknown entries"
            )));
        }
        if shop_count == 0 {
            return Err(SimError::config_key(
                "shop_counts",
                "shop counts must be >= 1",
            ));
        }
        Ok(BrandProfile {
            id,
            assortment,
            shop_count,
        })
    }
}

/// All customers and brands under one schema, plus the sweep counter.
#[derive(Clone, Debug)]
pub struct Population {
    schema: NeedSchema,
    customers: Vec<Customer>,
    brands: Vec<BrandProfile>,
    t: u64,
    leaders: Vec<usize>,
    followers: Vec<usize>,
    stale: Vec<bool>,
}

impl Population {
    /// Assembles a population from explicit parts. Affiliations passed in are
    /// ignored and recomputed.
    pub fn new(
        schema: NeedSchema,
        customers: Vec<Customer>,
        brands: Vec<BrandProfile>,
    ) -> Result<Self> {
        if customers.len() < 2 {
            return Err(SimError::config_key(
                "K",
                "at least two customers are required",
            ));
        }
        if brands.is_empty() {
            return Err(SimError::config_key("N", "at least one brand is required"));
        }
        for c in &customers {
            if c.wish.entries.len() != schema.slots() {
                return Err(SimError::config(format!(
                    "customer {} does not match the need schema",
                    c.id
                )));
            }
            if !(0.0..=1.0).contains(&c.rank) {
                return Err(SimError::config(format!(
                    "customer {} rank {} outside [0, 1]",
                    c.id, c.rank
                )));
            }
        }
        for b in &brands {
            if b.assortment.entries.len() != schema.slots() {
                return Err(SimError::config(format!(
                    "brand {} does not match the need schema",
                    b.id
                )));
            }
        }
        let (leaders, followers) = (0..customers.len()).partition(|&k| customers[k].is_leader());
        let stale = vec![true; customers.len()];
        let mut pop = Population {
            schema,
            customers,
            brands,
            t: 0,
            leaders,
            followers,
            stale,
        };
        pop.refresh_affiliations();
        Ok(pop)
    }

    pub fn schema(&self) -> &NeedSchema {
        &self.schema
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn brands(&self) -> &[BrandProfile] {
        &self.brands
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Indices of rank-1 customers, ascending.
    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    /// Indices of everyone else, ascending.
    pub fn followers(&self) -> &[usize] {
        &self.followers
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub(crate) fn advance_clock(&mut self) {
        self.t += 1;
    }

    /// Recomputes the affiliation of every customer whose wish changed since
    /// the last refresh.
    pub(crate) fn refresh_affiliations(&mut self) {
        for (k, stale) in self.stale.iter_mut().enumerate() {
            if *stale {
                let c = &mut self.customers[k];
                c.affiliation = assign_brand(&c.wish, &self.brands)
                    .expect("population always has at least one brand");
                *stale = false;
            }
        }
    }

    /// Copies `value` into `slot` of customer `k`'s wish.
    #[inline]
    pub(crate) fn write_slot(&mut self, k: usize, slot: usize, value: f64) {
        self.customers[k].wish.set_slot(slot, value);
        self.stale[k] = true;
    }
}

/// Draws a fresh population for `cfg`.
///
/// Draw order: the schema (one `below(5)` per need); each brand's slots
/// (`open_unit()` each); then per customer, for each slot a `unit()` coin
/// (`< p_unknown` means unknown) followed by `open_unit()` for known
/// slots, and finally the customer's rank as `unit()`. The `leader_count`
/// highest ranks are then promoted to 1 (ties to the smaller index), and
/// leaders optionally copy the aligned brand's assortment.
pub fn init_population(cfg: &SimConfig, rng: &mut SimRng) -> Result<Population> {
    cfg.validate()?;
    let schema = NeedSchema::random(cfg.needs, rng)?;
    let slots = schema.slots();

    let mut brands = Vec::with_capacity(cfg.brands);
    for b in 0..cfg.brands {
        let entries = (0..slots).map(|_| rng.open_unit()).collect();
        brands.push(BrandProfile::new(
            b,
            WishProfile { entries },
            cfg.shop_counts[b],
        )?);
    }

    let mut customers = Vec::with_capacity(cfg.customers);
    for k in 0..cfg.customers {
        let entries = (0..slots)
            .map(|_| {
                if rng.chance(cfg.p_unknown) {
                    0.0
                } else {
                    rng.open_unit()
                }
            })
            .collect();
        let rank = rng.unit();
        customers.push(Customer {
            id: k,
            wish: WishProfile { entries },
            rank,
            affiliation: 0,
        });
    }

    let mut order: Vec<usize> = (0..customers.len()).collect();
    order.sort_by(|&a, &b| {
        customers[b]
            .rank
            .total_cmp(&customers[a].rank)
            .then(a.cmp(&b))
    });
    for &k in &order[..cfg.leader_count] {
        customers[k].rank = 1.0;
        if let Some(b) = cfg.aligned_leader_brand {
            customers[k].wish = brands[b].assortment.clone();
        }
    }

    Population::new(schema, customers, brands)
}
