//! Agent-based simulation of brand adoption.
//!
//! Customers carry wish profiles: one row per need, up to five real
//! subentries per row, `0` meaning the need is unknown. Brands carry fixed
//! assortments of the same shape and a number of shops. Customers imitate
//! each other one subentry at a time (as equals, or gated by rank), rank-1
//! opinion leaders and brand shops teach on top of that, and each customer
//! buys from the brand whose assortment lies closest to their wish. Runs
//! stop once every wish is identical or the sweep budget is exhausted.
//!
//! ```
//! use brandsim::{run, Mode, SimConfig};
//!
//! let cfg = SimConfig {
//!     mode: Mode::Hierarchy,
//!     p_copy: 1.0,
//!     p_unknown: 0.0,
//!     leader_count: 1,
//!     leader_pupils: 3,
//!     aligned_leader_brand: Some(0),
//!     seed: 7,
//!     ..SimConfig::new(2, 10, 2)
//! };
//! let out = run(&cfg).unwrap();
//! assert!(out.converged_at.is_some());
//! assert_eq!(out.records.last().unwrap().dominant, 0);
//! ```

pub mod config;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod output;
pub mod rng;

pub use config::{load_config, parse_config, SimConfig};
pub use dynamics::{
    copy_entry, leader_step, pair_step, shop_step, sweep, sweep_observed, CopyAttempt, Event,
    KernelParams, Mode, PairEvent, SweepStats,
};
pub use error::{Result, SimError};
pub use harness::{
    ensemble, ensemble_outcomes, ensemble_parallel, run, sweep_param, EnsembleSummary, RunOutcome,
    RunOutput,
};
pub use metrics::{brand_shares, consensus_reached, dominant_brand, fluctuation, TimeSeriesRecord};
pub use model::{
    assign_brand, distance, init_population, BrandProfile, Customer, NeedSchema, Population,
    WishProfile,
};
pub use output::{emit_csv, emit_summary, emit_sweep_csv, parse_csv};
pub use rng::{derive_child_seed, SimRng};
