// SPDX-License-Identifier: Apache-2.0

//! Brute-force verification of the choice rule and the mechanism.
//!
//! Every check here is exhaustive over a bounded space. Inputs beyond the configured
//! [`Guards`] are refused with an error rather than silently truncated.

use thiserror::Error;

mod characterization;
mod enumerate;
mod generate;
mod manipulation;
mod monotone;
pub mod planted;
mod suite;

pub use characterization::{
    verify_all_pools, verify_characterization, verify_over_and_above_uniqueness,
    CharacterizationVerdict, PoolCounterexample,
};
pub use enumerate::{enumerate_feasible_selections, FeasibleSelection, FeasibleSelections};
pub use generate::{generate_instance, GeneratorParams};
pub use manipulation::{
    deviations, manipulation_search, DaOa, Deviation, ManipulationWitness, Mechanism,
};
pub use monotone::{
    check_size_monotonicity, check_substitutability, SizeMonotonicityWitness,
    SubstitutabilityWitness,
};

pub use suite::{
    run_check, run_suite, Check, CheckOutcome, CheckSummary, InstanceOutcome, Outcome, SuiteReport,
};

pub const MAX_POOL_ENV: &str = "RESERVE_MATCH_MAX_POOL";
pub const MAX_UNIVERSE_ENV: &str = "RESERVE_MATCH_MAX_UNIVERSE";
pub const MAX_INSTITUTIONS_ENV: &str = "RESERVE_MATCH_MAX_INSTITUTIONS";
pub const MAX_INDIVIDUALS_ENV: &str = "RESERVE_MATCH_MAX_INDIVIDUALS";

/// Size limits for the exhaustive checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    /// Largest pool whose feasible selections are enumerated.
    pub max_pool: usize,
    /// Largest universe for the subset-based substitutability and size checks.
    pub max_universe: usize,
    /// Manipulation search: institution limit (the deviation space is factorial in it).
    pub max_institutions: usize,
    /// Manipulation search: individual limit.
    pub max_individuals: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            max_pool: 10,
            max_universe: 10,
            max_institutions: 4,
            max_individuals: 6,
        }
    }
}

impl Guards {
    /// Defaults, overridden by any of the `RESERVE_MATCH_MAX_*` variables that parse.
    pub fn from_env() -> Self {
        let read = |name: &str, default: usize| {
            std::env::var(name)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        };
        let d = Self::default();
        Self {
            max_pool: read(MAX_POOL_ENV, d.max_pool),
            max_universe: read(MAX_UNIVERSE_ENV, d.max_universe),
            max_institutions: read(MAX_INSTITUTIONS_ENV, d.max_institutions),
            max_individuals: read(MAX_INDIVIDUALS_ENV, d.max_individuals),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("pool of {size} exceeds the enumeration limit of {limit}")]
    PoolTooLarge { size: usize, limit: usize },
    #[error("universe of {size} exceeds the subset-enumeration limit of {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error(
        "instance with {institutions} institutions and {individuals} individuals exceeds the \
         manipulation-search limits ({max_institutions}, {max_individuals})"
    )]
    InstanceTooLarge {
        institutions: usize,
        individuals: usize,
        max_institutions: usize,
        max_individuals: usize,
    },
    #[error("bad generator parameters: {0}")]
    BadParams(String),
}
