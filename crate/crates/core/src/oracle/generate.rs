// SPDX-License-Identifier: Apache-2.0

//! Seeded random markets.

use std::collections::{BTreeMap, HashSet};
use std::ops::RangeInclusive;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::format::{
    CapacityEntry, CategoryEntry, CategoryKind, IndividualEntry, InstanceFile, InstitutionEntry,
};
use crate::model::{validate_instance, Market, DEFAULT_GENERAL_LABEL};

use super::OracleError;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub institutions: RangeInclusive<usize>,
    pub individuals: RangeInclusive<usize>,
    pub total_capacity: RangeInclusive<u32>,
    /// Upper bound on seats earmarked for any one reserve category.
    pub max_reserved: u32,
    pub reserve_categories: Vec<String>,
    /// Sampling weight of general membership followed by one weight per reserve category.
    pub category_weights: Vec<f64>,
    /// Probability that a reserve member declares their membership.
    pub declare_probability: f64,
    /// Probability that an individual appears on a given institution's merit list.
    pub acceptability: f64,
}

impl GeneratorParams {
    /// Four Indian reserve categories weighted by their national shares (15%, 7.5%, 27%, 10%).
    pub fn indian() -> Self {
        Self {
            institutions: 1..=3,
            individuals: 0..=6,
            total_capacity: 0..=4,
            max_reserved: 2,
            reserve_categories: ["SC", "ST", "OBC", "EWS"].map(String::from).to_vec(),
            category_weights: vec![40.5, 15.0, 7.5, 27.0, 10.0],
            declare_probability: 0.85,
            acceptability: 0.9,
        }
    }

    /// Small markets with three equally likely reserve categories, sized for the exhaustive
    /// oracles.
    pub fn small() -> Self {
        Self {
            institutions: 1..=3,
            individuals: 0..=6,
            total_capacity: 0..=4,
            max_reserved: 2,
            reserve_categories: ["SC", "ST", "OBC"].map(String::from).to_vec(),
            category_weights: vec![1.0, 1.0, 1.0, 1.0],
            declare_probability: 0.85,
            acceptability: 0.9,
        }
    }

    fn check(&self) -> Result<(), OracleError> {
        let bad = |msg: &str| Err(OracleError::BadParams(msg.to_string()));
        if self.institutions.is_empty() || self.individuals.is_empty() || self.total_capacity.is_empty() {
            return bad("empty count or capacity range");
        }
        if self.category_weights.len() != self.reserve_categories.len() + 1 {
            return bad("need one weight for general plus one per reserve category");
        }
        if self.category_weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || self.category_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("weights must be non-negative with a positive sum");
        }
        for p in [self.declare_probability, self.acceptability] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        let mut seen = HashSet::new();
        for name in &self.reserve_categories {
            if name.is_empty() || name == "open" || name == DEFAULT_GENERAL_LABEL || !seen.insert(name) {
                return bad("reserve category names must be distinct, non-empty, not `open` or `GC`");
            }
        }
        Ok(())
    }
}

/// Deterministic in `seed` and `params`. Merit orders and preference lists are uniform random
/// permutations; each individual is kept on a merit list with probability `acceptability`, and
/// each preference list has a uniform random length.
pub fn generate_instance(seed: u64, params: &GeneratorParams) -> Result<Market, OracleError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_inst = rng.gen_range(params.institutions.clone());
    let n_ind = rng.gen_range(params.individuals.clone());
    let weights = WeightedIndex::new(&params.category_weights)
        .map_err(|e| OracleError::BadParams(e.to_string()))?;

    let mut categories = vec![CategoryEntry {
        name: "open".into(),
        kind: CategoryKind::Open,
    }];
    categories.extend(params.reserve_categories.iter().map(|name| CategoryEntry {
        name: name.clone(),
        kind: CategoryKind::Reserve,
    }));

    let people: Vec<String> = (1..=n_ind).map(|k| format!("i{k}")).collect();
    let schools: Vec<String> = (1..=n_inst).map(|k| format!("s{k}")).collect();

    let individuals = people
        .iter()
        .map(|id| {
            let pick = weights.sample(&mut rng);
            if pick == 0 {
                IndividualEntry {
                    id: id.clone(),
                    category: DEFAULT_GENERAL_LABEL.into(),
                    declared: None,
                }
            } else {
                let declared = rng.gen_bool(params.declare_probability);
                IndividualEntry {
                    id: id.clone(),
                    category: params.reserve_categories[pick - 1].clone(),
                    declared: (!declared).then_some(false),
                }
            }
        })
        .collect();

    let institutions = schools
        .iter()
        .map(|id| {
            let total = rng.gen_range(params.total_capacity.clone());
            let mut left = total;
            let mut reserved = BTreeMap::new();
            for name in &params.reserve_categories {
                let q = rng.gen_range(0..=params.max_reserved.min(left));
                left -= q;
                if q > 0 {
                    reserved.insert(name.clone(), q);
                }
            }
            let mut merit = people.clone();
            merit.shuffle(&mut rng);
            merit.retain(|_| rng.gen_bool(params.acceptability));
            InstitutionEntry {
                id: id.clone(),
                capacity: CapacityEntry { total, reserved },
                merit,
            }
        })
        .collect();

    let preferences = people
        .iter()
        .filter_map(|id| {
            let mut list = schools.clone();
            list.shuffle(&mut rng);
            let len = rng.gen_range(0..=list.len());
            list.truncate(len);
            (!list.is_empty()).then(|| (id.clone(), list))
        })
        .collect();

    let raw = InstanceFile {
        categories,
        institutions,
        individuals,
        preferences,
    };
    Ok(validate_instance(&raw).expect("generated instances satisfy every invariant"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let p = GeneratorParams::indian();
        assert_eq!(generate_instance(7, &p).unwrap(), generate_instance(7, &p).unwrap());
    }

    #[test]
    fn zero_individuals_is_valid() {
        let p = GeneratorParams {
            individuals: 0..=0,
            ..GeneratorParams::small()
        };
        let m = generate_instance(3, &p).unwrap();
        assert_eq!(m.num_individuals(), 0);
    }

    #[test]
    fn seed_sweep_is_valid_and_canonical() {
        let p = GeneratorParams::indian();
        for seed in 0..200 {
            let m = generate_instance(seed, &p).unwrap();
            let back = validate_instance(&m.to_file()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = GeneratorParams::small();
        p.category_weights.pop();
        assert!(matches!(generate_instance(0, &p), Err(OracleError::BadParams(_))));
        let mut p = GeneratorParams::small();
        p.declare_probability = 1.5;
        assert!(matches!(generate_instance(0, &p), Err(OracleError::BadParams(_))));
        let mut p = GeneratorParams::small();
        p.reserve_categories[1] = "SC".into();
        assert!(matches!(generate_instance(0, &p), Err(OracleError::BadParams(_))));
        #[allow(clippy::reversed_empty_ranges)]
        let p = GeneratorParams {
            individuals: 3..=1,
            ..GeneratorParams::small()
        };
        assert!(matches!(generate_instance(0, &p), Err(OracleError::BadParams(_))));
    }
}
