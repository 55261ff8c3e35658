// SPDX-License-Identifier: Apache-2.0

//! Exhaustive search for profitable unilateral misreports.

use rayon::prelude::*;

use crate::assignment::Assignment;
use crate::da::run_da_oa;
use crate::model::{IndividualId, InstitutionId, Market, Membership};

use super::{Guards, OracleError};

/// Maps reported preferences and memberships to an assignment.
pub trait Mechanism: Sync {
    fn name(&self) -> &'static str;
    fn assign(&self, market: &Market) -> Assignment;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DaOa;

impl Mechanism for DaOa {
    fn name(&self) -> &'static str {
        "da-oa"
    }

    fn assign(&self, market: &Market) -> Assignment {
        run_da_oa(market).assignment
    }
}

/// A unilateral report: any ordered list of institutions, and either the true reserve
/// membership or none. Claiming a membership one does not hold is outside the report space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub individual: IndividualId,
    pub preferences: Vec<InstitutionId>,
    pub declared: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationWitness {
    pub deviation: Deviation,
    /// Outcome under truthful reporting.
    pub truthful: Option<InstitutionId>,
    /// Outcome under the deviation, strictly preferred under the true preferences.
    pub deviating: Option<InstitutionId>,
}

/// Every ordered subset of `0..m`, shortest first, then lexicographic.
fn ordered_subsets(m: usize) -> Vec<Vec<InstitutionId>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<InstitutionId>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for prefix in &frontier {
            for s in (0..m).map(InstitutionId) {
                if !prefix.contains(&s) {
                    let mut list = prefix.clone();
                    list.push(s);
                    next.push(list);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// All deviations of `individual` in canonical order: preference lists shortest first and
/// lexicographic, declaring before hiding.
pub fn deviations(market: &Market, individual: IndividualId) -> Vec<Deviation> {
    let member = market.individual(individual).true_category != Membership::General;
    let flags: &[bool] = if member { &[true, false] } else { &[false] };
    ordered_subsets(market.num_institutions())
        .into_iter()
        .flat_map(|preferences| {
            flags.iter().map(move |&declared| Deviation {
                individual,
                preferences: preferences.clone(),
                declared,
            })
        })
        .collect()
}

/// Position under the true list: listed institutions by rank, then unassigned, then anything
/// unlisted.
fn outcome_rank(market: &Market, i: IndividualId, outcome: Option<InstitutionId>) -> usize {
    let len = market.preferences(i).len();
    match outcome {
        None => len,
        Some(s) => market.preference_rank(i, s).unwrap_or(len + 1),
    }
}

fn search_individual(
    mechanism: &dyn Mechanism,
    market: &Market,
    i: IndividualId,
) -> Option<ManipulationWitness> {
    let member = market.individual(i).true_category != Membership::General;
    let truth = market.with_report(i, market.preferences(i).to_vec(), member);
    let truthful = mechanism.assign(&truth).institution_of(i);
    let truthful_rank = outcome_rank(market, i, truthful);
    for deviation in deviations(market, i) {
        let reported = truth.with_report(i, deviation.preferences.clone(), deviation.declared);
        let deviating = mechanism.assign(&reported).institution_of(i);
        if outcome_rank(market, i, deviating) < truthful_rank {
            return Some(ManipulationWitness {
                deviation,
                truthful,
                deviating,
            });
        }
    }
    None
}

/// Runs the mechanism under truthful reporting and under every deviation of every individual.
///
/// Truthful reporting means the individual's listed preferences with their true membership
/// declared; everyone else reports as recorded in `market`. Individuals are searched in
/// parallel and the first witness in canonical (individual, deviation) order is returned.
pub fn manipulation_search(
    mechanism: &dyn Mechanism,
    market: &Market,
    guards: &Guards,
) -> Result<Option<ManipulationWitness>, OracleError> {
    if market.num_institutions() > guards.max_institutions
        || market.num_individuals() > guards.max_individuals
    {
        return Err(OracleError::InstanceTooLarge {
            institutions: market.num_institutions(),
            individuals: market.num_individuals(),
            max_institutions: guards.max_institutions,
            max_individuals: guards.max_individuals,
        });
    }
    let ids: Vec<IndividualId> = market.individual_ids().collect();
    Ok(ids
        .par_iter()
        .map(|&i| search_individual(mechanism, market, i))
        .find_map_first(|w| w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::model::validate_instance;
    use crate::oracle::planted::ImmediateAcceptance;
    use crate::testutil::one_school;

    fn market(text: &str) -> Market {
        validate_instance(&parse_instance(text).unwrap()).unwrap()
    }

    #[test]
    fn subset_counts() {
        assert_eq!(ordered_subsets(0).len(), 1);
        assert_eq!(ordered_subsets(3).len(), 1 + 3 + 6 + 6);
        assert_eq!(ordered_subsets(4).len(), 65);
    }

    #[test]
    fn deviation_space_includes_hiding() {
        let m = market(include_str!("../../fixtures/da-3ind.json"));
        assert_eq!(deviations(&m, IndividualId(0)).len(), 5);
        let member = deviations(&m, IndividualId(1));
        assert_eq!(member.len(), 10);
        assert!(member.iter().any(|d| !d.declared && d.preferences.len() == 2));
    }

    #[test]
    fn three_individual_market_is_not_manipulable() {
        let m = market(include_str!("../../fixtures/da-3ind.json"));
        assert_eq!(manipulation_search(&DaOa, &m, &Guards::default()), Ok(None));
    }

    #[test]
    fn lone_individual_cannot_gain() {
        let m = one_school(1, 0, &[None], &[0]);
        assert_eq!(manipulation_search(&DaOa, &m, &Guards::default()), Ok(None));
    }

    #[test]
    fn immediate_acceptance_rewards_ranking_a_safe_school_first() {
        // Everyone prefers s1 (one seat). i1 tops s1's merit list. i2 ranks second at s1 but
        // tops s2; under immediate acceptance i3 grabs s2 in round one unless i2 lists s2 first.
        let m = market(
            r#"{
            "categories": [{"name":"open","kind":"open"}],
            "institutions": [
                {"id":"s1","capacity":{"total":1},"merit":["i1","i2","i3"]},
                {"id":"s2","capacity":{"total":1},"merit":["i2","i3","i1"]}
            ],
            "individuals": [
                {"id":"i1","category":"GC"},
                {"id":"i2","category":"GC"},
                {"id":"i3","category":"GC"}
            ],
            "preferences": {"i1":["s1","s2"],"i2":["s1","s2"],"i3":["s2","s1"]}
        }"#,
        );
        assert_eq!(manipulation_search(&DaOa, &m, &Guards::default()), Ok(None));
        let w = manipulation_search(&ImmediateAcceptance, &m, &Guards::default())
            .unwrap()
            .expect("immediate acceptance is manipulable here");
        assert_eq!(w.deviation.individual, IndividualId(1));
        assert_eq!(w.truthful, None);
        assert_eq!(w.deviating, Some(InstitutionId(1)));
    }

    #[test]
    fn guard_refuses_large_instances() {
        let m = market(include_str!("../../fixtures/da-3ind.json"));
        let tight = Guards {
            max_individuals: 2,
            ..Guards::default()
        };
        assert!(matches!(
            manipulation_search(&DaOa, &m, &tight),
            Err(OracleError::InstanceTooLarge { .. })
        ));
    }
}
