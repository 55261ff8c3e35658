// SPDX-License-Identifier: Apache-2.0

//! Substitutability and size monotonicity by exhaustive subset enumeration.

use crate::choice::ChoiceRule;
use crate::model::{IndividualId, Institution, Membership};

use super::OracleError;

/// `rejected` is not chosen from `base ∪ {rejected}` but is chosen once `added` joins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutabilityWitness {
    pub base: Vec<IndividualId>,
    pub rejected: IndividualId,
    pub added: IndividualId,
}

/// Adding `added` to `base` shrinks the chosen set from `before` to `after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeMonotonicityWitness {
    pub base: Vec<IndividualId>,
    pub added: IndividualId,
    pub before: usize,
    pub after: usize,
}

/// Chosen set (as a bitmask over `universe`) for every subset of `universe`.
fn choice_table(
    rule: &dyn ChoiceRule,
    institution: &Institution,
    universe: &[IndividualId],
    memberships: &[Membership],
) -> Vec<u32> {
    let n = universe.len();
    (0u32..1 << n)
        .map(|mask| {
            let pool: Vec<IndividualId> = (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| universe[k])
                .collect();
            let chosen = rule.choose(institution, &pool, memberships).all_chosen();
            (0..n)
                .filter(|&k| chosen.binary_search(&universe[k]).is_ok())
                .fold(0u32, |acc, k| acc | 1 << k)
        })
        .collect()
}

fn prepare(universe: &[IndividualId], max_universe: usize) -> Result<Vec<IndividualId>, OracleError> {
    let mut u = universe.to_vec();
    u.sort_unstable();
    u.dedup();
    if u.len() > max_universe || u.len() > 20 {
        return Err(OracleError::UniverseTooLarge {
            size: u.len(),
            limit: max_universe.min(20),
        });
    }
    Ok(u)
}

fn members(universe: &[IndividualId], mask: u32) -> Vec<IndividualId> {
    (0..universe.len())
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| universe[k])
        .collect()
}

/// First witness in (base mask, rejected, added) order, or `None` if the rule is substitutable
/// on this universe.
pub fn check_substitutability(
    rule: &dyn ChoiceRule,
    institution: &Institution,
    universe: &[IndividualId],
    memberships: &[Membership],
    max_universe: usize,
) -> Result<Option<SubstitutabilityWitness>, OracleError> {
    let universe = prepare(universe, max_universe)?;
    let n = universe.len();
    let table = choice_table(rule, institution, &universe, memberships);
    for base in 0u32..1 << n {
        for i in (0..n).filter(|&i| base >> i & 1 == 0) {
            let with_i = base | 1 << i;
            if table[with_i as usize] >> i & 1 == 1 {
                continue;
            }
            for j in (0..n).filter(|&j| j != i && base >> j & 1 == 0) {
                if table[(with_i | 1 << j) as usize] >> i & 1 == 1 {
                    return Ok(Some(SubstitutabilityWitness {
                        base: members(&universe, base),
                        rejected: universe[i],
                        added: universe[j],
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn check_size_monotonicity(
    rule: &dyn ChoiceRule,
    institution: &Institution,
    universe: &[IndividualId],
    memberships: &[Membership],
    max_universe: usize,
) -> Result<Option<SizeMonotonicityWitness>, OracleError> {
    let universe = prepare(universe, max_universe)?;
    let n = universe.len();
    let table = choice_table(rule, institution, &universe, memberships);
    for base in 0u32..1 << n {
        let before = table[base as usize].count_ones() as usize;
        for i in (0..n).filter(|&i| base >> i & 1 == 0) {
            let after = table[(base | 1 << i) as usize].count_ones() as usize;
            if after < before {
                return Ok(Some(SizeMonotonicityWitness {
                    base: members(&universe, base),
                    added: universe[i],
                    before,
                    after,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::OverAndAbove;
    use crate::model::InstitutionId;
    use crate::oracle::planted::{DropTwo, ReserveFirstAllOrNothing};
    use crate::testutil::{one_school, school_with};

    fn universe(n: usize) -> Vec<IndividualId> {
        (0..n).map(IndividualId).collect()
    }

    #[test]
    fn over_and_above_passes_on_six() {
        let m = school_with(
            2,
            &[("r", 1), ("r2", 1)],
            &[Some(1), None, Some(2), Some(1), None, Some(2)],
            &[2, 0, 1, 4, 3, 5],
        );
        let inst = m.institution(InstitutionId(0));
        let t = m.memberships();
        assert_eq!(check_substitutability(&OverAndAbove, inst, &universe(6), &t, 10), Ok(None));
        assert_eq!(check_size_monotonicity(&OverAndAbove, inst, &universe(6), &t, 10), Ok(None));
    }

    #[test]
    fn all_or_nothing_reserve_is_not_substitutable() {
        let m = one_school(0, 2, &[Some(1), Some(1)], &[0, 1]);
        let inst = m.institution(InstitutionId(0));
        let w = check_substitutability(&ReserveFirstAllOrNothing, inst, &universe(2), &m.memberships(), 10)
            .unwrap()
            .expect("witness");
        assert_eq!(w.base, vec![]);
        assert_eq!(w.rejected, IndividualId(0));
        assert_eq!(w.added, IndividualId(1));
    }

    #[test]
    fn drop_two_shrinks() {
        let m = one_school(2, 0, &[None, None, None], &[0, 1, 2]);
        let inst = m.institution(InstitutionId(0));
        let w = check_size_monotonicity(&DropTwo, inst, &universe(3), &m.memberships(), 10)
            .unwrap()
            .expect("witness");
        assert!(w.after < w.before);
    }

    #[test]
    fn singleton_and_empty_universes_pass() {
        let m = one_school(1, 1, &[Some(1)], &[0]);
        let inst = m.institution(InstitutionId(0));
        let t = m.memberships();
        for rule in [&OverAndAbove as &dyn ChoiceRule, &DropTwo, &ReserveFirstAllOrNothing] {
            assert_eq!(check_substitutability(rule, inst, &universe(1), &t, 10), Ok(None));
            assert_eq!(check_size_monotonicity(rule, inst, &[], &t, 10), Ok(None));
        }
    }

    #[test]
    fn universe_guard() {
        let m = one_school(1, 1, &[None; 4], &[0, 1, 2, 3]);
        let inst = m.institution(InstitutionId(0));
        assert!(matches!(
            check_substitutability(&OverAndAbove, inst, &universe(4), &m.memberships(), 3),
            Err(OracleError::UniverseTooLarge { size: 4, limit: 3 })
        ));
    }
}
