// SPDX-License-Identifier: Apache-2.0

//! Uniqueness oracle: the three formal axioms admit exactly one selection per pool, and it is
//! the rule's output.

use crate::choice::{check_formal_axioms, ChoiceResult, ChoiceRule, OverAndAbove};
use crate::model::{IndividualId, InstitutionId, Institution, Market, Membership};

use super::enumerate::enumerate_feasible_selections;
use super::OracleError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterizationVerdict {
    /// Exactly one feasible selection satisfies the axioms and the rule returns it.
    Confirmed(ChoiceResult),
    /// Zero or several selections satisfy the axioms, or the rule returns something else.
    Counterexample {
        passing: Vec<ChoiceResult>,
        rule_output: ChoiceResult,
    },
}

impl CharacterizationVerdict {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, Self::Confirmed(_))
    }
}

/// Enumerates every feasible selection of `pool`, keeps those passing all three formal axioms,
/// and compares with `rule`.
pub fn verify_characterization(
    rule: &dyn ChoiceRule,
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    max_pool: usize,
) -> Result<CharacterizationVerdict, OracleError> {
    let mut passing = Vec::new();
    for sel in enumerate_feasible_selections(institution, pool, memberships, max_pool)? {
        if check_formal_axioms(institution, pool, memberships, &sel).is_ok() {
            passing.push(sel);
        }
    }
    let rule_output = rule.choose(institution, pool, memberships);
    if passing.len() == 1 && passing[0] == rule_output {
        Ok(CharacterizationVerdict::Confirmed(rule_output))
    } else {
        Ok(CharacterizationVerdict::Counterexample {
            passing,
            rule_output,
        })
    }
}

pub fn verify_over_and_above_uniqueness(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    max_pool: usize,
) -> Result<CharacterizationVerdict, OracleError> {
    verify_characterization(&OverAndAbove, institution, pool, memberships, max_pool)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolCounterexample {
    pub institution: InstitutionId,
    pub pool: Vec<IndividualId>,
    pub verdict: CharacterizationVerdict,
}

/// Runs [`verify_characterization`] on every subset of the market's individuals at every
/// institution. Returns the number of pools checked and the counterexamples found.
pub fn verify_all_pools(
    rule: &dyn ChoiceRule,
    market: &Market,
    max_pool: usize,
) -> Result<(usize, Vec<PoolCounterexample>), OracleError> {
    let n = market.num_individuals();
    if n > max_pool {
        return Err(OracleError::PoolTooLarge {
            size: n,
            limit: max_pool,
        });
    }
    let memberships = market.memberships();
    let mut checked = 0;
    let mut found = Vec::new();
    for s in market.institution_ids() {
        let inst = market.institution(s);
        for mask in 0u32..(1 << n) {
            let pool: Vec<IndividualId> = (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(IndividualId)
                .collect();
            let verdict = verify_characterization(rule, inst, &pool, &memberships, max_pool)?;
            checked += 1;
            if !verdict.is_confirmed() {
                found.push(PoolCounterexample {
                    institution: s,
                    pool,
                    verdict,
                });
            }
        }
    }
    Ok((checked, found))
}
