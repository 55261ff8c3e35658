// SPDX-License-Identifier: Apache-2.0

//! Runs a selection of oracle checks over a corpus and tallies the outcomes.

use rayon::prelude::*;
use serde::Serialize;

use crate::choice::{ChoiceRule, OverAndAbove};
use crate::model::Market;
use crate::report::{
    describe_characterization, describe_manipulation, describe_size_monotonicity,
    describe_substitutability,
};

use super::manipulation::{manipulation_search, DaOa, Mechanism};
use super::monotone::{check_size_monotonicity, check_substitutability};
use super::planted::{DropTwo, ImmediateAcceptance, ReserveFirst, ReserveFirstAllOrNothing};
use super::{verify_all_pools, Guards};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// The formal axioms single out the rule's output on every pool.
    Uniqueness,
    Substitutability,
    SizeMonotonicity,
    /// No unilateral misreport helps anyone.
    Manipulation,
}

impl Check {
    pub const ALL: [Check; 4] = [
        Check::Uniqueness,
        Check::Substitutability,
        Check::SizeMonotonicity,
        Check::Manipulation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Check::Uniqueness => "uniqueness",
            Check::Substitutability => "substitutability",
            Check::SizeMonotonicity => "size-monotonicity",
            Check::Manipulation => "manipulation",
        }
    }

    /// The rule or mechanism under test: the real one, or its planted broken counterpart.
    pub fn subject(self, planted: bool) -> &'static str {
        match (self, planted) {
            (Check::Manipulation, false) => DaOa.name(),
            (Check::Manipulation, true) => ImmediateAcceptance.name(),
            (_, false) => "over-and-above",
            (Check::Uniqueness, true) => "reserve-first",
            (Check::Substitutability, true) => "reserve-first-all-or-nothing",
            (Check::SizeMonotonicity, true) => "drop-two",
        }
    }

    fn rule(self, planted: bool) -> &'static dyn ChoiceRule {
        match (self, planted) {
            (_, false) => &OverAndAbove,
            (Check::Uniqueness, true) => &ReserveFirst,
            (Check::Substitutability, true) => &ReserveFirstAllOrNothing,
            (_, true) => &DropTwo,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Witness { detail: String },
    Error { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    #[serde(flatten)]
    pub outcome: Outcome,
}

pub fn run_check(check: Check, market: &Market, planted: bool, guards: &Guards) -> Outcome {
    let result = match check {
        Check::Uniqueness => {
            verify_all_pools(check.rule(planted), market, guards.max_pool).map(|(_, found)| {
                found.first().map(|c| {
                    format!(
                        "at {} with pool {{{}}}: {}",
                        market.institution_name(c.institution),
                        market.names(&c.pool).join(", "),
                        describe_characterization(market, &c.verdict)
                    )
                })
            })
        }
        Check::Substitutability | Check::SizeMonotonicity => {
            let universe: Vec<_> = market.individual_ids().collect();
            let memberships = market.memberships();
            let mut found = Ok(None);
            for s in market.institution_ids() {
                let inst = market.institution(s);
                let rule = check.rule(planted);
                let at = |d: String| format!("at {}: {d}", market.institution_name(s));
                let r = if check == Check::Substitutability {
                    check_substitutability(rule, inst, &universe, &memberships, guards.max_universe)
                        .map(|w| w.map(|w| at(describe_substitutability(market, &w))))
                } else {
                    check_size_monotonicity(rule, inst, &universe, &memberships, guards.max_universe)
                        .map(|w| w.map(|w| at(describe_size_monotonicity(market, &w))))
                };
                if !matches!(r, Ok(None)) {
                    found = r;
                    break;
                }
            }
            found
        }
        Check::Manipulation => {
            let mechanism: &dyn Mechanism = if planted { &ImmediateAcceptance } else { &DaOa };
            manipulation_search(mechanism, market, guards)
                .map(|w| w.map(|w| describe_manipulation(market, &w)))
        }
    };
    match result {
        Ok(None) => Outcome::Pass,
        Ok(Some(detail)) => Outcome::Witness { detail },
        Err(e) => Outcome::Error {
            detail: e.to_string(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub instance: String,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub check: Check,
    pub subject: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub witnesses: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    /// Whether the planted broken rules were checked instead of the real ones.
    pub planted: bool,
    pub summary: Vec<CheckSummary>,
    pub instances: Vec<InstanceOutcome>,
}

impl SuiteReport {
    pub fn has_errors(&self) -> bool {
        self.summary.iter().any(|s| s.errors > 0)
    }

    /// Real rules: nothing found. Planted rules: every check found at least one witness.
    pub fn succeeded(&self) -> bool {
        if self.has_errors() {
            return false;
        }
        if self.planted {
            self.summary.iter().all(|s| s.witnesses > 0)
        } else {
            self.summary.iter().all(|s| s.witnesses == 0)
        }
    }
}

/// Runs `checks` on every labelled market. Instances run in parallel; the report keeps the
/// input order.
pub fn run_suite(
    corpus: &[(String, Market)],
    checks: &[Check],
    planted: bool,
    guards: &Guards,
) -> SuiteReport {
    let instances: Vec<InstanceOutcome> = corpus
        .par_iter()
        .map(|(label, market)| InstanceOutcome {
            instance: label.clone(),
            checks: checks
                .iter()
                .map(|&check| CheckOutcome {
                    check,
                    outcome: run_check(check, market, planted, guards),
                })
                .collect(),
        })
        .collect();
    let summary = checks
        .iter()
        .enumerate()
        .map(|(k, &check)| {
            let mut row = CheckSummary {
                check,
                subject: check.subject(planted),
                instances: instances.len(),
                passed: 0,
                witnesses: 0,
                errors: 0,
            };
            for inst in &instances {
                match inst.checks[k].outcome {
                    Outcome::Pass => row.passed += 1,
                    Outcome::Witness { .. } => row.witnesses += 1,
                    Outcome::Error { .. } => row.errors += 1,
                }
            }
            row
        })
        .collect();
    SuiteReport {
        planted,
        summary,
        instances,
    }
}
