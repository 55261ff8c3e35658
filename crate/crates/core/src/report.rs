// SPDX-License-Identifier: Apache-2.0

//! Serializable, name-based views of results, audits and witnesses.

use serde::Serialize;

use crate::choice::{AxiomViolation, ChoiceResult};
use crate::da::{AssignmentAudit, AssignmentViolation, StabilityViolation};
use crate::model::{CategoryId, IndividualId, InstitutionId, Market};
use crate::oracle::{
    CharacterizationVerdict, ManipulationWitness, SizeMonotonicityWitness, SubstitutabilityWitness,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
}

impl Verdict {
    pub fn from_result<E>(r: &Result<(), E>, describe: impl FnOnce(&E) -> String) -> Self {
        match r {
            Ok(()) => Verdict::Pass,
            Err(e) => Verdict::Fail {
                witness: describe(e),
            },
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail { witness } => format!("FAIL ({witness})"),
        }
    }
}

fn name(market: &Market, i: IndividualId) -> &str {
    market.individual_name(i)
}

fn inst(market: &Market, s: InstitutionId) -> &str {
    market.institution_name(s)
}

fn cat(market: &Market, c: CategoryId) -> &str {
    market.category_name(c)
}

fn set(market: &Market, ids: &[IndividualId]) -> String {
    format!("{{{}}}", market.names(ids).join(", "))
}

pub fn describe_axiom_violation(market: &Market, v: &AxiomViolation) -> String {
    match *v {
        AxiomViolation::OverAndAbove { individual } => format!(
            "{} ranks within the open seats but holds no open seat",
            name(market, individual)
        ),
        AxiomViolation::WithinCategoryFairness { higher, lower } => format!(
            "{} is unassigned while lower-merit {} of the same category is assigned",
            name(market, higher),
            name(market, lower)
        ),
        AxiomViolation::QuotaFilling {
            category,
            unassigned,
            filled,
            seats,
        } => format!(
            "{} is eligible for {} but unassigned while only {filled} of {seats} seats are filled",
            name(market, unassigned),
            cat(market, category)
        ),
    }
}

pub fn describe_assignment_violation(market: &Market, v: &AssignmentViolation) -> String {
    match *v {
        AssignmentViolation::NotIndividuallyRational {
            individual,
            institution,
        } => format!(
            "{} is placed at unlisted {}",
            name(market, individual),
            inst(market, institution)
        ),
        AssignmentViolation::Unfair {
            individual,
            institution,
            holder,
        } => format!(
            "{} prefers {} where {} holds a competing seat without higher merit",
            name(market, individual),
            inst(market, institution),
            name(market, holder)
        ),
        AssignmentViolation::Wasteful {
            individual,
            institution,
            category,
        } => format!(
            "{} prefers {} which has a free {} seat",
            name(market, individual),
            inst(market, institution),
            cat(market, category)
        ),
        AssignmentViolation::OpenBelowReserve {
            institution,
            reserve_holder,
            open_holder,
        } => format!(
            "at {}, reserve-seat holder {} outranks open-seat holder {}",
            inst(market, institution),
            name(market, reserve_holder),
            name(market, open_holder)
        ),
    }
}

pub fn describe_stability_violation(market: &Market, v: &StabilityViolation) -> String {
    match *v {
        StabilityViolation::NotIndividuallyRational {
            individual,
            institution,
        } => format!(
            "{} is placed at unlisted {}",
            name(market, individual),
            inst(market, institution)
        ),
        StabilityViolation::NotFixedPoint {
            institution,
            rejected,
        } => format!(
            "{} would reject its own member {}",
            inst(market, institution),
            name(market, rejected)
        ),
        StabilityViolation::Blocking {
            individual,
            institution,
        } => format!(
            "{} prefers {} and would be chosen there",
            name(market, individual),
            inst(market, institution)
        ),
    }
}

pub fn describe_substitutability(market: &Market, w: &SubstitutabilityWitness) -> String {
    format!(
        "{} is rejected from {} plus {} but chosen once {} joins",
        name(market, w.rejected),
        set(market, &w.base),
        name(market, w.rejected),
        name(market, w.added)
    )
}

pub fn describe_size_monotonicity(market: &Market, w: &SizeMonotonicityWitness) -> String {
    format!(
        "adding {} to {} shrinks the chosen set from {} to {}",
        name(market, w.added),
        set(market, &w.base),
        w.before,
        w.after
    )
}

pub fn describe_manipulation(market: &Market, w: &ManipulationWitness) -> String {
    let outcome = |o: Option<InstitutionId>| match o {
        Some(s) => inst(market, s).to_string(),
        None => "unassigned".to_string(),
    };
    let list: Vec<&str> = w
        .deviation
        .preferences
        .iter()
        .map(|&s| inst(market, s))
        .collect();
    format!(
        "{} reporting [{}] with membership {} gets {} instead of {}",
        name(market, w.deviation.individual),
        list.join(", "),
        if w.deviation.declared { "declared" } else { "hidden" },
        outcome(w.deviating),
        outcome(w.truthful)
    )
}

pub fn describe_characterization(market: &Market, v: &CharacterizationVerdict) -> String {
    match v {
        CharacterizationVerdict::Confirmed(_) => "unique and equal to the rule".to_string(),
        CharacterizationVerdict::Counterexample {
            passing,
            rule_output,
        } => {
            let docs: Vec<String> = passing.iter().map(|p| compact_choice(market, p)).collect();
            format!(
                "{} selections satisfy the axioms [{}]; rule gives {}",
                passing.len(),
                docs.join("; "),
                compact_choice(market, rule_output)
            )
        }
    }
}

/// One-line rendering such as `open {i} SC {j} rejected {k}`.
pub fn compact_choice(market: &Market, r: &ChoiceResult) -> String {
    let mut parts = Vec::new();
    for c in 0..r.num_categories() {
        let c = CategoryId(c);
        if market.category(c).kind == crate::format::CategoryKind::General {
            continue;
        }
        let chosen = r.chosen(c);
        if !chosen.is_empty() {
            parts.push(format!("{} {}", cat(market, c), set(market, chosen)));
        }
    }
    parts.push(format!("rejected {}", set(market, r.rejected())));
    parts.join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CategoryChoice {
    pub category: String,
    pub chosen: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceDoc {
    pub institution: String,
    pub pool: Vec<String>,
    pub categories: Vec<CategoryChoice>,
    pub rejected: Vec<String>,
}

impl ChoiceDoc {
    pub fn new(market: &Market, s: InstitutionId, pool: &[IndividualId], r: &ChoiceResult) -> Self {
        let mut pool = pool.to_vec();
        pool.sort_unstable();
        pool.dedup();
        Self {
            institution: inst(market, s).to_string(),
            pool: market.names(&pool),
            categories: (0..r.num_categories())
                .map(CategoryId)
                .filter(|&c| market.category(c).kind != crate::format::CategoryKind::General)
                .map(|c| CategoryChoice {
                    category: cat(market, c).to_string(),
                    chosen: market.names(r.chosen(c)),
                })
                .collect(),
            rejected: market.names(r.rejected()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormalAuditDoc {
    pub over_and_above: Verdict,
    pub within_category_fairness: Verdict,
    pub quota_filling: Verdict,
}

impl FormalAuditDoc {
    pub fn passed(&self) -> bool {
        self.over_and_above.passed()
            && self.within_category_fairness.passed()
            && self.quota_filling.passed()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentAuditDoc {
    pub individually_rational: Verdict,
    pub within_category_fair: Verdict,
    pub non_wasteful: Verdict,
    pub over_and_above: Verdict,
    pub stable: Verdict,
}

impl AssignmentAuditDoc {
    pub fn new(market: &Market, audit: &AssignmentAudit) -> Self {
        let a = |r: &Result<(), AssignmentViolation>| {
            Verdict::from_result(r, |v| describe_assignment_violation(market, v))
        };
        Self {
            individually_rational: a(&audit.individually_rational),
            within_category_fair: a(&audit.within_category_fair),
            non_wasteful: a(&audit.non_wasteful),
            over_and_above: a(&audit.over_and_above),
            stable: Verdict::from_result(&audit.stable, |v| describe_stability_violation(market, v)),
        }
    }

    pub fn rows(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("individual rationality", &self.individually_rational),
            ("within-category fairness", &self.within_category_fair),
            ("non-wastefulness", &self.non_wasteful),
            ("over-and-above principle", &self.over_and_above),
            ("stability", &self.stable),
        ]
    }

    pub fn passed(&self) -> bool {
        self.rows().iter().all(|(_, v)| v.passed())
    }
}
