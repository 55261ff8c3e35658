// SPDX-License-Identifier: Apache-2.0

//! The weaker, literal reading of the three axioms, and the worked examples that separate it
//! from the formal reading.
//!
//! Read literally, "over-and-above" only asks that the chosen sets be disjoint and within the
//! reserve quotas, and "filling" only asks that no alternative passing the other two fills more
//! seats. Neither pins down the over-and-above choice rule.

use serde::Serialize;

use crate::choice::{
    check_formal_axioms, check_within_category_fairness, over_and_above_choose, AxiomViolation,
    ChoiceResult, ChoiceRule,
};
use crate::format::parse_instance;
use crate::model::{validate_instance, CategoryId, IndividualId, Institution, InstitutionId, Market, Membership};
use crate::oracle::{enumerate_feasible_selections, OracleError};
use crate::report::{compact_choice, describe_axiom_violation, ChoiceDoc, FormalAuditDoc, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AsStatedViolation {
    /// Same as within-category fairness.
    InterSeMerit { higher: IndividualId, lower: IndividualId },
    /// `individual` is chosen under two categories.
    Overlap { individual: IndividualId },
    ReserveOverQuota { category: CategoryId, chosen: usize, seats: u32 },
    /// `alternative` passes the other two literal axioms and fills more seats.
    Unfilled { filled: usize, alternative: ChoiceResult },
}

pub fn check_inter_se_merit_as_stated(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
) -> Result<(), AsStatedViolation> {
    check_within_category_fairness(institution, pool, memberships, result).map_err(|v| match v {
        AxiomViolation::WithinCategoryFairness { higher, lower } => {
            AsStatedViolation::InterSeMerit { higher, lower }
        }
        other => unreachable!("fairness check returned {other:?}"),
    })
}

pub fn check_over_and_above_as_stated(
    institution: &Institution,
    result: &ChoiceResult,
) -> Result<(), AsStatedViolation> {
    let mut seen: Vec<IndividualId> = Vec::new();
    for c in 0..result.num_categories() {
        for &i in result.chosen(CategoryId(c)) {
            if seen.contains(&i) {
                return Err(AsStatedViolation::Overlap { individual: i });
            }
            seen.push(i);
        }
    }
    for c in institution.capacity.reserve_categories() {
        let seats = institution.capacity.seats(c);
        let chosen = result.chosen(c).len();
        if chosen > seats as usize {
            return Err(AsStatedViolation::ReserveOverQuota { category: c, chosen, seats });
        }
    }
    Ok(())
}

fn passes_first_two(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
) -> bool {
    check_inter_se_merit_as_stated(institution, pool, memberships, result).is_ok()
        && check_over_and_above_as_stated(institution, result).is_ok()
}

/// Outer error: the pool is too large to enumerate. Inner error: the literal filling axiom
/// fails, with the best-filling alternative as witness.
pub fn check_filling_as_stated(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
    max_pool: usize,
) -> Result<Result<(), AsStatedViolation>, OracleError> {
    let filled = result.filled();
    let mut best: Option<ChoiceResult> = None;
    for sel in enumerate_feasible_selections(institution, pool, memberships, max_pool)? {
        if sel.filled() > best.as_ref().map_or(filled, |b| b.filled())
            && passes_first_two(institution, pool, memberships, &sel)
        {
            best = Some(sel);
        }
    }
    Ok(match best {
        Some(alternative) => Err(AsStatedViolation::Unfilled { filled, alternative }),
        None => Ok(()),
    })
}

/// All three literal axioms.
pub fn check_as_stated_axioms(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
    max_pool: usize,
) -> Result<Result<(), AsStatedViolation>, OracleError> {
    if let Err(v) = check_inter_se_merit_as_stated(institution, pool, memberships, result) {
        return Ok(Err(v));
    }
    if let Err(v) = check_over_and_above_as_stated(institution, result) {
        return Ok(Err(v));
    }
    check_filling_as_stated(institution, pool, memberships, result, max_pool)
}

/// Returns `output` for one specific pool and the over-and-above choice otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlteredRule {
    pool: Vec<IndividualId>,
    output: ChoiceResult,
}

impl AlteredRule {
    pub fn new(mut pool: Vec<IndividualId>, output: ChoiceResult) -> Self {
        pool.sort_unstable();
        pool.dedup();
        Self { pool, output }
    }
}

impl ChoiceRule for AlteredRule {
    fn choose(&self, institution: &Institution, pool: &[IndividualId], memberships: &[Membership]) -> ChoiceResult {
        let mut p = pool.to_vec();
        p.sort_unstable();
        p.dedup();
        if p == self.pool {
            self.output.clone()
        } else {
            over_and_above_choose(institution, pool, memberships)
        }
    }
}

/// One institution `s` with two seats, one of them reserved for `SC`, and everyone applying.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkedExample {
    pub name: &'static str,
    pub market: Market,
}

impl WorkedExample {
    fn load(name: &'static str, text: &str) -> Self {
        let market = validate_instance(&parse_instance(text).expect("built-in example parses"))
            .expect("built-in example is valid");
        Self { name, market }
    }

    /// `i` and `j` both in SC, `i` ahead.
    pub fn one() -> Self {
        Self::load("example-1", include_str!("../fixtures/example1.json"))
    }

    /// `i` in SC ahead of general `j`.
    pub fn two() -> Self {
        Self::load("example-2", include_str!("../fixtures/example2.json"))
    }

    /// General `i` ahead of SC members `j` and `k`.
    pub fn three() -> Self {
        Self::load("example-3", include_str!("../fixtures/example3.json"))
    }

    pub fn institution(&self) -> &Institution {
        self.market.institution(InstitutionId(0))
    }

    pub fn pool(&self) -> Vec<IndividualId> {
        self.market.individual_ids().collect()
    }

    fn id(&self, name: &str) -> IndividualId {
        self.market.individual_by_name(name).expect("example individual")
    }

    fn selection(&self, open: &[&str], reserve: &[&str]) -> ChoiceResult {
        let m = &self.market;
        let sc = m.category_by_name("SC").expect("example category");
        let mut chosen = vec![Vec::new(); m.categories().len()];
        chosen[m.open_category().0] = open.iter().map(|n| self.id(n)).collect();
        chosen[sc.0] = reserve.iter().map(|n| self.id(n)).collect();
        let rejected = self
            .pool()
            .into_iter()
            .filter(|i| !chosen.iter().any(|c| c.contains(i)))
            .collect();
        ChoiceResult::from_parts(chosen, rejected)
    }

    /// The altered rule for this example, if it has one: example 1 swaps `i` and `j`, example 3
    /// seats `j` and `k` and leaves `i` out.
    pub fn altered_rule(&self) -> Option<AlteredRule> {
        let output = match self.name {
            "example-1" => self.selection(&["j"], &["i"]),
            "example-3" => self.selection(&["j"], &["k"]),
            _ => return None,
        };
        Some(AlteredRule::new(self.pool(), output))
    }

    pub fn over_and_above(&self) -> ChoiceResult {
        over_and_above_choose(self.institution(), &self.pool(), &self.market.memberships())
    }

    /// Feasible selections passing the literal axioms and the formal axioms, respectively.
    pub fn compliant_counts(&self) -> (usize, usize) {
        let inst = self.institution();
        let pool = self.pool();
        let t = self.market.memberships();
        let mut literal = 0;
        let mut formal = 0;
        for sel in enumerate_feasible_selections(inst, &pool, &t, pool.len()).expect("small pool") {
            if check_as_stated_axioms(inst, &pool, &t, &sel, pool.len()).expect("small pool").is_ok() {
                literal += 1;
            }
            if check_formal_axioms(inst, &pool, &t, &sel).is_ok() {
                formal += 1;
            }
        }
        (literal, formal)
    }
}

pub fn describe_as_stated_violation(market: &Market, v: &AsStatedViolation) -> String {
    match v {
        AsStatedViolation::InterSeMerit { higher, lower } => format!(
            "{} is unassigned while lower-merit {} of the same category is assigned",
            market.individual_name(*higher),
            market.individual_name(*lower)
        ),
        AsStatedViolation::Overlap { individual } => {
            format!("{} is chosen under two categories", market.individual_name(*individual))
        }
        AsStatedViolation::ReserveOverQuota { category, chosen, seats } => format!(
            "{chosen} chosen for {} which has {seats} seats",
            market.category_name(*category)
        ),
        AsStatedViolation::Unfilled { filled, alternative } => format!(
            "fills {filled} seats while {} fills {}",
            compact_choice(market, alternative),
            alternative.filled()
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiteralAuditDoc {
    pub inter_se_merit: Verdict,
    pub over_and_above: Verdict,
    pub filling: Verdict,
}

impl LiteralAuditDoc {
    pub fn passed(&self) -> bool {
        self.inter_se_merit.passed() && self.over_and_above.passed() && self.filling.passed()
    }

    /// Names of the failing literal axioms.
    pub fn failing(&self) -> Vec<&'static str> {
        [
            ("inter-se-merit", &self.inter_se_merit),
            ("over-and-above", &self.over_and_above),
            ("filling", &self.filling),
        ]
        .into_iter()
        .filter(|(_, v)| !v.passed())
        .map(|(n, _)| n)
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditedChoice {
    pub choice: ChoiceDoc,
    pub literal: LiteralAuditDoc,
    pub formal: FormalAuditDoc,
}

fn audit_choice(ex: &WorkedExample, r: &ChoiceResult) -> AuditedChoice {
    use crate::choice::{check_over_and_above_principle, check_quota_filling};
    let m = &ex.market;
    let inst = ex.institution();
    let pool = ex.pool();
    let t = m.memberships();
    let lit = |r: Result<(), AsStatedViolation>| Verdict::from_result(&r, |v| describe_as_stated_violation(m, v));
    let formal = |r: Result<(), AxiomViolation>| Verdict::from_result(&r, |v| describe_axiom_violation(m, v));
    AuditedChoice {
        choice: ChoiceDoc::new(m, InstitutionId(0), &pool, r),
        literal: LiteralAuditDoc {
            inter_se_merit: lit(check_inter_se_merit_as_stated(inst, &pool, &t, r)),
            over_and_above: lit(check_over_and_above_as_stated(inst, r)),
            filling: lit(check_filling_as_stated(inst, &pool, &t, r, pool.len()).expect("small pool")),
        },
        formal: FormalAuditDoc {
            over_and_above: formal(check_over_and_above_principle(inst, &pool, r)),
            within_category_fairness: formal(check_within_category_fairness(inst, &pool, &t, r)),
            quota_filling: formal(check_quota_filling(inst, &pool, &t, r)),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleDoc {
    pub name: &'static str,
    pub over_and_above: AuditedChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub altered: Option<AuditedChoice>,
    pub literal_compliant_selections: usize,
    pub formal_compliant_selections: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub claim: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReproReport {
    pub examples: Vec<ExampleDoc>,
    pub assertions: Vec<Assertion>,
}

impl ReproReport {
    pub fn all_hold(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }
}

/// Runs the three worked examples under both readings of the axioms.
pub fn repro_report() -> ReproReport {
    let examples: Vec<ExampleDoc> = [WorkedExample::one(), WorkedExample::two(), WorkedExample::three()]
        .iter()
        .map(|ex| {
            let oa = ex.over_and_above();
            let altered = ex.altered_rule().map(|rule| {
                let r = rule.choose(ex.institution(), &ex.pool(), &ex.market.memberships());
                audit_choice(ex, &r)
            });
            let (literal, formal) = ex.compliant_counts();
            ExampleDoc {
                name: ex.name,
                over_and_above: audit_choice(ex, &oa),
                altered,
                literal_compliant_selections: literal,
                formal_compliant_selections: formal,
            }
        })
        .collect();

    let [one, two, three] = [&examples[0], &examples[1], &examples[2]];
    let alt1 = one.altered.as_ref().expect("example 1 has an altered rule");
    let alt3 = three.altered.as_ref().expect("example 3 has an altered rule");
    let top_left_out = alt3.choice.rejected.iter().any(|n| n == "i");
    let assertions = vec![
        Assertion {
            claim: "example 1: a rule other than over-and-above passes all three literal axioms",
            holds: alt1.literal.passed() && alt1.choice != one.over_and_above.choice,
        },
        Assertion {
            claim: "example 2: over-and-above fails the literal filling axiom",
            holds: two.over_and_above.literal.failing() == ["filling"],
        },
        Assertion {
            claim: "example 3: a rule passing all three literal axioms leaves the top applicant unassigned",
            holds: alt3.literal.passed() && top_left_out,
        },
        Assertion {
            claim: "the formal axioms reject the altered rules of examples 1 and 3",
            holds: !alt1.formal.over_and_above.passed() && !alt3.formal.passed(),
        },
        Assertion {
            claim: "over-and-above is the only selection passing the formal axioms in every example",
            holds: examples
                .iter()
                .all(|e| e.over_and_above.formal.passed() && e.formal_compliant_selections == 1),
        },
    ];
    ReproReport { examples, assertions }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_outputs() {
        let ex = WorkedExample::one();
        assert_eq!(compact_choice(&ex.market, &ex.over_and_above()), "open {i} SC {j} rejected {}");
        let alt = ex.altered_rule().unwrap();
        let r = alt.choose(ex.institution(), &ex.pool(), &ex.market.memberships());
        assert_eq!(compact_choice(&ex.market, &r), "open {j} SC {i} rejected {}");
        assert_eq!(ex.compliant_counts(), (2, 1));
    }

    #[test]
    fn example_two_filling_witness_is_the_swap() {
        let ex = WorkedExample::two();
        let oa = ex.over_and_above();
        assert_eq!(compact_choice(&ex.market, &oa), "open {i} rejected {j}");
        let v = check_filling_as_stated(ex.institution(), &ex.pool(), &ex.market.memberships(), &oa, 10)
            .unwrap()
            .unwrap_err();
        match v {
            AsStatedViolation::Unfilled { filled, alternative } => {
                assert_eq!(filled, 1);
                assert_eq!(compact_choice(&ex.market, &alternative), "open {j} SC {i} rejected {}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn example_three_outputs() {
        let ex = WorkedExample::three();
        assert_eq!(compact_choice(&ex.market, &ex.over_and_above()), "open {i} SC {j} rejected {k}");
        let alt = ex.altered_rule().unwrap();
        let r = alt.choose(ex.institution(), &ex.pool(), &ex.market.memberships());
        assert_eq!(compact_choice(&ex.market, &r), "open {j} SC {k} rejected {i}");
    }

    #[test]
    fn altered_rule_defers_elsewhere() {
        let ex = WorkedExample::one();
        let alt = ex.altered_rule().unwrap();
        let t = ex.market.memberships();
        let single = [IndividualId(0)];
        assert_eq!(
            alt.choose(ex.institution(), &single, &t),
            over_and_above_choose(ex.institution(), &single, &t)
        );
    }

    #[test]
    fn literal_over_and_above_catches_overlap_and_excess() {
        let ex = WorkedExample::one();
        let i = IndividualId(0);
        let j = IndividualId(1);
        let overlap = ChoiceResult::from_parts(vec![vec![i], vec![i]], vec![j]);
        assert_eq!(
            check_over_and_above_as_stated(ex.institution(), &overlap),
            Err(AsStatedViolation::Overlap { individual: i })
        );
        let excess = ChoiceResult::from_parts(vec![vec![], vec![i, j]], vec![]);
        assert!(matches!(
            check_over_and_above_as_stated(ex.institution(), &excess),
            Err(AsStatedViolation::ReserveOverQuota { chosen: 2, seats: 1, .. })
        ));
    }

    #[test]
    fn report_assertions_hold() {
        let r = repro_report();
        assert_eq!(r.assertions.len(), 5);
        for a in &r.assertions {
            assert!(a.holds, "{}", a.claim);
        }
        assert_eq!(r.examples[1].over_and_above.literal.failing(), vec!["filling"]);
    }
}
