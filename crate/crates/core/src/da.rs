// SPDX-License-Identifier: Apache-2.0

//! Deferred acceptance with over-and-above choice at every institution (DA-OA), and the
//! assignment-level properties it is audited against.

use crate::assignment::{induced_matching, Assignment, Seat};
use crate::choice::{over_and_above_choose, ChoiceResult};
use crate::model::{CategoryId, IndividualId, InstitutionId, Market, Membership};

/// What one institution saw and did in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstitutionRound {
    pub institution: InstitutionId,
    /// Individuals held from the previous round plus this round's new proposers.
    pub pool: Vec<IndividualId>,
    pub held: Vec<IndividualId>,
    pub rejected: Vec<IndividualId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundLog {
    /// 1-based.
    pub round: usize,
    /// Institutions with a non-empty pool this round, in index order.
    pub institutions: Vec<InstitutionRound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaOutcome {
    pub assignment: Assignment,
    pub rounds: Vec<RoundLog>,
}

/// Runs DA-OA on the market's reported preferences and memberships.
///
/// Each round every individual rejected in the previous round (everyone, in the first round)
/// proposes to the next institution on their list. Each institution keeps the over-and-above
/// choice from its held set plus new proposers and rejects the rest. The run stops when a round
/// produces no rejections or nobody is left to propose. Seat categories are read from each
/// institution's last choice.
pub fn run_da_oa(market: &Market) -> DaOutcome {
    let memberships = market.memberships();
    let n = market.num_individuals();
    let mut next_choice = vec![0usize; n];
    let mut held: Vec<Vec<IndividualId>> = vec![Vec::new(); market.num_institutions()];
    let mut last_choice: Vec<Option<ChoiceResult>> = vec![None; market.num_institutions()];
    let mut proposers: Vec<IndividualId> = market.individual_ids().collect();
    let mut rounds = Vec::new();

    loop {
        let mut incoming: Vec<Vec<IndividualId>> = vec![Vec::new(); market.num_institutions()];
        for &i in &proposers {
            if let Some(&s) = market.preferences(i).get(next_choice[i.0]) {
                incoming[s.0].push(i);
                next_choice[i.0] += 1;
            }
        }
        if incoming.iter().all(Vec::is_empty) {
            break;
        }

        let mut log = RoundLog {
            round: rounds.len() + 1,
            institutions: Vec::new(),
        };
        let mut rejected_now = Vec::new();
        for s in market.institution_ids() {
            if incoming[s.0].is_empty() {
                if !held[s.0].is_empty() {
                    log.institutions.push(InstitutionRound {
                        institution: s,
                        pool: held[s.0].clone(),
                        held: held[s.0].clone(),
                        rejected: Vec::new(),
                    });
                }
                continue;
            }
            let mut pool = std::mem::take(&mut held[s.0]);
            pool.extend_from_slice(&incoming[s.0]);
            pool.sort_unstable();
            let choice = over_and_above_choose(market.institution(s), &pool, &memberships);
            let kept = choice.all_chosen();
            let rejected = choice.rejected().to_vec();
            rejected_now.extend_from_slice(&rejected);
            log.institutions.push(InstitutionRound {
                institution: s,
                pool,
                held: kept.clone(),
                rejected,
            });
            held[s.0] = kept;
            last_choice[s.0] = Some(choice);
        }
        rounds.push(log);
        if rejected_now.is_empty() {
            break;
        }
        rejected_now.sort_unstable();
        proposers = rejected_now;
    }

    let mut seats = vec![None; n];
    for s in market.institution_ids() {
        let Some(choice) = &last_choice[s.0] else {
            continue;
        };
        for c in 0..choice.num_categories() {
            for &i in choice.chosen(CategoryId(c)) {
                seats[i.0] = Some(Seat {
                    institution: s,
                    category: CategoryId(c),
                });
            }
        }
    }
    let assignment =
        Assignment::new(market, seats).expect("over-and-above choices respect capacity and eligibility");
    DaOutcome { assignment, rounds }
}

/// Failure of one of the assignment-level properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssignmentViolation {
    /// `individual` holds a seat at an institution missing from their list.
    NotIndividuallyRational {
        individual: IndividualId,
        institution: InstitutionId,
    },
    /// `individual` prefers `institution`, where `holder` occupies an open or same-category
    /// seat without beating them on merit.
    Unfair {
        individual: IndividualId,
        institution: InstitutionId,
        holder: IndividualId,
    },
    /// `individual` prefers `institution`, is acceptable there, and `category` has a free seat
    /// they are eligible for.
    Wasteful {
        individual: IndividualId,
        institution: InstitutionId,
        category: CategoryId,
    },
    /// At `institution`, `open_holder` has an open seat but does not beat `reserve_holder`.
    OpenBelowReserve {
        institution: InstitutionId,
        reserve_holder: IndividualId,
        open_holder: IndividualId,
    },
}

pub fn is_individually_rational(market: &Market, a: &Assignment) -> Result<(), AssignmentViolation> {
    for i in market.individual_ids() {
        if let Some(s) = a.institution_of(i) {
            if market.preference_rank(i, s).is_none() {
                return Err(AssignmentViolation::NotIndividuallyRational {
                    individual: i,
                    institution: s,
                });
            }
        }
    }
    Ok(())
}

/// Institutions `i` strictly prefers to their current seat.
fn envied<'a>(market: &'a Market, a: &Assignment, i: IndividualId) -> impl Iterator<Item = InstitutionId> + 'a {
    let current = a.institution_of(i);
    market
        .preferences(i)
        .iter()
        .copied()
        .filter(move |&s| market.prefers(i, s, current))
}

pub fn is_within_category_fair(market: &Market, a: &Assignment) -> Result<(), AssignmentViolation> {
    let open = market.open_category();
    for i in market.individual_ids() {
        let own = market.individual(i).effective();
        for s in envied(market, a, i) {
            let merit = &market.institution(s).merit;
            for &(j, c) in a.holders(s) {
                let competes = c == open || own == Membership::Reserve(c);
                if competes && !merit.prefers(j, i) {
                    return Err(AssignmentViolation::Unfair {
                        individual: i,
                        institution: s,
                        holder: j,
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn is_non_wasteful(market: &Market, a: &Assignment) -> Result<(), AssignmentViolation> {
    let open = market.open_category();
    for i in market.individual_ids() {
        let own = market.individual(i).effective();
        for s in envied(market, a, i) {
            let inst = market.institution(s);
            if !inst.merit.is_acceptable(i) {
                continue;
            }
            let mut eligible = vec![open];
            eligible.extend(own.reserve());
            for c in eligible {
                if a.holders_in(s, c).count() < inst.capacity.seats(c) as usize {
                    return Err(AssignmentViolation::Wasteful {
                        individual: i,
                        institution: s,
                        category: c,
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn satisfies_over_and_above_assignment(
    market: &Market,
    a: &Assignment,
) -> Result<(), AssignmentViolation> {
    let open = market.open_category();
    for s in market.institution_ids() {
        let merit = &market.institution(s).merit;
        for &(j, c) in a.holders(s) {
            if c == open {
                continue;
            }
            for i in a.holders_in(s, open) {
                if !merit.prefers(i, j) {
                    return Err(AssignmentViolation::OpenBelowReserve {
                        institution: s,
                        reserve_holder: j,
                        open_holder: i,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Failure of one of the three stability conditions for the induced matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityViolation {
    NotIndividuallyRational {
        individual: IndividualId,
        institution: InstitutionId,
    },
    /// The over-and-above rule applied to the institution's own members rejects `rejected`.
    NotFixedPoint {
        institution: InstitutionId,
        rejected: IndividualId,
    },
    /// `individual` prefers `institution` and would be chosen from its members plus themself.
    Blocking {
        individual: IndividualId,
        institution: InstitutionId,
    },
}

/// Stability of the induced matching with respect to the over-and-above rules: individual
/// rationality, every institution's members are a fixed point of its choice rule, and no
/// individual is chosen by an institution they prefer when added to its members.
pub fn is_stable(market: &Market, a: &Assignment) -> Result<(), StabilityViolation> {
    let memberships = market.memberships();
    let mu = induced_matching(a);
    for i in market.individual_ids() {
        if let Some(s) = mu.partner(i) {
            if market.preference_rank(i, s).is_none() {
                return Err(StabilityViolation::NotIndividuallyRational {
                    individual: i,
                    institution: s,
                });
            }
        }
    }
    for s in market.institution_ids() {
        let members = mu.members(s);
        let choice = over_and_above_choose(market.institution(s), members, &memberships);
        if let Some(&rejected) = choice.rejected().first() {
            return Err(StabilityViolation::NotFixedPoint {
                institution: s,
                rejected,
            });
        }
    }
    for i in market.individual_ids() {
        let current = mu.partner(i);
        for &s in market.preferences(i) {
            if !market.prefers(i, s, current) {
                break;
            }
            let mut pool = mu.members(s).to_vec();
            pool.push(i);
            let choice = over_and_above_choose(market.institution(s), &pool, &memberships);
            if choice.is_chosen(i) {
                return Err(StabilityViolation::Blocking {
                    individual: i,
                    institution: s,
                });
            }
        }
    }
    Ok(())
}

/// Runs every assignment-level check and the stability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentAudit {
    pub individually_rational: Result<(), AssignmentViolation>,
    pub within_category_fair: Result<(), AssignmentViolation>,
    pub non_wasteful: Result<(), AssignmentViolation>,
    pub over_and_above: Result<(), AssignmentViolation>,
    pub stable: Result<(), StabilityViolation>,
}

impl AssignmentAudit {
    pub fn run(market: &Market, a: &Assignment) -> Self {
        Self {
            individually_rational: is_individually_rational(market, a),
            within_category_fair: is_within_category_fair(market, a),
            non_wasteful: is_non_wasteful(market, a),
            over_and_above: satisfies_over_and_above_assignment(market, a),
            stable: is_stable(market, a),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.individually_rational.is_ok()
            && self.within_category_fair.is_ok()
            && self.non_wasteful.is_ok()
            && self.over_and_above.is_ok()
            && self.stable.is_ok()
    }
}
