// SPDX-License-Identifier: Apache-2.0

//! Deliberately flawed rules and mechanisms used to show the oracles can fail.

use crate::assignment::{Assignment, Seat};
use crate::choice::{over_and_above_choose, over_and_above_with_capacity, ChoiceResult, ChoiceRule};
use crate::model::{CategoryId, IndividualId, Institution, Market, Membership};

use super::manipulation::Mechanism;

fn merit_sorted_acceptable(inst: &Institution, pool: &[IndividualId]) -> (Vec<IndividualId>, Vec<IndividualId>) {
    let mut sorted = pool.to_vec();
    sorted.sort_unstable_by_key(|&i| inst.merit.sort_key(i));
    sorted.dedup();
    let split = sorted.partition_point(|&i| inst.merit.is_acceptable(i));
    let unacceptable = sorted.split_off(split);
    (sorted, unacceptable)
}

/// Reserve seats first, then open seats from the remainder. Breaks the over-and-above
/// principle whenever a reserve member would also have won an open seat.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReserveFirst;

impl ReserveFirst {
    fn choose_gated(
        inst: &Institution,
        pool: &[IndividualId],
        memberships: &[Membership],
        all_or_nothing: bool,
    ) -> ChoiceResult {
        let cap = &inst.capacity;
        let (acceptable, unacceptable) = merit_sorted_acceptable(inst, pool);
        let mut out = ChoiceResult::empty(cap.num_categories());
        let mut taken = vec![false; acceptable.len()];
        for c in cap.reserve_categories() {
            let seats = cap.seats(c) as usize;
            let eligible: Vec<usize> = (0..acceptable.len())
                .filter(|&k| memberships[acceptable[k].0] == Membership::Reserve(c))
                .collect();
            if all_or_nothing && eligible.len() < seats {
                continue;
            }
            for &k in eligible.iter().take(seats) {
                out.push(c, acceptable[k]);
                taken[k] = true;
            }
        }
        let mut open_left = cap.open() as usize;
        for (k, &i) in acceptable.iter().enumerate() {
            if taken[k] {
                continue;
            }
            if open_left > 0 {
                out.push(cap.open_category(), i);
                open_left -= 1;
            } else {
                out.reject(i);
            }
        }
        for i in unacceptable {
            out.reject(i);
        }
        out.normalize();
        out
    }
}

impl ChoiceRule for ReserveFirst {
    fn choose(&self, inst: &Institution, pool: &[IndividualId], memberships: &[Membership]) -> ChoiceResult {
        Self::choose_gated(inst, pool, memberships, false)
    }
}

/// Reserve-first, except a reserve category only opens once it has at least as many eligible
/// applicants as seats. A second member can thereby pull a rejected first member back in, so
/// the rule is not substitutable.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReserveFirstAllOrNothing;

impl ChoiceRule for ReserveFirstAllOrNothing {
    fn choose(&self, inst: &Institution, pool: &[IndividualId], memberships: &[Membership]) -> ChoiceResult {
        ReserveFirst::choose_gated(inst, pool, memberships, true)
    }
}

/// Over-and-above, but when acceptable applicants outnumber seats the two lowest-merit chosen
/// applicants are dropped. Not size monotone.
#[derive(Clone, Copy, Debug, Default)]
pub struct DropTwo;

impl ChoiceRule for DropTwo {
    fn choose(&self, inst: &Institution, pool: &[IndividualId], memberships: &[Membership]) -> ChoiceResult {
        let base = over_and_above_choose(inst, pool, memberships);
        let acceptable = pool.iter().filter(|&&i| inst.merit.is_acceptable(i)).count();
        if acceptable <= inst.capacity.total() as usize {
            return base;
        }
        let mut chosen = base.all_chosen();
        chosen.sort_unstable_by_key(|&i| inst.merit.sort_key(i));
        let dropped: Vec<IndividualId> = chosen.iter().rev().take(2).copied().collect();
        let mut out = ChoiceResult::empty(base.num_categories());
        for c in 0..base.num_categories() {
            for &i in base.chosen(CategoryId(c)) {
                if dropped.contains(&i) {
                    out.reject(i);
                } else {
                    out.push(CategoryId(c), i);
                }
            }
        }
        for &i in base.rejected() {
            out.reject(i);
        }
        out.normalize();
        out
    }
}

/// Immediate acceptance: in round k every still-unassigned individual applies to their k-th
/// choice and institutions permanently admit the over-and-above choice among that round's
/// applicants, using whatever seats remain in each category.
#[derive(Clone, Copy, Debug, Default)]
pub struct ImmediateAcceptance;

impl Mechanism for ImmediateAcceptance {
    fn name(&self) -> &'static str {
        "immediate-acceptance"
    }

    fn assign(&self, market: &Market) -> Assignment {
        let memberships = market.memberships();
        let mut seats: Vec<Option<Seat>> = vec![None; market.num_individuals()];
        let mut remaining: Vec<Vec<u32>> = market
            .institutions()
            .iter()
            .map(|inst| {
                (0..inst.capacity.num_categories())
                    .map(|c| inst.capacity.seats(CategoryId(c)))
                    .collect()
            })
            .collect();
        let longest = market
            .individual_ids()
            .map(|i| market.preferences(i).len())
            .max()
            .unwrap_or(0);
        for round in 0..longest {
            let mut applicants = vec![Vec::new(); market.num_institutions()];
            for i in market.individual_ids() {
                if seats[i.0].is_none() {
                    if let Some(&s) = market.preferences(i).get(round) {
                        applicants[s.0].push(i);
                    }
                }
            }
            for s in market.institution_ids() {
                if applicants[s.0].is_empty() {
                    continue;
                }
                let inst = market.institution(s);
                let cap = inst.capacity.with_seats(remaining[s.0].clone());
                let choice = over_and_above_with_capacity(&inst.merit, &cap, &applicants[s.0], &memberships);
                for (c, left) in remaining[s.0].iter_mut().enumerate() {
                    for &i in choice.chosen(CategoryId(c)) {
                        seats[i.0] = Some(Seat {
                            institution: s,
                            category: CategoryId(c),
                        });
                        *left -= 1;
                    }
                }
            }
        }
        Assignment::new(market, seats).expect("remaining capacities are never exceeded")
    }
}
