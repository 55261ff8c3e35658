// SPDX-License-Identifier: Apache-2.0

use crate::choice::ChoiceResult;
use crate::model::{CategoryId, IndividualId, Institution, Membership};

use super::OracleError;

/// Any capacity- and eligibility-respecting way to place a pool into categories.
///
/// Chosen sets are disjoint; reserve sets hold only acceptable effective members of that
/// category; the open set holds only acceptable individuals.
pub type FeasibleSelection = ChoiceResult;

/// Iterator over every [`FeasibleSelection`] of a pool, each exactly once.
///
/// Each pool member independently takes one of its options (rejected, open, own reserve
/// category); combinations exceeding a category's seats are skipped.
pub struct FeasibleSelections {
    pool: Vec<IndividualId>,
    options: Vec<Vec<Option<CategoryId>>>,
    seats: Vec<u32>,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_feasible_selections(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    max_pool: usize,
) -> Result<FeasibleSelections, OracleError> {
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() > max_pool {
        return Err(OracleError::PoolTooLarge {
            size: pool.len(),
            limit: max_pool,
        });
    }
    let cap = &institution.capacity;
    let options = pool
        .iter()
        .map(|&i| {
            let mut opts = vec![None];
            if institution.merit.is_acceptable(i) {
                opts.push(Some(cap.open_category()));
                if let Membership::Reserve(c) = memberships[i.0] {
                    opts.push(Some(c));
                }
            }
            opts
        })
        .collect();
    let seats = (0..cap.num_categories())
        .map(|c| cap.seats(CategoryId(c)))
        .collect();
    let digits = vec![0; pool.len()];
    Ok(FeasibleSelections {
        pool,
        options,
        seats,
        digits,
        done: false,
    })
}

impl FeasibleSelections {
    fn advance(&mut self) {
        for (d, opts) in self.digits.iter_mut().zip(&self.options) {
            *d += 1;
            if *d < opts.len() {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }

    fn feasible(&self) -> bool {
        let mut used = vec![0u32; self.seats.len()];
        for (&d, opts) in self.digits.iter().zip(&self.options) {
            if let Some(c) = opts[d] {
                used[c.0] += 1;
                if used[c.0] > self.seats[c.0] {
                    return false;
                }
            }
        }
        true
    }

    fn current(&self) -> FeasibleSelection {
        let mut out = ChoiceResult::empty(self.seats.len());
        for ((&d, opts), &i) in self.digits.iter().zip(&self.options).zip(&self.pool) {
            match opts[d] {
                Some(c) => out.push(c, i),
                None => out.reject(i),
            }
        }
        out
    }
}

impl Iterator for FeasibleSelections {
    type Item = FeasibleSelection;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            let ok = self.feasible();
            let item = ok.then(|| self.current());
            self.advance();
            if item.is_some() {
                return item;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstitutionId;
    use crate::testutil::one_school;
    use std::collections::HashSet;

    /// Independent count: every assignment of per-category subsets, filtered for disjointness,
    /// capacity and eligibility.
    fn brute_count(
        inst: &Institution,
        pool: &[IndividualId],
        memberships: &[Membership],
    ) -> usize {
        let n = pool.len();
        let cats = inst.capacity.num_categories();
        let open = inst.capacity.open_category();
        let mut count = 0;
        let total = 1usize << (n * cats);
        for code in 0..total {
            let masks: Vec<usize> = (0..cats).map(|c| (code >> (c * n)) & ((1 << n) - 1)).collect();
            let mut ok = true;
            for a in 0..cats {
                for b in a + 1..cats {
                    ok &= masks[a] & masks[b] == 0;
                }
                ok &= masks[a].count_ones() <= inst.capacity.seats(CategoryId(a));
                for (k, &i) in pool.iter().enumerate() {
                    if masks[a] >> k & 1 == 1 {
                        ok &= inst.merit.is_acceptable(i);
                        if CategoryId(a) != open {
                            ok &= memberships[i.0] == Membership::Reserve(CategoryId(a));
                        }
                    }
                }
            }
            count += ok as usize;
        }
        count
    }

    #[test]
    fn two_reserve_members_one_seat_each() {
        let m = one_school(1, 1, &[Some(1), Some(1)], &[0, 1]);
        let inst = m.institution(InstitutionId(0));
        let pool = [IndividualId(0), IndividualId(1)];
        let all: Vec<_> = enumerate_feasible_selections(inst, &pool, &m.memberships(), 10)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 7);
        assert_eq!(brute_count(inst, &pool, &m.memberships()), 7);
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 7);
    }

    #[test]
    fn empty_pool_has_one_selection() {
        let m = one_school(1, 1, &[None], &[0]);
        let inst = m.institution(InstitutionId(0));
        let all: Vec<_> = enumerate_feasible_selections(inst, &[], &m.memberships(), 10)
            .unwrap()
            .collect();
        assert_eq!(all, vec![ChoiceResult::empty(3)]);
    }

    #[test]
    fn single_general_applicant() {
        let m = one_school(1, 0, &[None], &[0]);
        let inst = m.institution(InstitutionId(0));
        let n = enumerate_feasible_selections(inst, &[IndividualId(0)], &m.memberships(), 10)
            .unwrap()
            .count();
        assert_eq!(n, 2);
    }

    #[test]
    fn matches_brute_force_on_mixed_pools() {
        let m = one_school(2, 1, &[None, Some(1), Some(1), None, Some(1)], &[4, 0, 2, 1]);
        let inst = m.institution(InstitutionId(0));
        let t = m.memberships();
        for mask in 0u32..32 {
            let pool: Vec<_> = (0..5).filter(|k| mask >> k & 1 == 1).map(IndividualId).collect();
            let n = enumerate_feasible_selections(inst, &pool, &t, 10).unwrap().count();
            assert_eq!(n, brute_count(inst, &pool, &t), "pool {pool:?}");
        }
    }

    #[test]
    fn oversized_pool_is_refused() {
        let m = one_school(1, 1, &[None, None, None], &[0, 1, 2]);
        let inst = m.institution(InstitutionId(0));
        let pool: Vec<_> = m.individual_ids().collect();
        assert!(matches!(
            enumerate_feasible_selections(inst, &pool, &m.memberships(), 2),
            Err(OracleError::PoolTooLarge { size: 3, limit: 2 })
        ));
    }
}
