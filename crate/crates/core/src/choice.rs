// SPDX-License-Identifier: Apache-2.0

//! The over-and-above choice rule and the three choice-level axioms.
//!
//! A choice rule maps a pool of applicants at one institution to a [`ChoiceResult`]: a chosen
//! set per position category plus the rejected remainder. Under the over-and-above rule the
//! open seats go first, to the top of the pool by merit; reserve seats then go to the best
//! remaining members of each reserve category.

use thiserror::Error;

use crate::model::{CapacityProfile, CategoryId, IndividualId, Institution, MeritOrder, Membership};

/// Per-category chosen sets plus the rejected remainder of one pool.
///
/// All lists are kept sorted by individual index so that structurally equal results compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChoiceResult {
    chosen: Vec<Vec<IndividualId>>,
    rejected: Vec<IndividualId>,
}

impl ChoiceResult {
    pub fn empty(num_categories: usize) -> Self {
        Self {
            chosen: vec![Vec::new(); num_categories],
            rejected: Vec::new(),
        }
    }

    /// Builds a result from raw parts. Overlapping or out-of-pool entries are kept as given so
    /// that malformed results can still be audited.
    pub fn from_parts(mut chosen: Vec<Vec<IndividualId>>, mut rejected: Vec<IndividualId>) -> Self {
        for set in &mut chosen {
            set.sort_unstable();
        }
        rejected.sort_unstable();
        Self { chosen, rejected }
    }

    pub fn num_categories(&self) -> usize {
        self.chosen.len()
    }

    pub fn chosen(&self, c: CategoryId) -> &[IndividualId] {
        self.chosen.get(c.0).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rejected(&self) -> &[IndividualId] {
        &self.rejected
    }

    /// First category (by index) in which `i` is chosen.
    pub fn category_of(&self, i: IndividualId) -> Option<CategoryId> {
        self.chosen
            .iter()
            .position(|set| set.binary_search(&i).is_ok())
            .map(CategoryId)
    }

    pub fn is_chosen(&self, i: IndividualId) -> bool {
        self.category_of(i).is_some()
    }

    /// Number of seats filled, counting an individual once per category they appear in.
    pub fn filled(&self) -> usize {
        self.chosen.iter().map(Vec::len).sum()
    }

    /// Union of the chosen sets, sorted and deduplicated.
    pub fn all_chosen(&self) -> Vec<IndividualId> {
        let mut out: Vec<IndividualId> = self.chosen.iter().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn push(&mut self, c: CategoryId, i: IndividualId) {
        self.chosen[c.0].push(i);
    }

    pub(crate) fn reject(&mut self, i: IndividualId) {
        self.rejected.push(i);
    }

    pub(crate) fn normalize(&mut self) {
        for set in &mut self.chosen {
            set.sort_unstable();
        }
        self.rejected.sort_unstable();
    }
}

/// A choice procedure at a single institution.
pub trait ChoiceRule: Sync {
    fn choose(
        &self,
        institution: &Institution,
        pool: &[IndividualId],
        memberships: &[Membership],
    ) -> ChoiceResult;
}

/// The over-and-above rule: open seats by overall merit, then reserve seats among the rest.
#[derive(Clone, Copy, Debug, Default)]
pub struct OverAndAbove;

impl ChoiceRule for OverAndAbove {
    fn choose(
        &self,
        institution: &Institution,
        pool: &[IndividualId],
        memberships: &[Membership],
    ) -> ChoiceResult {
        over_and_above_choose(institution, pool, memberships)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("category {0:?} is not a reserve category")]
    UnknownCategory(CategoryId),
    #[error("individual {0:?} is not in the pool")]
    NotInPool(IndividualId),
    #[error("individual {0:?} is unacceptable")]
    Unacceptable(IndividualId),
}

/// The eligible members of one reserve category, in merit order (≻ restricted to the category).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryMeritOrder {
    pub category: CategoryId,
    pub ranked: Vec<IndividualId>,
}

/// Acceptable individuals whose effective membership is `category`, in `merit` order.
pub fn derive_category_merit(
    institution: &Institution,
    memberships: &[Membership],
    category: CategoryId,
) -> Result<CategoryMeritOrder, ChoiceError> {
    let cap = &institution.capacity;
    if category == cap.open_category() || category.0 >= cap.num_categories() {
        return Err(ChoiceError::UnknownCategory(category));
    }
    let ranked = institution
        .merit
        .ranked()
        .iter()
        .copied()
        .filter(|i| memberships.get(i.0) == Some(&Membership::Reserve(category)))
        .collect();
    Ok(CategoryMeritOrder { category, ranked })
}

/// `rank_A(i) = 1 + |{j ∈ A : j ≻ i}|`.
pub fn rank_in_set(
    merit: &MeritOrder,
    pool: &[IndividualId],
    i: IndividualId,
) -> Result<usize, ChoiceError> {
    if !pool.contains(&i) {
        return Err(ChoiceError::NotInPool(i));
    }
    if !merit.is_acceptable(i) {
        return Err(ChoiceError::Unacceptable(i));
    }
    Ok(1 + pool.iter().filter(|&&j| merit.prefers(j, i)).count())
}

/// Pool members sorted by merit with duplicates removed: acceptable ones first, then the rest.
fn merit_sorted(merit: &MeritOrder, pool: &[IndividualId]) -> Vec<IndividualId> {
    let mut sorted = pool.to_vec();
    sorted.sort_unstable_by_key(|&i| merit.sort_key(i));
    sorted.dedup();
    sorted
}

/// Over-and-above choice with an explicit capacity profile.
pub fn over_and_above_with_capacity(
    merit: &MeritOrder,
    capacity: &CapacityProfile,
    pool: &[IndividualId],
    memberships: &[Membership],
) -> ChoiceResult {
    let mut out = ChoiceResult::empty(capacity.num_categories());
    let sorted = merit_sorted(merit, pool);
    let (acceptable, unacceptable) =
        sorted.split_at(sorted.partition_point(|&i| merit.is_acceptable(i)));

    let open_seats = (capacity.open() as usize).min(acceptable.len());
    for &i in &acceptable[..open_seats] {
        out.push(capacity.open_category(), i);
    }
    let remaining = &acceptable[open_seats..];

    let mut taken = vec![false; remaining.len()];
    for c in capacity.reserve_categories() {
        let mut left = capacity.seats(c) as usize;
        for (k, &i) in remaining.iter().enumerate() {
            if left == 0 {
                break;
            }
            if memberships[i.0] == Membership::Reserve(c) {
                out.push(c, i);
                taken[k] = true;
                left -= 1;
            }
        }
    }
    for (k, &i) in remaining.iter().enumerate() {
        if !taken[k] {
            out.reject(i);
        }
    }
    for &i in unacceptable {
        out.reject(i);
    }
    out.normalize();
    out
}

pub fn over_and_above_choose(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
) -> ChoiceResult {
    over_and_above_with_capacity(&institution.merit, &institution.capacity, pool, memberships)
}

/// Violation of one of the three formal choice-level axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `individual` ranks within the top open-seat count of the pool but holds no open seat.
    OverAndAbove { individual: IndividualId },
    /// `higher` shares `lower`'s category and beats them on merit, yet only `lower` is chosen.
    WithinCategoryFairness {
        higher: IndividualId,
        lower: IndividualId,
    },
    /// An eligible member of `category` is rejected while the category has unfilled seats.
    QuotaFilling {
        category: CategoryId,
        unassigned: IndividualId,
        filled: usize,
        seats: u32,
    },
}

pub fn check_over_and_above_principle(
    institution: &Institution,
    pool: &[IndividualId],
    result: &ChoiceResult,
) -> Result<(), AxiomViolation> {
    let merit = &institution.merit;
    let open_seats = institution.capacity.open() as usize;
    let open = result.chosen(institution.capacity.open_category());
    // acceptable members sit at the front of the merit-sorted pool, so rank k is index k-1
    let sorted = merit_sorted(merit, pool);
    for &i in sorted.iter().take(open_seats) {
        if !merit.is_acceptable(i) {
            break;
        }
        if !open.contains(&i) {
            return Err(AxiomViolation::OverAndAbove { individual: i });
        }
    }
    Ok(())
}

pub fn check_within_category_fairness(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
) -> Result<(), AxiomViolation> {
    let merit = &institution.merit;
    let sorted = merit_sorted(merit, pool);
    for (a, &higher) in sorted.iter().enumerate() {
        if result.is_chosen(higher) {
            continue;
        }
        for &lower in &sorted[a + 1..] {
            if memberships[lower.0] == memberships[higher.0]
                && merit.prefers(higher, lower)
                && result.is_chosen(lower)
            {
                return Err(AxiomViolation::WithinCategoryFairness { higher, lower });
            }
        }
    }
    Ok(())
}

pub fn check_quota_filling(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
) -> Result<(), AxiomViolation> {
    let merit = &institution.merit;
    let sorted = merit_sorted(merit, pool);
    for c in institution.capacity.reserve_categories() {
        let seats = institution.capacity.seats(c);
        let filled = result.chosen(c).len();
        if filled == seats as usize {
            continue;
        }
        let unassigned = sorted.iter().copied().find(|&i| {
            merit.is_acceptable(i)
                && memberships[i.0] == Membership::Reserve(c)
                && !result.is_chosen(i)
        });
        if let Some(unassigned) = unassigned {
            return Err(AxiomViolation::QuotaFilling {
                category: c,
                unassigned,
                filled,
                seats,
            });
        }
    }
    Ok(())
}

/// All three formal axioms, reporting the first violation found.
pub fn check_formal_axioms(
    institution: &Institution,
    pool: &[IndividualId],
    memberships: &[Membership],
    result: &ChoiceResult,
) -> Result<(), AxiomViolation> {
    check_over_and_above_principle(institution, pool, result)?;
    check_within_category_fairness(institution, pool, memberships, result)?;
    check_quota_filling(institution, pool, memberships, result)
}
