// SPDX-License-Identifier: Apache-2.0

//! Assignments (institution-category pairs) and the matchings they induce.

use thiserror::Error;

use crate::format::{AssignmentFile, SeatEntry, SeatRecord, UnassignedMarker};
use crate::model::{CategoryId, IndividualId, InstitutionId, Market, Membership};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seat {
    pub institution: InstitutionId,
    pub category: CategoryId,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("assignment has {found} entries but the market has {expected} individuals")]
    WrongLength { expected: usize, found: usize },
    #[error("individual `{individual}` cannot hold a `{category}` seat")]
    Ineligible {
        individual: String,
        category: String,
    },
    #[error("`{institution}` holds {held} individuals but has {total} seats")]
    OverTotal {
        institution: String,
        held: usize,
        total: u32,
    },
    #[error("`{institution}` holds {held} `{category}` seats but has {seats}")]
    OverCategory {
        institution: String,
        category: String,
        held: usize,
        seats: u32,
    },
    #[error("{context} refers to unknown id `{id}`")]
    DanglingReference { context: String, id: String },
    #[error("individual `{0}` appears more than once")]
    Duplicate(String),
}

/// Each individual's seat, and each institution's set of (individual, category) pairs.
///
/// Construction checks eligibility (general individuals hold only open seats, reserve members
/// only open or their own category) and per-category and total capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    seats: Vec<Option<Seat>>,
    holders: Vec<Vec<(IndividualId, CategoryId)>>,
}

impl Assignment {
    pub fn new(market: &Market, seats: Vec<Option<Seat>>) -> Result<Self, AssignmentError> {
        if seats.len() != market.num_individuals() {
            return Err(AssignmentError::WrongLength {
                expected: market.num_individuals(),
                found: seats.len(),
            });
        }
        let open = market.open_category();
        let mut holders = vec![Vec::new(); market.num_institutions()];
        for (k, seat) in seats.iter().enumerate() {
            let Some(seat) = seat else { continue };
            let i = IndividualId(k);
            let eligible = seat.category == open
                || market.individual(i).effective() == Membership::Reserve(seat.category);
            if !eligible {
                return Err(AssignmentError::Ineligible {
                    individual: market.individual_name(i).to_string(),
                    category: market.category_name(seat.category).to_string(),
                });
            }
            holders[seat.institution.0].push((i, seat.category));
        }
        for s in market.institution_ids() {
            let cap = &market.institution(s).capacity;
            let held = &holders[s.0];
            if held.len() > cap.total() as usize {
                return Err(AssignmentError::OverTotal {
                    institution: market.institution_name(s).to_string(),
                    held: held.len(),
                    total: cap.total(),
                });
            }
            for (c, _) in market.categories().iter().enumerate() {
                let c = CategoryId(c);
                let n = held.iter().filter(|&&(_, k)| k == c).count();
                if n > cap.seats(c) as usize {
                    return Err(AssignmentError::OverCategory {
                        institution: market.institution_name(s).to_string(),
                        category: market.category_name(c).to_string(),
                        held: n,
                        seats: cap.seats(c),
                    });
                }
            }
        }
        Ok(Self { seats, holders })
    }

    pub fn unassigned(market: &Market) -> Self {
        Self {
            seats: vec![None; market.num_individuals()],
            holders: vec![Vec::new(); market.num_institutions()],
        }
    }

    pub fn seat(&self, i: IndividualId) -> Option<Seat> {
        self.seats[i.0]
    }

    pub fn seats(&self) -> &[Option<Seat>] {
        &self.seats
    }

    pub fn institution_of(&self, i: IndividualId) -> Option<InstitutionId> {
        self.seats[i.0].map(|s| s.institution)
    }

    /// η(s), ordered by individual index.
    pub fn holders(&self, s: InstitutionId) -> &[(IndividualId, CategoryId)] {
        &self.holders[s.0]
    }

    pub fn holders_in(
        &self,
        s: InstitutionId,
        c: CategoryId,
    ) -> impl Iterator<Item = IndividualId> + '_ {
        self.holders[s.0]
            .iter()
            .filter(move |&&(_, k)| k == c)
            .map(|&(i, _)| i)
    }

    pub fn from_file(market: &Market, file: &AssignmentFile) -> Result<Self, AssignmentError> {
        let mut seats = vec![None; market.num_individuals()];
        let mut seen = vec![false; market.num_individuals()];
        for rec in &file.assignment {
            let i = market.individual_by_name(&rec.individual).ok_or_else(|| {
                AssignmentError::DanglingReference {
                    context: "assignment".into(),
                    id: rec.individual.clone(),
                }
            })?;
            if std::mem::replace(&mut seen[i.0], true) {
                return Err(AssignmentError::Duplicate(rec.individual.clone()));
            }
            if let SeatEntry::Held {
                institution,
                category,
            } = &rec.seat
            {
                let s = market.institution_by_name(institution).ok_or_else(|| {
                    AssignmentError::DanglingReference {
                        context: format!("seat of `{}`", rec.individual),
                        id: institution.clone(),
                    }
                })?;
                let c = market
                    .category_by_name(category)
                    .filter(|&c| market.category(c).kind != crate::format::CategoryKind::General)
                    .ok_or_else(|| AssignmentError::DanglingReference {
                        context: format!("seat of `{}`", rec.individual),
                        id: category.clone(),
                    })?;
                seats[i.0] = Some(Seat {
                    institution: s,
                    category: c,
                });
            }
        }
        Self::new(market, seats)
    }

    /// Every individual in market order; unassigned ones carry the explicit marker.
    pub fn to_records(&self, market: &Market) -> Vec<SeatRecord> {
        market
            .individual_ids()
            .map(|i| SeatRecord {
                individual: market.individual_name(i).to_string(),
                seat: match self.seats[i.0] {
                    Some(seat) => SeatEntry::Held {
                        institution: market.institution_name(seat.institution).to_string(),
                        category: market.category_name(seat.category).to_string(),
                    },
                    None => SeatEntry::Unassigned(UnassignedMarker::Unassigned),
                },
            })
            .collect()
    }
}

/// Category-erased view of an [`Assignment`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    partner: Vec<Option<InstitutionId>>,
    members: Vec<Vec<IndividualId>>,
}

impl Matching {
    pub fn partner(&self, i: IndividualId) -> Option<InstitutionId> {
        self.partner[i.0]
    }

    /// μ(s), ordered by individual index.
    pub fn members(&self, s: InstitutionId) -> &[IndividualId] {
        &self.members[s.0]
    }
}

pub fn induced_matching(a: &Assignment) -> Matching {
    Matching {
        partner: a.seats.iter().map(|s| s.map(|s| s.institution)).collect(),
        members: a
            .holders
            .iter()
            .map(|h| h.iter().map(|&(i, _)| i).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::model::validate_instance;

    fn market() -> Market {
        let text = r#"{
            "categories": [{"name":"open","kind":"open"},{"name":"r","kind":"reserve"}],
            "institutions": [
                {"id":"s","capacity":{"total":2,"reserved":{"r":1}},"merit":["i","j","k"]},
                {"id":"t","capacity":{"total":1},"merit":["i","j","k"]}
            ],
            "individuals": [
                {"id":"i","category":"GC"},
                {"id":"j","category":"r"},
                {"id":"k","category":"r"}
            ]
        }"#;
        validate_instance(&parse_instance(text).unwrap()).unwrap()
    }

    fn seat(s: usize, c: usize) -> Option<Seat> {
        Some(Seat {
            institution: InstitutionId(s),
            category: CategoryId(c),
        })
    }

    #[test]
    fn single_open_seat_projects() {
        let m = market();
        let a = Assignment::new(&m, vec![seat(0, 0), None, None]).unwrap();
        let mu = induced_matching(&a);
        assert_eq!(mu.partner(IndividualId(0)), Some(InstitutionId(0)));
        assert_eq!(mu.members(InstitutionId(0)), &[IndividualId(0)]);
        assert!(mu.members(InstitutionId(1)).is_empty());
    }

    #[test]
    fn empty_assignment_projects_to_empty_matching() {
        let m = market();
        let mu = induced_matching(&Assignment::unassigned(&m));
        assert!(m.individual_ids().all(|i| mu.partner(i).is_none()));
        assert!(m.institution_ids().all(|s| mu.members(s).is_empty()));
    }

    #[test]
    fn categories_are_erased() {
        let m = market();
        let a = Assignment::new(&m, vec![seat(0, 0), seat(0, 1), None]).unwrap();
        let mu = induced_matching(&a);
        assert_eq!(mu.members(InstitutionId(0)), &[IndividualId(0), IndividualId(1)]);
        assert_eq!(mu.members(InstitutionId(0)).len(), a.holders(InstitutionId(0)).len());
    }

    #[test]
    fn general_cannot_hold_reserve_seat() {
        let m = market();
        let err = Assignment::new(&m, vec![seat(0, 1), None, None]).unwrap_err();
        assert!(matches!(err, AssignmentError::Ineligible { .. }));
    }

    #[test]
    fn category_capacity_enforced() {
        let m = market();
        let err = Assignment::new(&m, vec![None, seat(0, 1), seat(0, 1)]).unwrap_err();
        assert!(matches!(err, AssignmentError::OverCategory { .. }));
        let err = Assignment::new(&m, vec![seat(1, 0), seat(1, 0), None]).unwrap_err();
        assert!(matches!(err, AssignmentError::OverCategory { .. } | AssignmentError::OverTotal { .. }));
    }

    #[test]
    fn file_round_trip() {
        let m = market();
        let a = Assignment::new(&m, vec![seat(0, 0), seat(0, 1), seat(1, 0)]).unwrap();
        let file = AssignmentFile {
            assignment: a.to_records(&m),
            rounds: None,
        };
        assert_eq!(Assignment::from_file(&m, &file).unwrap(), a);
    }
}
