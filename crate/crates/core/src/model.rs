// SPDX-License-Identifier: Apache-2.0

//! Validated reservation markets.
//!
//! Everything downstream works on dense indices ([`IndividualId`], [`InstitutionId`],
//! [`CategoryId`]) into a [`Market`]; names only reappear when documents are written.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::format::{
    CapacityEntry, CategoryEntry, CategoryKind, IndividualEntry, InstanceFile, InstitutionEntry,
};

/// Label used for general-category individuals when the instance does not name one.
pub const DEFAULT_GENERAL_LABEL: &str = "GC";

macro_rules! index_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_type!(IndividualId);
index_type!(InstitutionId);
index_type!(CategoryId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub kind: CategoryKind,
}

/// Effective (or true) reserve membership of an individual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    General,
    Reserve(CategoryId),
}

impl Membership {
    pub fn reserve(self) -> Option<CategoryId> {
        match self {
            Membership::General => None,
            Membership::Reserve(c) => Some(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub id: String,
    pub true_category: Membership,
    pub declared: bool,
}

impl Individual {
    /// Category the mechanism sees: undeclared reserve members count as general.
    pub fn effective(&self) -> Membership {
        if self.declared {
            self.true_category
        } else {
            Membership::General
        }
    }
}

/// Seats per position category. Entries for non-position categories are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityProfile {
    total: u32,
    open: CategoryId,
    seats: Vec<u32>,
}

impl CapacityProfile {
    /// `reserved[c]` is the number of seats earmarked for category `c`; the open entry is ignored
    /// and recomputed as the remainder. Returns `None` when the reserves exceed `total`.
    pub fn new(total: u32, open: CategoryId, reserved: Vec<u32>) -> Option<Self> {
        let mut seats = reserved;
        seats[open.0] = 0;
        let earmarked: u64 = seats.iter().map(|&s| u64::from(s)).sum();
        if earmarked > u64::from(total) {
            return None;
        }
        seats[open.0] = total - earmarked as u32;
        Some(Self { total, open, seats })
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn open_category(&self) -> CategoryId {
        self.open
    }

    pub fn open(&self) -> u32 {
        self.seats[self.open.0]
    }

    pub fn seats(&self, category: CategoryId) -> u32 {
        self.seats.get(category.0).copied().unwrap_or(0)
    }

    pub fn num_categories(&self) -> usize {
        self.seats.len()
    }

    /// Categories other than open that carry at least the possibility of seats, in index order.
    pub fn reserve_categories(&self) -> impl Iterator<Item = CategoryId> + '_ {
        (0..self.seats.len())
            .map(CategoryId)
            .filter(move |&c| c != self.open)
    }

    pub(crate) fn with_seats(&self, seats: Vec<u32>) -> Self {
        let total = seats.iter().sum();
        Self {
            total,
            open: self.open,
            seats,
        }
    }
}

/// Strict merit ranking of an institution; unlisted individuals are unacceptable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeritOrder {
    ranked: Vec<IndividualId>,
    position: Vec<Option<usize>>,
}

impl MeritOrder {
    /// Returns `None` if `ranked` repeats an id or refers past `num_individuals`.
    pub fn new(ranked: Vec<IndividualId>, num_individuals: usize) -> Option<Self> {
        let mut position = vec![None; num_individuals];
        for (k, &i) in ranked.iter().enumerate() {
            let slot = position.get_mut(i.0)?;
            if slot.is_some() {
                return None;
            }
            *slot = Some(k);
        }
        Some(Self { ranked, position })
    }

    pub fn ranked(&self) -> &[IndividualId] {
        &self.ranked
    }

    pub fn position(&self, i: IndividualId) -> Option<usize> {
        self.position.get(i.0).copied().flatten()
    }

    pub fn is_acceptable(&self, i: IndividualId) -> bool {
        self.position(i).is_some()
    }

    /// `i ≻ j`. Acceptable individuals beat unacceptable ones; two unacceptable individuals are
    /// incomparable and neither beats the other.
    pub fn prefers(&self, i: IndividualId, j: IndividualId) -> bool {
        match (self.position(i), self.position(j)) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        }
    }

    /// Sort key placing acceptable individuals first, in merit order.
    pub fn sort_key(&self, i: IndividualId) -> (usize, usize) {
        match self.position(i) {
            Some(p) => (0, p),
            None => (1, i.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Institution {
    pub id: String,
    pub capacity: CapacityProfile,
    pub merit: MeritOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{context} refers to unknown id `{id}`")]
    DanglingReference { context: String, id: String },
    #[error("merit order of `{institution}` lists `{individual}` more than once")]
    TieInMerit {
        institution: String,
        individual: String,
    },
    #[error("institution `{institution}` reserves {reserved} seats but has only {total}")]
    CapacityOverflow {
        institution: String,
        reserved: u64,
        total: u32,
    },
    #[error("{count} categories have kind `open`; exactly one is required")]
    MultipleOpenCategories { count: usize },
    #[error("more than one category has kind `general`")]
    MultipleGeneralCategories,
    #[error("{context}: `{category}` is not a reserve category")]
    NotReserveCategory { context: String, category: String },
    #[error("individual `{individual}` declares membership but belongs to no reserve category")]
    DeclaredGeneral { individual: String },
    #[error("preference list of `{individual}` lists `{institution}` more than once")]
    DuplicatePreference {
        individual: String,
        institution: String,
    },
}

/// All invariant violations found in one instance.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A validated reservation market: immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    categories: Vec<Category>,
    open: CategoryId,
    general: Option<CategoryId>,
    institutions: Vec<Institution>,
    individuals: Vec<Individual>,
    preferences: Vec<Vec<InstitutionId>>,
    category_index: HashMap<String, CategoryId>,
    institution_index: HashMap<String, InstitutionId>,
    individual_index: HashMap<String, IndividualId>,
}

/// Check every invariant of an instance document and build the indexed market.
pub fn validate_instance(raw: &InstanceFile) -> Result<Market, ValidationErrors> {
    let mut errors = Vec::new();

    let mut category_index = HashMap::new();
    let mut categories = Vec::with_capacity(raw.categories.len());
    for entry in &raw.categories {
        let id = CategoryId(categories.len());
        if category_index.insert(entry.name.clone(), id).is_some() {
            errors.push(ValidationError::DuplicateId {
                kind: "category",
                id: entry.name.clone(),
            });
        }
        categories.push(Category {
            name: entry.name.clone(),
            kind: entry.kind,
        });
    }
    let opens: Vec<CategoryId> = categories
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CategoryKind::Open)
        .map(|(k, _)| CategoryId(k))
        .collect();
    if opens.len() != 1 {
        errors.push(ValidationError::MultipleOpenCategories { count: opens.len() });
    }
    let generals: Vec<CategoryId> = categories
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CategoryKind::General)
        .map(|(k, _)| CategoryId(k))
        .collect();
    if generals.len() > 1 {
        errors.push(ValidationError::MultipleGeneralCategories);
    }
    let general = generals.first().copied();
    let general_label = general
        .map(|g| categories[g.0].name.clone())
        .unwrap_or_else(|| DEFAULT_GENERAL_LABEL.to_string());
    if general.is_none() && category_index.contains_key(DEFAULT_GENERAL_LABEL) {
        errors.push(ValidationError::DuplicateId {
            kind: "category",
            id: DEFAULT_GENERAL_LABEL.to_string(),
        });
    }

    let mut individual_index = HashMap::new();
    let mut individuals = Vec::with_capacity(raw.individuals.len());
    for entry in &raw.individuals {
        let id = IndividualId(individuals.len());
        if individual_index.insert(entry.id.clone(), id).is_some() {
            errors.push(ValidationError::DuplicateId {
                kind: "individual",
                id: entry.id.clone(),
            });
        }
        let true_category = if entry.category == general_label {
            Membership::General
        } else {
            match category_index.get(&entry.category) {
                Some(&c) if categories[c.0].kind == CategoryKind::Reserve => Membership::Reserve(c),
                Some(_) => {
                    errors.push(ValidationError::NotReserveCategory {
                        context: format!("individual `{}`", entry.id),
                        category: entry.category.clone(),
                    });
                    Membership::General
                }
                None => {
                    errors.push(ValidationError::DanglingReference {
                        context: format!("individual `{}`", entry.id),
                        id: entry.category.clone(),
                    });
                    Membership::General
                }
            }
        };
        let declared = entry
            .declared
            .unwrap_or(true_category != Membership::General);
        if declared && true_category == Membership::General {
            errors.push(ValidationError::DeclaredGeneral {
                individual: entry.id.clone(),
            });
        }
        individuals.push(Individual {
            id: entry.id.clone(),
            true_category,
            declared: declared && true_category != Membership::General,
        });
    }

    let open = opens.first().copied().unwrap_or(CategoryId(0));
    let mut institution_index = HashMap::new();
    let mut institutions = Vec::with_capacity(raw.institutions.len());
    for entry in &raw.institutions {
        let id = InstitutionId(institutions.len());
        if institution_index.insert(entry.id.clone(), id).is_some() {
            errors.push(ValidationError::DuplicateId {
                kind: "institution",
                id: entry.id.clone(),
            });
        }

        let mut reserved = vec![0u32; categories.len().max(1)];
        for (name, &seats) in &entry.capacity.reserved {
            match category_index.get(name) {
                Some(&c) if categories[c.0].kind == CategoryKind::Reserve => reserved[c.0] = seats,
                Some(_) => errors.push(ValidationError::NotReserveCategory {
                    context: format!("capacity of `{}`", entry.id),
                    category: name.clone(),
                }),
                None => errors.push(ValidationError::DanglingReference {
                    context: format!("capacity of `{}`", entry.id),
                    id: name.clone(),
                }),
            }
        }
        let capacity = match CapacityProfile::new(entry.capacity.total, open, reserved.clone()) {
            Some(c) => c,
            None => {
                errors.push(ValidationError::CapacityOverflow {
                    institution: entry.id.clone(),
                    reserved: reserved.iter().map(|&s| u64::from(s)).sum(),
                    total: entry.capacity.total,
                });
                CapacityProfile::new(0, open, vec![0; reserved.len()]).expect("zero fits")
            }
        };

        let mut seen = HashSet::new();
        let mut ranked = Vec::with_capacity(entry.merit.len());
        for name in &entry.merit {
            match individual_index.get(name) {
                Some(&i) => {
                    if seen.insert(i) {
                        ranked.push(i);
                    } else {
                        errors.push(ValidationError::TieInMerit {
                            institution: entry.id.clone(),
                            individual: name.clone(),
                        });
                    }
                }
                None => errors.push(ValidationError::DanglingReference {
                    context: format!("merit order of `{}`", entry.id),
                    id: name.clone(),
                }),
            }
        }
        let merit = MeritOrder::new(ranked, individuals.len()).expect("deduplicated above");
        institutions.push(Institution {
            id: entry.id.clone(),
            capacity,
            merit,
        });
    }

    let mut preferences = vec![Vec::new(); individuals.len()];
    for (who, list) in &raw.preferences {
        let Some(&i) = individual_index.get(who) else {
            errors.push(ValidationError::DanglingReference {
                context: "preferences".to_string(),
                id: who.clone(),
            });
            continue;
        };
        let mut seen = HashSet::new();
        for name in list {
            match institution_index.get(name) {
                Some(&s) => {
                    if seen.insert(s) {
                        preferences[i.0].push(s);
                    } else {
                        errors.push(ValidationError::DuplicatePreference {
                            individual: who.clone(),
                            institution: name.clone(),
                        });
                    }
                }
                None => errors.push(ValidationError::DanglingReference {
                    context: format!("preferences of `{who}`"),
                    id: name.clone(),
                }),
            }
        }
    }

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }
    Ok(Market {
        categories,
        open,
        general,
        institutions,
        individuals,
        preferences,
        category_index,
        institution_index,
        individual_index,
    })
}

impl Market {
    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, c: CategoryId) -> &Category {
        &self.categories[c.0]
    }

    pub fn open_category(&self) -> CategoryId {
        self.open
    }

    pub fn reserve_categories(&self) -> impl Iterator<Item = CategoryId> + '_ {
        self.categories
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == CategoryKind::Reserve)
            .map(|(k, _)| CategoryId(k))
    }

    pub fn general_label(&self) -> &str {
        match self.general {
            Some(g) => &self.categories[g.0].name,
            None => DEFAULT_GENERAL_LABEL,
        }
    }

    pub fn membership_label(&self, m: Membership) -> &str {
        match m {
            Membership::General => self.general_label(),
            Membership::Reserve(c) => &self.categories[c.0].name,
        }
    }

    pub fn institutions(&self) -> &[Institution] {
        &self.institutions
    }

    pub fn institution(&self, s: InstitutionId) -> &Institution {
        &self.institutions[s.0]
    }

    pub fn institution_ids(&self) -> impl Iterator<Item = InstitutionId> {
        (0..self.institutions.len()).map(InstitutionId)
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn individual(&self, i: IndividualId) -> &Individual {
        &self.individuals[i.0]
    }

    pub fn individual_ids(&self) -> impl Iterator<Item = IndividualId> {
        (0..self.individuals.len()).map(IndividualId)
    }

    pub fn num_individuals(&self) -> usize {
        self.individuals.len()
    }

    pub fn num_institutions(&self) -> usize {
        self.institutions.len()
    }

    /// Effective membership of every individual, indexed by [`IndividualId`].
    pub fn memberships(&self) -> Vec<Membership> {
        self.individuals.iter().map(Individual::effective).collect()
    }

    pub fn preferences(&self, i: IndividualId) -> &[InstitutionId] {
        &self.preferences[i.0]
    }

    /// Position of `s` in `i`'s list, `None` if unacceptable.
    pub fn preference_rank(&self, i: IndividualId, s: InstitutionId) -> Option<usize> {
        self.preferences[i.0].iter().position(|&t| t == s)
    }

    /// `s P_i current`, where `current = None` means unassigned.
    pub fn prefers(
        &self,
        i: IndividualId,
        s: InstitutionId,
        current: Option<InstitutionId>,
    ) -> bool {
        let Some(rank) = self.preference_rank(i, s) else {
            return false;
        };
        match current.map(|t| self.preference_rank(i, t)) {
            None => true,
            Some(None) => true,
            Some(Some(held)) => rank < held,
        }
    }

    pub fn category_by_name(&self, name: &str) -> Option<CategoryId> {
        self.category_index.get(name).copied()
    }

    pub fn institution_by_name(&self, name: &str) -> Option<InstitutionId> {
        self.institution_index.get(name).copied()
    }

    pub fn individual_by_name(&self, name: &str) -> Option<IndividualId> {
        self.individual_index.get(name).copied()
    }

    pub fn individual_name(&self, i: IndividualId) -> &str {
        &self.individuals[i.0].id
    }

    pub fn institution_name(&self, s: InstitutionId) -> &str {
        &self.institutions[s.0].id
    }

    pub fn category_name(&self, c: CategoryId) -> &str {
        &self.categories[c.0].name
    }

    pub fn names(&self, ids: &[IndividualId]) -> Vec<String> {
        ids.iter().map(|&i| self.individual_name(i).to_string()).collect()
    }

    /// Copy of the market in which `individual` reports `preferences` and `declared`.
    ///
    /// `declared` is ignored (forced false) for general-category individuals: the reporting
    /// space only allows hiding a true membership, never claiming one.
    pub fn with_report(
        &self,
        individual: IndividualId,
        preferences: Vec<InstitutionId>,
        declared: bool,
    ) -> Market {
        let mut next = self.clone();
        let person = &mut next.individuals[individual.0];
        person.declared = declared && person.true_category != Membership::General;
        next.preferences[individual.0] = preferences;
        next
    }

    /// Canonical document for this market.
    pub fn to_file(&self) -> InstanceFile {
        let categories = self
            .categories
            .iter()
            .map(|c| CategoryEntry {
                name: c.name.clone(),
                kind: c.kind,
            })
            .collect();
        let institutions = self
            .institutions
            .iter()
            .map(|inst| InstitutionEntry {
                id: inst.id.clone(),
                capacity: CapacityEntry {
                    total: inst.capacity.total(),
                    reserved: self
                        .reserve_categories()
                        .map(|c| (self.category_name(c).to_string(), inst.capacity.seats(c)))
                        .filter(|&(_, seats)| seats > 0)
                        .collect(),
                },
                merit: self.names(inst.merit.ranked()),
            })
            .collect();
        let individuals = self
            .individuals
            .iter()
            .map(|p| {
                let default = p.true_category != Membership::General;
                IndividualEntry {
                    id: p.id.clone(),
                    category: self.membership_label(p.true_category).to_string(),
                    declared: (p.declared != default).then_some(p.declared),
                }
            })
            .collect();
        let preferences: BTreeMap<String, Vec<String>> = self
            .individuals
            .iter()
            .zip(&self.preferences)
            .filter(|(_, list)| !list.is_empty())
            .map(|(p, list)| {
                (
                    p.id.clone(),
                    list.iter()
                        .map(|&s| self.institution_name(s).to_string())
                        .collect(),
                )
            })
            .collect();
        InstanceFile {
            categories,
            institutions,
            individuals,
            preferences,
        }
    }
}

/// Indian vertical-reservation category set: open plus SC, ST, OBC and EWS.
pub fn indian_categories() -> Vec<CategoryEntry> {
    let mut out = vec![CategoryEntry {
        name: "open".into(),
        kind: CategoryKind::Open,
    }];
    for name in ["SC", "ST", "OBC", "EWS"] {
        out.push(CategoryEntry {
            name: name.into(),
            kind: CategoryKind::Reserve,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(total: u32, reserved: u32, merit: &[&str]) -> InstanceFile {
        InstanceFile {
            categories: vec![
                CategoryEntry {
                    name: "open".into(),
                    kind: CategoryKind::Open,
                },
                CategoryEntry {
                    name: "r".into(),
                    kind: CategoryKind::Reserve,
                },
            ],
            institutions: vec![InstitutionEntry {
                id: "s".into(),
                capacity: CapacityEntry {
                    total,
                    reserved: [("r".to_string(), reserved)].into_iter().collect(),
                },
                merit: merit.iter().map(|s| s.to_string()).collect(),
            }],
            individuals: vec![
                IndividualEntry {
                    id: "i".into(),
                    category: "r".into(),
                    declared: None,
                },
                IndividualEntry {
                    id: "j".into(),
                    category: "GC".into(),
                    declared: None,
                },
            ],
            preferences: BTreeMap::new(),
        }
    }

    #[test]
    fn open_capacity_is_the_remainder() {
        let m = validate_instance(&simple(2, 1, &["i", "j"])).unwrap();
        let cap = &m.institution(InstitutionId(0)).capacity;
        assert_eq!(cap.open(), 1);
        assert_eq!(cap.seats(CategoryId(1)), 1);
    }

    #[test]
    fn reserves_beyond_total_overflow() {
        let err = validate_instance(&simple(1, 2, &["i"])).unwrap_err();
        assert!(matches!(
            err.0.as_slice(),
            [ValidationError::CapacityOverflow { reserved: 2, total: 1, .. }]
        ));
    }

    #[test]
    fn repeated_merit_entry_is_a_tie() {
        let err = validate_instance(&simple(2, 1, &["i", "j", "i"])).unwrap_err();
        assert!(matches!(err.0.as_slice(), [ValidationError::TieInMerit { .. }]));
    }

    #[test]
    fn dangling_merit_reference() {
        let err = validate_instance(&simple(2, 1, &["i", "zz"])).unwrap_err();
        assert!(matches!(
            err.0.as_slice(),
            [ValidationError::DanglingReference { .. }]
        ));
    }

    #[test]
    fn two_open_categories_rejected() {
        let mut raw = simple(2, 1, &["i"]);
        raw.categories.push(CategoryEntry {
            name: "open2".into(),
            kind: CategoryKind::Open,
        });
        let err = validate_instance(&raw).unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, ValidationError::MultipleOpenCategories { count: 2 })));
    }

    #[test]
    fn general_cannot_declare() {
        let mut raw = simple(2, 1, &["i"]);
        raw.individuals[1].declared = Some(true);
        let err = validate_instance(&raw).unwrap_err();
        assert!(matches!(err.0.as_slice(), [ValidationError::DeclaredGeneral { .. }]));
    }

    #[test]
    fn undeclared_member_is_effectively_general() {
        let mut raw = simple(2, 1, &["i", "j"]);
        raw.individuals[0].declared = Some(false);
        let m = validate_instance(&raw).unwrap();
        let i = m.individual(IndividualId(0));
        assert_eq!(i.true_category, Membership::Reserve(CategoryId(1)));
        assert_eq!(i.effective(), Membership::General);
    }

    #[test]
    fn reserving_open_seats_is_rejected() {
        let mut raw = simple(2, 1, &["i"]);
        raw.institutions[0].capacity.reserved.insert("open".into(), 1);
        let err = validate_instance(&raw).unwrap_err();
        assert!(matches!(
            err.0.as_slice(),
            [ValidationError::NotReserveCategory { .. }]
        ));
    }

    #[test]
    fn duplicate_preference_rejected() {
        let mut raw = simple(2, 1, &["i"]);
        raw.preferences.insert("i".into(), vec!["s".into(), "s".into()]);
        let err = validate_instance(&raw).unwrap_err();
        assert!(matches!(
            err.0.as_slice(),
            [ValidationError::DuplicatePreference { .. }]
        ));
    }

    #[test]
    fn merit_comparisons_respect_acceptability() {
        let m = MeritOrder::new(vec![IndividualId(2), IndividualId(0)], 3).unwrap();
        assert!(m.prefers(IndividualId(2), IndividualId(0)));
        assert!(m.prefers(IndividualId(0), IndividualId(1)));
        assert!(!m.prefers(IndividualId(1), IndividualId(0)));
        assert!(!m.is_acceptable(IndividualId(1)));
        assert!(MeritOrder::new(vec![IndividualId(0), IndividualId(0)], 1).is_none());
    }

    #[test]
    fn with_report_never_declares_general() {
        let m = validate_instance(&simple(2, 1, &["i", "j"])).unwrap();
        let dev = m.with_report(IndividualId(1), vec![], true);
        assert!(!dev.individual(IndividualId(1)).declared);
        let hidden = m.with_report(IndividualId(0), vec![InstitutionId(0)], false);
        assert_eq!(hidden.memberships()[0], Membership::General);
        assert_eq!(hidden.preferences(IndividualId(0)), &[InstitutionId(0)]);
    }
}
