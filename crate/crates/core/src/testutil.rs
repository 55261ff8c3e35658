// SPDX-License-Identifier: Apache-2.0

//! Small hand-built markets for unit tests.

use std::collections::BTreeMap;

use crate::format::{
    CapacityEntry, CategoryEntry, CategoryKind, IndividualEntry, InstanceFile, InstitutionEntry,
};
use crate::model::{validate_instance, Market};

pub const NAMES: [&str; 8] = ["i", "j", "k", "l", "m", "n", "o", "p"];

fn categories() -> Vec<CategoryEntry> {
    vec![
        CategoryEntry {
            name: "open".into(),
            kind: CategoryKind::Open,
        },
        CategoryEntry {
            name: "r".into(),
            kind: CategoryKind::Reserve,
        },
        CategoryEntry {
            name: "r2".into(),
            kind: CategoryKind::Reserve,
        },
    ]
}

fn individuals(members: &[Option<usize>]) -> Vec<IndividualEntry> {
    members
        .iter()
        .enumerate()
        .map(|(k, m)| IndividualEntry {
            id: NAMES[k].into(),
            category: match m {
                None => "GC".into(),
                Some(1) => "r".into(),
                Some(_) => "r2".into(),
            },
            declared: None,
        })
        .collect()
}

/// One institution `s` with `open` open seats and `reserve` seats for category `r` (index 1).
/// `members[k]` is `None` for general, `Some(1)` for `r`, `Some(2)` for `r2`; individuals are
/// named `i, j, k, ...`. Everyone lists `s`.
pub fn one_school(open: u32, reserve: u32, members: &[Option<usize>], merit: &[usize]) -> Market {
    school_with(open, &[("r", reserve)], members, merit)
}

/// Like [`one_school`] with one seat each for `r` and `r2`.
pub fn two_reserve_school(members: &[Option<usize>], merit: &[usize]) -> Market {
    school_with(1, &[("r", 1), ("r2", 1)], members, merit)
}

pub fn school_with(
    open: u32,
    reserved: &[(&str, u32)],
    members: &[Option<usize>],
    merit: &[usize],
) -> Market {
    let total = open + reserved.iter().map(|&(_, s)| s).sum::<u32>();
    let raw = InstanceFile {
        categories: categories(),
        institutions: vec![InstitutionEntry {
            id: "s".into(),
            capacity: CapacityEntry {
                total,
                reserved: reserved
                    .iter()
                    .map(|&(n, s)| (n.to_string(), s))
                    .collect(),
            },
            merit: merit.iter().map(|&k| NAMES[k].to_string()).collect(),
        }],
        individuals: individuals(members),
        preferences: (0..members.len())
            .map(|k| (NAMES[k].to_string(), vec!["s".to_string()]))
            .collect::<BTreeMap<_, _>>(),
    };
    validate_instance(&raw).expect("test market is valid")
}
