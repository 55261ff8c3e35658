// SPDX-License-Identifier: Apache-2.0

//! On-disk document formats.
//!
//! An instance file is a single JSON object with four top-level keys:
//!
//! ```json
//! {
//!   "categories": [
//!     { "name": "open", "kind": "open" },
//!     { "name": "SC", "kind": "reserve" }
//!   ],
//!   "institutions": [
//!     {
//!       "id": "s1",
//!       "capacity": { "total": 2, "reserved": { "SC": 1 } },
//!       "merit": ["i1", "i2", "i3"]
//!     }
//!   ],
//!   "individuals": [
//!     { "id": "i1", "category": "GC" },
//!     { "id": "i2", "category": "SC" },
//!     { "id": "i3", "category": "SC", "declared": false }
//!   ],
//!   "preferences": {
//!     "i1": ["s1"],
//!     "i2": ["s1"]
//!   }
//! }
//! ```
//!
//! * `categories`: exactly one entry of kind `open`, any number of kind `reserve`, and at most one of
//!   kind `general`. A `general` entry only names the label used for individuals without a declared
//!   reserve membership; when it is absent the label is `GC`.
//! * `capacity.total` is the institution's seat count; `capacity.reserved` maps reserve category names
//!   to earmarked seats. Open seats are whatever remains.
//! * `merit` lists individuals highest merit first. Individuals not listed are unacceptable at that
//!   institution. Ties are not representable and repeated ids are rejected.
//! * `category` is an individual's true membership. `declared` defaults to `true` for reserve members
//!   and `false` for general members; an undeclared reserve member is treated as general.
//! * `preferences` maps individuals to institutions, most preferred first. Missing entries mean an
//!   empty list (the individual applies nowhere).
//!
//! The canonical encoding is two-space indented JSON with a trailing newline, omitting `declared`
//! when it equals its default and omitting empty preference lists. Canonical files round-trip
//! byte-for-byte through [`parse_instance`] and [`Market::to_file`](crate::model::Market::to_file).
//!
//! Pool files are JSON arrays of individual ids. Assignment files are the output of
//! `reserve-match match --json`; see [`AssignmentFile`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Open,
    Reserve,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryEntry {
    pub name: String,
    pub kind: CategoryKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityEntry {
    pub total: u32,
    #[serde(default)]
    pub reserved: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstitutionEntry {
    pub id: String,
    pub capacity: CapacityEntry,
    pub merit: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndividualEntry {
    pub id: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<bool>,
}

/// Unvalidated instance document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub categories: Vec<CategoryEntry>,
    pub institutions: Vec<InstitutionEntry>,
    pub individuals: Vec<IndividualEntry>,
    #[serde(default)]
    pub preferences: BTreeMap<String, Vec<String>>,
}

pub fn parse_instance(text: &str) -> serde_json::Result<InstanceFile> {
    serde_json::from_str(text)
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("document types always serialize");
    out.push('\n');
    out
}

pub fn parse_pool(text: &str) -> serde_json::Result<Vec<String>> {
    serde_json::from_str(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnassignedMarker {
    Unassigned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeatEntry {
    Held { institution: String, category: String },
    Unassigned(UnassignedMarker),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeatRecord {
    pub individual: String,
    pub seat: SeatEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstitutionRoundEntry {
    pub institution: String,
    pub pool: Vec<String>,
    pub held: Vec<String>,
    pub rejected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundEntry {
    pub round: usize,
    pub institutions: Vec<InstitutionRoundEntry>,
}

/// Institution-category pairs for every individual, optionally followed by the round logs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentFile {
    pub assignment: Vec<SeatRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<RoundEntry>>,
}

pub fn parse_assignment(text: &str) -> serde_json::Result<AssignmentFile> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unassigned_marker_is_a_bare_string() {
        let rec = SeatRecord {
            individual: "i3".into(),
            seat: SeatEntry::Unassigned(UnassignedMarker::Unassigned),
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"individual":"i3","seat":"unassigned"}"#);
        let back: SeatRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn held_seat_parses() {
        let rec: SeatRecord =
            serde_json::from_str(r#"{"individual":"i1","seat":{"institution":"s1","category":"open"}}"#)
                .unwrap();
        assert_eq!(
            rec.seat,
            SeatEntry::Held {
                institution: "s1".into(),
                category: "open".into()
            }
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"categories":[],"institutions":[],"individuals":[],"extra":1}"#;
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn pool_file_is_an_array() {
        assert_eq!(parse_pool(r#"["i","j"]"#).unwrap(), vec!["i", "j"]);
        assert!(parse_pool(r#"{"i":1}"#).is_err());
    }
}
