// SPDX-License-Identifier: Apache-2.0

//! Seat allocation under vertical reservations.
//!
//! * [`model`] and [`assignment`]: validated markets, assignments and matchings.
//! * [`choice`]: the over-and-above choice rule and its axioms.
//! * [`da`]: applicant-proposing deferred acceptance over that rule (DA-OA), with
//!   assignment-level audits.
//! * [`oracle`]: exhaustive and adversarial checks (uniqueness of the rule, substitutability,
//!   size monotonicity, manipulation search) plus a seeded instance generator.
//! * [`critique`]: the informal axioms as literally worded and the counterexamples showing they
//!   do not pin down the rule.

pub mod assignment;
pub mod choice;
pub mod cli;
pub mod critique;
pub mod da;
pub mod format;
pub mod model;
pub mod oracle;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use assignment::{induced_matching, Assignment, Matching, Seat};
pub use choice::{over_and_above_choose, ChoiceResult, ChoiceRule, OverAndAbove};
pub use da::{run_da_oa, DaOutcome, RoundLog};
pub use model::{validate_instance, CategoryId, IndividualId, InstitutionId, Market, Membership};
