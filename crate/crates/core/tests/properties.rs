// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use reserve_match::assignment::induced_matching;
use reserve_match::choice::{check_formal_axioms, over_and_above_choose, ChoiceRule, OverAndAbove};
use reserve_match::critique::{check_inter_se_merit_as_stated, check_over_and_above_as_stated};
use reserve_match::da::{run_da_oa, AssignmentAudit};
use reserve_match::format::{parse_instance, to_canonical_json};
use reserve_match::model::{validate_instance, CategoryId, IndividualId, Market, Membership};
use reserve_match::oracle::{
    check_size_monotonicity, check_substitutability, generate_instance, verify_over_and_above_uniqueness,
    GeneratorParams,
};

fn market(seed: u64) -> Market {
    generate_instance(seed, &GeneratorParams::small()).unwrap()
}

fn pool_of(m: &Market, mask: u32) -> Vec<IndividualId> {
    m.individual_ids().filter(|i| mask >> i.0 & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn choice_partitions_pool_within_capacity(seed in any::<u64>(), mask in any::<u32>()) {
        let m = market(seed);
        let pool = pool_of(&m, mask);
        let t = m.memberships();
        for inst in m.institutions() {
            let r = over_and_above_choose(inst, &pool, &t);
            let mut all = r.all_chosen();
            prop_assert_eq!(all.len(), r.filled(), "someone chosen twice");
            all.extend_from_slice(r.rejected());
            all.sort_unstable();
            prop_assert_eq!(&all, &pool);
            prop_assert!(r.filled() <= inst.capacity.total() as usize);
            for c in 0..r.num_categories() {
                let c = CategoryId(c);
                prop_assert!(r.chosen(c).len() <= inst.capacity.seats(c) as usize);
                for &i in r.chosen(c) {
                    prop_assert!(inst.merit.is_acceptable(i));
                    if c != inst.capacity.open_category() {
                        prop_assert_eq!(t[i.0], Membership::Reserve(c));
                    }
                }
            }
        }
    }

    #[test]
    fn choice_passes_formal_axioms(seed in any::<u64>(), mask in any::<u32>()) {
        let m = market(seed);
        let pool = pool_of(&m, mask);
        let t = m.memberships();
        for inst in m.institutions() {
            let r = over_and_above_choose(inst, &pool, &t);
            prop_assert_eq!(check_formal_axioms(inst, &pool, &t, &r), Ok(()));
            // literal filling can fail, as in the second worked example
            prop_assert_eq!(check_inter_se_merit_as_stated(inst, &pool, &t, &r), Ok(()));
            prop_assert_eq!(check_over_and_above_as_stated(inst, &r), Ok(()));
        }
    }

    #[test]
    fn open_seats_form_a_merit_cutoff(seed in any::<u64>(), mask in any::<u32>()) {
        let m = market(seed);
        let pool = pool_of(&m, mask);
        let t = m.memberships();
        for inst in m.institutions() {
            let r = over_and_above_choose(inst, &pool, &t);
            let open = r.chosen(inst.capacity.open_category());
            // every open holder beats every acceptable applicant without an open seat
            for &o in open {
                for &x in pool.iter().filter(|&&x| inst.merit.is_acceptable(x) && !open.contains(&x)) {
                    prop_assert!(inst.merit.prefers(o, x));
                }
            }
        }
    }

    #[test]
    fn formal_axioms_single_out_the_rule(seed in any::<u64>(), mask in any::<u32>()) {
        let m = market(seed);
        let pool = pool_of(&m, mask);
        let t = m.memberships();
        for inst in m.institutions() {
            prop_assert!(verify_over_and_above_uniqueness(inst, &pool, &t, 10).unwrap().is_confirmed());
        }
    }

    #[test]
    fn rule_is_substitutable_and_size_monotone(seed in any::<u64>()) {
        let m = market(seed);
        let universe: Vec<_> = m.individual_ids().collect();
        let t = m.memberships();
        for inst in m.institutions() {
            prop_assert_eq!(check_substitutability(&OverAndAbove, inst, &universe, &t, 10), Ok(None));
            prop_assert_eq!(check_size_monotonicity(&OverAndAbove, inst, &universe, &t, 10), Ok(None));
        }
    }

    #[test]
    fn choice_ignores_pool_order_and_duplicates(seed in any::<u64>(), mask in any::<u32>()) {
        let m = market(seed);
        let pool = pool_of(&m, mask);
        let mut messy: Vec<_> = pool.iter().rev().copied().collect();
        messy.extend_from_slice(&pool);
        let t = m.memberships();
        for inst in m.institutions() {
            prop_assert_eq!(OverAndAbove.choose(inst, &pool, &t), OverAndAbove.choose(inst, &messy, &t));
        }
    }

    #[test]
    fn da_output_passes_every_audit(seed in any::<u64>()) {
        let m = market(seed);
        let out = run_da_oa(&m);
        let audit = AssignmentAudit::run(&m, &out.assignment);
        prop_assert!(audit.all_pass(), "{audit:?}");
        let matching = induced_matching(&out.assignment);
        for i in m.individual_ids() {
            prop_assert_eq!(matching.partner(i), out.assignment.institution_of(i));
            if let Some(s) = matching.partner(i) {
                prop_assert!(matching.members(s).contains(&i));
            }
        }
    }

    #[test]
    fn da_rounds_are_well_formed(seed in any::<u64>()) {
        let m = market(seed);
        let out = run_da_oa(&m);
        for (k, r) in out.rounds.iter().enumerate() {
            prop_assert_eq!(r.round, k + 1);
            for x in &r.institutions {
                let mut both = x.held.clone();
                both.extend_from_slice(&x.rejected);
                both.sort_unstable();
                prop_assert_eq!(&both, &x.pool);
            }
        }
        // held sets in the final log are the final assignment
        for s in m.institution_ids() {
            let last = out
                .rounds
                .iter()
                .rev()
                .find_map(|r| r.institutions.iter().find(|x| x.institution == s));
            let mut holders: Vec<_> = out.assignment.holders(s).iter().map(|&(i, _)| i).collect();
            holders.sort_unstable();
            prop_assert_eq!(last.map(|x| x.held.clone()).unwrap_or_default(), holders);
        }
    }

    #[test]
    fn canonical_json_round_trips(seed in any::<u64>()) {
        let m = generate_instance(seed, &GeneratorParams::indian()).unwrap();
        let text = to_canonical_json(&m.to_file());
        let back = validate_instance(&parse_instance(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(to_canonical_json(&back.to_file()), text);
    }

    #[test]
    fn generator_respects_bounds(seed in any::<u64>()) {
        let p = GeneratorParams::small();
        let m = generate_instance(seed, &p).unwrap();
        prop_assert!(p.institutions.contains(&m.num_institutions()));
        prop_assert!(p.individuals.contains(&m.num_individuals()));
        for inst in m.institutions() {
            prop_assert!(p.total_capacity.contains(&inst.capacity.total()));
            for c in inst.capacity.reserve_categories() {
                prop_assert!(inst.capacity.seats(c) <= p.max_reserved);
            }
        }
    }
}
