mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use propneed::corpus::{Formula, Term};
use propneed::frontend::{parse_library, serialize_library};
use propneed::verifier::{
    brute_force_verdict, decide, instantiate_axioms, term_universe, witness_is_valid, Grounding, Verdict,
    DEFAULT_BUDGET,
};

const MAX_ATOMS: usize = 14;

fn oriented(f: &Formula) -> Formula {
    f.map_atoms(&mut |a| a.clone().oriented())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn checker_agrees_with_enumeration(seed in any::<u64>()) {
        let p = common::problem(&mut common::rng(seed), MAX_ATOMS);
        let fast = decide(&p, DEFAULT_BUDGET).unwrap();
        let slow = brute_force_verdict(&p, MAX_ATOMS, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(fast.is_verified(), slow.is_verified(), "{:?}", p);
    }

    #[test]
    fn witnesses_satisfy_the_refutation_set(seed in any::<u64>()) {
        let p = common::problem(&mut common::rng(seed), MAX_ATOMS);
        let g = Grounding::new(&p, DEFAULT_BUDGET).unwrap();
        for verdict in [decide(&p, DEFAULT_BUDGET).unwrap(), brute_force_verdict(&p, MAX_ATOMS, DEFAULT_BUDGET).unwrap()] {
            if let Verdict::Failed(w) = verdict {
                prop_assert!(witness_is_valid(&g, &w), "{}", w);
            }
        }
    }

    #[test]
    fn more_attachments_never_lose_a_proof(seed in any::<u64>()) {
        let p = common::problem(&mut common::rng(seed), MAX_ATOMS);
        let full = decide(&p, DEFAULT_BUDGET).unwrap().is_verified();
        for att in &p.env {
            let mut smaller = p.clone();
            smaller.env = p.env.detach(&att.constructor, att.property).unwrap();
            if decide(&smaller, DEFAULT_BUDGET).unwrap().is_verified() {
                prop_assert!(full, "dropping {} proved what the full env did not", att);
            }
        }
    }

    #[test]
    fn decisions_are_deterministic(seed in any::<u64>()) {
        let p = common::problem(&mut common::rng(seed), MAX_ATOMS);
        prop_assert_eq!(decide(&p, DEFAULT_BUDGET).unwrap(), decide(&p, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn instances_are_exactly_the_oriented_schema_instances(seed in any::<u64>()) {
        let p = common::problem(&mut common::rng(seed), 24);
        let u = term_universe(&p);
        let got = instantiate_axioms(&p.env, &u, DEFAULT_BUDGET).unwrap();
        let terms: Vec<&Term> = u.terms.iter().collect();
        let mut want = BTreeSet::new();
        for att in &p.env {
            let schema = att.property.schema();
            let tuples: Vec<Vec<Term>> = if schema.bound.len() == 1 {
                terms.iter().map(|t| vec![(*t).clone()]).collect()
            } else {
                terms.iter().flat_map(|x| terms.iter().map(move |y| vec![(*x).clone(), (*y).clone()])).collect()
            };
            for tuple in tuples {
                let inst = oriented(&schema.instantiate(&att.constructor, &tuple));
                if !matches!(&inst, Formula::Atom(a) if a.is_trivial_identity()) {
                    want.insert(inst);
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>(), n in 0usize..8) {
        let lib = common::library(&mut common::rng(seed), n);
        let text = serialize_library(&lib);
        let back = parse_library(&text).unwrap();
        prop_assert_eq!(&back, &lib);
        prop_assert_eq!(serialize_library(&back), text);
    }
}
