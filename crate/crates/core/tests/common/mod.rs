//! Seeded generators for random problems and libraries.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use propneed::corpus::{
    Atom, Attachment, ConstructorDecl, ConstructorKind, Environment, Formula, Item, Library, PropertyKind, Term,
};
use propneed::elicitor::{NeedMode, NeedSet};
use propneed::verifier::{Grounding, Problem, DEFAULT_BUDGET};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to two constructors with random kinds and arities.
pub fn signature(rng: &mut impl Rng) -> Vec<ConstructorDecl> {
    let n = rng.gen_range(1..=2);
    (0..n)
        .map(|i| {
            let arity = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) {
                ConstructorDecl::relation(format!("r{i}"), 2)
            } else {
                ConstructorDecl::function(format!("f{i}"), arity)
            }
        })
        .collect()
}

fn term(rng: &mut impl Rng, consts: &[&str], funs: &[&ConstructorDecl], depth: u32) -> Term {
    if depth == 0 || funs.is_empty() || rng.gen_bool(0.6) {
        return Term::constant(*consts.choose(rng).unwrap());
    }
    let f = funs.choose(rng).unwrap();
    let args = (0..f.arity).map(|_| term(rng, consts, funs, depth - 1)).collect();
    Term::app(f.id.clone(), args)
}

fn atom(rng: &mut impl Rng, consts: &[&str], sig: &[ConstructorDecl]) -> Atom {
    let funs: Vec<&ConstructorDecl> = sig.iter().filter(|c| c.kind == ConstructorKind::Function).collect();
    let rels: Vec<&ConstructorDecl> = sig.iter().filter(|c| c.kind == ConstructorKind::Relation).collect();
    let mut t = || term(rng, consts, &funs, 2);
    let (x, y) = (t(), t());
    if !rels.is_empty() && rng.gen_bool(0.5) {
        let r = rels.choose(rng).unwrap();
        Atom::rel(r.id.clone(), vec![x, y])
    } else {
        Atom::eq(x, y)
    }
}

pub fn formula(rng: &mut impl Rng, consts: &[&str], sig: &[ConstructorDecl], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return atom(rng, consts, sig).into();
    }
    let sub = |rng: &mut _| formula(rng, consts, sig, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::And(vec![sub(rng), sub(rng)]),
        2 => Formula::Or(vec![sub(rng), sub(rng)]),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

/// A random subset of the attachments applicable to `sig`.
pub fn environment(rng: &mut impl Rng, sig: &[ConstructorDecl]) -> Environment {
    let mut env = Environment::new();
    for c in sig {
        for p in PropertyKind::ALL {
            if p.is_applicable(c.kind, c.arity) && rng.gen_bool(0.5) {
                env = env.attach(&c.id, p);
            }
        }
    }
    env
}

/// A random problem whose grounding has at most `max_atoms` atoms.
pub fn problem(rng: &mut impl Rng, max_atoms: usize) -> Problem {
    loop {
        let sig = signature(rng);
        let consts = &CONSTANTS[..rng.gen_range(1..=4)];
        let premises = (0..rng.gen_range(0..=3)).map(|_| formula(rng, consts, &sig, 2)).collect();
        let goal = formula(rng, consts, &sig, 2);
        let env = environment(rng, &sig);
        let p = Problem { premises, goal, env };
        match Grounding::new(&p, DEFAULT_BUDGET) {
            Ok(g) if g.atoms.len() <= max_atoms => return p,
            _ => continue,
        }
    }
}

/// A random well-formed library; items only use earlier items.
pub fn library(rng: &mut impl Rng, items: usize) -> Library {
    let sig = signature(rng);
    let consts = &CONSTANTS[..rng.gen_range(1..=4)];
    let mut lib = Library {
        constants: consts.iter().map(|c| c.to_string()).collect(),
        constructors: sig.iter().map(|c| (c.id.clone(), c.clone())).collect(),
        environment: environment(rng, &sig),
        ..Library::default()
    };
    for i in 0..items {
        let uses = (0..i).filter(|_| rng.gen_bool(0.2)).map(|j| format!("t{j}")).collect();
        lib.items.push(Item {
            id: format!("t{i}"),
            imports: sig.iter().map(|c| c.id.clone()).collect(),
            premises: (0..rng.gen_range(0..=2)).map(|_| formula(rng, consts, &sig, 1)).collect(),
            goal: formula(rng, consts, &sig, 1),
            uses,
        });
    }
    lib
}

/// A library of `n` bare items with random acyclic `uses`, plus random
/// direct need sets over a fixed pool of attachments.
pub fn graph_case(rng: &mut impl Rng, n: usize) -> (Library, BTreeMap<String, NeedSet>) {
    let pool: Vec<Attachment> = ["p", "q", "r"]
        .iter()
        .flat_map(|c| {
            [PropertyKind::Reflexivity, PropertyKind::Symmetry, PropertyKind::Irreflexivity]
                .map(|p| Attachment::new(*c, p))
        })
        .collect();
    let goal: Formula = Atom::eq(Term::constant("a"), Term::constant("a")).into();
    let mut lib = Library::default();
    let mut direct = BTreeMap::new();
    // A random permutation keeps edges from always pointing at lower indices.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (pos, &i) in order.iter().enumerate() {
        let uses: BTreeSet<String> =
            order[..pos].iter().filter(|_| rng.gen_bool(0.15)).map(|j| format!("n{j}")).collect();
        lib.items.push(Item { id: format!("n{i}"), imports: BTreeSet::new(), premises: vec![], goal: goal.clone(), uses });
        let mut needs = NeedSet::new(format!("n{i}"), NeedMode::Direct);
        needs.pairs.extend(pool.iter().filter(|_| rng.gen_bool(0.1)).cloned());
        direct.insert(format!("n{i}"), needs);
    }
    (lib, direct)
}
