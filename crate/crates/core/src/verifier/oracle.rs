//! Exhaustive reference decision procedure.
//!
//! Enumerates every truth assignment over the grounded atoms and keeps the
//! ones whose equality part extends to a congruence, computed as an explicit
//! relation matrix closed under reflexivity, symmetry, transitivity and
//! function congruence. Shares only the grounding with the search-based
//! checker.

use std::collections::HashMap;

use crate::corpus::{Atom, Formula, Term};

use super::ground::Grounding;
use super::{Countermodel, Problem, Verdict, VerifyError};

pub const DEFAULT_ORACLE_BOUND: usize = 24;

/// Formula over atom indices.
enum Compiled {
    Atom(usize),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn new(f: &Formula, index: &HashMap<&Atom, usize>) -> Compiled {
        let rec = |g: &Formula| Box::new(Compiled::new(g, index));
        match f {
            Formula::Atom(a) => Compiled::Atom(index[a]),
            Formula::Not(g) => Compiled::Not(rec(g)),
            Formula::And(gs) => Compiled::And(gs.iter().map(|g| Compiled::new(g, index)).collect()),
            Formula::Or(gs) => Compiled::Or(gs.iter().map(|g| Compiled::new(g, index)).collect()),
            Formula::Implies(l, r) => Compiled::Implies(rec(l), rec(r)),
            Formula::Iff(l, r) => Compiled::Iff(rec(l), rec(r)),
        }
    }

    fn eval(&self, mask: u64) -> bool {
        match self {
            Compiled::Atom(i) => mask >> i & 1 == 1,
            Compiled::Not(g) => !g.eval(mask),
            Compiled::And(gs) => gs.iter().all(|g| g.eval(mask)),
            Compiled::Or(gs) => gs.iter().any(|g| g.eval(mask)),
            Compiled::Implies(l, r) => !l.eval(mask) || r.eval(mask),
            Compiled::Iff(l, r) => l.eval(mask) == r.eval(mask),
        }
    }
}

/// Equality relation over the grounding's terms, as a dense matrix.
struct Relation {
    n: usize,
    related: Vec<bool>,
}

impl Relation {
    fn get(&self, i: usize, j: usize) -> bool {
        self.related[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize) -> bool {
        let cell = &mut self.related[i * self.n + j];
        let changed = !*cell;
        *cell = true;
        changed
    }

    /// Smallest congruence containing the given equations.
    fn closure(terms: &[Term], index: &HashMap<&Term, usize>, equations: &[(usize, usize)]) -> Relation {
        let n = terms.len();
        let mut rel = Relation { n, related: vec![false; n * n] };
        for i in 0..n {
            rel.set(i, i);
        }
        for &(l, r) in equations {
            rel.set(l, r);
        }
        let args: Vec<Vec<usize>> = terms.iter().map(|t| t.args.iter().map(|a| index[a]).collect()).collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if rel.get(i, j) {
                        changed |= rel.set(j, i);
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    if !rel.get(i, k) {
                        continue;
                    }
                    for j in 0..n {
                        if rel.get(k, j) {
                            changed |= rel.set(i, j);
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if rel.get(i, j) || args[i].is_empty() {
                        continue;
                    }
                    let congruent = terms[i].head == terms[j].head
                        && args[i].len() == args[j].len()
                        && args[i].iter().zip(&args[j]).all(|(&a, &b)| rel.get(a, b));
                    if congruent {
                        changed |= rel.set(i, j);
                    }
                }
            }
            if !changed {
                return rel;
            }
        }
    }

    fn classes(&self, terms: &[Term]) -> Vec<Vec<Term>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for i in 0..self.n {
            if seen[i] {
                continue;
            }
            let class: Vec<Term> = (0..self.n)
                .filter(|&j| self.get(i, j))
                .inspect(|&j| seen[j] = true)
                .map(|j| terms[j].clone())
                .collect();
            out.push(class);
        }
        out
    }
}

/// Whether a total assignment (atom index → value) respects congruence:
/// no false equation between related terms, and relation atoms over related
/// arguments agree.
fn congruent(g: &Grounding, term_index: &HashMap<&Term, usize>, value: &dyn Fn(usize) -> bool) -> Option<Relation> {
    let eqs: Vec<(usize, usize)> = g
        .atoms
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Atom::Eq(l, r) if value(i) => Some((term_index[l], term_index[r])),
            _ => None,
        })
        .collect();
    let rel = Relation::closure(&g.terms, term_index, &eqs);
    for (i, a) in g.atoms.iter().enumerate() {
        match a {
            Atom::Eq(l, r) => {
                if !value(i) && rel.get(term_index[l], term_index[r]) {
                    return None;
                }
            }
            Atom::Rel { head, args } => {
                for (j, b) in g.atoms.iter().enumerate().skip(i + 1) {
                    let Atom::Rel { head: h2, args: args2 } = b else { continue };
                    let same = head == h2
                        && args.len() == args2.len()
                        && args.iter().zip(args2).all(|(x, y)| rel.get(term_index[x], term_index[y]));
                    if same && value(i) != value(j) {
                        return None;
                    }
                }
            }
        }
    }
    Some(rel)
}

/// Exhaustive verdict for a grounded problem.
pub fn brute_force_grounded(g: &Grounding, bound: usize) -> Result<Verdict, VerifyError> {
    let n = g.atoms.len();
    if n > bound || n > 63 {
        return Err(VerifyError::OracleBoundExceeded { atoms: n, bound });
    }
    let atom_index = g.atom_index();
    let term_index = g.term_index();
    let compiled: Vec<Compiled> = g.refutation_set().iter().map(|f| Compiled::new(f, &atom_index)).collect();
    for mask in 0..(1u64 << n) {
        if !compiled.iter().all(|f| f.eval(mask)) {
            continue;
        }
        let value = |i: usize| mask >> i & 1 == 1;
        if let Some(rel) = congruent(g, &term_index, &value) {
            let assignment = g.atoms.iter().enumerate().map(|(i, a)| (a.clone(), value(i))).collect();
            return Ok(Verdict::Failed(Countermodel::new(assignment, rel.classes(&g.terms))));
        }
    }
    Ok(Verdict::Verified)
}

/// Exhaustive verdict for a problem; errors if the grounded problem has more
/// than `bound` atoms.
pub fn brute_force_verdict(problem: &Problem, bound: usize, budget: usize) -> Result<Verdict, VerifyError> {
    brute_force_grounded(&Grounding::new(problem, budget)?, bound)
}

/// Replays a countermodel: every atom of the grounding is assigned, the
/// refutation set evaluates to true, the equality part is a congruence, and
/// the reported classes are exactly the congruence classes.
pub fn witness_is_valid(g: &Grounding, witness: &Countermodel) -> bool {
    let assigned: HashMap<&Atom, bool> = witness.assignment.iter().map(|(a, v)| (a, *v)).collect();
    if assigned.len() != g.atoms.len() || g.atoms.iter().any(|a| !assigned.contains_key(a)) {
        return false;
    }
    let holds = g.refutation_set().iter().all(|f| f.eval(&mut |a| assigned[a]));
    if !holds {
        return false;
    }
    let term_index = g.term_index();
    let value = |i: usize| assigned[&g.atoms[i]];
    let Some(rel) = congruent(g, &term_index, &value) else {
        return false;
    };
    let mut expected = rel.classes(&g.terms);
    let mut got = witness.classes.clone();
    expected.iter_mut().for_each(|c| c.sort());
    got.iter_mut().for_each(|c| c.sort());
    expected.sort();
    got.sort();
    expected == got
}
