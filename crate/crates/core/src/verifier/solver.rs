//! Refutation search: clausal form by distribution, DPLL with chronological
//! backtracking, and a congruence-closure consistency check on every partial
//! assignment.

use std::collections::HashMap;

use crate::corpus::{Atom, Formula};

use super::ground::Grounding;
use super::{Countermodel, Verdict, VerifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Lit {
    atom: usize,
    positive: bool,
}

type Clause = Vec<Lit>;

/// Clausal form of `f` (or of its negation when `positive` is false),
/// without fresh atoms.
fn clauses(f: &Formula, positive: bool, index: &HashMap<&Atom, usize>, cap: usize) -> Result<Vec<Clause>, VerifyError> {
    let conj = |parts: Vec<Vec<Clause>>| -> Result<Vec<Clause>, VerifyError> {
        let out: Vec<Clause> = parts.into_iter().flatten().collect();
        check_cap(out.len(), cap)?;
        Ok(out)
    };
    let disj = |parts: Vec<Vec<Clause>>| -> Result<Vec<Clause>, VerifyError> {
        let mut acc: Vec<Clause> = vec![Vec::new()];
        for part in parts {
            check_cap(acc.len().saturating_mul(part.len()), cap)?;
            let mut next = Vec::with_capacity(acc.len() * part.len());
            for a in &acc {
                for b in &part {
                    let mut c = a.clone();
                    c.extend_from_slice(b);
                    next.push(c);
                }
            }
            acc = next;
        }
        Ok(acc)
    };
    let rec = |g: &Formula, pos: bool| clauses(g, pos, index, cap);

    match f {
        Formula::Atom(a) => Ok(vec![vec![Lit { atom: index[a], positive }]]),
        Formula::Not(g) => rec(g, !positive),
        Formula::And(gs) if positive => conj(gs.iter().map(|g| rec(g, true)).collect::<Result<_, _>>()?),
        Formula::And(gs) => disj(gs.iter().map(|g| rec(g, false)).collect::<Result<_, _>>()?),
        Formula::Or(gs) if positive => disj(gs.iter().map(|g| rec(g, true)).collect::<Result<_, _>>()?),
        Formula::Or(gs) => conj(gs.iter().map(|g| rec(g, false)).collect::<Result<_, _>>()?),
        Formula::Implies(l, r) if positive => disj(vec![rec(l, false)?, rec(r, true)?]),
        Formula::Implies(l, r) => conj(vec![rec(l, true)?, rec(r, false)?]),
        // (l → r) ∧ (r → l)
        Formula::Iff(l, r) if positive => conj(vec![
            disj(vec![rec(l, false)?, rec(r, true)?])?,
            disj(vec![rec(r, false)?, rec(l, true)?])?,
        ]),
        // (l ∨ r) ∧ (¬l ∨ ¬r)
        Formula::Iff(l, r) => conj(vec![
            disj(vec![rec(l, true)?, rec(r, true)?])?,
            disj(vec![rec(l, false)?, rec(r, false)?])?,
        ]),
    }
}

fn check_cap(count: usize, budget: usize) -> Result<(), VerifyError> {
    if count > budget {
        Err(VerifyError::BudgetExceeded { count, budget })
    } else {
        Ok(())
    }
}

/// Sorts and dedups literals; drops clauses containing both polarities.
fn simplify(clauses: Vec<Clause>) -> Vec<Clause> {
    let mut out: Vec<Clause> = clauses
        .into_iter()
        .filter_map(|mut c| {
            c.sort();
            c.dedup();
            let tautology = c.windows(2).any(|w| w[0].atom == w[1].atom);
            (!tautology).then_some(c)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Interned atom over term ids.
enum GroundAtom {
    Rel { head: usize, args: Vec<usize> },
    Eq(usize, usize),
}

struct TermNode {
    head: usize,
    args: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links the larger root under the smaller so representatives are
    /// deterministic.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

struct Search<'a> {
    grounding: &'a Grounding,
    terms: Vec<TermNode>,
    atoms: Vec<GroundAtom>,
    clauses: Vec<Clause>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(grounding: &'a Grounding, budget: usize) -> Result<Self, VerifyError> {
        let mut heads: HashMap<&str, usize> = HashMap::new();
        let mut head_id = |h: &'a str| {
            let next = heads.len();
            *heads.entry(h).or_insert(next)
        };
        let term_index = grounding.term_index();
        let terms = grounding
            .terms
            .iter()
            .map(|t| TermNode {
                head: head_id(&t.head),
                args: t.args.iter().map(|a| term_index[a]).collect(),
            })
            .collect();
        let atoms = grounding
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Rel { head, args } => GroundAtom::Rel {
                    head: head_id(head),
                    args: args.iter().map(|t| term_index[t]).collect(),
                },
                Atom::Eq(l, r) => GroundAtom::Eq(term_index[l], term_index[r]),
            })
            .collect();

        let atom_index = grounding.atom_index();
        let mut all = Vec::new();
        for f in grounding.refutation_set() {
            all.extend(clauses(&f, true, &atom_index, budget)?);
            check_cap(all.len(), budget)?;
        }
        Ok(Search {
            grounding,
            terms,
            atoms,
            clauses: simplify(all),
            value: vec![None; grounding.atoms.len()],
            trail: Vec::new(),
        })
    }

    fn assign(&mut self, atom: usize, value: bool) {
        self.value[atom] = Some(value);
        self.trail.push(atom);
    }

    fn undo(&mut self, mark: usize) {
        for atom in self.trail.drain(mark..) {
            self.value[atom] = None;
        }
    }

    /// Unit propagation to fixpoint. Returns false on a falsified clause.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for ci in 0..self.clauses.len() {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for lit in &self.clauses[ci] {
                    match self.value[lit.atom] {
                        Some(v) if v == lit.positive => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open += 1;
                            unassigned = Some(*lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unassigned) {
                    (0, _) => return false,
                    (1, Some(lit)) => {
                        self.assign(lit.atom, lit.positive);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Congruence closure of the equations currently assigned true.
    fn closure(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.terms.len());
        for (atom, value) in self.atoms.iter().zip(&self.value) {
            if let (GroundAtom::Eq(l, r), Some(true)) = (atom, value) {
                uf.union(*l, *r);
            }
        }
        loop {
            let mut changed = false;
            let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            for (i, node) in self.terms.iter().enumerate() {
                if node.args.is_empty() {
                    continue;
                }
                let sig = (node.head, node.args.iter().map(|&a| uf.find(a)).collect());
                match signatures.get(&sig) {
                    Some(&j) => changed |= uf.union(i, j),
                    None => {
                        signatures.insert(sig, i);
                    }
                }
            }
            if !changed {
                return uf;
            }
        }
    }

    /// No false equation inside a class, and no two relation atoms with
    /// congruent arguments assigned opposite values.
    fn consistent(&self) -> bool {
        let mut uf = self.closure();
        let mut rel_values: HashMap<(usize, Vec<usize>), bool> = HashMap::new();
        for (atom, value) in self.atoms.iter().zip(&self.value) {
            let Some(value) = *value else { continue };
            match atom {
                GroundAtom::Eq(l, r) => {
                    if !value && uf.find(*l) == uf.find(*r) {
                        return false;
                    }
                }
                GroundAtom::Rel { head, args } => {
                    let key = (*head, args.iter().map(|&a| uf.find(a)).collect());
                    if *rel_values.entry(key).or_insert(value) != value {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn dfs(&mut self) -> bool {
        let mark = self.trail.len();
        if self.propagate() && self.consistent() {
            match self.value.iter().position(Option::is_none) {
                None => return true,
                Some(atom) => {
                    for value in [false, true] {
                        let inner = self.trail.len();
                        self.assign(atom, value);
                        if self.dfs() {
                            return true;
                        }
                        self.undo(inner);
                    }
                }
            }
        }
        self.undo(mark);
        false
    }

    fn countermodel(&self) -> Countermodel {
        let mut uf = self.closure();
        let assignment = self
            .grounding
            .atoms
            .iter()
            .zip(&self.value)
            .map(|(a, v)| (a.clone(), v.expect("complete assignment")))
            .collect();
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..self.terms.len() {
            classes.entry(uf.find(i)).or_default().push(i);
        }
        Countermodel::new(
            assignment,
            classes
                .into_values()
                .map(|members| members.into_iter().map(|i| self.grounding.terms[i].clone()).collect())
                .collect(),
        )
    }
}

/// Decides the grounded problem: Verified iff the refutation set has no
/// model in which equality is a congruence.
pub fn decide(grounding: &Grounding, budget: usize) -> Result<Verdict, VerifyError> {
    let mut search = Search::new(grounding, budget)?;
    if search.dfs() {
        Ok(Verdict::Failed(search.countermodel()))
    } else {
        Ok(Verdict::Verified)
    }
}
