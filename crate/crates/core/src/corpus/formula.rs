//! Ground terms, atoms and quantifier-free formulas.
//!
//! Everything here is printed in the corpus s-expression syntax, and the
//! printed form doubles as the canonical ordering key used by the verifier.

use std::collections::BTreeSet;
use std::fmt;

/// A ground term: a constant (no arguments) or a function constructor applied
/// to ground terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub head: String,
    pub args: Vec<Term>,
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term { head: name.into(), args: Vec::new() }
    }

    pub fn app(head: impl Into<String>, args: Vec<Term>) -> Term {
        Term { head: head.into(), args }
    }

    pub fn is_constant(&self) -> bool {
        self.args.is_empty()
    }

    /// Inserts this term and all of its subterms.
    pub fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.contains(self) {
            return;
        }
        for arg in &self.args {
            arg.collect_subterms(out);
        }
        out.insert(self.clone());
    }

    pub fn depth(&self) -> usize {
        1 + self.args.iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return f.write_str(&self.head);
        }
        write!(f, "({}", self.head)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        f.write_str(")")
    }
}

/// Ground atom: a relation applied to terms, or an equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Rel { head: String, args: Vec<Term> },
    Eq(Term, Term),
}

impl Atom {
    pub fn rel(head: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom::Rel { head: head.into(), args }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Atom {
        Atom::Eq(lhs, rhs)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let (first, rest): (&[Term], &[Term]) = match self {
            Atom::Rel { args, .. } => (args, &[]),
            Atom::Eq(l, r) => (std::slice::from_ref(l), std::slice::from_ref(r)),
        };
        first.iter().chain(rest.iter())
    }

    /// `t = t`.
    pub fn is_trivial_identity(&self) -> bool {
        matches!(self, Atom::Eq(l, r) if l == r)
    }

    /// Orients an equation so that the side with the smaller printed form
    /// comes first. Relation atoms are returned unchanged.
    pub fn oriented(self) -> Atom {
        match self {
            Atom::Eq(l, r) if r.to_string() < l.to_string() => Atom::Eq(r, l),
            other => other,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rel { head, args } => {
                write!(f, "({head}")?;
                for arg in args {
                    write!(f, " {arg}")?;
                }
                f.write_str(")")
            }
            Atom::Eq(l, r) => write!(f, "(= {l} {r})"),
        }
    }
}

/// Quantifier-free ground formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(atom: Atom) -> Formula {
        Formula::Atom(atom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => visit(a),
            Formula::Not(f) => f.for_each_atom(visit),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.for_each_atom(visit)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.for_each_atom(visit);
                r.for_each_atom(visit);
            }
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| out.push(a));
        out
    }

    /// Rewrites every atom, keeping the connective structure.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(l, r) => Formula::implies(l.map_atoms(f), r.map_atoms(f)),
            Formula::Iff(l, r) => Formula::iff(l.map_atoms(f), r.map_atoms(f)),
        }
    }

    pub fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        self.for_each_atom(&mut |a| a.terms().for_each(|t| t.collect_subterms(out)));
    }

    /// Evaluates under a truth assignment for atoms.
    pub fn eval(&self, value: &mut impl FnMut(&Atom) -> bool) -> bool {
        match self {
            Formula::Atom(a) => value(a),
            Formula::Not(f) => !f.eval(value),
            Formula::And(fs) => fs.iter().all(|f| f.eval(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(value)),
            Formula::Implies(l, r) => !l.eval(value) || r.eval(value),
            Formula::Iff(l, r) => l.eval(value) == r.eval(value),
        }
    }
}

impl From<Atom> for Formula {
    fn from(atom: Atom) -> Formula {
        Formula::Atom(atom)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, items: &[Formula]) -> fmt::Result {
            write!(f, "({op}")?;
            for item in items {
                write!(f, " {item}")?;
            }
            f.write_str(")")
        }
        match self {
            Formula::Atom(a) => a.fmt(f),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(l, r) => write!(f, "(implies {l} {r})"),
            Formula::Iff(l, r) => write!(f, "(iff {l} {r})"),
        }
    }
}
