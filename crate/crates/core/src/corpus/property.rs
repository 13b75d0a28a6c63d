//! The nine constructor properties and their universal axiom schemas.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::formula::{Atom, Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructorKind {
    Relation,
    Function,
}

impl ConstructorKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructorKind::Relation => "relation",
            ConstructorKind::Function => "function",
        }
    }
}

impl fmt::Display for ConstructorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A property that can be attached to a constructor. The declaration order
/// is the report order: relation properties first, then function properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Reflexivity,
    Symmetry,
    Asymmetry,
    Connectedness,
    Irreflexivity,
    Projectivity,
    Involutiveness,
    Idempotence,
    Commutativity,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 9] = [
        PropertyKind::Reflexivity,
        PropertyKind::Symmetry,
        PropertyKind::Asymmetry,
        PropertyKind::Connectedness,
        PropertyKind::Irreflexivity,
        PropertyKind::Projectivity,
        PropertyKind::Involutiveness,
        PropertyKind::Idempotence,
        PropertyKind::Commutativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::Reflexivity => "reflexivity",
            PropertyKind::Symmetry => "symmetry",
            PropertyKind::Asymmetry => "asymmetry",
            PropertyKind::Connectedness => "connectedness",
            PropertyKind::Irreflexivity => "irreflexivity",
            PropertyKind::Projectivity => "projectivity",
            PropertyKind::Involutiveness => "involutiveness",
            PropertyKind::Idempotence => "idempotence",
            PropertyKind::Commutativity => "commutativity",
        }
    }

    /// The (kind, arity) of constructor the property can be attached to.
    pub fn applies_to(self) -> (ConstructorKind, u8) {
        use PropertyKind::*;
        match self {
            Reflexivity | Symmetry | Asymmetry | Connectedness | Irreflexivity => {
                (ConstructorKind::Relation, 2)
            }
            Projectivity | Involutiveness => (ConstructorKind::Function, 1),
            Idempotence | Commutativity => (ConstructorKind::Function, 2),
        }
    }

    pub fn is_applicable(self, kind: ConstructorKind, arity: u8) -> bool {
        self.applies_to() == (kind, arity)
    }

    pub fn schema(self) -> FormulaSchema {
        property_schema(self)
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

impl Serialize for PropertyKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// A universally bound variable of a schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundVar {
    X,
    Y,
}

impl BoundVar {
    fn name(self) -> &'static str {
        match self {
            BoundVar::X => "x",
            BoundVar::Y => "y",
        }
    }
}

/// Schema term: a bound variable, or the constructor metavariable applied to
/// schema terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaTerm {
    Var(BoundVar),
    Apply(Vec<SchemaTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaFormula {
    /// The relation metavariable applied to its arguments.
    Holds(Vec<SchemaTerm>),
    Eq(SchemaTerm, SchemaTerm),
    Not(Box<SchemaFormula>),
    Or(Box<SchemaFormula>, Box<SchemaFormula>),
    Implies(Box<SchemaFormula>, Box<SchemaFormula>),
}

/// `∀ bound. body`, with a single constructor metavariable (`R`, `f` or `g`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaSchema {
    pub property: PropertyKind,
    pub bound: Vec<BoundVar>,
    pub body: SchemaFormula,
}

fn var(v: BoundVar) -> SchemaTerm {
    SchemaTerm::Var(v)
}

fn apply(args: Vec<SchemaTerm>) -> SchemaTerm {
    SchemaTerm::Apply(args)
}

fn holds(args: Vec<SchemaTerm>) -> SchemaFormula {
    SchemaFormula::Holds(args)
}

/// Returns the axiom schema a property stands for.
pub fn property_schema(kind: PropertyKind) -> FormulaSchema {
    use BoundVar::{X, Y};
    use PropertyKind::*;
    use SchemaFormula as F;

    let x = || var(X);
    let y = || var(Y);
    let (bound, body) = match kind {
        Reflexivity => (vec![X], holds(vec![x(), x()])),
        Symmetry => (
            vec![X, Y],
            F::Implies(Box::new(holds(vec![x(), y()])), Box::new(holds(vec![y(), x()]))),
        ),
        Asymmetry => (
            vec![X, Y],
            F::Implies(
                Box::new(holds(vec![x(), y()])),
                Box::new(F::Not(Box::new(holds(vec![y(), x()])))),
            ),
        ),
        Connectedness => (
            vec![X, Y],
            F::Or(Box::new(holds(vec![x(), y()])), Box::new(holds(vec![y(), x()]))),
        ),
        Irreflexivity => (vec![X], F::Not(Box::new(holds(vec![x(), x()])))),
        Projectivity => (vec![X], F::Eq(apply(vec![apply(vec![x()])]), apply(vec![x()]))),
        Involutiveness => (vec![X], F::Eq(apply(vec![apply(vec![x()])]), x())),
        Idempotence => (vec![X], F::Eq(apply(vec![x(), x()]), x())),
        Commutativity => (vec![X, Y], F::Eq(apply(vec![x(), y()]), apply(vec![y(), x()]))),
    };
    FormulaSchema { property: kind, bound, body }
}

impl SchemaTerm {
    fn vars(&self, out: &mut BTreeSet<BoundVar>) {
        match self {
            SchemaTerm::Var(v) => {
                out.insert(*v);
            }
            SchemaTerm::Apply(args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    fn instantiate(&self, constructor: &str, subst: &dyn Fn(BoundVar) -> Term) -> Term {
        match self {
            SchemaTerm::Var(v) => subst(*v),
            SchemaTerm::Apply(args) => Term::app(
                constructor,
                args.iter().map(|a| a.instantiate(constructor, subst)).collect(),
            ),
        }
    }
}

impl SchemaFormula {
    fn vars(&self, out: &mut BTreeSet<BoundVar>) {
        match self {
            SchemaFormula::Holds(args) => args.iter().for_each(|a| a.vars(out)),
            SchemaFormula::Eq(l, r) => {
                l.vars(out);
                r.vars(out);
            }
            SchemaFormula::Not(f) => f.vars(out),
            SchemaFormula::Or(l, r) | SchemaFormula::Implies(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    fn instantiate(&self, constructor: &str, subst: &dyn Fn(BoundVar) -> Term) -> Formula {
        let term = |t: &SchemaTerm| t.instantiate(constructor, subst);
        match self {
            SchemaFormula::Holds(args) => {
                Atom::rel(constructor, args.iter().map(term).collect()).into()
            }
            SchemaFormula::Eq(l, r) => Atom::eq(term(l), term(r)).into(),
            SchemaFormula::Not(f) => Formula::not(f.instantiate(constructor, subst)),
            SchemaFormula::Or(l, r) => Formula::Or(vec![
                l.instantiate(constructor, subst),
                r.instantiate(constructor, subst),
            ]),
            SchemaFormula::Implies(l, r) => Formula::implies(
                l.instantiate(constructor, subst),
                r.instantiate(constructor, subst),
            ),
        }
    }
}

impl FormulaSchema {
    /// Variables occurring in the body that are not bound by the prefix.
    pub fn free_vars(&self) -> BTreeSet<BoundVar> {
        let mut out = BTreeSet::new();
        self.body.vars(&mut out);
        out.retain(|v| !self.bound.contains(v));
        out
    }

    /// The constructor metavariable's conventional name.
    pub fn metavariable(&self) -> &'static str {
        match self.property.applies_to() {
            (ConstructorKind::Relation, _) => "R",
            (ConstructorKind::Function, 1) => "f",
            (ConstructorKind::Function, _) => "g",
        }
    }

    /// Substitutes `constructor` for the metavariable and `terms[i]` for the
    /// i-th bound variable.
    ///
    /// Panics if `terms.len()` differs from the number of bound variables.
    pub fn instantiate(&self, constructor: &str, terms: &[Term]) -> Formula {
        assert_eq!(terms.len(), self.bound.len(), "schema arity mismatch");
        let subst = |v: BoundVar| {
            let i = self.bound.iter().position(|b| *b == v).expect("bound variable");
            terms[i].clone()
        };
        self.body.instantiate(constructor, &subst)
    }
}

enum SchemaItem<'a> {
    Term(&'a SchemaTerm),
    Formula(&'a SchemaFormula),
}

struct SchemaDisplay<'a> {
    meta: &'static str,
    item: SchemaItem<'a>,
}

impl<'a> SchemaDisplay<'a> {
    fn with(&self, item: SchemaItem<'a>) -> SchemaDisplay<'a> {
        SchemaDisplay { meta: self.meta, item }
    }

    fn applied(&self, f: &mut fmt::Formatter<'_>, args: &'a [SchemaTerm]) -> fmt::Result {
        write!(f, "{}(", self.meta)?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.with(SchemaItem::Term(a)))?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for SchemaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |t| self.with(SchemaItem::Term(t));
        let formula = |g| self.with(SchemaItem::Formula(g));
        match self.item {
            SchemaItem::Term(SchemaTerm::Var(v)) => f.write_str(v.name()),
            SchemaItem::Term(SchemaTerm::Apply(xs)) => self.applied(f, xs),
            SchemaItem::Formula(SchemaFormula::Holds(xs)) => self.applied(f, xs),
            SchemaItem::Formula(SchemaFormula::Eq(l, r)) => write!(f, "{} = {}", term(l), term(r)),
            SchemaItem::Formula(SchemaFormula::Not(g)) => write!(f, "¬{}", formula(g)),
            SchemaItem::Formula(SchemaFormula::Or(l, r)) => {
                write!(f, "{} ∨ {}", formula(l), formula(r))
            }
            SchemaItem::Formula(SchemaFormula::Implies(l, r)) => {
                write!(f, "{} → {}", formula(l), formula(r))
            }
        }
    }
}

impl fmt::Display for FormulaSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.bound.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "∀{}", v.name())?;
        }
        let body = SchemaDisplay { meta: self.metavariable(), item: SchemaItem::Formula(&self.body) };
        write!(f, " [{body}]")
    }
}
