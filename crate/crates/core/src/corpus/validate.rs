use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{Atom, ConstructorKind, Formula, Item, Library, PropertyKind, Term, RESERVED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    UnsupportedArity(u8),
    PropertyKindMismatch { property: PropertyKind, kind: ConstructorKind, arity: u8 },
    UndeclaredConstructor(String),
    UndeclaredSymbol(String),
    ReservedName,
    NameClash,
    DuplicateConstant,
    DuplicateConstructor,
    DuplicateAttachment(PropertyKind),
    DuplicateItem,
    /// A declared symbol used in the wrong position or with the wrong arity.
    Misuse { symbol: String, reason: String },
    NotImported(String),
    UnknownUse(String),
    SelfUse,
    Cycle(Vec<String>),
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DiagnosticKind::*;
        match self {
            UnsupportedArity(n) => write!(f, "unsupported arity {n} (only 1 and 2)"),
            PropertyKindMismatch { property, kind, arity } => {
                let (want_kind, want_arity) = property.applies_to();
                write!(
                    f,
                    "property/kind mismatch: {property} needs {want_kind}/{want_arity}, found {kind}/{arity}"
                )
            }
            UndeclaredConstructor(c) => write!(f, "undeclared constructor `{c}`"),
            UndeclaredSymbol(s) => write!(f, "undeclared symbol `{s}`"),
            ReservedName => f.write_str("reserved name"),
            NameClash => f.write_str("declared both as constant and constructor"),
            DuplicateConstant => f.write_str("duplicate constant"),
            DuplicateConstructor => f.write_str("duplicate constructor"),
            DuplicateAttachment(p) => write!(f, "duplicate attachment of {p}"),
            DuplicateItem => f.write_str("duplicate item"),
            Misuse { symbol, reason } => write!(f, "`{symbol}` {reason}"),
            NotImported(c) => write!(f, "constructor `{c}` used but not imported"),
            UnknownUse(i) => write!(f, "uses unknown item `{i}`"),
            SelfUse => f.write_str("uses itself"),
            Cycle(path) => write!(f, "cycle: {}", path.join(",")),
        }
    }
}

/// One invariant violation, tagged with the offending constructor or item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub subject: String,
    pub kind: DiagnosticKind,
}

impl Diagnostic {
    pub fn new(subject: impl Into<String>, kind: DiagnosticKind) -> Self {
        Diagnostic { subject: subject.into(), kind }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.kind)
    }
}

/// Checks every library invariant and returns all violations found.
pub fn validate_library(lib: &Library) -> Result<(), Vec<Diagnostic>> {
    let mut out = Vec::new();

    for name in &lib.constants {
        if RESERVED.contains(&name.as_str()) {
            out.push(Diagnostic::new(name, DiagnosticKind::ReservedName));
        }
        if lib.constructors.contains_key(name) {
            out.push(Diagnostic::new(name, DiagnosticKind::NameClash));
        }
    }
    for (id, decl) in &lib.constructors {
        if RESERVED.contains(&id.as_str()) {
            out.push(Diagnostic::new(id, DiagnosticKind::ReservedName));
        }
        if !(1..=2).contains(&decl.arity) {
            out.push(Diagnostic::new(id, DiagnosticKind::UnsupportedArity(decl.arity)));
        }
    }
    for att in &lib.environment {
        match lib.constructors.get(&att.constructor) {
            None => out.push(Diagnostic::new(
                &att.constructor,
                DiagnosticKind::UndeclaredConstructor(att.constructor.clone()),
            )),
            Some(decl) if !att.property.is_applicable(decl.kind, decl.arity) => {
                out.push(Diagnostic::new(
                    &att.constructor,
                    DiagnosticKind::PropertyKindMismatch {
                        property: att.property,
                        kind: decl.kind,
                        arity: decl.arity,
                    },
                ))
            }
            Some(_) => {}
        }
    }

    let mut seen = BTreeSet::new();
    for item in &lib.items {
        if !seen.insert(item.id.as_str()) {
            out.push(Diagnostic::new(&item.id, DiagnosticKind::DuplicateItem));
        }
    }
    for item in &lib.items {
        check_item(lib, item, &mut out);
    }
    out.extend(find_cycles(lib));

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_item(lib: &Library, item: &Item, out: &mut Vec<Diagnostic>) {
    let mut push = |kind| out.push(Diagnostic::new(&item.id, kind));
    for c in &item.imports {
        if !lib.constructors.contains_key(c) {
            push(DiagnosticKind::UndeclaredConstructor(c.clone()));
        }
    }
    for target in &item.uses {
        if *target == item.id {
            push(DiagnosticKind::SelfUse);
        } else if lib.item(target).is_none() {
            push(DiagnosticKind::UnknownUse(target.clone()));
        }
    }

    // Report each problem once per item even if the symbol recurs.
    let mut problems = BTreeSet::new();
    for formula in item.premises.iter().chain(std::iter::once(&item.goal)) {
        check_formula(lib, item, formula, &mut problems);
    }
    for p in problems {
        push(p.into());
    }
}

fn check_formula(lib: &Library, item: &Item, formula: &Formula, problems: &mut BTreeSet<DiagnosticKindKey>) {
    formula.for_each_atom(&mut |atom| match atom {
        Atom::Rel { head, args } => {
            check_symbol(lib, item, head, args.len(), ConstructorKind::Relation, problems);
            args.iter().for_each(|t| check_term(lib, item, t, problems));
        }
        Atom::Eq(l, r) => {
            check_term(lib, item, l, problems);
            check_term(lib, item, r, problems);
        }
    });
}

fn check_term(lib: &Library, item: &Item, term: &Term, problems: &mut BTreeSet<DiagnosticKindKey>) {
    if term.is_constant() && lib.constants.contains(&term.head) {
        return;
    }
    check_symbol(lib, item, &term.head, term.args.len(), ConstructorKind::Function, problems);
    term.args.iter().for_each(|t| check_term(lib, item, t, problems));
}

fn check_symbol(
    lib: &Library,
    item: &Item,
    symbol: &str,
    arity: usize,
    expected: ConstructorKind,
    problems: &mut BTreeSet<DiagnosticKindKey>,
) {
    let misuse = |reason: String| DiagnosticKind::Misuse { symbol: symbol.to_string(), reason };
    let Some(decl) = lib.constructors.get(symbol) else {
        if lib.constants.contains(symbol) {
            problems.insert(misuse(format!("is a constant, used as a {expected}")).into());
        } else {
            problems.insert(DiagnosticKind::UndeclaredSymbol(symbol.to_string()).into());
        }
        return;
    };
    if decl.kind != expected {
        problems.insert(misuse(format!("is a {}, used as a {expected}", decl.kind)).into());
    } else if decl.arity as usize != arity {
        problems.insert(misuse(format!("has arity {}, applied to {arity} arguments", decl.arity)).into());
    }
    if !item.imports.contains(symbol) {
        problems.insert(DiagnosticKind::NotImported(symbol.to_string()).into());
    }
}

/// Orders diagnostics by their printed form so each item's report is stable.
#[derive(PartialEq, Eq)]
struct DiagnosticKindKey(String, DiagnosticKind);

impl From<DiagnosticKind> for DiagnosticKindKey {
    fn from(kind: DiagnosticKind) -> Self {
        DiagnosticKindKey(kind.to_string(), kind)
    }
}

impl PartialOrd for DiagnosticKindKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiagnosticKindKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

impl From<DiagnosticKindKey> for DiagnosticKind {
    fn from(key: DiagnosticKindKey) -> Self {
        key.1
    }
}

/// Depth-first search for cycles in the uses relation. Each cycle is reported
/// once, on the item where the search entered it, listing the items in
/// traversal order.
fn find_cycles(lib: &Library) -> Vec<Diagnostic> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Open,
        Done,
    }

    let index: HashMap<&str, usize> =
        lib.items.iter().enumerate().map(|(i, item)| (item.id.as_str(), i)).collect();
    let succ: Vec<Vec<usize>> = lib
        .items
        .iter()
        .map(|item| {
            item.uses
                .iter()
                .filter(|u| **u != item.id)
                .filter_map(|u| index.get(u.as_str()).copied())
                .collect()
        })
        .collect();

    let mut marks = vec![Mark::Fresh; lib.items.len()];
    let mut cycles = BTreeMap::new();
    for root in 0..lib.items.len() {
        if marks[root] != Mark::Fresh {
            continue;
        }
        // (node, next successor position)
        let mut stack = vec![(root, 0usize)];
        marks[root] = Mark::Open;
        while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
            if let Some(&next) = succ[node].get(*pos) {
                *pos += 1;
                match marks[next] {
                    Mark::Fresh => {
                        marks[next] = Mark::Open;
                        stack.push((next, 0));
                    }
                    Mark::Open => {
                        let start = stack.iter().position(|&(n, _)| n == next).expect("open node on stack");
                        let path: Vec<String> =
                            stack[start..].iter().map(|&(n, _)| lib.items[n].id.clone()).collect();
                        cycles.entry(path.clone()).or_insert(Diagnostic::new(
                            &lib.items[next].id,
                            DiagnosticKind::Cycle(path),
                        ));
                    }
                    Mark::Done => {}
                }
            } else {
                marks[node] = Mark::Done;
                stack.pop();
            }
        }
    }
    cycles.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Attachment, ConstructorDecl, Environment};

    fn c(name: &str) -> Term {
        Term::constant(name)
    }

    fn item(id: &str, imports: &[&str], goal: Formula, uses: &[&str]) -> Item {
        Item {
            id: id.into(),
            imports: imports.iter().map(|s| s.to_string()).collect(),
            premises: vec![],
            goal,
            uses: uses.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn two_item_library() -> Library {
        let mut lib = Library::default();
        lib.constructors.insert("lt".into(), ConstructorDecl::relation("lt", 2));
        lib.constants.extend(["a".to_string(), "b".to_string()]);
        lib.environment = Environment::new().attach("lt", PropertyKind::Irreflexivity);
        let lt_ab: Formula = Atom::rel("lt", vec![c("a"), c("b")]).into();
        lib.items.push(item("first", &["lt"], lt_ab.clone(), &[]));
        lib.items.push(item("second", &["lt"], lt_ab, &["first"]));
        lib
    }

    #[test]
    fn accepts_well_formed_library() {
        assert_eq!(validate_library(&two_item_library()), Ok(()));
    }

    #[test]
    fn rejects_commutativity_on_relation() {
        let mut lib = two_item_library();
        lib.environment = [Attachment::new("lt", PropertyKind::Commutativity)].into_iter().collect();
        let diags = validate_library(&lib).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].to_string().contains("property/kind mismatch"), "{}", diags[0]);
        assert_eq!(diags[0].subject, "lt");
    }

    #[test]
    fn reports_cycle() {
        let mut lib = two_item_library();
        lib.items[0].id = "a".into();
        lib.items[0].uses.insert("b".into());
        lib.items[1].id = "b".into();
        lib.items[1].uses = ["a".to_string()].into();
        let diags = validate_library(&lib).unwrap_err();
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert!(diags[0].to_string().contains("cycle: a,b"), "{}", diags[0]);
    }

    #[test]
    fn reports_self_use_and_unknown_use() {
        let mut lib = two_item_library();
        lib.items[0].uses.insert("first".into());
        lib.items[1].uses.insert("ghost".into());
        let kinds: Vec<_> = validate_library(&lib).unwrap_err().into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::SelfUse));
        assert!(kinds.contains(&DiagnosticKind::UnknownUse("ghost".into())));
    }

    #[test]
    fn reports_symbol_problems() {
        let mut lib = two_item_library();
        lib.constructors.insert("f".into(), ConstructorDecl::function("f", 1));
        lib.constructors.insert("big".into(), ConstructorDecl::relation("big", 3));
        lib.items[0].goal = Formula::And(vec![
            Atom::rel("lt", vec![c("a")]).into(),
            Atom::eq(Term::app("f", vec![c("zz")]), c("a")).into(),
            Atom::rel("a", vec![c("b")]).into(),
        ]);
        let diags = validate_library(&lib).unwrap_err();
        let printed: Vec<String> = diags.iter().map(ToString::to_string).collect();
        let has = |s: &str| printed.iter().any(|p| p.contains(s));
        assert!(has("big: unsupported arity 3"), "{printed:?}");
        assert!(has("`lt` has arity 2, applied to 1 arguments"), "{printed:?}");
        assert!(has("undeclared symbol `zz`"), "{printed:?}");
        assert!(has("constructor `f` used but not imported"), "{printed:?}");
        assert!(has("`a` is a constant, used as a relation"), "{printed:?}");
    }

    #[test]
    fn reports_undeclared_attachment_target_and_clash() {
        let mut lib = two_item_library();
        lib.environment = lib.environment.attach("gt", PropertyKind::Symmetry);
        lib.constants.insert("lt".into());
        let kinds: Vec<_> = validate_library(&lib).unwrap_err().into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::UndeclaredConstructor("gt".into())));
        assert!(kinds.contains(&DiagnosticKind::NameClash));
    }
}
