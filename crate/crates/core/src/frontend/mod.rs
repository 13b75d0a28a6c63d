//! Reading and writing corpus files.
//!
//! A corpus is a sequence of s-expression forms:
//!
//! ```text
//! (constant a)
//! (constructor lt :kind relation :arity 2)
//! (attach lt irreflexivity)
//! (item th1 :imports (lt) :premises ((lt a b)) :goal (not (lt b a)) :uses ())
//! ```
//!
//! Formulas use `not`, `and`, `or`, `implies` and `iff` over atoms
//! `(R t ...)` and `(= t t)`; terms are constants or `(f t ...)`.

mod sexpr;

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write};

use thiserror::Error;

use crate::corpus::{
    validate_library, Atom, Attachment, ConstructorDecl, ConstructorKind, Diagnostic,
    DiagnosticKind, Formula, Item, Library, PropertyKind, Term, RESERVED,
};
use sexpr::{read_all, Pos, Sexpr};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { line: pos.line, column: pos.column, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid library:\n{}", DiagnosticList(.0))]
    Invalid(Vec<Diagnostic>),
}

struct DiagnosticList<'a>(&'a [Diagnostic]);

impl fmt::Display for DiagnosticList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "  {d}")?;
        }
        Ok(())
    }
}

/// Parses and validates a corpus.
pub fn parse_library(text: &str) -> Result<Library, FrontendError> {
    let mut lib = Library::default();
    // Duplicates cannot be represented in the map/set based `Library`, so
    // they are caught here.
    let mut dups = Vec::new();
    let mut item_ids = HashSet::new();

    for form in read_all(text)? {
        let (head, args, pos) = split_form(&form)?;
        match head {
            "constant" => {
                let [name] = exact::<1>(args, pos, "(constant NAME)")?;
                let name = self::name(name)?;
                if !lib.constants.insert(name.clone()) {
                    dups.push(Diagnostic::new(name, DiagnosticKind::DuplicateConstant));
                }
            }
            "constructor" => {
                let usage = "(constructor NAME :kind relation|function :arity 1|2)";
                let [name, kw_kind, kind, kw_arity, arity] = exact::<5>(args, pos, usage)?;
                let name = self::name(name)?;
                keyword(kw_kind, ":kind")?;
                let kind = match symbol(kind)? {
                    "relation" => ConstructorKind::Relation,
                    "function" => ConstructorKind::Function,
                    other => return Err(ParseError::at(kind.pos(), format!("unknown kind `{other}`")).into()),
                };
                keyword(kw_arity, ":arity")?;
                let arity = match symbol(arity)? {
                    "1" => 1,
                    "2" => 2,
                    other => {
                        return Err(ParseError::at(arity.pos(), format!("arity must be 1 or 2, found `{other}`")).into())
                    }
                };
                let decl = ConstructorDecl { id: name.clone(), kind, arity };
                if lib.constructors.insert(name.clone(), decl).is_some() {
                    dups.push(Diagnostic::new(name, DiagnosticKind::DuplicateConstructor));
                }
            }
            "attach" => {
                let [name, prop] = exact::<2>(args, pos, "(attach NAME PROPERTY)")?;
                let name = self::name(name)?;
                let property: PropertyKind =
                    symbol(prop)?.parse().map_err(|e: String| ParseError::at(prop.pos(), e))?;
                if !lib.environment.insert(Attachment::new(name.clone(), property)) {
                    dups.push(Diagnostic::new(name, DiagnosticKind::DuplicateAttachment(property)));
                }
            }
            "item" => {
                let item = parse_item(args, pos)?;
                if !item_ids.insert(item.id.clone()) {
                    dups.push(Diagnostic::new(&item.id, DiagnosticKind::DuplicateItem));
                }
                lib.items.push(item);
            }
            other => return Err(ParseError::at(pos, format!("unknown form `{other}`")).into()),
        }
    }

    if let Err(diags) = validate_library(&lib) {
        // DuplicateItem is reported by validation as well.
        dups.retain(|d| d.kind != DiagnosticKind::DuplicateItem);
        dups.extend(diags);
    }
    if dups.is_empty() {
        Ok(lib)
    } else {
        Err(FrontendError::Invalid(dups))
    }
}

fn split_form(form: &Sexpr) -> Result<(&str, &[Sexpr], Pos), ParseError> {
    match form {
        Sexpr::List(items, pos) => match items.split_first() {
            Some((Sexpr::Symbol(head, _), rest)) => Ok((head, rest, *pos)),
            _ => Err(ParseError::at(*pos, "expected a form starting with a name")),
        },
        Sexpr::Symbol(s, pos) => Err(ParseError::at(*pos, format!("expected a form, found `{s}`"))),
    }
}

fn exact<'a, const N: usize>(args: &'a [Sexpr], pos: Pos, usage: &str) -> Result<&'a [Sexpr; N], ParseError> {
    args.try_into().map_err(|_| ParseError::at(pos, format!("expected {usage}")))
}

fn symbol(expr: &Sexpr) -> Result<&str, ParseError> {
    expr.as_symbol().ok_or_else(|| ParseError::at(expr.pos(), "expected a name"))
}

fn name(expr: &Sexpr) -> Result<String, ParseError> {
    let s = symbol(expr)?;
    if RESERVED.contains(&s) || s.starts_with(':') {
        return Err(ParseError::at(expr.pos(), format!("`{s}` is reserved")));
    }
    Ok(s.to_string())
}

fn keyword(expr: &Sexpr, want: &str) -> Result<(), ParseError> {
    match expr.as_symbol() {
        Some(s) if s == want => Ok(()),
        _ => Err(ParseError::at(expr.pos(), format!("expected `{want}`"))),
    }
}

fn list(expr: &Sexpr) -> Result<&[Sexpr], ParseError> {
    match expr {
        Sexpr::List(items, _) => Ok(items),
        Sexpr::Symbol(_, pos) => Err(ParseError::at(*pos, "expected a list")),
    }
}

fn names(expr: &Sexpr) -> Result<BTreeSet<String>, ParseError> {
    list(expr)?.iter().map(name).collect()
}

fn parse_item(args: &[Sexpr], pos: Pos) -> Result<Item, ParseError> {
    let usage = "(item NAME :imports (..) :premises (..) :goal FORMULA :uses (..))";
    let [id, kw_imports, imports, kw_premises, premises, kw_goal, goal, kw_uses, uses] =
        exact::<9>(args, pos, usage)?;
    let id = name(id)?;
    keyword(kw_imports, ":imports")?;
    let imports = names(imports)?;
    keyword(kw_premises, ":premises")?;
    let premises = list(premises)?.iter().map(parse_formula).collect::<Result<_, _>>()?;
    keyword(kw_goal, ":goal")?;
    let goal = parse_formula(goal)?;
    keyword(kw_uses, ":uses")?;
    let uses = names(uses)?;
    Ok(Item { id, imports, premises, goal, uses })
}

fn parse_formula(expr: &Sexpr) -> Result<Formula, ParseError> {
    let Sexpr::List(items, pos) = expr else {
        return Err(ParseError::at(expr.pos(), "expected a formula"));
    };
    let Some((head, args)) = items.split_first() else {
        return Err(ParseError::at(*pos, "empty formula"));
    };
    let head = symbol(head)?;
    let arity_err = |usage: &str| ParseError::at(*pos, format!("expected {usage}"));
    match head {
        "not" => {
            let [f] = args else { return Err(arity_err("(not FORMULA)")) };
            Ok(Formula::not(parse_formula(f)?))
        }
        "and" | "or" => {
            if args.is_empty() {
                return Err(arity_err(&format!("({head} FORMULA+)")));
            }
            let fs = args.iter().map(parse_formula).collect::<Result<_, _>>()?;
            Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
        }
        "implies" | "iff" => {
            let [l, r] = args else { return Err(arity_err(&format!("({head} FORMULA FORMULA)"))) };
            let (l, r) = (parse_formula(l)?, parse_formula(r)?);
            Ok(if head == "implies" { Formula::implies(l, r) } else { Formula::iff(l, r) })
        }
        "=" => {
            let [l, r] = args else { return Err(arity_err("(= TERM TERM)")) };
            Ok(Atom::eq(parse_term(l)?, parse_term(r)?).into())
        }
        _ => {
            let head = name(&items[0])?;
            let args = args.iter().map(parse_term).collect::<Result<_, _>>()?;
            Ok(Atom::rel(head, args).into())
        }
    }
}

fn parse_term(expr: &Sexpr) -> Result<Term, ParseError> {
    match expr {
        Sexpr::Symbol(..) => Ok(Term::constant(name(expr)?)),
        Sexpr::List(items, pos) => {
            let Some((head, args)) = items.split_first() else {
                return Err(ParseError::at(*pos, "empty term"));
            };
            if args.is_empty() {
                return Err(ParseError::at(*pos, "write constants without parentheses"));
            }
            let head = name(head)?;
            Ok(Term::app(head, args.iter().map(parse_term).collect::<Result<_, _>>()?))
        }
    }
}

/// Writes the canonical text of a library: constants, constructors,
/// attachments, then items in library order, one form per line.
pub fn serialize_library(lib: &Library) -> String {
    let mut out = String::new();
    for c in &lib.constants {
        writeln!(out, "(constant {c})").unwrap();
    }
    for decl in lib.constructors.values() {
        writeln!(out, "(constructor {} :kind {} :arity {})", decl.id, decl.kind, decl.arity).unwrap();
    }
    let mut attachments: Vec<&Attachment> = lib.environment.iter().collect();
    attachments.sort_by(|a, b| (&a.constructor, a.property).cmp(&(&b.constructor, b.property)));
    for a in attachments {
        writeln!(out, "(attach {} {})", a.constructor, a.property).unwrap();
    }
    for item in &lib.items {
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(" ");
        writeln!(
            out,
            "(item {} :imports ({}) :premises ({}) :goal {} :uses ({}))",
            item.id,
            join(&mut item.imports.iter().cloned()),
            join(&mut item.premises.iter().map(ToString::to_string)),
            item.goal,
            join(&mut item.uses.iter().cloned()),
        )
        .unwrap();
    }
    out
}
