//! Domain model: constructors, property attachments, environments and items.
//!
//! A [`Library`] is plain data. Build one by hand or through
//! [`crate::frontend::parse_library`], then run [`validate_library`] before
//! handing it to the verifier.

mod formula;
mod property;
mod validate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use formula::{Atom, Formula, Term};
pub use property::{
    property_schema, BoundVar, ConstructorKind, FormulaSchema, PropertyKind, SchemaFormula,
    SchemaTerm,
};
pub use validate::{validate_library, Diagnostic, DiagnosticKind};

/// Connectives and the equality sign; never usable as symbol names.
pub const RESERVED: [&str; 6] = ["=", "not", "and", "or", "implies", "iff"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub id: String,
    pub kind: ConstructorKind,
    pub arity: u8,
}

impl ConstructorDecl {
    pub fn relation(id: impl Into<String>, arity: u8) -> Self {
        ConstructorDecl { id: id.into(), kind: ConstructorKind::Relation, arity }
    }

    pub fn function(id: impl Into<String>, arity: u8) -> Self {
        ConstructorDecl { id: id.into(), kind: ConstructorKind::Function, arity }
    }
}

/// A property attached to a constructor.
///
/// Ordered by constructor id, then by property name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attachment {
    pub constructor: String,
    pub property: PropertyKind,
}

impl Attachment {
    pub fn new(constructor: impl Into<String>, property: PropertyKind) -> Self {
        Attachment { constructor: constructor.into(), property }
    }
}

impl Ord for Attachment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.constructor
            .cmp(&other.constructor)
            .then_with(|| self.property.name().cmp(other.property.name()))
    }
}

impl PartialOrd for Attachment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Attachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.constructor, self.property)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("attachment {0} not found in environment")]
    AttachmentNotFound(Attachment),
}

/// The set of property attachments verification runs under.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    attachments: BTreeSet<Attachment>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, constructor: &str, property: PropertyKind) -> bool {
        self.attachments.contains(&Attachment::new(constructor, property))
    }

    /// Returns a copy with one more attachment.
    pub fn attach(&self, constructor: &str, property: PropertyKind) -> Environment {
        let mut out = self.clone();
        out.attachments.insert(Attachment::new(constructor, property));
        out
    }

    /// Returns a copy without the `(constructor, property)` attachment.
    pub fn detach(&self, constructor: &str, property: PropertyKind) -> Result<Environment, CorpusError> {
        let target = Attachment::new(constructor, property);
        if !self.attachments.contains(&target) {
            return Err(CorpusError::AttachmentNotFound(target));
        }
        let mut out = self.clone();
        out.attachments.remove(&target);
        Ok(out)
    }

    /// Keeps only attachments on the given constructors.
    pub fn restricted_to(&self, constructors: &BTreeSet<String>) -> Environment {
        self.attachments
            .iter()
            .filter(|a| constructors.contains(&a.constructor))
            .cloned()
            .collect()
    }

    pub fn is_subset(&self, other: &Environment) -> bool {
        self.attachments.is_subset(&other.attachments)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Attachment> {
        self.attachments.iter()
    }

    pub fn len(&self) -> usize {
        self.attachments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attachments.is_empty()
    }

    pub(crate) fn insert(&mut self, attachment: Attachment) -> bool {
        self.attachments.insert(attachment)
    }
}

impl FromIterator<Attachment> for Environment {
    fn from_iter<I: IntoIterator<Item = Attachment>>(iter: I) -> Self {
        Environment { attachments: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a Environment {
    type Item = &'a Attachment;
    type IntoIter = std::collections::btree_set::Iter<'a, Attachment>;

    fn into_iter(self) -> Self::IntoIter {
        self.attachments.iter()
    }
}

/// Free-standing form of [`Environment::detach`].
pub fn detach(env: &Environment, constructor: &str, property: PropertyKind) -> Result<Environment, CorpusError> {
    env.detach(constructor, property)
}

/// One verifiable unit of the library.
///
/// The premises are local facts the item may use; the goal is what it
/// establishes, and what items that `use` it get to assume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub imports: BTreeSet<String>,
    pub premises: Vec<Formula>,
    pub goal: Formula,
    pub uses: BTreeSet<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Library {
    pub constructors: BTreeMap<String, ConstructorDecl>,
    pub constants: BTreeSet<String>,
    pub environment: Environment,
    pub items: Vec<Item>,
}

impl Library {
    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn constructor(&self, id: &str) -> Option<&ConstructorDecl> {
        self.constructors.get(id)
    }

    /// Attachments that apply to an item: those on constructors it imports.
    pub fn environment_for(&self, item: &Item) -> Environment {
        self.environment.restricted_to(&item.imports)
    }
}
