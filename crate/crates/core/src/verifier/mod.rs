//! Deciding whether an item verifies under an environment.
//!
//! Verification is refutation in ground first-order logic with equality.
//! Each attached property's schema is instantiated once over the subterms of
//! the problem; the item verifies iff its premises, the goals of the items it
//! uses, those instances and the negated goal have no model. [`solver`]
//! decides this by DPLL search with congruence closure, [`oracle`] by
//! enumerating all assignments.

mod ground;
pub mod oracle;
mod solver;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::corpus::{Atom, Environment, Formula, Item, Library, Term};

pub use ground::{instance_count, instantiate_axioms, term_universe, Grounding, TermUniverse};
pub use oracle::{brute_force_verdict, witness_is_valid, DEFAULT_ORACLE_BOUND};

pub const DEFAULT_BUDGET: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("budget exceeded: {count} ground instances or clauses (cap {budget})")]
    BudgetExceeded { count: usize, budget: usize },
    #[error("malformed item `{item}`: {reason}")]
    MalformedItem { item: String, reason: String },
    #[error("oracle bound exceeded: {atoms} atoms (bound {bound})")]
    OracleBoundExceeded { atoms: usize, bound: usize },
}

/// A verification problem: facts, a goal, and the attachments in force.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub premises: Vec<Formula>,
    pub goal: Formula,
    pub env: Environment,
}

impl Problem {
    /// The problem for `item`: its premises plus the goals of the items it
    /// uses, under `env` (default: the library environment) restricted to
    /// the item's imports.
    pub fn for_item(item: &Item, lib: &Library, env: Option<&Environment>) -> Result<Problem, VerifyError> {
        let malformed = |reason: String| VerifyError::MalformedItem { item: item.id.clone(), reason };
        if lib.item(&item.id) != Some(item) {
            return Err(malformed("not part of the library".into()));
        }
        let mut premises = item.premises.clone();
        for used in &item.uses {
            let dep = lib.item(used).ok_or_else(|| malformed(format!("uses unknown item `{used}`")))?;
            premises.push(dep.goal.clone());
        }
        let env = env.unwrap_or(&lib.environment).restricted_to(&item.imports);
        Ok(Problem { premises, goal: item.goal.clone(), env })
    }
}

/// A model of premises, axiom instances and the negated goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    /// Every grounded atom with its value, sorted by printed atom.
    pub assignment: Vec<(Atom, bool)>,
    /// Equality partition of all grounded terms. Members and classes are
    /// sorted by printed form.
    pub classes: Vec<Vec<Term>>,
}

impl Countermodel {
    pub fn new(mut assignment: Vec<(Atom, bool)>, mut classes: Vec<Vec<Term>>) -> Self {
        assignment.sort_by_cached_key(|(a, _)| a.to_string());
        for class in &mut classes {
            class.sort_by_cached_key(Term::to_string);
        }
        classes.sort_by_cached_key(|c| c.first().map(Term::to_string));
        Countermodel { assignment, classes }
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.assignment.iter().filter(|(_, v)| *v).map(|(a, _)| a)
    }
}

impl fmt::Display for Countermodel {
    /// `true: (R a b) (= a b); classes: {a b}`. Singleton classes are
    /// omitted; empty parts print as `none` and `all distinct`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("true:")?;
        let mut any = false;
        for a in self.true_atoms() {
            write!(f, " {a}")?;
            any = true;
        }
        if !any {
            f.write_str(" none")?;
        }
        f.write_str("; classes:")?;
        let merged: Vec<&Vec<Term>> = self.classes.iter().filter(|c| c.len() > 1).collect();
        if merged.is_empty() {
            return f.write_str(" all distinct");
        }
        for class in merged {
            let members: Vec<String> = class.iter().map(Term::to_string).collect();
            write!(f, " {{{}}}", members.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Failed(Countermodel),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn witness(&self) -> Option<&Countermodel> {
        match self {
            Verdict::Verified => None,
            Verdict::Failed(w) => Some(w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifierConfig {
    /// Cap on generated axiom instances, and separately on clauses.
    pub budget: usize,
    /// Largest atom count the exhaustive oracle accepts.
    pub oracle_bound: usize,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig { budget: DEFAULT_BUDGET, oracle_bound: DEFAULT_ORACLE_BOUND }
    }
}

/// Decides a problem with the search-based procedure.
pub fn decide(problem: &Problem, budget: usize) -> Result<Verdict, VerifyError> {
    solver::decide(&Grounding::new(problem, budget)?, budget)
}

/// Decides a grounded problem with the search-based procedure.
pub fn decide_grounded(grounding: &Grounding, budget: usize) -> Result<Verdict, VerifyError> {
    solver::decide(grounding, budget)
}

/// Item checker. Counts every [`Verifier::check`] call so callers can audit
/// how many verifications an analysis issued.
#[derive(Debug, Default)]
pub struct Verifier {
    config: VerifierConfig,
    calls: AtomicUsize,
}

impl Verifier {
    pub fn new(config: VerifierConfig) -> Self {
        Verifier { config, calls: AtomicUsize::new(0) }
    }

    pub fn config(&self) -> VerifierConfig {
        self.config
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// Checks `item` under `env_override`, or under the library environment
    /// when `None`. Either way only attachments on imported constructors
    /// apply.
    pub fn check(&self, item: &Item, lib: &Library, env_override: Option<&Environment>) -> Result<Verdict, VerifyError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        decide(&Problem::for_item(item, lib, env_override)?, self.config.budget)
    }

    /// Exhaustive cross-check of the same item.
    pub fn brute_force(&self, item: &Item, lib: &Library, env_override: Option<&Environment>) -> Result<Verdict, VerifyError> {
        let problem = Problem::for_item(item, lib, env_override)?;
        brute_force_verdict(&problem, self.config.oracle_bound, self.config.budget)
    }
}
