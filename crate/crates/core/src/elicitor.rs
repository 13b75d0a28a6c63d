//! Detach-and-recheck elicitation of needed properties.
//!
//! An item directly needs an attachment when it verifies under its full
//! environment but fails once that single attachment is detached. Properties
//! that are only jointly needed (either of two would do) do not show up as
//! direct needs; [`minimize_attachments`] exposes them by greedy removal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Attachment, Environment, Item, Library};
use crate::verifier::{Countermodel, Verdict, Verifier, VerifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NeedMode {
    Direct,
    Indirect,
}

impl fmt::Display for NeedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeedMode::Direct => "direct",
            NeedMode::Indirect => "indirect",
        })
    }
}

/// The attachments an item needs, directly or through the items it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeedSet {
    pub item: String,
    pub pairs: BTreeSet<Attachment>,
    pub mode: NeedMode,
}

impl NeedSet {
    pub fn new(item: impl Into<String>, mode: NeedMode) -> Self {
        NeedSet { item: item.into(), pairs: BTreeSet::new(), mode }
    }
}

impl fmt::Display for NeedSet {
    /// `item mode (c p) (c p) ...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.item, self.mode)?;
        for pair in &self.pairs {
            write!(f, " {pair}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ElicitError {
    #[error("item `{item}` does not verify under its full environment ({witness})")]
    BaselineFailed { item: String, witness: Countermodel },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

fn baseline(verifier: &Verifier, item: &Item, lib: &Library) -> Result<Environment, ElicitError> {
    let env = lib.environment_for(item);
    match verifier.check(item, lib, Some(&env))? {
        Verdict::Verified => Ok(env),
        Verdict::Failed(witness) => {
            Err(ElicitError::BaselineFailed { item: item.id.clone(), witness })
        }
    }
}

/// Attachments whose individual detachment makes `item` fail. Issues one
/// baseline check plus one check per applicable attachment.
pub fn direct_needs(verifier: &Verifier, item: &Item, lib: &Library) -> Result<NeedSet, ElicitError> {
    let env = baseline(verifier, item, lib)?;
    let mut needs = NeedSet::new(&item.id, NeedMode::Direct);
    for attachment in &env {
        let detached = env.detach(&attachment.constructor, attachment.property).expect("attachment from env");
        if !verifier.check(item, lib, Some(&detached))?.is_verified() {
            needs.pairs.insert(attachment.clone());
        }
    }
    Ok(needs)
}

/// Greedily detaches attachments in (constructor, property name) order,
/// keeping each detachment that still lets the item verify. The result is
/// locally minimal: the item verifies under it, and under no environment
/// obtained by detaching one more attachment.
///
/// Greedy order matters when properties are interchangeable: with both
/// irreflexivity and asymmetry available for a goal `¬R(a,a)`, asymmetry is
/// tried (and dropped) first, so irreflexivity survives.
pub fn minimize_attachments(verifier: &Verifier, item: &Item, lib: &Library) -> Result<Environment, ElicitError> {
    let mut env = baseline(verifier, item, lib)?;
    let order: Vec<Attachment> = env.iter().cloned().collect();
    for attachment in order {
        let candidate = env.detach(&attachment.constructor, attachment.property).expect("attachment still present");
        if verifier.check(item, lib, Some(&candidate))?.is_verified() {
            env = candidate;
        }
    }
    Ok(env)
}

/// Direct needs of every item, computed in parallel and keyed by item id.
pub fn direct_needs_all(verifier: &Verifier, lib: &Library) -> Result<BTreeMap<String, NeedSet>, ElicitError> {
    let results: Vec<Result<NeedSet, ElicitError>> =
        lib.items.par_iter().map(|item| direct_needs(verifier, item, lib)).collect();
    // First error in item order, independent of scheduling.
    results.into_iter().map(|r| r.map(|n| (n.item.clone(), n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PropertyKind;
    use crate::frontend::parse_library;

    const LIB: &str = "
        (constant a) (constant b) (constant sn) (constant sm)
        (constructor R :kind relation :arity 2)
        (constructor pp :kind relation :arity 2)
        (constructor pf :kind relation :arity 2)
        (constructor ss :kind relation :arity 2)
        (attach R reflexivity)
        (attach R symmetry)
        (attach pp irreflexivity)
        (attach pf reflexivity)
        (attach ss asymmetry)
        (attach ss irreflexivity)
        (item refl :imports (R) :premises () :goal (R a a) :uses ())
        (item trivial :imports (R) :premises ((R a b)) :goal (R a b) :uses ())
        (item prefix :imports (pp pf)
              :premises ((implies (pp sn sm) (pf sn sm)) (implies (pf sn sm) (= sn sm)))
              :goal (not (pp sn sm)) :uses ())
        (item joint :imports (ss) :premises () :goal (not (ss a a)) :uses ())
        (item broken :imports (R) :premises () :goal (R a b) :uses ())";

    fn lib() -> Library {
        parse_library(LIB).unwrap()
    }

    fn pairs(n: &NeedSet) -> Vec<String> {
        n.pairs.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn reflexivity_but_not_symmetry() {
        let lib = lib();
        let n = direct_needs(&Verifier::default(), lib.item("refl").unwrap(), &lib).unwrap();
        assert_eq!(pairs(&n), ["(R reflexivity)"]);
        assert_eq!(n.to_string(), "refl direct (R reflexivity)");
    }

    #[test]
    fn goal_in_premises_needs_nothing() {
        let lib = lib();
        let n = direct_needs(&Verifier::default(), lib.item("trivial").unwrap(), &lib).unwrap();
        assert!(n.pairs.is_empty());
        assert_eq!(n.to_string(), "trivial direct");
    }

    #[test]
    fn proper_prefix_needs_irreflexivity() {
        let lib = lib();
        let v = Verifier::default();
        let item = lib.item("prefix").unwrap();
        assert_eq!(pairs(&direct_needs(&v, item, &lib).unwrap()), ["(pp irreflexivity)"]);
        let min = minimize_attachments(&v, item, &lib).unwrap();
        assert_eq!(min, Environment::new().attach("pp", PropertyKind::Irreflexivity));
    }

    #[test]
    fn interchangeable_properties_are_not_direct_needs() {
        let lib = lib();
        let v = Verifier::default();
        let item = lib.item("joint").unwrap();
        assert!(direct_needs(&v, item, &lib).unwrap().pairs.is_empty());
        let min = minimize_attachments(&v, item, &lib).unwrap();
        assert_eq!(min, Environment::new().attach("ss", PropertyKind::Irreflexivity));
    }

    #[test]
    fn minimize_with_nothing_needed() {
        let lib = lib();
        let min = minimize_attachments(&Verifier::default(), lib.item("trivial").unwrap(), &lib).unwrap();
        assert!(min.is_empty());
    }

    #[test]
    fn baseline_failure_is_an_error() {
        let lib = lib();
        let err = direct_needs(&Verifier::default(), lib.item("broken").unwrap(), &lib).unwrap_err();
        assert!(matches!(err, ElicitError::BaselineFailed { ref item, .. } if item == "broken"));
    }

    #[test]
    fn cost_is_one_plus_applicable_attachments() {
        let lib = lib();
        let v = Verifier::default();
        for id in ["refl", "trivial", "prefix", "joint"] {
            let item = lib.item(id).unwrap();
            v.reset_calls();
            direct_needs(&v, item, &lib).unwrap();
            assert_eq!(v.calls(), 1 + lib.environment_for(item).len(), "{id}");
        }
    }

    #[test]
    fn undetached_attachments_replay_as_verified() {
        let lib = lib();
        let v = Verifier::default();
        for id in ["refl", "trivial", "prefix", "joint"] {
            let item = lib.item(id).unwrap();
            let needs = direct_needs(&v, item, &lib).unwrap();
            let env = lib.environment_for(item);
            for att in &env {
                let detached = env.detach(&att.constructor, att.property).unwrap();
                let verified = v.check(item, &lib, Some(&detached)).unwrap().is_verified();
                assert_eq!(verified, !needs.pairs.contains(att), "{id} {att}");
            }
        }
    }
}
