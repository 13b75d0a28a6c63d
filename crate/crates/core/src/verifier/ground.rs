//! Term universes, one-round schema instantiation, and the ground problem
//! both decision routes consume.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{Atom, Environment, Formula, Term};

use super::{Problem, VerifyError};

/// Ground terms of a problem, closed under subterms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermUniverse {
    pub terms: BTreeSet<Term>,
}

/// Every subterm of the premises and goal. Terms later created by
/// instantiating function schemas are not included.
pub fn term_universe(problem: &Problem) -> TermUniverse {
    let mut terms = BTreeSet::new();
    for f in problem.premises.iter().chain(std::iter::once(&problem.goal)) {
        f.collect_subterms(&mut terms);
    }
    TermUniverse { terms }
}

/// Number of instances [`instantiate_axioms`] would generate before
/// normalization.
pub fn instance_count(env: &Environment, universe: &TermUniverse) -> usize {
    let n = universe.terms.len();
    env.iter()
        .map(|a| match a.property.schema().bound.len() {
            1 => n,
            _ => n.saturating_mul(n),
        })
        .fold(0usize, usize::saturating_add)
}

/// Instantiates the schema of every attachment once over the universe:
/// one-variable schemas at each term, two-variable schemas at each ordered
/// pair. Equations are oriented by printed form; duplicates and `t = t`
/// instances are dropped.
pub fn instantiate_axioms(
    env: &Environment,
    universe: &TermUniverse,
    budget: usize,
) -> Result<BTreeSet<Formula>, VerifyError> {
    let count = instance_count(env, universe);
    if count > budget {
        return Err(VerifyError::BudgetExceeded { count, budget });
    }
    let mut out = BTreeSet::new();
    for attachment in env {
        let schema = attachment.property.schema();
        let mut emit = |terms: &[Term]| {
            let instance = orient(&schema.instantiate(&attachment.constructor, terms));
            if !matches!(&instance, Formula::Atom(a) if a.is_trivial_identity()) {
                out.insert(instance);
            }
        };
        for t1 in &universe.terms {
            if schema.bound.len() == 1 {
                emit(std::slice::from_ref(t1));
            } else {
                for t2 in &universe.terms {
                    emit(&[t1.clone(), t2.clone()]);
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn orient(f: &Formula) -> Formula {
    f.map_atoms(&mut |a| a.clone().oriented())
}

/// A problem after instantiation: formulas with oriented equations, the
/// atoms they mention sorted by printed form, and every term occurring in
/// them (subterm-closed), also sorted by printed form.
#[derive(Clone, Debug)]
pub struct Grounding {
    pub premises: Vec<Formula>,
    pub axioms: Vec<Formula>,
    pub goal: Formula,
    pub atoms: Vec<Atom>,
    pub terms: Vec<Term>,
}

impl Grounding {
    pub fn new(problem: &Problem, budget: usize) -> Result<Grounding, VerifyError> {
        let universe = term_universe(problem);
        let axioms: Vec<Formula> = instantiate_axioms(&problem.env, &universe, budget)?.into_iter().collect();
        let premises: Vec<Formula> = problem.premises.iter().map(orient).collect();
        let goal = orient(&problem.goal);

        let mut atoms = BTreeSet::new();
        let mut terms = BTreeSet::new();
        for f in premises.iter().chain(&axioms).chain(std::iter::once(&goal)) {
            f.for_each_atom(&mut |a| {
                atoms.insert(a.clone());
            });
            f.collect_subterms(&mut terms);
        }
        Ok(Grounding {
            premises,
            axioms,
            goal,
            atoms: sorted_by_print(atoms),
            terms: sorted_by_print(terms),
        })
    }

    /// Premises, axioms and the negated goal: unsatisfiable iff the goal
    /// follows.
    pub fn refutation_set(&self) -> Vec<Formula> {
        let mut out = self.premises.clone();
        out.extend(self.axioms.iter().cloned());
        out.push(Formula::not(self.goal.clone()));
        out
    }

    pub fn atom_index(&self) -> HashMap<&Atom, usize> {
        self.atoms.iter().enumerate().map(|(i, a)| (a, i)).collect()
    }

    pub fn term_index(&self) -> HashMap<&Term, usize> {
        self.terms.iter().enumerate().map(|(i, t)| (t, i)).collect()
    }
}

fn sorted_by_print<T: ToString>(items: BTreeSet<T>) -> Vec<T> {
    let mut keyed: Vec<(String, T)> = items.into_iter().map(|x| (x.to_string(), x)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, x)| x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PropertyKind;

    fn c(name: &str) -> Term {
        Term::constant(name)
    }

    fn printed<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
        let mut v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
        v.sort();
        v
    }

    fn problem(premises: Vec<Formula>, goal: Formula) -> Problem {
        Problem { premises, goal, env: Environment::new() }
    }

    #[test]
    fn universe_of_relation_problem() {
        let p = problem(
            vec![Atom::rel("R", vec![Term::app("f", vec![c("a")]), c("b")]).into()],
            Atom::rel("R", vec![c("a"), c("b")]).into(),
        );
        assert_eq!(printed(&term_universe(&p).terms), ["(f a)", "a", "b"]);
    }

    #[test]
    fn universe_of_reflexive_equation() {
        let p = problem(vec![], Atom::eq(c("a"), c("a")).into());
        assert_eq!(printed(&term_universe(&p).terms), ["a"]);
    }

    #[test]
    fn universe_of_binary_function_equation() {
        let p = problem(
            vec![Atom::eq(Term::app("g", vec![c("a"), c("b")]), c("c")).into()],
            Atom::eq(c("a"), c("a")).into(),
        );
        assert_eq!(printed(&term_universe(&p).terms), ["(g a b)", "a", "b", "c"]);
    }

    fn universe(names: &[&str]) -> TermUniverse {
        TermUniverse { terms: names.iter().map(|n| c(n)).collect() }
    }

    #[test]
    fn irreflexivity_instance() {
        let env = Environment::new().attach("R", PropertyKind::Irreflexivity);
        let out = instantiate_axioms(&env, &universe(&["a"]), 100).unwrap();
        assert_eq!(printed(&out), ["(not (R a a))"]);
    }

    #[test]
    fn projectivity_instance() {
        let env = Environment::new().attach("f", PropertyKind::Projectivity);
        let out = instantiate_axioms(&env, &universe(&["a"]), 100).unwrap();
        assert_eq!(printed(&out), ["(= (f (f a)) (f a))"]);
    }

    #[test]
    fn commutativity_instances_are_normalized() {
        // Over {a, b}: (a,a) and (b,b) give identities, (a,b) and (b,a)
        // give the same oriented equation.
        let env = Environment::new().attach("g", PropertyKind::Commutativity);
        let out = instantiate_axioms(&env, &universe(&["a", "b"]), 100).unwrap();
        assert_eq!(printed(&out), ["(= (g a b) (g b a))"]);
    }

    #[test]
    fn relation_pairs_are_all_kept() {
        let env = Environment::new().attach("R", PropertyKind::Symmetry);
        let out = instantiate_axioms(&env, &universe(&["a", "b"]), 100).unwrap();
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let env = Environment::new().attach("R", PropertyKind::Connectedness);
        let err = instantiate_axioms(&env, &universe(&["a", "b", "c"]), 8).unwrap_err();
        assert_eq!(err, VerifyError::BudgetExceeded { count: 9, budget: 8 });
        assert!(instantiate_axioms(&env, &universe(&["a", "b", "c"]), 9).is_ok());
    }

    #[test]
    fn grounding_adds_instantiated_terms_but_not_to_the_universe() {
        let p = Problem {
            premises: vec![],
            goal: Atom::eq(Term::app("f", vec![c("a")]), c("a")).into(),
            env: Environment::new().attach("f", PropertyKind::Involutiveness),
        };
        assert_eq!(printed(&term_universe(&p).terms), ["(f a)", "a"]);
        let g = Grounding::new(&p, 100).unwrap();
        assert_eq!(printed(&g.terms), ["(f (f (f a)))", "(f (f a))", "(f a)", "a"]);
        assert_eq!(printed(&g.axioms), ["(= (f (f (f a))) (f a))", "(= (f (f a)) a)"]);
    }
}
