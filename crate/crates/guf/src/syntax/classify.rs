//! Fragment classification: guardedness, one-dimensionality and uniformity.
//!
//! All three checks run on the universal-free form of the input (universal
//! blocks are rewritten to negated existential blocks first), which is the
//! form the grammar definitions speak about.

use std::collections::BTreeSet;

use serde::Serialize;

use super::ast::{Formula, Var};
use super::print::print;

/// Why a subformula keeps the input out of a fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A quantifier block without an atomic guard covering its variables.
    Unguarded,
    /// A quantifier block with two or more free variables.
    NotOneDimensional,
    /// A subformula that is not a boolean combination of relative X-atoms
    /// for X its free-variable set.
    NotUniform,
}

/// Classification outcome together with the offending subformulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    pub guarded: bool,
    pub one_dimensional: bool,
    pub uniform: bool,
    /// Offending subformulas, pretty-printed, with the rule each violates.
    pub offending: Vec<(String, Violation)>,
}

impl FragmentReport {
    /// Guarded, uniform and one-dimensional.
    pub fn in_guf1(&self) -> bool {
        self.guarded && self.one_dimensional && self.uniform
    }

    /// Guarded and uniform.
    pub fn in_ugf(&self) -> bool {
        self.guarded && self.uniform
    }
}

/// A relative X-atom: a sentence, a formula with one free variable from X,
/// an equality over X, an atom whose variable set is exactly X, or a guarded
/// block whose free-variable set is exactly X.
pub fn is_relative_atom(f: &Formula, x: &BTreeSet<Var>) -> bool {
    let free = f.free_variables();
    if free.is_empty() {
        return true;
    }
    if free.len() == 1 && free.iter().all(|v| x.contains(v)) {
        return true;
    }
    match f {
        Formula::Eq(a, b) => x.contains(a) && x.contains(b),
        Formula::Atom(a) => a.variables() == *x,
        Formula::Exists(_) => free == *x,
        _ => false,
    }
}

/// A boolean combination of relative X-atoms, for a fixed X.
fn is_boolean_combination_of_relative_atoms(f: &Formula, x: &BTreeSet<Var>) -> bool {
    if is_relative_atom(f, x) {
        return true;
    }
    match f {
        Formula::True | Formula::False => true,
        Formula::Not(g) => is_boolean_combination_of_relative_atoms(g, x),
        Formula::And(l, r) | Formula::Or(l, r) => {
            is_boolean_combination_of_relative_atoms(l, x)
                && is_boolean_combination_of_relative_atoms(r, x)
        }
        _ => false,
    }
}

/// True when every quantifier block of `f` has at most one free variable.
/// Returns the first offending subformula otherwise.
pub fn is_one_dimensional(f: &Formula) -> (bool, Option<Formula>) {
    for sub in f.subformulas() {
        let block = matches!(
            sub,
            Formula::Exists(_) | Formula::RawExists(_, _)
        );
        if block && sub.free_variables().len() > 1 {
            return (false, Some(sub));
        }
    }
    (true, None)
}

/// True when every subformula of `f` is a boolean combination of relative
/// X-atoms, X its free-variable set. Returns the first offender otherwise.
pub fn is_uniform(f: &Formula) -> (bool, Option<Formula>) {
    for sub in f.subformulas() {
        let x = sub.free_variables();
        if !is_boolean_combination_of_relative_atoms(&sub, &x) {
            return (false, Some(sub));
        }
    }
    (true, None)
}

/// Combines guardedness, one-dimensionality and uniformity into one report.
/// Total on well-formed input, including formulas outside the guarded
/// grammar (raw quantifier blocks).
pub fn classify(f: &Formula) -> FragmentReport {
    let mut offending = Vec::new();
    let desugared = f.desugar_foralls();
    let guarded = f.is_guarded();
    if !guarded {
        for sub in desugared.subformulas() {
            if matches!(sub, Formula::RawExists(_, _)) {
                offending.push((print(&sub), Violation::Unguarded));
            }
        }
    }
    let (one_dimensional, od_witness) = is_one_dimensional(f);
    if let Some(w) = od_witness {
        offending.push((print(&w), Violation::NotOneDimensional));
    }
    let (uniform, u_witness) = is_uniform(f);
    if let Some(w) = u_witness {
        offending.push((print(&w), Violation::NotUniform));
    }
    FragmentReport { guarded, one_dimensional, uniform, offending }
}
