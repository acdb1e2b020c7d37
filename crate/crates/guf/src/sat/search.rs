//! Bounded witness search.
//!
//! The search for a `(P, pi)`-witness of size at most `k` grounds the
//! witness conditions over the domain `{1..k}` with element 1 as the
//! center and runs the exhaustive backtracking solver. By symmetry the
//! center can be fixed: any witness relabels to one centered at the first
//! element. Sizes are tried in increasing order, so the first witness found
//! is size-minimal; within a size the solver's branching order is
//! deterministic. Every witness found is re-verified with the independent
//! condition checker before being returned.

use std::collections::BTreeMap;

use crate::normform::NormalFormSentence;
use crate::structures::solver::{solve, GTask, Grounder};
use crate::structures::{Elem, OneType};
use crate::syntax::{Formula, Var};

use super::{is_p_pi_witness, OneTypeSet, SatError, WitnessPair};

fn center_type_tasks(grounder: &Grounder, pi: &OneType) -> Vec<GTask> {
    grounder
        .vocab
        .symbols()
        .map(|sym| {
            let tuple = vec![0usize; sym.arity];
            grounder.lit(&sym.name, &tuple, pi.contains(&sym.name))
        })
        .collect()
}

fn element_type_task(grounder: &Grounder, types: &OneTypeSet, elem: usize) -> GTask {
    let alternatives = types
        .types
        .iter()
        .map(|t| {
            GTask::Split(
                grounder
                    .vocab
                    .symbols()
                    .map(|sym| {
                        let tuple = vec![elem; sym.arity];
                        grounder.lit(&sym.name, &tuple, t.contains(&sym.name))
                    })
                    .collect(),
            )
        })
        .collect();
    GTask::Branch(alternatives)
}

/// All assignments of `vars` to element indices `0..size` whose image
/// contains the center element 0.
fn center_assignments(vars: &[Var], size: usize) -> Vec<BTreeMap<Var, usize>> {
    let mut out: Vec<BTreeMap<Var, usize>> = vec![BTreeMap::new()];
    for v in vars {
        let mut next = Vec::with_capacity(out.len() * size);
        for partial in &out {
            for e in 0..size {
                let mut ext = partial.clone();
                ext.insert(v.clone(), e);
                next.push(ext);
            }
        }
        out = next;
    }
    out.retain(|asg| asg.values().any(|&e| e == 0));
    out
}

/// Searches for a `(P, pi)`-witness among structures of size at most
/// `size_bound` whose 1-types all lie in the type set, paired with a center
/// of type `pi`. Returns the first witness in the search order, or `None`
/// when the whole space is exhausted.
pub fn find_p_pi_witness(
    types: &OneTypeSet,
    pi: &OneType,
    nf: &NormalFormSentence,
    size_bound: usize,
) -> Result<Option<WitnessPair>, SatError> {
    if size_bound == 0 {
        return Err(SatError::InvalidBound);
    }
    if !types.contains(pi) {
        return Err(SatError::TypeNotInSet);
    }
    let sigma = &nf.vocabulary;
    for size in 1..=size_bound {
        let grounder = Grounder::new(sigma, size);
        let mut tasks = center_type_tasks(&grounder, pi);
        for elem in 1..size {
            tasks.push(element_type_task(&grounder, types, elem));
        }
        for req in &nf.existential {
            let obligation = Formula::implies(
                Formula::Atom(req.alpha.clone()),
                super::existential_inner(req),
            );
            for asg in center_assignments(&req.xs, size) {
                tasks.push(grounder.ground(&obligation, &asg, true));
            }
        }
        for req in &nf.universal {
            let obligation = Formula::implies(
                Formula::Atom(req.kappa.clone()),
                Formula::implies(req.theta.clone(), super::universal_inner(req)),
            );
            for asg in center_assignments(&req.xs, size) {
                tasks.push(grounder.ground(&obligation, &asg, true));
            }
        }
        if let Some(assignment) = solve(&grounder, tasks) {
            let witness = WitnessPair {
                model: grounder.structure(&assignment),
                center: Elem::new("1"),
            };
            let (ok, defects) = is_p_pi_witness(&witness, types, pi, nf)?;
            if !ok {
                return Err(SatError::Internal(format!(
                    "witness candidate fails re-verification: {defects:?}"
                )));
            }
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Whether the type set is a certificate: every seed relation is covered by
/// some type, and every type has a witness within the size bound.
pub fn is_witness_set(
    types: &OneTypeSet,
    nf: &NormalFormSentence,
    size_bound: usize,
) -> Result<bool, SatError> {
    for seed in &nf.seeds {
        if !types.types.iter().any(|t| t.contains(&seed.lambda)) {
            return Ok(false);
        }
    }
    for pi in &types.types {
        if find_p_pi_witness(types, pi, nf, size_bound)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normform::is_normal_form;
    use crate::sat::test_support::{p_type, running_nf};
    use crate::syntax::parse;
    use std::collections::BTreeSet;

    fn type_set(nf: &NormalFormSentence, types: &[OneType]) -> OneTypeSet {
        OneTypeSet::new(&nf.vocabulary, types.iter().cloned().collect())
    }

    #[test]
    fn finds_the_running_example_witness_within_two_elements() {
        let nf = running_nf();
        let types = type_set(&nf, &[p_type()]);
        let w = find_p_pi_witness(&types, &p_type(), &nf, 2)
            .unwrap()
            .expect("a witness exists at size 2");
        assert!(w.model.size() <= 2);
        let (ok, _) = is_p_pi_witness(&w, &types, &p_type(), &nf).unwrap();
        assert!(ok);
    }

    #[test]
    fn unsatisfiable_requirements_exhaust_the_search() {
        // a successor is demanded but every edge is forbidden
        let f = parse(
            "exists z. P(z) & forall x. (P(x) -> exists y. (R(x,y) & P(y))) \
             & forall x. (P(x) -> (true -> forall y. (R(x,y) -> false)))",
        )
        .unwrap();
        let nf = is_normal_form(&f).unwrap();
        let types = type_set(&nf, &[p_type()]);
        for bound in 1..=3 {
            assert!(find_p_pi_witness(&types, &p_type(), &nf, bound)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn zero_bound_is_rejected() {
        let nf = running_nf();
        let types = type_set(&nf, &[p_type()]);
        assert_eq!(
            find_p_pi_witness(&types, &p_type(), &nf, 0).unwrap_err(),
            SatError::InvalidBound
        );
    }

    #[test]
    fn witness_set_conditions() {
        let nf = running_nf();
        // the singleton {P} set is a witness set at bound 2
        assert!(is_witness_set(&type_set(&nf, &[p_type()]), &nf, 2).unwrap());
        // a set without any seed-covering type fails the first condition
        let no_seed = type_set(&nf, &[OneType::empty()]);
        assert!(!is_witness_set(&no_seed, &nf, 2).unwrap());
        // adding an unwitnessable type fails the second condition
        let r_loop = OneType {
            positive: ["P".to_string(), "R".to_string()].into_iter().collect(),
        };
        let f = parse(
            "exists z. P(z) & forall x. (P(x) -> exists y. (R(x,y) & P(y))) \
             & forall x. (R(x,x) -> (true -> forall y. (R(x,y) -> false)))",
        )
        .unwrap();
        let nf2 = is_normal_form(&f).unwrap();
        let with_bad: BTreeSet<OneType> = [p_type(), r_loop].into_iter().collect();
        let with_bad = OneTypeSet::new(&nf2.vocabulary, with_bad);
        assert!(!is_witness_set(&with_bad, &nf2, 2).unwrap());
    }
}
