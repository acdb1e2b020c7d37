//! Witness shrinking by demand-driven unfolding.
//!
//! Starting from a single center element, each stage lists the requirement
//! instances through the center that lack a witness in the current model
//! (the defects), maps each defect to the input witness through the running
//! element correspondence, imports the elements of a witness there, and
//! copies the atoms over the combined element set. Imports are keyed by
//! their source element, so the shrunk model embeds into the input model
//! and is never larger. Max-arity many stages suffice: a defect's element
//! set strictly grows along repair chains, because an element set whose
//! atoms are fully copied inherits its witnesses from the source model.
//! The result is re-verified before being returned.

use std::collections::{BTreeMap, BTreeSet};

use crate::normform::NormalFormSentence;
use crate::structures::{evaluate, Assignment, Elem, Structure};

use super::{atom_assignments, existential_inner, is_p_pi_witness, Defect, OneTypeSet, SatError, WitnessPair};
use crate::structures::OneType;

/// One stage of the shrinking run: the model at the start of the stage and
/// the defects repaired during it.
#[derive(Debug, Clone)]
pub struct ShrinkStage {
    pub snapshot: Structure,
    pub defects: Vec<Defect>,
}

#[derive(Debug, Clone)]
pub struct ShrinkReport {
    pub result: WitnessPair,
    pub stages: Vec<ShrinkStage>,
}

struct Shrinker<'a> {
    source: &'a Structure,
    nf: &'a NormalFormSentence,
    /// shrunk-model element -> source element; injective.
    shadow: BTreeMap<Elem, Elem>,
    /// source element -> shrunk-model element.
    imported: BTreeMap<Elem, Elem>,
    elements: BTreeSet<Elem>,
    tuples: BTreeSet<(String, Vec<Elem>)>,
    counter: usize,
}

impl<'a> Shrinker<'a> {
    fn structure(&self) -> Structure {
        let mut s = Structure::new(self.nf.vocabulary.clone(), self.elements.iter().cloned())
            .expect("nonempty domain");
        for (rel, t) in &self.tuples {
            s.add_tuple(rel, t.clone()).expect("tuple over the domain");
        }
        s
    }

    /// Imports a source element, reusing the existing copy when the element
    /// was imported before.
    fn import(&mut self, source_elem: &Elem) -> Elem {
        if let Some(e) = self.imported.get(source_elem) {
            return e.clone();
        }
        self.counter += 1;
        let fresh = Elem::new(format!("w{}", self.counter));
        self.imported.insert(source_elem.clone(), fresh.clone());
        self.shadow.insert(fresh.clone(), source_elem.clone());
        self.elements.insert(fresh.clone());
        // copy the 1-type
        for sym in self.nf.vocabulary.symbols() {
            let loop_tuple = vec![source_elem.clone(); sym.arity];
            if self.source.contains_tuple(&sym.name, &loop_tuple) {
                self.tuples
                    .insert((sym.name.clone(), vec![fresh.clone(); sym.arity]));
            }
        }
        fresh
    }

    /// Copies every source atom over exactly the given source element set,
    /// mapped through the import table.
    fn copy_full_set_atoms(&mut self, source_set: &BTreeSet<Elem>) {
        for sym in self.nf.vocabulary.symbols() {
            for t in self.source.tuples(&sym.name) {
                let t_set: BTreeSet<Elem> = t.iter().cloned().collect();
                if t_set == *source_set {
                    let mapped: Vec<Elem> =
                        t.iter().map(|e| self.imported[e].clone()).collect();
                    self.tuples.insert((sym.name.clone(), mapped));
                }
            }
        }
    }

    /// Repairs one defect: finds a witness for the shadow tuple in the
    /// source model, imports its elements, and copies the atoms over the
    /// combined set.
    fn repair(&mut self, req_index: usize, asg: &Assignment) -> Result<(), SatError> {
        let req = &self.nf.existential[req_index];
        let mut source_asg = Assignment::new();
        for (v, e) in asg {
            source_asg.insert(v.clone(), self.shadow[e].clone());
        }
        // find the first witness assignment in the source model
        let witness_asg = find_witness_assignment(self.source, req, &source_asg)?
            .ok_or_else(|| {
                SatError::Internal(
                    "source model lacks a witness for a shadowed defect".to_string(),
                )
            })?;
        let mut combined: BTreeSet<Elem> =
            source_asg.values().cloned().collect();
        for v in &req.ys {
            combined.insert(witness_asg[v].clone());
        }
        for e in combined.clone() {
            self.import(&e);
        }
        self.copy_full_set_atoms(&combined);
        Ok(())
    }
}

/// The first extension of `asg` with values for `req.ys` that satisfies
/// `beta & psi` in `s`, in a deterministic order.
fn find_witness_assignment(
    s: &Structure,
    req: &crate::normform::ExistentialReq,
    asg: &Assignment,
) -> Result<Option<Assignment>, SatError> {
    let elems: Vec<Elem> = s.domain().cloned().collect();
    let mut stack = vec![asg.clone()];
    for v in &req.ys {
        let mut next = Vec::with_capacity(stack.len() * elems.len());
        for partial in &stack {
            for e in &elems {
                let mut ext = partial.clone();
                ext.insert(v.clone(), e.clone());
                next.push(ext);
            }
        }
        stack = next;
    }
    let goal = crate::syntax::Formula::and(
        crate::syntax::Formula::Atom(req.beta.clone()),
        req.psi.clone(),
    );
    for candidate in stack {
        if evaluate(s, &goal, &candidate).map_err(|e| SatError::Eval(e.to_string()))? {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Shrinks a verified witness pair. The result realizes the same center
/// type, passes the witness conditions, and is never larger than the input
/// model. Runs max-arity many defect-repair stages.
pub fn shrink_witness(
    w: &WitnessPair,
    types: &OneTypeSet,
    pi: &OneType,
    nf: &NormalFormSentence,
) -> Result<ShrinkReport, SatError> {
    let (ok, defects) = is_p_pi_witness(w, types, pi, nf)?;
    if !ok {
        return Err(SatError::Internal(format!(
            "input witness fails the conditions: {defects:?}"
        )));
    }
    let center = Elem::new("c");
    let mut shrinker = Shrinker {
        source: &w.model,
        nf,
        shadow: [(center.clone(), w.center.clone())].into_iter().collect(),
        imported: [(w.center.clone(), center.clone())].into_iter().collect(),
        elements: [center.clone()].into_iter().collect(),
        tuples: BTreeSet::new(),
        counter: 0,
    };
    for sym in nf.vocabulary.symbols() {
        if pi.contains(&sym.name) {
            shrinker
                .tuples
                .insert((sym.name.clone(), vec![center.clone(); sym.arity]));
        }
    }

    let max_arity = nf.vocabulary.max_arity().max(1);
    let mut stages = Vec::new();
    for _stage in 1..=max_arity {
        let snapshot = shrinker.structure();
        let mut stage_defects = Vec::new();
        for (i, req) in nf.existential.iter().enumerate() {
            let inner = existential_inner(req);
            for asg in atom_assignments(&snapshot, &req.alpha) {
                if !asg.values().any(|e| *e == center) {
                    continue;
                }
                // re-check against the current model: an earlier repair in
                // this stage may already have fixed this instance
                let current = shrinker.structure();
                let holds = evaluate(&current, &inner, &asg)
                    .map_err(|e| SatError::Eval(e.to_string()))?;
                if holds {
                    continue;
                }
                stage_defects.push(Defect {
                    req_index: i,
                    tuple: req.xs.iter().map(|v| asg[v].clone()).collect(),
                    reason: "missing witness".to_string(),
                });
                shrinker.repair(i, &asg)?;
            }
        }
        stages.push(ShrinkStage { snapshot, defects: stage_defects });
    }

    let result = WitnessPair { model: shrinker.structure(), center };
    let (ok, defects) = is_p_pi_witness(&result, types, pi, nf)?;
    if !ok {
        return Err(SatError::Internal(format!(
            "shrunk witness fails re-verification: {defects:?}"
        )));
    }
    if result.model.size() > w.model.size() {
        return Err(SatError::Internal(
            "shrunk witness is larger than the input".to_string(),
        ));
    }
    Ok(ShrinkReport { result, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::search::find_p_pi_witness;
    use crate::sat::test_support::{p_type, running_nf};

    #[test]
    fn minimal_witness_stays_minimal() {
        let nf = crate::normform::is_normal_form(
            &crate::syntax::parse(
                "exists z. P(z) & forall x. (Q(x) -> exists y. (R(x,y) & P(y))) \
                 & forall x. (P(x) -> (true -> forall y. (R(x,y) -> true)))",
            )
            .unwrap(),
        )
        .unwrap();
        // no Q anywhere, so the existential requirement is vacuous
        let model = Structure::from_json(
            r#"{"domain": ["a"], "relations": {"P": [["a"]]},
                "arities": {"Q": 1, "R": 2}}"#,
        )
        .unwrap();
        let types = OneTypeSet::new(&nf.vocabulary, [p_type()].into_iter().collect());
        let w = WitnessPair { model, center: Elem::new("a") };
        let report = shrink_witness(&w, &types, &p_type(), &nf).unwrap();
        assert_eq!(report.result.model.size(), 1);
    }

    #[test]
    fn padding_is_dropped() {
        let nf = running_nf();
        let types = OneTypeSet::new(&nf.vocabulary, [p_type()].into_iter().collect());
        let base = find_p_pi_witness(&types, &p_type(), &nf, 2).unwrap().unwrap();
        // pad with isolated elements realizing a type from the set
        let mut file = crate::structures::StructureFile::from_structure(&base.model);
        for i in 0..5 {
            let id = format!("pad{i}");
            file.domain.push(id.clone());
            file.relations.get_mut("P").unwrap().push(vec![id]);
        }
        let padded = WitnessPair {
            model: file.into_structure().unwrap(),
            center: base.center.clone(),
        };
        let (ok, _) = is_p_pi_witness(&padded, &types, &p_type(), &nf).unwrap();
        assert!(ok, "padded witness must still verify");
        let report = shrink_witness(&padded, &types, &p_type(), &nf).unwrap();
        assert!(report.result.model.size() <= base.model.size());
        assert!(report.result.model.size() < padded.model.size());
    }

    #[test]
    fn rejects_a_non_witness() {
        let nf = running_nf();
        let types = OneTypeSet::new(&nf.vocabulary, [p_type()].into_iter().collect());
        let model = Structure::from_json(
            r#"{"domain": ["a"], "relations": {"P": [["a"]], "R": []},
                "arities": {"R": 2}}"#,
        )
        .unwrap();
        let w = WitnessPair { model, center: Elem::new("a") };
        assert!(shrink_witness(&w, &types, &p_type(), &nf).is_err());
    }
}
