//! Witness-based satisfiability for guarded sentences in normal form.
//!
//! A candidate certificate is a set `P` of 1-types over the normal-form
//! vocabulary together with, for each type, a pointed model that locally
//! discharges every requirement for tuples through its center. Witness
//! checking is a direct model-checking pass; witness search is a bounded
//! exhaustive search; [`decide::decide_sat`] ties everything together.

mod build;
mod decide;
mod search;
mod shrink;

pub use build::{build_model, BuiltModel};
pub use decide::{decide_sat, verify_certificate, Certificate, CertificateFile, DecideOutcome, SatVerdict, TypeSetStrategy, WitnessFile};
pub use search::{find_p_pi_witness, is_witness_set};
pub use shrink::{shrink_witness, ShrinkReport, ShrinkStage};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normform::{NormalFormSentence, NormFormError};
use crate::structures::{evaluate, Assignment, Elem, OneType, Structure, StructureError};
use crate::syntax::{Atom, Formula, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("witness size bound must be at least 1")]
    InvalidBound,
    #[error("the type is not a member of the candidate set")]
    TypeNotInSet,
    #[error("the structure is not a model of the sentence")]
    NotAModel,
    #[error("no type in the set covers the seed relation {0}")]
    UncoveredSeed(String),
    #[error("no witness recorded for a required type")]
    UncoveredType,
    #[error(transparent)]
    NormForm(#[from] NormFormError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A set of 1-types over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneTypeSet {
    pub vocabulary: Vec<(String, usize)>,
    pub types: BTreeSet<OneType>,
}

impl OneTypeSet {
    pub fn new(vocabulary: &Vocabulary, types: BTreeSet<OneType>) -> Self {
        OneTypeSet {
            vocabulary: vocabulary.symbols().map(|s| (s.name, s.arity)).collect(),
            types,
        }
    }

    pub fn contains(&self, t: &OneType) -> bool {
        self.types.contains(t)
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

/// A pointed structure: a model together with a designated center element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPair {
    pub model: Structure,
    pub center: Elem,
}

/// A requirement instance through the center that lacks a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub req_index: usize,
    pub tuple: Vec<Elem>,
    pub reason: String,
}

/// Assignments of the atom's variables under which the atom holds, in a
/// deterministic order. Repeated variables must match equal elements.
pub(crate) fn atom_assignments(s: &Structure, atom: &Atom) -> Vec<Assignment> {
    let mut out: Vec<Assignment> = Vec::new();
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    'tuples: for tuple in s.tuples(&atom.relation) {
        let mut asg = Assignment::new();
        for (var, elem) in atom.args.iter().zip(tuple) {
            match asg.get(var) {
                None => {
                    asg.insert(var.clone(), elem.clone());
                }
                Some(e) if e == elem => {}
                Some(_) => continue 'tuples,
            }
        }
        let key: Vec<Elem> = atom.args.iter().map(|v| asg[v].clone()).collect();
        if seen.insert(key) {
            out.push(asg);
        }
    }
    out
}

/// The inner formula of an existential requirement:
/// `exists ys. (beta & psi)`, collapsing to `beta & psi` for empty `ys`.
fn existential_inner(req: &crate::normform::ExistentialReq) -> Formula {
    if req.ys.is_empty() {
        Formula::and(Formula::Atom(req.beta.clone()), req.psi.clone())
    } else {
        Formula::exists(req.ys.clone(), req.beta.clone(), req.psi.clone())
    }
}

/// The inner formula of a universal requirement:
/// `forall ys. (gamma -> psi)`, collapsing to `gamma -> psi` for empty `ys`.
fn universal_inner(req: &crate::normform::UniversalReq) -> Formula {
    if req.ys.is_empty() {
        Formula::implies(Formula::Atom(req.gamma.clone()), req.psi.clone())
    } else {
        Formula::forall(req.ys.clone(), req.gamma.clone(), req.psi.clone())
    }
}

/// Checks the witness conditions for `(model, center)` against the type set
/// and center type:
///
/// 1. every element realizes a type from the set;
/// 2. every existential requirement has a witness for every guard-satisfying
///    tuple through the center;
/// 3. every universal requirement holds for every guard-satisfying tuple
///    through the center;
///
/// and additionally the center must realize `pi`, which the model-building
/// construction relies on.
pub fn is_p_pi_witness(
    w: &WitnessPair,
    types: &OneTypeSet,
    pi: &OneType,
    nf: &NormalFormSentence,
) -> Result<(bool, Vec<Defect>), SatError> {
    if !types.contains(pi) {
        return Err(SatError::TypeNotInSet);
    }
    let sigma = &nf.vocabulary;
    let mut defects = Vec::new();

    let center_type = w.model.one_type_over(&w.center, sigma)?;
    if center_type != *pi {
        defects.push(Defect {
            req_index: usize::MAX,
            tuple: vec![w.center.clone()],
            reason: format!("center realizes {center_type} instead of the required type"),
        });
    }
    for e in w.model.domain() {
        let t = w.model.one_type_over(e, sigma)?;
        if !types.contains(&t) {
            defects.push(Defect {
                req_index: usize::MAX,
                tuple: vec![e.clone()],
                reason: format!("element realizes {t}, which is outside the type set"),
            });
        }
    }

    for (i, req) in nf.existential.iter().enumerate() {
        let inner = existential_inner(req);
        for asg in atom_assignments(&w.model, &req.alpha) {
            if !asg.values().any(|e| *e == w.center) {
                continue;
            }
            let holds = evaluate(&w.model, &inner, &asg)
                .map_err(|e| SatError::Eval(e.to_string()))?;
            if !holds {
                defects.push(Defect {
                    req_index: i,
                    tuple: req.xs.iter().map(|v| asg[v].clone()).collect(),
                    reason: "existential requirement lacks a witness".to_string(),
                });
            }
        }
    }

    for (j, req) in nf.universal.iter().enumerate() {
        let inner = universal_inner(req);
        for asg in atom_assignments(&w.model, &req.kappa) {
            if !asg.values().any(|e| *e == w.center) {
                continue;
            }
            let premise = evaluate(&w.model, &req.theta, &asg)
                .map_err(|e| SatError::Eval(e.to_string()))?;
            if !premise {
                continue;
            }
            let holds = evaluate(&w.model, &inner, &asg)
                .map_err(|e| SatError::Eval(e.to_string()))?;
            if !holds {
                defects.push(Defect {
                    req_index: j,
                    tuple: req.xs.iter().map(|v| asg[v].clone()).collect(),
                    reason: "universal requirement fails".to_string(),
                });
            }
        }
    }

    Ok((defects.is_empty(), defects))
}

/// Extracts a certificate from a model: the set of realized 1-types, with
/// the model itself (pointed at a realizing element) as the witness for each
/// type.
pub fn extract_witness_set(
    m: &Structure,
    nf: &NormalFormSentence,
) -> Result<(OneTypeSet, BTreeMap<OneType, WitnessPair>), SatError> {
    let sentence = nf.as_sentence();
    let holds = evaluate(m, &sentence, &Assignment::new())
        .map_err(|e| SatError::Eval(e.to_string()))?;
    if !holds {
        return Err(SatError::NotAModel);
    }
    let sigma = &nf.vocabulary;
    let mut types = BTreeSet::new();
    let mut witnesses = BTreeMap::new();
    for e in m.domain() {
        let t = m.one_type_over(e, sigma)?;
        if types.insert(t.clone()) {
            witnesses.insert(t, WitnessPair { model: m.clone(), center: e.clone() });
        }
    }
    Ok((OneTypeSet::new(sigma, types), witnesses))
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn running_example_witness_passes() {
        let nf = running_nf();
        let model = running_model();
        let types = OneTypeSet::new(
            &nf.vocabulary,
            [p_type()].into_iter().collect(),
        );
        let w = WitnessPair { model, center: Elem::new("a") };
        let (ok, defects) = is_p_pi_witness(&w, &types, &p_type(), &nf).unwrap();
        assert!(ok, "unexpected defects: {defects:?}");
    }

    #[test]
    fn missing_back_edge_is_a_defect() {
        let nf = running_nf();
        let mut model = running_model();
        model.remove_tuple("R", &[Elem::new("b"), Elem::new("a")]);
        let types = OneTypeSet::new(&nf.vocabulary, [p_type()].into_iter().collect());
        let w = WitnessPair { model, center: Elem::new("b") };
        let (ok, defects) = is_p_pi_witness(&w, &types, &p_type(), &nf).unwrap();
        assert!(!ok);
        assert!(defects.iter().any(|d| d.req_index == 0));
    }

    #[test]
    fn type_outside_the_set_is_rejected() {
        let nf = running_nf();
        let model = Structure::from_json(
            r#"{"domain": ["a"], "relations": {"P": [["a"]], "R": []},
                "arities": {"R": 2}}"#,
        )
        .unwrap();
        let empty_type = OneType::empty();
        let types = OneTypeSet::new(&nf.vocabulary, [empty_type].into_iter().collect());
        let w = WitnessPair { model, center: Elem::new("a") };
        // the center's type (P) is outside the candidate set
        let err = is_p_pi_witness(&w, &types, &p_type(), &nf).unwrap_err();
        assert_eq!(err, SatError::TypeNotInSet);
        let (ok, defects) =
            is_p_pi_witness(&w, &types, &OneType::empty(), &nf).unwrap();
        assert!(!ok);
        assert!(defects.iter().any(|d| d.reason.contains("outside the type set")));
    }

    #[test]
    fn extraction_from_a_model_yields_realized_types() {
        let nf = running_nf();
        let model = running_model();
        let (types, witnesses) = extract_witness_set(&model, &nf).unwrap();
        assert_eq!(types.len(), 1);
        assert!(types.contains(&p_type()));
        assert_eq!(witnesses.len(), 1);

        let mut broken = running_model();
        broken.remove_tuple("R", &[Elem::new("a"), Elem::new("b")]);
        assert_eq!(extract_witness_set(&broken, &nf).unwrap_err(), SatError::NotAModel);
    }
}
