//! Model construction from a witness set.
//!
//! Stage 1 places one seed element per seed conjunct, realizing a covering
//! type. Each later stage attaches to every element added in the previous
//! stage a disjoint copy of its type's witness model minus the center,
//! copying the relation tuples through the center and the loops of the
//! copied elements; everything else defaults to false. Attachment is only
//! needed for the previous stage's elements: the set of tuples through an
//! element never changes after the stage following its creation.
//!
//! In the truncated result all universal requirements hold globally, and
//! the existential requirements hold for every guard tuple that stays
//! within the next-to-last stage.

use std::collections::{BTreeMap, BTreeSet};

use crate::normform::NormalFormSentence;
use crate::structures::{Elem, OneType, Structure};

use super::{OneTypeSet, SatError, WitnessPair};

/// The constructed model together with the domain of each stage.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub structure: Structure,
    /// `stages[k]` is the domain after stage `k + 1`.
    pub stages: Vec<BTreeSet<Elem>>,
}

pub fn build_model(
    types: &OneTypeSet,
    witnesses: &BTreeMap<OneType, WitnessPair>,
    nf: &NormalFormSentence,
    depth: usize,
) -> Result<BuiltModel, SatError> {
    if depth == 0 {
        return Err(SatError::InvalidBound);
    }
    let sigma = &nf.vocabulary;
    let mut assigned: BTreeMap<Elem, OneType> = BTreeMap::new();
    let mut tuples: Vec<(String, Vec<Elem>)> = Vec::new();
    let mut counter = 0usize;

    let mut frontier: Vec<Elem> = Vec::new();
    for (i, seed) in nf.seeds.iter().enumerate() {
        let pi = types
            .types
            .iter()
            .find(|t| t.contains(&seed.lambda))
            .ok_or_else(|| SatError::UncoveredSeed(seed.lambda.clone()))?;
        let elem = Elem::new(format!("s{}", i + 1));
        for sym in sigma.symbols() {
            if pi.contains(&sym.name) {
                tuples.push((sym.name.clone(), vec![elem.clone(); sym.arity]));
            }
        }
        assigned.insert(elem.clone(), pi.clone());
        frontier.push(elem);
    }
    let mut stages: Vec<BTreeSet<Elem>> = vec![assigned.keys().cloned().collect()];

    for _stage in 2..=depth {
        let mut next_frontier = Vec::new();
        for a in &frontier {
            let pi = assigned[a].clone();
            let witness = witnesses.get(&pi).ok_or(SatError::UncoveredType)?;
            let mut map: BTreeMap<Elem, Elem> = BTreeMap::new();
            map.insert(witness.center.clone(), a.clone());
            for w in witness.model.domain() {
                if *w == witness.center {
                    continue;
                }
                counter += 1;
                let fresh = Elem::new(format!("e{counter}"));
                assigned.insert(fresh.clone(), witness.model.one_type_over(w, sigma)?);
                map.insert(w.clone(), fresh.clone());
                next_frontier.push(fresh);
            }
            for sym in sigma.symbols() {
                for t in witness.model.tuples(&sym.name) {
                    let through_center = t.contains(&witness.center);
                    let distinct: BTreeSet<&Elem> = t.iter().collect();
                    // tuples through the center are copied; pure-copy tuples
                    // contribute only their loops (the copied 1-types)
                    if through_center || distinct.len() == 1 {
                        let mapped: Vec<Elem> =
                            t.iter().map(|e| map[e].clone()).collect();
                        tuples.push((sym.name.clone(), mapped));
                    }
                }
            }
        }
        frontier = next_frontier;
        stages.push(assigned.keys().cloned().collect());
    }

    let mut structure = Structure::new(sigma.clone(), assigned.keys().cloned())?;
    for (rel, t) in tuples {
        structure.add_tuple(&rel, t)?;
    }
    Ok(BuiltModel { structure, stages })
}
