//! The amalgam of two bisimilar structures over overlapping vocabularies.
//!
//! Given a shared-vocabulary bisimulation `Z` between a `sigma`-structure
//! and a `tau`-structure, the amalgam lives over the union vocabulary on
//! the universe of `Z`-related element pairs. Shared relations hold of a
//! paired tuple exactly when the left tuple holds and the pair of tuples is
//! in `Z`; private relations additionally admit good pairings of non-live
//! tuples. The projections onto the two factors are bisimulations again,
//! which is verified at runtime by [`check_lemma2`] and [`check_lemma3`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bisim::{is_uniform_partial_iso, BisimulationSet, PartialMap};
use crate::structures::{Elem, Structure, StructureError};
use crate::syntax::{Vocabulary, VocabularyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("the universe of the amalgam is empty")]
    EmptyUniverse,
    #[error("the given map set is not a bisimulation: {0}")]
    NotABisimulation(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error("bisimulation error: {0}")]
    Bisim(String),
}

/// A tuple of the amalgam presented as its two component tuples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairedTuple {
    pub left: Vec<Elem>,
    pub right: Vec<Elem>,
}

/// Componentwise goodness of a paired tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Goodness {
    pub left_good: bool,
    pub right_good: bool,
}

impl Goodness {
    pub fn good(&self) -> bool {
        self.left_good && self.right_good
    }
}

impl PairedTuple {
    pub fn new(left: Vec<Elem>, right: Vec<Elem>) -> Self {
        assert_eq!(left.len(), right.len(), "paired tuples have equal lengths");
        PairedTuple { left, right }
    }

    /// Left-good: equal left components force equal right components.
    pub fn left_good(&self) -> bool {
        for i in 0..self.left.len() {
            for j in (i + 1)..self.left.len() {
                if self.left[i] == self.left[j] && self.right[i] != self.right[j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn right_good(&self) -> bool {
        for i in 0..self.left.len() {
            for j in (i + 1)..self.left.len() {
                if self.right[i] == self.right[j] && self.left[i] != self.left[j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn goodness(&self) -> Goodness {
        Goodness { left_good: self.left_good(), right_good: self.right_good() }
    }

    /// The expansion along a surjection: position `i` of the result is
    /// position `pattern[i]` of the tuple. Goodness is inherited.
    pub fn expand(&self, pattern: &[usize]) -> PairedTuple {
        PairedTuple {
            left: pattern.iter().map(|&i| self.left[i].clone()).collect(),
            right: pattern.iter().map(|&i| self.right[i].clone()).collect(),
        }
    }
}

/// The amalgam structure together with its universe of element pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: Structure,
    pairs: BTreeMap<Elem, (Elem, Elem)>,
    ids: BTreeMap<(Elem, Elem), Elem>,
}

impl Amalgam {
    pub fn pair_of(&self, e: &Elem) -> Option<&(Elem, Elem)> {
        self.pairs.get(e)
    }

    pub fn element_of(&self, left: &Elem, right: &Elem) -> Option<&Elem> {
        self.ids.get(&(left.clone(), right.clone()))
    }

    pub fn universe(&self) -> impl Iterator<Item = (&Elem, &(Elem, Elem))> {
        self.pairs.iter()
    }

    /// Presents an amalgam tuple as its component tuples.
    pub fn paired(&self, tuple: &[Elem]) -> Option<PairedTuple> {
        let mut left = Vec::with_capacity(tuple.len());
        let mut right = Vec::with_capacity(tuple.len());
        for e in tuple {
            let (l, r) = self.pairs.get(e)?;
            left.push(l.clone());
            right.push(r.clone());
        }
        Some(PairedTuple { left, right })
    }
}

fn pair_id(left: &Elem, right: &Elem) -> Elem {
    Elem::new(format!("{}|{}", left.id(), right.id()))
}

fn verify_bisimulation(
    a: &Structure,
    b: &Structure,
    z: &BisimulationSet,
    shared: &Vocabulary,
) -> Result<(), AmalgamError> {
    if z.is_empty() {
        return Err(AmalgamError::NotABisimulation("the map set is empty".to_string()));
    }
    for m in &z.maps {
        match is_uniform_partial_iso(a, b, m, shared) {
            Ok(true) => {}
            Ok(false) => {
                return Err(AmalgamError::NotABisimulation(format!(
                    "map {:?} -> {:?} does not preserve the table",
                    m.source, m.target
                )));
            }
            Err(e) => return Err(AmalgamError::Bisim(e.to_string())),
        }
    }
    let violations = z
        .closure_violations(a, b, shared)
        .map_err(|e| AmalgamError::Bisim(e.to_string()))?;
    if let Some((m, failure)) = violations.first() {
        return Err(AmalgamError::NotABisimulation(format!(
            "map {:?} -> {:?} violates {:?}",
            m.source, m.target, failure
        )));
    }
    Ok(())
}

/// Builds the amalgam of `a` and `b` over `sigma` and `tau` from a
/// bisimulation `z` for the shared vocabulary. `z` is re-verified first.
pub fn build_amalgam(
    a: &Structure,
    b: &Structure,
    z: &BisimulationSet,
    sigma: &Vocabulary,
    tau: &Vocabulary,
) -> Result<Amalgam, AmalgamError> {
    let shared = sigma.intersection(tau);
    verify_bisimulation(a, b, z, &shared)?;
    let union = sigma.union(tau)?;

    let mut pairs = BTreeMap::new();
    let mut ids = BTreeMap::new();
    let mut partners: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    let mut reverse_partners: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    for x in a.domain() {
        for y in b.domain() {
            if z.contains_tuples(std::slice::from_ref(x), std::slice::from_ref(y)) {
                let id = pair_id(x, y);
                pairs.insert(id.clone(), (x.clone(), y.clone()));
                ids.insert((x.clone(), y.clone()), id);
                partners.entry(x.clone()).or_default().push(y.clone());
                reverse_partners.entry(y.clone()).or_default().push(x.clone());
            }
        }
    }
    if pairs.is_empty() {
        return Err(AmalgamError::EmptyUniverse);
    }

    let mut structure = Structure::new(union.clone(), pairs.keys().cloned())?;

    for sym in union.symbols() {
        let in_sigma = sigma.contains(&sym.name);
        if in_sigma {
            let in_tau = tau.contains(&sym.name);
            for left in a.tuples(&sym.name).cloned().collect::<Vec<_>>() {
                let left_set: BTreeSet<Elem> = left.iter().cloned().collect();
                let shared_live = a.is_live_over(&left_set, &shared);
                for right in component_choices(&left, &partners) {
                    let pt = PairedTuple::new(left.clone(), right.clone());
                    let included = if in_tau {
                        z.contains_tuples(&left, &right)
                    } else {
                        z.contains_tuples(&left, &right)
                            || (pt.left_good() && !shared_live)
                    };
                    if included {
                        let tuple: Vec<Elem> = left
                            .iter()
                            .zip(&right)
                            .map(|(x, y)| ids[&(x.clone(), y.clone())].clone())
                            .collect();
                        structure.add_tuple(&sym.name, tuple)?;
                    }
                }
            }
        } else {
            for right in b.tuples(&sym.name).cloned().collect::<Vec<_>>() {
                let right_set: BTreeSet<Elem> = right.iter().cloned().collect();
                let shared_live = b.is_live_over(&right_set, &shared);
                for left in component_choices(&right, &reverse_partners) {
                    let pt = PairedTuple::new(left.clone(), right.clone());
                    let included = z.contains_tuples(&left, &right)
                        || (pt.right_good() && !shared_live);
                    if included {
                        let tuple: Vec<Elem> = left
                            .iter()
                            .zip(&right)
                            .map(|(x, y)| ids[&(x.clone(), y.clone())].clone())
                            .collect();
                        structure.add_tuple(&sym.name, tuple)?;
                    }
                }
            }
        }
    }

    Ok(Amalgam { structure, pairs, ids })
}

/// All tuples componentwise paired with the given one through the partner
/// table.
fn component_choices(
    tuple: &[Elem],
    partners: &BTreeMap<Elem, Vec<Elem>>,
) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for e in tuple {
        let choices = match partners.get(e) {
            Some(c) => c,
            None => return Vec::new(),
        };
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for c in choices {
                let mut ext = prefix.clone();
                ext.push(c.clone());
                next.push(ext);
            }
        }
        out = next;
    }
    out
}

/// The projections of the amalgam onto its factors: every live paired tuple
/// mapped to its left (respectively right) component tuple.
pub fn projection_maps(
    am: &Amalgam,
    sigma: &Vocabulary,
    tau: &Vocabulary,
) -> Result<(BisimulationSet, BisimulationSet), AmalgamError> {
    let mut z1 = Vec::new();
    for live in am.structure.live_sets_over(sigma) {
        let tuple: Vec<Elem> = live.iter().cloned().collect();
        let paired = am.paired(&tuple).expect("live sets are in the universe");
        let map = PartialMap::new(tuple, paired.left)
            .map_err(|e| AmalgamError::Bisim(e.to_string()))?;
        z1.push(map);
    }
    let mut z2 = Vec::new();
    for live in am.structure.live_sets_over(tau) {
        let tuple: Vec<Elem> = live.iter().cloned().collect();
        let paired = am.paired(&tuple).expect("live sets are in the universe");
        let map = PartialMap::new(tuple, paired.right)
            .map_err(|e| AmalgamError::Bisim(e.to_string()))?;
        z2.push(map);
    }
    Ok((BisimulationSet::new(z1), BisimulationSet::new(z2)))
}

/// Outcome of a runtime check, listing each violation found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that every projection map preserves tables: members of `z1`
/// must be uniform partial isomorphisms onto the left factor over `sigma`,
/// members of `z2` onto the right factor over `tau`.
pub fn check_lemma2(
    am: &Amalgam,
    a: &Structure,
    b: &Structure,
    z1: &BisimulationSet,
    z2: &BisimulationSet,
    sigma: &Vocabulary,
    tau: &Vocabulary,
) -> Result<CheckReport, AmalgamError> {
    let mut violations = Vec::new();
    for (set, other, vocab, label) in [(z1, a, sigma, "left"), (z2, b, tau, "right")] {
        for m in &set.maps {
            match is_uniform_partial_iso(&am.structure, other, m, vocab) {
                Ok(true) => {}
                Ok(false) => violations.push(format!(
                    "{label} projection {:?} -> {:?} does not preserve the table",
                    m.source, m.target
                )),
                Err(e) => violations.push(format!(
                    "{label} projection {:?} -> {:?}: {e}",
                    m.source, m.target
                )),
            }
        }
    }
    Ok(CheckReport { violations })
}

/// Verifies that the projections are closed under forth and back: `z1` as a
/// bisimulation between the amalgam and the left factor over `sigma`, `z2`
/// between the amalgam and the right factor over `tau`.
pub fn check_lemma3(
    am: &Amalgam,
    a: &Structure,
    b: &Structure,
    z1: &BisimulationSet,
    z2: &BisimulationSet,
    sigma: &Vocabulary,
    tau: &Vocabulary,
) -> Result<CheckReport, AmalgamError> {
    let mut violations = Vec::new();
    for (set, other, vocab, label) in [(z1, a, sigma, "left"), (z2, b, tau, "right")] {
        if set.is_empty() {
            violations.push(format!("{label} projection set is empty"));
            continue;
        }
        let found = set
            .closure_violations(&am.structure, other, vocab)
            .map_err(|e| AmalgamError::Bisim(e.to_string()))?;
        for (m, failure) in found {
            violations.push(format!(
                "{label} projection {:?} -> {:?} violates {failure:?}",
                m.source, m.target
            ));
        }
    }
    Ok(CheckReport { violations })
}

/// Recomputes the amalgam from its inputs and reports every place where the
/// given amalgam deviates from the construction rules.
pub fn verify_construction(
    am: &Amalgam,
    a: &Structure,
    b: &Structure,
    z: &BisimulationSet,
    sigma: &Vocabulary,
    tau: &Vocabulary,
) -> Result<CheckReport, AmalgamError> {
    let rebuilt = build_amalgam(a, b, z, sigma, tau)?;
    let mut violations = Vec::new();
    if rebuilt.pairs != am.pairs {
        violations.push("universe differs from the construction".to_string());
    }
    for sym in rebuilt.structure.vocabulary().symbols() {
        let want: BTreeSet<_> = rebuilt.structure.tuples(&sym.name).cloned().collect();
        let got: BTreeSet<_> = am.structure.tuples(&sym.name).cloned().collect();
        for t in want.difference(&got) {
            violations.push(format!("missing {}{t:?}", sym.name));
        }
        for t in got.difference(&want) {
            violations.push(format!("spurious {}{t:?}", sym.name));
        }
    }
    Ok(CheckReport { violations })
}
