//! Finite relational structures and their atomic descriptions: 1-types,
//! k-tables, live sets, restriction and reducts, plus a model checker,
//! canonical structure enumeration and a bounded satisfiability oracle.

mod enumerate;
mod eval;
mod io;
pub(crate) mod solver;

pub use enumerate::enumerate_structures;
pub use eval::{evaluate, Assignment, EvalError};
pub use io::StructureFile;
pub use solver::brute_force_sat;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Vocabulary;

/// An element of a structure's domain. Elements are opaque identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub String);

impl Elem {
    pub fn new(id: impl Into<String>) -> Self {
        Elem(id.into())
    }

    pub fn id(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("domain must not be empty")]
    EmptyDomain,
    #[error("duplicate domain element {0}")]
    DuplicateElement(String),
    #[error("element {0} is not in the domain")]
    UnknownElement(String),
    #[error("relation {0} is not in the vocabulary")]
    UnknownRelation(String),
    #[error("relation {relation} expects {expected} arguments, got {got}")]
    ArityMismatch { relation: String, expected: usize, got: usize },
    #[error("cannot infer the arity of relation {0}: it has no tuples; add an `arities` entry")]
    UnknownArity(String),
    #[error("restriction to an empty set")]
    EmptyRestriction,
    #[error("tuple elements must be pairwise distinct")]
    RepeatedElements,
    #[error("vocabulary error: {0}")]
    Vocabulary(#[from] crate::syntax::VocabularyError),
}

/// A finite relational structure: a vocabulary, a nonempty domain and an
/// interpretation for each relation symbol. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    vocabulary: Vocabulary,
    domain: BTreeSet<Elem>,
    relations: BTreeMap<String, BTreeSet<Vec<Elem>>>,
}

impl Structure {
    pub fn new<I: IntoIterator<Item = Elem>>(
        vocabulary: Vocabulary,
        domain: I,
    ) -> Result<Self, StructureError> {
        let mut dom = BTreeSet::new();
        for e in domain {
            if !dom.insert(e.clone()) {
                return Err(StructureError::DuplicateElement(e.0));
            }
        }
        if dom.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let relations = vocabulary
            .names()
            .map(|n| (n.to_string(), BTreeSet::new()))
            .collect();
        Ok(Structure { vocabulary, domain: dom, relations })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn domain(&self) -> impl Iterator<Item = &Elem> {
        self.domain.iter()
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn contains_element(&self, e: &Elem) -> bool {
        self.domain.contains(e)
    }

    pub fn add_tuple(&mut self, relation: &str, tuple: Vec<Elem>) -> Result<(), StructureError> {
        let arity = self
            .vocabulary
            .arity(relation)
            .ok_or_else(|| StructureError::UnknownRelation(relation.to_string()))?;
        if tuple.len() != arity {
            return Err(StructureError::ArityMismatch {
                relation: relation.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        for e in &tuple {
            if !self.domain.contains(e) {
                return Err(StructureError::UnknownElement(e.0.clone()));
            }
        }
        self.relations
            .get_mut(relation)
            .expect("relation map mirrors the vocabulary")
            .insert(tuple);
        Ok(())
    }

    pub fn remove_tuple(&mut self, relation: &str, tuple: &[Elem]) -> bool {
        self.relations
            .get_mut(relation)
            .map(|t| t.remove(tuple))
            .unwrap_or(false)
    }

    pub fn tuples(&self, relation: &str) -> impl Iterator<Item = &Vec<Elem>> {
        self.relations
            .get(relation)
            .into_iter()
            .flat_map(|s| s.iter())
    }

    pub fn contains_tuple(&self, relation: &str, tuple: &[Elem]) -> bool {
        self.relations
            .get(relation)
            .map(|s| s.contains(tuple))
            .unwrap_or(false)
    }

    /// Membership check for a tuple with possible repetitions.
    pub fn expand_atom(&self, relation: &str, tuple: &[Elem]) -> Result<bool, StructureError> {
        let arity = self
            .vocabulary
            .arity(relation)
            .ok_or_else(|| StructureError::UnknownRelation(relation.to_string()))?;
        if tuple.len() != arity {
            return Err(StructureError::ArityMismatch {
                relation: relation.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        for e in tuple {
            if !self.domain.contains(e) {
                return Err(StructureError::UnknownElement(e.0.clone()));
            }
        }
        Ok(self.contains_tuple(relation, tuple))
    }

    /// The 1-type of `a` over the structure's own vocabulary.
    pub fn one_type(&self, a: &Elem) -> Result<OneType, StructureError> {
        self.one_type_over(a, &self.vocabulary)
    }

    /// The 1-type of `a` over a sub-vocabulary.
    pub fn one_type_over(
        &self,
        a: &Elem,
        sigma: &Vocabulary,
    ) -> Result<OneType, StructureError> {
        if !self.domain.contains(a) {
            return Err(StructureError::UnknownElement(a.0.clone()));
        }
        let mut positive = BTreeSet::new();
        for sym in sigma.symbols() {
            let loop_tuple = vec![a.clone(); sym.arity];
            if self.contains_tuple(&sym.name, &loop_tuple) {
                positive.insert(sym.name);
            }
        }
        Ok(OneType { positive })
    }

    /// The k-table of a tuple of pairwise distinct elements over the
    /// structure's own vocabulary.
    pub fn k_table(&self, tuple: &[Elem]) -> Result<KTable, StructureError> {
        self.k_table_over(tuple, &self.vocabulary)
    }

    /// The k-table over a sub-vocabulary: the positive atoms whose variable
    /// set is exactly the whole tuple, together with the componentwise
    /// 1-types.
    pub fn k_table_over(
        &self,
        tuple: &[Elem],
        sigma: &Vocabulary,
    ) -> Result<KTable, StructureError> {
        let k = tuple.len();
        let distinct: BTreeSet<&Elem> = tuple.iter().collect();
        if distinct.len() != k {
            return Err(StructureError::RepeatedElements);
        }
        for e in tuple {
            if !self.domain.contains(e) {
                return Err(StructureError::UnknownElement(e.0.clone()));
            }
        }
        let mut rho = BTreeSet::new();
        for sym in sigma.symbols() {
            for pattern in surjective_patterns(sym.arity, k) {
                let t: Vec<Elem> = pattern.iter().map(|&i| tuple[i].clone()).collect();
                if self.contains_tuple(&sym.name, &t) {
                    rho.insert((sym.name.clone(), pattern));
                }
            }
        }
        let types = tuple
            .iter()
            .map(|e| self.one_type_over(e, sigma))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KTable { k, rho, types })
    }

    /// The live sets: every singleton, plus the element set of every
    /// relation tuple.
    pub fn live_sets(&self) -> BTreeSet<BTreeSet<Elem>> {
        self.live_sets_over(&self.vocabulary)
    }

    /// Live sets over a sub-vocabulary.
    pub fn live_sets_over(&self, sigma: &Vocabulary) -> BTreeSet<BTreeSet<Elem>> {
        let mut out = self.tuple_sets_over(sigma);
        out.extend(
            self.domain
                .iter()
                .map(|e| [e.clone()].into_iter().collect::<BTreeSet<_>>()),
        );
        out
    }

    /// The element sets of the relation tuples over a sub-vocabulary: the
    /// live sets that a guard can actually bind.
    pub fn tuple_sets_over(&self, sigma: &Vocabulary) -> BTreeSet<BTreeSet<Elem>> {
        let mut out = BTreeSet::new();
        for name in sigma.names() {
            for tuple in self.tuples(name) {
                out.insert(tuple.iter().cloned().collect());
            }
        }
        out
    }

    /// Whether `set` is live over `sigma`: a singleton or realized by a
    /// relation tuple.
    pub fn is_live_over(&self, set: &BTreeSet<Elem>, sigma: &Vocabulary) -> bool {
        if set.len() <= 1 {
            return !set.is_empty();
        }
        sigma.names().any(|name| {
            self.tuples(name)
                .any(|t| t.iter().cloned().collect::<BTreeSet<_>>() == *set)
        })
    }

    /// Restriction to a nonempty subset of the domain: each relation is
    /// intersected with the tuples over that subset.
    pub fn restrict(&self, subset: &BTreeSet<Elem>) -> Result<Structure, StructureError> {
        if subset.is_empty() {
            return Err(StructureError::EmptyRestriction);
        }
        for e in subset {
            if !self.domain.contains(e) {
                return Err(StructureError::UnknownElement(e.0.clone()));
            }
        }
        let mut s = Structure::new(self.vocabulary.clone(), subset.iter().cloned())?;
        for (name, tuples) in &self.relations {
            for t in tuples {
                if t.iter().all(|e| subset.contains(e)) {
                    s.relations.get_mut(name).unwrap().insert(t.clone());
                }
            }
        }
        Ok(s)
    }

    /// The reduct to a sub-vocabulary: relations outside `sigma` are dropped.
    pub fn reduct(&self, sigma: &Vocabulary) -> Result<Structure, StructureError> {
        for sym in sigma.symbols() {
            match self.vocabulary.arity(&sym.name) {
                None => return Err(StructureError::UnknownRelation(sym.name)),
                Some(a) if a != sym.arity => {
                    return Err(StructureError::ArityMismatch {
                        relation: sym.name,
                        expected: a,
                        got: sym.arity,
                    })
                }
                _ => {}
            }
        }
        let mut s = Structure::new(sigma.clone(), self.domain.iter().cloned())?;
        for name in sigma.names() {
            s.relations
                .insert(name.to_string(), self.relations[name].clone());
        }
        Ok(s)
    }
}

/// All maps `[arity] -> [k]` that use every index, as index vectors.
pub(crate) fn surjective_patterns(arity: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 || k > arity {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut pattern = vec![0usize; arity];
    loop {
        let used: BTreeSet<usize> = pattern.iter().copied().collect();
        if used.len() == k {
            out.push(pattern.clone());
        }
        // increment base-k counter
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pattern[i] + 1 < k {
                pattern[i] += 1;
                for p in pattern.iter_mut().skip(i + 1) {
                    *p = 0;
                }
                break;
            }
        }
    }
}

/// The atomic profile of a single element: the relations whose full loop
/// `R(a,...,a)` holds. Negative literals are implicit by maximality;
/// equality literals carry no information and are excluded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OneType {
    pub positive: BTreeSet<String>,
}

impl OneType {
    pub fn empty() -> Self {
        OneType { positive: BTreeSet::new() }
    }

    pub fn contains(&self, relation: &str) -> bool {
        self.positive.contains(relation)
    }

    /// Every subset of the vocabulary's symbols is a consistent 1-type.
    pub fn enumerate_all(sigma: &Vocabulary) -> Vec<OneType> {
        let names: Vec<String> = sigma.names().map(|s| s.to_string()).collect();
        let mut out = Vec::with_capacity(1 << names.len());
        for mask in 0..(1u64 << names.len()) {
            let positive = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, n)| n.clone())
                .collect();
            out.push(OneType { positive });
        }
        out
    }
}

impl fmt::Display for OneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.positive.iter().cloned().collect::<Vec<_>>().join(",")
        )
    }
}

/// The atomic profile of a tuple of distinct elements: the positive atoms
/// using all tuple positions (`rho`, stored as relation name plus position
/// pattern) and the componentwise 1-types. Only positive atoms are stored;
/// negatives are implicit by maximality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KTable {
    pub k: usize,
    pub rho: BTreeSet<(String, Vec<usize>)>,
    pub types: Vec<OneType>,
}
