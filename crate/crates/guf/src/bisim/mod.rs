//! Uniform guarded bisimulations between finite structures.
//!
//! A bisimulation is a set of table-preserving partial maps on live sets,
//! closed under the forth and back extension conditions. The maximal one is
//! computed as a greatest fixpoint by refinement; bisimilarity of pointed
//! structures is membership of the cover map in that fixpoint. Bounded
//! logical equivalence and distinguishing formulas live in [`equiv`] and are
//! computed by formula enumeration, independently of the fixpoint.

mod equiv;

pub use equiv::{distinguishing_formula, guf1_equivalent_up_to};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::structures::{Elem, Structure, StructureError};
use crate::syntax::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BisimError {
    #[error("tuples have different lengths: {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("map is not a well-defined bijection")]
    NotABijection,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A partial map between two structures, induced by a pair of equal-length
/// tuples. The induced element relation must be a bijection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialMap {
    pub source: Vec<Elem>,
    pub target: Vec<Elem>,
}

impl PartialMap {
    /// Builds a map from source and target tuples, checking that the induced
    /// relation is a well-defined bijection between the element sets.
    pub fn new(source: Vec<Elem>, target: Vec<Elem>) -> Result<Self, BisimError> {
        if source.len() != target.len() {
            return Err(BisimError::LengthMismatch(source.len(), target.len()));
        }
        let mut forward: BTreeMap<&Elem, &Elem> = BTreeMap::new();
        let mut backward: BTreeMap<&Elem, &Elem> = BTreeMap::new();
        for (s, t) in source.iter().zip(&target) {
            if *forward.entry(s).or_insert(t) != t || *backward.entry(t).or_insert(s) != s {
                return Err(BisimError::NotABijection);
            }
        }
        Ok(PartialMap { source, target })
    }

    /// The induced bijection as sorted pairs.
    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        let map: BTreeMap<&Elem, &Elem> = self.source.iter().zip(&self.target).collect();
        map.into_iter().map(|(s, t)| (s.clone(), t.clone())).collect()
    }

    /// Canonical form: source elements sorted and deduplicated.
    pub fn canonical(&self) -> PartialMap {
        let pairs = self.pairs();
        PartialMap {
            source: pairs.iter().map(|(s, _)| s.clone()).collect(),
            target: pairs.iter().map(|(_, t)| t.clone()).collect(),
        }
    }

    pub fn domain_set(&self) -> BTreeSet<Elem> {
        self.source.iter().cloned().collect()
    }

    pub fn range_set(&self) -> BTreeSet<Elem> {
        self.target.iter().cloned().collect()
    }

    pub fn image(&self, e: &Elem) -> Option<&Elem> {
        self.source
            .iter()
            .position(|s| s == e)
            .map(|i| &self.target[i])
    }

    pub fn preimage(&self, e: &Elem) -> Option<&Elem> {
        self.target
            .iter()
            .position(|t| t == e)
            .map(|i| &self.source[i])
    }

    /// Distinct source elements in order of first occurrence, with their
    /// images.
    fn distinct_columns(&self) -> (Vec<Elem>, Vec<Elem>) {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        for (s, t) in self.source.iter().zip(&self.target) {
            if !src.contains(s) {
                src.push(s.clone());
                tgt.push(t.clone());
            }
        }
        (src, tgt)
    }
}

/// Whether `p` preserves the table of its source tuple: the k-table of the
/// distinct source elements over `sigma` must equal the k-table of their
/// images.
pub fn is_uniform_partial_iso(
    a: &Structure,
    b: &Structure,
    p: &PartialMap,
    sigma: &Vocabulary,
) -> Result<bool, BisimError> {
    let (src, tgt) = p.distinct_columns();
    let ta = a.k_table_over(&src, sigma)?;
    let tb = b.k_table_over(&tgt, sigma)?;
    Ok(ta == tb)
}

/// A set of partial maps between two fixed structures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BisimulationSet {
    pub maps: BTreeSet<PartialMap>,
}

impl BisimulationSet {
    pub fn new<I: IntoIterator<Item = PartialMap>>(maps: I) -> Self {
        BisimulationSet { maps: maps.into_iter().map(|m| m.canonical()).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn contains(&self, p: &PartialMap) -> bool {
        self.maps.contains(&p.canonical())
    }

    /// Whether a pair of tuples induces a map in the set.
    pub fn contains_tuples(&self, source: &[Elem], target: &[Elem]) -> bool {
        match PartialMap::new(source.to_vec(), target.to_vec()) {
            Ok(p) => self.contains(&p),
            Err(_) => false,
        }
    }

    /// The forth/back violations of each member with respect to the whole
    /// set: one refinement pass that deletes nothing. Empty means closed.
    pub fn closure_violations(
        &self,
        a: &Structure,
        b: &Structure,
        sigma: &Vocabulary,
    ) -> Result<Vec<(PartialMap, ExtensionFailure)>, BisimError> {
        let side_a = SideSets {
            live: a.live_sets_over(sigma),
            tuple_sets: a.tuple_sets_over(sigma),
        };
        let side_b = SideSets {
            live: b.live_sets_over(sigma),
            tuple_sets: b.tuple_sets_over(sigma),
        };
        let mut out = Vec::new();
        for p in &self.maps {
            if let Some(v) = violates(p, &self.maps, &side_a, &side_b)? {
                out.push((p.clone(), v));
            }
        }
        Ok(out)
    }
}

/// Why a map fails the closure conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionFailure {
    /// No surviving map on this live source set agrees with the map at the
    /// pivot (or covers the set at all, when no pivot is shared).
    Forth { pivot: Option<Elem>, live: BTreeSet<Elem> },
    /// No surviving map onto this live target set agrees with the map at
    /// the pivot (or covers the set at all).
    Back { pivot: Option<Elem>, live: BTreeSet<Elem> },
}

/// The forth condition: for every pivot of `p` and every live source set
/// through it, some surviving map on that set sends the pivot where `p`
/// does; and every tuple set of the source side, shared pivot or not,
/// carries some surviving map. The back condition is symmetric. The
/// coverage clause ranges over guard-bindable sets only: it is what makes
/// sentence-level bisimilarity track sentence equivalence across
/// disconnected parts, while elements outside every relation tuple stay
/// invisible, exactly as they are to guarded sentences. Per-pivot agreement
/// (rather than agreement on a whole intersection) is what the projections
/// of an amalgam satisfy.
struct SideSets {
    live: BTreeSet<BTreeSet<Elem>>,
    tuple_sets: BTreeSet<BTreeSet<Elem>>,
}

fn violates(
    p: &PartialMap,
    maps: &BTreeSet<PartialMap>,
    side_a: &SideSets,
    side_b: &SideSets,
) -> Result<Option<ExtensionFailure>, BisimError> {
    let pairs = p.pairs();
    for live in side_a.tuple_sets.iter() {
        if !maps.iter().any(|q| q.domain_set() == *live) {
            return Ok(Some(ExtensionFailure::Forth { pivot: None, live: live.clone() }));
        }
    }
    for live in side_a.live.iter() {
        for (a, b) in pairs.iter().filter(|(a, _)| live.contains(a)) {
            let found = maps
                .iter()
                .any(|q| q.domain_set() == *live && q.image(a) == Some(b));
            if !found {
                return Ok(Some(ExtensionFailure::Forth {
                    pivot: Some(a.clone()),
                    live: live.clone(),
                }));
            }
        }
    }
    for live in side_b.tuple_sets.iter() {
        if !maps.iter().any(|q| q.range_set() == *live) {
            return Ok(Some(ExtensionFailure::Back { pivot: None, live: live.clone() }));
        }
    }
    for live in side_b.live.iter() {
        for (a, b) in pairs.iter().filter(|(_, b)| live.contains(b)) {
            let found = maps
                .iter()
                .any(|q| q.range_set() == *live && q.preimage(b) == Some(a));
            if !found {
                return Ok(Some(ExtensionFailure::Back {
                    pivot: Some(b.clone()),
                    live: live.clone(),
                }));
            }
        }
    }
    Ok(None)
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// The greatest set of table-preserving maps on live sets (plus the optional
/// extra map) closed under forth and back. Starts from every uniform partial
/// isomorphism between live sets and deletes violating maps, in lexicographic
/// order, until stable. The result is the greatest fixpoint and does not
/// depend on the deletion order.
pub fn maximal_bisimulation(
    a: &Structure,
    b: &Structure,
    sigma: &Vocabulary,
    extra: Option<PartialMap>,
) -> Result<BisimulationSet, BisimError> {
    let live_a = a.live_sets_over(sigma);
    let live_b = b.live_sets_over(sigma);
    let side_a = SideSets { live: live_a.clone(), tuple_sets: a.tuple_sets_over(sigma) };
    let side_b = SideSets { live: live_b.clone(), tuple_sets: b.tuple_sets_over(sigma) };
    let mut maps: BTreeSet<PartialMap> = BTreeSet::new();
    for x in &live_a {
        let xs: Vec<Elem> = x.iter().cloned().collect();
        for y in &live_b {
            if y.len() != xs.len() {
                continue;
            }
            let ys: Vec<Elem> = y.iter().cloned().collect();
            for perm in permutations(&ys) {
                let p = PartialMap { source: xs.clone(), target: perm };
                if is_uniform_partial_iso(a, b, &p, sigma)? {
                    maps.insert(p);
                }
            }
        }
    }
    if let Some(extra) = extra {
        let extra = extra.canonical();
        if is_uniform_partial_iso(a, b, &extra, sigma)? {
            maps.insert(extra);
        }
    }
    loop {
        let mut removed = false;
        for p in maps.iter().cloned().collect::<Vec<_>>() {
            if !maps.contains(&p) {
                continue;
            }
            if violates(&p, &maps, &side_a, &side_b)?.is_some() {
                maps.remove(&p);
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }
    Ok(BisimulationSet { maps })
}

/// Pointed bisimilarity. For nonempty tuples this asks whether the cover map
/// `c -> d` survives in the maximal bisimulation extended with it; for empty
/// tuples it asks whether the maximal bisimulation is nonempty.
pub fn bisimilar(
    a: &Structure,
    c: &[Elem],
    b: &Structure,
    d: &[Elem],
    sigma: &Vocabulary,
) -> Result<bool, BisimError> {
    if c.len() != d.len() {
        return Err(BisimError::LengthMismatch(c.len(), d.len()));
    }
    if c.is_empty() {
        return Ok(!maximal_bisimulation(a, b, sigma, None)?.is_empty());
    }
    let cover = match PartialMap::new(c.to_vec(), d.to_vec()) {
        Ok(p) => p,
        Err(BisimError::NotABijection) => return Ok(false),
        Err(e) => return Err(e),
    };
    let fixpoint = maximal_bisimulation(a, b, sigma, Some(cover.clone()))?;
    Ok(fixpoint.contains(&cover))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::RelationSymbol;

    fn vocab(symbols: &[(&str, usize)]) -> Vocabulary {
        Vocabulary::from_symbols(symbols.iter().map(|&(n, a)| RelationSymbol::new(n, a)))
            .unwrap()
    }

    fn elems(ids: &[&str]) -> Vec<Elem> {
        ids.iter().map(|s| Elem::new(*s)).collect()
    }

    fn p_singleton(with_p: bool) -> Structure {
        let mut s = Structure::new(vocab(&[("P", 1)]), elems(&["a"])).unwrap();
        if with_p {
            s.add_tuple("P", elems(&["a"])).unwrap();
        }
        s
    }

    fn cycle(names: &[&str]) -> Structure {
        let mut s = Structure::new(vocab(&[("R", 2)]), elems(names)).unwrap();
        for i in 0..names.len() {
            s.add_tuple(
                "R",
                vec![
                    Elem::new(names[i]),
                    Elem::new(names[(i + 1) % names.len()]),
                ],
            )
            .unwrap();
        }
        s
    }

    #[test]
    fn identity_is_a_uniform_partial_iso() {
        let s = cycle(&["1", "2", "3"]);
        let p = PartialMap::new(elems(&["1", "2"]), elems(&["1", "2"])).unwrap();
        assert!(is_uniform_partial_iso(&s, &s, &p, s.vocabulary()).unwrap());
    }

    #[test]
    fn table_mismatch_is_rejected() {
        let a = cycle(&["a", "b"]);
        let b = Structure::new(vocab(&[("R", 2)]), elems(&["c", "d"])).unwrap();
        let p = PartialMap::new(elems(&["a", "b"]), elems(&["c", "d"])).unwrap();
        assert!(!is_uniform_partial_iso(&a, &b, &p, a.vocabulary()).unwrap());
    }

    #[test]
    fn partial_iso_agreement_with_table_comparison_on_random_pairs() {
        use crate::gen::{random_structure, rng};
        let v = vocab(&[("P", 1), ("R", 2)]);
        let mut rng = rng(42);
        for _ in 0..30 {
            let a = random_structure(&v, 3, 0.4, &mut rng);
            let b = random_structure(&v, 3, 0.4, &mut rng);
            let ae: Vec<Elem> = a.domain().cloned().collect();
            let be: Vec<Elem> = b.domain().cloned().collect();
            for x in &ae {
                for y in &be {
                    let p = PartialMap::new(vec![x.clone()], vec![y.clone()]).unwrap();
                    let iso = is_uniform_partial_iso(&a, &b, &p, &v).unwrap();
                    let expected = a.k_table_over(std::slice::from_ref(x), &v).unwrap()
                        == b.k_table_over(std::slice::from_ref(y), &v).unwrap();
                    assert_eq!(iso, expected);
                }
            }
        }
    }

    #[test]
    fn self_bisimulation_contains_identity_maps() {
        let s = cycle(&["1", "2", "3"]);
        let z = maximal_bisimulation(&s, &s, s.vocabulary(), None).unwrap();
        for live in s.live_sets() {
            let tuple: Vec<Elem> = live.iter().cloned().collect();
            assert!(z.contains_tuples(&tuple, &tuple));
        }
    }

    #[test]
    fn one_type_mismatch_kills_singleton_maps() {
        let a = p_singleton(true);
        let b = p_singleton(false);
        let z = maximal_bisimulation(&a, &b, a.vocabulary(), None).unwrap();
        assert!(z.is_empty());
        assert!(!bisimilar(&a, &elems(&["a"]), &b, &elems(&["a"]), a.vocabulary()).unwrap());
    }

    #[test]
    fn matching_cycles_are_bisimilar_and_cover_all_edges() {
        let a = cycle(&["1", "2", "3"]);
        let b = cycle(&["x", "y", "z"]);
        let z = maximal_bisimulation(&a, &b, a.vocabulary(), None).unwrap();
        assert!(!z.is_empty());
        for live in a.live_sets() {
            if live.len() == 2 {
                let found = z.maps.iter().any(|m| m.domain_set() == live);
                assert!(found, "no surviving map on live set {live:?}");
            }
        }
        assert!(bisimilar(&a, &[], &b, &[], a.vocabulary()).unwrap());
    }

    #[test]
    fn pointed_bisimilarity_examples() {
        let s = p_singleton(true);
        assert!(bisimilar(&s, &elems(&["a"]), &s, &elems(&["a"]), s.vocabulary()).unwrap());

        // two single-element self-loops are sentence-level bisimilar
        let mut a = Structure::new(vocab(&[("R", 2)]), elems(&["a"])).unwrap();
        a.add_tuple("R", elems(&["a", "a"])).unwrap();
        let mut b = Structure::new(vocab(&[("R", 2)]), elems(&["b"])).unwrap();
        b.add_tuple("R", elems(&["b", "b"])).unwrap();
        assert!(bisimilar(&a, &[], &b, &[], a.vocabulary()).unwrap());
    }

    #[test]
    fn fixpoint_is_closed_and_all_members_are_isos() {
        use crate::gen::{random_structure, rng};
        let v = vocab(&[("P", 1), ("R", 2)]);
        let mut rng = rng(99);
        for _ in 0..20 {
            let a = random_structure(&v, 3, 0.35, &mut rng);
            let b = random_structure(&v, 3, 0.35, &mut rng);
            let z = maximal_bisimulation(&a, &b, &v, None).unwrap();
            assert!(z.closure_violations(&a, &b, &v).unwrap().is_empty());
            for m in &z.maps {
                assert!(is_uniform_partial_iso(&a, &b, m, &v).unwrap());
            }
        }
    }

    #[test]
    fn fixpoint_does_not_depend_on_deletion_order() {
        // Run the refinement on a reversed candidate ordering and compare.
        use crate::gen::{random_structure, rng};
        let v = vocab(&[("P", 1), ("R", 2)]);
        let mut rng = rng(1234);
        for _ in 0..10 {
            let a = random_structure(&v, 3, 0.4, &mut rng);
            let b = random_structure(&v, 3, 0.4, &mut rng);
            let forward = maximal_bisimulation(&a, &b, &v, None).unwrap();
            let shuffled = maximal_bisimulation_reversed(&a, &b, &v).unwrap();
            assert_eq!(forward.maps, shuffled);
        }
    }

    /// Same refinement but deleting in reverse lexicographic order.
    fn maximal_bisimulation_reversed(
        a: &Structure,
        b: &Structure,
        sigma: &Vocabulary,
    ) -> Result<BTreeSet<PartialMap>, BisimError> {
        let side_a = SideSets { live: a.live_sets_over(sigma), tuple_sets: a.tuple_sets_over(sigma) };
        let side_b = SideSets { live: b.live_sets_over(sigma), tuple_sets: b.tuple_sets_over(sigma) };
        let mut maps: BTreeSet<PartialMap> = BTreeSet::new();
        for x in &side_a.live {
            let xs: Vec<Elem> = x.iter().cloned().collect();
            for y in &side_b.live {
                if y.len() != xs.len() {
                    continue;
                }
                let ys: Vec<Elem> = y.iter().cloned().collect();
                for perm in permutations(&ys) {
                    let p = PartialMap { source: xs.clone(), target: perm };
                    if is_uniform_partial_iso(a, b, &p, sigma)? {
                        maps.insert(p);
                    }
                }
            }
        }
        loop {
            let mut removed = false;
            for p in maps.iter().cloned().collect::<Vec<_>>().into_iter().rev() {
                if !maps.contains(&p) {
                    continue;
                }
                if violates(&p, &maps, &side_a, &side_b)?.is_some() {
                    maps.remove(&p);
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        Ok(maps)
    }
}
