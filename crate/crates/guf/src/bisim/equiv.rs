//! Bounded logical equivalence and distinguishing formulas, by enumeration
//! of uniform one-dimensional guarded formulas with semantic deduplication.
//!
//! A formula of the fragment with free variables among `x1..xn` decomposes,
//! by uniformity and one-dimensionality, into a boolean combination of:
//! atoms over the tuple variables, equalities, sentences, and subformulas
//! with a single free variable. Agreement on all generators of these shapes
//! therefore implies agreement on every formula of the fragment up to the
//! explored block depth. The single-variable generators are produced level
//! by level: at each depth, for every relation tuple of either structure
//! and every pivot choice, the engine forms guarded blocks whose bodies are
//! either empty, a single literal, or the complete atomic-and-property
//! description of the witness configuration. Unions of complete
//! descriptions exhaust all achievable block meanings, so deduplicating by
//! satisfying sets over the two structures keeps the generator list both
//! finite and complete. Every returned formula is re-checked with the
//! evaluator.

use std::collections::{BTreeMap, BTreeSet};

use super::BisimError;
use crate::structures::{evaluate, Elem, Structure};
use crate::syntax::{Atom, Formula, Var, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SideId {
    A,
    B,
}

struct Side {
    s: Structure,
    elems: Vec<Elem>,
    index: BTreeMap<Elem, usize>,
}

impl Side {
    fn new(s: Structure) -> Self {
        let elems: Vec<Elem> = s.domain().cloned().collect();
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Side { s, elems, index }
    }
}

/// A slot in a block body: an atom over the block's variables, an equality
/// between them, or an already-generated single-variable property applied
/// at one of them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Pattern(String, Vec<usize>),
    EqVars(usize, usize),
    Prop(usize, usize),
}

/// A guarded block in symbolic form. Variables are numbered `0..nvars`;
/// when `pivot` is set, variable 0 is the free variable and the rest are
/// bound, otherwise all variables are bound and the block is a sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct BlockRep {
    relation: String,
    pattern: Vec<usize>,
    nvars: usize,
    pivot: bool,
    conjuncts: Vec<(Slot, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Rep {
    /// `R(x,...,x)` for the free variable.
    Loop(String, usize),
    Block(BlockRep),
}

struct Prop {
    rep: Rep,
    mask_a: u64,
    mask_b: u64,
}

struct SentGen {
    rep: Rep,
    val_a: bool,
    val_b: bool,
}

struct Engine {
    a: Side,
    b: Side,
    props: Vec<Prop>,
    prop_classes: BTreeSet<(u64, u64)>,
    sentences: Vec<SentGen>,
    sent_classes: BTreeSet<(bool, bool)>,
    seen: BTreeSet<Rep>,
}

impl Engine {
    fn new(a: Structure, b: Structure) -> Result<Self, BisimError> {
        if a.size() > 64 || b.size() > 64 {
            return Err(BisimError::Internal(
                "equivalence engine supports at most 64 elements per side".to_string(),
            ));
        }
        Ok(Engine {
            a: Side::new(a),
            b: Side::new(b),
            props: Vec::new(),
            prop_classes: BTreeSet::new(),
            sentences: Vec::new(),
            sent_classes: BTreeSet::new(),
            seen: BTreeSet::new(),
        })
    }

    fn side(&self, id: SideId) -> &Side {
        match id {
            SideId::A => &self.a,
            SideId::B => &self.b,
        }
    }

    fn prop_bit(&self, prop: usize, id: SideId, elem_idx: usize) -> bool {
        let p = &self.props[prop];
        let mask = match id {
            SideId::A => p.mask_a,
            SideId::B => p.mask_b,
        };
        mask >> elem_idx & 1 == 1
    }

    fn slot_truth(&self, slot: &Slot, id: SideId, assign: &[usize]) -> bool {
        let side = self.side(id);
        match slot {
            Slot::Pattern(rel, idxs) => {
                let tuple: Vec<Elem> =
                    idxs.iter().map(|&v| side.elems[assign[v]].clone()).collect();
                side.s.contains_tuple(rel, &tuple)
            }
            Slot::EqVars(u, v) => assign[*u] == assign[*v],
            Slot::Prop(p, v) => self.prop_bit(*p, id, assign[*v]),
        }
    }

    /// Truth of a block at a pivot element (or as a sentence when the block
    /// has no free variable).
    fn block_truth(&self, block: &BlockRep, id: SideId, pivot_elem: Option<usize>) -> bool {
        let side = self.side(id);
        'tuples: for tuple in side.s.tuples(&block.relation) {
            let mut assign: Vec<Option<usize>> = vec![None; block.nvars];
            for (pos, &v) in block.pattern.iter().enumerate() {
                let e = side.index[&tuple[pos]];
                match assign[v] {
                    None => assign[v] = Some(e),
                    Some(prev) if prev == e => {}
                    Some(_) => continue 'tuples,
                }
            }
            let assign: Vec<usize> = match assign.into_iter().collect::<Option<Vec<_>>>() {
                Some(a) => a,
                None => continue,
            };
            if block.pivot && Some(assign[0]) != pivot_elem {
                continue;
            }
            let body_holds = block
                .conjuncts
                .iter()
                .all(|(slot, sign)| self.slot_truth(slot, id, &assign) == *sign);
            if body_holds {
                return true;
            }
        }
        false
    }

    fn rep_masks(&self, rep: &Rep) -> (u64, u64) {
        let eval_side = |id: SideId| -> u64 {
            let side = self.side(id);
            let mut mask = 0u64;
            for (i, e) in side.elems.iter().enumerate() {
                let holds = match rep {
                    Rep::Loop(r, arity) => {
                        side.s.contains_tuple(r, &vec![e.clone(); *arity])
                    }
                    Rep::Block(b) => self.block_truth(b, id, Some(i)),
                };
                if holds {
                    mask |= 1 << i;
                }
            }
            mask
        };
        (eval_side(SideId::A), eval_side(SideId::B))
    }

    fn insert_prop(&mut self, rep: Rep) {
        if !self.seen.insert(rep.clone()) {
            return;
        }
        let (mask_a, mask_b) = self.rep_masks(&rep);
        if self.prop_classes.insert((mask_a, mask_b)) {
            self.props.push(Prop { rep, mask_a, mask_b });
        }
    }

    fn insert_sentence(&mut self, rep: Rep) {
        if !self.seen.insert(rep.clone()) {
            return;
        }
        let block = match &rep {
            Rep::Block(b) => b,
            Rep::Loop(_, _) => unreachable!("loops have a free variable"),
        };
        let val_a = self.block_truth(block, SideId::A, None);
        let val_b = self.block_truth(block, SideId::B, None);
        if self.sent_classes.insert((val_a, val_b)) {
            self.sentences.push(SentGen { rep, val_a, val_b });
        }
    }

    fn seed_atoms(&mut self, sigma: &Vocabulary) {
        for sym in sigma.symbols() {
            self.insert_prop(Rep::Loop(sym.name.clone(), sym.arity));
        }
    }

    /// One saturation round. Returns whether any new semantic class
    /// appeared.
    fn round(&mut self, sigma: &Vocabulary) -> bool {
        let props_before = self.props.len();
        let sents_before = self.sentences.len();
        let prop_snapshot = self.props.len();
        let mut candidates: Vec<(Rep, bool)> = Vec::new();
        for id in [SideId::A, SideId::B] {
            let side = self.side(id);
            for sym in sigma.symbols() {
                for tuple in side.s.tuples(&sym.name) {
                    let mut distinct: Vec<usize> = Vec::new();
                    for e in tuple {
                        let idx = side.index[e];
                        if !distinct.contains(&idx) {
                            distinct.push(idx);
                        }
                    }
                    // pivot modes: None is a sentence block, Some(i) makes
                    // the i-th distinct element the free variable
                    let mut modes: Vec<Option<usize>> = vec![None];
                    if distinct.len() >= 2 {
                        modes.extend((0..distinct.len()).map(Some));
                    }
                    for mode in modes {
                        let (order, pivot) = match mode {
                            None => (distinct.clone(), false),
                            Some(i) => {
                                let mut order = vec![distinct[i]];
                                order.extend(
                                    distinct.iter().filter(|&&e| e != distinct[i]),
                                );
                                (order, true)
                            }
                        };
                        let var_of: BTreeMap<usize, usize> = order
                            .iter()
                            .enumerate()
                            .map(|(v, &e)| (e, v))
                            .collect();
                        let pattern: Vec<usize> = tuple
                            .iter()
                            .map(|e| var_of[&side.index[e]])
                            .collect();
                        let nvars = order.len();
                        let assign = order.clone();
                        for body in self.bodies(
                            sigma,
                            id,
                            nvars,
                            &assign,
                            prop_snapshot,
                            (&sym.name, &pattern),
                        ) {
                            let block = BlockRep {
                                relation: sym.name.clone(),
                                pattern: pattern.clone(),
                                nvars,
                                pivot,
                                conjuncts: body,
                            };
                            candidates.push((Rep::Block(block), pivot));
                        }
                    }
                }
            }
        }
        for (rep, pivot) in candidates {
            if pivot {
                self.insert_prop(rep);
            } else {
                self.insert_sentence(rep);
            }
        }
        self.props.len() != props_before || self.sentences.len() != sents_before
    }

    /// Candidate bodies for a block over `nvars` variables whose witness
    /// configuration assigns `assign` (element indices of the generating
    /// side): the empty body, every single atomic or inequality literal,
    /// and the complete description of the configuration using every
    /// property generated so far.
    fn bodies(
        &self,
        sigma: &Vocabulary,
        id: SideId,
        nvars: usize,
        assign: &[usize],
        prop_snapshot: usize,
        guard: (&str, &[usize]),
    ) -> Vec<Vec<(Slot, bool)>> {
        let mut atom_slots: Vec<Slot> = Vec::new();
        for sym in sigma.symbols() {
            for pattern in crate::structures::surjective_patterns(sym.arity, nvars) {
                atom_slots.push(Slot::Pattern(sym.name.clone(), pattern));
            }
        }
        let mut eq_slots: Vec<Slot> = Vec::new();
        for u in 0..nvars {
            for v in (u + 1)..nvars {
                eq_slots.push(Slot::EqVars(u, v));
            }
        }
        let mut bodies = vec![Vec::new()];
        for slot in &atom_slots {
            bodies.push(vec![(slot.clone(), true)]);
            bodies.push(vec![(slot.clone(), false)]);
        }
        for slot in &eq_slots {
            bodies.push(vec![(slot.clone(), false)]);
        }
        // complete description of the witness configuration; the guard's
        // own pattern would repeat as a positive conjunct, so skip it
        let mut full: Vec<(Slot, bool)> = Vec::new();
        for slot in atom_slots.iter().chain(&eq_slots) {
            let sign = self.slot_truth(slot, id, assign);
            if sign {
                if let Slot::Pattern(rel, pattern) = slot {
                    if rel == guard.0 && pattern.as_slice() == guard.1 {
                        continue;
                    }
                }
            }
            full.push((slot.clone(), sign));
        }
        for p in 0..prop_snapshot {
            for (v, &e) in assign.iter().enumerate() {
                full.push((Slot::Prop(p, v), self.prop_bit(p, id, e)));
            }
        }
        bodies.push(full);
        bodies
    }

    /// Renders a generator as a formula with the given free variable. Bound
    /// variables are numbered freshly across nested blocks.
    fn materialize(&self, rep: &Rep, free: &Var, counter: &mut usize) -> Formula {
        match rep {
            Rep::Loop(rel, arity) => {
                Formula::Atom(Atom::new(rel.clone(), vec![free.clone(); *arity]))
            }
            Rep::Block(block) => {
                let mut names: Vec<Var> = Vec::with_capacity(block.nvars);
                let first_bound = if block.pivot {
                    names.push(free.clone());
                    1
                } else {
                    0
                };
                for _ in first_bound..block.nvars {
                    *counter += 1;
                    names.push(Var::new(format!("y{counter}")));
                }
                let bound: Vec<Var> = names[first_bound..].to_vec();
                let guard = Atom::new(
                    block.relation.clone(),
                    block.pattern.iter().map(|&v| names[v].clone()).collect(),
                );
                let conjuncts: Vec<Formula> = block
                    .conjuncts
                    .iter()
                    .map(|(slot, sign)| {
                        let f = match slot {
                            Slot::Pattern(rel, idxs) => Formula::Atom(Atom::new(
                                rel.clone(),
                                idxs.iter().map(|&v| names[v].clone()).collect(),
                            )),
                            Slot::EqVars(u, v) => {
                                Formula::Eq(names[*u].clone(), names[*v].clone())
                            }
                            Slot::Prop(p, v) => {
                                self.materialize(&self.props[*p].rep, &names[*v], counter)
                            }
                        };
                        if *sign {
                            f
                        } else {
                            Formula::not(f)
                        }
                    })
                    .collect();
                Formula::exists(bound, guard, Formula::conjoin(conjuncts))
            }
        }
    }
}

fn check_tuples(c: &[Elem], d: &[Elem]) -> Result<(), BisimError> {
    if c.len() != d.len() {
        return Err(BisimError::LengthMismatch(c.len(), d.len()));
    }
    Ok(())
}

fn tuple_assignment(vars: &[Var], elems: &[Elem]) -> BTreeMap<Var, Elem> {
    vars.iter().cloned().zip(elems.iter().cloned()).collect()
}

fn position_vars(n: usize) -> Vec<Var> {
    (1..=n).map(|i| Var::new(format!("x{i}"))).collect()
}

/// All atom formulas over the position variables, for the depth-0 layer of
/// the comparison.
fn atom_patterns(sigma: &Vocabulary, n: usize) -> Vec<Formula> {
    let vars = position_vars(n);
    let mut out = Vec::new();
    for sym in sigma.symbols() {
        let mut pattern = vec![0usize; sym.arity];
        loop {
            out.push(Formula::Atom(Atom::new(
                sym.name.clone(),
                pattern.iter().map(|&i| vars[i].clone()).collect(),
            )));
            let mut i = sym.arity;
            let mut done = true;
            while i > 0 {
                i -= 1;
                if pattern[i] + 1 < n {
                    pattern[i] += 1;
                    for p in pattern.iter_mut().skip(i + 1) {
                        *p = 0;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    out
}

struct Comparison<'a> {
    engine: Engine,
    a: &'a Structure,
    b: &'a Structure,
    c: &'a [Elem],
    d: &'a [Elem],
    sigma: &'a Vocabulary,
}

impl<'a> Comparison<'a> {
    fn new(
        a: &'a Structure,
        c: &'a [Elem],
        b: &'a Structure,
        d: &'a [Elem],
        sigma: &'a Vocabulary,
    ) -> Result<Self, BisimError> {
        check_tuples(c, d)?;
        let engine = Engine::new(a.reduct(sigma)?, b.reduct(sigma)?)?;
        Ok(Comparison { engine, a, b, c, d, sigma })
    }

    /// Depth-0 disagreements outside the engine: equalities between tuple
    /// positions and atoms over the position variables.
    fn direct_mismatch(&self) -> Result<Option<Formula>, BisimError> {
        let n = self.c.len();
        let vars = position_vars(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let on_a = self.c[i] == self.c[j];
                let on_b = self.d[i] == self.d[j];
                if on_a != on_b {
                    let eq = Formula::Eq(vars[i].clone(), vars[j].clone());
                    return Ok(Some(if on_a { eq } else { Formula::not(eq) }));
                }
            }
        }
        if n > 0 {
            let asg_a = tuple_assignment(&vars, self.c);
            let asg_b = tuple_assignment(&vars, self.d);
            for atom in atom_patterns(self.sigma, n) {
                let on_a = evaluate(self.a, &atom, &asg_a)
                    .map_err(|e| BisimError::Eval(e.to_string()))?;
                let on_b = evaluate(self.b, &atom, &asg_b)
                    .map_err(|e| BisimError::Eval(e.to_string()))?;
                if on_a != on_b {
                    return Ok(Some(if on_a { atom } else { Formula::not(atom) }));
                }
            }
        }
        Ok(None)
    }

    /// First disagreeing generator among engine entries with index at least
    /// the given watermarks, rendered as a formula true on the `(a, c)` side.
    fn engine_mismatch(&self, props_from: usize, sents_from: usize) -> Option<Formula> {
        let eng = &self.engine;
        for s in &eng.sentences[sents_from..] {
            if s.val_a != s.val_b {
                let mut counter = 0usize;
                let f = eng.materialize(&s.rep, &Var::new("x1"), &mut counter);
                return Some(if s.val_a { f } else { Formula::not(f) });
            }
        }
        for p in &eng.props[props_from..] {
            for (i, (ce, de)) in self.c.iter().zip(self.d).enumerate() {
                let bit_a = p.mask_a >> eng.a.index[ce] & 1 == 1;
                let bit_b = p.mask_b >> eng.b.index[de] & 1 == 1;
                if bit_a != bit_b {
                    let mut counter = 0usize;
                    let free = Var::new(format!("x{}", i + 1));
                    let f = eng.materialize(&p.rep, &free, &mut counter);
                    return Some(if bit_a { f } else { Formula::not(f) });
                }
            }
        }
        None
    }

    fn search(&mut self, max_depth: usize) -> Result<Option<Formula>, BisimError> {
        if let Some(f) = self.direct_mismatch()? {
            return Ok(Some(f));
        }
        self.engine.seed_atoms(self.sigma);
        if let Some(f) = self.engine_mismatch(0, 0) {
            return Ok(Some(f));
        }
        for _depth in 1..=max_depth {
            let props_before = self.engine.props.len();
            let sents_before = self.engine.sentences.len();
            let changed = self.engine.round(self.sigma);
            if let Some(f) = self.engine_mismatch(props_before, sents_before) {
                return Ok(Some(f));
            }
            if !changed {
                break;
            }
        }
        Ok(None)
    }
}

/// Whether the pointed structures agree on every uniform one-dimensional
/// guarded formula over `sigma` of block depth at most `depth` whose free
/// variables are assigned the tuples.
pub fn guf1_equivalent_up_to(
    a: &Structure,
    c: &[Elem],
    b: &Structure,
    d: &[Elem],
    sigma: &Vocabulary,
    depth: usize,
) -> Result<bool, BisimError> {
    let mut cmp = Comparison::new(a, c, b, d, sigma)?;
    Ok(cmp.search(depth)?.is_none())
}

/// A formula of block depth at most `max_depth` that holds of `(a, c)` and
/// fails of `(b, d)`, if one exists. The formula uses the variables
/// `x1..xn` for the tuple positions and is confirmed with the evaluator
/// before being returned.
pub fn distinguishing_formula(
    a: &Structure,
    c: &[Elem],
    b: &Structure,
    d: &[Elem],
    sigma: &Vocabulary,
    max_depth: usize,
) -> Result<Option<Formula>, BisimError> {
    let mut cmp = Comparison::new(a, c, b, d, sigma)?;
    let found = cmp.search(max_depth)?;
    if let Some(f) = &found {
        let vars = position_vars(c.len());
        let on_a = evaluate(a, f, &tuple_assignment(&vars, c))
            .map_err(|e| BisimError::Eval(e.to_string()))?;
        let on_b = evaluate(b, f, &tuple_assignment(&vars, d))
            .map_err(|e| BisimError::Eval(e.to_string()))?;
        if !on_a || on_b {
            return Err(BisimError::Internal(
                "candidate distinguishing formula fails evaluator confirmation".to_string(),
            ));
        }
    }
    Ok(found)
}
