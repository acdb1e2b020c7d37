//! Abstract syntax for guarded first-order formulas.
//!
//! Quantifiers come in two flavours. [`Formula::Exists`] and
//! [`Formula::Forall`] carry an explicit atomic guard and maintain the
//! guardedness invariant (bound variables and all free variables of the body
//! occur in the guard). [`Formula::RawExists`] and [`Formula::RawForall`] are
//! unguarded quantifier blocks; the strict parser rejects them but the
//! lenient parser produces them so that classification can still report on
//! formulas that fall outside the guarded grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A first-order variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A relation symbol with its arity. Arity zero is not allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        assert!(arity >= 1, "relation symbols must have arity >= 1");
        RelationSymbol { name: name.into(), arity }
    }
}

/// A finite relational vocabulary: relation symbols with unique names,
/// no constants or function symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    arities: BTreeMap<String, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("relation {0} declared with arities {1} and {2}")]
    ArityConflict(String, usize, usize),
    #[error("relation {0} has arity 0")]
    ZeroArity(String),
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    pub fn from_symbols<I: IntoIterator<Item = RelationSymbol>>(
        symbols: I,
    ) -> Result<Self, VocabularyError> {
        let mut v = Vocabulary::new();
        for s in symbols {
            v.insert(&s.name, s.arity)?;
        }
        Ok(v)
    }

    pub fn insert(&mut self, name: &str, arity: usize) -> Result<(), VocabularyError> {
        if arity == 0 {
            return Err(VocabularyError::ZeroArity(name.to_string()));
        }
        match self.arities.get(name) {
            Some(&a) if a != arity => {
                Err(VocabularyError::ArityConflict(name.to_string(), a, arity))
            }
            _ => {
                self.arities.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.arities.keys().map(|s| s.as_str())
    }

    pub fn symbols(&self) -> impl Iterator<Item = RelationSymbol> + '_ {
        self.arities
            .iter()
            .map(|(n, &a)| RelationSymbol { name: n.clone(), arity: a })
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.arities.values().copied().max().unwrap_or(0)
    }

    /// Symbols present in both vocabularies (names must agree on arity).
    pub fn intersection(&self, other: &Vocabulary) -> Vocabulary {
        let mut v = Vocabulary::new();
        for (n, &a) in &self.arities {
            if other.arity(n) == Some(a) {
                v.arities.insert(n.clone(), a);
            }
        }
        v
    }

    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary, VocabularyError> {
        let mut v = self.clone();
        for (n, &a) in &other.arities {
            v.insert(n, a)?;
        }
        Ok(v)
    }

    pub fn is_subset_of(&self, other: &Vocabulary) -> bool {
        self.arities.iter().all(|(n, &a)| other.arity(n) == Some(a))
    }
}

/// An atomic formula `R(x1,...,xk)`. Repeated variables are allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Var>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, args: Vec<Var>) -> Self {
        Atom { relation: relation.into(), args }
    }

    /// The set of distinct variables occurring in the atom.
    pub fn variables(&self) -> BTreeSet<Var> {
        self.args.iter().cloned().collect()
    }
}

/// A guarded quantifier block `Q ys. (alpha ∧/→ body)`.
///
/// Invariant: `bound ⊆ vars(guard)` and `free(body) ⊆ vars(guard)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guarded {
    pub bound: Vec<Var>,
    pub guard: Atom,
    pub body: Box<Formula>,
}

/// Guarded first-order formulas.
///
/// `Or` is kept as a node; implication and biconditional are desugared by
/// the parser. `Forall(ys, g, b)` abbreviates `Not(Exists(ys, g, Not(b)))`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Guarded),
    Forall(Guarded),
    /// Unguarded existential block; produced only by the lenient parser.
    RawExists(Vec<Var>, Box<Formula>),
    /// Unguarded universal block; produced only by the lenient parser.
    RawForall(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a -> b` desugared to `!a | b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn exists(bound: Vec<Var>, guard: Atom, body: Formula) -> Formula {
        Formula::Exists(Guarded { bound, guard, body: Box::new(body) })
    }

    pub fn forall(bound: Vec<Var>, guard: Atom, body: Formula) -> Formula {
        Formula::Forall(Guarded { bound, guard, body: Box::new(body) })
    }

    /// Right-folds a nonempty conjunct list the same way the parser does
    /// (left-associative); an empty list yields `true`.
    pub fn conjoin(conjuncts: Vec<Formula>) -> Formula {
        let mut it = conjuncts.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Flattens the left spine of an `And` chain, inverse of [`Formula::conjoin`].
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(l, r) => {
                    walk(l, out);
                    out.push(r);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Free variables under standard semantics; bound variables of both
    /// guarded and raw quantifier blocks are removed.
    pub fn free_variables(&self) -> BTreeSet<Var> {
        match self {
            Formula::True | Formula::False => BTreeSet::new(),
            Formula::Atom(a) => a.variables(),
            Formula::Eq(x, y) => [x.clone(), y.clone()].into_iter().collect(),
            Formula::Not(f) => f.free_variables(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                let mut s = l.free_variables();
                s.extend(r.free_variables());
                s
            }
            Formula::Exists(g) | Formula::Forall(g) => {
                let mut s = g.guard.variables();
                s.extend(g.body.free_variables());
                for v in &g.bound {
                    s.remove(v);
                }
                s
            }
            Formula::RawExists(bound, body) | Formula::RawForall(bound, body) => {
                let mut s = body.free_variables();
                for v in bound {
                    s.remove(v);
                }
                s
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Formula::Exists(_)
            | Formula::Forall(_)
            | Formula::RawExists(_, _)
            | Formula::RawForall(_, _) => false,
        }
    }

    /// Nesting depth of quantifier blocks.
    pub fn block_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => 0,
            Formula::Not(f) => f.block_depth(),
            Formula::And(l, r) | Formula::Or(l, r) => l.block_depth().max(r.block_depth()),
            Formula::Exists(g) | Formula::Forall(g) => 1 + g.body.block_depth(),
            Formula::RawExists(_, b) | Formula::RawForall(_, b) => 1 + b.block_depth(),
        }
    }

    /// Rewrites every universal block into its existential form
    /// `!exists ys. (guard & !body)`. Classification and subformula
    /// computation operate on this form.
    pub fn desugar_foralls(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar_foralls()),
            Formula::And(l, r) => Formula::and(l.desugar_foralls(), r.desugar_foralls()),
            Formula::Or(l, r) => Formula::or(l.desugar_foralls(), r.desugar_foralls()),
            Formula::Exists(g) => Formula::exists(
                g.bound.clone(),
                g.guard.clone(),
                g.body.desugar_foralls(),
            ),
            Formula::Forall(g) => Formula::not(Formula::exists(
                g.bound.clone(),
                g.guard.clone(),
                Formula::not(g.body.desugar_foralls()),
            )),
            Formula::RawExists(b, f) => {
                Formula::RawExists(b.clone(), Box::new(f.desugar_foralls()))
            }
            Formula::RawForall(b, f) => Formula::not(Formula::RawExists(
                b.clone(),
                Box::new(Formula::not(f.desugar_foralls())),
            )),
        }
    }

    /// The subformulas of `self`, computed on the universal-free form.
    ///
    /// Standard recursion, except that at a guarded block the matrix
    /// `guard & body` is kept as one unit: the guard is never separated from
    /// the quantified matrix at the top level of the block.
    pub fn subformulas(&self) -> Vec<Formula> {
        let desugared = self.desugar_foralls();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        fn walk(f: &Formula, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
            if seen.insert(f.clone()) {
                out.push(f.clone());
            }
            match f {
                Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => {}
                Formula::Not(g) => walk(g, seen, out),
                Formula::And(l, r) | Formula::Or(l, r) => {
                    walk(l, seen, out);
                    walk(r, seen, out);
                }
                Formula::Exists(g) => {
                    let matrix =
                        Formula::and(Formula::Atom(g.guard.clone()), (*g.body).clone());
                    walk(&matrix, seen, out);
                }
                Formula::RawExists(_, body) => walk(body, seen, out),
                Formula::Forall(_) | Formula::RawForall(_, _) => {
                    unreachable!("universal blocks are desugared before recursion")
                }
            }
        }
        walk(&desugared, &mut seen, &mut out);
        out
    }

    /// The vocabulary induced by the atoms of the formula.
    pub fn vocabulary(&self) -> Result<Vocabulary, VocabularyError> {
        let mut v = Vocabulary::new();
        self.collect_vocabulary(&mut v)?;
        Ok(v)
    }

    fn collect_vocabulary(&self, v: &mut Vocabulary) -> Result<(), VocabularyError> {
        match self {
            Formula::True | Formula::False | Formula::Eq(_, _) => Ok(()),
            Formula::Atom(a) => v.insert(&a.relation, a.args.len()),
            Formula::Not(f) => f.collect_vocabulary(v),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_vocabulary(v)?;
                r.collect_vocabulary(v)
            }
            Formula::Exists(g) | Formula::Forall(g) => {
                v.insert(&g.guard.relation, g.guard.args.len())?;
                g.body.collect_vocabulary(v)
            }
            Formula::RawExists(_, f) | Formula::RawForall(_, f) => f.collect_vocabulary(v),
        }
    }

    /// Renames every free occurrence of `from` to `to`. Quantifier blocks
    /// binding `from` are left untouched.
    pub fn rename_free_var(&self, from: &Var, to: &Var) -> Formula {
        let ren = |v: &Var| if v == from { to.clone() } else { v.clone() };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(Atom {
                relation: a.relation.clone(),
                args: a.args.iter().map(ren).collect(),
            }),
            Formula::Eq(x, y) => Formula::Eq(ren(x), ren(y)),
            Formula::Not(f) => Formula::not(f.rename_free_var(from, to)),
            Formula::And(l, r) => {
                Formula::and(l.rename_free_var(from, to), r.rename_free_var(from, to))
            }
            Formula::Or(l, r) => {
                Formula::or(l.rename_free_var(from, to), r.rename_free_var(from, to))
            }
            Formula::Exists(g) | Formula::Forall(g) => {
                let rebuild = |g: Guarded| match self {
                    Formula::Exists(_) => Formula::Exists(g),
                    _ => Formula::Forall(g),
                };
                if g.bound.contains(from) {
                    rebuild(g.clone())
                } else {
                    rebuild(Guarded {
                        bound: g.bound.clone(),
                        guard: Atom {
                            relation: g.guard.relation.clone(),
                            args: g.guard.args.iter().map(ren).collect(),
                        },
                        body: Box::new(g.body.rename_free_var(from, to)),
                    })
                }
            }
            Formula::RawExists(bound, body) => {
                if bound.contains(from) {
                    self.clone()
                } else {
                    Formula::RawExists(bound.clone(), Box::new(body.rename_free_var(from, to)))
                }
            }
            Formula::RawForall(bound, body) => {
                if bound.contains(from) {
                    self.clone()
                } else {
                    Formula::RawForall(bound.clone(), Box::new(body.rename_free_var(from, to)))
                }
            }
        }
    }

    /// Number of symbols in the formula: one per connective or quantifier
    /// block, plus `1 + arity` per atom and 3 per equality.
    pub fn symbol_size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(a) => 1 + a.args.len(),
            Formula::Eq(_, _) => 3,
            Formula::Not(f) => 1 + f.symbol_size(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.symbol_size() + r.symbol_size(),
            Formula::Exists(g) | Formula::Forall(g) => {
                1 + g.bound.len() + (1 + g.guard.args.len()) + g.body.symbol_size()
            }
            Formula::RawExists(b, f) | Formula::RawForall(b, f) => {
                1 + b.len() + f.symbol_size()
            }
        }
    }

    /// True when the formula contains no raw (unguarded) quantifier blocks.
    pub fn is_guarded(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => true,
            Formula::Not(f) => f.is_guarded(),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_guarded() && r.is_guarded(),
            Formula::Exists(g) | Formula::Forall(g) => g.body.is_guarded(),
            Formula::RawExists(_, _) | Formula::RawForall(_, _) => false,
        }
    }
}

pub fn var(name: &str) -> Var {
    Var::new(name)
}
