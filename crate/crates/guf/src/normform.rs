//! Normal form for guarded sentences and the branching transformation
//! into it.
//!
//! A sentence in normal form is a conjunction of three kinds of conjuncts:
//! seeds `exists z. L(z)`, existential requirements
//! `forall xs. (a(xs) -> exists ys. (b(xs,ys) & psi))` and universal
//! requirements `forall xs. (k(xs) -> (theta -> forall ys. (g(xs,ys) -> psi)))`,
//! with quantifier-free bodies and at least one conjunct of each kind. The
//! `ys` tuples may be empty; the `xs` tuples may not.
//!
//! [`to_normal_form`] eliminates nested quantification: innermost sentence
//! blocks are replaced by a truth-value guess (both guesses are explored,
//! false first), innermost open blocks are replaced by a fresh relation over
//! their free variables together with two requirements tying the fresh
//! relation to the block, and the surviving top-level blocks are seeded
//! through fresh unary relations. Every branch result is polynomial in the
//! input: at most `12 * n^2` symbols for an input of `n` symbols.

use thiserror::Error;

use crate::syntax::{
    Atom, Formula, Guarded, RelationSymbol, Var, Vocabulary, VocabularyError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormFormError {
    #[error("normal form transformation expects a sentence")]
    NotASentence,
    #[error("normal form transformation expects a guarded formula")]
    NotGuarded,
    #[error("guess branching exceeded {0} branches")]
    TooManyBranches(usize),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
}

/// `exists z. L(z)` for a fresh unary relation `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedConjunct {
    pub lambda: String,
    pub var: Var,
}

/// `forall xs. (alpha(xs) -> exists ys. (beta(xs,ys) & psi))`.
/// With empty `ys` the inner block collapses to `beta & psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistentialReq {
    pub xs: Vec<Var>,
    pub alpha: Atom,
    pub ys: Vec<Var>,
    pub beta: Atom,
    pub psi: Formula,
}

/// `forall xs. (kappa(xs) -> (theta -> forall ys. (gamma(xs,ys) -> psi)))`.
/// With empty `ys` the inner block collapses to `gamma -> psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalReq {
    pub xs: Vec<Var>,
    pub kappa: Atom,
    pub theta: Formula,
    pub ys: Vec<Var>,
    pub gamma: Atom,
    pub psi: Formula,
}

/// A decomposed normal-form sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormSentence {
    pub vocabulary: Vocabulary,
    pub seeds: Vec<SeedConjunct>,
    pub existential: Vec<ExistentialReq>,
    pub universal: Vec<UniversalReq>,
}

impl SeedConjunct {
    pub fn as_formula(&self) -> Formula {
        Formula::exists(
            vec![self.var.clone()],
            Atom::new(self.lambda.clone(), vec![self.var.clone()]),
            Formula::True,
        )
    }
}

impl ExistentialReq {
    pub fn as_formula(&self) -> Formula {
        let inner = if self.ys.is_empty() {
            Formula::and(Formula::Atom(self.beta.clone()), self.psi.clone())
        } else {
            Formula::exists(self.ys.clone(), self.beta.clone(), self.psi.clone())
        };
        Formula::forall(self.xs.clone(), self.alpha.clone(), inner)
    }
}

impl UniversalReq {
    pub fn as_formula(&self) -> Formula {
        let inner = if self.ys.is_empty() {
            Formula::implies(Formula::Atom(self.gamma.clone()), self.psi.clone())
        } else {
            Formula::forall(self.ys.clone(), self.gamma.clone(), self.psi.clone())
        };
        let body = Formula::implies(self.theta.clone(), inner);
        Formula::forall(self.xs.clone(), self.kappa.clone(), body)
    }
}

impl NormalFormSentence {
    /// The sentence assembled from the decomposition: seeds, then
    /// existential requirements, then universal requirements.
    pub fn as_sentence(&self) -> Formula {
        let mut parts: Vec<Formula> = self.seeds.iter().map(|s| s.as_formula()).collect();
        parts.extend(self.existential.iter().map(|r| r.as_formula()));
        parts.extend(self.universal.iter().map(|r| r.as_formula()));
        Formula::conjoin(parts)
    }
}

/// The existential and universal requirement lists of a decomposition.
pub fn requirements(nf: &NormalFormSentence) -> (&[ExistentialReq], &[UniversalReq]) {
    (&nf.existential, &nf.universal)
}

fn match_seed(g: &Guarded) -> Option<SeedConjunct> {
    if g.bound.len() == 1
        && g.guard.args == vec![g.bound[0].clone()]
        && *g.body == Formula::True
    {
        Some(SeedConjunct { lambda: g.guard.relation.clone(), var: g.bound[0].clone() })
    } else {
        None
    }
}

fn match_universal(g: &Guarded) -> Option<UniversalReq> {
    let Formula::Or(not_theta, rest) = g.body.as_ref() else {
        return None;
    };
    let Formula::Not(theta) = not_theta.as_ref() else {
        return None;
    };
    if !theta.is_quantifier_free() {
        return None;
    }
    match rest.as_ref() {
        Formula::Forall(inner) if inner.body.is_quantifier_free() => Some(UniversalReq {
            xs: g.bound.clone(),
            kappa: g.guard.clone(),
            theta: (**theta).clone(),
            ys: inner.bound.clone(),
            gamma: inner.guard.clone(),
            psi: (*inner.body).clone(),
        }),
        Formula::Or(not_gamma, psi) => {
            let Formula::Not(gamma) = not_gamma.as_ref() else {
                return None;
            };
            let Formula::Atom(gamma) = gamma.as_ref() else {
                return None;
            };
            if !psi.is_quantifier_free() {
                return None;
            }
            Some(UniversalReq {
                xs: g.bound.clone(),
                kappa: g.guard.clone(),
                theta: (**theta).clone(),
                ys: Vec::new(),
                gamma: gamma.clone(),
                psi: (**psi).clone(),
            })
        }
        _ => None,
    }
}

fn match_existential(g: &Guarded) -> Option<ExistentialReq> {
    match g.body.as_ref() {
        Formula::Exists(inner) if inner.body.is_quantifier_free() => Some(ExistentialReq {
            xs: g.bound.clone(),
            alpha: g.guard.clone(),
            ys: inner.bound.clone(),
            beta: inner.guard.clone(),
            psi: (*inner.body).clone(),
        }),
        body if body.is_quantifier_free() => Some(ExistentialReq {
            xs: g.bound.clone(),
            alpha: g.guard.clone(),
            ys: Vec::new(),
            beta: g.guard.clone(),
            psi: body.clone(),
        }),
        _ => None,
    }
}

/// Decomposes a sentence that syntactically matches the normal-form shape.
/// The three conjunct groups may be interleaved, but each must be nonempty.
pub fn is_normal_form(f: &Formula) -> Option<NormalFormSentence> {
    if !f.is_sentence() {
        return None;
    }
    let vocabulary = f.vocabulary().ok()?;
    let mut seeds = Vec::new();
    let mut existential = Vec::new();
    let mut universal = Vec::new();
    for conjunct in f.conjuncts() {
        match conjunct {
            Formula::Exists(g) => seeds.push(match_seed(g)?),
            Formula::Forall(g) => {
                if let Some(u) = match_universal(g) {
                    universal.push(u);
                } else {
                    existential.push(match_existential(g)?);
                }
            }
            _ => return None,
        }
    }
    if seeds.is_empty() || existential.is_empty() || universal.is_empty() {
        return None;
    }
    Some(NormalFormSentence { vocabulary, seeds, existential, universal })
}

/// One run of the guessing procedure.
#[derive(Debug, Clone)]
pub struct NormalFormBranch {
    /// Sentence subformulas encountered, with the guessed truth value.
    pub guesses: Vec<(Formula, bool)>,
    pub result: NormalFormSentence,
    pub fresh_symbols: Vec<RelationSymbol>,
}

const MAX_BRANCHES: usize = 4096;

fn constant_fold(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => f.clone(),
        Formula::Not(g) => match constant_fold(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            g => Formula::not(g),
        },
        Formula::And(l, r) => match (constant_fold(l), constant_fold(r)) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, r) => r,
            (l, Formula::True) => l,
            (l, r) => Formula::and(l, r),
        },
        Formula::Or(l, r) => match (constant_fold(l), constant_fold(r)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, r) => r,
            (l, Formula::False) => l,
            (l, r) => Formula::or(l, r),
        },
        Formula::Exists(g) => match constant_fold(&g.body) {
            Formula::False => Formula::False,
            body => Formula::exists(g.bound.clone(), g.guard.clone(), body),
        },
        Formula::Forall(_) | Formula::RawExists(_, _) | Formula::RawForall(_, _) => {
            unreachable!("the transformation works on desugared guarded formulas")
        }
    }
}

/// The leftmost innermost existential block and the guard of its nearest
/// enclosing block.
fn find_innermost<'a>(
    f: &'a Formula,
    enclosing: Option<&'a Atom>,
) -> Option<(&'a Guarded, Option<&'a Atom>)> {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => None,
        Formula::Not(g) => find_innermost(g, enclosing),
        Formula::And(l, r) | Formula::Or(l, r) => {
            find_innermost(l, enclosing).or_else(|| find_innermost(r, enclosing))
        }
        Formula::Exists(g) => {
            find_innermost(&g.body, Some(&g.guard)).or(Some((g, enclosing)))
        }
        Formula::Forall(_) | Formula::RawExists(_, _) | Formula::RawForall(_, _) => {
            unreachable!("the transformation works on desugared guarded formulas")
        }
    }
}

/// Replaces the leftmost innermost existential block with `value`, using
/// the same traversal as [`find_innermost`].
fn replace_innermost(f: &Formula, value: &Formula) -> (Formula, bool) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Eq(_, _) => {
            (f.clone(), false)
        }
        Formula::Not(g) => {
            let (g, done) = replace_innermost(g, value);
            (Formula::not(g), done)
        }
        Formula::And(l, r) => {
            let (l2, done) = replace_innermost(l, value);
            if done {
                (Formula::and(l2, (**r).clone()), true)
            } else {
                let (r2, done) = replace_innermost(r, value);
                (Formula::and((**l).clone(), r2), done)
            }
        }
        Formula::Or(l, r) => {
            let (l2, done) = replace_innermost(l, value);
            if done {
                (Formula::or(l2, (**r).clone()), true)
            } else {
                let (r2, done) = replace_innermost(r, value);
                (Formula::or((**l).clone(), r2), done)
            }
        }
        Formula::Exists(g) => {
            let (body, done) = replace_innermost(&g.body, value);
            if done {
                (
                    Formula::exists(g.bound.clone(), g.guard.clone(), body),
                    true,
                )
            } else {
                (value.clone(), true)
            }
        }
        Formula::Forall(_) | Formula::RawExists(_, _) | Formula::RawForall(_, _) => {
            unreachable!("the transformation works on desugared guarded formulas")
        }
    }
}

struct FreshNames {
    vocabulary: Vocabulary,
    next_relation: usize,
    next_seed: usize,
}

impl FreshNames {
    fn relation(&mut self, arity: usize) -> RelationSymbol {
        loop {
            self.next_relation += 1;
            let name = format!("_NF{}", self.next_relation);
            if !self.vocabulary.contains(&name) {
                self.vocabulary.insert(&name, arity).expect("fresh name");
                return RelationSymbol::new(name, arity);
            }
        }
    }

    fn seed(&mut self) -> RelationSymbol {
        loop {
            self.next_seed += 1;
            let name = format!("_L{}", self.next_seed);
            if !self.vocabulary.contains(&name) {
                self.vocabulary.insert(&name, 1).expect("fresh name");
                return RelationSymbol::new(name, 1);
            }
        }
    }
}

#[derive(Clone)]
struct BranchState {
    main: Formula,
    guesses: Vec<(Formula, bool)>,
    tops: Vec<Guarded>,
    existential: Vec<ExistentialReq>,
    universal: Vec<UniversalReq>,
    fresh_symbols: Vec<RelationSymbol>,
}

/// Transforms a guarded sentence into normal form, exploring every guess of
/// the sentence-subformula elimination (false before true). Dead guesses
/// (the main sentence folds to false) are pruned. Intended for uniform
/// sentences, for which every branch result is again uniform; the
/// transformation itself applies to any guarded sentence and preserves
/// satisfiability branchwise.
pub fn to_normal_form(f: &Formula) -> Result<Vec<NormalFormBranch>, NormFormError> {
    if !f.is_sentence() {
        return Err(NormFormError::NotASentence);
    }
    if !f.is_guarded() {
        return Err(NormFormError::NotGuarded);
    }
    let vocabulary = f.vocabulary()?;
    let mut names = FreshNames {
        vocabulary: vocabulary.clone(),
        next_relation: 0,
        next_seed: 0,
    };
    let start = BranchState {
        main: f.desugar_foralls(),
        guesses: Vec::new(),
        tops: Vec::new(),
        existential: Vec::new(),
        universal: Vec::new(),
        fresh_symbols: Vec::new(),
    };
    let mut pending = vec![start];
    let mut finished: Vec<BranchState> = Vec::new();
    while let Some(mut state) = pending.pop() {
        if pending.len() + finished.len() > MAX_BRANCHES {
            return Err(NormFormError::TooManyBranches(MAX_BRANCHES));
        }
        state.main = constant_fold(&state.main);
        if state.main == Formula::False {
            continue;
        }
        let found = find_innermost(&state.main, None).map(|(g, enc)| {
            (g.clone(), enc.cloned())
        });
        match found {
            None => {
                assert_eq!(state.main, Formula::True, "a block-free sentence folds to a constant");
                finished.push(state);
            }
            Some((block, enclosing)) => {
                let block_formula = Formula::Exists(block.clone());
                let free: Vec<Var> = block_formula.free_variables().into_iter().collect();
                if free.is_empty() {
                    // a sentence subformula: guess false, then true; the
                    // stack pops true first, keeping output order false-first
                    let mut true_branch = state.clone();
                    let (main, replaced) =
                        replace_innermost(&true_branch.main, &Formula::True);
                    assert!(replaced);
                    true_branch.main = main;
                    true_branch.guesses.push((block_formula.clone(), true));
                    true_branch.tops.push(block.clone());

                    let mut false_branch = state;
                    let (main, replaced) =
                        replace_innermost(&false_branch.main, &Formula::False);
                    assert!(replaced);
                    false_branch.main = main;
                    false_branch.guesses.push((block_formula.clone(), false));
                    false_branch.universal.push(UniversalReq {
                        xs: block.bound.clone(),
                        kappa: block.guard.clone(),
                        theta: Formula::True,
                        ys: Vec::new(),
                        gamma: block.guard.clone(),
                        psi: Formula::not((*block.body).clone()),
                    });
                    pending.push(true_branch);
                    pending.push(false_branch);
                }  else {
                    // an open block under an enclosing guard: replace it by
                    // a fresh relation over its free variables and add the
                    // two requirements that tie the relation to the block
                    let enclosing = enclosing
                        .expect("an open block in a sentence has an enclosing block");
                    let fresh = names.relation(free.len());
                    let fresh_atom = Atom::new(fresh.name.clone(), free.clone());
                    state.fresh_symbols.push(fresh.clone());
                    let (main, replaced) = replace_innermost(
                        &state.main,
                        &Formula::Atom(fresh_atom.clone()),
                    );
                    assert!(replaced);
                    state.main = main;
                    state.existential.push(ExistentialReq {
                        xs: free.clone(),
                        alpha: fresh_atom.clone(),
                        ys: block.bound.clone(),
                        beta: block.guard.clone(),
                        psi: (*block.body).clone(),
                    });
                    let enclosing_vars: Vec<Var> =
                        Formula::Atom(enclosing.clone()).free_variables().into_iter().collect();
                    state.universal.push(UniversalReq {
                        xs: enclosing_vars,
                        kappa: enclosing.clone(),
                        theta: Formula::not(Formula::Atom(fresh_atom)),
                        ys: block.bound.clone(),
                        gamma: block.guard.clone(),
                        psi: Formula::not((*block.body).clone()),
                    });
                    pending.push(state);
                }
            }
        }
    }

    let mut branches = Vec::new();
    for state in finished {
        let mut seeds = Vec::new();
        let mut existential = state.existential;
        let universal_base = state.universal;
        let mut fresh_symbols = state.fresh_symbols;
        for top in &state.tops {
            let lambda = names.seed();
            fresh_symbols.push(lambda.clone());
            let x1 = top.bound[0].clone();
            seeds.push(SeedConjunct { lambda: lambda.name.clone(), var: x1.clone() });
            existential.push(ExistentialReq {
                xs: vec![x1.clone()],
                alpha: Atom::new(lambda.name.clone(), vec![x1]),
                ys: top.bound[1..].to_vec(),
                beta: top.guard.clone(),
                psi: (*top.body).clone(),
            });
        }
        let mut universal = universal_base;
        if seeds.is_empty() {
            let lambda = names.seed();
            fresh_symbols.push(lambda.clone());
            seeds.push(SeedConjunct { lambda: lambda.name.clone(), var: Var::new("z") });
        }
        let anchor = seeds[0].lambda.clone();
        let x1 = Var::new("x1");
        if existential.is_empty() {
            existential.push(ExistentialReq {
                xs: vec![x1.clone()],
                alpha: Atom::new(anchor.clone(), vec![x1.clone()]),
                ys: Vec::new(),
                beta: Atom::new(anchor.clone(), vec![x1.clone()]),
                psi: Formula::True,
            });
        }
        if universal.is_empty() {
            universal.push(UniversalReq {
                xs: vec![x1.clone()],
                kappa: Atom::new(anchor.clone(), vec![x1.clone()]),
                theta: Formula::True,
                ys: Vec::new(),
                gamma: Atom::new(anchor.clone(), vec![x1.clone()]),
                psi: Formula::True,
            });
        }
        let mut vocabulary = vocabulary.clone();
        for sym in &fresh_symbols {
            vocabulary.insert(&sym.name, sym.arity)?;
        }
        let result = NormalFormSentence { vocabulary, seeds, existential, universal };
        debug_assert!(
            is_normal_form(&result.as_sentence()).is_some(),
            "assembled branch is not in normal form"
        );
        branches.push(NormalFormBranch {
            guesses: state.guesses,
            result,
            fresh_symbols,
        });
    }
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{brute_force_sat, evaluate};
    use crate::syntax::{classify, parse};
    use std::collections::BTreeMap;

    const RUNNING: &str = "exists z. P(z) & forall x. (P(x) -> exists y. (R(x,y) & P(y))) \
                           & forall x. (P(x) -> (true -> forall y. (R(x,y) -> true)))";

    #[test]
    fn running_example_decomposes_with_singleton_groups() {
        let f = parse(RUNNING).unwrap();
        let nf = is_normal_form(&f).expect("shape matches");
        assert_eq!(nf.seeds.len(), 1);
        assert_eq!(nf.existential.len(), 1);
        assert_eq!(nf.universal.len(), 1);
        let (e, u) = requirements(&nf);
        assert_eq!(e.len(), 1);
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn phi_alone_is_not_normal_form() {
        let phi = parse("exists x y z. (G(x,y,z) & R(x,y) & R(y,z) & R(z,x))").unwrap();
        assert!(is_normal_form(&phi).is_none());
    }

    #[test]
    fn empty_ys_requirement_is_existential() {
        let f = parse(
            "exists z. P(z) & forall x. (P(x) -> Q(x)) \
             & forall x. (P(x) -> (true -> forall y. (R(x,y) -> true)))",
        )
        .unwrap();
        let nf = is_normal_form(&f).unwrap();
        assert_eq!(nf.existential.len(), 1);
        assert!(nf.existential[0].ys.is_empty());
        assert_eq!(nf.universal.len(), 1);
    }

    #[test]
    fn transformation_outputs_match_the_shape() {
        for text in [
            RUNNING,
            "exists x. (P(x) & exists y. (R(x,y) & P(y)))",
            "exists x y z. (G(x,y,z) & R(x,y) & R(y,z) & R(z,x))",
            "!exists x. (P(x) & true)",
            "exists x. (P(x) & true) | exists x. (Q(x) & true)",
        ] {
            let f = parse(text).unwrap();
            let branches = to_normal_form(&f).unwrap();
            assert!(!branches.is_empty(), "no live branch for {text}");
            for b in &branches {
                let sentence = b.result.as_sentence();
                assert!(is_normal_form(&sentence).is_some(), "branch of {text} fails the shape");
                for sym in &b.fresh_symbols {
                    assert!(
                        f.vocabulary().unwrap().arity(&sym.name).is_none(),
                        "fresh symbol collides with the input vocabulary"
                    );
                }
            }
        }
    }

    #[test]
    fn nested_block_produces_one_fresh_relation() {
        let f = parse("exists x. (P(x) & exists y. (R(x,y) & P(y)))").unwrap();
        let branches = to_normal_form(&f).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        let nf_rels: Vec<_> = b
            .fresh_symbols
            .iter()
            .filter(|s| s.name.starts_with("_NF"))
            .collect();
        assert_eq!(nf_rels.len(), 1);
        assert_eq!(nf_rels[0].arity, 1);
    }

    #[test]
    fn already_seed_shaped_input_gets_only_seed_symbols() {
        let f = parse("exists x. (P(x) & true)").unwrap();
        let branches = to_normal_form(&f).unwrap();
        assert_eq!(branches.len(), 1);
        assert!(branches[0]
            .fresh_symbols
            .iter()
            .all(|s| s.name.starts_with("_L")));
    }

    #[test]
    fn uniform_branches_stay_uniform() {
        for text in [
            RUNNING,
            "exists x. (P(x) & exists y. (R(x,y) & P(y)))",
            "exists x y. (R(x,y) & P(x) & exists z. (S(x,y,z) & true))",
        ] {
            let f = parse(text).unwrap();
            assert!(classify(&f).uniform, "test sentence {text} is not uniform");
            for b in to_normal_form(&f).unwrap() {
                let report = classify(&b.result.as_sentence());
                assert!(report.uniform, "branch of {text} lost uniformity");
            }
        }
    }

    #[test]
    fn branch_count_and_size_bounds() {
        for text in [
            RUNNING,
            "exists x. (P(x) & exists y. (R(x,y) & exists z. (S(x,y,z) & P(z))))",
            "!exists x. (P(x) & true) & exists y. (Q(y) & true)",
        ] {
            let f = parse(text).unwrap();
            let sentence_blocks = f
                .subformulas()
                .iter()
                .filter(|s| matches!(s, Formula::Exists(_)) && s.is_sentence())
                .count();
            let branches = to_normal_form(&f).unwrap();
            assert!(branches.len() <= 1 << sentence_blocks);
            let n = f.symbol_size();
            for b in &branches {
                assert!(
                    b.result.as_sentence().symbol_size() <= 12 * n * n,
                    "branch exceeds the documented size bound"
                );
            }
        }
    }

    #[test]
    fn bounded_equisatisfiability_holds() {
        // satisfiable at size 3 iff some branch result has a model of size 3
        // whose reduct models the input
        for text in [
            RUNNING,
            "exists x. (P(x) & exists y. (R(x,y) & !P(y)))",
            "exists x. (P(x) & !P(x))",
            "!exists x. (P(x) & true)",
            "exists x. (R(x,x) & true) & !exists x y. (R(x,y) & P(y))",
        ] {
            let f = parse(text).unwrap();
            let direct = brute_force_sat(&f, 3).unwrap().is_some();
            let mut via_branches = false;
            for b in to_normal_form(&f).unwrap() {
                let sentence = b.result.as_sentence();
                if let Some(model) = brute_force_sat(&sentence, 3).unwrap() {
                    let reduct = model.reduct(&f.vocabulary().unwrap()).unwrap();
                    assert!(
                        evaluate(&reduct, &f, &BTreeMap::new()).unwrap(),
                        "branch model reduct fails the input sentence {text}"
                    );
                    via_branches = true;
                    break;
                }
            }
            assert_eq!(direct, via_branches, "equisatisfiability failed for {text}");
        }
    }

    #[test]
    fn guesses_are_explored_false_first() {
        let f = parse("exists x. (P(x) & true) | exists x. (Q(x) & true)").unwrap();
        let branches = to_normal_form(&f).unwrap();
        assert!(branches.len() >= 2);
        // the first live branch guesses false for the first block
        assert_eq!(branches[0].guesses[0].1, false);
    }

    #[test]
    fn open_formulas_and_raw_blocks_are_rejected() {
        assert!(matches!(
            to_normal_form(&parse("P(x)").unwrap()),
            Err(NormFormError::NotASentence)
        ));
        let raw = crate::syntax::parse_lenient("exists x y. (P(x) & P(y))").unwrap();
        assert!(matches!(to_normal_form(&raw), Err(NormFormError::NotGuarded)));
    }
}
