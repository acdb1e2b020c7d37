//! Seeded random generators for structures, guarded formulas and modal
//! formulas. All generators are deterministic in the seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::structures::{Elem, Structure};
use crate::syntax::{Atom, Formula, ModalFormula, Var, Vocabulary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random structure over the vocabulary with exactly `size` elements named
/// `1..size`; each potential tuple is included with probability `density`.
pub fn random_structure(
    vocab: &Vocabulary,
    size: usize,
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Structure {
    let elems: Vec<Elem> = (1..=size).map(|i| Elem::new(i.to_string())).collect();
    let mut s = Structure::new(vocab.clone(), elems.iter().cloned()).expect("nonempty domain");
    for sym in vocab.symbols() {
        let mut tuple = vec![0usize; sym.arity];
        loop {
            if rng.gen_bool(density) {
                let t: Vec<Elem> = tuple.iter().map(|&i| elems[i].clone()).collect();
                s.add_tuple(&sym.name, t).expect("tuple over the domain");
            }
            let mut i = sym.arity;
            let mut done = true;
            while i > 0 {
                i -= 1;
                if tuple[i] + 1 < size {
                    tuple[i] += 1;
                    for t in tuple.iter_mut().skip(i + 1) {
                        *t = 0;
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
    s
}

/// A random guarded formula over the vocabulary with free variables drawn
/// from `free`. Quantifier blocks always receive a covering guard, so the
/// output parses back from its printed form.
pub fn random_formula(
    vocab: &Vocabulary,
    free: &[Var],
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Formula {
    let symbols: Vec<_> = vocab.symbols().collect();
    assert!(!symbols.is_empty(), "vocabulary must be nonempty");
    let kind = if depth == 0 { rng.gen_range(0..6) } else { rng.gen_range(0..8) };
    match kind {
        0 => Formula::True,
        1 => Formula::False,
        2 | 3 => {
            if free.is_empty() || (kind == 2 && !symbols.is_empty()) {
                // atom over available free variables, or a closed fallback
                if free.is_empty() {
                    return Formula::True;
                }
                let sym = symbols.choose(rng).unwrap();
                let args = (0..sym.arity)
                    .map(|_| free.choose(rng).unwrap().clone())
                    .collect();
                Formula::Atom(Atom::new(sym.name.clone(), args))
            } else {
                let x = free.choose(rng).unwrap().clone();
                let y = free.choose(rng).unwrap().clone();
                Formula::Eq(x, y)
            }
        }
        4 => Formula::not(random_formula(vocab, free, depth.saturating_sub(1), rng)),
        5 => {
            let l = random_formula(vocab, free, depth.saturating_sub(1), rng);
            let r = random_formula(vocab, free, depth.saturating_sub(1), rng);
            if rng.gen_bool(0.5) {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        _ => {
            // guarded block: choose a guard relation, fill its argument
            // positions with a mix of fresh bound variables and free ones
            let sym = symbols
                .iter()
                .filter(|s| s.arity >= 1)
                .choose(rng)
                .unwrap()
                .clone();
            let mut bound: Vec<Var> = Vec::new();
            let mut args: Vec<Var> = Vec::new();
            for i in 0..sym.arity {
                let reuse_free = !free.is_empty() && rng.gen_bool(0.3);
                let reuse_bound = !bound.is_empty() && rng.gen_bool(0.3);
                if reuse_free {
                    args.push(free.choose(rng).unwrap().clone());
                } else if reuse_bound {
                    args.push(bound.choose(rng).unwrap().clone());
                } else {
                    let v = Var::new(format!("b{}_{}", depth, i));
                    bound.push(v.clone());
                    args.push(v);
                }
            }
            if bound.is_empty() {
                let v = Var::new(format!("b{depth}_0"));
                bound.push(v.clone());
                args[0] = v;
            }
            let guard = Atom::new(sym.name.clone(), args.clone());
            // the body may use any guard variable
            let scope: Vec<Var> = guard.variables().into_iter().collect();
            let body = random_formula(vocab, &scope, depth - 1, rng);
            if rng.gen_bool(0.5) {
                Formula::exists(bound, guard, body)
            } else {
                Formula::forall(bound, guard, body)
            }
        }
    }
}

/// A random polyadic modal formula over proposition letters `p`, `q` and
/// diamonds `R` (binary) and `S` (ternary accessibility).
pub fn random_modal_formula(depth: usize, rng: &mut ChaCha8Rng) -> ModalFormula {
    let kind = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..5) };
    match kind {
        0 => ModalFormula::prop(if rng.gen_bool(0.5) { "p" } else { "q" }),
        1 => {
            if rng.gen_bool(0.5) {
                ModalFormula::True
            } else {
                ModalFormula::False
            }
        }
        2 => ModalFormula::not(random_modal_formula(depth - 1, rng)),
        3 => {
            let l = random_modal_formula(depth - 1, rng);
            let r = random_modal_formula(depth - 1, rng);
            if rng.gen_bool(0.5) {
                ModalFormula::and(l, r)
            } else {
                ModalFormula::or(l, r)
            }
        }
        _ => {
            if rng.gen_bool(0.5) {
                ModalFormula::diamond("R", vec![random_modal_formula(depth - 1, rng)])
            } else {
                ModalFormula::diamond(
                    "S",
                    vec![
                        random_modal_formula(depth - 1, rng),
                        random_modal_formula(depth - 1, rng),
                    ],
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{classify, modal_translation, parse, print, RelationSymbol};

    fn vocab(symbols: &[(&str, usize)]) -> Vocabulary {
        Vocabulary::from_symbols(symbols.iter().map(|&(n, a)| RelationSymbol::new(n, a)))
            .unwrap()
    }

    #[test]
    fn random_formulas_round_trip_through_the_printer() {
        let v = vocab(&[("P", 1), ("R", 2), ("S", 3)]);
        let mut rng = rng(0xF0F0);
        for i in 0..500 {
            let f = random_formula(&v, &[], 3, &mut rng);
            let printed = print(&f);
            let reparsed = parse(&printed)
                .unwrap_or_else(|e| panic!("sample {i} failed to reparse: {e}\n{printed}"));
            assert_eq!(f, reparsed, "sample {i} changed shape:\n{printed}");
        }
    }

    #[test]
    fn modal_translations_are_uniform_and_one_dimensional() {
        let mut rng = rng(0xBEEF);
        for _ in 0..200 {
            let m = random_modal_formula(3, &mut rng);
            let f = modal_translation(&m);
            let report = classify(&f);
            assert!(report.guarded && report.one_dimensional && report.uniform);
        }
    }

    #[test]
    fn structures_are_deterministic_in_the_seed() {
        let v = vocab(&[("P", 1), ("R", 2)]);
        let a = random_structure(&v, 3, 0.4, &mut rng(7));
        let b = random_structure(&v, 3, 0.4, &mut rng(7));
        assert_eq!(a, b);
    }
}
