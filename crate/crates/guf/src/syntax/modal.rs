//! Polyadic modal formulas and their standard translation into guarded
//! first-order logic. The translation always lands in the uniform
//! one-dimensional guarded fragment.

use super::ast::{Atom, Formula, Var};

/// A polyadic modal formula: proposition letters, boolean connectives and
/// k-ary diamonds. A k-ary diamond named `R` translates through a (k+1)-ary
/// accessibility relation `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModalFormula {
    True,
    False,
    Prop(String),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(String, Vec<ModalFormula>),
}

impl ModalFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        ModalFormula::Prop(name.into())
    }

    pub fn not(f: ModalFormula) -> Self {
        ModalFormula::Not(Box::new(f))
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn diamond(relation: impl Into<String>, args: Vec<ModalFormula>) -> Self {
        let args_vec = args;
        assert!(!args_vec.is_empty(), "diamonds take at least one argument");
        ModalFormula::Diamond(relation.into(), args_vec)
    }
}

/// Proposition letters become unary relations with capitalized names.
fn prop_relation(name: &str) -> String {
    name.to_uppercase()
}

fn translate_at(m: &ModalFormula, world: &Var, counter: &mut usize) -> Formula {
    match m {
        ModalFormula::True => Formula::True,
        ModalFormula::False => Formula::False,
        ModalFormula::Prop(p) => {
            Formula::Atom(Atom::new(prop_relation(p), vec![world.clone()]))
        }
        ModalFormula::Not(f) => Formula::not(translate_at(f, world, counter)),
        ModalFormula::And(a, b) => Formula::and(
            translate_at(a, world, counter),
            translate_at(b, world, counter),
        ),
        ModalFormula::Or(a, b) => Formula::or(
            translate_at(a, world, counter),
            translate_at(b, world, counter),
        ),
        ModalFormula::Diamond(rel, args) => {
            let mut bound = Vec::with_capacity(args.len());
            for _ in args {
                *counter += 1;
                bound.push(Var::new(format!("x{counter}")));
            }
            let mut guard_args = vec![world.clone()];
            guard_args.extend(bound.iter().cloned());
            let guard = Atom::new(rel.clone(), guard_args);
            let parts: Vec<Formula> = args
                .iter()
                .zip(&bound)
                .map(|(arg, v)| translate_at(arg, v, counter))
                .collect();
            Formula::exists(bound, guard, Formula::conjoin(parts))
        }
    }
}

/// Standard translation at the designated world variable `x0`.
pub fn modal_translation(m: &ModalFormula) -> Formula {
    let mut counter = 0usize;
    translate_at(m, &Var::new("x0"), &mut counter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::classify::classify;
    use crate::syntax::print::print;

    #[test]
    fn proposition_translates_to_unary_atom() {
        let f = modal_translation(&ModalFormula::prop("p"));
        assert_eq!(print(&f), "P(x0)");
    }

    #[test]
    fn binary_diamond_translates_to_guarded_block() {
        let f = modal_translation(&ModalFormula::diamond(
            "R",
            vec![ModalFormula::prop("p"), ModalFormula::prop("q")],
        ));
        assert_eq!(print(&f), "exists x1 x2. (R(x0,x1,x2) & P(x1) & Q(x2))");
    }

    #[test]
    fn nested_diamonds_stay_one_dimensional() {
        let f = modal_translation(&ModalFormula::diamond(
            "R",
            vec![ModalFormula::diamond("R", vec![ModalFormula::prop("p")])],
        ));
        let report = classify(&f);
        assert!(report.guarded && report.one_dimensional && report.uniform);
        assert_eq!(f.block_depth(), 2);
    }
}
