//! Pretty-printer. `parse(print(f))` is the identity on ASTs for every
//! formula the parser or the generators can produce.

use std::fmt::Write;

use super::ast::{Formula, Var};

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_PRIMARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(_, _) => PREC_OR,
        Formula::And(_, _) => PREC_AND,
        Formula::Not(_) => PREC_NOT,
        _ => PREC_PRIMARY,
    }
}

fn vars_spaced(vars: &[Var]) -> String {
    vars.iter()
        .map(|v| v.name().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_formula(f: &Formula, min: u8, out: &mut String) {
    let needs_parens = prec(f) < min;
    if needs_parens {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => {
            out.push_str(&a.relation);
            out.push('(');
            for (i, v) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(v.name());
            }
            out.push(')');
        }
        Formula::Eq(x, y) => {
            let _ = write!(out, "{} = {}", x.name(), y.name());
        }
        Formula::Not(g) => {
            out.push('!');
            write_formula(g, PREC_NOT, out);
        }
        Formula::And(l, r) => {
            write_formula(l, PREC_AND, out);
            out.push_str(" & ");
            write_formula(r, PREC_AND + 1, out);
        }
        Formula::Or(l, r) => {
            write_formula(l, PREC_OR, out);
            out.push_str(" | ");
            write_formula(r, PREC_OR + 1, out);
        }
        Formula::Exists(g) => {
            let _ = write!(out, "exists {}. (", vars_spaced(&g.bound));
            write_formula(&Formula::Atom(g.guard.clone()), PREC_AND + 1, out);
            for conjunct in g.body.conjuncts() {
                out.push_str(" & ");
                write_formula(conjunct, PREC_AND + 1, out);
            }
            out.push(')');
        }
        Formula::Forall(g) => {
            let _ = write!(out, "forall {}. (", vars_spaced(&g.bound));
            write_formula(&Formula::Atom(g.guard.clone()), PREC_AND + 1, out);
            out.push_str(" -> ");
            write_formula(&g.body, PREC_OR, out);
            out.push(')');
        }
        Formula::RawExists(bound, body) => {
            let _ = write!(out, "exists {}. (", vars_spaced(bound));
            let mut first = true;
            for conjunct in body.conjuncts() {
                if !first {
                    out.push_str(" & ");
                }
                first = false;
                write_formula(conjunct, PREC_AND + 1, out);
            }
            out.push(')');
        }
        Formula::RawForall(bound, body) => {
            let _ = write!(out, "forall {}. (", vars_spaced(bound));
            write_formula(body, PREC_OR, out);
            out.push(')');
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Renders a formula in the ASCII grammar.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, &mut out);
    out
}
