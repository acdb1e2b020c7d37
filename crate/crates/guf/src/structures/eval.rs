//! Model checking over finite structures. Guarded quantifiers range over
//! the guard relation's tuples; raw quantifiers range over all assignments.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Elem, Structure};
use crate::syntax::{Formula, Var};

pub type Assignment = BTreeMap<Var, Elem>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound free variable {0}")]
    UnboundVariable(String),
    #[error("relation {0} is not interpreted by the structure")]
    UnknownRelation(String),
    #[error("relation {relation} expects {expected} arguments, got {got}")]
    ArityMismatch { relation: String, expected: usize, got: usize },
    #[error("element {0} is not in the domain")]
    UnknownElement(String),
}

fn lookup<'a>(asg: &'a Assignment, v: &Var) -> Result<&'a Elem, EvalError> {
    asg.get(v).ok_or_else(|| EvalError::UnboundVariable(v.name().to_string()))
}

/// Tarskian satisfaction: `S, asg |= f`. The assignment must cover the free
/// variables of `f` with domain elements.
pub fn evaluate(s: &Structure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    for e in asg.values() {
        if !s.contains_element(e) {
            return Err(EvalError::UnknownElement(e.id().to_string()));
        }
    }
    eval(s, f, asg)
}

fn eval(s: &Structure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => {
            let expected = s
                .vocabulary()
                .arity(&a.relation)
                .ok_or_else(|| EvalError::UnknownRelation(a.relation.clone()))?;
            if a.args.len() != expected {
                return Err(EvalError::ArityMismatch {
                    relation: a.relation.clone(),
                    expected,
                    got: a.args.len(),
                });
            }
            let tuple: Vec<Elem> = a
                .args
                .iter()
                .map(|v| lookup(asg, v).cloned())
                .collect::<Result<_, _>>()?;
            Ok(s.contains_tuple(&a.relation, &tuple))
        }
        Formula::Eq(x, y) => Ok(lookup(asg, x)? == lookup(asg, y)?),
        Formula::Not(g) => Ok(!eval(s, g, asg)?),
        Formula::And(l, r) => Ok(eval(s, l, asg)? && eval(s, r, asg)?),
        Formula::Or(l, r) => Ok(eval(s, l, asg)? || eval(s, r, asg)?),
        Formula::Exists(g) => {
            for ext in guard_matches(s, &g.guard, &g.bound, asg)? {
                if eval(s, &g.body, &ext)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(g) => {
            for ext in guard_matches(s, &g.guard, &g.bound, asg)? {
                if !eval(s, &g.body, &ext)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::RawExists(bound, body) => {
            for ext in all_assignments(s, bound, asg) {
                if eval(s, body, &ext)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::RawForall(bound, body) => {
            for ext in all_assignments(s, bound, asg) {
                if !eval(s, body, &ext)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Extensions of `asg` that bind `bound` so that the guard atom holds,
/// obtained by matching the guard pattern against the relation's tuples.
fn guard_matches(
    s: &Structure,
    guard: &crate::syntax::Atom,
    bound: &[Var],
    asg: &Assignment,
) -> Result<Vec<Assignment>, EvalError> {
    let expected = s
        .vocabulary()
        .arity(&guard.relation)
        .ok_or_else(|| EvalError::UnknownRelation(guard.relation.clone()))?;
    if guard.args.len() != expected {
        return Err(EvalError::ArityMismatch {
            relation: guard.relation.clone(),
            expected,
            got: guard.args.len(),
        });
    }
    let mut out = Vec::new();
    'tuples: for tuple in s.tuples(&guard.relation) {
        let mut ext = asg.clone();
        for (var, elem) in guard.args.iter().zip(tuple) {
            match ext.get(var) {
                Some(e) if e == elem => {}
                Some(_) => continue 'tuples,
                None => {
                    if bound.contains(var) {
                        ext.insert(var.clone(), elem.clone());
                    } else {
                        return Err(EvalError::UnboundVariable(var.name().to_string()));
                    }
                }
            }
        }
        if !out.contains(&ext) {
            out.push(ext);
        }
    }
    Ok(out)
}

fn all_assignments(s: &Structure, bound: &[Var], asg: &Assignment) -> Vec<Assignment> {
    let elems: Vec<Elem> = s.domain().cloned().collect();
    let mut out = vec![asg.clone()];
    for v in bound {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for partial in &out {
            for e in &elems {
                let mut ext = partial.clone();
                ext.insert(v.clone(), e.clone());
                next.push(ext);
            }
        }
        out = next;
    }
    out
}
