//! Bounded model search by grounding.
//!
//! A sentence is ground-expanded over a fixed domain {1..k} into a task
//! tree of literals, conjunctions and disjunctions; a backtracking solver
//! with unit propagation then searches for a satisfying interpretation.
//! The search is exhaustive for the given domain size, so a `None` answer
//! means no model of that size exists. Atoms left unassigned by a
//! successful search default to false, and every model found is re-checked
//! with the evaluator before being returned.

use std::collections::BTreeMap;

use super::{Elem, Structure};
use crate::syntax::{Formula, Var, Vocabulary};

/// Ground atom table over a domain of the given size.
pub(crate) struct Grounder {
    pub size: usize,
    pub vocab: Vocabulary,
    atoms: Vec<(String, Vec<usize>)>,
    index: BTreeMap<(String, Vec<usize>), usize>,
}

type Env = BTreeMap<Var, usize>;

/// A ground proof obligation. `Split([])` is trivially true, `Branch([])`
/// trivially false.
#[derive(Debug, Clone)]
pub(crate) enum GTask {
    Lit(usize, bool),
    Split(Vec<GTask>),
    Branch(Vec<GTask>),
}

impl Grounder {
    pub fn new(vocab: &Vocabulary, size: usize) -> Self {
        let mut atoms = Vec::new();
        let mut index = BTreeMap::new();
        for sym in vocab.symbols() {
            let mut tuple = vec![0usize; sym.arity];
            loop {
                index.insert((sym.name.clone(), tuple.clone()), atoms.len());
                atoms.push((sym.name.clone(), tuple.clone()));
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
        Grounder { size, vocab: vocab.clone(), atoms, index }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn lit(&self, relation: &str, tuple: &[usize], sign: bool) -> GTask {
        let idx = self.index[&(relation.to_string(), tuple.to_vec())];
        GTask::Lit(idx, sign)
    }

    /// Grounds `f` under `env` with the given polarity.
    pub fn ground(&self, f: &Formula, env: &Env, positive: bool) -> GTask {
        match f {
            Formula::True => {
                if positive {
                    GTask::Split(Vec::new())
                } else {
                    GTask::Branch(Vec::new())
                }
            }
            Formula::False => {
                if positive {
                    GTask::Branch(Vec::new())
                } else {
                    GTask::Split(Vec::new())
                }
            }
            Formula::Atom(a) => {
                let tuple: Vec<usize> = a.args.iter().map(|v| env[v]).collect();
                self.lit(&a.relation, &tuple, positive)
            }
            Formula::Eq(x, y) => {
                if (env[x] == env[y]) == positive {
                    GTask::Split(Vec::new())
                } else {
                    GTask::Branch(Vec::new())
                }
            }
            Formula::Not(g) => self.ground(g, env, !positive),
            Formula::And(l, r) => {
                let parts = vec![self.ground(l, env, positive), self.ground(r, env, positive)];
                if positive {
                    GTask::Split(parts)
                } else {
                    GTask::Branch(parts)
                }
            }
            Formula::Or(l, r) => {
                let parts = vec![self.ground(l, env, positive), self.ground(r, env, positive)];
                if positive {
                    GTask::Branch(parts)
                } else {
                    GTask::Split(parts)
                }
            }
            Formula::Exists(g) => {
                let mut alts = Vec::new();
                for ext in self.extensions(env, &g.bound) {
                    let guard = self.ground(&Formula::Atom(g.guard.clone()), &ext, true);
                    let body = self.ground(&g.body, &ext, positive);
                    if positive {
                        alts.push(GTask::Split(vec![guard, body]));
                    } else {
                        // not exists: every instance has a false guard or a
                        // refuted body
                        alts.push(GTask::Branch(vec![
                            self.ground(&Formula::Atom(g.guard.clone()), &ext, false),
                            body,
                        ]));
                    }
                }
                if positive {
                    GTask::Branch(alts)
                } else {
                    GTask::Split(alts)
                }
            }
            Formula::Forall(g) => {
                let mut alts = Vec::new();
                for ext in self.extensions(env, &g.bound) {
                    let body = self.ground(&g.body, &ext, positive);
                    if positive {
                        alts.push(GTask::Branch(vec![
                            self.ground(&Formula::Atom(g.guard.clone()), &ext, false),
                            body,
                        ]));
                    } else {
                        let guard = self.ground(&Formula::Atom(g.guard.clone()), &ext, true);
                        alts.push(GTask::Split(vec![guard, body]));
                    }
                }
                if positive {
                    GTask::Split(alts)
                } else {
                    GTask::Branch(alts)
                }
            }
            Formula::RawExists(bound, body) => {
                let alts: Vec<GTask> = self
                    .extensions(env, bound)
                    .into_iter()
                    .map(|ext| self.ground(body, &ext, positive))
                    .collect();
                if positive {
                    GTask::Branch(alts)
                } else {
                    GTask::Split(alts)
                }
            }
            Formula::RawForall(bound, body) => {
                let alts: Vec<GTask> = self
                    .extensions(env, bound)
                    .into_iter()
                    .map(|ext| self.ground(body, &ext, positive))
                    .collect();
                if positive {
                    GTask::Split(alts)
                } else {
                    GTask::Branch(alts)
                }
            }
        }
    }

    fn extensions(&self, env: &Env, bound: &[Var]) -> Vec<Env> {
        let mut out = vec![env.clone()];
        for v in bound {
            let mut next = Vec::with_capacity(out.len() * self.size);
            for partial in &out {
                for e in 0..self.size {
                    let mut ext = partial.clone();
                    ext.insert(v.clone(), e);
                    next.push(ext);
                }
            }
            out = next;
        }
        out
    }

    /// Builds the structure named `1..size` from a (possibly partial)
    /// assignment; unassigned atoms are false.
    pub fn structure(&self, assignment: &[Option<bool>]) -> Structure {
        let domain = (1..=self.size).map(|i| Elem::new(i.to_string()));
        let mut s = Structure::new(self.vocab.clone(), domain).expect("nonempty domain");
        for (i, (rel, tuple)) in self.atoms.iter().enumerate() {
            if assignment[i] == Some(true) {
                let t: Vec<Elem> = tuple
                    .iter()
                    .map(|&e| Elem::new((e + 1).to_string()))
                    .collect();
                s.add_tuple(rel, t).expect("tuple over the domain");
            }
        }
        s
    }
}

fn gvalue(t: &GTask, assignment: &[Option<bool>]) -> Option<bool> {
    match t {
        GTask::Lit(i, sign) => assignment[*i].map(|b| b == *sign),
        GTask::Split(parts) => {
            let mut unknown = false;
            for p in parts {
                match gvalue(p, assignment) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    Some(true) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(true)
            }
        }
        GTask::Branch(parts) => {
            let mut unknown = false;
            for p in parts {
                match gvalue(p, assignment) {
                    Some(true) => return Some(true),
                    None => unknown = true,
                    Some(false) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(false)
            }
        }
    }
}

/// Exhaustive backtracking search. Returns the first satisfying assignment
/// in the solver's deterministic branching order.
pub(crate) fn solve(
    grounder: &Grounder,
    tasks: Vec<GTask>,
) -> Option<Vec<Option<bool>>> {
    let assignment = vec![None; grounder.atom_count()];
    NODES.with(|n| n.set(0));
    let out = search(assignment, tasks);
    if std::env::var("GUF_SOLVER_STATS").is_ok() {
        eprintln!("solver nodes: {}", NODES.with(|n| n.get()));
    }
    out
}

thread_local! {
    static NODES: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

fn search(mut assignment: Vec<Option<bool>>, tasks: Vec<GTask>) -> Option<Vec<Option<bool>>> {
    NODES.with(|n| n.set(n.get() + 1));
    let mut pending: Vec<GTask> = tasks;
    // Propagate deterministic tasks until only real branch points remain.
    loop {
        let mut branches: Vec<GTask> = Vec::new();
        let mut changed = false;
        for task in pending.drain(..) {
            match task {
                GTask::Lit(i, sign) => match assignment[i] {
                    None => {
                        assignment[i] = Some(sign);
                        changed = true;
                    }
                    Some(b) if b == sign => {}
                    Some(_) => return None,
                },
                GTask::Split(parts) => {
                    branches.extend(parts);
                    changed = true;
                }
                GTask::Branch(parts) => {
                    // Reduce against the current assignment.
                    let mut live = Vec::new();
                    let mut satisfied = false;
                    for p in parts {
                        match gvalue(&p, &assignment) {
                            Some(true) => {
                                satisfied = true;
                                break;
                            }
                            Some(false) => {}
                            None => live.push(p),
                        }
                    }
                    if satisfied {
                        changed = true;
                    } else if live.is_empty() {
                        return None;
                    } else if live.len() == 1 {
                        branches.push(live.pop().unwrap());
                        changed = true;
                    } else {
                        branches.push(GTask::Branch(live));
                    }
                }
            }
        }
        pending = branches;
        if !changed {
            // pure-literal rule: the task trees are monotone in their
            // literals, so an unassigned atom occurring with one polarity
            // only can safely take that polarity without branching
            let mut seen_true = vec![false; assignment.len()];
            let mut seen_false = vec![false; assignment.len()];
            for task in &pending {
                collect_polarities(task, &mut seen_true, &mut seen_false);
            }
            for i in 0..assignment.len() {
                if assignment[i].is_none() && seen_true[i] != seen_false[i] {
                    assignment[i] = Some(seen_true[i]);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    // All that remains are multi-way branches. Branch on a task that
    // mentions an already-assigned atom when one exists: conflicts live
    // among the touched constraints, and picking untouched ones first would
    // rediscover the same conflict under exponentially many irrelevant
    // choices.
    let branch_at = pending
        .iter()
        .position(|t| matches!(t, GTask::Branch(_)) && mentions_assigned(t, &assignment))
        .or_else(|| pending.iter().position(|t| matches!(t, GTask::Branch(_))));
    match branch_at {
        None => Some(assignment),
        Some(i) => {
            let GTask::Branch(alternatives) = pending.remove(i) else {
                unreachable!()
            };
            for alt in alternatives {
                let mut tasks = pending.clone();
                tasks.push(alt);
                if let Some(model) = search(assignment.clone(), tasks) {
                    return Some(model);
                }
            }
            None
        }
    }
}

fn mentions_assigned(t: &GTask, assignment: &[Option<bool>]) -> bool {
    match t {
        GTask::Lit(i, _) => assignment[*i].is_some(),
        GTask::Split(parts) | GTask::Branch(parts) => {
            parts.iter().any(|p| mentions_assigned(p, assignment))
        }
    }
}

fn collect_polarities(t: &GTask, seen_true: &mut [bool], seen_false: &mut [bool]) {
    match t {
        GTask::Lit(i, sign) => {
            if *sign {
                seen_true[*i] = true;
            } else {
                seen_false[*i] = true;
            }
        }
        GTask::Split(parts) | GTask::Branch(parts) => {
            for p in parts {
                collect_polarities(p, seen_true, seen_false);
            }
        }
    }
}

/// Searches for a model of the sentence with at most `max_size` elements.
/// Sizes are tried in increasing order and the search at each size is
/// exhaustive, so `None` means the sentence has no model of size up to the
/// bound. Models are verified with the evaluator before being returned.
pub fn brute_force_sat(f: &Formula, max_size: usize) -> Result<Option<Structure>, String> {
    if !f.is_sentence() {
        return Err("satisfiability search expects a sentence".to_string());
    }
    let vocab = f.vocabulary().map_err(|e| e.to_string())?;
    for size in 1..=max_size {
        let grounder = Grounder::new(&vocab, size);
        let tasks = vec![grounder.ground(f, &Env::new(), true)];
        if let Some(assignment) = solve(&grounder, tasks) {
            let model = grounder.structure(&assignment);
            let holds = super::evaluate(&model, f, &BTreeMap::new())
                .map_err(|e| format!("model verification failed: {e}"))?;
            if !holds {
                return Err("internal error: candidate model fails verification".to_string());
            }
            return Ok(Some(model));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::enumerate_structures;
    use crate::structures::evaluate;
    use crate::syntax::parse;

    #[test]
    fn finds_singleton_model_for_simple_existential() {
        let f = parse("exists x. (P(x) & true)").unwrap();
        let m = brute_force_sat(&f, 3).unwrap().unwrap();
        assert_eq!(m.size(), 1);
    }

    #[test]
    fn proposition_phi_has_a_one_element_model() {
        // G(1,1,1) with an R loop satisfies the triangle sentence because
        // repeats are allowed.
        let phi = parse("exists x y z. (G(x,y,z) & R(x,y) & R(y,z) & R(z,x))").unwrap();
        let m = brute_force_sat(&phi, 3).unwrap().unwrap();
        assert_eq!(m.size(), 1);
    }

    #[test]
    fn phi_and_psi_has_no_small_model() {
        let f = parse(
            "exists x y z. (G(x,y,z) & R(x,y) & R(y,z) & R(z,x)) & \
             forall x y. (R(x,y) -> (A(x) <-> !A(y)))",
        )
        .unwrap();
        assert!(brute_force_sat(&f, 3).unwrap().is_none());
    }

    #[test]
    fn rejects_open_formulas() {
        let f = parse("P(x)").unwrap();
        assert!(brute_force_sat(&f, 2).is_err());
    }

    #[test]
    fn agrees_with_raw_enumeration_on_small_sentences() {
        // Independent route: enumerate all canonical structures and model
        // check. The grounding solver must agree on satisfiability and the
        // found models must satisfy their sentences.
        let sentences = [
            "exists x. (P(x) & true)",
            "exists x y. (R(x,y) & P(x) & !P(y))",
            "exists x. (P(x) & true) & forall x. (P(x) -> exists y. (R(x,y) & P(y)))",
            "exists x. (P(x) & !P(x))",
            "forall x y. (R(x,y) -> x = y) & exists x y. (R(x,y) & !(x = y))",
            "exists x. (R(x,x) & true) & forall x y. (R(x,y) -> !R(y,x))",
        ];
        for text in sentences {
            let f = parse(text).unwrap();
            let vocab = f.vocabulary().unwrap();
            for bound in 1..=3usize {
                let by_enumeration = enumerate_structures(&vocab, bound).any(|s| {
                    evaluate(&s, &f, &BTreeMap::new()).unwrap()
                });
                let by_solver = brute_force_sat(&f, bound).unwrap().is_some();
                assert_eq!(
                    by_enumeration, by_solver,
                    "solver disagrees with enumeration on {text} at bound {bound}"
                );
            }
        }
    }
}
