//! Exhaustive enumeration of finite structures up to isomorphism.
//!
//! Structures over domains {1..k}, k up to the bound, in a deterministic
//! order: by size, then by the lexicographic encoding of the interpretation.
//! A structure is yielded only when its encoding is minimal among all
//! relabelings of its domain, so exactly one representative per isomorphism
//! class appears.

use super::{Elem, Structure};
use crate::syntax::Vocabulary;

struct AtomTable {
    /// (relation name, tuple of element indices), in encoding order.
    atoms: Vec<(String, Vec<usize>)>,
}

impl AtomTable {
    fn new(vocab: &Vocabulary, size: usize) -> Self {
        let mut atoms = Vec::new();
        for sym in vocab.symbols() {
            let mut tuple = vec![0usize; sym.arity];
            loop {
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
        AtomTable { atoms }
    }

    fn index(&self, relation: &str, tuple: &[usize]) -> usize {
        self.atoms
            .iter()
            .position(|(r, t)| r == relation && t == tuple)
            .expect("atom present in table")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for smaller in permutations(n - 1) {
        for slot in 0..n {
            let mut p = smaller.clone();
            p.insert(slot, n - 1);
            out.push(p);
        }
    }
    out
}

fn is_canonical(bits: &[bool], table: &AtomTable, perms: &[Vec<usize>]) -> bool {
    for perm in perms {
        // Relabeled encoding: atom (R, t) holds iff (R, perm^{-1}(t)) held,
        // i.e. bit at (R, t) after relabeling by perm is the original bit at
        // (R, map(t)) where map sends each index through the inverse.
        // Comparing lexicographically, bail out as soon as the relabeled
        // encoding is smaller.
        let mut smaller = false;
        for (i, (rel, tuple)) in table.atoms.iter().enumerate() {
            let moved: Vec<usize> = tuple.iter().map(|&e| perm[e]).collect();
            let relabeled = bits[table.index(rel, &moved)];
            if relabeled != bits[i] {
                smaller = relabeled < bits[i];
                break;
            }
        }
        if smaller {
            return false;
        }
    }
    true
}

fn build(vocab: &Vocabulary, size: usize, bits: &[bool], table: &AtomTable) -> Structure {
    let domain = (1..=size).map(|i| Elem::new(i.to_string()));
    let mut s = Structure::new(vocab.clone(), domain).expect("nonempty domain");
    let names: Vec<Elem> = (1..=size).map(|i| Elem::new(i.to_string())).collect();
    for (i, (rel, tuple)) in table.atoms.iter().enumerate() {
        if bits[i] {
            let t: Vec<Elem> = tuple.iter().map(|&e| names[e].clone()).collect();
            s.add_tuple(rel, t).expect("tuple over the domain");
        }
    }
    s
}

/// Every structure over the vocabulary with at most `max_size` elements, one
/// representative per isomorphism class, in a deterministic order.
pub fn enumerate_structures(
    vocab: &Vocabulary,
    max_size: usize,
) -> impl Iterator<Item = Structure> + '_ {
    let vocab = vocab.clone();
    (1..=max_size).flat_map(move |size| {
        let table = AtomTable::new(&vocab, size);
        let perms = permutations(size);
        let n = table.atoms.len();
        assert!(n < 63, "interpretation space too large to enumerate");
        let vocab = vocab.clone();
        (0u64..(1u64 << n)).filter_map(move |mask| {
            let bits: Vec<bool> = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
            if is_canonical(&bits, &table, &perms) {
                Some(build(&vocab, size, &bits, &table))
            } else {
                None
            }
        })
    })
}
