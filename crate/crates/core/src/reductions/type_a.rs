//! Type-A constructions over blocks of replicated coordinates: the DNF with a
//! block-mismatch detector, and the automaton product of a block checker with
//! a block simulator.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::ReplicationMap;
use crate::concepts::{Dfa, DnfFormula, Term};
use crate::{Error, Result};

/// `G'`: for every block and adjacent pair `(j, j+1)` in it, the terms
/// `z_j ∧ ¬z_{j+1}` and `z_{j+1} ∧ ¬z_j`. Fires iff some block is non-constant.
/// Has `2·n·(k−1)` terms.
pub fn build_detector_blocks(n: usize, k: usize) -> DnfFormula {
    let map = ReplicationMap::new(n, k);
    let mut terms = Vec::with_capacity(2 * n * k.saturating_sub(1));
    for i in 0..n {
        for c in 0..k - 1 {
            let (a, b) = (map.coordinate(i, c), map.coordinate(i, c + 1));
            terms.push(Term::new([a], [b]).expect("distinct coordinates"));
            terms.push(Term::new([b], [a]).expect("distinct coordinates"));
        }
    }
    DnfFormula::new(n * k, terms).expect("block coordinates are below n*k")
}

/// The detector over `n^3` coordinates (blocks of `n^2`).
pub fn build_detector(n: usize) -> DnfFormula {
    build_detector_blocks(n, n * n)
}

/// `T'_t` re-indexes each term onto the first coordinate of every block.
pub(crate) fn lift_terms(f: &DnfFormula, map: &ReplicationMap) -> Vec<Term> {
    f.terms()
        .iter()
        .map(|t| {
            Term::new(
                t.positives().iter().map(|&i| map.coordinate(i, 0)),
                t.negatives().iter().map(|&i| map.coordinate(i, 0)),
            )
            .expect("re-indexing keeps literal sets disjoint")
        })
        .collect()
}

/// `F' = (T'_1 ∨ … ∨ T'_d) ∨ G'` over blocks of `k`.
pub fn reduce_dnf_blocks(f: &DnfFormula, k: usize) -> DnfFormula {
    let map = ReplicationMap::new(f.dim(), k);
    let mut terms = lift_terms(f, &map);
    terms.extend(build_detector_blocks(f.dim(), k).terms().iter().cloned());
    DnfFormula::new(map.target_dim(), terms).expect("lifted terms fit the target cube")
}

/// [`reduce_dnf_blocks`] with the `n^2`-fold replication into `n^3` coordinates.
#[allow(non_snake_case)]
pub fn reduce_dnf_typeA(f: &DnfFormula) -> DnfFormula {
    reduce_dnf_blocks(f, f.dim() * f.dim())
}

/// Accepts exactly the words of length `n·k` with some block that is not constant.
///
/// State `0` waits for the first bit of a block; state `1 + 2(p−1) + b` has read
/// `p` bits of the current block, all equal to `b`; state `2k−1` is the
/// absorbing mismatch state (when `k >= 2`). `2k` states in total.
pub fn build_block_checker_blocks(n: usize, k: usize) -> Dfa {
    if k == 1 {
        return Dfa::new(0, vec![false], vec![[0, 0]], n).expect("single-state checker");
    }
    let flagged = 2 * k - 1;
    let at = |p: usize, b: usize| 1 + 2 * (p - 1) + b;
    let mut delta = vec![[0usize; 2]; 2 * k];
    delta[0] = [at(1, 0), at(1, 1)];
    for p in 1..k {
        for b in 0..2 {
            let same = if p + 1 == k { 0 } else { at(p + 1, b) };
            let mut row = [flagged; 2];
            row[b] = same;
            delta[at(p, b)] = row;
        }
    }
    delta[flagged] = [flagged, flagged];
    let mut accepting = vec![false; 2 * k];
    accepting[flagged] = true;
    Dfa::new(0, accepting, delta, n * k).expect("checker table is complete")
}

/// [`build_block_checker_blocks`] with blocks of `n^2`.
pub fn build_block_checker(n: usize) -> Dfa {
    build_block_checker_blocks(n, n * n)
}

/// How the block simulator treats the last position of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SimulatorStep {
    /// `δ'((α, k), b) = (δ(α, b), 1)`.
    Faithful,
    /// The `i = k` case removed: the machine stalls at `(α, k)`.
    Stalled,
}

/// States `S(A) × [k]`, start `(α₀, 1)`, accepting `accept(A) × [k]`, and
/// `δ'((α,i),b) = (α, i+1)` for `i < k`, `(δ(α,b), 1)` for `i = k`.
///
/// `(α, i)` is state `α·k + (i − 1)`.
pub fn build_block_simulator_blocks(a: &Dfa, n: usize, k: usize) -> Dfa {
    simulator(a, n, k, SimulatorStep::Faithful)
}

pub(crate) fn simulator(a: &Dfa, n: usize, k: usize, step: SimulatorStep) -> Dfa {
    let id = |alpha: usize, i: usize| alpha * k + (i - 1);
    let states = a.state_count() * k;
    let mut delta = vec![[0usize; 2]; states];
    let mut accepting = vec![false; states];
    for alpha in 0..a.state_count() {
        for i in 1..=k {
            let s = id(alpha, i);
            accepting[s] = a.is_accepting(alpha);
            for b in [false, true] {
                delta[s][b as usize] = if i < k {
                    id(alpha, i + 1)
                } else {
                    match step {
                        SimulatorStep::Faithful => id(a.next(alpha, b), 1),
                        SimulatorStep::Stalled => s,
                    }
                };
            }
        }
    }
    Dfa::new(id(a.start(), 1), accepting, delta, n * k).expect("simulator table is complete")
}

/// [`build_block_simulator_blocks`] with blocks of `n^2`.
pub fn build_block_simulator(a: &Dfa, n: usize) -> Dfa {
    build_block_simulator_blocks(a, n, n * n)
}

/// Pair construction accepting the union of both languages, restricted to
/// reachable pairs (at most `|A1|·|A2|` states).
pub fn dfa_product_or(a1: &Dfa, a2: &Dfa) -> Result<Dfa> {
    if a1.input_len() != a2.input_len() {
        return Err(Error::DimensionMismatch { expected: a1.input_len(), found: a2.input_len() });
    }
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let start = (a1.start(), a2.start());
    index.insert(start, 0);
    pairs.push(start);
    queue.push_back(start);
    let mut delta: Vec<[usize; 2]> = vec![[0, 0]];
    while let Some((s1, s2)) = queue.pop_front() {
        let from = index[&(s1, s2)];
        for b in [false, true] {
            let next = (a1.next(s1, b), a2.next(s2, b));
            let to = *index.entry(next).or_insert_with(|| {
                pairs.push(next);
                queue.push_back(next);
                delta.push([0, 0]);
                pairs.len() - 1
            });
            delta[from][b as usize] = to;
        }
    }
    let accepting = pairs.iter().map(|&(s1, s2)| a1.is_accepting(s1) || a2.is_accepting(s2)).collect();
    Dfa::new(0, accepting, delta, a1.input_len())
}

/// Automaton over `n·k` symbols accepting `φ(x)` iff `a` accepts `x`, and
/// every word with a non-constant block.
pub fn reduce_dfa_blocks(a: &Dfa, k: usize) -> Result<Dfa> {
    let n = a.input_len();
    dfa_product_or(&build_block_checker_blocks(n, k), &build_block_simulator_blocks(a, n, k))
}

/// [`reduce_dfa_blocks`] with blocks of `n^2`.
#[allow(non_snake_case)]
pub fn reduce_dfa_typeA(a: &Dfa) -> Result<Dfa> {
    let n = a.input_len();
    reduce_dfa_blocks(a, n * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{enumerate_cube, flip, CubePoint};

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    #[test]
    fn detector_counts_and_semantics() {
        let g = build_detector(2);
        assert_eq!(g.len(), 12);
        assert_eq!(g.dim(), 8);
        assert!(!g.eval(&p("++++----")).unwrap());
        assert!(g.eval(&p("++-+----")).unwrap());
        assert!(g.eval(&p("+++++---")).unwrap());
        assert_eq!(build_detector(3).len(), 2 * 3 * 8);
    }

    #[test]
    fn dnf_type_a_examples() {
        let f = DnfFormula::new(2, vec![Term::from_signed(&[1]).unwrap()]).unwrap();
        let fp = reduce_dnf_typeA(&f);
        assert_eq!(fp.dim(), 8);
        let phi = ReplicationMap::new(2, 4);
        for x in enumerate_cube(2).unwrap() {
            assert_eq!(f.eval(&x).unwrap(), fp.eval(&phi.apply(&x).unwrap()).unwrap());
        }
        // block 1 = (+1,-1,+1,+1) trips the detector
        assert!(fp.eval(&p("+-++----")).unwrap());
    }

    #[test]
    fn simulator_transitions_follow_delta_prime() {
        let a = Dfa::parity(2);
        let sim = build_block_simulator(&a, 2);
        assert_eq!(sim.state_count(), 2 * 4);
        let id = |alpha: usize, i: usize| alpha * 4 + (i - 1);
        for alpha in 0..2 {
            for b in [false, true] {
                assert_eq!(sim.next(id(alpha, 1), b), id(alpha, 2));
                assert_eq!(sim.next(id(alpha, 4), b), id(a.next(alpha, b), 1));
            }
        }
        let phi = ReplicationMap::new(2, 4);
        for x in enumerate_cube(2).unwrap() {
            assert_eq!(sim.eval(&phi.apply(&x).unwrap()).unwrap(), a.eval(&x).unwrap());
        }
    }

    #[test]
    fn checker_traces() {
        let chk = build_block_checker(2);
        assert!(chk.state_count() <= 2 * 4 + 2);
        let phi = ReplicationMap::new(2, 4);
        for x in enumerate_cube(2).unwrap() {
            let z = phi.apply(&x).unwrap();
            assert!(!chk.eval(&z).unwrap());
            for j in 0..8 {
                assert!(chk.eval(&flip(&z, j).unwrap()).unwrap());
            }
        }
        for z in enumerate_cube(8).unwrap() {
            assert_eq!(chk.eval(&z).unwrap(), phi.preimage(&z).is_none());
        }
    }

    #[test]
    fn product_language_is_the_union() {
        let chk = build_block_checker(2);
        let sim = build_block_simulator(&Dfa::parity(2), 2);
        let prod = dfa_product_or(&chk, &sim).unwrap();
        assert!(prod.state_count() <= chk.state_count() * sim.state_count());
        for z in enumerate_cube(8).unwrap() {
            assert_eq!(prod.eval(&z).unwrap(), chk.eval(&z).unwrap() || sim.eval(&z).unwrap());
        }
        assert!(dfa_product_or(&chk, &Dfa::parity(3)).is_err());
    }

    #[test]
    fn degenerate_block_size_one() {
        let a = Dfa::parity(3);
        let r = reduce_dfa_blocks(&a, 1).unwrap();
        for x in enumerate_cube(3).unwrap() {
            assert_eq!(r.eval(&x).unwrap(), a.eval(&x).unwrap());
        }
        assert!(build_detector_blocks(3, 1).is_empty());
    }
}
