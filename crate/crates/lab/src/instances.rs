//! Random concept generators for the corpora and suites.

use localq_core::concepts::{DecisionTree, Dfa, DnfFormula, Junta, OutputAlphabet, SparsePoly, SparsePtf, Term};
use localq_core::rng::ChaCha8Rng;
use localq_core::{Rational, Result};
use rand::seq::index;
use rand::Rng;

/// `d` terms, each on `1..=width` distinct random variables with random signs.
pub fn random_dnf(n: usize, d: usize, width: usize, rng: &mut ChaCha8Rng) -> Result<DnfFormula> {
    let mut terms = Vec::with_capacity(d);
    for _ in 0..d {
        let w = rng.random_range(1..=width.min(n).max(1));
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for v in index::sample(rng, n, w.min(n)) {
            if rng.random() {
                pos.push(v);
            } else {
                neg.push(v);
            }
        }
        terms.push(Term::new(pos, neg)?);
    }
    DnfFormula::new(n, terms)
}

pub fn random_tree(n: usize, max_leaves: usize, rng: &mut ChaCha8Rng) -> DecisionTree {
    DecisionTree::random(n, max_leaves, rng)
}

/// A junta on `k` random variables with a uniformly random truth table.
pub fn random_junta(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Junta> {
    let relevant = index::sample(rng, n, k.min(n)).into_vec();
    let table = (0..1usize << relevant.len()).map(|_| rng.random()).collect();
    Junta::new(n, relevant, table)
}

/// The ±1-valued Fourier expansion of `h` (label 1 ↦ +1). Exact, over the
/// relevant variables only.
pub fn junta_fourier(h: &Junta) -> Result<SparsePoly> {
    let k = h.relevant().len();
    let size = 1usize << k;
    // values[i]: ±1 output at the point whose set bits of i are the +1 coordinates
    let mut values: Vec<i128> = h.table().iter().map(|&b| if b { 1 } else { -1 }).collect();
    let mut half = 1;
    while half < size {
        for block in (0..size).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (values[i], values[i + half]);
                values[i] = a + b;
                values[i + half] = b - a;
            }
        }
        half *= 2;
    }
    let terms = values.iter().enumerate().filter(|(_, &c)| c != 0).map(|(s, &c)| {
        let vars = (0..k).filter(|&b| (s >> b) & 1 == 1).map(|b| h.relevant()[b]).collect();
        (vars, Rational::new(c, size as i128))
    });
    SparsePoly::new(h.dim(), OutputAlphabet::Signed, terms)
}

/// A random boolean-valued sparse polynomial: the Fourier expansion of a
/// random junta on `k` variables.
pub fn random_poly(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<SparsePoly> {
    junta_fourier(&random_junta(n, k, rng)?)
}

/// `terms` monomials of degree `1..=degree` with integer coefficients in
/// `[-3, 3] \ {0}` and a half-integer threshold in `[-2, 2]`.
pub fn random_ptf(n: usize, terms: usize, degree: usize, rng: &mut ChaCha8Rng) -> Result<SparsePtf> {
    let monomials = (0..terms)
        .map(|_| {
            let d = rng.random_range(1..=degree.min(n).max(1));
            let vars = index::sample(rng, n, d.min(n)).into_vec();
            let mut c = rng.random_range(-3i128..=2);
            if c >= 0 {
                c += 1;
            }
            (vars, Rational::from_integer(c))
        })
        .collect::<Vec<_>>();
    let poly = SparsePoly::new(n, OutputAlphabet::Signed, monomials)?;
    let threshold = Rational::new(2 * rng.random_range(-2i128..=1) + 1, 2);
    Ok(SparsePtf::new(poly, threshold))
}

/// A DFA with `states` states, random transitions and acceptance.
pub fn random_dfa(states: usize, input_len: usize, rng: &mut ChaCha8Rng) -> Result<Dfa> {
    let states = states.max(1);
    let delta = (0..states).map(|_| [rng.random_range(0..states), rng.random_range(0..states)]).collect();
    let accepting = (0..states).map(|_| rng.random()).collect();
    Dfa::new(0, accepting, delta, input_len)
}
