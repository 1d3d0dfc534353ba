//! Evident satisfaction of DNF terms, the flip biconditional it implies, and
//! generators of instances where every positive example is evident.

use alloc::vec::Vec;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concepts::{dnf_of_tree, DecisionTree, DnfFormula, Term};
use crate::cube::CubePoint;
use crate::distributions::Distribution;
use crate::reductions::ReplicationMap;
use crate::rng;
use crate::{Error, Rational, Result};

fn check_index(f: &DnfFormula, i: usize) -> Result<()> {
    if i < f.len() {
        Ok(())
    } else {
        Err(Error::TermIndex { index: i, terms: f.len() })
    }
}

/// Whether `x` satisfies term `i` of `f` evidently:
///
/// * `x` satisfies `T_i` and no other term;
/// * every single-coordinate flip of `x` that satisfies `f` satisfies `T_i` and only `T_i`.
pub fn satisfies_evidently(f: &DnfFormula, i: usize, x: &CubePoint) -> Result<bool> {
    check_index(f, i)?;
    x.check_dim(f.dim())?;
    Ok(evident_unchecked(f, i, x))
}

fn only_term(f: &DnfFormula, i: usize, x: &CubePoint) -> bool {
    f.terms().iter().enumerate().all(|(k, t)| t.holds(x) == (k == i))
}

fn evident_unchecked(f: &DnfFormula, i: usize, x: &CubePoint) -> bool {
    if !only_term(f, i, x) {
        return false;
    }
    let mut y = x.clone();
    for j in 0..x.dim() {
        y.flip_in_place(j);
        let ok = !f.holds(&y) || only_term(f, i, &y);
        y.flip_in_place(j);
        if !ok {
            return false;
        }
    }
    true
}

/// Index of the term `x` satisfies evidently, if any.
pub fn evident_term(f: &DnfFormula, x: &CubePoint) -> Result<Option<usize>> {
    x.check_dim(f.dim())?;
    let sat = f.satisfied_terms(x)?;
    Ok(match sat.as_slice() {
        [i] if evident_unchecked(f, *i, x) => Some(*i),
        _ => None,
    })
}

/// For `x` evident for term `i`: checks that `f(x^{⊕j}) = 1` exactly when
/// variable `j` does not occur in `T_i`, for every `j`.
pub fn check_claim1(f: &DnfFormula, i: usize, x: &CubePoint) -> Result<bool> {
    if !satisfies_evidently(f, i, x)? {
        return Err(Error::NotEvident(i));
    }
    let term = &f.terms()[i];
    let mut y = x.clone();
    for j in 0..x.dim() {
        y.flip_in_place(j);
        let positive = f.holds(&y);
        y.flip_in_place(j);
        if positive == term.contains_var(j) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEvidence {
    pub term: usize,
    /// `Pr(T_i(x) = 1)`.
    #[serde(with = "crate::ratio_str")]
    pub satisfaction: Rational,
    /// `Pr(x evident for T_i | T_i(x) = 1)`; `None` when the term has zero mass.
    pub evident_rate: Option<EvidentRate>,
    pub passes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvidentRate(#[serde(with = "crate::ratio_str")] pub Rational);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceReport {
    #[serde(with = "crate::ratio_str")]
    pub beta: Rational,
    pub terms: Vec<TermEvidence>,
    pub verdict: bool,
}

/// Exact per-term evident rates of `f` under `dist`, compared against `beta`
/// (default `1/n`). Terms with zero satisfaction mass pass vacuously.
pub fn evidence_report(f: &DnfFormula, dist: &Distribution, beta: Option<Rational>) -> Result<EvidenceReport> {
    if dist.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: dist.dim() });
    }
    let beta = beta.unwrap_or_else(|| Rational::new(1, f.dim().max(1) as i128));
    let d = f.len();
    let mut sat = alloc::vec![Rational::zero(); d];
    let mut evident = alloc::vec![Rational::zero(); d];
    for (x, p) in dist.masses()? {
        let hit = f.satisfied_terms(&x)?;
        for &i in &hit {
            sat[i] += p;
        }
        if let [i] = hit.as_slice() {
            if evident_unchecked(f, *i, &x) {
                evident[*i] += p;
            }
        }
    }
    let terms: Vec<TermEvidence> = (0..d)
        .map(|i| {
            let rate = (!sat[i].is_zero()).then(|| EvidentRate(evident[i] / sat[i]));
            TermEvidence {
                term: i,
                satisfaction: sat[i],
                passes: rate.is_none_or(|r| r.0 >= beta),
                evident_rate: rate,
            }
        })
        .collect();
    let verdict = terms.iter().all(|t| t.passes);
    Ok(EvidenceReport { beta, terms, verdict })
}

/// A random DNF in which every two distinct terms contain at least two pairs of
/// opposite literals. Every satisfying point of such a formula is evident.
///
/// Each term shares a core of `c` variables whose sign patterns are distinct
/// even-weight words (pairwise distance ≥ 2); the remaining `width - c`
/// literals are drawn at random from the other variables.
pub fn gen_opposite_literal_dnf(n: usize, d: usize, width: usize, seed: u64) -> Result<DnfFormula> {
    if d == 0 || width < 2 {
        return Err(Error::Infeasible(alloc::format!("need d >= 1 and width >= 2 (d={d}, width={width})")));
    }
    let mut core = 2usize;
    while (1u128 << (core - 1)) < d as u128 {
        core += 1;
    }
    if core > width || width > n {
        return Err(Error::Infeasible(alloc::format!(
            "{d} terms need a {core}-variable core; width {width}, dimension {n}"
        )));
    }
    let mut rng = rng::stream(seed);
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(&mut rng);
    let (core_vars, rest) = vars.split_at(core);

    let mut words: Vec<u64> = (0..1u64 << (core - 1))
        .map(|t| t | (((t.count_ones() % 2) as u64) << (core - 1)))
        .collect();
    words.shuffle(&mut rng);
    words.truncate(d);
    let mask: u64 = rng.random_range(0..1u64 << core);

    let mut terms = Vec::with_capacity(d);
    for w in words {
        let w = w ^ mask;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (b, &v) in core_vars.iter().enumerate() {
            if (w >> b) & 1 == 1 {
                pos.push(v);
            } else {
                neg.push(v);
            }
        }
        let mut extra = rest.to_vec();
        extra.shuffle(&mut rng);
        for &v in extra.iter().take(width - core) {
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

/// `(x_1, ..., x_n) ↦ (x_1, x_1, ..., x_n, x_n)`.
pub fn doubling_phi(x: &CubePoint) -> CubePoint {
    ReplicationMap::new(x.dim(), 2).apply_unchecked(x)
}

/// The tree's 1-leaf path terms with every literal on `x_j` doubled onto
/// coordinates `2j` and `2j+1` (0-based) of the `2n`-cube.
pub fn doubling_dnf(tree: &DecisionTree) -> DnfFormula {
    let base = dnf_of_tree(tree);
    let terms = base
        .terms()
        .iter()
        .map(|t| {
            let pos = t.positives().iter().flat_map(|&j| [2 * j, 2 * j + 1]);
            let neg = t.negatives().iter().flat_map(|&j| [2 * j, 2 * j + 1]);
            Term::new(pos, neg).expect("doubling keeps literal sets disjoint")
        })
        .collect();
    DnfFormula::new(2 * tree.dim(), terms).expect("doubled indices stay below 2n")
}
