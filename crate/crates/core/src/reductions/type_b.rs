//! Type-B constructions over blocks of `2q₀+1` copies, all built on majority.

use alloc::vec::Vec;

use super::ReplicationMap;
use crate::concepts::{maj_poly, DecisionTree, Junta, Node, SparsePoly, SparsePtf, JUNTA_CAP};
use crate::{Error, Result};

/// Largest leaf count [`reduce_tree_typeB`] will build.
pub const TREE_LEAF_CAP: usize = 1 << 20;
/// Largest number of monomials [`reduce_poly_typeB`] will expand to.
pub const POLY_TERM_CAP: usize = 1 << 20;

fn majority_map(n: usize, q0: usize) -> ReplicationMap {
    ReplicationMap::new(n, 2 * q0 + 1)
}

/// `h'(z) = h(maj(block_1), …, maj(block_n))`. Depends on `(2q₀+1)·K` variables.
#[allow(non_snake_case)]
pub fn reduce_junta_typeB(h: &Junta, q0: usize) -> Result<Junta> {
    let map = majority_map(h.dim(), q0);
    let k = map.factor();
    let arity = h.relevant().len() * k;
    if arity > JUNTA_CAP {
        return Err(Error::SizeCap(alloc::format!(
            "replicated junta depends on {arity} variables, cap is {JUNTA_CAP}"
        )));
    }
    let relevant: Vec<usize> = h.relevant().iter().flat_map(|&r| map.block(r)).collect();
    let table = (0..1usize << arity)
        .map(|idx| {
            let source = (0..h.relevant().len()).fold(0usize, |acc, m| {
                let plus = ((idx >> (m * k)) & ((1 << k) - 1)).count_ones() as usize;
                acc | (((2 * plus > k) as usize) << m)
            });
            h.table()[source]
        })
        .collect();
    Junta::new(map.target_dim(), relevant, table)
}

/// How leaves of the stacked tree are labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LeafRule {
    Majority,
    /// Label of the first copy only.
    FirstCopy,
}

/// Stacks `2q₀+1` replicas of `t` on disjoint coordinate copies; each final
/// leaf is labelled with the majority of the labels met on the way.
/// Leaf count is `|T|^{2q₀+1}`.
#[allow(non_snake_case)]
pub fn reduce_tree_typeB(t: &DecisionTree, q0: usize) -> Result<DecisionTree> {
    stacked_tree(t, q0, LeafRule::Majority)
}

pub(crate) fn stacked_tree(t: &DecisionTree, q0: usize, rule: LeafRule) -> Result<DecisionTree> {
    let map = majority_map(t.dim(), q0);
    let k = map.factor();
    let leaves = t.leaf_count();
    let total = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(leaves).filter(|&v| v <= TREE_LEAF_CAP));
    if total.is_none() {
        return Err(Error::SizeCap(alloc::format!("{leaves}^{k} leaves exceeds cap {TREE_LEAF_CAP}")));
    }

    fn replica(node: &Node, copy: usize, map: &ReplicationMap, rule: LeafRule, root: &Node, labels: &mut Vec<bool>) -> Node {
        match node {
            Node::Leaf(label) => {
                labels.push(*label);
                let out = if copy + 1 == map.factor() {
                    let label = match rule {
                        LeafRule::Majority => 2 * labels.iter().filter(|&&l| l).count() > labels.len(),
                        LeafRule::FirstCopy => labels[0],
                    };
                    Node::Leaf(label)
                } else {
                    replica(root, copy + 1, map, rule, root, labels)
                };
                labels.pop();
                out
            }
            Node::Split { var, minus, plus } => Node::split(
                map.coordinate(*var, copy),
                replica(minus, copy, map, rule, root, labels),
                replica(plus, copy, map, rule, root, labels),
            ),
        }
    }

    let root = replica(t.root(), 0, &map, rule, t.root(), &mut Vec::with_capacity(k));
    DecisionTree::new(map.target_dim(), root)
}

/// Substitutes `maj(z_{i,1..2q₀+1})` for every variable `z_i` and expands.
#[allow(non_snake_case)]
pub fn reduce_poly_typeB(p: &SparsePoly, q0: usize) -> Result<SparsePoly> {
    let map = majority_map(p.dim(), q0);
    let k = map.factor();
    let maj = maj_poly(k)?;
    let per_block = maj.nonzero_count();
    let estimate = p.monomials().try_fold(0usize, |acc, (m, _)| {
        let mut c = 1usize;
        for _ in 0..m.len() {
            c = c.checked_mul(per_block)?;
        }
        acc.checked_add(c)
    });
    if estimate.is_none_or(|e| e > POLY_TERM_CAP) {
        return Err(Error::SizeCap(alloc::format!("expansion exceeds {POLY_TERM_CAP} monomials")));
    }
    let blocks: Vec<SparsePoly> = (0..p.dim())
        .map(|i| maj.rename(map.target_dim(), |c| map.coordinate(i, c)))
        .collect::<Result<_>>()?;
    let mut acc = SparsePoly::zero(map.target_dim(), p.alphabet());
    for (m, c) in p.monomials() {
        let mut term = SparsePoly::constant(map.target_dim(), p.alphabet(), *c);
        for &v in m {
            term = term.mul(&blocks[v])?;
        }
        acc = add(&acc, &term)?;
    }
    Ok(acc)
}

fn add(a: &SparsePoly, b: &SparsePoly) -> Result<SparsePoly> {
    SparsePoly::new(a.dim(), a.alphabet(), a.monomials().chain(b.monomials()).map(|(m, c)| (m.clone(), *c)))
}

/// [`reduce_poly_typeB`] on the polynomial; the threshold is unchanged.
#[allow(non_snake_case)]
pub fn reduce_ptf_typeB(f: &SparsePtf, q0: usize) -> Result<SparsePtf> {
    Ok(SparsePtf::new(reduce_poly_typeB(&f.poly, q0)?, f.threshold))
}

/// Per-variable degree and coefficient-count multipliers of the polynomial
/// construction: `(2q₀+1)` and `2^{2q₀+1}`.
pub fn poly_size_multipliers(q0: usize) -> (usize, usize) {
    let k = 2 * q0 + 1;
    (k, 1usize << k)
}
