//! Concept classes and their evaluators.

use alloc::boxed::Box;

use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::reductions::ReplicationMap;
use crate::Result;

mod dfa;
mod dnf;
mod junta;
mod poly;
mod tree;

pub use dfa::{eval_dfa, symbol, Dfa};
pub use dnf::{eval_dnf, term_satisfied, DnfFormula, Term};
pub use junta::{eval_junta, Junta, JUNTA_CAP};
pub use poly::{eval_poly, eval_ptf, maj_poly, Monomial, OutputAlphabet, SparsePoly, SparsePtf, MAJORITY_CAP};
pub use tree::{dnf_of_tree, eval_tree, DecisionTree, Node};

use poly::{value_to_label, CompiledPoly};
use crate::Rational;

/// A `{0,1}`-valued function on a fixed-dimension cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Concept {
    Dnf(DnfFormula),
    Tree(DecisionTree),
    Dfa(Dfa),
    Junta(Junta),
    Poly(SparsePoly),
    Ptf(SparsePtf),
    /// `inner ∘ map`: a hypothesis over the target cube pulled back to the source.
    Pullback { map: ReplicationMap, inner: Box<Concept> },
}

impl Concept {
    pub fn dim(&self) -> usize {
        match self {
            Concept::Dnf(f) => f.dim(),
            Concept::Tree(t) => t.dim(),
            Concept::Dfa(a) => a.input_len(),
            Concept::Junta(h) => h.dim(),
            Concept::Poly(p) => p.dim(),
            Concept::Ptf(f) => f.dim(),
            Concept::Pullback { map, .. } => map.source_dim(),
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Concept::Dnf(_) => "dnf",
            Concept::Tree(_) => "tree",
            Concept::Dfa(_) => "dfa",
            Concept::Junta(_) => "junta",
            Concept::Poly(_) => "poly",
            Concept::Ptf(_) => "ptf",
            Concept::Pullback { .. } => "pullback",
        }
    }

    /// The label of `x`. Polynomials go through their output-alphabet adapter.
    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        match self {
            Concept::Dnf(f) => f.eval(x),
            Concept::Tree(t) => t.eval(x),
            Concept::Dfa(a) => a.eval(x),
            Concept::Junta(h) => h.eval(x),
            Concept::Poly(p) => p.label(x),
            Concept::Ptf(f) => f.eval(x),
            Concept::Pullback { map, inner } => inner.eval(&map.apply(x)?),
        }
    }
}

/// Evaluates a concept many times; polynomials are flattened first.
pub(crate) enum Evaluator<'a> {
    Poly { dim: usize, poly: CompiledPoly, alphabet: OutputAlphabet },
    Ptf { dim: usize, poly: CompiledPoly, threshold: Rational },
    Plain(&'a Concept),
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(c: &'a Concept) -> Self {
        let compiled = match c {
            Concept::Poly(p) => CompiledPoly::new(p)
                .map(|poly| Evaluator::Poly { dim: p.dim(), poly, alphabet: p.alphabet() }),
            Concept::Ptf(f) => CompiledPoly::new(&f.poly)
                .map(|poly| Evaluator::Ptf { dim: f.dim(), poly, threshold: f.threshold }),
            _ => None,
        };
        compiled.unwrap_or(Evaluator::Plain(c))
    }

    pub(crate) fn eval(&self, x: &CubePoint) -> Result<bool> {
        match self {
            Evaluator::Poly { dim, poly, alphabet } => {
                x.check_dim(*dim)?;
                value_to_label(*alphabet, poly.value(x))
            }
            Evaluator::Ptf { dim, poly, threshold } => {
                x.check_dim(*dim)?;
                Ok(poly.value(x) >= *threshold)
            }
            Evaluator::Plain(c) => c.eval(x),
        }
    }
}

impl From<DnfFormula> for Concept {
    fn from(f: DnfFormula) -> Self {
        Concept::Dnf(f)
    }
}

impl From<DecisionTree> for Concept {
    fn from(t: DecisionTree) -> Self {
        Concept::Tree(t)
    }
}

impl From<Dfa> for Concept {
    fn from(a: Dfa) -> Self {
        Concept::Dfa(a)
    }
}

impl From<Junta> for Concept {
    fn from(h: Junta) -> Self {
        Concept::Junta(h)
    }
}

impl From<SparsePoly> for Concept {
    fn from(p: SparsePoly) -> Self {
        Concept::Poly(p)
    }
}

impl From<SparsePtf> for Concept {
    fn from(f: SparsePtf) -> Self {
        Concept::Ptf(f)
    }
}
