//! q-reductions between concept classes.
//!
//! A reduction pairs a replication map `φ` with a concept transformer
//! `h ↦ h'` such that `h = h' ∘ φ`, and either
//!
//! * **type A**: `h'` is `1` on every point within distance `q` of the image
//!   but outside it, or
//! * **type B**: every point within distance `q` of the image has a unique
//!   nearest preimage `x`, and `h'` gives it the label `h(x)`.
//!
//! [`verify_reduction`] checks both obligations by enumeration, and
//! [`simulate_pac_from_local`] answers a local-query learner's queries using
//! only the labelled sample.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::concepts::Concept;
use crate::cube::{enumerate_cube, flips_within, hamming_unchecked, CubePoint};
use crate::{Error, Result};

mod map;
mod simulate;
mod type_a;
mod type_b;

pub use map::{replicate_map, ReplicationMap};
pub use simulate::{simulate_pac_from_local, Simulation, SynthesizedOracle};
pub use type_a::{
    build_block_checker, build_block_checker_blocks, build_block_simulator, build_block_simulator_blocks,
    build_detector, build_detector_blocks, dfa_product_or, reduce_dfa_blocks, reduce_dfa_typeA, reduce_dnf_blocks,
    reduce_dnf_typeA,
};
pub use type_b::{
    poly_size_multipliers, reduce_junta_typeB, reduce_poly_typeB, reduce_ptf_typeB, reduce_tree_typeB,
    POLY_TERM_CAP, TREE_LEAF_CAP,
};

/// Largest radius [`verify_reduction`] enumerates by default.
pub const DEFAULT_CAP_Q: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    TypeA,
    TypeB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Dnf,
    Dfa,
    Junta,
    Tree,
    Poly,
    Ptf,
}

impl Construction {
    pub const ALL: [Construction; 6] =
        [Construction::Dnf, Construction::Dfa, Construction::Junta, Construction::Tree, Construction::Poly, Construction::Ptf];

    pub fn kind(self) -> ReductionKind {
        match self {
            Construction::Dnf | Construction::Dfa => ReductionKind::TypeA,
            _ => ReductionKind::TypeB,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Construction::Dnf => "dnf",
            Construction::Dfa => "dfa",
            Construction::Junta => "junta",
            Construction::Tree => "tree",
            Construction::Poly => "poly",
            Construction::Ptf => "ptf",
        }
    }
}

impl core::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConcept(alloc::format!("unknown construction {s:?}")))
    }
}

/// Deliberately broken variants of the constructions, used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// DNF type A without the block-mismatch detector `G'`.
    DropDetector,
    /// Block simulator without its `i = k` transition case.
    StalledSimulator,
    /// Stacked tree labelled by the first copy instead of the majority.
    FirstCopyLabel,
}

/// A replication map, locality budget and concept transformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QReduction {
    construction: Construction,
    map: ReplicationMap,
    q: usize,
    fault: Option<Fault>,
}

impl QReduction {
    /// Type A over blocks of `k` (default `n^2`), locality `k − 1`.
    pub fn type_a(construction: Construction, n: usize, k: Option<usize>) -> Result<Self> {
        if construction.kind() != ReductionKind::TypeA {
            return Err(Error::InvalidConcept(alloc::format!("{} is not a type-A construction", construction.name())));
        }
        let k = k.unwrap_or(n * n).max(1);
        Ok(QReduction { construction, map: ReplicationMap::new(n, k), q: k - 1, fault: None })
    }

    /// Type B over blocks of `2q₀ + 1`, locality `q₀`.
    pub fn type_b(construction: Construction, n: usize, q0: usize) -> Result<Self> {
        if construction.kind() != ReductionKind::TypeB {
            return Err(Error::InvalidConcept(alloc::format!("{} is not a type-B construction", construction.name())));
        }
        Ok(QReduction { construction, map: ReplicationMap::new(n, 2 * q0 + 1), q: q0, fault: None })
    }

    /// Injects a fault. Only faults belonging to this construction are accepted.
    pub fn with_fault(mut self, fault: Fault) -> Result<Self> {
        let ok = matches!(
            (self.construction, fault),
            (Construction::Dnf, Fault::DropDetector)
                | (Construction::Dfa, Fault::StalledSimulator)
                | (Construction::Tree, Fault::FirstCopyLabel)
        );
        if !ok {
            return Err(Error::InvalidConcept(alloc::format!("{fault:?} does not apply to {}", self.construction.name())));
        }
        self.fault = Some(fault);
        Ok(self)
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn kind(&self) -> ReductionKind {
        self.construction.kind()
    }

    pub fn map(&self) -> &ReplicationMap {
        &self.map
    }

    pub fn locality(&self) -> usize {
        self.q
    }

    pub fn fault(&self) -> Option<Fault> {
        self.fault
    }

    pub fn phi(&self, x: &CubePoint) -> Result<CubePoint> {
        self.map.apply(x)
    }

    /// `h ↦ h'`.
    pub fn transform(&self, h: &Concept) -> Result<Concept> {
        if h.dim() != self.map.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.map.source_dim(), found: h.dim() });
        }
        let k = self.map.factor();
        let q0 = (k - 1) / 2;
        Ok(match (self.construction, h) {
            (Construction::Dnf, Concept::Dnf(f)) => {
                if self.fault == Some(Fault::DropDetector) {
                    let terms = type_a::lift_terms(f, &self.map);
                    Concept::Dnf(crate::concepts::DnfFormula::new(self.map.target_dim(), terms)?)
                } else {
                    Concept::Dnf(reduce_dnf_blocks(f, k))
                }
            }
            (Construction::Dfa, Concept::Dfa(a)) => {
                let n = a.input_len();
                let step = if self.fault == Some(Fault::StalledSimulator) {
                    type_a::SimulatorStep::Stalled
                } else {
                    type_a::SimulatorStep::Faithful
                };
                let sim = type_a::simulator(a, n, k, step);
                Concept::Dfa(dfa_product_or(&build_block_checker_blocks(n, k), &sim)?)
            }
            (Construction::Junta, Concept::Junta(j)) => Concept::Junta(reduce_junta_typeB(j, q0)?),
            (Construction::Tree, Concept::Tree(t)) => {
                let rule = if self.fault == Some(Fault::FirstCopyLabel) {
                    type_b::LeafRule::FirstCopy
                } else {
                    type_b::LeafRule::Majority
                };
                Concept::Tree(type_b::stacked_tree(t, q0, rule)?)
            }
            (Construction::Poly, Concept::Poly(p)) => Concept::Poly(reduce_poly_typeB(p, q0)?),
            (Construction::Ptf, Concept::Ptf(f)) => Concept::Ptf(reduce_ptf_typeB(f, q0)?),
            (c, h) => {
                return Err(Error::InvalidConcept(alloc::format!(
                    "{} reduction cannot transform a {} concept",
                    c.name(),
                    h.class_name()
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// `h(x) != h'(φ(x))`.
    ImageMismatch,
    /// Type A: a ball point outside the image is labelled 0.
    BallNotOne,
    /// Type B: a ball point is within `q` of zero or several images.
    AnchorNotUnique,
    /// Type B: a ball point's label differs from its anchor's.
    LabelChanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: FailureKind,
    /// Source point whose image (or ball) exposed the failure.
    pub source: CubePoint,
    /// Target point at which it was observed.
    pub point: CubePoint,
    pub expected: bool,
    pub found: bool,
    /// Number of images within distance `q` (type-B uniqueness failures).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchors: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub construction: Construction,
    pub kind: ReductionKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub q: usize,
    /// Radius actually enumerated, `min(q, cap_q)`.
    pub q_checked: usize,
    pub image_points: u64,
    pub ball_points: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub cap_q: usize,
    pub max_counterexamples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { cap_q: DEFAULT_CAP_Q, max_counterexamples: 8 }
    }
}

/// Number of source points `x'` with `d(z, φ(x')) <= q`, by dynamic
/// programming over blocks (each block contributes its distance to the
/// all-`-1` or all-`+1` block).
fn anchors_within(map: &ReplicationMap, z: &CubePoint, q: usize) -> u64 {
    let mut counts = vec![0u64; q + 1];
    counts[0] = 1;
    for i in 0..map.source_dim() {
        let plus = map.block(i).filter(|&t| z.get(t)).count();
        let costs = [plus, map.factor() - plus];
        let mut next = vec![0u64; q + 1];
        for (d, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for cost in costs {
                if d + cost <= q {
                    next[d + cost] = next[d + cost].saturating_add(c);
                }
            }
        }
        counts = next;
    }
    counts.iter().sum()
}

/// [`verify_reduction_with`] using [`VerifyOptions::default`].
pub fn verify_reduction(r: &QReduction, h: &Concept) -> Result<VerificationReport> {
    verify_reduction_with(r, h, VerifyOptions::default())
}

/// Checks `h = h' ∘ φ` on every source point, then the type-A or type-B
/// obligation on every point obtained by flipping at most `min(q, cap_q)`
/// coordinates of each image.
pub fn verify_reduction_with(r: &QReduction, h: &Concept, opts: VerifyOptions) -> Result<VerificationReport> {
    let transformed = r.transform(h)?;
    let h_prime = crate::concepts::Evaluator::new(&transformed);
    let map = r.map;
    let q_checked = r.q.min(opts.cap_q);
    let mut report = VerificationReport {
        construction: r.construction,
        kind: r.kind(),
        fault: r.fault,
        source_dim: map.source_dim(),
        target_dim: map.target_dim(),
        q: r.q,
        q_checked,
        image_points: 0,
        ball_points: 0,
        failures: 0,
        counterexamples: Vec::new(),
        pass: false,
    };
    let fail = |report: &mut VerificationReport, c: Counterexample| {
        report.failures += 1;
        if report.counterexamples.len() < opts.max_counterexamples {
            report.counterexamples.push(c);
        }
    };
    for x in enumerate_cube(map.source_dim())? {
        let label = h.eval(&x)?;
        let image = map.apply_unchecked(&x);
        report.image_points += 1;
        let found = h_prime.eval(&image)?;
        if found != label {
            let c = Counterexample { kind: FailureKind::ImageMismatch, source: x.clone(), point: image.clone(), expected: label, found, anchors: None };
            fail(&mut report, c);
        }
        for z in flips_within(&image, q_checked).skip(1) {
            report.ball_points += 1;
            match r.kind() {
                ReductionKind::TypeA => {
                    if map.preimage(&z).is_some() {
                        continue;
                    }
                    let found = h_prime.eval(&z)?;
                    if !found {
                        let c = Counterexample { kind: FailureKind::BallNotOne, source: x.clone(), point: z, expected: true, found, anchors: None };
                        fail(&mut report, c);
                    }
                }
                ReductionKind::TypeB => {
                    let anchors = anchors_within(&map, &z, r.q);
                    let found = h_prime.eval(&z)?;
                    if anchors != 1 {
                        let c = Counterexample {
                            kind: FailureKind::AnchorNotUnique,
                            source: x.clone(),
                            point: z,
                            expected: label,
                            found,
                            anchors: Some(anchors),
                        };
                        fail(&mut report, c);
                    } else if found != label {
                        let c = Counterexample { kind: FailureKind::LabelChanged, source: x.clone(), point: z, expected: label, found, anchors: None };
                        fail(&mut report, c);
                    }
                }
            }
        }
    }
    report.pass = report.failures == 0;
    Ok(report)
}

/// Smallest Hamming distance from `z` to `φ(x)` over the given source points.
pub(crate) fn nearest_image<'a>(map: &ReplicationMap, z: &CubePoint, sources: impl Iterator<Item = &'a CubePoint>) -> Option<usize> {
    sources.map(|x| hamming_unchecked(&map.apply_unchecked(x), z)).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::{DecisionTree, Dfa, DnfFormula, Junta, Node, OutputAlphabet, SparsePoly, SparsePtf, Term};
    use crate::Rational;

    fn dnf_x1() -> Concept {
        DnfFormula::new(2, vec![Term::from_signed(&[1]).unwrap()]).unwrap().into()
    }

    #[test]
    fn dnf_type_a_verifies() {
        let r = QReduction::type_a(Construction::Dnf, 2, None).unwrap();
        assert_eq!(r.locality(), 3);
        let rep = verify_reduction(&r, &dnf_x1()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.image_points, 4);
        assert_eq!(rep.ball_points, 4 * (8 + 28 + 56));
    }

    #[test]
    fn junta_xor_type_b_verifies() {
        let h: Concept = Junta::from_fn(2, vec![0, 1], |b| b[0] ^ b[1]).unwrap().into();
        let r = QReduction::type_b(Construction::Junta, 2, 1).unwrap();
        assert!(verify_reduction(&r, &h).unwrap().pass);
    }

    #[test]
    fn dropping_the_detector_is_caught() {
        let r = QReduction::type_a(Construction::Dnf, 2, None).unwrap().with_fault(Fault::DropDetector).unwrap();
        let rep = verify_reduction(&r, &dnf_x1()).unwrap();
        assert!(!rep.pass);
        let c = &rep.counterexamples[0];
        assert_eq!(c.kind, FailureKind::BallNotOne);
        assert!(!c.found);
        assert!(r.map().preimage(&c.point).is_none());
    }

    #[test]
    fn stalled_simulator_is_caught() {
        let r = QReduction::type_a(Construction::Dfa, 2, None).unwrap().with_fault(Fault::StalledSimulator).unwrap();
        let rep = verify_reduction(&r, &Dfa::parity(2).into()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.counterexamples[0].kind, FailureKind::ImageMismatch);
    }

    #[test]
    fn first_copy_label_is_caught() {
        let t: Concept = DecisionTree::new(2, Node::split(0, Node::leaf(false), Node::leaf(true))).unwrap().into();
        let r = QReduction::type_b(Construction::Tree, 2, 1).unwrap().with_fault(Fault::FirstCopyLabel).unwrap();
        let rep = verify_reduction(&r, &t).unwrap();
        assert!(!rep.pass);
        assert!(rep.counterexamples.iter().all(|c| c.kind == FailureKind::LabelChanged));
        assert!(verify_reduction(&QReduction::type_b(Construction::Tree, 2, 1).unwrap(), &t).unwrap().pass);
    }

    #[test]
    fn poly_and_ptf_verify() {
        let p = SparsePoly::new(3, OutputAlphabet::Signed, [(vec![0, 2], Rational::new(1, 1))]).unwrap();
        let r = QReduction::type_b(Construction::Poly, 3, 1).unwrap();
        assert!(verify_reduction(&r, &p.clone().into()).unwrap().pass);
        let f = SparsePtf::new(p, Rational::new(1, 2));
        let r = QReduction::type_b(Construction::Ptf, 3, 2).unwrap();
        assert!(verify_reduction(&r, &f.into()).unwrap().pass);
    }

    #[test]
    fn mismatched_classes_and_faults_are_rejected() {
        let r = QReduction::type_b(Construction::Junta, 2, 1).unwrap();
        assert!(r.transform(&dnf_x1()).is_err());
        assert!(QReduction::type_a(Construction::Junta, 2, None).is_err());
        assert!(QReduction::type_b(Construction::Dnf, 2, 1).is_err());
        assert!(r.with_fault(Fault::DropDetector).is_err());
    }

    #[test]
    fn anchor_counting_matches_brute_force() {
        let map = ReplicationMap::new(3, 3);
        for z in enumerate_cube(9).unwrap() {
            for q in 0..=4 {
                let brute = enumerate_cube(3)
                    .unwrap()
                    .filter(|x| hamming_unchecked(&map.apply_unchecked(x), &z) <= q)
                    .count() as u64;
                assert_eq!(anchors_within(&map, &z, q), brute);
            }
        }
    }
}
