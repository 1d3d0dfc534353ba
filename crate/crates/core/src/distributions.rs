//! Distributions over the cube, labelled samples and loss.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concepts::Concept;
use crate::cube::{enumerate_cube, CubePoint, ENUMERATION_CAP};
use crate::rng::{self, ChaCha8Rng};
use crate::{Error, Rational, Result};

fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A distribution with explicit finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupport {
    n: usize,
    atoms: Vec<(CubePoint, Rational)>,
    cumulative: Vec<f64>,
}

impl FiniteSupport {
    /// Atoms with zero mass are dropped; repeated points have their masses merged.
    pub fn new(n: usize, atoms: impl IntoIterator<Item = (CubePoint, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<CubePoint, Rational> = BTreeMap::new();
        for (x, p) in atoms {
            x.check_dim(n)?;
            if p < Rational::zero() {
                return Err(Error::InvalidDistribution(alloc::format!("negative mass {p} at {x}")));
            }
            *merged.entry(x).or_insert_with(Rational::zero) += p;
        }
        let total: Rational = merged.values().copied().sum();
        if total != Rational::one() {
            return Err(Error::InvalidDistribution(alloc::format!("masses sum to {total}, not 1")));
        }
        let atoms: Vec<(CubePoint, Rational)> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let mut acc = Rational::zero();
        let cumulative = atoms
            .iter()
            .map(|(_, p)| {
                acc += p;
                to_f64(&acc)
            })
            .collect();
        Ok(FiniteSupport { n, atoms, cumulative })
    }

    pub fn point_mass(x: CubePoint) -> Self {
        let n = x.dim();
        FiniteSupport::new(n, [(x, Rational::one())]).expect("a point mass is a distribution")
    }

    pub fn atoms(&self) -> &[(CubePoint, Rational)] {
        &self.atoms
    }

    pub fn mass(&self, x: &CubePoint) -> Rational {
        self.atoms.iter().find(|(y, _)| y == x).map_or_else(Rational::zero, |(_, p)| *p)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> CubePoint {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        self.atoms[i].0.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    UniformCube(usize),
    /// Independent coordinates; entry `j` is the probability that coordinate `j` is `+1`.
    Product(Vec<Rational>),
    FiniteSupport(FiniteSupport),
}

impl Distribution {
    pub fn product(probs: Vec<Rational>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| **p < Rational::zero() || **p > Rational::one()) {
            return Err(Error::InvalidDistribution(alloc::format!("coordinate probability {p} outside [0,1]")));
        }
        Ok(Distribution::Product(probs))
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::UniformCube(n) => *n,
            Distribution::Product(p) => p.len(),
            Distribution::FiniteSupport(f) => f.n,
        }
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> CubePoint {
        match self {
            Distribution::UniformCube(n) => {
                let mut x = CubePoint::minus_ones(*n);
                for j in 0..*n {
                    x.set(j, rng.random());
                }
                x
            }
            Distribution::Product(probs) => {
                let mut x = CubePoint::minus_ones(probs.len());
                for (j, p) in probs.iter().enumerate() {
                    x.set(j, rng.random::<f64>() < to_f64(p));
                }
                x
            }
            Distribution::FiniteSupport(f) => f.draw(rng),
        }
    }

    /// Every support point with its exact mass. Needs `dim <= ENUMERATION_CAP`
    /// unless the support is explicit.
    pub fn masses(&self) -> Result<Box<dyn Iterator<Item = (CubePoint, Rational)> + '_>> {
        match self {
            Distribution::UniformCube(n) => {
                let it = enumerate_cube(*n).map_err(|_| Error::ExactCap { n: *n, cap: ENUMERATION_CAP })?;
                let mass = Rational::new(1, 1i128 << *n);
                Ok(Box::new(it.map(move |x| (x, mass))))
            }
            Distribution::Product(probs) => {
                let n = probs.len();
                let it = enumerate_cube(n).map_err(|_| Error::ExactCap { n, cap: ENUMERATION_CAP })?;
                Ok(Box::new(it.map(move |x| {
                    let mass = probs
                        .iter()
                        .enumerate()
                        .fold(Rational::one(), |acc, (j, p)| acc * if x.get(j) { *p } else { Rational::one() - p });
                    (x, mass)
                })))
            }
            Distribution::FiniteSupport(f) => Ok(Box::new(f.atoms.iter().cloned())),
        }
    }

    /// Exact probability of the event `pred`.
    pub fn probability(&self, mut pred: impl FnMut(&CubePoint) -> Result<bool>) -> Result<Rational> {
        if let Distribution::UniformCube(n) = self {
            let mut hits: i128 = 0;
            let it = enumerate_cube(*n).map_err(|_| Error::ExactCap { n: *n, cap: ENUMERATION_CAP })?;
            for x in it {
                hits += pred(&x)? as i128;
            }
            return Ok(Rational::new(hits, 1i128 << n));
        }
        let mut total = Rational::zero();
        for (x, p) in self.masses()? {
            if pred(&x)? {
                total += p;
            }
        }
        Ok(total)
    }
}

/// `m` i.i.d. draws from `dist`, reproducible from `seed`.
pub fn sample(dist: &Distribution, m: usize, seed: u64) -> Vec<CubePoint> {
    let mut rng = rng::stream(seed);
    (0..m).map(|_| dist.draw(&mut rng)).collect()
}

/// The image of `dist` under an injective map into dimension `target_dim`.
pub fn pushforward(
    dist: &Distribution,
    phi: impl Fn(&CubePoint) -> Result<CubePoint>,
    target_dim: usize,
) -> Result<Distribution> {
    let mut image: BTreeMap<CubePoint, Rational> = BTreeMap::new();
    for (x, p) in dist.masses()? {
        if p.is_zero() {
            continue;
        }
        let z = phi(&x)?;
        z.check_dim(target_dim)?;
        if image.contains_key(&z) {
            return Err(Error::NonInjective(z.to_string()));
        }
        image.insert(z, p);
    }
    Ok(Distribution::FiniteSupport(FiniteSupport::new(target_dim, image)?))
}

/// `Pr_{x~D}[h_hat(x) != h_star(x)]`, computed exactly.
pub fn exact_loss(dist: &Distribution, h_star: &Concept, h_hat: &Concept) -> Result<Rational> {
    dist.probability(|x| Ok(h_star.eval(x)? != h_hat.eval(x)?))
}

/// Empirical disagreement over `m` fresh draws.
pub fn mc_loss(dist: &Distribution, h_star: &Concept, h_hat: &Concept, m: usize, seed: u64) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let mut rng = rng::stream(seed);
    let mut wrong = 0usize;
    for _ in 0..m {
        let x = dist.draw(&mut rng);
        if h_star.eval(&x)? != h_hat.eval(&x)? {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / m as f64)
}

/// A sequence of labelled examples of a common dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    examples: Vec<(CubePoint, bool)>,
}

impl LabeledSample {
    pub fn new(examples: Vec<(CubePoint, bool)>) -> Result<Self> {
        if let Some((first, _)) = examples.first() {
            let n = first.dim();
            for (x, _) in &examples {
                x.check_dim(n)?;
            }
        }
        Ok(LabeledSample { examples })
    }

    /// Labels `points` with `concept`.
    pub fn label(points: Vec<CubePoint>, concept: &Concept) -> Result<Self> {
        let examples = points
            .into_iter()
            .map(|x| concept.eval(&x).map(|y| (x, y)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledSample { examples })
    }

    pub fn examples(&self) -> &[(CubePoint, bool)] {
        &self.examples
    }

    pub fn points(&self) -> impl Iterator<Item = &CubePoint> {
        self.examples.iter().map(|(x, _)| x)
    }

    pub fn positives(&self) -> impl Iterator<Item = &CubePoint> {
        self.examples.iter().filter(|(_, y)| *y).map(|(x, _)| x)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &CubePoint> {
        self.examples.iter().filter(|(_, y)| !*y).map(|(x, _)| x)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Splits into the first `k` examples and the rest.
    pub fn split_at(&self, k: usize) -> (LabeledSample, LabeledSample) {
        let k = k.min(self.examples.len());
        (
            LabeledSample { examples: self.examples[..k].to_vec() },
            LabeledSample { examples: self.examples[k..].to_vec() },
        )
    }

    /// Applies `phi` to every point, keeping labels.
    pub fn map_points(&self, phi: impl Fn(&CubePoint) -> Result<CubePoint>) -> Result<LabeledSample> {
        let examples = self
            .examples
            .iter()
            .map(|(x, y)| phi(x).map(|z| (z, *y)))
            .collect::<Result<Vec<_>>>()?;
        LabeledSample::new(examples)
    }
}
