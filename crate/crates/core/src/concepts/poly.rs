use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::{Error, Rational, Result};

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Largest arity accepted by [`maj_poly`].
pub const MAJORITY_CAP: usize = 15;

/// Sorted, duplicate-free set of variables of a multilinear monomial.
pub type Monomial = Vec<usize>;

/// How a polynomial's value maps to a `{0,1}` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputAlphabet {
    /// Values `-1`/`+1`; the label is `(v + 1) / 2`.
    Signed,
    /// Values `0`/`1`, used as the label directly.
    ZeroOne,
}

/// A multilinear polynomial over `±1` inputs with exact coefficients.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePoly {
    n: usize,
    alphabet: OutputAlphabet,
    monomials: BTreeMap<Monomial, Rational>,
}

/// Reduces a variable list with `z_i^2 = 1`: sorted, and each variable kept iff it occurs an odd number of times.
fn multilinear(mut vars: Vec<usize>) -> Monomial {
    vars.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(vars.len());
    for v in vars {
        if out.last() == Some(&v) {
            out.pop();
        } else {
            out.push(v);
        }
    }
    out
}

/// Symmetric difference of two sorted monomials (their product under `z_i^2 = 1`).
fn monomial_product(a: &[usize], b: &[usize]) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl SparsePoly {
    pub fn new(
        n: usize,
        alphabet: OutputAlphabet,
        terms: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let mut p = SparsePoly { n, alphabet, monomials: BTreeMap::new() };
        for (vars, c) in terms {
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::CoordinateOutOfRange { index: v, dim: n });
            }
            p.add_term(multilinear(vars), c);
        }
        Ok(p)
    }

    pub fn zero(n: usize, alphabet: OutputAlphabet) -> Self {
        SparsePoly { n, alphabet, monomials: BTreeMap::new() }
    }

    pub fn constant(n: usize, alphabet: OutputAlphabet, c: Rational) -> Self {
        let mut p = Self::zero(n, alphabet);
        p.add_term(Vec::new(), c);
        p
    }

    /// The single-variable polynomial `z_var`.
    pub fn variable(n: usize, alphabet: OutputAlphabet, var: usize) -> Result<Self> {
        Self::new(n, alphabet, [(vec![var], Rational::one())])
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let sum = self.monomials.get(&m).copied().unwrap_or_else(Rational::zero) + c;
        if sum.is_zero() {
            self.monomials.remove(&m);
        } else {
            self.monomials.insert(m, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> OutputAlphabet {
        self.alphabet
    }

    pub fn with_alphabet(mut self, alphabet: OutputAlphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.monomials.iter()
    }

    pub fn coefficient(&self, m: &[usize]) -> Rational {
        self.monomials.get(m).copied().unwrap_or_else(Rational::zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn degree(&self) -> usize {
        self.monomials.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn value(&self, x: &CubePoint) -> Result<Rational> {
        x.check_dim(self.n)?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &CubePoint) -> Rational {
        self.value_fast(x).unwrap_or_else(|| self.value_exact(x))
    }

    /// Integer accumulation over a running common denominator; `None` on
    /// overflow.
    fn value_fast(&self, x: &CubePoint) -> Option<Rational> {
        let (mut num, mut den) = (0i128, 1i128);
        for (m, c) in &self.monomials {
            let negative = m.iter().filter(|&&v| !x.get(v)).count() % 2 == 1;
            let (cn, cd) = (*c.numer(), *c.denom());
            if den % cd != 0 {
                let scale = cd / gcd(den, cd);
                num = num.checked_mul(scale)?;
                den = den.checked_mul(scale)?;
            }
            let term = cn.checked_mul(den / cd)?;
            num = if negative { num.checked_sub(term)? } else { num.checked_add(term)? };
        }
        Some(Rational::new(num, den))
    }

    fn value_exact(&self, x: &CubePoint) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.monomials {
            let negative = m.iter().filter(|&&v| !x.get(v)).count() % 2 == 1;
            if negative {
                acc -= c;
            } else {
                acc += c;
            }
        }
        acc
    }

    /// The `{0,1}` label at `x`; errors when the value is outside the alphabet.
    pub fn label(&self, x: &CubePoint) -> Result<bool> {
        let v = self.value(x)?;
        value_to_label(self.alphabet, v)
    }

    /// Multilinear product. Both operands must share a dimension.
    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.monomials {
            for (mb, cb) in &other.monomials {
                *acc.entry(monomial_product(ma, mb)).or_insert_with(Rational::zero) += *ca * *cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(SparsePoly { n: self.n, alphabet: self.alphabet, monomials: acc })
    }

    /// Re-indexes the polynomial into dimension `n` via `rename`.
    pub fn rename(&self, n: usize, rename: impl Fn(usize) -> usize) -> Result<SparsePoly> {
        SparsePoly::new(
            n,
            self.alphabet,
            self.monomials.iter().map(|(m, c)| (m.iter().map(|&v| rename(v)).collect(), *c)),
        )
    }

    /// Whether every cube point evaluates inside the declared alphabet (exhaustive).
    pub fn is_boolean_valued(&self) -> Result<bool> {
        for x in crate::cube::enumerate_cube(self.n)? {
            if value_to_label(self.alphabet, self.value_unchecked(&x)).is_err() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn value_to_label(alphabet: OutputAlphabet, v: Rational) -> Result<bool> {
    let one = Rational::one();
    match alphabet {
        OutputAlphabet::Signed if v == one => Ok(true),
        OutputAlphabet::Signed if v == -one => Ok(false),
        OutputAlphabet::ZeroOne if v == one => Ok(true),
        OutputAlphabet::ZeroOne if v.is_zero() => Ok(false),
        _ => Err(Error::NotBoolean(v)),
    }
}

/// A polynomial flattened for repeated evaluation: one bit mask per monomial
/// and integer numerators over a shared denominator.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPoly {
    words: usize,
    masks: Vec<u64>,
    numerators: Vec<i128>,
    denominator: i128,
}

impl CompiledPoly {
    /// `None` when the shared denominator or the largest possible sum does
    /// not fit in an `i128`.
    pub(crate) fn new(p: &SparsePoly) -> Option<Self> {
        let mut denominator = 1i128;
        for c in p.monomials.values() {
            let d = *c.denom();
            denominator = denominator.checked_mul(d / gcd(denominator, d))?;
        }
        let words = p.n.div_ceil(64).max(1);
        let mut masks = vec![0u64; words * p.monomials.len()];
        let mut numerators = Vec::with_capacity(p.monomials.len());
        let mut bound = 0i128;
        for (t, (m, c)) in p.monomials.iter().enumerate() {
            for &v in m {
                masks[t * words + v / 64] |= 1 << (v % 64);
            }
            let num = c.numer().checked_mul(denominator / c.denom())?;
            bound = bound.checked_add(num.checked_abs()?)?;
            numerators.push(num);
        }
        Some(CompiledPoly { words, masks, numerators, denominator })
    }

    /// The value at `x`, which must have the polynomial's dimension.
    pub(crate) fn value(&self, x: &CubePoint) -> Rational {
        let xw = x.words();
        let mut acc = 0i128;
        for (mask, &num) in self.masks.chunks_exact(self.words).zip(&self.numerators) {
            let minus: u32 = mask.iter().zip(xw).map(|(m, w)| (m & !w).count_ones()).sum();
            if minus % 2 == 1 {
                acc -= num;
            } else {
                acc += num;
            }
        }
        Rational::new(acc, self.denominator)
    }
}

/// A polynomial threshold function: label `1` iff `p(x) >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePtf {
    pub poly: SparsePoly,
    #[serde(with = "crate::ratio_str")]
    pub threshold: Rational,
}

impl SparsePtf {
    pub fn new(poly: SparsePoly, threshold: Rational) -> Self {
        SparsePtf { poly, threshold }
    }

    pub fn dim(&self) -> usize {
        self.poly.n
    }

    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        Ok(self.poly.value(x)? >= self.threshold)
    }
}

pub fn eval_poly(p: &SparsePoly, x: &CubePoint) -> Result<Rational> {
    p.value(x)
}

pub fn eval_ptf(f: &SparsePtf, x: &CubePoint) -> Result<bool> {
    f.eval(x)
}

/// Multilinear expansion of majority on `k` (odd) `±1` inputs, with `±1` outputs.
///
/// Coefficients are interpolated from all `2^k` values with a Walsh–Hadamard
/// transform: `c_S = 2^-k * sum_x maj(x) * prod_{i in S} x_i`.
pub fn maj_poly(k: usize) -> Result<SparsePoly> {
    if k.is_multiple_of(2) || k > MAJORITY_CAP {
        return Err(Error::EvenMajority(k));
    }
    let size = 1usize << k;
    // index bit i set <=> x_i = -1
    let mut values: Vec<i64> =
        (0..size).map(|b| if (b.count_ones() as usize) * 2 < k { 1 } else { -1 }).collect();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let denom = size as i128;
    let terms = values
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v != 0)
        .map(|(s, v)| ((0..k).filter(|i| (s >> i) & 1 == 1).collect(), Rational::new(v as i128, denom)));
    SparsePoly::new(k, OutputAlphabet::Signed, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::enumerate_cube;

    fn r(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    /// (z1 + z2 + z3 - z1 z2 z3) / 2
    fn maj3_by_hand() -> SparsePoly {
        SparsePoly::new(
            3,
            OutputAlphabet::Signed,
            [(vec![0], r(1, 2)), (vec![1], r(1, 2)), (vec![2], r(1, 2)), (vec![0, 1, 2], r(-1, 2))],
        )
        .unwrap()
    }

    #[test]
    fn hand_arithmetic() {
        let p = maj3_by_hand();
        assert_eq!(eval_poly(&p, &"++-".parse().unwrap()).unwrap(), r(1, 1));
        assert_eq!(eval_poly(&p, &"--+".parse().unwrap()).unwrap(), r(-1, 1));
    }

    #[test]
    fn majority_small_arities() {
        let m1 = maj_poly(1).unwrap();
        assert_eq!(m1.nonzero_count(), 1);
        assert_eq!(m1.coefficient(&[0]), r(1, 1));
        assert_eq!(maj_poly(3).unwrap(), maj3_by_hand());
        assert_eq!(maj_poly(4), Err(Error::EvenMajority(4)));
        assert_eq!(maj_poly(17), Err(Error::EvenMajority(17)));
    }

    #[test]
    fn majority_matches_brute_force() {
        for k in [1, 3, 5, 7, 9] {
            let p = maj_poly(k).unwrap();
            assert!(p.degree() <= k);
            assert!(p.nonzero_count() <= 1 << k);
            for x in enumerate_cube(k).unwrap() {
                let plus = x.bits().filter(|&b| b).count();
                let expected = if 2 * plus > k { 1 } else { -1 };
                assert_eq!(p.value(&x).unwrap(), r(expected, 1), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn multilinear_reduction_and_product() {
        let p = SparsePoly::new(3, OutputAlphabet::Signed, [(vec![1, 0, 1], r(1, 1))]).unwrap();
        assert_eq!(p.coefficient(&[0]), r(1, 1));
        let q = SparsePoly::new(3, OutputAlphabet::Signed, [(vec![0, 2], r(2, 1)), (vec![], r(-1, 1))]).unwrap();
        let pq = p.mul(&q).unwrap();
        assert_eq!(pq.coefficient(&[2]), r(2, 1));
        assert_eq!(pq.coefficient(&[0]), r(-1, 1));
        for x in enumerate_cube(3).unwrap() {
            assert_eq!(pq.value(&x).unwrap(), p.value(&x).unwrap() * q.value(&x).unwrap());
        }
        let cancel = SparsePoly::new(2, OutputAlphabet::Signed, [(vec![0], r(1, 1)), (vec![0], r(-1, 1))]).unwrap();
        assert_eq!(cancel.nonzero_count(), 0);
    }

    #[test]
    fn labels_and_thresholds() {
        let p = maj3_by_hand();
        assert!(p.is_boolean_valued().unwrap());
        assert!(p.label(&"+-+".parse().unwrap()).unwrap());
        let half = SparsePoly::constant(1, OutputAlphabet::ZeroOne, r(1, 2));
        assert_eq!(half.label(&"+".parse().unwrap()), Err(Error::NotBoolean(r(1, 2))));
        let ptf = SparsePtf::new(SparsePoly::variable(2, OutputAlphabet::Signed, 1).unwrap(), r(0, 1));
        assert!(eval_ptf(&ptf, &"-+".parse().unwrap()).unwrap());
        assert!(!eval_ptf(&ptf, &"+-".parse().unwrap()).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn integer_accumulation_matches_rationals(
            terms in proptest::collection::vec((proptest::collection::vec(0usize..5, 0..4), -50i128..50, 1i128..13), 0..12),
            rank in 0u64..32,
        ) {
            let p = SparsePoly::new(5, OutputAlphabet::Signed, terms.into_iter().map(|(m, a, b)| (m, r(a, b)))).unwrap();
            let x = CubePoint::from_rank(5, rank);
            proptest::prop_assert_eq!(p.value_fast(&x).unwrap(), p.value_exact(&x));
        }
    }

    #[test]
    fn overflow_falls_back_to_rationals() {
        // The first two monomials cancel at +1 +1; only the exact path sees that.
        let a = r(1, 1 << 100);
        let c = r(1, 3i128.pow(50));
        let p = SparsePoly::new(2, OutputAlphabet::Signed, [(vec![0], a), (vec![0, 1], -a), (vec![1], c)]).unwrap();
        let x = CubePoint::plus_ones(2);
        assert!(p.value_fast(&x).is_none());
        assert_eq!(p.value(&x).unwrap(), c);
    }

    #[test]
    fn compiled_matches_rationals() {
        let p = maj_poly(7).unwrap().mul(&maj3_by_hand().rename(7, |v| v + 4).unwrap()).unwrap();
        let c = CompiledPoly::new(&p).unwrap();
        for x in enumerate_cube(7).unwrap() {
            assert_eq!(c.value(&x), p.value(&x).unwrap());
        }
    }
}
