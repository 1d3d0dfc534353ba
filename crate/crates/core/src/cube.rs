//! Points of `{-1,+1}^n` stored as packed bits (`1` encodes `+1`).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Default cap on `n` for exhaustive enumeration of the cube.
pub const ENUMERATION_CAP: usize = 24;

const WORD: usize = 64;

/// A point of `{-1,+1}^n`.
///
/// Bit `j` of the packed representation is set iff coordinate `j` equals `+1`.
/// Unused high bits of the last word are always zero, so derived equality,
/// ordering and hashing are well defined.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubePoint {
    n: usize,
    words: Vec<u64>,
}

impl CubePoint {
    /// The all-`-1` point.
    pub fn minus_ones(n: usize) -> Self {
        CubePoint { n, words: vec![0; n.div_ceil(WORD)] }
    }

    /// The all-`+1` point.
    pub fn plus_ones(n: usize) -> Self {
        let mut p = Self::minus_ones(n);
        for w in p.words.iter_mut() {
            *w = u64::MAX;
        }
        p.mask_tail();
        p
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut p = Self::minus_ones(signs.len());
        for (j, &s) in signs.iter().enumerate() {
            match s {
                1 => p.set(j, true),
                -1 => {}
                _ => return Err(Error::InvalidPoint(alloc::format!("{signs:?}"))),
            }
        }
        Ok(p)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut p = Self::minus_ones(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            p.set(j, b);
        }
        p
    }

    /// The point with rank `index` in the enumeration order of [`enumerate_cube`].
    ///
    /// Coordinate 0 is the most significant digit; `-1 < +1`.
    pub fn from_rank(n: usize, index: u64) -> Self {
        debug_assert!(n <= 64);
        let mut p = Self::minus_ones(n);
        for j in 0..n {
            if (index >> (n - 1 - j)) & 1 == 1 {
                p.set(j, true);
            }
        }
        p
    }

    /// Inverse of [`CubePoint::from_rank`]; only meaningful for `n <= 64`.
    pub fn rank(&self) -> u64 {
        (0..self.n).fold(0u64, |acc, j| (acc << 1) | self.get(j) as u64)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// `true` iff coordinate `j` is `+1`. Panics when `j >= n`.
    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.n, "coordinate {j} out of range for dimension {}", self.n);
        (self.words[j / WORD] >> (j % WORD)) & 1 == 1
    }

    /// Coordinate `j` as `-1` or `+1`.
    pub fn sign(&self, j: usize) -> i8 {
        if self.get(j) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, j: usize, plus: bool) {
        assert!(j < self.n, "coordinate {j} out of range for dimension {}", self.n);
        let mask = 1u64 << (j % WORD);
        if plus {
            self.words[j / WORD] |= mask;
        } else {
            self.words[j / WORD] &= !mask;
        }
    }

    pub fn flip_in_place(&mut self, j: usize) {
        assert!(j < self.n, "coordinate {j} out of range for dimension {}", self.n);
        self.words[j / WORD] ^= 1u64 << (j % WORD);
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(move |j| self.get(j))
    }

    fn mask_tail(&mut self) {
        let rem = self.n % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, found: self.n })
        }
    }
}

/// Number of coordinates where `x` and `y` differ.
pub fn hamming_distance(x: &CubePoint, y: &CubePoint) -> Result<usize> {
    y.check_dim(x.n)?;
    Ok(hamming_unchecked(x, y))
}

#[inline]
pub(crate) fn hamming_unchecked(x: &CubePoint, y: &CubePoint) -> usize {
    x.words.iter().zip(&y.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
}

/// `x` with coordinate `j` negated.
pub fn flip(x: &CubePoint, j: usize) -> Result<CubePoint> {
    if j >= x.n {
        return Err(Error::CoordinateOutOfRange { index: j, dim: x.n });
    }
    let mut y = x.clone();
    y.flip_in_place(j);
    Ok(y)
}

/// Membership in the Hamming ball `B(anchors, q)`.
pub fn in_ball(z: &CubePoint, anchors: &[CubePoint], q: usize) -> Result<bool> {
    for a in anchors {
        if hamming_distance(z, a)? <= q {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Smallest distance from `z` to any anchor, `None` for an empty anchor set.
pub fn min_distance(z: &CubePoint, anchors: &[CubePoint]) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for a in anchors {
        let d = hamming_distance(z, a)?;
        best = Some(best.map_or(d, |b| b.min(d)));
        if d == 0 {
            break;
        }
    }
    Ok(best)
}

/// Every point of `{-1,+1}^n` in lexicographic order (coordinate 0 most
/// significant, `-1 < +1`), subject to [`ENUMERATION_CAP`].
pub fn enumerate_cube(n: usize) -> Result<CubeIter> {
    enumerate_cube_capped(n, ENUMERATION_CAP)
}

pub fn enumerate_cube_capped(n: usize, cap: usize) -> Result<CubeIter> {
    if n > cap || n > 63 {
        return Err(Error::EnumerationCap { n, cap: cap.min(63) });
    }
    Ok(CubeIter { n, next: 0, end: 1u64 << n })
}

#[derive(Debug, Clone)]
pub struct CubeIter {
    n: usize,
    next: u64,
    end: u64,
}

impl Iterator for CubeIter {
    type Item = CubePoint;

    fn next(&mut self) -> Option<CubePoint> {
        if self.next >= self.end {
            return None;
        }
        let p = CubePoint::from_rank(self.n, self.next);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CubeIter {}

/// All points obtained from `center` by flipping at most `radius` coordinates,
/// `center` first, then by increasing number of flips.
pub fn flips_within(center: &CubePoint, radius: usize) -> FlipIter {
    FlipIter { center: center.clone(), radius: radius.min(center.n), combo: Vec::new(), started: false }
}

#[derive(Debug, Clone)]
pub struct FlipIter {
    center: CubePoint,
    radius: usize,
    combo: Vec<usize>,
    started: bool,
}

impl FlipIter {
    fn advance(&mut self) -> bool {
        let n = self.center.n;
        let k = self.combo.len();
        // next k-combination of 0..n in lexicographic order
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.combo[i] < n - (k - i) {
                self.combo[i] += 1;
                for t in i + 1..k {
                    self.combo[t] = self.combo[t - 1] + 1;
                }
                return true;
            }
        }
        if k < self.radius {
            self.combo = (0..k + 1).collect();
            return true;
        }
        false
    }
}

impl Iterator for FlipIter {
    type Item = CubePoint;

    fn next(&mut self) -> Option<CubePoint> {
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            return None;
        }
        let mut z = self.center.clone();
        for &j in &self.combo {
            z.flip_in_place(j);
        }
        Some(z)
    }
}

/// `sum_{r <= radius} C(n, r)`, saturating.
pub fn ball_volume(n: usize, radius: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u64 = 1;
    for r in 0..=radius.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - r) as u64) / (r as u64 + 1);
    }
    total
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubePoint({self})")
    }
}

impl FromStr for CubePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '+' => bits.push(true),
                '-' => bits.push(false),
                _ => return Err(Error::InvalidPoint(String::from(s))),
            }
        }
        if bits.is_empty() {
            return Err(Error::InvalidPoint(String::from(s)));
        }
        Ok(CubePoint::from_bools(&bits))
    }
}

impl Serialize for CubePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CubePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&p("+++"), &p("+++")).unwrap(), 0);
        assert_eq!(hamming_distance(&p("+-+"), &p("---")).unwrap(), 2);
        assert_eq!(hamming_distance(&p("+-+-+"), &p("-+-+-")).unwrap(), 5);
        assert!(matches!(
            hamming_distance(&p("++"), &p("+++")),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip(&p("++"), 0).unwrap(), p("-+"));
        assert!(matches!(flip(&p("++"), 2), Err(Error::CoordinateOutOfRange { index: 2, dim: 2 })));
    }

    #[test]
    fn ball_examples() {
        assert!(in_ball(&p("-+"), &[p("++")], 1).unwrap());
        assert!(!in_ball(&p("-+"), &[p("++")], 0).unwrap());
        assert!(in_ball(&p("-+-"), &[p("+++"), p("-+-")], 0).unwrap());
        assert!(!in_ball(&p("-+"), &[], 5).unwrap());
        assert!(in_ball(&p("-+"), &[p("+++")], 1).is_err());
    }

    #[test]
    fn enumeration_order_and_cap() {
        let one: Vec<_> = enumerate_cube(1).unwrap().collect();
        assert_eq!(one, vec![p("-"), p("+")]);
        let two: Vec<_> = enumerate_cube(2).unwrap().collect();
        assert_eq!(two, vec![p("--"), p("-+"), p("+-"), p("++")]);
        assert_eq!(enumerate_cube(20).unwrap().count(), 1 << 20);
        assert_eq!(enumerate_cube(25).unwrap_err(), Error::EnumerationCap { n: 25, cap: 24 });
    }

    #[test]
    fn enumeration_is_distinct() {
        let all: BTreeSet<_> = enumerate_cube(10).unwrap().collect();
        assert_eq!(all.len(), 1024);
    }

    #[test]
    fn wide_points_cross_word_boundary() {
        let mut x = CubePoint::minus_ones(130);
        x.set(64, true);
        x.set(129, true);
        assert_eq!(hamming_distance(&x, &CubePoint::minus_ones(130)).unwrap(), 2);
        assert_eq!(hamming_distance(&CubePoint::plus_ones(130), &CubePoint::minus_ones(130)).unwrap(), 130);
        let s = x.to_string();
        assert_eq!(s.parse::<CubePoint>().unwrap(), x);
    }

    #[test]
    fn flips_within_counts_match_binomials() {
        let c = p("+-+-+-");
        for r in 0..=6 {
            let pts: Vec<_> = flips_within(&c, r).collect();
            let distinct: BTreeSet<_> = pts.iter().cloned().collect();
            assert_eq!(pts.len() as u64, ball_volume(6, r));
            assert_eq!(distinct.len(), pts.len());
            assert!(pts.iter().all(|z| hamming_distance(z, &c).unwrap() <= r));
        }
        assert_eq!(flips_within(&c, 9).count(), 64);
    }

    fn point(n: usize) -> impl Strategy<Value = CubePoint> {
        proptest::collection::vec(any::<bool>(), n).prop_map(|b| CubePoint::from_bools(&b))
    }

    proptest! {
        #[test]
        fn flip_is_an_involution(x in point(70), j in 0usize..70) {
            let y = flip(&x, j).unwrap();
            prop_assert_eq!(hamming_distance(&x, &y).unwrap(), 1);
            prop_assert_eq!(flip(&y, j).unwrap(), x);
        }

        #[test]
        fn hamming_is_a_metric(x in point(12), y in point(12), z in point(12)) {
            let d = |a: &CubePoint, b: &CubePoint| hamming_distance(a, b).unwrap();
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert_eq!(d(&x, &y) == 0, x == y);
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        }

        #[test]
        fn rank_round_trips(n in 1usize..20, r in any::<u64>()) {
            let r = r & ((1u64 << n) - 1);
            prop_assert_eq!(CubePoint::from_rank(n, r).rank(), r);
        }
    }

    #[test]
    fn in_ball_agrees_with_min_distance_exhaustively() {
        let pts: Vec<_> = enumerate_cube(4).unwrap().collect();
        for (i, z) in pts.iter().enumerate() {
            let anchors = [pts[(i * 7 + 3) % 16].clone(), pts[(i * 5 + 1) % 16].clone()];
            let md = anchors.iter().map(|a| hamming_distance(z, a).unwrap()).min().unwrap();
            for q in 0..=4 {
                assert_eq!(in_ball(z, &anchors, q).unwrap(), md <= q);
            }
            assert_eq!(min_distance(z, &anchors).unwrap(), Some(md));
        }
    }
}
