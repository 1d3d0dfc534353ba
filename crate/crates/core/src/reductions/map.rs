use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::Result;

/// `φ: {-1,1}^n → {-1,1}^{k·n}` copying each coordinate `k` times.
///
/// Source coordinate `i` occupies the target block `i*k .. (i+1)*k`, so the
/// `c`-th copy of `x_i` is target coordinate `i*k + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationMap {
    n: usize,
    k: usize,
}

impl ReplicationMap {
    /// Panics when `k == 0`.
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k >= 1, "replication factor must be positive");
        ReplicationMap { n, k }
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.n * self.k
    }

    pub fn factor(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn coordinate(&self, i: usize, copy: usize) -> usize {
        i * self.k + copy
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        i * self.k..(i + 1) * self.k
    }

    pub fn apply(&self, x: &CubePoint) -> Result<CubePoint> {
        x.check_dim(self.n)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &CubePoint) -> CubePoint {
        let mut z = CubePoint::minus_ones(self.target_dim());
        for i in 0..self.n {
            if x.get(i) {
                for t in self.block(i) {
                    z.set(t, true);
                }
            }
        }
        z
    }

    /// The unique `x` with `φ(x) = z`, when every block of `z` is constant.
    pub fn preimage(&self, z: &CubePoint) -> Option<CubePoint> {
        if z.dim() != self.target_dim() {
            return None;
        }
        let mut x = CubePoint::minus_ones(self.n);
        for i in 0..self.n {
            let first = z.get(i * self.k);
            if self.block(i).any(|t| z.get(t) != first) {
                return None;
            }
            x.set(i, first);
        }
        Some(x)
    }

    /// Block-wise majority decoding (meaningful for odd `k`).
    pub fn decode_majority(&self, z: &CubePoint) -> CubePoint {
        let mut x = CubePoint::minus_ones(self.n);
        for i in 0..self.n {
            let plus = self.block(i).filter(|&t| z.get(t)).count();
            x.set(i, 2 * plus > self.k);
        }
        x
    }
}

/// The replication map `φ: {-1,1}^n → {-1,1}^{k·n}`.
pub fn replicate_map(n: usize, k: usize) -> ReplicationMap {
    ReplicationMap::new(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{enumerate_cube, hamming_distance};

    #[test]
    fn replication_examples() {
        let phi = replicate_map(2, 3);
        assert_eq!(phi.apply(&"+-".parse().unwrap()).unwrap(), "+++---".parse().unwrap());
        let id = replicate_map(4, 1);
        for x in enumerate_cube(4).unwrap() {
            assert_eq!(id.apply(&x).unwrap(), x);
        }
        assert!(phi.apply(&"+".parse().unwrap()).is_err());
    }

    #[test]
    fn distances_scale_by_k() {
        for n in 1..=6 {
            let phi = replicate_map(n, 3);
            let pts: alloc::vec::Vec<_> = enumerate_cube(n).unwrap().collect();
            for x in &pts {
                for y in &pts {
                    let d = hamming_distance(x, y).unwrap();
                    let dz = hamming_distance(&phi.apply(x).unwrap(), &phi.apply(y).unwrap()).unwrap();
                    assert_eq!(dz, 3 * d);
                }
                assert_eq!(phi.preimage(&phi.apply(x).unwrap()).as_ref(), Some(x));
            }
        }
    }

    #[test]
    fn preimage_rejects_mixed_blocks() {
        let phi = replicate_map(2, 3);
        assert_eq!(phi.preimage(&"++-+++".parse().unwrap()), None);
        assert_eq!(phi.decode_majority(&"++-+--".parse().unwrap()), "+-".parse().unwrap());
    }
}
