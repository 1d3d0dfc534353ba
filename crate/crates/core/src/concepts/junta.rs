use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::{Error, Result};

/// Default cap on the number of relevant variables of a [`Junta`].
pub const JUNTA_CAP: usize = 16;

/// A function of `K` relevant coordinates, stored as a `2^K` truth table.
///
/// Table index bit `k` is `1` iff coordinate `relevant[k]` is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junta {
    n: usize,
    relevant: Vec<usize>,
    table: Vec<bool>,
}

impl Junta {
    pub fn new(n: usize, relevant: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        Self::with_cap(n, relevant, table, JUNTA_CAP)
    }

    pub fn with_cap(n: usize, relevant: Vec<usize>, table: Vec<bool>, cap: usize) -> Result<Self> {
        let k = relevant.len();
        if k > cap {
            return Err(Error::SizeCap(alloc::format!("junta with {k} relevant variables exceeds cap {cap}")));
        }
        for (i, &v) in relevant.iter().enumerate() {
            if v >= n {
                return Err(Error::CoordinateOutOfRange { index: v, dim: n });
            }
            if relevant[..i].contains(&v) {
                return Err(Error::InvalidConcept(alloc::format!("variable {} listed twice", v + 1)));
            }
        }
        if table.len() != 1usize << k {
            return Err(Error::InvalidConcept(alloc::format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1usize << k
            )));
        }
        Ok(Junta { n, relevant, table })
    }

    /// Tabulates `f` over the relevant coordinates. `f` sees their values in
    /// `relevant` order (`true` = `+1`).
    pub fn from_fn(n: usize, relevant: Vec<usize>, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        let k = relevant.len();
        if k > JUNTA_CAP {
            return Err(Error::SizeCap(alloc::format!("junta with {k} relevant variables exceeds cap {JUNTA_CAP}")));
        }
        let mut args = alloc::vec![false; k];
        let table = (0..1usize << k)
            .map(|idx| {
                for (b, a) in args.iter_mut().enumerate() {
                    *a = (idx >> b) & 1 == 1;
                }
                f(&args)
            })
            .collect();
        Junta::new(n, relevant, table)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        x.check_dim(self.n)?;
        Ok(self.holds(x))
    }

    pub(crate) fn holds(&self, x: &CubePoint) -> bool {
        let idx = self.relevant.iter().enumerate().fold(0usize, |acc, (k, &v)| acc | ((x.get(v) as usize) << k));
        self.table[idx]
    }
}

pub fn eval_junta(h: &Junta, x: &CubePoint) -> Result<bool> {
    h.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn xor_junta() {
        let h = Junta::from_fn(4, vec![1, 3], |b| b[0] ^ b[1]).unwrap();
        assert!(eval_junta(&h, &"-+--".parse().unwrap()).unwrap());
        assert!(!eval_junta(&h, &"++-+".parse().unwrap()).unwrap());
        assert!(eval_junta(&h, &"---+".parse().unwrap()).unwrap());
    }

    #[test]
    fn validation() {
        assert!(Junta::new(2, vec![0, 0], vec![false; 4]).is_err());
        assert!(Junta::new(2, vec![2], vec![false; 2]).is_err());
        assert!(Junta::new(2, vec![0], vec![false; 3]).is_err());
        assert!(matches!(Junta::from_fn(20, (0..17).collect(), |_| true), Err(Error::SizeCap(_))));
    }
}
