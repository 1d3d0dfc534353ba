use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::{Error, Result};

/// Symbol index of a cube coordinate: `0` for `-1`, `1` for `+1`.
#[inline]
pub fn symbol(bit: bool) -> usize {
    bit as usize
}

/// A complete DFA over `{-1,+1}` that reads fixed-length words in coordinate order.
///
/// States are `0..states`. `delta[s][symbol(b)]` is the successor of `s` on `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    start: usize,
    accepting: Vec<bool>,
    delta: Vec<[usize; 2]>,
    input_len: usize,
}

impl Dfa {
    pub fn new(start: usize, accepting: Vec<bool>, delta: Vec<[usize; 2]>, input_len: usize) -> Result<Self> {
        let states = delta.len();
        if states == 0 {
            return Err(Error::InvalidConcept("automaton without states".into()));
        }
        if accepting.len() != states {
            return Err(Error::InvalidConcept(alloc::format!(
                "{} acceptance flags for {states} states",
                accepting.len()
            )));
        }
        if start >= states {
            return Err(Error::InvalidConcept(alloc::format!("start state {start} not among {states} states")));
        }
        if let Some((s, row)) = delta.iter().enumerate().find(|(_, row)| row.iter().any(|&t| t >= states)) {
            return Err(Error::InvalidConcept(alloc::format!("state {s} has transition {row:?} out of range")));
        }
        Ok(Dfa { start, accepting, delta, input_len })
    }

    /// Two-state machine accepting words with an odd number of `-1` symbols.
    pub fn parity(input_len: usize) -> Self {
        Dfa { start: 0, accepting: vec![false, true], delta: vec![[1, 0], [0, 1]], input_len }
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn next(&self, s: usize, bit: bool) -> usize {
        self.delta[s][symbol(bit)]
    }

    pub fn transitions(&self) -> &[[usize; 2]] {
        &self.delta
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    /// The same machine reading words of a different length.
    pub fn with_input_len(mut self, input_len: usize) -> Self {
        self.input_len = input_len;
        self
    }

    pub fn run(&self, bits: impl IntoIterator<Item = bool>) -> usize {
        bits.into_iter().fold(self.start, |s, b| self.next(s, b))
    }

    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        x.check_dim(self.input_len)?;
        Ok(self.holds(x))
    }

    pub(crate) fn holds(&self, x: &CubePoint) -> bool {
        self.accepting[self.run(x.bits())]
    }
}

pub fn eval_dfa(dfa: &Dfa, x: &CubePoint) -> Result<bool> {
    dfa.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_hand_run() {
        let a = Dfa::parity(3);
        // (-1,+1,-1): 0 -(-1)-> 1 -(+1)-> 1 -(-1)-> 0, rejecting.
        assert!(!eval_dfa(&a, &"-+-".parse().unwrap()).unwrap());
        assert!(eval_dfa(&a, &"-++".parse().unwrap()).unwrap());
        assert!(eval_dfa(&a, &"-+".parse().unwrap()).is_err());
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(Dfa::new(0, vec![false], vec![[0, 1]], 2).is_err());
        assert!(Dfa::new(2, vec![false, true], vec![[0, 1], [1, 0]], 2).is_err());
        assert!(Dfa::new(0, vec![true], vec![[0, 0], [0, 0]], 2).is_err());
        assert!(Dfa::new(0, vec![], vec![], 2).is_err());
    }
}
