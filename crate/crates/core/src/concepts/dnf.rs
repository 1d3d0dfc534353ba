use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::cube::CubePoint;
use crate::{Error, Result};

/// A conjunction of literals. Variables are 0-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    positives: BTreeSet<usize>,
    negatives: BTreeSet<usize>,
}

impl Term {
    pub fn new(
        positives: impl IntoIterator<Item = usize>,
        negatives: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let positives: BTreeSet<usize> = positives.into_iter().collect();
        let negatives: BTreeSet<usize> = negatives.into_iter().collect();
        if let Some(&j) = positives.intersection(&negatives).next() {
            return Err(Error::ContradictoryTerm(j));
        }
        Ok(Term { positives, negatives })
    }

    /// Builds a term from signed 1-based literals: `3` is `x3`, `-2` is `¬x2`.
    pub fn from_signed(literals: &[i64]) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for &l in literals {
            match l {
                0 => return Err(Error::InvalidConcept("literal 0 in term".into())),
                l if l > 0 => pos.push(l as usize - 1),
                l => neg.push(l.unsigned_abs() as usize - 1),
            }
        }
        Term::new(pos, neg)
    }

    /// The constant-true term.
    pub fn empty() -> Self {
        Term::default()
    }

    pub fn positives(&self) -> &BTreeSet<usize> {
        &self.positives
    }

    pub fn negatives(&self) -> &BTreeSet<usize> {
        &self.negatives
    }

    pub fn width(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn contains_var(&self, j: usize) -> bool {
        self.positives.contains(&j) || self.negatives.contains(&j)
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        let p = self.positives.last().copied();
        let n = self.negatives.last().copied();
        p.max(n)
    }

    /// Literals as signed 1-based integers, positives first.
    pub fn signed_literals(&self) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::with_capacity(self.width());
        let mut all: Vec<(usize, bool)> = self.positives.iter().map(|&j| (j, true)).collect();
        all.extend(self.negatives.iter().map(|&j| (j, false)));
        all.sort_unstable();
        for (j, pos) in all {
            let v = j as i64 + 1;
            out.push(if pos { v } else { -v });
        }
        out
    }

    /// Satisfaction without a dimension check; indices must be `< x.dim()`.
    #[inline]
    pub fn holds(&self, x: &CubePoint) -> bool {
        self.positives.iter().all(|&j| x.get(j)) && self.negatives.iter().all(|&j| !x.get(j))
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        match self.max_var() {
            Some(j) if j >= n => Err(Error::CoordinateOutOfRange { index: j, dim: n }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width() == 0 {
            return f.write_str("⊤");
        }
        for (k, l) in self.signed_literals().into_iter().enumerate() {
            if k > 0 {
                f.write_str("∧")?;
            }
            if l < 0 {
                write!(f, "¬x{}", -l)?;
            } else {
                write!(f, "x{l}")?;
            }
        }
        Ok(())
    }
}

/// Whether `x` meets every literal of `term`.
pub fn term_satisfied(term: &Term, x: &CubePoint) -> Result<bool> {
    term.check_dim(x.dim())?;
    Ok(term.holds(x))
}

/// A disjunction of terms over `n` variables. The empty disjunction is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnfFormula {
    n: usize,
    terms: Vec<Term>,
}

impl DnfFormula {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            t.check_dim(n)?;
        }
        Ok(DnfFormula { n, terms })
    }

    pub fn empty(n: usize) -> Self {
        DnfFormula { n, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        term.check_dim(self.n)?;
        self.terms.push(term);
        Ok(())
    }

    pub(crate) fn retain(&mut self, f: impl FnMut(&Term) -> bool) {
        self.terms.retain(f);
    }

    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        x.check_dim(self.n)?;
        Ok(self.holds(x))
    }

    #[inline]
    pub(crate) fn holds(&self, x: &CubePoint) -> bool {
        self.terms.iter().any(|t| t.holds(x))
    }

    /// Indices of the terms `x` satisfies.
    pub fn satisfied_terms(&self, x: &CubePoint) -> Result<Vec<usize>> {
        x.check_dim(self.n)?;
        Ok(self.terms.iter().enumerate().filter(|(_, t)| t.holds(x)).map(|(i, _)| i).collect())
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("⊥");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "({t})")?;
        }
        Ok(())
    }
}

pub fn eval_dnf(formula: &DnfFormula, x: &CubePoint) -> Result<bool> {
    formula.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    fn dnf(n: usize, terms: &[&[i64]]) -> DnfFormula {
        DnfFormula::new(n, terms.iter().map(|t| Term::from_signed(t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn dnf_examples() {
        let f = dnf(3, &[&[1, 2], &[-1, 3]]);
        assert!(eval_dnf(&f, &p("++-")).unwrap());
        assert!(!eval_dnf(&f, &p("---")).unwrap());
        assert!(!eval_dnf(&DnfFormula::empty(3), &p("+++")).unwrap());
        assert!(eval_dnf(&dnf(3, &[&[]]), &p("---")).unwrap());
        assert!(eval_dnf(&f, &p("++")).is_err());
    }

    #[test]
    fn term_examples() {
        let t = Term::from_signed(&[1, -2]).unwrap();
        assert!(term_satisfied(&t, &p("+-")).unwrap());
        assert!(!term_satisfied(&t, &p("++")).unwrap());
        assert!(term_satisfied(&Term::empty(), &p("-+")).unwrap());
        assert!(term_satisfied(&t, &p("+")).is_err());
        assert_eq!(t.to_string(), "x1∧¬x2");
    }

    #[test]
    fn contradictory_terms_are_rejected() {
        assert_eq!(Term::from_signed(&[2, -2]), Err(Error::ContradictoryTerm(1)));
        assert!(Term::from_signed(&[0]).is_err());
        assert!(DnfFormula::new(2, vec![Term::from_signed(&[3]).unwrap()]).is_err());
    }
}
