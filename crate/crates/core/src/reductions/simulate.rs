//! Running a local-query learner from labelled examples alone.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{nearest_image, QReduction, ReductionKind};
use crate::concepts::Concept;
use crate::cube::{hamming_unchecked, CubePoint};
use crate::distributions::LabeledSample;
use crate::learner::LocalQueryLearner;
use crate::oracle::{MembershipOracle, QueryRecord};
use crate::{Error, Result};

/// Answers queries in the target cube using only the labelled source sample.
///
/// Type A: the label of an anchor image if `z` is one, `1` otherwise.
/// Type B: the label of the unique anchor whose image is within `q`.
#[derive(Debug, Clone)]
pub struct SynthesizedOracle {
    reduction: QReduction,
    anchors: BTreeMap<CubePoint, bool>,
    log: Vec<QueryRecord>,
}

impl SynthesizedOracle {
    pub fn new(reduction: QReduction, sample: &LabeledSample) -> Result<Self> {
        let mut anchors = BTreeMap::new();
        for (x, y) in sample.examples() {
            anchors.insert(x.clone(), *y);
        }
        if let Some(x) = anchors.keys().next() {
            x.check_dim(reduction.map().source_dim())?;
        }
        Ok(SynthesizedOracle { reduction, anchors, log: Vec::new() })
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    pub fn into_log(self) -> Vec<QueryRecord> {
        self.log
    }

    fn answer(&self, z: &CubePoint) -> Result<(bool, usize)> {
        let map = self.reduction.map();
        let q = self.reduction.locality();
        let dist = nearest_image(map, z, self.anchors.keys()).unwrap_or(usize::MAX);
        if dist > q {
            return Err(Error::LocalityViolation { distance: dist, q });
        }
        match self.reduction.kind() {
            ReductionKind::TypeA => {
                let label = match map.preimage(z).and_then(|x| self.anchors.get(&x)) {
                    Some(&y) => y,
                    None => true,
                };
                Ok((label, dist))
            }
            ReductionKind::TypeB => {
                let mut hits = self
                    .anchors
                    .iter()
                    .filter(|(x, _)| hamming_unchecked(&map.apply_unchecked(x), z) <= q);
                match (hits.next(), hits.next()) {
                    (Some((_, &y)), None) => Ok((y, dist)),
                    (first, _) => {
                        let found = if first.is_none() { 0 } else { 2 + hits.count() };
                        Err(Error::AnchorNotUnique { found, q })
                    }
                }
            }
        }
    }
}

impl MembershipOracle for SynthesizedOracle {
    fn query(&mut self, z: &CubePoint) -> Result<bool> {
        z.check_dim(self.reduction.map().target_dim())?;
        let (answer, dist) = self.answer(z)?;
        self.log.push(QueryRecord { query: z.clone(), answer, dist });
        Ok(answer)
    }
}

/// Output of [`simulate_pac_from_local`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simulation {
    /// `h' ∘ φ` where `h'` is the learner's hypothesis over the target cube.
    pub hypothesis: Concept,
    pub transcript: Vec<QueryRecord>,
}

/// Feeds `φ(sample)` to a local-query learner, answering its queries with a
/// [`SynthesizedOracle`], and pulls the resulting hypothesis back.
pub fn simulate_pac_from_local(
    learner: &mut dyn LocalQueryLearner,
    reduction: &QReduction,
    sample: &LabeledSample,
) -> Result<Simulation> {
    if learner.locality() > reduction.locality() {
        return Err(Error::LocalityBudget { learner: learner.locality(), reduction: reduction.locality() });
    }
    let map = *reduction.map();
    let lifted = sample.map_points(|x| map.apply(x))?;
    let mut oracle = SynthesizedOracle::new(*reduction, sample)?;
    let inner = learner.learn(&lifted, &mut oracle)?;
    Ok(Simulation { hypothesis: Concept::Pullback { map, inner: Box::new(inner) }, transcript: oracle.into_log() })
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::concepts::{DnfFormula, Junta, Term};
    use crate::cube::{enumerate_cube, flips_within};
    use crate::learner::{EvidentDnfLearner, RandomProbeLearner};
    use crate::reductions::Construction;

    fn full_sample(h: &Concept) -> LabeledSample {
        let examples = enumerate_cube(h.dim()).unwrap().map(|x| {
            let y = h.eval(&x).unwrap();
            (x, y)
        });
        LabeledSample::new(examples.collect()).unwrap()
    }

    #[test]
    fn type_a_answers_match_reduced_concept() {
        let h: Concept = DnfFormula::new(2, vec![Term::from_signed(&[1, -2]).unwrap()]).unwrap().into();
        let r = QReduction::type_a(Construction::Dnf, 2, None).unwrap();
        let h_prime = r.transform(&h).unwrap();
        let sample = full_sample(&h);
        let mut oracle = SynthesizedOracle::new(r, &sample).unwrap();
        for (x, _) in sample.examples() {
            for z in flips_within(&r.phi(x).unwrap(), 3) {
                assert_eq!(oracle.query(&z).unwrap(), h_prime.eval(&z).unwrap());
            }
        }
    }

    #[test]
    fn type_b_answers_match_reduced_concept() {
        let h: Concept = Junta::from_fn(3, vec![0, 2], |b| b[0] && !b[1]).unwrap().into();
        let r = QReduction::type_b(Construction::Junta, 3, 1).unwrap();
        let h_prime = r.transform(&h).unwrap();
        let sample = full_sample(&h);
        let mut oracle = SynthesizedOracle::new(r, &sample).unwrap();
        for (x, _) in sample.examples() {
            for z in flips_within(&r.phi(x).unwrap(), 1) {
                assert_eq!(oracle.query(&z).unwrap(), h_prime.eval(&z).unwrap());
            }
        }
    }

    #[test]
    fn far_queries_are_refused() {
        let h: Concept = Junta::from_fn(2, vec![0], |b| b[0]).unwrap().into();
        let r = QReduction::type_b(Construction::Junta, 2, 1).unwrap();
        let sample = LabeledSample::new(vec![(CubePoint::plus_ones(2), true)]).unwrap();
        let mut oracle = SynthesizedOracle::new(r, &sample).unwrap();
        let z = CubePoint::minus_ones(6);
        assert!(matches!(oracle.query(&z), Err(Error::LocalityViolation { .. })));
        let _ = h;
    }

    #[test]
    fn simulation_transcript_and_pullback() {
        let h: Concept = DnfFormula::new(2, vec![Term::from_signed(&[1, 2]).unwrap()]).unwrap().into();
        let r = QReduction::type_a(Construction::Dnf, 2, None).unwrap();
        let h_prime = r.transform(&h).unwrap();
        let sample = full_sample(&h);
        let mut learner = EvidentDnfLearner { phase_one: 4 };
        let sim = simulate_pac_from_local(&mut learner, &r, &sample).unwrap();
        assert_eq!(sim.transcript.len(), 8);
        for rec in &sim.transcript {
            assert_eq!(rec.answer, h_prime.eval(&rec.query).unwrap());
        }
        let Concept::Pullback { inner, .. } = &sim.hypothesis else { panic!("not a pullback") };
        for x in enumerate_cube(2).unwrap() {
            assert_eq!(sim.hypothesis.eval(&x).unwrap(), inner.eval(&r.phi(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn locality_budget_is_enforced() {
        let h: Concept = Junta::from_fn(2, vec![0], |b| b[0]).unwrap().into();
        let r = QReduction::type_b(Construction::Junta, 2, 1).unwrap();
        let mut learner = RandomProbeLearner { radius: 2, probes: 4, seed: 1 };
        let err = simulate_pac_from_local(&mut learner, &r, &full_sample(&h)).unwrap_err();
        assert_eq!(err, Error::LocalityBudget { learner: 2, reduction: 1 });
    }
}
