//! The example oracle and the locality-enforcing membership oracle.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::concepts::Concept;
use crate::cube::{ball_volume, flips_within, hamming_unchecked, CubePoint};
use crate::distributions::{sample, Distribution, LabeledSample};
use crate::{Error, Result};

/// Answers membership queries `z ↦ h*(z)`.
pub trait MembershipOracle {
    fn query(&mut self, z: &CubePoint) -> Result<bool>;
}

/// Serde helper writing labels as `0` / `1`.
pub mod label01 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(alloc::format!("label must be 0 or 1, got {v}"))),
        }
    }
}

/// One answered query. Serialises as `{"query": "+-+", "answer": 1, "dist": 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query: CubePoint,
    #[serde(with = "label01")]
    pub answer: bool,
    pub dist: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleStats {
    pub queries: usize,
    pub max_distance: usize,
    pub histogram: BTreeMap<usize, usize>,
}

/// Membership oracle that only answers queries within Hamming distance `q` of
/// the training set and logs each answer.
#[derive(Debug, Clone)]
pub struct LocalMQOracle {
    target: Concept,
    anchors: BTreeSet<CubePoint>,
    anchor_count: usize,
    q: usize,
    query_cap: usize,
    log: Vec<QueryRecord>,
}

impl LocalMQOracle {
    /// The query cap defaults to `m * n * 64` for `m` anchors in dimension `n`.
    pub fn new(target: Concept, anchors: impl IntoIterator<Item = CubePoint>, q: usize) -> Result<Self> {
        let n = target.dim();
        let mut set = BTreeSet::new();
        let mut count = 0usize;
        for a in anchors {
            a.check_dim(n)?;
            set.insert(a);
            count += 1;
        }
        Ok(LocalMQOracle {
            target,
            anchors: set,
            anchor_count: count,
            q,
            query_cap: count.saturating_mul(n).saturating_mul(64),
            log: Vec::new(),
        })
    }

    /// Oracle whose anchors are all points of the given samples.
    pub fn from_samples(target: Concept, samples: &[&LabeledSample], q: usize) -> Result<Self> {
        let anchors: Vec<CubePoint> = samples.iter().flat_map(|s| s.points().cloned()).collect();
        Self::new(target, anchors, q)
    }

    pub fn with_query_cap(mut self, cap: usize) -> Self {
        self.query_cap = cap;
        self
    }

    pub fn locality(&self) -> usize {
        self.q
    }

    pub fn query_cap(&self) -> usize {
        self.query_cap
    }

    pub fn anchor_count(&self) -> usize {
        self.anchor_count
    }

    pub fn target(&self) -> &Concept {
        &self.target
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    /// Exact distance from `z` to the nearest anchor if it is at most `radius`.
    fn distance_within(&self, z: &CubePoint, radius: usize) -> Option<usize> {
        if ball_volume(z.dim(), radius) < self.anchors.len() as u64 {
            if self.anchors.contains(z) {
                return Some(0);
            }
            flips_within(z, radius).find(|y| self.anchors.contains(y)).map(|y| hamming_unchecked(&y, z))
        } else {
            self.nearest(z).filter(|&d| d <= radius)
        }
    }

    fn nearest(&self, z: &CubePoint) -> Option<usize> {
        self.anchors.iter().map(|a| hamming_unchecked(a, z)).min()
    }

    pub fn stats(&self) -> OracleStats {
        let mut stats = OracleStats::default();
        for r in &self.log {
            stats.queries += 1;
            stats.max_distance = stats.max_distance.max(r.dist);
            *stats.histogram.entry(r.dist).or_insert(0) += 1;
        }
        stats
    }
}

impl MembershipOracle for LocalMQOracle {
    fn query(&mut self, z: &CubePoint) -> Result<bool> {
        z.check_dim(self.target.dim())?;
        if self.log.len() >= self.query_cap {
            return Err(Error::BudgetExhausted { cap: self.query_cap });
        }
        let dist = match self.distance_within(z, self.q) {
            Some(d) => d,
            None => {
                let distance = self.nearest(z).unwrap_or(usize::MAX);
                return Err(Error::LocalityViolation { distance, q: self.q });
            }
        };
        let answer = self.target.eval(z)?;
        self.log.push(QueryRecord { query: z.clone(), answer, dist });
        Ok(answer)
    }
}

/// `m` i.i.d. points from `dist` labelled by `h_star`.
pub fn draw_training_set(dist: &Distribution, h_star: &Concept, m: usize, seed: u64) -> Result<LabeledSample> {
    if dist.dim() != h_star.dim() {
        return Err(Error::DimensionMismatch { expected: h_star.dim(), found: dist.dim() });
    }
    LabeledSample::label(sample(dist, m, seed), h_star)
}
