//! Seeded experiment suites and their reports.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use rayon::prelude::*;
use serde::Serialize;

use localq_core::concepts::{Concept, DnfFormula};
use localq_core::cube::{flip, CubePoint};
use localq_core::distributions::{exact_loss, mc_loss, pushforward, Distribution};
use localq_core::evident::{check_claim1, doubling_dnf, doubling_phi, evident_term, gen_opposite_literal_dnf};
use localq_core::learner::{learn_evident_dnf, plan_samples, reconstruct_term, EvidentDnfLearner, RandomProbeLearner};
use localq_core::oracle::{draw_training_set, LocalMQOracle, OracleStats};
use localq_core::reductions::{
    poly_size_multipliers, simulate_pac_from_local, verify_reduction, Construction, Fault, QReduction,
    VerificationReport,
};
use localq_core::rng::{derive_seed, stream};
use localq_core::{Error, Rational};

use crate::formats;
use crate::instances;

/// Dimension up to which losses are computed by enumeration.
pub const EXACT_LOSS_MAX_DIM: usize = 20;
/// Draws for the Monte Carlo loss estimate above that dimension.
pub const MC_LOSS_SAMPLES: usize = 100_000;
/// Largest `m1 + m2` an auto-planned run may request.
pub const AUTO_PLAN_CAP: u64 = 10_000_000;

/// Which targets a learning suite draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum Family {
    /// Fresh `gen_opposite_literal_dnf(n, d, width)` per trial.
    OppositeLiteral { n: usize, d: usize, width: usize },
    /// Fresh random tree on `n` variables with at most `max_leaves` leaves per
    /// trial, doubled onto `2n` coordinates.
    DoubledTree { n: usize, max_leaves: usize },
    /// A fixed DNF read from a file.
    File { path: PathBuf },
}

impl Family {
    fn source_dim(&self) -> Option<usize> {
        match self {
            Family::OppositeLiteral { n, .. } => Some(*n),
            Family::DoubledTree { n, .. } => Some(2 * n),
            Family::File { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Distribution spec as accepted by [`formats::parse_distribution`]. `None`
    /// means uniform, or for doubled trees the pushforward of uniform.
    pub distribution: Option<String>,
    pub epsilon: f64,
    pub m1: usize,
    pub m2: usize,
    /// Replace `m1`, `m2` with the planner's values.
    pub auto_plan: bool,
    pub trials: usize,
    pub seed: u64,
    pub locality: usize,
    /// Include wall-clock times in the report (makes it non-reproducible).
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: Family::OppositeLiteral { n: 4, d: 2, width: 2 },
            distribution: None,
            epsilon: 0.1,
            m1: 5_000,
            m2: 50_000,
            auto_plan: false,
            trials: 20,
            seed: 0,
            locality: 1,
            timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.trials >= 1, "trial count must be at least 1");
        ensure!(self.epsilon > 0.0 && self.epsilon < 1.0, "epsilon must lie in (0, 1), got {}", self.epsilon);
        Ok(())
    }

    /// Parses the key-value format: one `key = value` per line, `#` comments.
    ///
    /// ```text
    /// family = opposite-literal   # or doubled-tree, file
    /// n = 6
    /// d = 3
    /// width = 3
    /// max_leaves = 16             # doubled-tree only
    /// target = path/to/formula    # file only
    /// distribution = uniform:6
    /// epsilon = 0.1
    /// m1 = 5000
    /// m2 = 50000
    /// auto_plan = false
    /// trials = 20
    /// seed = 1
    /// locality = 1
    /// ```
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut family = String::from("opposite-literal");
        let (mut n, mut d, mut width, mut max_leaves, mut target) = (None, None, None, None, None);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for {key}", i + 1);
            match key {
                "family" => family = value.to_string(),
                "n" => n = Some(value.parse().with_context(ctx)?),
                "d" => d = Some(value.parse().with_context(ctx)?),
                "width" => width = Some(value.parse().with_context(ctx)?),
                "max_leaves" => max_leaves = Some(value.parse().with_context(ctx)?),
                "target" => target = Some(PathBuf::from(value)),
                "distribution" => cfg.distribution = Some(value.to_string()),
                "epsilon" => cfg.epsilon = value.parse().with_context(ctx)?,
                "m1" => cfg.m1 = value.parse().with_context(ctx)?,
                "m2" => cfg.m2 = value.parse().with_context(ctx)?,
                "auto_plan" => cfg.auto_plan = value.parse().with_context(ctx)?,
                "trials" => cfg.trials = value.parse().with_context(ctx)?,
                "seed" => cfg.seed = value.parse().with_context(ctx)?,
                "locality" => cfg.locality = value.parse().with_context(ctx)?,
                "timings" => cfg.timings = value.parse().with_context(ctx)?,
                other => bail!("line {}: unknown key {other:?}", i + 1),
            }
        }
        cfg.family = match family.as_str() {
            "opposite-literal" => {
                let n = n.unwrap_or(4);
                Family::OppositeLiteral { n, d: d.unwrap_or(2), width: width.unwrap_or(2) }
            }
            "doubled-tree" => Family::DoubledTree { n: n.unwrap_or(4), max_leaves: max_leaves.unwrap_or(8) },
            "file" => Family::File { path: target.context("family = file needs a target path")? },
            other => bail!("unknown family {other:?}"),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossEstimator {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub target: String,
    pub dim: usize,
    pub estimator: LossEstimator,
    pub loss: f64,
    /// Exact loss as a fraction, when enumerated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_exact: Option<String>,
    pub success: bool,
    pub hypothesis_terms: usize,
    pub terms_added: usize,
    pub duplicates: usize,
    pub pruned: usize,
    pub oracle: OracleStats,
    /// Queries not at distance exactly 1 from a point of `S1`.
    pub non_unit_queries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub config: ExperimentConfig,
    pub trials: usize,
    pub successes: usize,
    pub required: usize,
    pub success_rate: f64,
    /// Binomial context for `required`.
    pub threshold_note: String,
    pub total_queries: usize,
    pub locality_violations: usize,
    pub pass: bool,
    pub reports: Vec<TrialReport>,
}

/// `Pr[Bin(trials, p) >= k]`.
pub fn binomial_tail(trials: usize, p: f64, k: usize) -> f64 {
    let mut total = 0.0;
    for i in k..=trials {
        let mut log_c = 0.0;
        for j in 0..i {
            log_c += ((trials - j) as f64).ln() - ((j + 1) as f64).ln();
        }
        total += (log_c + i as f64 * p.ln() + (trials - i) as f64 * (1.0 - p).ln()).exp();
    }
    total.min(1.0)
}

/// Successes required out of `trials`: `ceil(3 trials / 4)`.
pub fn required_successes(trials: usize) -> usize {
    (3 * trials).div_ceil(4)
}

fn build_target(cfg: &ExperimentConfig, seed: u64) -> anyhow::Result<(DnfFormula, Distribution)> {
    let (f, default_dist) = match &cfg.family {
        Family::OppositeLiteral { n, d, width } => {
            (gen_opposite_literal_dnf(*n, *d, *width, seed)?, Distribution::UniformCube(*n))
        }
        Family::DoubledTree { n, max_leaves } => {
            let tree = instances::random_tree(*n, *max_leaves, &mut stream(seed));
            let dist = pushforward(&Distribution::UniformCube(*n), |x| Ok(doubling_phi(x)), 2 * n)?;
            (doubling_dnf(&tree), dist)
        }
        Family::File { path } => match formats::read_concept(path)? {
            Concept::Dnf(f) => {
                let n = f.dim();
                (f, Distribution::UniformCube(n))
            }
            other => bail!("{}: the learner needs a dnf target, found {}", path.display(), other.class_name()),
        },
    };
    let dist = match &cfg.distribution {
        Some(spec) => formats::parse_distribution(spec)?,
        None => default_dist,
    };
    ensure!(dist.dim() == f.dim(), "distribution has dimension {}, target has {}", dist.dim(), f.dim());
    Ok((f, dist))
}

fn sample_sizes(cfg: &ExperimentConfig, n: usize) -> anyhow::Result<(usize, usize)> {
    if !cfg.auto_plan {
        return Ok((cfg.m1, cfg.m2));
    }
    let plan = plan_samples(n, cfg.epsilon)?;
    ensure!(
        plan.m1.saturating_add(plan.m2) <= AUTO_PLAN_CAP,
        "planned sizes m1 = {}, m2 = {} exceed the cap of {AUTO_PLAN_CAP}",
        plan.m1,
        plan.m2
    );
    Ok((plan.m1 as usize, plan.m2 as usize))
}

/// Output of a single learner run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerRun {
    pub hypothesis: String,
    pub trial: TrialReport,
    #[serde(skip)]
    pub log: Vec<localq_core::oracle::QueryRecord>,
}

/// One seeded trial: draw the target and both samples, run the learner and
/// score it.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> anyhow::Result<LearnerRun> {
    let seed = derive_seed(cfg.seed, trial as u64);
    let start = Instant::now();
    let (f, dist) = build_target(cfg, derive_seed(seed, 0))?;
    let n = f.dim();
    let (m1, m2) = sample_sizes(cfg, n)?;
    let target: Concept = f.clone().into();
    let s1 = draw_training_set(&dist, &target, m1, derive_seed(seed, 1))?;
    let s2 = draw_training_set(&dist, &target, m2, derive_seed(seed, 2))?;
    let mut oracle = LocalMQOracle::from_samples(target.clone(), &[&s1], cfg.locality)?
        .with_query_cap(m1.max(1).saturating_mul(n.max(1)));
    let outcome = learn_evident_dnf(&s1, &s2, &mut oracle)?;

    let anchors: BTreeSet<&CubePoint> = s1.points().collect();
    let non_unit_queries = oracle
        .log()
        .iter()
        .filter(|r| !(0..n).any(|j| flip(&r.query, j).is_ok_and(|y| anchors.contains(&y))))
        .count();

    let hypothesis = Concept::Dnf(outcome.hypothesis.clone());
    let exact = matches!(dist, Distribution::FiniteSupport(_)) || n <= EXACT_LOSS_MAX_DIM;
    let (estimator, loss, loss_exact) = if exact {
        let l: Rational = exact_loss(&dist, &target, &hypothesis)?;
        (LossEstimator::Exact, *l.numer() as f64 / *l.denom() as f64, Some(l.to_string()))
    } else {
        let l = mc_loss(&dist, &target, &hypothesis, MC_LOSS_SAMPLES, derive_seed(seed, 3))?;
        (LossEstimator::MonteCarlo, l, None)
    };
    let report = TrialReport {
        trial,
        seed,
        target: f.to_string(),
        dim: n,
        estimator,
        loss,
        loss_exact,
        success: loss < cfg.epsilon,
        hypothesis_terms: outcome.hypothesis.len(),
        terms_added: outcome.terms_added,
        duplicates: outcome.duplicates,
        pruned: outcome.pruned,
        oracle: oracle.stats(),
        non_unit_queries,
        wall_ms: cfg.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    Ok(LearnerRun { hypothesis: outcome.hypothesis.to_string(), trial: report, log: oracle.log().to_vec() })
}

/// Runs `cfg.trials` independent trials in parallel. Passes when at least
/// [`required_successes`] trials reach loss below ε and no query left the
/// unit ball of `S1`.
pub fn run_learning_suite(cfg: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    cfg.validate()?;
    if let Some(n) = cfg.family.source_dim() {
        sample_sizes(cfg, n)?;
    }
    let reports = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t).map(|r| r.trial).with_context(|| format!("trial {t}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let successes = reports.iter().filter(|r| r.success).count();
    let required = required_successes(cfg.trials);
    let locality_violations = reports.iter().map(|r| r.non_unit_queries).sum();
    let threshold_note = format!(
        "need {required}/{} successes; a learner succeeding with probability exactly 3/4 passes with probability {:.3}, one succeeding with probability 0.95 with probability {:.4}",
        cfg.trials,
        binomial_tail(cfg.trials, 0.75, required),
        binomial_tail(cfg.trials, 0.95, required),
    );
    Ok(SuiteReport {
        suite: "learning",
        config: cfg.clone(),
        trials: cfg.trials,
        successes,
        required,
        success_rate: successes as f64 / cfg.trials as f64,
        threshold_note,
        total_queries: reports.iter().map(|r| r.oracle.queries).sum(),
        locality_violations,
        pass: successes >= required && locality_violations == 0,
        reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusConfig {
    pub formulas: usize,
    pub max_n: usize,
    pub max_terms: usize,
    pub max_width: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { formulas: 1000, max_n: 10, max_terms: 5, max_width: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusFailure {
    pub formula: String,
    pub point: CubePoint,
    pub term: usize,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub suite: &'static str,
    pub config: CorpusConfig,
    pub formulas: usize,
    pub points_checked: u64,
    pub evident_points: u64,
    pub biconditional_failures: u64,
    pub reconstruction_failures: u64,
    pub failures: Vec<CorpusFailure>,
    pub pass: bool,
}

#[derive(Default)]
struct CorpusTally {
    points: u64,
    evident: u64,
    biconditional: u64,
    reconstruction: u64,
    failures: Vec<CorpusFailure>,
}

/// For every random DNF of the corpus and every point of its cube that is
/// evident for some term, checks the flip biconditional and that term
/// reconstruction returns exactly the witnessed term.
pub fn run_claim1_corpus(cfg: &CorpusConfig) -> anyhow::Result<CorpusReport> {
    ensure!(cfg.max_n >= 1 && cfg.max_terms >= 1 && cfg.max_width >= 1, "corpus parameters must be positive");
    let tallies = (0..cfg.formulas)
        .into_par_iter()
        .map(|k| -> anyhow::Result<CorpusTally> {
            let mut rng = stream(derive_seed(cfg.seed, k as u64));
            let n = 1 + (k % cfg.max_n);
            let d = 1 + (k / cfg.max_n) % cfg.max_terms;
            let f = instances::random_dnf(n, d, cfg.max_width, &mut rng)?;
            let target: Concept = f.clone().into();
            let mut tally = CorpusTally::default();
            for x in localq_core::cube::enumerate_cube(n)? {
                tally.points += 1;
                let Some(i) = evident_term(&f, &x)? else { continue };
                tally.evident += 1;
                let mut fail = |kind| {
                    tally.failures.push(CorpusFailure { formula: f.to_string(), point: x.clone(), term: i, kind })
                };
                if !check_claim1(&f, i, &x)? {
                    tally.biconditional += 1;
                    fail("biconditional");
                }
                let mut oracle = LocalMQOracle::new(target.clone(), [x.clone()], 1)?;
                if reconstruct_term(&x, &mut oracle)? != f.terms()[i] {
                    tally.reconstruction += 1;
                    fail("reconstruction");
                }
            }
            Ok(tally)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut report = CorpusReport {
        suite: "evident-corpus",
        config: *cfg,
        formulas: cfg.formulas,
        points_checked: 0,
        evident_points: 0,
        biconditional_failures: 0,
        reconstruction_failures: 0,
        failures: Vec::new(),
        pass: false,
    };
    for t in tallies {
        report.points_checked += t.points;
        report.evident_points += t.evident;
        report.biconditional_failures += t.biconditional;
        report.reconstruction_failures += t.reconstruction;
        report.failures.extend(t.failures.into_iter().take(8usize.saturating_sub(report.failures.len())));
    }
    report.pass = report.biconditional_failures == 0 && report.reconstruction_failures == 0;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionSuiteConfig {
    /// Random source concepts per (construction, n, q) cell.
    pub instances: usize,
    pub seed: u64,
    /// Also run the faulted constructions and require them to fail.
    pub negative_controls: bool,
}

impl Default for ReductionSuiteConfig {
    fn default() -> Self {
        ReductionSuiteConfig { instances: 3, seed: 0, negative_controls: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionCase {
    /// Whether the case is expected to verify (false for negative controls).
    pub expect_pass: bool,
    pub source: String,
    pub target_size: usize,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionSuiteReport {
    pub suite: &'static str,
    pub config: ReductionSuiteConfig,
    pub cases: usize,
    pub verified: usize,
    pub controls_detected: usize,
    pub controls: usize,
    pub pass: bool,
    pub results: Vec<ReductionCase>,
}

/// Size of a concept in its own natural unit: terms, leaves, states,
/// table entries or nonzero coefficients.
pub fn concept_size(c: &Concept) -> usize {
    match c {
        Concept::Dnf(f) => f.len(),
        Concept::Tree(t) => t.leaf_count(),
        Concept::Dfa(a) => a.state_count(),
        Concept::Junta(h) => h.table().len(),
        Concept::Poly(p) => p.nonzero_count(),
        Concept::Ptf(f) => f.poly.nonzero_count(),
        Concept::Pullback { inner, .. } => concept_size(inner),
    }
}

/// Source concept for one cell of the matrix.
pub fn random_source(construction: Construction, n: usize, q0: usize, seed: u64) -> anyhow::Result<Concept> {
    let mut rng = stream(seed);
    Ok(match construction {
        Construction::Dnf => instances::random_dnf(n, 1 + (seed as usize % 3), n.min(3), &mut rng)?.into(),
        Construction::Dfa => instances::random_dfa(2 + (seed as usize % 3), n, &mut rng)?.into(),
        Construction::Junta => instances::random_junta(n, n.min(3), &mut rng)?.into(),
        Construction::Tree => instances::random_tree(n, if q0 >= 2 { 6 } else { 12 }, &mut rng).into(),
        Construction::Poly => instances::random_poly(n, n.min(3), &mut rng)?.into(),
        Construction::Ptf => instances::random_ptf(n, 3, 2, &mut rng)?.into(),
    })
}

/// The verification matrix: DNF and DFA type A for `n <= 3`; junta, tree,
/// poly and PTF type B for `n <= 6`, `q0 <= 2`.
pub fn reduction_matrix() -> Vec<(Construction, usize, usize)> {
    let mut cells = Vec::new();
    for c in [Construction::Dnf, Construction::Dfa] {
        for n in 1..=3 {
            cells.push((c, n, 0));
        }
    }
    for c in [Construction::Junta, Construction::Tree, Construction::Poly, Construction::Ptf] {
        for n in [2, 4, 6] {
            for q0 in 1..=2 {
                cells.push((c, n, q0));
            }
        }
    }
    cells
}

pub fn build_reduction(construction: Construction, n: usize, q0: usize) -> localq_core::Result<QReduction> {
    match construction.kind() {
        localq_core::reductions::ReductionKind::TypeA => QReduction::type_a(construction, n, None),
        localq_core::reductions::ReductionKind::TypeB => QReduction::type_b(construction, n, q0),
    }
}

fn reduction_case(r: QReduction, h: &Concept, expect_pass: bool) -> anyhow::Result<ReductionCase> {
    let target_size = concept_size(&r.transform(h)?);
    let report = verify_reduction(&r, h)?;
    Ok(ReductionCase { expect_pass, source: formats::write_concept(h).unwrap_or_default(), target_size, report })
}

/// Fixed sources on which each fault is known to be observable.
pub fn negative_controls() -> anyhow::Result<Vec<(QReduction, Concept)>> {
    let dnf = formats::parse_concept("dnf 2\n1\n")?;
    let dfa: Concept = localq_core::concepts::Dfa::parity(2).into();
    let tree = formats::parse_concept("tree 2\n(1 0 (2 0 1))\n")?;
    Ok(vec![
        (QReduction::type_a(Construction::Dnf, 2, None)?.with_fault(Fault::DropDetector)?, dnf),
        (QReduction::type_a(Construction::Dfa, 2, None)?.with_fault(Fault::StalledSimulator)?, dfa),
        (QReduction::type_b(Construction::Tree, 2, 1)?.with_fault(Fault::FirstCopyLabel)?, tree),
    ])
}

pub fn run_reduction_suite(cfg: &ReductionSuiteConfig) -> anyhow::Result<ReductionSuiteReport> {
    let mut jobs = Vec::new();
    for (cell, (c, n, q0)) in reduction_matrix().into_iter().enumerate() {
        for i in 0..cfg.instances {
            jobs.push((c, n, q0, derive_seed(cfg.seed, (cell * 1000 + i) as u64)));
        }
    }
    let mut results = jobs
        .into_par_iter()
        .map(|(c, n, q0, seed)| {
            let h = random_source(c, n, q0, seed)?;
            reduction_case(build_reduction(c, n, q0)?, &h, true)
                .with_context(|| format!("{} n={n} q0={q0} seed={seed}", c.name()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let cases = results.len();
    let verified = results.iter().filter(|r| r.report.pass).count();
    let mut controls = 0;
    let mut controls_detected = 0;
    if cfg.negative_controls {
        for (r, h) in negative_controls()? {
            let case = reduction_case(r, &h, false)?;
            controls += 1;
            if !case.report.pass && !case.report.counterexamples.is_empty() {
                controls_detected += 1;
            }
            results.push(case);
        }
    }
    Ok(ReductionSuiteReport {
        suite: "reduction",
        config: *cfg,
        cases,
        verified,
        controls_detected,
        controls,
        pass: verified == cases && controls_detected == controls,
        results,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationCase {
    pub construction: Construction,
    pub n: usize,
    pub q: usize,
    pub learner: &'static str,
    pub queries: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub suite: &'static str,
    pub seed: u64,
    pub queries: usize,
    pub mismatches: usize,
    /// Runs that raised an anchor-uniqueness error.
    pub uniqueness_errors: usize,
    pub cases: Vec<SimulationCase>,
    pub pass: bool,
}

/// Runs local-query learners through the synthesized answerer of every
/// construction and compares each answer with the reduced concept `h'`.
pub fn run_simulation_suite(seed: u64, sample_size: usize) -> anyhow::Result<SimulationReport> {
    let cells: Vec<(Construction, usize, usize)> = vec![
        (Construction::Dnf, 2, 0),
        (Construction::Dnf, 3, 0),
        (Construction::Dfa, 2, 0),
        (Construction::Dfa, 3, 0),
        (Construction::Junta, 4, 1),
        (Construction::Junta, 4, 2),
        (Construction::Tree, 4, 1),
        (Construction::Poly, 4, 1),
        (Construction::Ptf, 4, 2),
    ];
    let results = cells
        .into_par_iter()
        .enumerate()
        .map(|(cell, (c, n, q0))| -> anyhow::Result<(Vec<SimulationCase>, usize)> {
            let cell_seed = derive_seed(seed, cell as u64);
            let h = random_source(c, n, q0, cell_seed)?;
            let r = build_reduction(c, n, q0)?;
            let h_prime = r.transform(&h)?;
            let dist = Distribution::UniformCube(n);
            let sample = draw_training_set(&dist, &h, sample_size, derive_seed(cell_seed, 1))?;
            let mut out = Vec::new();
            let mut uniqueness = 0;
            let probe = RandomProbeLearner { radius: r.locality(), probes: 4 * sample_size, seed: derive_seed(cell_seed, 2) };
            let learners: [(&'static str, Box<dyn localq_core::learner::LocalQueryLearner>); 2] = [
                ("evident-dnf", Box::new(EvidentDnfLearner { phase_one: sample_size / 2 })),
                ("random-probe", Box::new(probe)),
            ];
            for (name, mut learner) in learners {
                if learner.locality() > r.locality() {
                    continue;
                }
                match simulate_pac_from_local(learner.as_mut(), &r, &sample) {
                    Ok(sim) => {
                        let mut mismatches = 0;
                        for rec in &sim.transcript {
                            if h_prime.eval(&rec.query)? != rec.answer {
                                mismatches += 1;
                            }
                        }
                        out.push(SimulationCase {
                            construction: c,
                            n,
                            q: r.locality(),
                            learner: name,
                            queries: sim.transcript.len(),
                            mismatches,
                        });
                    }
                    Err(Error::AnchorNotUnique { .. }) => uniqueness += 1,
                    Err(e) => return Err(e).with_context(|| format!("{} via {name}", c.name())),
                }
            }
            Ok((out, uniqueness))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut cases = Vec::new();
    let mut uniqueness_errors = 0;
    for (c, u) in results {
        cases.extend(c);
        uniqueness_errors += u;
    }
    let queries = cases.iter().map(|c| c.queries).sum();
    let mismatches = cases.iter().map(|c| c.mismatches).sum();
    Ok(SimulationReport {
        suite: "simulation",
        seed,
        queries,
        mismatches,
        uniqueness_errors,
        pass: mismatches == 0 && uniqueness_errors == 0,
        cases,
    })
}

/// An observed size against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeCheck {
    pub observed: usize,
    pub bound: usize,
    pub holds: bool,
}

impl SizeCheck {
    pub fn at_most(observed: usize, bound: usize) -> Self {
        SizeCheck { observed, bound, holds: observed <= bound }
    }

    pub fn exactly(observed: usize, bound: usize) -> Self {
        SizeCheck { observed, bound, holds: observed == bound }
    }
}

/// Degree and coefficient-count checks for one polynomial reduction.
pub fn poly_size_checks(source: &localq_core::concepts::SparsePoly, q0: usize) -> anyhow::Result<(SizeCheck, SizeCheck)> {
    let reduced = localq_core::reductions::reduce_poly_typeB(source, q0)?;
    let (degree_mult, coeff_mult) = poly_size_multipliers(q0);
    Ok((
        SizeCheck::at_most(reduced.degree(), degree_mult * source.degree()),
        SizeCheck::at_most(reduced.nonzero_count(), coeff_mult * source.nonzero_count()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::parse("family = doubled-tree # trees\nn = 5\nmax_leaves = 9\ntrials = 3\nepsilon = 0.2\n").unwrap();
        assert_eq!(cfg.family, Family::DoubledTree { n: 5, max_leaves: 9 });
        assert_eq!((cfg.trials, cfg.epsilon), (3, 0.2));
        assert!(ExperimentConfig::parse("trials = 0").is_err());
        assert!(ExperimentConfig::parse("epsilon = 1").is_err());
        assert!(ExperimentConfig::parse("colour = blue").is_err());
        assert!(ExperimentConfig::parse("family = file").is_err());
    }

    #[test]
    fn binomial_arithmetic() {
        assert!((binomial_tail(4, 0.5, 3) - 5.0 / 16.0).abs() < 1e-12);
        assert!((binomial_tail(20, 0.3, 0) - 1.0).abs() < 1e-12);
        assert_eq!(required_successes(20), 15);
        assert_eq!(required_successes(1), 1);
    }

    #[test]
    fn suites_replay_and_count_consistently() {
        let cfg = ExperimentConfig { m1: 300, m2: 1000, trials: 5, seed: 17, ..ExperimentConfig::default() };
        let a = run_learning_suite(&cfg).unwrap();
        let b = run_learning_suite(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.successes, a.reports.iter().filter(|r| r.success).count());
        assert!(a.successes <= a.trials);
        assert_eq!(a.locality_violations, 0);
    }

    #[test]
    fn point_mass_on_an_evident_positive_gives_zero_loss() {
        let dir = std::env::temp_dir().join(format!("localq-pm-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("f.dnf");
        let d = dir.join("d.txt");
        std::fs::write(&f, "dnf 3\n1 2\n-1 -2\n").unwrap();
        std::fs::write(&d, "++- 1\n").unwrap();
        let cfg = ExperimentConfig {
            family: Family::File { path: f },
            distribution: Some(format!("file:{}", d.display())),
            m1: 1,
            m2: 1,
            trials: 1,
            ..ExperimentConfig::default()
        };
        let r = run_learning_suite(&cfg).unwrap();
        assert_eq!(r.reports[0].loss_exact.as_deref(), Some("0"));
        assert_eq!(r.reports[0].hypothesis_terms, 1);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn auto_plan_is_capped() {
        let cfg = ExperimentConfig { auto_plan: true, ..ExperimentConfig::default() };
        assert!(run_learning_suite(&cfg).is_err());
    }
}
