use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use localq::formats;
use localq::harness::{
    build_reduction, random_source, run_claim1_corpus, run_learning_suite, run_reduction_suite, run_simulation_suite,
    run_trial, CorpusConfig, ExperimentConfig, Family, ReductionSuiteConfig,
};
use localq_core::concepts::Concept;
use localq_core::evident::evidence_report;
use localq_core::reductions::{verify_reduction_with, Construction, Fault, QReduction, VerifyOptions};
use localq_core::ratio_str;

#[derive(Parser)]
#[command(name = "localq", version, about = "Local membership-query learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Write JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a DNF target from local queries and report the loss
    Learn {
        #[arg(long)]
        target: PathBuf,
        /// uniform:n, product:p1,...,pn or file:path
        #[arg(long)]
        dist: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 5000)]
        m1: usize,
        #[arg(long, default_value_t = 50000)]
        m2: usize,
        /// Use the planner's sample sizes instead of --m1/--m2
        #[arg(long)]
        auto_plan: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        locality: usize,
        /// Export the oracle's query log as JSON lines
        #[arg(long)]
        query_log: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Report per-term evident-satisfaction rates of a DNF
    CheckEvident {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        dist: Option<String>,
        /// Required rate, as a fraction; defaults to 1/n
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Build a reduction and check it by enumeration
    VerifyReduction {
        #[arg(long, value_enum)]
        construction: ConstructionArg,
        #[arg(long)]
        n: usize,
        /// Locality of type-B constructions
        #[arg(long, default_value_t = 1)]
        q0: usize,
        /// Block length of type-A constructions (default n^2)
        #[arg(long)]
        k: Option<usize>,
        /// Source concept; a random one is drawn from --seed when absent
        #[arg(long)]
        concept: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest flip radius enumerated around each image
        #[arg(long, default_value_t = 3)]
        cap_q: usize,
        #[arg(long, value_enum)]
        fault: Option<FaultArg>,
        #[command(flatten)]
        output: Output,
    },
    /// Run experiment suites, one JSON report per line
    Suite {
        #[arg(long, value_enum, default_value_t = SuiteKind::All)]
        kind: SuiteKind,
        /// Learning-suite config in key = value form
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Dnf,
    Dfa,
    Junta,
    Tree,
    Poly,
    Ptf,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::Dnf => Construction::Dnf,
            ConstructionArg::Dfa => Construction::Dfa,
            ConstructionArg::Junta => Construction::Junta,
            ConstructionArg::Tree => Construction::Tree,
            ConstructionArg::Poly => Construction::Poly,
            ConstructionArg::Ptf => Construction::Ptf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DropDetector,
    StalledSimulator,
    FirstCopyLabel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteKind {
    Learning,
    Corpus,
    Reduction,
    Simulation,
    All,
}

fn writer(out: &Output) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(w: &mut dyn Write, value: &impl Serialize) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Learn { target, dist, epsilon, m1, m2, auto_plan, seed, locality, query_log, timings, output } => {
            let cfg = ExperimentConfig {
                family: Family::File { path: target },
                distribution: dist,
                epsilon,
                m1,
                m2,
                auto_plan,
                trials: 1,
                seed,
                locality,
                timings,
            };
            cfg.validate()?;
            let run = run_trial(&cfg, 0)?;
            if let Some(path) = query_log {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                formats::write_query_log(&run.log, BufWriter::new(f))?;
            }
            emit(&mut *writer(&output)?, &run)?;
            Ok(true)
        }
        Command::CheckEvident { formula, dist, beta, output } => {
            let Concept::Dnf(f) = formats::read_concept(&formula)? else {
                bail!("{} is not a dnf", formula.display());
            };
            let dist = match dist {
                Some(spec) => formats::parse_distribution(&spec)?,
                None => localq_core::distributions::Distribution::UniformCube(f.dim()),
            };
            let beta = beta
                .map(|b| ratio_str::parse(&b).with_context(|| format!("bad beta {b:?}")))
                .transpose()?;
            emit(&mut *writer(&output)?, &evidence_report(&f, &dist, beta)?)?;
            Ok(true)
        }
        Command::VerifyReduction { construction, n, q0, k, concept, seed, cap_q, fault, output } => {
            let construction = Construction::from(construction);
            let mut r = match (construction.kind(), k) {
                (localq_core::reductions::ReductionKind::TypeA, k) => QReduction::type_a(construction, n, k)?,
                (_, None) => build_reduction(construction, n, q0)?,
                (_, Some(_)) => bail!("--k applies to type-A constructions only"),
            };
            if let Some(fault) = fault {
                r = r.with_fault(match fault {
                    FaultArg::DropDetector => Fault::DropDetector,
                    FaultArg::StalledSimulator => Fault::StalledSimulator,
                    FaultArg::FirstCopyLabel => Fault::FirstCopyLabel,
                })?;
            }
            let h = match concept {
                Some(p) => formats::read_concept(&p)?,
                None => random_source(construction, n, q0, seed)?,
            };
            let report = verify_reduction_with(&r, &h, VerifyOptions { cap_q, ..VerifyOptions::default() })?;
            emit(&mut *writer(&output)?, &report)?;
            Ok(report.pass)
        }
        Command::Suite { kind, config, seed, trials, epsilon, timings, output } => {
            let mut w = writer(&output)?;
            let mut pass = true;
            let want = |k| kind == k || kind == SuiteKind::All;
            if want(SuiteKind::Corpus) {
                let r = run_claim1_corpus(&CorpusConfig { seed: seed.unwrap_or(0), ..CorpusConfig::default() })?;
                pass &= r.pass;
                emit(&mut *w, &r)?;
            }
            if want(SuiteKind::Learning) {
                let configs = match &config {
                    Some(p) => vec![ExperimentConfig::parse(&formats::read_file(p)?)?],
                    None => default_learning_configs(),
                };
                for mut cfg in configs {
                    cfg.seed = seed.unwrap_or(cfg.seed);
                    cfg.trials = trials.unwrap_or(cfg.trials);
                    cfg.epsilon = epsilon.unwrap_or(cfg.epsilon);
                    cfg.timings |= timings;
                    let r = run_learning_suite(&cfg)?;
                    pass &= r.pass;
                    emit(&mut *w, &r)?;
                }
            }
            if want(SuiteKind::Reduction) {
                let r = run_reduction_suite(&ReductionSuiteConfig { seed: seed.unwrap_or(0), ..Default::default() })?;
                pass &= r.pass;
                emit(&mut *w, &r)?;
            }
            if want(SuiteKind::Simulation) {
                let r = run_simulation_suite(seed.unwrap_or(0), 400)?;
                pass &= r.pass;
                emit(&mut *w, &r)?;
            }
            w.flush()?;
            Ok(pass)
        }
    }
}

fn default_learning_configs() -> Vec<ExperimentConfig> {
    let families = [
        Family::OppositeLiteral { n: 4, d: 2, width: 2 },
        Family::OppositeLiteral { n: 6, d: 3, width: 3 },
        Family::OppositeLiteral { n: 8, d: 4, width: 4 },
        Family::DoubledTree { n: 8, max_leaves: 16 },
    ];
    families.into_iter().map(|family| ExperimentConfig { family, ..ExperimentConfig::default() }).collect()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
