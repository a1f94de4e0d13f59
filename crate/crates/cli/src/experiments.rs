//! Experiment orchestration and CSV emission.

use std::fmt::Write as _;

use causet_core::action::{bd_truncated, bd_truncated_d, ActionKind};
use causet_core::causet::{enumerate_causal_sets_with_cap, CausalSet, CausalSetSpace};
use causet_core::exactbd::{check_encoding, default_lambda};
use causet_core::mcmc::{run_chain_with, ChainState};
use causet_core::proposals::Proposer;
use causet_core::spectral::{fit_scaling, strategy_gap, GapResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::{CliError, VERSION};

/// Overrides the worker-pool size.
pub const WORKERS_ENV: &str = "CAUSET_WORKERS";

/// Result of a run: the CSV text plus human-readable notes for stderr.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub csv: String,
    pub notes: Vec<String>,
    /// Set when the run completed but a verification check failed.
    pub failure: Option<String>,
}

fn worker_count() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        },
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical().as_bytes()))
}

fn preamble(cfg: &ExperimentConfig, columns: &[&str]) -> String {
    let seed = cfg.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!(
        "# config_hash={},seed={seed},version={VERSION}\n{}\n",
        config_hash(cfg),
        columns.join(",")
    )
}

/// Deterministic RNG for one job: the root seed selects the key, the
/// strategy index selects the stream, so parameter draws are shared across
/// cardinalities and temperatures.
fn job_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| match cfg.experiment {
        ExperimentKind::Enumerate => enumerate(cfg),
        ExperimentKind::Action => action(cfg),
        ExperimentKind::Sample => sample(cfg),
        ExperimentKind::SpectralGap | ExperimentKind::SweepT => gap_table(cfg),
        ExperimentKind::SweepN => sweep_n(cfg),
        ExperimentKind::ExactbdVerify => exactbd_verify(cfg),
    })
}

fn enumerate(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    cfg.check_caps(false)?;
    let mut csv = preamble(cfg, &["n", "index", "set", "relations"]);
    let mut notes = Vec::new();
    for &n in &cfg.cardinalities {
        let sets = enumerate_causal_sets_with_cap(n, cfg.max_cardinality)?;
        for (i, s) in sets.iter().enumerate() {
            writeln!(csv, "{n},{i},{s},{}", s.relation_count()).unwrap();
        }
        notes.push(format!("n={n}: {} causal sets", sets.len()));
    }
    Ok(Report { csv, notes, failure: None })
}

fn action(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let kind = cfg.action_kind()?;
    let sets: Vec<CausalSet> = if cfg.sets.is_empty() {
        cfg.check_caps(false)?;
        let mut all = Vec::new();
        for &n in &cfg.cardinalities {
            all.extend(enumerate_causal_sets_with_cap(n, cfg.max_cardinality)?);
        }
        all
    } else {
        cfg.sets
            .iter()
            .map(|t| {
                t.parse::<CausalSet>()
                    .map_err(|e| CliError::Validation(format!("`sets`: {t:?}: {e}")))
            })
            .collect::<Result<_, _>>()?
    };
    let mut csv = preamble(cfg, &["set", "abundances", "action", "truncated", "truncation_error"]);
    for s in &sets {
        let exact = kind.evaluate(s);
        let truncated = match &kind {
            ActionKind::Smeared4d { epsilon } => bd_truncated(s, *epsilon),
            ActionKind::GeneralD(p) => bd_truncated_d(s, p),
            ActionKind::Exact2d => exact,
        };
        let ab: Vec<String> = s.abundances().counts.iter().map(u64::to_string).collect();
        writeln!(csv, "{s},{},{exact},{truncated},{}", ab.join(";"), truncated - exact).unwrap();
    }
    Ok(Report {
        csv,
        notes: vec![format!("{} sets", sets.len())],
        failure: None,
    })
}

struct Job {
    strategy: usize,
    n: usize,
    temperature: f64,
}

fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for strategy in 0..cfg.strategies.len() {
        for &n in &cfg.cardinalities {
            for &temperature in &cfg.temperatures {
                out.push(Job { strategy, n, temperature });
            }
        }
    }
    out
}

fn seed_of(cfg: &ExperimentConfig) -> Result<u64, CliError> {
    cfg.seed
        .ok_or_else(|| CliError::Validation("`seed`: required for stochastic experiments".into()))
}

fn sample(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let seed = seed_of(cfg)?;
    let initial = cfg.chain.initial.as_deref().map(|t| t.parse::<CausalSet>()).transpose()?;
    if let Some(init) = &initial {
        if cfg.cardinalities.iter().any(|&n| n != init.n()) {
            return Err(CliError::Validation(format!(
                "`chain.initial` has {} elements but `n` differs",
                init.n()
            )));
        }
    }
    let chain_cfg = cfg.chain_config();
    let rows: Vec<Result<(String, String), CliError>> = jobs(cfg)
        .par_iter()
        .enumerate()
        .map(|(idx, job)| {
            let strat = &cfg.strategies[job.strategy];
            let strategy = strat.strategy();
            let rule = cfg.rule_at(job.temperature)?;
            let start = match initial {
                Some(s) => s,
                None => CausalSet::antichain(job.n)?,
            };
            let proposer = Proposer::new(&strategy, job.n)?;
            let state = ChainState::with_rng(start, job_rng(seed, idx as u64));
            let out = run_chain_with(state, &proposer, &rule, &chain_cfg)?;
            let label = strat.label();
            let mut text = String::new();
            for r in &out.trace {
                let ab: Vec<String> = r.abundances.iter().map(u64::to_string).collect();
                writeln!(
                    text,
                    "{label},{},{},{},{},{},{},{}",
                    job.n,
                    job.temperature,
                    r.step,
                    r.set,
                    r.action,
                    u8::from(r.accepted),
                    ab.join(";")
                )
                .unwrap();
            }
            let note = format!(
                "{label} n={} T={}: acceptance {:.4}, {} samples",
                job.n,
                job.temperature,
                out.stats.acceptance_rate(),
                out.samples.len()
            );
            Ok((text, note))
        })
        .collect();
    let mut csv = preamble(
        cfg,
        &["strategy", "n", "temperature", "step", "set", "action", "accepted", "abundances"],
    );
    let mut notes = Vec::new();
    for r in rows {
        let (text, note) = r?;
        csv.push_str(&text);
        notes.push(note);
    }
    Ok(Report { csv, notes, failure: None })
}

fn compute_gaps(cfg: &ExperimentConfig) -> Result<Vec<(Job, GapResult)>, CliError> {
    cfg.check_caps(true)?;
    let seed = seed_of(cfg)?;
    let spaces: Vec<CausalSetSpace> = cfg
        .cardinalities
        .iter()
        .map(|&n| CausalSetSpace::new(n))
        .collect::<Result<_, _>>()?;
    let results: Vec<Result<(Job, GapResult), CliError>> = jobs(cfg)
        .into_par_iter()
        .map(|job| {
            let space = &spaces[cfg.cardinalities.iter().position(|&n| n == job.n).unwrap()];
            let rule = cfg.rule_at(job.temperature)?;
            let strategy = cfg.strategies[job.strategy].strategy();
            let mut rng = job_rng(seed, job.strategy as u64);
            let gap = strategy_gap(space, &strategy, &rule, cfg.parameter_samples, &mut rng)?;
            Ok((job, gap))
        })
        .collect();
    results.into_iter().collect()
}

fn gap_table(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let gaps = compute_gaps(cfg)?;
    let mut csv = preamble(cfg, &["strategy", "n", "temperature", "delta", "delta_err"]);
    for (job, g) in &gaps {
        writeln!(
            csv,
            "{},{},{},{},{}",
            cfg.strategies[job.strategy].label(),
            job.n,
            job.temperature,
            g.delta,
            g.error
        )
        .unwrap();
    }
    Ok(Report {
        csv,
        notes: vec![format!("{} gaps", gaps.len())],
        failure: None,
    })
}

fn sweep_n(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    if cfg.temperatures.len() != 1 {
        return Err(CliError::Validation("`temperatures`: sweep-n takes a single temperature".into()));
    }
    let gaps = compute_gaps(cfg)?;
    let mut csv = preamble(cfg, &["record", "strategy", "n", "delta", "delta_err", "k", "k_err"]);
    let mut notes = Vec::new();
    for (i, strat) in cfg.strategies.iter().enumerate() {
        let label = strat.label();
        let points: Vec<(usize, GapResult)> = gaps
            .iter()
            .filter(|(job, _)| job.strategy == i)
            .map(|(job, g)| (job.n, *g))
            .collect();
        for (n, g) in &points {
            writeln!(csv, "gap,{label},{n},{},{},,", g.delta, g.error).unwrap();
        }
        match fit_scaling(&points) {
            Ok(fit) => {
                writeln!(csv, "fit,{label},,,,{},{}", fit.k, fit.k_error).unwrap();
                notes.push(format!("{label}: k = {:.4} +- {:.4}", fit.k, fit.k_error));
            }
            Err(e) => {
                log::warn!("{label}: no scaling fit ({e})");
                notes.push(format!("{label}: no fit ({e})"));
            }
        }
    }
    Ok(Report { csv, notes, failure: None })
}

fn exactbd_verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let reports: Vec<Result<_, CliError>> = cfg
        .cardinalities
        .iter()
        .map(|&n| {
            let lambda = match cfg.lambda {
                Some(l) => l,
                None => default_lambda(n)?,
            };
            Ok(check_encoding(n, lambda)?)
        })
        .collect();
    let mut csv = preamble(
        cfg,
        &["n", "qubits", "sets", "corruptions", "lambda", "min_safe_lambda", "passed"],
    );
    let mut notes = Vec::new();
    let mut failed = Vec::new();
    for r in reports {
        let r = r?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.n,
            r.qubits,
            r.sets_checked,
            r.corruptions_checked,
            r.lambda,
            r.min_safe_lambda,
            u8::from(r.passed())
        )
        .unwrap();
        if !r.passed() {
            failed.push(r.n.to_string());
        }
        notes.push(r.to_string().trim_end().to_string());
    }
    let failure = (!failed.is_empty()).then(|| format!("encoding check failed for n = {}", failed.join(", ")));
    Ok(Report { csv, notes, failure })
}
