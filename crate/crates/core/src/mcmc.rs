//! Markov chain driver: acceptance rules, chain execution and the exact
//! stationary laws chains are validated against.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::ActionKind;
use crate::causet::{CausalMatrix, CausalSet, CausalSetSpace};
use crate::error::{usage, Error, Result};
use crate::proposals::{ProposalStrategy, Proposer};

/// Measure ratio `μ(new) / μ(old)` multiplied into the acceptance probability.
pub type WeightHook = Arc<dyn Fn(&CausalSet, &CausalSet) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub enum RuleKind {
    /// Accept every valid proposal.
    UniformValidity,
    /// Accept valid proposals with probability `min(1, exp(−β ΔS))`.
    Metropolis { beta: f64, action: ActionKind },
}

#[derive(Clone)]
pub struct AcceptanceRule {
    kind: RuleKind,
    weight_hook: Option<WeightHook>,
}

impl fmt::Debug for AcceptanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AcceptanceRule")
            .field("kind", &self.kind)
            .field("weight_hook", &self.weight_hook.is_some())
            .finish()
    }
}

impl AcceptanceRule {
    pub fn uniform_validity() -> Self {
        Self {
            kind: RuleKind::UniformValidity,
            weight_hook: None,
        }
    }

    pub fn metropolis(beta: f64, action: ActionKind) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("inverse temperature {beta} must be positive")));
        }
        Ok(Self {
            kind: RuleKind::Metropolis { beta, action },
            weight_hook: None,
        })
    }

    /// Metropolis rule at temperature `T`, `β = 1/T`.
    pub fn from_temperature(temperature: f64, action: ActionKind) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Config(format!("temperature {temperature} must be positive")));
        }
        Self::metropolis(1.0 / temperature, action)
    }

    pub fn with_weight_hook(mut self, hook: WeightHook) -> Self {
        self.weight_hook = Some(hook);
        self
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn beta(&self) -> f64 {
        match self.kind {
            RuleKind::UniformValidity => 0.0,
            RuleKind::Metropolis { beta, .. } => beta,
        }
    }

    pub fn action(&self) -> Option<&ActionKind> {
        match &self.kind {
            RuleKind::UniformValidity => None,
            RuleKind::Metropolis { action, .. } => Some(action),
        }
    }

    fn weight_ratio(&self, old: &CausalSet, new: &CausalSet) -> f64 {
        self.weight_hook.as_ref().map_or(1.0, |h| h(old, new))
    }

    /// Probability of accepting the valid move `old → new`, capped at 1.
    pub fn acceptance_probability(&self, old: &CausalSet, new: &CausalSet) -> f64 {
        let mu = self.weight_ratio(old, new);
        match &self.kind {
            RuleKind::UniformValidity => mu.min(1.0),
            RuleKind::Metropolis { beta, action } => {
                let ds = action.evaluate(new) - action.evaluate(old);
                metropolis_probability(*beta, ds, mu)
            }
        }
    }
}

/// `min(1, exp(−β ΔS) · μ)`.
pub fn metropolis_probability(beta: f64, delta_s: f64, mu_ratio: f64) -> f64 {
    ((-beta * delta_s).exp() * mu_ratio).min(1.0)
}

/// Outcome of one acceptance test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Accepted,
    RejectedInvalid,
    RejectedWeight,
}

/// Acceptance test for a raw proposal. No random number is drawn for invalid
/// proposals or for moves accepted with certainty.
pub fn decide<R: Rng + ?Sized>(rule: &AcceptanceRule, old: &CausalSet, new_raw: &CausalMatrix, rng: &mut R) -> Decision {
    let Ok(new) = CausalSet::new(*new_raw) else {
        return Decision::RejectedInvalid;
    };
    let p = rule.acceptance_probability(old, &new);
    if p >= 1.0 || p > rng.random::<f64>() {
        Decision::Accepted
    } else {
        Decision::RejectedWeight
    }
}

pub fn accept<R: Rng + ?Sized>(rule: &AcceptanceRule, old: &CausalSet, new_raw: &CausalMatrix, rng: &mut R) -> bool {
    decide(rule, old, new_raw, rng) == Decision::Accepted
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
    /// Action recorded in the trace; defaults to the rule's action.
    pub observable: Option<ActionKind>,
}

impl ChainConfig {
    /// `burn_in = steps / 10`, `thin = 1`.
    pub fn new(steps: u64) -> Self {
        Self {
            steps,
            burn_in: steps / 10,
            thin: 1,
            observable: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= self.burn_in {
            return Err(Error::Config(format!(
                "steps ({}) must exceed burn-in ({})",
                self.steps, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thinning interval must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub proposals: u64,
    /// Accepted moves to a different set.
    pub moves: u64,
    /// Proposals of the current set itself.
    pub self_proposals: u64,
    pub rejected_invalid: u64,
    pub rejected_weight: u64,
}

impl ChainStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            (self.moves + self.self_proposals) as f64 / self.proposals as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub step: u64,
    pub set: CausalSet,
    pub action: f64,
    pub accepted: bool,
    pub abundances: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct ChainState {
    current: CausalSet,
    step: u64,
    stats: ChainStats,
    rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(initial: CausalSet, seed: u64) -> Self {
        Self::with_rng(initial, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(initial: CausalSet, rng: ChaCha8Rng) -> Self {
        Self {
            current: initial,
            step: 0,
            stats: ChainStats::default(),
            rng,
        }
    }

    pub fn current(&self) -> &CausalSet {
        &self.current
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn stats(&self) -> ChainStats {
        self.stats
    }

    /// One propose/accept cycle; returns whether the proposal was accepted.
    pub fn advance(&mut self, proposer: &Proposer, rule: &AcceptanceRule) -> Result<bool> {
        let raw = proposer.propose(&self.current, &mut self.rng)?;
        self.step += 1;
        self.stats.proposals += 1;
        if raw == self.current.matrix() {
            self.stats.self_proposals += 1;
            return Ok(true);
        }
        match decide(rule, &self.current, &raw, &mut self.rng) {
            Decision::Accepted => {
                self.current = CausalSet::new(raw)?;
                self.stats.moves += 1;
                Ok(true)
            }
            Decision::RejectedInvalid => {
                self.stats.rejected_invalid += 1;
                Ok(false)
            }
            Decision::RejectedWeight => {
                self.stats.rejected_weight += 1;
                Ok(false)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub samples: Vec<CausalSet>,
    pub stats: ChainStats,
    pub trace: Vec<TraceRow>,
}

/// Runs a chain for `config.steps` proposals, recording every `thin`-th state
/// after burn-in.
pub fn run_chain(
    initial: CausalSet,
    strategy: &ProposalStrategy,
    rule: &AcceptanceRule,
    config: &ChainConfig,
    seed: u64,
) -> Result<ChainOutput> {
    let proposer = Proposer::new(strategy, initial.n())?;
    run_chain_with(ChainState::new(initial, seed), &proposer, rule, config)
}

pub fn run_chain_with(
    mut state: ChainState,
    proposer: &Proposer,
    rule: &AcceptanceRule,
    config: &ChainConfig,
) -> Result<ChainOutput> {
    config.validate()?;
    let observable = config
        .observable
        .clone()
        .or_else(|| rule.action().cloned())
        .unwrap_or_default();
    let kept = (config.steps - config.burn_in).div_ceil(config.thin) as usize;
    let mut samples = Vec::with_capacity(kept);
    let mut trace = Vec::with_capacity(kept);
    for step in 1..=config.steps {
        let accepted = state.advance(proposer, rule)?;
        debug_assert!(state.current.is_causal_set());
        if step > config.burn_in && (step - config.burn_in - 1) % config.thin == 0 {
            let s = state.current;
            samples.push(s);
            trace.push(TraceRow {
                step,
                set: s,
                action: observable.evaluate(&s),
                accepted,
                abundances: s.abundances().counts,
            });
        }
    }
    Ok(ChainOutput {
        samples,
        stats: state.stats,
        trace,
    })
}

/// Writes `step,set,action,accepted,abundances` rows, abundances `;`-separated.
pub fn write_trace_csv<W: Write>(mut w: W, rows: &[TraceRow]) -> io::Result<()> {
    writeln!(w, "step,set,action,accepted,abundances")?;
    for r in rows {
        let ab: Vec<String> = r.abundances.iter().map(u64::to_string).collect();
        writeln!(w, "{},{},{},{},{}", r.step, r.set, r.action, u8::from(r.accepted), ab.join(";"))?;
    }
    Ok(())
}

/// Normalised histogram of `samples` in enumeration order.
pub fn empirical_distribution(samples: &[CausalSet], space: &CausalSetSpace) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(usage!("empirical distribution of zero samples"));
    }
    let mut counts = vec![0u64; space.len()];
    for s in samples {
        let idx = space
            .index_of(s)
            .ok_or_else(|| Error::Internal(format!("sample {s} missing from the enumeration of n = {}", space.n())))?;
        counts[idx] += 1;
    }
    let total = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

pub fn uniform_distribution(space: &CausalSetSpace) -> Vec<f64> {
    vec![1.0 / space.len() as f64; space.len()]
}

/// `ν(C) ∝ exp(−β S(C))` over the enumerated sets.
pub fn boltzmann_distribution(space: &CausalSetSpace, beta: f64, action: &ActionKind) -> Vec<f64> {
    let log_w: Vec<f64> = space.sets().iter().map(|s| -beta * action.evaluate(s)).collect();
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Exact stationary law targeted by `rule` (weight hooks are not included).
pub fn stationary_distribution(space: &CausalSetSpace, rule: &AcceptanceRule) -> Vec<f64> {
    match rule.kind() {
        RuleKind::UniformValidity => uniform_distribution(space),
        RuleKind::Metropolis { beta, action } => boltzmann_distribution(space, *beta, action),
    }
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
