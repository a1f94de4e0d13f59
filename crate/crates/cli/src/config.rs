//! Experiment configuration: raw TOML schema, flag overrides and validation.

use std::path::PathBuf;

use causet_core::action::{ActionKind, SmearedActionParams, DEFAULT_EPSILON};
use causet_core::causet::{CausalSet, DEFAULT_MAX_CARDINALITY};
use causet_core::mcmc::{AcceptanceRule, ChainConfig};
use causet_core::pauli::PenaltyScale;
use causet_core::proposals::{ParamRange, ProposalStrategy, QuantumStrategy};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Default temperature, `β = 250`.
pub const DEFAULT_TEMPERATURE: f64 = 0.004;
pub const DEFAULT_PARAMETER_SAMPLES: usize = 10;
/// Largest cardinality for spectral experiments without `extended`.
pub const CI_MAX_CARDINALITY: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Enumerate,
    Action,
    Sample,
    SpectralGap,
    SweepN,
    SweepT,
    ExactbdVerify,
}

impl ExperimentKind {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Self::Sample | Self::SpectralGap | Self::SweepN | Self::SweepT)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    Uniform,
    Metropolis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Relation,
    Link,
    ClassicalMixed,
    Quantum,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStrategy {
    pub kind: Option<StrategyKind>,
    pub relation_weight: Option<f64>,
    pub r_tc: Option<[f64; 2]>,
    pub r_bd: Option<[f64; 2]>,
    pub steps: Option<[u32; 2]>,
    pub epsilon: Option<f64>,
    pub penalty: Option<f64>,
    pub alpha_tc: Option<f64>,
    pub alpha_bd: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChain {
    pub steps: Option<u64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub initial: Option<String>,
}

/// Config file as written; every key optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub n: Option<usize>,
    pub cardinalities: Option<Vec<usize>>,
    pub temperature: Option<f64>,
    pub temperatures: Option<Vec<f64>>,
    pub rule: Option<RuleName>,
    pub dimension: Option<u32>,
    pub epsilon: Option<f64>,
    pub length_ratio: Option<f64>,
    pub alpha_d: Option<f64>,
    pub beta_d: Option<f64>,
    pub max_cardinality: Option<usize>,
    pub extended: Option<bool>,
    pub parameter_samples: Option<usize>,
    pub lambda: Option<f64>,
    pub sets: Option<Vec<String>>,
    pub strategies: Option<Vec<RawStrategy>>,
    pub chain: Option<RawChain>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overridden_by(mut self, flags: RawConfig) -> Self {
        if flags.n.is_some() || flags.cardinalities.is_some() {
            self.n = None;
            self.cardinalities = None;
        }
        if flags.temperature.is_some() || flags.temperatures.is_some() {
            self.temperature = None;
            self.temperatures = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            experiment, seed, output, n, cardinalities, temperature, temperatures, rule, dimension, epsilon,
            length_ratio, alpha_d, beta_d, max_cardinality, extended, parameter_samples, lambda, sets,
            strategies, chain
        );
        self
    }
}

/// Fully defaulted and range-checked configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub cardinalities: Vec<usize>,
    pub temperatures: Vec<f64>,
    pub rule: RuleName,
    pub dimension: u32,
    pub epsilon: f64,
    pub length_ratio: f64,
    pub alpha_d: Option<f64>,
    pub beta_d: Option<f64>,
    pub max_cardinality: usize,
    pub extended: bool,
    pub parameter_samples: usize,
    pub lambda: Option<f64>,
    pub sets: Vec<String>,
    pub strategies: Vec<StrategyConfig>,
    pub chain: ChainSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub relation_weight: f64,
    pub r_tc: [f64; 2],
    pub r_bd: [f64; 2],
    pub steps: [u32; 2],
    pub epsilon: f64,
    pub penalty: f64,
    pub alpha_tc: Option<f64>,
    pub alpha_bd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSettings {
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub initial: Option<String>,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("`{key}`: {msg}"))
}

fn sorted(r: [f64; 2]) -> [f64; 2] {
    [r[0].min(r[1]), r[0].max(r[1])]
}

impl StrategyConfig {
    fn from_raw(raw: &RawStrategy, rule: RuleName, epsilon: f64, idx: usize) -> Result<Self, CliError> {
        let key = |f: &str| format!("strategies[{idx}].{f}");
        let kind = raw.kind.ok_or_else(|| invalid(&key("kind"), "missing"))?;
        let q = match rule {
            RuleName::Uniform => QuantumStrategy::uniform(),
            RuleName::Metropolis => QuantumStrategy::weighted(),
        };
        let cfg = Self {
            kind,
            relation_weight: raw.relation_weight.unwrap_or(0.5),
            r_tc: sorted(raw.r_tc.unwrap_or([q.r_tc.lo, q.r_tc.hi])),
            r_bd: sorted(raw.r_bd.unwrap_or([q.r_bd.lo, q.r_bd.hi])),
            steps: raw.steps.unwrap_or([q.steps.0, q.steps.1]),
            epsilon: raw.epsilon.unwrap_or(epsilon),
            penalty: raw.penalty.unwrap_or(1.0),
            alpha_tc: raw.alpha_tc,
            alpha_bd: raw.alpha_bd,
        };
        if !(0.0..=1.0).contains(&cfg.relation_weight) {
            return Err(invalid(&key("relation_weight"), "must lie in [0, 1]"));
        }
        for (f, r) in [("r_tc", cfg.r_tc), ("r_bd", cfg.r_bd)] {
            if !(r[0] >= 0.0 && r[1] <= 1.0) {
                return Err(invalid(&key(f), "range must lie in [0, 1]"));
            }
        }
        if cfg.steps[0] > cfg.steps[1] {
            return Err(invalid(&key("steps"), "lower bound exceeds upper bound"));
        }
        if kind == StrategyKind::Quantum && !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
            return Err(invalid(&key("epsilon"), "quantum moves need ε in (0, 1)"));
        }
        if !(cfg.penalty > 0.0 && cfg.penalty.is_finite()) {
            return Err(invalid(&key("penalty"), "must be positive"));
        }
        for (f, a) in [("alpha_tc", cfg.alpha_tc), ("alpha_bd", cfg.alpha_bd)] {
            if a.is_some_and(|a| !(a > 0.0 && a.is_finite())) {
                return Err(invalid(&key(f), "must be positive"));
            }
        }
        Ok(cfg)
    }

    pub fn strategy(&self) -> ProposalStrategy {
        match self.kind {
            StrategyKind::Relation => ProposalStrategy::Relation,
            StrategyKind::Link => ProposalStrategy::Link,
            StrategyKind::ClassicalMixed => ProposalStrategy::ClassicalMixed {
                relation_weight: self.relation_weight,
            },
            StrategyKind::Quantum => ProposalStrategy::Quantum(QuantumStrategy {
                r_tc: ParamRange {
                    lo: self.r_tc[0],
                    hi: self.r_tc[1],
                },
                r_bd: ParamRange {
                    lo: self.r_bd[0],
                    hi: self.r_bd[1],
                },
                steps: (self.steps[0], self.steps[1]),
                epsilon: self.epsilon,
                penalty: PenaltyScale::new(self.penalty).expect("validated"),
                alpha_tc: self.alpha_tc,
                alpha_bd: self.alpha_bd,
            }),
        }
    }

    pub fn label(&self) -> String {
        self.strategy().name().to_string()
    }
}

fn default_strategies(kind: ExperimentKind, rule: RuleName) -> Vec<RawStrategy> {
    let of = |k| RawStrategy {
        kind: Some(k),
        ..RawStrategy::default()
    };
    match (kind, rule) {
        (ExperimentKind::SweepN, RuleName::Uniform) | (ExperimentKind::SpectralGap, RuleName::Uniform) => vec![
            of(StrategyKind::Quantum),
            of(StrategyKind::Relation),
            of(StrategyKind::Link),
            of(StrategyKind::ClassicalMixed),
        ],
        (ExperimentKind::Sample, _) => vec![of(StrategyKind::ClassicalMixed)],
        _ => vec![of(StrategyKind::Quantum), of(StrategyKind::ClassicalMixed)],
    }
}

/// Default temperature grid for `sweep-t`, log-spaced around 0.004.
pub fn default_temperature_grid() -> Vec<f64> {
    vec![0.001, 0.002, 0.004, 0.008, 0.016, 0.032, 0.064]
}

/// Parses, defaults and range-checks a config file.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, CliError> {
    RawConfig::parse(text)?.validate()
}

impl RawConfig {
    pub fn validate(self) -> Result<ExperimentConfig, CliError> {
        let experiment = self.experiment.ok_or_else(|| invalid("experiment", "missing"))?;
        if experiment.is_stochastic() && self.seed.is_none() {
            return Err(invalid("seed", "required for stochastic experiments"));
        }
        let rule = self.rule.unwrap_or(match experiment {
            ExperimentKind::SweepT => RuleName::Metropolis,
            ExperimentKind::Sample | ExperimentKind::SpectralGap if self.temperature.is_some() => RuleName::Metropolis,
            _ => RuleName::Uniform,
        });
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(invalid("epsilon", "must lie in (0, 1]"));
        }
        let dimension = self.dimension.unwrap_or(4);
        if dimension < 2 {
            return Err(invalid("dimension", "must be at least 2"));
        }
        if dimension != 4 && (self.alpha_d.is_none() || self.beta_d.is_none()) {
            return Err(invalid("dimension", "dimensions other than 4 need `alpha_d` and `beta_d`"));
        }
        let length_ratio = self.length_ratio.unwrap_or(1.0);
        if !(length_ratio > 0.0 && length_ratio.is_finite()) {
            return Err(invalid("length_ratio", "must be positive"));
        }
        let max_cardinality = self.max_cardinality.unwrap_or(DEFAULT_MAX_CARDINALITY);
        if max_cardinality > causet_core::causet::MAX_ELEMENTS {
            return Err(invalid("max_cardinality", format!("at most {}", causet_core::causet::MAX_ELEMENTS)));
        }
        let default_ns: Vec<usize> = match experiment {
            ExperimentKind::SweepN | ExperimentKind::ExactbdVerify => vec![3, 4, 5],
            ExperimentKind::SweepT => vec![5],
            _ => vec![4],
        };
        let cardinalities = match (self.cardinalities, self.n) {
            (Some(_), Some(_)) => return Err(invalid("n", "give either `n` or `cardinalities`")),
            (Some(c), None) => c,
            (None, Some(n)) => vec![n],
            (None, None) => default_ns,
        };
        if cardinalities.is_empty() {
            return Err(invalid("cardinalities", "empty"));
        }
        let min_n = match experiment {
            ExperimentKind::Enumerate | ExperimentKind::Action => 1,
            _ => 2,
        };
        if let Some(n) = cardinalities.iter().find(|&&n| n < min_n) {
            return Err(invalid("n", format!("{n} is below {min_n}")));
        }
        let temperatures = match (self.temperatures, self.temperature) {
            (Some(_), Some(_)) => return Err(invalid("temperature", "give either `temperature` or `temperatures`")),
            (Some(t), None) => t,
            (None, Some(t)) => vec![t],
            (None, None) if experiment == ExperimentKind::SweepT => default_temperature_grid(),
            (None, None) => vec![DEFAULT_TEMPERATURE],
        };
        if let Some(t) = temperatures.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid("temperature", format!("{t} must be positive")));
        }
        let parameter_samples = self.parameter_samples.unwrap_or(DEFAULT_PARAMETER_SAMPLES);
        if parameter_samples == 0 {
            return Err(invalid("parameter_samples", "must be at least 1"));
        }
        if self.lambda.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
            return Err(invalid("lambda", "must be positive"));
        }
        let raw_strategies = self
            .strategies
            .unwrap_or_else(|| default_strategies(experiment, rule));
        let strategies = raw_strategies
            .iter()
            .enumerate()
            .map(|(i, s)| StrategyConfig::from_raw(s, rule, epsilon, i))
            .collect::<Result<Vec<_>, _>>()?;
        if strategies.is_empty() && matches!(
            experiment,
            ExperimentKind::Sample | ExperimentKind::SpectralGap | ExperimentKind::SweepN | ExperimentKind::SweepT
        ) {
            return Err(invalid("strategies", "empty"));
        }
        let raw_chain = self.chain.unwrap_or_default();
        let steps = raw_chain.steps.unwrap_or(100_000);
        let chain = ChainSettings {
            steps,
            burn_in: raw_chain.burn_in.unwrap_or(steps / 10),
            thin: raw_chain.thin.unwrap_or(1),
            initial: raw_chain.initial,
        };
        if chain.steps <= chain.burn_in {
            return Err(invalid("chain.steps", "must exceed chain.burn_in"));
        }
        if chain.thin == 0 {
            return Err(invalid("chain.thin", "must be at least 1"));
        }
        let cfg = ExperimentConfig {
            experiment,
            seed: self.seed,
            output: self.output,
            cardinalities,
            temperatures,
            rule,
            dimension,
            epsilon,
            length_ratio,
            alpha_d: self.alpha_d,
            beta_d: self.beta_d,
            max_cardinality,
            extended: self.extended.unwrap_or(false),
            parameter_samples,
            lambda: self.lambda,
            sets: self.sets.unwrap_or_default(),
            strategies,
            chain,
        };
        cfg.action_kind()?;
        if let Some(init) = &cfg.chain.initial {
            init.parse::<CausalSet>()
                .map_err(|e| invalid("chain.initial", e))?;
        }
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn action_kind(&self) -> Result<ActionKind, CliError> {
        if self.dimension == 4 && self.alpha_d.is_none() && self.length_ratio == 1.0 {
            return Ok(ActionKind::Smeared4d { epsilon: self.epsilon });
        }
        let (alpha, beta) = match (self.alpha_d, self.beta_d) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let p = SmearedActionParams::four_dimensional(self.epsilon).map_err(|e| invalid("epsilon", e))?;
                (p.alpha_d, p.beta_d)
            }
        };
        let p = SmearedActionParams::new(self.epsilon, self.dimension, self.length_ratio, alpha, beta)
            .map_err(|e| invalid("dimension", e))?;
        Ok(ActionKind::GeneralD(p))
    }

    pub fn rule_at(&self, temperature: f64) -> Result<AcceptanceRule, CliError> {
        match self.rule {
            RuleName::Uniform => Ok(AcceptanceRule::uniform_validity()),
            RuleName::Metropolis => Ok(AcceptanceRule::from_temperature(temperature, self.action_kind()?)?),
        }
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            steps: self.chain.steps,
            burn_in: self.chain.burn_in,
            thin: self.chain.thin,
            observable: None,
        }
    }

    /// Canonical TOML rendering, the input of the config hash.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Cardinality caps: the hard maximum, and the CI range unless `extended`.
    pub fn check_caps(&self, spectral: bool) -> Result<(), CliError> {
        for &n in &self.cardinalities {
            if n > self.max_cardinality {
                return Err(CliError::Resource(format!(
                    "n = {n} exceeds max_cardinality = {}",
                    self.max_cardinality
                )));
            }
            if spectral && n > CI_MAX_CARDINALITY && !self.extended {
                return Err(CliError::Resource(format!(
                    "n = {n} needs `extended = true` (default range ends at {CI_MAX_CARDINALITY})"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_strategy_block_takes_defaults() {
        let cfg = validate_config("experiment = \"sweep-t\"\nseed = 1\n[[strategies]]\nkind = \"quantum\"\n").unwrap();
        let s = &cfg.strategies[0];
        assert_eq!(s.r_tc, [0.7, 0.9]);
        assert_eq!(s.r_bd, [0.02, 0.05]);
        assert_eq!(s.steps, [3, 10]);
        assert_eq!(s.epsilon, 0.1);
        assert_eq!(cfg.rule, RuleName::Metropolis);
        assert_eq!(cfg.cardinalities, vec![5]);
        assert_eq!(cfg.temperatures, default_temperature_grid());
    }

    #[test]
    fn uniform_quantum_has_no_problem_term() {
        let cfg = validate_config("experiment = \"sweep-n\"\nseed = 1\n").unwrap();
        assert_eq!(cfg.strategies.len(), 4);
        assert_eq!(cfg.strategies[0].r_bd, [0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(validate_config("experiment = \"sample\"\nseed = 1\ntemperature = -0.1\n").is_err());
        assert!(validate_config("experiment = \"sample\"\n").is_err());
        assert!(validate_config("experiment = \"enumerate\"\nbogus = 1\n").is_err());
        assert!(validate_config("experiment = \"enumerate\"\ndimension = 3\n").is_err());
        assert!(validate_config("experiment = \"sample\"\nseed = 1\n[chain]\nsteps = 10\nburn_in = 10\n").is_err());
    }

    #[test]
    fn ranges_are_sorted() {
        let cfg = validate_config(
            "experiment = \"spectral-gap\"\nseed = 2\nrule = \"metropolis\"\n[[strategies]]\nkind = \"quantum\"\nr_bd = [0.05, 0.02]\n",
        )
        .unwrap();
        assert_eq!(cfg.strategies[0].r_bd, [0.02, 0.05]);
    }

    #[test]
    fn flags_win() {
        let file = RawConfig::parse("experiment = \"enumerate\"\nn = 3\n").unwrap();
        let flags = RawConfig {
            n: Some(4),
            ..RawConfig::default()
        };
        assert_eq!(file.overridden_by(flags).validate().unwrap().cardinalities, vec![4]);
    }
}
