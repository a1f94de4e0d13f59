use std::path::PathBuf;
use std::process::ExitCode;

use causet_cli::config::{ExperimentKind, RawChain, RawConfig, RawStrategy, RuleName, StrategyKind};
use causet_cli::{run_experiment, CliError};
use clap::{Args, Parser, Subcommand};

/// Causal-set sampling experiments: enumeration, actions, MCMC chains,
/// spectral gaps and exact-encoding checks.
#[derive(Parser, Debug)]
#[command(name = "causet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every causal set of the given cardinalities.
    Enumerate(Overrides),
    /// Action and truncation error of the given sets (or all sets of size n).
    Action {
        /// Sets in `N:bits` form.
        sets: Vec<String>,
        /// File with one set per line.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Overrides,
    },
    /// Run Markov chains and write their traces.
    Sample(Overrides),
    /// Spectral gap per strategy, cardinality and temperature.
    SpectralGap(Overrides),
    /// Gap against cardinality plus the fitted decay exponent.
    SweepN(Overrides),
    /// Gap against temperature at fixed cardinality.
    SweepT(Overrides),
    /// Check the exact 2d encoding and report qubit counts.
    ExactbdVerify(Overrides),
    /// Run whatever experiment the config file names.
    Run(Overrides),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// TOML config file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, short)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    cardinalities: Option<Vec<usize>>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    temperatures: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    /// Replaces the strategy list; repeat or comma-separate.
    #[arg(long, value_enum, value_delimiter = ',')]
    strategy: Option<Vec<StrategyArg>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    dimension: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    /// Allow spectral experiments beyond n = 5.
    #[arg(long)]
    extended: bool,
    #[arg(long)]
    max_cardinality: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Chain length for `sample`.
    #[arg(long)]
    steps: Option<u64>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum RuleArg {
    Uniform,
    Metropolis,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Relation,
    Link,
    ClassicalMixed,
    Quantum,
}

impl Overrides {
    fn into_raw(self, experiment: Option<ExperimentKind>) -> Result<RawConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                RawConfig::parse(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
            }
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            experiment,
            seed: self.seed,
            output: self.output,
            n: self.n,
            cardinalities: self.cardinalities,
            temperature: self.temperature,
            temperatures: self.temperatures,
            rule: self.rule.map(|r| match r {
                RuleArg::Uniform => RuleName::Uniform,
                RuleArg::Metropolis => RuleName::Metropolis,
            }),
            dimension: self.dimension,
            epsilon: self.epsilon,
            max_cardinality: self.max_cardinality,
            extended: self.extended.then_some(true),
            parameter_samples: self.samples,
            lambda: self.lambda,
            strategies: self.strategy.map(|v| {
                v.into_iter()
                    .map(|s| RawStrategy {
                        kind: Some(match s {
                            StrategyArg::Relation => StrategyKind::Relation,
                            StrategyArg::Link => StrategyKind::Link,
                            StrategyArg::ClassicalMixed => StrategyKind::ClassicalMixed,
                            StrategyArg::Quantum => StrategyKind::Quantum,
                        }),
                        ..RawStrategy::default()
                    })
                    .collect()
            }),
            chain: self.steps.map(|steps| RawChain {
                steps: Some(steps),
                ..file.chain.clone().unwrap_or_default()
            }),
            ..RawConfig::default()
        };
        Ok(file.overridden_by(flags))
    }
}

fn raw_config(command: Command) -> Result<RawConfig, CliError> {
    let (kind, common) = match command {
        Command::Enumerate(c) => (Some(ExperimentKind::Enumerate), c),
        Command::Sample(c) => (Some(ExperimentKind::Sample), c),
        Command::SpectralGap(c) => (Some(ExperimentKind::SpectralGap), c),
        Command::SweepN(c) => (Some(ExperimentKind::SweepN), c),
        Command::SweepT(c) => (Some(ExperimentKind::SweepT), c),
        Command::ExactbdVerify(c) => (Some(ExperimentKind::ExactbdVerify), c),
        Command::Run(c) => {
            if c.config.is_none() {
                return Err(CliError::Validation("`run` needs --config".into()));
            }
            (None, c)
        }
        Command::Action { sets, input, common } => {
            let mut all = sets;
            if let Some(path) = input {
                let text = std::fs::read_to_string(&path)?;
                all.extend(
                    text.lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(String::from),
                );
            }
            let mut raw = common.into_raw(Some(ExperimentKind::Action))?;
            if !all.is_empty() {
                raw.sets = Some(all);
            }
            return Ok(raw);
        }
    };
    common.into_raw(kind)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = raw_config(cli.command)?.validate()?;
    let report = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    match report.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("causet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
