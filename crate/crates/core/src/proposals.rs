//! Proposal strategies and their exact proposal kernels.
//!
//! Classical moves:
//!
//! * **relation**: flip one uniformly chosen relation bit; validity is left to
//!   the acceptance stage.
//! * **link**: pick a pair uniformly; remove it if it is a link, add it if it is
//!   unrelated and the addition keeps the set transitive, otherwise stay put.
//! * **classical-mixed**: relation move with probability `relation_weight`,
//!   link move otherwise.
//!
//! The quantum move prepares the basis state of the current set, evolves it
//! under the weighted Hamiltonian for a sampled `(r_TC, r_BD, t)` and measures.

use rand::Rng;
use rayon::prelude::*;

use crate::causet::{qubit_count, CausalMatrix, CausalSet, CausalSetSpace};
use crate::error::{usage, Error, Result};
use crate::pauli::{GammaConfig, HamiltonianParts, Normalization, PenaltyScale};
use crate::qsim::{basis_state, measure_distribution, sample_index, Propagator, MAX_QUBITS};

/// Closed interval a parameter is drawn from uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    /// Bounds are sorted, so `(0.05, 0.02)` and `(0.02, 0.05)` are the same range.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("range ({a}, {b}) is not finite")));
        }
        Ok(Self { lo: a.min(b), hi: a.max(b) })
    }

    pub fn fixed(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

/// Parameters of the quantum move.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumStrategy {
    pub r_tc: ParamRange,
    pub r_bd: ParamRange,
    /// Inclusive range of Trotter step counts.
    pub steps: (u32, u32),
    pub epsilon: f64,
    pub penalty: PenaltyScale,
    pub alpha_tc: Option<f64>,
    pub alpha_bd: Option<f64>,
}

impl QuantumStrategy {
    /// Uniform sampling defaults: no problem term.
    pub fn uniform() -> Self {
        Self {
            r_tc: ParamRange { lo: 0.7, hi: 0.9 },
            r_bd: ParamRange::fixed(0.0),
            steps: (3, 10),
            epsilon: crate::action::DEFAULT_EPSILON,
            penalty: PenaltyScale::default(),
            alpha_tc: None,
            alpha_bd: None,
        }
    }

    /// BD-weighted sampling defaults.
    pub fn weighted() -> Self {
        Self {
            r_bd: ParamRange { lo: 0.02, hi: 0.05 },
            ..Self::uniform()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("r_tc", self.r_tc), ("r_bd", self.r_bd)] {
            if r.lo < 0.0 || r.hi > 1.0 || r.lo > r.hi {
                return Err(Error::Config(format!("{name} range [{}, {}] outside [0, 1]", r.lo, r.hi)));
            }
        }
        if self.steps.0 > self.steps.1 {
            return Err(Error::Config(format!("empty step range {:?}", self.steps)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        Ok(())
    }

    pub fn normalization(&self, n: usize) -> Normalization {
        let d = Normalization::default_for(n, self.epsilon);
        Normalization {
            alpha_tc: self.alpha_tc.unwrap_or(d.alpha_tc),
            alpha_bd: self.alpha_bd.unwrap_or(d.alpha_bd),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterSample {
        let r_tc = self.r_tc.draw(rng);
        let r_bd = self.r_bd.draw(rng);
        let steps = rng.random_range(self.steps.0..=self.steps.1);
        ParameterSample {
            gamma: GammaConfig::new(r_tc, r_bd).expect("ranges validated inside [0, 1]"),
            steps,
        }
    }

    /// One shared list of parameter draws, reused for every source set.
    pub fn draw_samples<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<ParameterSample> {
        (0..count).map(|_| self.draw(rng)).collect()
    }
}

/// One `(γ, t)` draw of the quantum move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterSample {
    pub gamma: GammaConfig,
    pub steps: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProposalStrategy {
    Relation,
    Link,
    ClassicalMixed { relation_weight: f64 },
    Quantum(QuantumStrategy),
}

impl ProposalStrategy {
    pub fn classical_mixed() -> Self {
        Self::ClassicalMixed { relation_weight: 0.5 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Relation => "relation",
            Self::Link => "link",
            Self::ClassicalMixed { .. } => "classical-mixed",
            Self::Quantum(q) if q.r_bd.hi == 0.0 => "quantum-uniform",
            Self::Quantum(_) => "quantum",
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, Self::Quantum(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ClassicalMixed { relation_weight: w } if !(0.0..=1.0).contains(w) => {
                Err(Error::Config(format!("relation weight {w} outside [0, 1]")))
            }
            Self::Quantum(q) => q.validate(),
            _ => Ok(()),
        }
    }
}

/// Outcome of the link move on pair bit `k`.
fn link_move(s: &CausalSet, k: usize, i: usize, j: usize) -> CausalMatrix {
    if s.related(i, j) {
        if s.interval_cardinality(i, j) == 0 {
            return s.flipped(k);
        }
    } else {
        let added = s.flipped(k);
        if added.count_violations() == 0 {
            return added;
        }
    }
    s.matrix()
}

pub fn propose_relation<R: Rng + ?Sized>(s: &CausalSet, rng: &mut R) -> CausalMatrix {
    let q = s.qubits();
    if q == 0 {
        return s.matrix();
    }
    s.flipped(rng.random_range(0..q))
}

pub fn propose_link<R: Rng + ?Sized>(s: &CausalSet, rng: &mut R) -> CausalMatrix {
    let q = s.qubits();
    if q == 0 {
        return s.matrix();
    }
    let k = rng.random_range(0..q);
    let (i, j) = crate::causet::pairs(s.n()).nth(k).expect("k < q");
    link_move(s, k, i, j)
}

pub fn propose_classical_mixed<R: Rng + ?Sized>(s: &CausalSet, relation_weight: f64, rng: &mut R) -> CausalMatrix {
    if rng.random::<f64>() < relation_weight {
        propose_relation(s, rng)
    } else {
        propose_link(s, rng)
    }
}

/// Quantum move machinery for one cardinality: the component diagonals are
/// computed once and recombined per parameter sample.
#[derive(Clone, Debug)]
pub struct QuantumProposer {
    n: usize,
    strategy: QuantumStrategy,
    norm: Normalization,
    diag_tc: Vec<f64>,
    diag_bd: Vec<f64>,
}

impl QuantumProposer {
    pub fn new(n: usize, strategy: &QuantumStrategy) -> Result<Self> {
        strategy.validate()?;
        let q = qubit_count(n);
        if q > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{q} qubits for n = {n} exceed the cap of {MAX_QUBITS}"
            )));
        }
        if n < 3 {
            return Err(usage!("quantum proposals need n >= 3"));
        }
        let parts = HamiltonianParts::build(n, strategy.epsilon, strategy.penalty)?;
        Ok(Self {
            n,
            strategy: strategy.clone(),
            norm: strategy.normalization(n),
            diag_tc: parts.h_tc.diagonal_vector(),
            diag_bd: parts.h_bd.diagonal_vector(),
        })
    }

    pub fn strategy(&self) -> &QuantumStrategy {
        &self.strategy
    }

    /// Unit-time Trotter step of `γ_TC α_TC H_TC + γ_BD α_BD H_BD + γ_mix H_mix`.
    pub fn propagator(&self, gamma: &GammaConfig) -> Propagator {
        let wt = gamma.gamma_tc() * self.norm.alpha_tc;
        let wb = gamma.gamma_bd() * self.norm.alpha_bd;
        let diag: Vec<f64> = self
            .diag_tc
            .iter()
            .zip(&self.diag_bd)
            .map(|(a, b)| wt * a + wb * b)
            .collect();
        let q = qubit_count(self.n);
        let mixers: Vec<(usize, f64)> = (0..q).map(|k| (k, gamma.gamma_mix())).collect();
        Propagator::from_parts(q, &diag, &mixers, 1.0)
    }

    /// Outcome distribution over all `2^q` configurations for one draw.
    pub fn distribution_with(&self, prop: &Propagator, s: &CausalMatrix, steps: u32) -> Result<Vec<f64>> {
        let mut state = basis_state(s)?;
        prop.apply(&mut state, steps)?;
        Ok(measure_distribution(&state))
    }

    pub fn distribution(&self, s: &CausalMatrix, sample: &ParameterSample) -> Result<Vec<f64>> {
        self.distribution_with(&self.propagator(&sample.gamma), s, sample.steps)
    }

    pub fn propose<R: Rng + ?Sized>(&self, s: &CausalSet, rng: &mut R) -> Result<CausalMatrix> {
        let sample = self.strategy.draw(rng);
        let probs = self.distribution(s, &sample)?;
        CausalMatrix::from_bits(self.n, sample_index(&probs, rng) as u64)
    }
}

pub fn propose_quantum<R: Rng + ?Sized>(s: &CausalSet, strategy: &QuantumStrategy, rng: &mut R) -> Result<CausalMatrix> {
    QuantumProposer::new(s.n(), strategy)?.propose(s, rng)
}

/// A strategy bound to one cardinality, ready to drive a chain.
#[derive(Clone, Debug)]
pub enum Proposer {
    Relation,
    Link,
    ClassicalMixed { relation_weight: f64 },
    Quantum(Box<QuantumProposer>),
}

impl Proposer {
    pub fn new(strategy: &ProposalStrategy, n: usize) -> Result<Self> {
        strategy.validate()?;
        Ok(match strategy {
            ProposalStrategy::Relation => Self::Relation,
            ProposalStrategy::Link => Self::Link,
            ProposalStrategy::ClassicalMixed { relation_weight } => Self::ClassicalMixed {
                relation_weight: *relation_weight,
            },
            ProposalStrategy::Quantum(q) => Self::Quantum(Box::new(QuantumProposer::new(n, q)?)),
        })
    }

    pub fn propose<R: Rng + ?Sized>(&self, s: &CausalSet, rng: &mut R) -> Result<CausalMatrix> {
        Ok(match self {
            Self::Relation => propose_relation(s, rng),
            Self::Link => propose_link(s, rng),
            Self::ClassicalMixed { relation_weight } => propose_classical_mixed(s, *relation_weight, rng),
            Self::Quantum(p) => p.propose(s, rng)?,
        })
    }
}

fn relation_distribution(s: &CausalMatrix) -> Vec<f64> {
    let q = s.qubits();
    let mut d = vec![0.0; 1 << q];
    for k in 0..q {
        d[s.flipped(k).bits() as usize] += 1.0 / q as f64;
    }
    d
}

fn link_distribution(s: &CausalSet) -> Vec<f64> {
    let q = s.qubits();
    let mut d = vec![0.0; 1 << q];
    for (k, (i, j)) in crate::causet::pairs(s.n()).enumerate() {
        d[link_move(s, k, i, j).bits() as usize] += 1.0 / q as f64;
    }
    d
}

/// Exact proposal distribution over all `2^q` configurations.
///
/// Classical strategies ignore `sample`; the quantum strategy requires one.
pub fn proposal_distribution(s: &CausalSet, strategy: &ProposalStrategy, sample: Option<&ParameterSample>) -> Result<Vec<f64>> {
    if s.qubits() > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("{} qubits exceed the cap", s.qubits())));
    }
    if s.qubits() == 0 {
        return Ok(vec![1.0]);
    }
    Ok(match strategy {
        ProposalStrategy::Relation => relation_distribution(s),
        ProposalStrategy::Link => link_distribution(s),
        ProposalStrategy::ClassicalMixed { relation_weight: w } => relation_distribution(s)
            .into_iter()
            .zip(link_distribution(s))
            .map(|(r, l)| w * r + (1.0 - w) * l)
            .collect(),
        ProposalStrategy::Quantum(q) => {
            let sample = sample.ok_or_else(|| usage!("quantum proposal distribution needs a parameter sample"))?;
            QuantumProposer::new(s.n(), q)?.distribution(s, sample)?
        }
    })
}

/// Proposal mass between valid causal sets, `mass[a * order + b]`.
///
/// Mass proposed to non-causal configurations is dropped, so rows sum to at
/// most one; the acceptance stage turns the deficit into self-transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct ProposalKernel {
    order: usize,
    mass: Vec<f64>,
}

impl ProposalKernel {
    pub fn from_rows(order: usize, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != order * order {
            return Err(usage!("kernel of order {order} needs {} entries", order * order));
        }
        Ok(Self { order, mass })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.mass[a * self.order + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.mass[a * self.order..(a + 1) * self.order]
    }

    /// Entrywise mean of equally weighted kernels, accumulated as offsets from
    /// the first kernel so identical inputs average to themselves exactly.
    pub fn average(kernels: &[&ProposalKernel]) -> Result<Self> {
        let first = kernels.first().ok_or_else(|| usage!("averaging zero kernels"))?;
        let order = first.order;
        if kernels.iter().any(|k| k.order != order) {
            return Err(usage!("averaging kernels of different order"));
        }
        let w = 1.0 / kernels.len() as f64;
        let mut offset = vec![0.0; order * order];
        for k in &kernels[1..] {
            for ((o, x), f) in offset.iter_mut().zip(&k.mass).zip(&first.mass) {
                *o += x - f;
            }
        }
        let mass = first.mass.iter().zip(offset).map(|(f, o)| f + o * w).collect();
        Ok(Self { order, mass })
    }

    /// Largest `|K(a,b) − K(b,a)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.order {
            for b in a + 1..self.order {
                worst = worst.max((self.get(a, b) - self.get(b, a)).abs());
            }
        }
        worst
    }
}

fn restrict(space: &CausalSetSpace, full: &[f64], row: &mut [f64]) {
    for (b, s) in space.sets().iter().enumerate() {
        row[b] = full[s.bits() as usize];
    }
}

/// Exact kernel of a classical strategy, or of the quantum strategy at one
/// parameter sample.
pub fn proposal_kernel(space: &CausalSetSpace, strategy: &ProposalStrategy, sample: Option<&ParameterSample>) -> Result<ProposalKernel> {
    let order = space.len();
    let mut mass = vec![0.0; order * order];
    match strategy {
        ProposalStrategy::Quantum(q) => {
            let sample = sample.ok_or_else(|| usage!("quantum kernel needs a parameter sample"))?;
            let proposer = QuantumProposer::new(space.n(), q)?;
            let prop = proposer.propagator(&sample.gamma);
            mass.par_chunks_mut(order)
                .zip(space.sets().par_iter())
                .try_for_each(|(row, s)| -> Result<()> {
                    let full = proposer.distribution_with(&prop, s, sample.steps)?;
                    restrict(space, &full, row);
                    Ok(())
                })?;
        }
        _ => {
            mass.par_chunks_mut(order)
                .zip(space.sets().par_iter())
                .try_for_each(|(row, s)| -> Result<()> {
                    let full = proposal_distribution(s, strategy, None)?;
                    restrict(space, &full, row);
                    Ok(())
                })?;
        }
    }
    ProposalKernel::from_rows(order, mass)
}

/// Per-sample kernels of a quantum strategy (one entry for classical ones).
pub fn sampled_kernels(space: &CausalSetSpace, strategy: &ProposalStrategy, samples: &[ParameterSample]) -> Result<Vec<ProposalKernel>> {
    if strategy.is_quantum() {
        if samples.is_empty() {
            return Err(usage!("quantum kernels need at least one parameter sample"));
        }
        samples
            .iter()
            .map(|s| proposal_kernel(space, strategy, Some(s)))
            .collect()
    } else {
        Ok(vec![proposal_kernel(space, strategy, None)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(s: &str) -> CausalSet {
        s.parse().unwrap()
    }

    #[test]
    fn relation_move_examples() {
        let anti = set("2:0");
        let d = proposal_distribution(&anti, &ProposalStrategy::Relation, None).unwrap();
        assert_eq!(d, vec![0.0, 1.0]);
        let chain = set("3:111");
        let d = proposal_distribution(&chain, &ProposalStrategy::Relation, None).unwrap();
        for (idx, p) in d.iter().enumerate() {
            let hd = (idx as u64 ^ chain.bits()).count_ones();
            assert_eq!(*p, if hd == 1 { 1.0 / 3.0 } else { 0.0 });
        }
        // Bits are (1,2), (1,3), (2,3).
        let raw: CausalMatrix = "3:101".parse().unwrap();
        assert_eq!(raw.flipped(1).count_violations(), 0);
        assert_eq!(chain.flipped(1).count_violations(), 1);
        assert_eq!(chain.flipped(0).count_violations(), 0);
    }

    #[test]
    fn link_move_examples() {
        let d = proposal_distribution(&set("2:1"), &ProposalStrategy::Link, None).unwrap();
        assert_eq!(d, vec![1.0, 0.0]);
        // 3-chain: (1,2), (2,3) are links, (1,3) is not.
        let chain = set("3:111");
        let d = proposal_distribution(&chain, &ProposalStrategy::Link, None).unwrap();
        assert!((d[0b111] - 1.0 / 3.0).abs() < 1e-15);
        assert!((d[0b110] - 1.0 / 3.0).abs() < 1e-15);
        assert!((d[0b011] - 1.0 / 3.0).abs() < 1e-15);
        let anti = set("3:000");
        let d = proposal_distribution(&anti, &ProposalStrategy::Link, None).unwrap();
        for idx in [0b001, 0b010, 0b100] {
            assert!((d[idx] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn mixed_is_mixture() {
        let s = set("4:110100");
        let r = proposal_distribution(&s, &ProposalStrategy::Relation, None).unwrap();
        let l = proposal_distribution(&s, &ProposalStrategy::Link, None).unwrap();
        let m = proposal_distribution(&s, &ProposalStrategy::classical_mixed(), None).unwrap();
        for i in 0..m.len() {
            assert!((m[i] - 0.5 * (r[i] + l[i])).abs() < 1e-15);
        }
        assert_eq!(r[s.bits() as usize], 0.0);
        assert!((m[s.bits() as usize] - 0.5 * l[s.bits() as usize]).abs() < 1e-15);
        let d = proposal_distribution(&set("2:0"), &ProposalStrategy::classical_mixed(), None).unwrap();
        assert_eq!(d, vec![0.0, 1.0]);
    }

    #[test]
    fn sampled_moves_follow_distributions() {
        let s = set("3:000");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = propose_link(&s, &mut rng);
            assert_eq!(m.relation_count(), 1);
            let m = propose_relation(&s, &mut rng);
            assert_eq!(m.relation_count(), 1);
        }
    }

    #[test]
    fn quantum_zero_steps_and_normalisation() {
        let mut strat = QuantumStrategy::weighted();
        strat.steps = (0, 0);
        let s = set("4:110100");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert_eq!(propose_quantum(&s, &strat, &mut rng).unwrap(), s.matrix());
        }
        let sample = QuantumStrategy::weighted().draw(&mut rng);
        let d = proposal_distribution(&s, &ProposalStrategy::Quantum(QuantumStrategy::weighted()), Some(&sample))
            .unwrap();
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(proposal_distribution(&s, &ProposalStrategy::Quantum(QuantumStrategy::weighted()), None).is_err());
    }

    #[test]
    fn quantum_pure_mixer_flip_probability() {
        // r_tc = r_bd = 0, one step: independent X rotations by γ_mix = 1.
        let strat = QuantumStrategy {
            r_tc: ParamRange::fixed(0.0),
            r_bd: ParamRange::fixed(0.0),
            steps: (1, 1),
            ..QuantumStrategy::uniform()
        };
        let proposer = QuantumProposer::new(3, &strat).unwrap();
        let s = set("3:000");
        let sample = ParameterSample {
            gamma: GammaConfig::new(0.0, 0.0).unwrap(),
            steps: 1,
        };
        let d = proposer.distribution(&s, &sample).unwrap();
        let p = 1f64.sin().powi(2);
        for k in 0..3 {
            let marginal: f64 = d.iter().enumerate().filter(|(i, _)| i >> k & 1 == 1).map(|(_, p)| p).sum();
            assert!((marginal - p).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_puts_mass_on_invalid_configurations() {
        let strat = QuantumStrategy::uniform();
        let space = CausalSetSpace::new(3).unwrap();
        let sample = ParameterSample {
            gamma: GammaConfig::new(0.7, 0.0).unwrap(),
            steps: 5,
        };
        let k = proposal_kernel(&space, &ProposalStrategy::Quantum(strat), Some(&sample)).unwrap();
        let deficit: f64 = (0..k.order()).map(|a| 1.0 - k.row(a).iter().sum::<f64>()).sum();
        assert!(deficit > 1e-6);
    }

    #[test]
    fn classical_kernels_are_symmetric() {
        let space = CausalSetSpace::new(4).unwrap();
        for strat in [ProposalStrategy::Relation, ProposalStrategy::Link, ProposalStrategy::classical_mixed()] {
            let k = proposal_kernel(&space, &strat, None).unwrap();
            assert!(k.max_asymmetry() < 1e-15, "{}", strat.name());
        }
    }

    #[test]
    fn range_sorting() {
        let r = ParamRange::new(0.05, 0.02).unwrap();
        assert_eq!((r.lo, r.hi), (0.02, 0.05));
        let mut bad = QuantumStrategy::weighted();
        bad.r_tc = ParamRange::new(0.5, 1.5).unwrap();
        assert!(bad.validate().is_err());
    }
}
