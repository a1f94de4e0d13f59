//! Exact transition matrices over enumerated causal sets, absolute spectral
//! gaps, thermalization-time bounds, jackknife errors and exponential fits.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::causet::CausalSetSpace;
use crate::error::{usage, Error, Result};
use crate::mcmc::{stationary_distribution, AcceptanceRule};
use crate::proposals::{sampled_kernels, ParameterSample, ProposalKernel, ProposalStrategy};

/// Row tolerance for stochasticity.
pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Tolerance for detailed balance and stationarity.
pub const BALANCE_TOL: f64 = 1e-9;

/// Row-stochastic matrix over the sets of a [`CausalSetSpace`], in
/// enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    entries: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(usage!("transition matrix must be square"));
        }
        let t = Self { entries };
        t.check_stochastic()?;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[(a, b)]
    }

    pub fn check_stochastic(&self) -> Result<()> {
        for (a, row) in self.entries.row_iter().enumerate() {
            if let Some(x) = row.iter().find(|x| !(**x >= -STOCHASTIC_TOL)) {
                return Err(usage!("row {a} has negative entry {x}"));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(usage!("row {a} sums to {s}"));
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| (self.get(a, b) - self.get(b, a)).abs() <= tol))
    }

    /// `max |ν(a)T(a,b) − ν(b)T(b,a)|`.
    pub fn detailed_balance_residual(&self, nu: &[f64]) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                worst = worst.max((nu[a] * self.get(a, b) - nu[b] * self.get(b, a)).abs());
            }
        }
        worst
    }

    /// `max |(νᵀT)_b − ν_b|`.
    pub fn stationarity_residual(&self, nu: &[f64]) -> f64 {
        let n = self.order();
        (0..n)
            .map(|b| ((0..n).map(|a| nu[a] * self.get(a, b)).sum::<f64>() - nu[b]).abs())
            .fold(0.0, f64::max)
    }
}

/// Probability of accepting each off-diagonal move, `acc[a * order + b]`.
fn acceptance_matrix(space: &CausalSetSpace, rule: &AcceptanceRule) -> Vec<f64> {
    let order = space.len();
    let sets = space.sets();
    let mut acc = vec![0.0; order * order];
    for a in 0..order {
        for b in 0..order {
            if a != b {
                acc[a * order + b] = rule.acceptance_probability(&sets[a], &sets[b]);
            }
        }
    }
    acc
}

fn transition_with_acceptance(kernel: &ProposalKernel, acc: &[f64]) -> Result<TransitionMatrix> {
    let order = kernel.order();
    let mut m = DMatrix::zeros(order, order);
    for a in 0..order {
        let mut off = 0.0;
        for b in 0..order {
            if a != b {
                let p = kernel.get(a, b) * acc[a * order + b];
                m[(a, b)] = p;
                off += p;
            }
        }
        // invalid proposals, rejections and self-proposals stay put
        m[(a, a)] = 1.0 - off;
    }
    TransitionMatrix::new(m)
}

/// Applies `rule` to a proposal kernel; the diagonal absorbs all mass that
/// does not move.
pub fn transition_from_kernel(space: &CausalSetSpace, kernel: &ProposalKernel, rule: &AcceptanceRule) -> Result<TransitionMatrix> {
    if kernel.order() != space.len() {
        return Err(usage!("kernel order {} does not match {} sets", kernel.order(), space.len()));
    }
    transition_with_acceptance(kernel, &acceptance_matrix(space, rule))
}

/// Transition matrix of `strategy` under `rule`; quantum kernels are averaged
/// over the shared parameter samples.
pub fn build_transition_matrix(
    space: &CausalSetSpace,
    strategy: &ProposalStrategy,
    rule: &AcceptanceRule,
    samples: &[ParameterSample],
) -> Result<TransitionMatrix> {
    let kernels = sampled_kernels(space, strategy, samples)?;
    let refs: Vec<&ProposalKernel> = kernels.iter().collect();
    transition_from_kernel(space, &ProposalKernel::average(&refs)?, rule)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapResult {
    pub delta: f64,
    /// Jackknife standard error, 0 for exact kernels.
    pub error: f64,
}

impl GapResult {
    pub fn exact(delta: f64) -> Self {
        Self { delta, error: 0.0 }
    }
}

/// Eigenvalues of a reversible chain, largest first.
///
/// Uses the symmetric matrix `S(a,b) = sqrt(T(a,b) T(b,a))`, which equals
/// `D^{1/2} T D^{−1/2}` when detailed balance holds and stays finite when
/// some `ν(a)` underflow.
pub fn reversible_spectrum(t: &TransitionMatrix) -> Vec<f64> {
    let n = t.order();
    let s = DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            t.get(a, a)
        } else {
            (t.get(a, b) * t.get(b, a)).max(0.0).sqrt()
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Absolute spectral gap `1 − max |λ|` over all eigenvalues but the unit one.
///
/// Fails if `t` is not stochastic or not reversible with respect to `stationary`.
pub fn spectral_gap(t: &TransitionMatrix, stationary: &[f64]) -> Result<GapResult> {
    t.check_stochastic()?;
    if stationary.len() != t.order() {
        return Err(usage!("stationary law has {} entries for order {}", stationary.len(), t.order()));
    }
    let db = t.detailed_balance_residual(stationary);
    if db > BALANCE_TOL {
        return Err(Error::Verification(format!("detailed balance residual {db:e}")));
    }
    Ok(GapResult::exact(absolute_gap(&reversible_spectrum(t))))
}

fn absolute_gap(spectrum: &[f64]) -> f64 {
    let rest = spectrum.iter().skip(1).map(|l| l.abs()).fold(0.0, f64::max);
    (1.0 - rest).clamp(0.0, 1.0)
}

/// Lower and upper bounds on the thermalization time `τ_α`:
/// `(1/δ − 1) ln(1/(2α)) ≤ τ_α ≤ (1/δ) ln(1/(α min ν))`.
pub fn thermalization_bounds(delta: f64, alpha: f64, min_nu: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(usage!("gap {delta} outside (0, 1]"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage!("distance {alpha} outside (0, 1)"));
    }
    if !(min_nu > 0.0 && min_nu <= 1.0) {
        return Err(usage!("minimum probability {min_nu} outside (0, 1]"));
    }
    let lower = (1.0 / delta - 1.0) * (1.0 / (2.0 * alpha)).ln();
    let upper = (1.0 / alpha / min_nu).ln() / delta;
    Ok((lower, upper))
}

#[derive(Clone, Debug, PartialEq)]
pub struct JackknifeGap {
    /// Gap of the kernel averaged over every sample.
    pub full: f64,
    /// Mean of the leave-one-out gaps.
    pub mean: f64,
    pub error: f64,
    pub leave_one_out: Vec<f64>,
}

impl JackknifeGap {
    pub fn result(&self) -> GapResult {
        GapResult {
            delta: self.full,
            error: self.error,
        }
    }
}

/// `sqrt((n−1)/n · Σ (θ_i − θ̄)²)`.
pub fn jackknife_error(leave_one_out: &[f64]) -> f64 {
    let n = leave_one_out.len() as f64;
    let mean = leave_one_out.iter().sum::<f64>() / n;
    ((n - 1.0) / n * leave_one_out.iter().map(|x| (x - mean).powi(2)).sum::<f64>()).sqrt()
}

/// Leave-one-out spectral gaps over per-sample proposal kernels.
pub fn jackknife_gap(space: &CausalSetSpace, kernels: &[ProposalKernel], rule: &AcceptanceRule) -> Result<JackknifeGap> {
    let n = kernels.len();
    if n < 2 {
        return Err(usage!("jackknife needs at least 2 samples, got {n}"));
    }
    let nu = stationary_distribution(space, rule);
    let acc = acceptance_matrix(space, rule);
    let refs: Vec<&ProposalKernel> = kernels.iter().collect();
    let all = ProposalKernel::average(&refs)?;
    let full = spectral_gap(&transition_with_acceptance(&all, &acc)?, &nu)?.delta;
    let mut loo = Vec::with_capacity(n);
    for i in 0..n {
        let rest: Vec<&ProposalKernel> = refs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, k)| *k).collect();
        let k = ProposalKernel::average(&rest)?;
        loo.push(spectral_gap(&transition_with_acceptance(&k, &acc)?, &nu)?.delta);
    }
    Ok(JackknifeGap {
        full,
        mean: loo.iter().sum::<f64>() / n as f64,
        error: jackknife_error(&loo),
        leave_one_out: loo,
    })
}

/// Gap of `strategy` under `rule` at the cardinality of `space`. Quantum
/// strategies draw `n_samples` shared parameter samples and report a
/// jackknife error; classical kernels are exact.
pub fn strategy_gap<R: Rng + ?Sized>(
    space: &CausalSetSpace,
    strategy: &ProposalStrategy,
    rule: &AcceptanceRule,
    n_samples: usize,
    rng: &mut R,
) -> Result<GapResult> {
    match strategy {
        ProposalStrategy::Quantum(q) => {
            let samples = q.draw_samples(n_samples, rng);
            let kernels = sampled_kernels(space, strategy, &samples)?;
            if kernels.len() == 1 {
                let t = transition_from_kernel(space, &kernels[0], rule)?;
                return spectral_gap(&t, &stationary_distribution(space, rule));
            }
            Ok(jackknife_gap(space, &kernels, rule)?.result())
        }
        _ => {
            let t = build_transition_matrix(space, strategy, rule, &[])?;
            spectral_gap(&t, &stationary_distribution(space, rule))
        }
    }
}

/// Least-squares fit of `ln δ = c − k N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub k: f64,
    pub k_error: f64,
    pub intercept: f64,
    /// Points that entered the fit.
    pub gaps: Vec<(usize, GapResult)>,
}

pub fn fit_scaling(points: &[(usize, GapResult)]) -> Result<ScalingFit> {
    let used: Vec<(usize, GapResult)> = points
        .iter()
        .filter(|(n, g)| {
            let ok = g.delta > 0.0;
            if !ok {
                log::warn!("excluding n = {n} from the fit: gap {}", g.delta);
            }
            ok
        })
        .copied()
        .collect();
    if used.len() < 3 {
        return Err(usage!("scaling fit needs at least 3 positive gaps, got {}", used.len()));
    }
    let m = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|(_, g)| g.delta.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(usage!("scaling fit needs distinct cardinalities"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(ScalingFit {
        k: -slope,
        k_error: (ssr / (m - 2.0) / sxx).sqrt(),
        intercept,
        gaps: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionKind;
    use crate::proposals::QuantumStrategy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn n2_relation_chain_is_periodic() {
        let space = CausalSetSpace::new(2).unwrap();
        let rule = AcceptanceRule::uniform_validity();
        let t = build_transition_matrix(&space, &ProposalStrategy::Relation, &rule, &[]).unwrap();
        assert_eq!(t.entries(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(spectral_gap(&t, &[0.5, 0.5]).unwrap().delta, 0.0);
    }

    #[test]
    fn two_state_gap() {
        for p in [0.1, 0.3, 0.5, 0.8] {
            let t = TransitionMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0 - p, p, p, 1.0 - p])).unwrap();
            let g = spectral_gap(&t, &[0.5, 0.5]).unwrap().delta;
            assert!((g - (1.0 - (1.0 - 2.0 * p as f64).abs())).abs() < 1e-12);
        }
        let id = TransitionMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(spectral_gap(&id, &[1.0 / 3.0; 3]).unwrap().delta, 0.0);
    }

    #[test]
    fn rejects_non_stochastic_and_irreversible() {
        assert!(TransitionMatrix::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.4, 0.5, 0.5])).is_err());
        let t = TransitionMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        ))
        .unwrap();
        assert!(matches!(spectral_gap(&t, &[1.0 / 3.0; 3]), Err(Error::Verification(_))));
    }

    #[test]
    fn classical_uniform_kernels_are_symmetric() {
        let space = CausalSetSpace::new(4).unwrap();
        let rule = AcceptanceRule::uniform_validity();
        for s in [ProposalStrategy::Relation, ProposalStrategy::Link, ProposalStrategy::classical_mixed()] {
            let t = build_transition_matrix(&space, &s, &rule, &[]).unwrap();
            assert!(t.is_symmetric(1e-15));
        }
    }

    #[test]
    fn metropolis_kernels_balance() {
        let space = CausalSetSpace::new(4).unwrap();
        let rule = AcceptanceRule::from_temperature(0.004, ActionKind::default()).unwrap();
        let nu = stationary_distribution(&space, &rule);
        let t = build_transition_matrix(&space, &ProposalStrategy::classical_mixed(), &rule, &[]).unwrap();
        assert!(t.detailed_balance_residual(&nu) < 1e-12);
        assert!(t.stationarity_residual(&nu) < 1e-12);
    }

    #[test]
    fn bounds_arithmetic() {
        let (lo, hi) = thermalization_bounds(0.5, 0.01, 1.0 / 7.0).unwrap();
        assert!((lo - 50f64.ln()).abs() < 1e-12);
        assert!((hi - 2.0 * 700f64.ln()).abs() < 1e-12);
        assert_eq!(thermalization_bounds(1.0, 0.2, 0.5).unwrap().0, 0.0);
        assert!(thermalization_bounds(0.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn jackknife_of_identical_samples() {
        let space = CausalSetSpace::new(3).unwrap();
        let strat = ProposalStrategy::Quantum(QuantumStrategy::uniform());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = QuantumStrategy::uniform().draw(&mut rng);
        let kernels = sampled_kernels(&space, &strat, &[s; 4]).unwrap();
        let jk = jackknife_gap(&space, &kernels, &AcceptanceRule::uniform_validity()).unwrap();
        assert_eq!(jk.error, 0.0);
        assert_eq!(jk.leave_one_out.len(), 4);
        assert!(jackknife_gap(&space, &kernels[..1], &AcceptanceRule::uniform_validity()).is_err());
    }

    #[test]
    fn exact_exponential_fit() {
        let pts: Vec<(usize, GapResult)> = (3..=7).map(|n| (n, GapResult::exact((-0.5 * n as f64).exp()))).collect();
        let fit = fit_scaling(&pts).unwrap();
        assert!((fit.k - 0.5).abs() < 1e-12);
        assert!(fit.k_error < 1e-12);
        let flat: Vec<(usize, GapResult)> = (3..=5).map(|n| (n, GapResult::exact(0.3))).collect();
        assert!(fit_scaling(&flat).unwrap().k.abs() < 1e-15);
        let mut two = pts[..3].to_vec();
        two[0].1.delta = 0.0;
        assert!(fit_scaling(&two).is_err());
    }
}
