//! Benincasa–Dowker actions.
//!
//! Three families are provided:
//!
//! * the smeared 4d action `S_ε = (4/√6) √ε [N − ε Σ_j f4(j, ε) N_j]`, exact in ε;
//! * its O(ε) truncation, which is the classical value of the qubit
//!   Hamiltonian built in [`crate::pauli::build_h_bd`];
//! * a general-dimension action, to first order in ε, for user-supplied
//!   dimension constants;
//!
//! plus the non-smeared (ε = 1) 2d action `2(N − 2 N_0 + 4 N_1 − 2 N_2)`, with
//! abundances indexed by interval size (`N_0` counts links).

use crate::causet::{AbundanceVector, CausalMatrix, CausalSet};
use crate::error::{Error, Result};

/// Default smearing parameter.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// `4/√6`, the 4d prefactor.
pub fn prefactor_4d() -> f64 {
    4.0 / 6f64.sqrt()
}

/// Constants of the smeared action in dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmearedActionParams {
    pub epsilon: f64,
    pub dimension: u32,
    /// `ℓ_c / ℓ_p`.
    pub length_ratio: f64,
    pub alpha_d: f64,
    pub beta_d: f64,
    /// Second smearing coefficient `C_2^(d)`.
    pub c2_d: f64,
}

impl SmearedActionParams {
    /// Constants that reproduce the 4d action at `ℓ_c = ℓ_p`.
    pub fn four_dimensional(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 4, 1.0, -prefactor_4d(), prefactor_4d())
    }

    /// General dimension with explicit `α_d`, `β_d`; `C_2^(d)` follows from `d`.
    pub fn new(epsilon: f64, dimension: u32, length_ratio: f64, alpha_d: f64, beta_d: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon {epsilon} outside (0, 1]")));
        }
        if dimension < 2 {
            return Err(Error::Config(format!("dimension {dimension} < 2")));
        }
        if !alpha_d.is_finite() || alpha_d == 0.0 || !beta_d.is_finite() {
            return Err(Error::Config(format!(
                "dimension constants alpha_d = {alpha_d}, beta_d = {beta_d} are unusable"
            )));
        }
        if !(length_ratio > 0.0 && length_ratio.is_finite()) {
            return Err(Error::Config(format!("length ratio {length_ratio} must be positive")));
        }
        Ok(Self {
            epsilon,
            dimension,
            length_ratio,
            alpha_d,
            beta_d,
            c2_d: c2_d(dimension),
        })
    }

    /// Prefactor `−α_d (ℓ_c/ℓ_p)^{d−2} ε^{2/d}`.
    fn scale(&self) -> f64 {
        let d = f64::from(self.dimension);
        -self.alpha_d * self.length_ratio.powf(d - 2.0) * self.epsilon.powf(2.0 / d)
    }
}

/// Smearing function of the 4d action.
///
/// Written with non-negative powers of `1 − ε` so that ε = 1 evaluates to the
/// limit (1, −9, 16, −8, 0, ..) without dividing by zero.
pub fn f4(j: u32, epsilon: f64) -> f64 {
    let jf = f64::from(j);
    let one_minus = 1.0 - epsilon;
    let pow = |k: u32| if j >= k { one_minus.powi((j - k) as i32) } else { 0.0 };
    let falling3 = jf * (jf - 1.0) * (jf - 2.0);
    pow(0) - 9.0 * epsilon * jf * pow(1) + 8.0 * epsilon.powi(2) * jf * (jf - 1.0) * pow(2)
        - 4.0 / 3.0 * epsilon.powi(3) * falling3 * pow(3)
}

fn smeared_4d_from_abundances(n: usize, ab: &AbundanceVector, epsilon: f64) -> f64 {
    let sum: f64 = ab
        .counts
        .iter()
        .enumerate()
        .map(|(j, &c)| f4(j as u32, epsilon) * c as f64)
        .sum();
    prefactor_4d() * epsilon.sqrt() * (n as f64 - epsilon * sum)
}

/// Exact smeared 4d action.
pub fn bd_action_4d(s: &CausalSet, epsilon: f64) -> f64 {
    smeared_4d_from_abundances(s.n(), &s.abundances(), epsilon)
}

/// General-dimension action with `f_d(j, ε) ≈ 1 + (C_2^(d) − 1) j ε`.
pub fn bd_action_d(s: &CausalSet, params: &SmearedActionParams) -> f64 {
    let eps = params.epsilon;
    let sum: f64 = s
        .abundances()
        .counts
        .iter()
        .enumerate()
        .map(|(j, &c)| (1.0 + (params.c2_d - 1.0) * j as f64 * eps) * c as f64)
        .sum();
    params.scale() * (s.n() as f64 + params.beta_d / params.alpha_d * eps * sum)
}

/// `C_2^(d)`: `1 − binom(d+1, d/2)` for even d, `1 − (2d+1)!!/(d+1)!` for odd d.
pub fn c2_d(d: u32) -> f64 {
    if d % 2 == 0 {
        1.0 - binomial(u64::from(d) + 1, u64::from(d) / 2)
    } else {
        let double_fact: f64 = (1..=2 * d + 1).step_by(2).map(f64::from).product();
        let fact: f64 = (1..=d + 1).map(f64::from).product();
        1.0 - double_fact / fact
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Non-smeared 2d action `2(N − 2 N_0 + 4 N_1 − 2 N_2)`.
pub fn bd_action_2d_exact(s: &CausalSet) -> f64 {
    let ab = s.abundances();
    2.0 * (s.n() as f64 - 2.0 * ab.get(0) as f64 + 4.0 * ab.get(1) as f64 - 2.0 * ab.get(2) as f64)
}

/// O(ε) truncation of the 4d action summed over pairs:
/// `(4/√6) √ε [N − ε Σ_{k<m} C_km (1 − 10 ε Λ_km)]`.
///
/// Accepts raw configurations, so it also gives the classical value of the
/// BD Hamiltonian on non-causal basis states.
pub fn bd_truncated(m: &CausalMatrix, epsilon: f64) -> f64 {
    let n = m.n();
    let mut sum = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            if m.related(k, l) {
                sum += 1.0 - 10.0 * epsilon * f64::from(m.interval_cardinality(k, l));
            }
        }
    }
    prefactor_4d() * epsilon.sqrt() * (n as f64 - epsilon * sum)
}

/// Pair-sum form of [`bd_action_d`], valid on raw configurations.
pub fn bd_truncated_d(m: &CausalMatrix, params: &SmearedActionParams) -> f64 {
    let n = m.n();
    let eps = params.epsilon;
    let mut sum = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            if m.related(k, l) {
                sum += 1.0 + (params.c2_d - 1.0) * eps * f64::from(m.interval_cardinality(k, l));
            }
        }
    }
    params.scale() * (n as f64 + params.beta_d / params.alpha_d * eps * sum)
}

/// Which action weights a Metropolis chain.
#[derive(Clone, Debug, PartialEq)]
pub enum ActionKind {
    /// Exact smeared 4d action at the given ε.
    Smeared4d { epsilon: f64 },
    /// First-order general-dimension action.
    GeneralD(SmearedActionParams),
    /// Non-smeared 2d action.
    Exact2d,
}

impl ActionKind {
    pub fn evaluate(&self, s: &CausalSet) -> f64 {
        match self {
            Self::Smeared4d { epsilon } => bd_action_4d(s, *epsilon),
            Self::GeneralD(p) => bd_action_d(s, p),
            Self::Exact2d => bd_action_2d_exact(s),
        }
    }
}

impl Default for ActionKind {
    fn default() -> Self {
        Self::Smeared4d {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causet::enumerate_causal_sets;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    // Direct transcription of the quartic bracket with divisions, ε < 1.
    fn f4_reference(j: u32, e: f64) -> f64 {
        let j = f64::from(j);
        let falling3 = j * (j - 1.0) * (j - 2.0);
        (1.0 - e).powf(j)
            * (1.0 - 9.0 * e * j / (1.0 - e) + 8.0 * e * e * j * (j - 1.0) / (1.0 - e).powi(2)
                - 4.0 * e.powi(3) * falling3 / (3.0 * (1.0 - e).powi(3)))
    }

    #[test]
    fn f4_values() {
        for e in [0.01, 0.1, 0.5, 0.9] {
            assert_eq!(f4(0, e), 1.0);
            for j in 0..8 {
                assert!(close(f4(j, e), f4_reference(j, e), 1e-12), "j={j} e={e}");
            }
        }
        assert!(f4(1, 0.1).abs() < 1e-15);
        // first-order slope −10 j
        let e = 1e-6;
        for j in 1..6 {
            let slope = (f4(j, e) - 1.0) / e;
            assert!((slope + 10.0 * f64::from(j)).abs() < 1e-3, "j={j} slope={slope}");
        }
    }

    #[test]
    fn f4_at_epsilon_one() {
        let v: Vec<f64> = (0..6).map(|j| f4(j, 1.0)).collect();
        assert_eq!(v, vec![1.0, -9.0, 16.0, -8.0, 0.0, 0.0]);
    }

    #[test]
    fn smeared_4d_examples() {
        let e = 0.1;
        let a = CausalSet::antichain(5).unwrap();
        assert!(close(bd_action_4d(&a, e), prefactor_4d() * e.sqrt() * 5.0, 1e-15));
        let c2 = CausalSet::chain(2).unwrap();
        assert!(close(bd_action_4d(&c2, e), prefactor_4d() * e.sqrt() * (2.0 - 0.1), 1e-15));
        for e in [1e-2, 1e-4, 1e-6] {
            let s = CausalSet::chain(4).unwrap();
            assert!((bd_action_4d(&s, e) / (e.sqrt() * 4.0) - prefactor_4d()).abs() < 20.0 * e);
        }
    }

    #[test]
    fn c2_values() {
        assert_eq!(c2_d(4), -9.0);
        assert_eq!(c2_d(2), -2.0);
        assert!(close(c2_d(3), 1.0 - 105.0 / 24.0, 1e-15));
    }

    #[test]
    fn general_d_matches_4d_truncation() {
        let p = SmearedActionParams::four_dimensional(0.1).unwrap();
        for n in 1..=4 {
            for s in enumerate_causal_sets(n).unwrap() {
                let a = bd_action_d(&s, &p);
                assert!(close(a, bd_truncated(&s, 0.1), 1e-13), "{s}");
                assert!(close(a, bd_truncated_d(&s, &p), 1e-13), "{s}");
            }
        }
        let a = CausalSet::antichain(3).unwrap();
        let p = SmearedActionParams::new(0.2, 3, 1.5, 2.0, 1.0).unwrap();
        let expect = -2.0 * 1.5f64.powf(1.0) * 0.2f64.powf(2.0 / 3.0) * 3.0;
        assert!(close(bd_action_d(&a, &p), expect, 1e-14));
    }

    #[test]
    fn params_validation() {
        assert!(SmearedActionParams::new(0.0, 4, 1.0, 1.0, 1.0).is_err());
        assert!(SmearedActionParams::new(1.1, 4, 1.0, 1.0, 1.0).is_err());
        assert!(SmearedActionParams::new(0.1, 1, 1.0, 1.0, 1.0).is_err());
        assert!(SmearedActionParams::new(0.1, 4, 1.0, 0.0, 1.0).is_err());
        assert!(SmearedActionParams::new(1.0, 4, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn exact_2d_examples() {
        assert_eq!(bd_action_2d_exact(&CausalSet::antichain(4).unwrap()), 8.0);
        assert_eq!(bd_action_2d_exact(&CausalSet::chain(2).unwrap()), 0.0);
        assert_eq!(bd_action_2d_exact(&CausalSet::chain(3).unwrap()), 6.0);
    }

    #[test]
    fn truncation_examples() {
        let e = 0.1;
        let a = CausalSet::antichain(4).unwrap();
        assert!(close(bd_truncated(&a, e), prefactor_4d() * e.sqrt() * 4.0, 1e-15));
        // Only links and single-element intervals: f4 is exactly linear there.
        let c3 = CausalSet::chain(3).unwrap();
        assert!(close(bd_truncated(&c3, e), bd_action_4d(&c3, e), 1e-14));
    }

    #[test]
    fn action_depends_only_on_abundances() {
        let sets = enumerate_causal_sets(5).unwrap();
        let mut seen = std::collections::HashMap::new();
        for s in &sets {
            let v = bd_action_4d(s, 0.1);
            let prev = *seen.entry(s.abundances().counts).or_insert(v);
            assert_eq!(prev, v);
        }
    }
}
