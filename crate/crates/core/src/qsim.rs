//! Dense state-vector simulation of first-order Trotterised evolution.
//!
//! One Trotter step applies the fused diagonal phase `exp(−i D dt)` and then
//! `exp(−i c_k X_k dt)` for each mixer term in ascending qubit order. With the
//! default unit time step the step count is the evolution time.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;

use crate::causet::{qubit_count, CausalMatrix};
use crate::error::{usage, Error, Result};
use crate::pauli::PauliHamiltonian;

/// Largest simulated register (21 qubits = 7 elements).
pub const MAX_QUBITS: usize = 21;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    q: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(q: usize, index: usize) -> Result<Self> {
        if q > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!("{q} qubits exceed the cap of {MAX_QUBITS}")));
        }
        let dim = 1usize << q;
        if index >= dim {
            return Err(usage!("basis index {index} outside 2^{q}"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { q, amps })
    }

    /// Wraps raw amplitudes; the caller guarantees normalisation.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(usage!("amplitude count {} is not a power of two", amps.len()));
        }
        let q = amps.len().trailing_zeros() as usize;
        let s = Self { q, amps };
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(usage!("state norm {} is not 1", s.norm()));
        }
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.q
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }
}

/// Basis state whose index has bit `k` equal to relation bit `k` of `m`.
pub fn basis_state(m: &CausalMatrix) -> Result<StateVector> {
    StateVector::basis(m.qubits(), m.bits() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolutionParams {
    steps: u32,
}

impl EvolutionParams {
    pub fn new(steps: u32) -> Result<Self> {
        if steps == 0 {
            return Err(usage!("at least one Trotter step is required"));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }
}

/// A Trotter step prepared for repeated application.
#[derive(Clone, Debug)]
pub struct Propagator {
    q: usize,
    phases: Vec<Complex64>,
    /// `(qubit, cos θ, sin θ)` per mixer term.
    rotations: Vec<(usize, f64, f64)>,
}

impl Propagator {
    pub fn new(h: &PauliHamiltonian) -> Result<Self> {
        Self::with_time_step(h, 1.0)
    }

    pub fn with_time_step(h: &PauliHamiltonian, dt: f64) -> Result<Self> {
        if h.qubits() > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{} qubits exceed the cap of {MAX_QUBITS}",
                h.qubits()
            )));
        }
        let mut mixers: Vec<(usize, f64)> = h.mixer_terms().collect();
        mixers.sort_by_key(|&(k, _)| k);
        Ok(Self::from_parts(h.qubits(), &h.diagonal_vector(), &mixers, dt))
    }

    /// Builds a step from a precomputed diagonal and mixer list (sorted by qubit).
    pub fn from_parts(q: usize, diagonal: &[f64], mixers: &[(usize, f64)], dt: f64) -> Self {
        debug_assert_eq!(diagonal.len(), 1 << q);
        let phases = diagonal
            .iter()
            .map(|&d| Complex64::from_polar(1.0, -d * dt))
            .collect();
        let rotations = mixers
            .iter()
            .map(|&(k, c)| {
                let theta = c * dt;
                (k, theta.cos(), theta.sin())
            })
            .collect();
        Self { q, phases, rotations }
    }

    pub fn qubits(&self) -> usize {
        self.q
    }

    /// Applies `steps` Trotter steps in place.
    pub fn apply(&self, state: &mut StateVector, steps: u32) -> Result<()> {
        if state.q != self.q {
            return Err(usage!("state has {} qubits, Hamiltonian {}", state.q, self.q));
        }
        for _ in 0..steps {
            for (a, p) in state.amps.iter_mut().zip(&self.phases) {
                *a *= p;
            }
            for &(k, c, s) in &self.rotations {
                rotate_x(&mut state.amps, k, c, s);
            }
        }
        Ok(())
    }
}

// exp(−iθX) on qubit k: [[cos, −i sin], [−i sin, cos]].
fn rotate_x(amps: &mut [Complex64], k: usize, c: f64, s: f64) {
    let half = 1usize << k;
    let mis = Complex64::new(0.0, -s);
    for block in amps.chunks_mut(2 * half) {
        let (lo, hi) = block.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x * c + y * mis;
            *b = x * mis + y * c;
        }
    }
}

/// `t` unit-time Trotter steps of `h` applied to `state`.
pub fn evolve(state: &StateVector, h: &PauliHamiltonian, params: EvolutionParams) -> Result<StateVector> {
    evolve_for(state, h, f64::from(params.steps), params.steps)
}

/// Evolution for `total_time` split into `steps` equal Trotter steps.
pub fn evolve_for(state: &StateVector, h: &PauliHamiltonian, total_time: f64, steps: u32) -> Result<StateVector> {
    if h.qubits() != state.q {
        return Err(usage!("state has {} qubits, Hamiltonian {}", state.q, h.qubits()));
    }
    let mut out = state.clone();
    if steps == 0 {
        return Ok(out);
    }
    let prop = Propagator::with_time_step(h, total_time / f64::from(steps))?;
    prop.apply(&mut out, steps)?;
    Ok(out)
}

/// Born probabilities of every computational-basis outcome.
pub fn measure_distribution(state: &StateVector) -> Vec<f64> {
    state.amps.iter().map(Complex64::norm_sqr).collect()
}

/// Draws one outcome index from a probability vector by inversion.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u just above the running sum: take the last non-zero outcome
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Cardinality whose relation count is `q`, if any.
pub fn cardinality_for_qubits(q: usize) -> Option<usize> {
    (1..=crate::causet::MAX_ELEMENTS + 1).find(|&n| qubit_count(n) == q)
}

/// Measures every qubit in the computational basis.
pub fn sample_measurement<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<CausalMatrix> {
    let n = cardinality_for_qubits(state.q)
        .ok_or_else(|| usage!("{} qubits do not encode a causal matrix", state.q))?;
    let idx = sample_index(&measure_distribution(state), rng);
    CausalMatrix::from_bits(n, idx as u64)
}

/// Writes `index,bitstring,probability` rows; bit `k` of the string is qubit `k`.
pub fn write_distribution_csv<W: Write>(mut w: W, probs: &[f64]) -> io::Result<()> {
    let q = probs.len().trailing_zeros() as usize;
    writeln!(w, "index,bitstring,probability")?;
    for (i, p) in probs.iter().enumerate() {
        let bits: String = (0..q).map(|k| if i >> k & 1 == 1 { '1' } else { '0' }).collect();
        writeln!(w, "{i},{bits},{p}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_h_mix, build_h_tc, PauliTerm, PenaltyScale};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_examples() {
        let a = basis_state(&"3:000".parse().unwrap()).unwrap();
        assert_eq!(measure_distribution(&a)[0], 1.0);
        let c = basis_state(&"3:111".parse().unwrap()).unwrap();
        assert_eq!(measure_distribution(&c)[7], 1.0);
        assert_eq!(c.norm(), 1.0);
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let s = basis_state(&"3:101".parse().unwrap()).unwrap();
        let out = evolve(&s, &PauliHamiltonian::zero(3), EvolutionParams::new(5).unwrap()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn single_qubit_rotation() {
        let g = 0.3;
        let h = build_h_mix(1).unwrap().scaled(g);
        let s = StateVector::basis(1, 0).unwrap();
        let out = evolve(&s, &h, EvolutionParams::new(1).unwrap()).unwrap();
        let a = out.amplitudes();
        assert!((a[0] - Complex64::new(g.cos(), 0.0)).norm() < 1e-15);
        assert!((a[1] - Complex64::new(0.0, -g.sin())).norm() < 1e-15);
    }

    #[test]
    fn half_pi_flips_every_bit() {
        let h = build_h_mix(3).unwrap().scaled(std::f64::consts::FRAC_PI_2);
        let s = StateVector::basis(3, 0).unwrap();
        let out = evolve(&s, &h, EvolutionParams::new(1).unwrap()).unwrap();
        assert!((measure_distribution(&out)[7] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_evolution_keeps_distribution() {
        let h = build_h_tc(4, PenaltyScale::default()).unwrap();
        let s = basis_state(&"4:101100".parse().unwrap()).unwrap();
        let out = evolve(&s, &h, EvolutionParams::new(7).unwrap()).unwrap();
        for (a, b) in measure_distribution(&out).iter().zip(measure_distribution(&s)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = StateVector::basis(2, 0).unwrap();
        assert!(evolve(&s, &build_h_mix(3).unwrap(), EvolutionParams::new(1).unwrap()).is_err());
        assert!(EvolutionParams::new(0).is_err());
        assert!(StateVector::basis(MAX_QUBITS + 1, 0).is_err());
    }

    #[test]
    fn uniform_superposition_distribution() {
        let h = 0.5f64.sqrt();
        let s = StateVector::from_amplitudes(vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        assert_eq!(measure_distribution(&s), vec![0.25; 4]);
        assert!(StateVector::from_amplitudes(vec![Complex64::new(h, 0.0); 3]).is_err());
    }

    #[test]
    fn zero_steps_is_identity() {
        let h = build_h_mix(3).unwrap();
        let s = basis_state(&"3:110".parse().unwrap()).unwrap();
        assert_eq!(evolve_for(&s, &h, 1.0, 0).unwrap(), s);
        let p = Propagator::new(&h).unwrap();
        let mut t = s.clone();
        p.apply(&mut t, 0).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn sampling_delta_and_reproducible() {
        let s = basis_state(&"3:011".parse().unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_measurement(&s, &mut rng).unwrap().to_string(), "3:011");
        }
        let h = build_h_mix(3).unwrap().scaled(0.4);
        let e = evolve(&s, &h, EvolutionParams::new(2).unwrap()).unwrap();
        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| sample_measurement(&e, &mut r).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn mixer_with_repeated_qubit_terms() {
        let h = PauliHamiltonian::new(1, vec![PauliTerm::x(0.1, 0), PauliTerm::x(0.2, 0)]).unwrap();
        let s = StateVector::basis(1, 0).unwrap();
        let out = evolve(&s, &h, EvolutionParams::new(1).unwrap()).unwrap();
        assert!((measure_distribution(&out)[1] - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        write_distribution_csv(&mut buf, &[0.25, 0.75]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,bitstring,probability\n0,0,0.25\n1,1,0.75\n");
    }
}
