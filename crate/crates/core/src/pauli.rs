//! Qubit Hamiltonians as weighted Pauli strings.
//!
//! Qubit `k` carries relation bit `k` of a [`CausalMatrix`]. Binary relation
//! variables map to spins through `C = (1 − Z)/2`, so `Z_k |m⟩ = (1 − 2 C_k)|m⟩`.
//!
//! Every Hamiltonian used here is either diagonal (products of `Z`) or a
//! single-qubit `X` mixer term; [`PauliHamiltonian::new`] rejects anything else.

use std::collections::BTreeMap;
use std::fmt;

use crate::action::{binomial, prefactor_4d, SmearedActionParams};
use crate::causet::{qubit_count, CausalMatrix};
use crate::error::{usage, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// Sorted by qubit, each qubit at most once. Empty for the identity.
    support: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, support: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut support: Vec<_> = support.into_iter().collect();
        support.sort_unstable();
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(usage!("repeated qubit in Pauli term {support:?}"));
        }
        Ok(Self { coefficient, support })
    }

    pub fn identity(coefficient: f64) -> Self {
        Self {
            coefficient,
            support: Vec::new(),
        }
    }

    pub fn z(coefficient: f64, qubits: &[usize]) -> Self {
        Self::new(coefficient, qubits.iter().map(|&k| (k, Pauli::Z)))
            .expect("distinct qubits in Z string")
    }

    pub fn x(coefficient: f64, qubit: usize) -> Self {
        Self {
            coefficient,
            support: vec![(qubit, Pauli::X)],
        }
    }

    pub fn support(&self) -> &[(usize, Pauli)] {
        &self.support
    }

    pub fn is_diagonal(&self) -> bool {
        self.support.iter().all(|&(_, p)| p == Pauli::Z)
    }

    /// Qubit of a single-`X` term.
    pub fn mixer_qubit(&self) -> Option<usize> {
        match self.support.as_slice() {
            [(k, Pauli::X)] => Some(*k),
            _ => None,
        }
    }

    /// Bitmask of the `Z` support.
    pub fn z_mask(&self) -> u64 {
        self.support
            .iter()
            .filter(|(_, p)| *p == Pauli::Z)
            .fold(0, |acc, &(k, _)| acc | 1 << k)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (k, p) in &self.support {
            write!(f, " {}@{}", p.letter(), k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    q: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn new(q: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if q > 63 {
            return Err(Error::ResourceLimit(format!("{q} qubits exceed the 63-qubit index width")));
        }
        for t in &terms {
            if let Some(&(k, _)) = t.support.iter().find(|(k, _)| *k >= q) {
                return Err(usage!("term {t} acts on qubit {k} >= {q}"));
            }
            if !t.is_diagonal() && t.mixer_qubit().is_none() {
                return Err(usage!("term {t} is neither a Z string nor a single X"));
            }
            if !t.coefficient.is_finite() {
                return Err(usage!("term {t} has a non-finite coefficient"));
            }
        }
        Ok(Self { q, terms })
    }

    pub fn zero(q: usize) -> Self {
        Self { q, terms: Vec::new() }
    }

    pub fn qubits(&self) -> usize {
        self.q
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_diagonal)
    }

    pub fn diagonal_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| t.is_diagonal())
    }

    /// `(qubit, coefficient)` of every `X` term, in term order.
    pub fn mixer_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms
            .iter()
            .filter_map(|t| t.mixer_qubit().map(|k| (k, t.coefficient)))
    }

    #[must_use]
    pub fn scaled(mut self, factor: f64) -> Self {
        for t in &mut self.terms {
            t.coefficient *= factor;
        }
        self
    }

    pub fn add(mut self, other: Self) -> Result<Self> {
        if self.q != other.q {
            return Err(usage!("adding Hamiltonians on {} and {} qubits", self.q, other.q));
        }
        self.terms.extend(other.terms);
        Ok(self)
    }

    /// Merges terms with identical support and drops exact zeros; terms come
    /// out ordered by support.
    #[must_use]
    pub fn simplified(self) -> Self {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, f64> = BTreeMap::new();
        for t in self.terms {
            *merged.entry(t.support).or_insert(0.0) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(support, coefficient)| PauliTerm { coefficient, support })
            .collect();
        Self { q: self.q, terms }
    }

    /// `sqrt(Σ c²)` over merged terms, i.e. the Frobenius norm divided by `2^{q/2}`.
    pub fn coefficient_norm(&self) -> f64 {
        self.clone()
            .simplified()
            .terms
            .iter()
            .map(|t| t.coefficient * t.coefficient)
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨x|H|x⟩` for every basis index `x`, ignoring `X` terms.
    ///
    /// Uses a Walsh–Hadamard transform of the coefficients indexed by `Z` mask,
    /// `O(q 2^q)` regardless of the number of terms.
    pub fn diagonal_vector(&self) -> Vec<f64> {
        let dim = 1usize << self.q;
        let mut v = vec![0.0; dim];
        for t in self.diagonal_terms() {
            v[t.z_mask() as usize] += t.coefficient;
        }
        let mut h = 1;
        while h < dim {
            for block in v.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            h *= 2;
        }
        v
    }

    /// Materialises the `2^q × 2^q` real matrix; intended for `q <= 12`.
    pub fn to_dense(&self) -> Result<nalgebra::DMatrix<f64>> {
        if self.q > 12 {
            return Err(Error::ResourceLimit(format!("dense matrix on {} qubits", self.q)));
        }
        let dim = 1usize << self.q;
        let diag = self.diagonal_vector();
        let mut m = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        for (k, c) in self.mixer_terms() {
            for x in 0..dim {
                m[(x ^ (1 << k), x)] += c;
            }
        }
        Ok(m)
    }

    /// Parses the one-term-per-line listing written by `Display`.
    pub fn from_text(text: &str, q: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let coeff: f64 = fields
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| usage!("line {}: missing coefficient", lineno + 1))?;
            let mut support = Vec::new();
            for op in fields {
                let (letter, qubit) = op
                    .split_once('@')
                    .ok_or_else(|| usage!("line {}: bad operator {op:?}", lineno + 1))?;
                let pauli = match letter {
                    "X" => Pauli::X,
                    "Z" => Pauli::Z,
                    _ => return Err(usage!("line {}: unsupported Pauli {letter:?}", lineno + 1)),
                };
                let k: usize = qubit
                    .parse()
                    .map_err(|_| usage!("line {}: bad qubit {qubit:?}", lineno + 1))?;
                support.push((k, pauli));
            }
            terms.push(PauliTerm::new(coeff, support)?);
        }
        Self::new(q, terms)
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `⟨m|H|m⟩` for a diagonal Hamiltonian.
pub fn diagonal_value(h: &PauliHamiltonian, m: &CausalMatrix) -> Result<f64> {
    if !h.is_diagonal() {
        return Err(usage!("diagonal_value on a Hamiltonian with X terms"));
    }
    if m.qubits() != h.qubits() {
        return Err(usage!("configuration has {} bits, Hamiltonian {} qubits", m.qubits(), h.qubits()));
    }
    Ok(h.terms
        .iter()
        .map(|t| {
            if (t.z_mask() & m.bits()).count_ones() % 2 == 0 {
                t.coefficient
            } else {
                -t.coefficient
            }
        })
        .sum())
}

/// Spin expansion of `c · Π_{k∈vars} C_k` with `C_k = (1 − Z_k)/2`.
fn binary_product(c: f64, vars: &[usize]) -> impl Iterator<Item = PauliTerm> + '_ {
    let scale = c / f64::from(1u32 << vars.len());
    (0u32..1 << vars.len()).map(move |subset| {
        let qubits: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(b, _)| subset >> b & 1 == 1)
            .map(|(_, &k)| k)
            .collect();
        let sign = if qubits.len() % 2 == 0 { 1.0 } else { -1.0 };
        PauliTerm::z(sign * scale, &qubits)
    })
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
}

fn q_of(n: usize, i: usize, j: usize) -> usize {
    crate::causet::pair_offset(n, i, j)
}

/// Transverse-field mixer `Σ_k X_k`.
pub fn build_h_mix(q: usize) -> Result<PauliHamiltonian> {
    if q == 0 {
        return Err(usage!("mixer needs at least one qubit"));
    }
    PauliHamiltonian::new(q, (0..q).map(|k| PauliTerm::x(1.0, k)).collect())
}

/// Per-triple transitivity penalty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyScale(f64);

impl PenaltyScale {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p.is_finite() {
            Ok(Self(p))
        } else {
            Err(Error::Config(format!("penalty {p} must be positive")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for PenaltyScale {
    fn default() -> Self {
        Self(1.0)
    }
}

/// Transitive-closure constraint `P Σ_{i<j<k} C_ij C_jk (1 − C_ik)` in spin
/// form, including the `P/8` constant per triple so valid sets sit at zero.
pub fn build_h_tc(n: usize, p: PenaltyScale) -> Result<PauliHamiltonian> {
    let q = qubit_count(n);
    let c = p.value() / 8.0;
    let mut terms = Vec::new();
    for (i, j, k) in triples(n) {
        let (ij, jk, ik) = (q_of(n, i, j), q_of(n, j, k), q_of(n, i, k));
        terms.extend([
            PauliTerm::identity(c),
            PauliTerm::z(-c, &[ij]),
            PauliTerm::z(-c, &[jk]),
            PauliTerm::z(c, &[ik]),
            PauliTerm::z(c, &[ij, jk]),
            PauliTerm::z(-c, &[ij, ik]),
            PauliTerm::z(-c, &[jk, ik]),
            PauliTerm::z(c, &[ij, jk, ik]),
        ]);
    }
    Ok(PauliHamiltonian::new(q, terms)?.simplified())
}

/// Smeared 4d BD Hamiltonian truncated at O(ε) inside the bracket:
/// `(4/√6)√ε [N − ε Σ_{k<m} C_km (1 − 10 ε Σ_l C_kl C_lm)]`, in spin form.
pub fn build_h_bd(n: usize, epsilon: f64) -> Result<PauliHamiltonian> {
    if n < 2 {
        return Err(usage!("BD Hamiltonian needs n >= 2"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let q = qubit_count(n);
    let pre = prefactor_4d();
    let lin = pre / 2.0 * epsilon.powf(1.5);
    let cubic = 5.0 / 6f64.sqrt() * epsilon.powf(2.5);
    let mut terms = vec![PauliTerm::identity(pre * epsilon.sqrt() * n as f64)];
    for (k, m) in crate::causet::pairs(n) {
        let km = q_of(n, k, m);
        terms.push(PauliTerm::identity(-lin));
        terms.push(PauliTerm::z(lin, &[km]));
    }
    for (k, l, m) in triples(n) {
        let (kl, lm, km) = (q_of(n, k, l), q_of(n, l, m), q_of(n, k, m));
        terms.extend([
            PauliTerm::identity(cubic),
            PauliTerm::z(-cubic, &[km]),
            PauliTerm::z(-cubic, &[kl]),
            PauliTerm::z(-cubic, &[lm]),
            PauliTerm::z(cubic, &[kl, lm]),
            PauliTerm::z(cubic, &[kl, km]),
            PauliTerm::z(cubic, &[lm, km]),
            PauliTerm::z(-cubic, &[kl, lm, km]),
        ]);
    }
    Ok(PauliHamiltonian::new(q, terms)?.simplified())
}

/// General-dimension analogue of [`build_h_bd`] built from the binary form
/// `−α_d (ℓ_c/ℓ_p)^{d−2} ε^{2/d} [N + (β_d/α_d) ε Σ C_km (1 + (C_2 − 1) ε Λ_km)]`.
pub fn build_h_bd_d(n: usize, params: &SmearedActionParams) -> Result<PauliHamiltonian> {
    if n < 2 {
        return Err(usage!("BD Hamiltonian needs n >= 2"));
    }
    let q = qubit_count(n);
    let d = f64::from(params.dimension);
    let scale = -params.alpha_d * params.length_ratio.powf(d - 2.0) * params.epsilon.powf(2.0 / d);
    let link = scale * params.beta_d / params.alpha_d * params.epsilon;
    let interval = link * (params.c2_d - 1.0) * params.epsilon;
    let mut terms = vec![PauliTerm::identity(scale * n as f64)];
    for (k, m) in crate::causet::pairs(n) {
        terms.extend(binary_product(link, &[q_of(n, k, m)]));
    }
    for (k, l, m) in triples(n) {
        let vars = [q_of(n, k, m), q_of(n, k, l), q_of(n, l, m)];
        terms.extend(binary_product(interval, &vars).collect::<Vec<_>>());
    }
    Ok(PauliHamiltonian::new(q, terms)?.simplified())
}

/// Relative weights parameterised by `(r_TC, r_BD)`:
/// `γ_TC = r_TC`, `γ_BD = (1 − r_TC) r_BD`, `γ_mix = (1 − r_TC)(1 − r_BD)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaConfig {
    r_tc: f64,
    r_bd: f64,
}

impl GammaConfig {
    pub fn new(r_tc: f64, r_bd: f64) -> Result<Self> {
        for (name, r) in [("r_tc", r_tc), ("r_bd", r_bd)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("{name} = {r} outside [0, 1]")));
            }
        }
        Ok(Self { r_tc, r_bd })
    }

    pub fn r_tc(&self) -> f64 {
        self.r_tc
    }

    pub fn r_bd(&self) -> f64 {
        self.r_bd
    }

    pub fn gamma_tc(&self) -> f64 {
        self.r_tc
    }

    pub fn gamma_bd(&self) -> f64 {
        (1.0 - self.r_tc) * self.r_bd
    }

    pub fn gamma_mix(&self) -> f64 {
        (1.0 - self.r_tc) * (1.0 - self.r_bd)
    }
}

/// `‖H_mix‖_F / ‖H_BD‖_F ≈ √q / √(4 ε⁴ q) = 1/(2ε²)`.
pub fn alpha_bd(_q: usize, epsilon: f64) -> f64 {
    1.0 / (2.0 * epsilon * epsilon)
}

/// `√q · binom(N, 3) / 8`.
pub fn alpha_tc(n: usize) -> f64 {
    (qubit_count(n) as f64).sqrt() * binomial(n as u64, 3) / 8.0
}

/// Multipliers applied to the constraint and problem terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub alpha_tc: f64,
    pub alpha_bd: f64,
}

impl Normalization {
    pub fn default_for(n: usize, epsilon: f64) -> Self {
        Self {
            alpha_tc: alpha_tc(n),
            alpha_bd: alpha_bd(qubit_count(n), epsilon),
        }
    }
}

/// The three unweighted components of the proposal Hamiltonian for `n` elements.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    pub h_tc: PauliHamiltonian,
    pub h_bd: PauliHamiltonian,
    pub h_mix: PauliHamiltonian,
}

impl HamiltonianParts {
    pub fn build(n: usize, epsilon: f64, p: PenaltyScale) -> Result<Self> {
        Ok(Self {
            h_tc: build_h_tc(n, p)?,
            h_bd: build_h_bd(n, epsilon)?,
            h_mix: build_h_mix(qubit_count(n))?,
        })
    }

    /// `γ_TC α_TC H_TC + γ_BD α_BD H_BD + γ_mix H_mix`.
    pub fn combine(&self, g: &GammaConfig, norm: &Normalization) -> Result<PauliHamiltonian> {
        let mut h = PauliHamiltonian::zero(self.h_mix.qubits());
        if g.gamma_tc() != 0.0 {
            h = h.add(self.h_tc.clone().scaled(g.gamma_tc() * norm.alpha_tc))?;
        }
        if g.gamma_bd() != 0.0 {
            h = h.add(self.h_bd.clone().scaled(g.gamma_bd() * norm.alpha_bd))?;
        }
        if g.gamma_mix() != 0.0 {
            h = h.add(self.h_mix.clone().scaled(g.gamma_mix()))?;
        }
        Ok(h)
    }
}

/// Weighted proposal Hamiltonian with the default normalisations.
/// With `r_bd = 0` this is the uniform-sampling Hamiltonian.
pub fn combine(g: &GammaConfig, n: usize, epsilon: f64, p: PenaltyScale) -> Result<PauliHamiltonian> {
    if n < 3 {
        return Err(usage!("weighted Hamiltonian needs n >= 3"));
    }
    HamiltonianParts::build(n, epsilon, p)?.combine(g, &Normalization::default_for(n, epsilon))
}
