//! Cubic pseudo-Boolean encoding of the exact (non-smeared) 2d action.
//!
//! Interval sizes are not polynomial in the relation bits, so the encoding
//! carries ancilla bits:
//!
//! * `P[k,l,m] = C[k,l] C[l,m]`, one per triple;
//! * a binary counter for `Λ[k,m] = Σ_l P[k,l,m]`, built by a ripple adder
//!   that adds one summand per stage (sum bits `c`, carry bits `d`);
//! * indicator bits `M[k,m,j] = [Λ[k,m] = j]` for `j = 0, 1, 2`, reconstructed
//!   from the counter through a chain of AND ancillas `y`.
//!
//! Every ancilla is tied to its definition by a penalty `λ (out − f)²`, which
//! is cubic at most and vanishes exactly on consistent assignments. The
//! value part `2N − 4 Σ (C M⁰ − 2 M¹ + M²)` then equals the action.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::action::bd_action_2d_exact;
use crate::causet::{pair_offset, pairs, qubit_count, CausalSet, CausalSetSpace};
use crate::error::{usage, Error, Result};

/// Largest cardinality accepted by [`verify_encoding`].
pub const MAX_VERIFY_CARDINALITY: usize = 5;

/// Multilinear polynomial over binary variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PseudoBooleanPoly {
    terms: BTreeMap<Vec<usize>, f64>,
}

impl PseudoBooleanPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(c, &[]);
        p
    }

    pub fn var(v: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(1.0, &[v]);
        p
    }

    /// Adds `coefficient · Π vars`; repeated variables collapse since `x² = x`.
    pub fn add_term(&mut self, coefficient: f64, vars: &[usize]) {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        let c = self.terms.get(&key).copied().unwrap_or(0.0) + coefficient;
        if c == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, c);
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(*c, k);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = Self::zero();
        for (k, c) in &self.terms {
            p.add_term(c * factor, k);
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let vars: Vec<usize> = ka.iter().chain(kb).copied().collect();
                p.add_term(ca * cb, &vars);
            }
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_variable(&self) -> Option<usize> {
        self.terms.keys().filter_map(|k| k.last().copied()).max()
    }

    /// Sum of `|coefficient|` over the terms containing `v`.
    pub fn coefficient_weight(&self, v: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.contains(&v))
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<f64> {
        if let Some(v) = self.max_variable() {
            if v >= assignment.len() {
                return Err(usage!("assignment of {} bits misses variable {v}", assignment.len()));
            }
        }
        Ok(self
            .terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&v| assignment[v]))
            .map(|(_, c)| c)
            .sum())
    }
}

/// A variable or its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    fn poly(self) -> PseudoBooleanPoly {
        if self.negated {
            let mut p = PseudoBooleanPoly::constant(1.0);
            p.add_term(-1.0, &[self.var]);
            p
        } else {
            PseudoBooleanPoly::var(self.var)
        }
    }

    fn value(self, a: &[bool]) -> bool {
        a[self.var] != self.negated
    }
}

/// Boolean function an ancilla must equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    And(Lit, Lit),
    Xor(Lit, Lit),
    Copy(Lit),
    Const(bool),
}

impl Gate {
    fn poly(self) -> PseudoBooleanPoly {
        match self {
            Self::And(a, b) => a.poly().mul(&b.poly()),
            Self::Xor(a, b) => {
                let (pa, pb) = (a.poly(), b.poly());
                let mut p = pa.clone();
                p.add(&pb);
                p.add(&pa.mul(&pb).scaled(-2.0));
                p
            }
            Self::Copy(a) => a.poly(),
            Self::Const(v) => PseudoBooleanPoly::constant(f64::from(u8::from(v))),
        }
    }

    fn value(self, a: &[bool]) -> bool {
        match self {
            Self::And(x, y) => x.value(a) && y.value(a),
            Self::Xor(x, y) => x.value(a) != y.value(a),
            Self::Copy(x) => x.value(a),
            Self::Const(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Definition {
    pub out: usize,
    pub gate: Gate,
}

impl Definition {
    /// `(out − f)² = out + f − 2·out·f` for Boolean `f`.
    fn penalty(&self) -> PseudoBooleanPoly {
        let f = self.gate.poly();
        let mut p = PseudoBooleanPoly::var(self.out);
        p.add(&f);
        p.add(&PseudoBooleanPoly::var(self.out).mul(&f).scaled(-2.0));
        p
    }
}

/// What a variable stands for; labels are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Relation { k: usize, m: usize },
    Product { k: usize, l: usize, m: usize },
    Sum { k: usize, m: usize, stage: usize, bit: usize },
    Carry { k: usize, m: usize, stage: usize, bit: usize },
    Indicator { k: usize, m: usize, j: usize },
    Chain { k: usize, m: usize, j: usize, link: usize },
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Relation { k, m } => write!(f, "C[{},{}]", k + 1, m + 1),
            Self::Product { k, l, m } => write!(f, "P[{},{},{}]", k + 1, l + 1, m + 1),
            Self::Sum { k, m, stage, bit } => write!(f, "c[{},{}][{stage}][{bit}]", k + 1, m + 1),
            Self::Carry { k, m, stage, bit } => write!(f, "d[{},{}][{stage}][{bit}]", k + 1, m + 1),
            Self::Indicator { k, m, j } => write!(f, "M{j}[{},{}]", k + 1, m + 1),
            Self::Chain { k, m, j, link } => write!(f, "y{j}[{},{}][{link}]", k + 1, m + 1),
        }
    }
}

/// Variable allocation of the encoding. Variables of one kind occupy a
/// contiguous index range, in the order relations, products, adder bits,
/// indicators, chain bits.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaLayout {
    n: usize,
    kinds: Vec<VarKind>,
    /// Counter register of each pair in pair order, least significant bit first.
    registers: Vec<Vec<usize>>,
    indicators: Vec<[usize; 3]>,
    definitions: Vec<Definition>,
}

/// Binary digits needed for `v`.
fn bit_width(v: usize) -> usize {
    (usize::BITS - v.leading_zeros()) as usize
}

fn product_offset(n: usize, k: usize, l: usize, m: usize) -> usize {
    // rank of (k, l, m) among triples in lexicographic order
    let mut idx = 0;
    for a in 0..k {
        let r = n - a - 1;
        idx += r * (r - 1) / 2;
    }
    idx + pair_offset(n - k - 1, l - k - 1, m - k - 1)
}

impl AncillaLayout {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(usage!("exact encoding needs n >= 2"));
        }
        if n > crate::causet::MAX_ELEMENTS {
            return Err(Error::ResourceLimit(format!("n = {n} exceeds {}", crate::causet::MAX_ELEMENTS)));
        }
        let mut kinds: Vec<VarKind> = pairs(n).map(|(k, m)| VarKind::Relation { k, m }).collect();
        let mut definitions = Vec::new();
        let q = qubit_count(n);
        for k in 0..n {
            for l in k + 1..n {
                for m in l + 1..n {
                    let out = kinds.len();
                    kinds.push(VarKind::Product { k, l, m });
                    definitions.push(Definition {
                        out,
                        gate: Gate::And(Lit::pos(pair_offset(n, k, l)), Lit::pos(pair_offset(n, l, m))),
                    });
                }
            }
        }
        let product = |k: usize, l: usize, m: usize| q + product_offset(n, k, l, m);

        let mut registers = Vec::with_capacity(q);
        for (k, m) in pairs(n) {
            let summands = m - k - 1;
            if summands == 0 {
                registers.push(Vec::new());
                continue;
            }
            let mut reg = vec![product(k, k + 1, m)];
            for stage in 2..=summands {
                let w_in = reg.len();
                let w_out = bit_width(stage);
                let mut carry = Lit::pos(product(k, k + stage, m));
                let mut out = Vec::with_capacity(w_out);
                for (bit, &b) in reg.iter().enumerate() {
                    let c = kinds.len();
                    kinds.push(VarKind::Sum { k, m, stage, bit });
                    definitions.push(Definition {
                        out: c,
                        gate: Gate::Xor(Lit::pos(b), carry),
                    });
                    out.push(c);
                    if bit + 1 < w_in || w_out > w_in {
                        let d = kinds.len();
                        kinds.push(VarKind::Carry { k, m, stage, bit });
                        definitions.push(Definition {
                            out: d,
                            gate: Gate::And(Lit::pos(b), carry),
                        });
                        carry = Lit::pos(d);
                    }
                }
                if w_out > w_in {
                    out.push(carry.var);
                }
                reg = out;
            }
            registers.push(reg);
        }

        let mut indicators = Vec::with_capacity(q);
        for (k, m) in pairs(n) {
            let base = kinds.len();
            for j in 0..3 {
                kinds.push(VarKind::Indicator { k, m, j });
            }
            indicators.push([base, base + 1, base + 2]);
        }
        for (p, (k, m)) in pairs(n).enumerate() {
            let reg = &registers[p];
            let w = reg.len();
            for j in 0..3 {
                let target = indicators[p][j];
                if w == 0 || j >> w != 0 {
                    definitions.push(Definition {
                        out: target,
                        gate: Gate::Const(w == 0 && j == 0),
                    });
                    continue;
                }
                let lit = |i: usize| Lit {
                    var: reg[i],
                    negated: (j >> i) & 1 == 0,
                };
                if w == 1 {
                    definitions.push(Definition {
                        out: target,
                        gate: Gate::Copy(lit(0)),
                    });
                    continue;
                }
                let mut acc = lit(0);
                for i in 1..w {
                    let out = if i + 1 == w {
                        target
                    } else {
                        let y = kinds.len();
                        kinds.push(VarKind::Chain { k, m, j, link: i });
                        y
                    };
                    definitions.push(Definition {
                        out,
                        gate: Gate::And(acc, lit(i)),
                    });
                    acc = Lit::pos(out);
                }
            }
        }
        Ok(Self {
            n,
            kinds,
            registers,
            indicators,
            definitions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of binary variables (qubits).
    pub fn qubit_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn relation_count(&self) -> usize {
        qubit_count(self.n)
    }

    pub fn kind(&self, v: usize) -> VarKind {
        self.kinds[v]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn register(&self, k: usize, m: usize) -> &[usize] {
        &self.registers[pair_offset(self.n, k, m)]
    }

    pub fn indicator(&self, k: usize, m: usize, j: usize) -> usize {
        self.indicators[pair_offset(self.n, k, m)][j]
    }

    pub fn product(&self, k: usize, l: usize, m: usize) -> usize {
        self.relation_count() + product_offset(self.n, k, l, m)
    }

    pub fn definitions(&self) -> &[Definition] {
        &self.definitions
    }

    /// Variables other than relation bits.
    pub fn ancillas(&self) -> std::ops::Range<usize> {
        self.relation_count()..self.qubit_count()
    }
}

/// Number of binary variables used at cardinality `n`.
pub fn qubit_count_exact(n: usize) -> Result<usize> {
    Ok(AncillaLayout::new(n)?.qubit_count())
}

/// The encoding split into its value and (unscaled) penalty parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactBdEncoding {
    pub layout: AncillaLayout,
    pub value: PseudoBooleanPoly,
    pub penalty: PseudoBooleanPoly,
    pub lambda: f64,
}

impl ExactBdEncoding {
    /// `value + λ · penalty`.
    pub fn polynomial(&self) -> PseudoBooleanPoly {
        let mut p = self.value.clone();
        p.add(&self.penalty.scaled(self.lambda));
        p
    }

    pub fn energy(&self, assignment: &[bool]) -> Result<f64> {
        Ok(self.value.evaluate(assignment)? + self.lambda * self.penalty.evaluate(assignment)?)
    }
}

fn value_part(layout: &AncillaLayout) -> PseudoBooleanPoly {
    let n = layout.n;
    let mut p = PseudoBooleanPoly::constant(2.0 * n as f64);
    for (k, m) in pairs(n) {
        p.add_term(-4.0, &[pair_offset(n, k, m), layout.indicator(k, m, 0)]);
        p.add_term(8.0, &[layout.indicator(k, m, 1)]);
        p.add_term(-4.0, &[layout.indicator(k, m, 2)]);
    }
    p
}

fn penalty_part(layout: &AncillaLayout) -> PseudoBooleanPoly {
    let mut p = PseudoBooleanPoly::zero();
    for d in &layout.definitions {
        p.add(&d.penalty());
    }
    p
}

/// Ten times the largest per-variable coefficient weight of the value part.
pub fn default_lambda(n: usize) -> Result<f64> {
    let layout = AncillaLayout::new(n)?;
    let value = value_part(&layout);
    let w = (0..layout.qubit_count())
        .map(|v| value.coefficient_weight(v))
        .fold(0.0, f64::max);
    Ok(10.0 * w)
}

/// Builds the encoding at penalty weight `lambda`.
pub fn build_exact_bd(n: usize, lambda: f64) -> Result<ExactBdEncoding> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(usage!("penalty weight {lambda} must be positive"));
    }
    let layout = AncillaLayout::new(n)?;
    let value = value_part(&layout);
    let penalty = penalty_part(&layout);
    let deg = value.degree().max(penalty.degree());
    if deg > 3 {
        return Err(Error::Internal(format!("encoding has degree {deg}")));
    }
    Ok(ExactBdEncoding {
        layout,
        value,
        penalty,
        lambda,
    })
}

/// Relation bits of `s` followed by every ancilla at its defined value.
pub fn consistent_assignment(s: &CausalSet, layout: &AncillaLayout) -> Result<Vec<bool>> {
    if s.n() != layout.n {
        return Err(usage!("set of cardinality {} against a layout for {}", s.n(), layout.n));
    }
    let mut a = vec![false; layout.qubit_count()];
    for (k, bit) in a.iter_mut().enumerate().take(layout.relation_count()) {
        *bit = s.bit(k);
    }
    for d in &layout.definitions {
        a[d.out] = d.gate.value(&a);
    }
    Ok(a)
}

pub fn evaluate(poly: &PseudoBooleanPoly, assignment: &[bool]) -> Result<f64> {
    poly.evaluate(assignment)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub n: usize,
    pub lambda: f64,
    pub qubits: usize,
    pub sets_checked: usize,
    pub corruptions_checked: usize,
    /// Sets whose on-shell value differs from the action.
    pub mismatches: Vec<String>,
    /// Single-bit ancilla flips that do not raise the energy.
    pub unsafe_flips: Vec<String>,
    /// Smallest λ above which every checked flip raises the energy.
    pub min_safe_lambda: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.unsafe_flips.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={} lambda={} qubits={} sets={} corruptions={} min_safe_lambda={} {}",
            self.n,
            self.lambda,
            self.qubits,
            self.sets_checked,
            self.corruptions_checked,
            self.min_safe_lambda,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for m in self.mismatches.iter().chain(&self.unsafe_flips) {
            writeln!(f, "  {m}")?;
        }
        Ok(())
    }
}

const VALUE_TOL: f64 = 1e-9;

/// Checks the encoding over every causal set of size `n` and every
/// single-bit ancilla corruption; failures are collected in the report.
pub fn check_encoding(n: usize, lambda: f64) -> Result<VerificationReport> {
    if n > MAX_VERIFY_CARDINALITY {
        return Err(Error::ResourceLimit(format!(
            "verification is limited to n <= {MAX_VERIFY_CARDINALITY}"
        )));
    }
    let enc = build_exact_bd(n, lambda)?;
    let space = CausalSetSpace::new(n)?;
    let per_set: Vec<Result<(Vec<String>, Vec<String>, usize, f64)>> = space
        .sets()
        .par_iter()
        .map(|s| {
            let a = consistent_assignment(s, &enc.layout)?;
            let value = enc.value.evaluate(&a)?;
            let pen = enc.penalty.evaluate(&a)?;
            let mut mism = Vec::new();
            let mut unsafe_flips = Vec::new();
            let target = bd_action_2d_exact(s);
            if (value - target).abs() > VALUE_TOL || pen.abs() > VALUE_TOL {
                mism.push(format!("{s}: value {value} penalty {pen}, action {target}"));
            }
            let e0 = value + lambda * pen;
            let mut worst = 0.0f64;
            let mut flipped = a.clone();
            let mut checked = 0;
            for v in enc.layout.ancillas() {
                flipped[v] = !flipped[v];
                let dv = enc.value.evaluate(&flipped)? - value;
                let dp = enc.penalty.evaluate(&flipped)? - pen;
                flipped[v] = !flipped[v];
                checked += 1;
                if dp > 0.0 {
                    worst = worst.max(-dv / dp);
                } else if dv <= 0.0 {
                    worst = f64::INFINITY;
                }
                if dv + lambda * dp <= 0.0 {
                    unsafe_flips.push(format!(
                        "{s}: flipping {} changes energy {e0} by {}",
                        enc.layout.kind(v),
                        dv + lambda * dp
                    ));
                }
            }
            Ok((mism, unsafe_flips, checked, worst))
        })
        .collect();
    let mut report = VerificationReport {
        n,
        lambda,
        qubits: enc.layout.qubit_count(),
        sets_checked: space.len(),
        corruptions_checked: 0,
        mismatches: Vec::new(),
        unsafe_flips: Vec::new(),
        min_safe_lambda: 0.0,
    };
    for r in per_set {
        let (m, u, c, w) = r?;
        report.mismatches.extend(m);
        report.unsafe_flips.extend(u);
        report.corruptions_checked += c;
        report.min_safe_lambda = report.min_safe_lambda.max(w);
    }
    Ok(report)
}

/// Like [`check_encoding`], but any failure becomes a verification error.
pub fn verify_encoding(n: usize, lambda: f64) -> Result<VerificationReport> {
    let report = check_encoding(n, lambda)?;
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::Verification(report.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> CausalSet {
        s.parse().unwrap()
    }

    #[test]
    fn two_element_case() {
        let enc = build_exact_bd(2, 80.0).unwrap();
        assert_eq!(enc.layout.qubit_count(), 1 + 3);
        let a = consistent_assignment(&set("2:1"), &enc.layout).unwrap();
        assert_eq!(enc.energy(&a).unwrap(), 0.0);
        let a = consistent_assignment(&set("2:0"), &enc.layout).unwrap();
        assert_eq!(enc.energy(&a).unwrap(), 4.0);
    }

    #[test]
    fn three_chain_assignment() {
        let layout = AncillaLayout::new(3).unwrap();
        let a = consistent_assignment(&set("3:111"), &layout).unwrap();
        assert!(a[layout.product(0, 1, 2)]);
        assert_eq!(layout.register(0, 2).len(), 1);
        assert!(a[layout.register(0, 2)[0]]);
        assert!(a[layout.indicator(0, 2, 1)]);
        assert!(!a[layout.indicator(0, 2, 0)]);
        assert!(a[layout.indicator(0, 1, 0)]);
    }

    #[test]
    fn antichain_ancillas_vanish() {
        let layout = AncillaLayout::new(5).unwrap();
        let a = consistent_assignment(&CausalSet::antichain(5).unwrap(), &layout).unwrap();
        for v in layout.ancillas() {
            let expect = matches!(layout.kind(v), VarKind::Indicator { j: 0, .. });
            assert_eq!(a[v], expect, "{}", layout.kind(v));
        }
    }

    #[test]
    fn corrupting_product_raises_energy() {
        let enc = build_exact_bd(3, 80.0).unwrap();
        let mut a = consistent_assignment(&set("3:111"), &enc.layout).unwrap();
        let e0 = enc.energy(&a).unwrap();
        let p = enc.layout.product(0, 1, 2);
        a[p] = !a[p];
        assert!(enc.energy(&a).unwrap() - e0 >= 80.0 - 8.0);
    }

    #[test]
    fn counters_count_intervals() {
        let layout = AncillaLayout::new(6).unwrap();
        let chain = CausalSet::chain(6).unwrap();
        let a = consistent_assignment(&chain, &layout).unwrap();
        for (k, m) in pairs(6) {
            let v: usize = layout
                .register(k, m)
                .iter()
                .enumerate()
                .map(|(i, &b)| usize::from(a[b]) << i)
                .sum();
            assert_eq!(v, m - k - 1);
        }
    }

    #[test]
    fn degree_and_contiguity() {
        for n in 2..=7 {
            let enc = build_exact_bd(n, 1.0).unwrap();
            assert!(enc.polynomial().degree() <= 3);
            let kinds = enc.layout.kinds();
            let rank = |k: &VarKind| match k {
                VarKind::Relation { .. } => 0,
                VarKind::Product { .. } => 1,
                VarKind::Sum { .. } | VarKind::Carry { .. } => 2,
                VarKind::Indicator { .. } => 3,
                VarKind::Chain { .. } => 4,
            };
            assert!(kinds.windows(2).all(|w| rank(&w[0]) <= rank(&w[1])));
            let mut outs: Vec<usize> = enc.layout.definitions().iter().map(|d| d.out).collect();
            outs.sort_unstable();
            assert_eq!(outs, enc.layout.ancillas().collect::<Vec<_>>());
        }
    }

    #[test]
    fn poly_evaluation() {
        let z = PseudoBooleanPoly::zero();
        assert_eq!(z.evaluate(&[]).unwrap(), 0.0);
        let mut p = PseudoBooleanPoly::zero();
        p.add_term(2.5, &[0, 2]);
        assert_eq!(p.evaluate(&[true, false, true]).unwrap(), 2.5);
        assert_eq!(p.evaluate(&[true, true, false]).unwrap(), 0.0);
        assert!(p.evaluate(&[true]).is_err());
        p.add_term(1.0, &[2, 2]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.evaluate(&[false, false, true]).unwrap(), 1.0);
    }

    #[test]
    fn verification_small_n() {
        let lambda = default_lambda(3).unwrap();
        assert_eq!(lambda, 80.0);
        let r = verify_encoding(3, lambda).unwrap();
        assert_eq!(r.sets_checked, 7);
        assert_eq!(r.min_safe_lambda, 8.0);
        let weak = check_encoding(3, 4.0).unwrap();
        assert!(!weak.passed());
        assert!(verify_encoding(3, 4.0).is_err());
    }
}
