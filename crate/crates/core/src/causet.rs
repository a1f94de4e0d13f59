//! Causal matrices, causal sets and their combinatorics.
//!
//! A configuration over `n` naturally labelled elements is stored as the
//! strict upper triangle of its causal matrix, packed into a `u64` in
//! lexicographic pair order `(0,1), (0,2), .., (0,n-1), (1,2), .., (n-2,n-1)`.
//! Bit `k` of the packed word is relation `k`; the same index is used as the
//! qubit index by the Hamiltonian builders and as the bit of the
//! computational-basis index by the state-vector simulator.
//!
//! Element labels are 0-based throughout the Rust API. The text format and
//! [`pair_index`] use the 1-based labels of the external interfaces.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rand::Rng;

use crate::error::{usage, Error, Result};

/// Hard limit imposed by the `u64` packing: 11 elements give 55 relation bits.
pub const MAX_ELEMENTS: usize = 11;

/// Default cap for exhaustive enumeration and dense simulation.
pub const DEFAULT_MAX_CARDINALITY: usize = 7;

/// Number of relation bits (qubits) for `n` elements.
pub const fn qubit_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Offset of the 0-based pair `(i, j)`, `i < j < n`, in the packed word.
#[inline]
pub(crate) const fn pair_offset(n: usize, i: usize, j: usize) -> usize {
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Bit index of the pair `(i, j)` given in 1-based element labels.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || i >= j || j > n {
        return Err(usage!("pair ({i},{j}) is not 1 <= i < j <= {n}"));
    }
    Ok(pair_offset(n, i - 1, j - 1))
}

/// Inverse of the packing order: the 0-based pairs of `n` elements.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// An arbitrary strictly upper-triangular relation configuration.
///
/// Such a configuration is always acyclic but need not be transitive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CausalMatrix {
    n: usize,
    bits: u64,
}

impl CausalMatrix {
    /// The configuration with no relations.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_bits(n, 0)
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(Error::ResourceLimit(format!(
                "cardinality {n} outside 1..={MAX_ELEMENTS}"
            )));
        }
        let q = qubit_count(n);
        if q < 64 && bits >> q != 0 {
            return Err(usage!("bit pattern {bits:#x} has bits beyond q = {q}"));
        }
        Ok(Self { n, bits })
    }

    /// Builds a configuration from 0-based related pairs.
    pub fn from_relations(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(n)?;
        for &(i, j) in relations {
            if i >= j || j >= n {
                return Err(usage!("pair ({i},{j}) is not 0 <= i < j < {n}"));
            }
            m.set(i, j, true);
        }
        Ok(m)
    }

    /// The total order `0 < 1 < .. < n-1`.
    pub fn chain(n: usize) -> Result<Self> {
        let q = qubit_count(n);
        Self::from_bits(n, if q == 64 { u64::MAX } else { (1u64 << q) - 1 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        qubit_count(self.n)
    }

    #[inline]
    pub fn related(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < j && j < self.n);
        self.bits >> pair_offset(self.n, i, j) & 1 == 1
    }

    #[inline]
    pub fn bit(&self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let mask = 1u64 << pair_offset(self.n, i, j);
        if value {
            self.bits |= mask;
        } else {
            self.bits &= !mask;
        }
    }

    /// Copy with relation bit `k` inverted.
    #[must_use]
    pub fn flipped(&self, k: usize) -> Self {
        debug_assert!(k < self.qubits());
        Self {
            n: self.n,
            bits: self.bits ^ (1u64 << k),
        }
    }

    pub fn relation_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Future of each element as an element bitmask.
    pub(crate) fn successor_masks(&self) -> [u16; MAX_ELEMENTS] {
        let mut succ = [0u16; MAX_ELEMENTS];
        let n = self.n;
        for (i, s) in succ.iter_mut().enumerate().take(n) {
            let width = n - i - 1;
            if width == 0 {
                continue;
            }
            let row = (self.bits >> pair_offset(n, i, i + 1)) & ((1u64 << width) - 1);
            *s = (row << (i + 1)) as u16;
        }
        succ
    }

    pub(crate) fn predecessor_masks(&self) -> [u16; MAX_ELEMENTS] {
        let succ = self.successor_masks();
        let mut pred = [0u16; MAX_ELEMENTS];
        for (i, &s) in succ.iter().enumerate().take(self.n) {
            let mut rest = s;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                pred[j] |= 1 << i;
                rest &= rest - 1;
            }
        }
        pred
    }

    fn from_successor_masks(n: usize, succ: &[u16]) -> Self {
        let mut bits = 0u64;
        for (i, &s) in succ.iter().enumerate().take(n) {
            let width = n - i - 1;
            if width == 0 {
                continue;
            }
            let row = (u64::from(s) >> (i + 1)) & ((1u64 << width) - 1);
            bits |= row << pair_offset(n, i, i + 1);
        }
        Self { n, bits }
    }

    /// Number of triples `i < j < k` with `i ≺ j`, `j ≺ k` but not `i ≺ k`.
    pub fn count_violations(&self) -> u32 {
        let succ = self.successor_masks();
        let mut r = 0;
        for i in 0..self.n {
            let mut rest = succ[i];
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                r += (succ[j] & !succ[i]).count_ones();
                rest &= rest - 1;
            }
        }
        r
    }

    pub fn is_causal_set(&self) -> bool {
        self.count_violations() == 0
    }

    /// Smallest transitive configuration containing `self`.
    pub fn transitive_closure(&self) -> CausalSet {
        let mut succ = self.successor_masks();
        // Later elements are closed first, so one reverse sweep suffices.
        for i in (0..self.n).rev() {
            let mut rest = succ[i];
            let mut closed = succ[i];
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                closed |= succ[j];
                rest &= rest - 1;
            }
            succ[i] = closed;
        }
        CausalSet {
            matrix: Self::from_successor_masks(self.n, &succ),
        }
    }

    /// `|{l : k ≺ l ≺ m}|` computed on the raw configuration.
    pub fn interval_cardinality(&self, k: usize, m: usize) -> u32 {
        debug_assert!(k < m && m < self.n);
        (k + 1..m)
            .filter(|&l| self.related(k, l) && self.related(l, m))
            .count() as u32
    }

    /// Abundances `N_j`, `j = 0..n-2`, over the related pairs of the raw
    /// configuration.
    pub fn abundances(&self) -> AbundanceVector {
        let succ = self.successor_masks();
        let pred = self.predecessor_masks();
        let mut counts = vec![0u64; self.n.saturating_sub(1)];
        for k in 0..self.n {
            let mut rest = succ[k];
            while rest != 0 {
                let m = rest.trailing_zeros() as usize;
                counts[(succ[k] & pred[m]).count_ones() as usize] += 1;
                rest &= rest - 1;
            }
        }
        AbundanceVector { counts }
    }

    /// Relation string in pair order, one `0`/`1` per bit.
    pub fn bit_string(&self) -> String {
        (0..self.qubits())
            .map(|k| if self.bit(k) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for CausalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self.bit_string())
    }
}

impl fmt::Debug for CausalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CausalMatrix({self})")
    }
}

impl FromStr for CausalMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, body) = s
            .split_once(':')
            .ok_or_else(|| usage!("expected `N:bits`, got {s:?}"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| usage!("bad cardinality in {s:?}"))?;
        let q = qubit_count(n);
        if body.len() != q {
            return Err(usage!("{s:?}: expected {q} relation bits, found {}", body.len()));
        }
        let mut bits = 0u64;
        for (k, c) in body.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << k,
                _ => return Err(usage!("{s:?}: invalid relation character {c:?}")),
            }
        }
        Self::from_bits(n, bits)
    }
}

/// A transitive [`CausalMatrix`]: a naturally labelled causal set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CausalSet {
    matrix: CausalMatrix,
}

impl CausalSet {
    pub fn new(matrix: CausalMatrix) -> Result<Self> {
        match matrix.count_violations() {
            0 => Ok(Self { matrix }),
            r => Err(usage!("{matrix} breaks transitivity in {r} triple(s)")),
        }
    }

    pub fn antichain(n: usize) -> Result<Self> {
        Ok(Self {
            matrix: CausalMatrix::empty(n)?,
        })
    }

    pub fn chain(n: usize) -> Result<Self> {
        Ok(Self {
            matrix: CausalMatrix::chain(n)?,
        })
    }

    pub fn matrix(&self) -> CausalMatrix {
        self.matrix
    }
}

impl Deref for CausalSet {
    type Target = CausalMatrix;

    fn deref(&self) -> &CausalMatrix {
        &self.matrix
    }
}

impl TryFrom<CausalMatrix> for CausalSet {
    type Error = Error;

    fn try_from(m: CausalMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl fmt::Display for CausalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.matrix.fmt(f)
    }
}

impl fmt::Debug for CausalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CausalSet({})", self.matrix)
    }
}

impl FromStr for CausalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Counts `N_0 ..= N_{n-2}` of related pairs by interval cardinality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbundanceVector {
    pub counts: Vec<u64>,
}

impl AbundanceVector {
    pub fn get(&self, j: usize) -> u64 {
        self.counts.get(j).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn interval_cardinality(s: &CausalSet, k: usize, m: usize) -> u32 {
    s.interval_cardinality(k, m)
}

pub fn abundances(s: &CausalSet) -> AbundanceVector {
    s.abundances()
}

/// Uniform random relation bits followed by transitive closure.
pub fn random_causal_set<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CausalSet> {
    let q = qubit_count(n);
    let raw: u64 = rng.random();
    let bits = if q >= 64 { raw } else { raw & ((1u64 << q) - 1) };
    Ok(CausalMatrix::from_bits(n, bits)?.transitive_closure())
}

/// All causal sets of cardinality `n` in ascending bit-pattern order,
/// subject to [`DEFAULT_MAX_CARDINALITY`].
pub fn enumerate_causal_sets(n: usize) -> Result<Vec<CausalSet>> {
    enumerate_causal_sets_with_cap(n, DEFAULT_MAX_CARDINALITY)
}

pub fn enumerate_causal_sets_with_cap(n: usize, cap: usize) -> Result<Vec<CausalSet>> {
    if n > cap.min(MAX_ELEMENTS) {
        return Err(Error::ResourceLimit(format!(
            "enumeration of cardinality {n} exceeds the cap of {}",
            cap.min(MAX_ELEMENTS)
        )));
    }
    if n == 0 {
        return Err(usage!("cardinality must be positive"));
    }
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    let mut out = Vec::new();
    let mut m = CausalMatrix::empty(n)?;
    assign(&pair_list, 0, &mut m, &mut out);
    out.sort_unstable();
    Ok(out)
}

// Depth-first over pairs in packing order. A triple (a, i, j) is complete once
// its lexicographically last pair (i, j) is assigned, so setting C_ij = 1 only
// needs C_ai => C_aj for every a < i.
fn assign(pair_list: &[(usize, usize)], k: usize, m: &mut CausalMatrix, out: &mut Vec<CausalSet>) {
    let Some(&(i, j)) = pair_list.get(k) else {
        out.push(CausalSet { matrix: *m });
        return;
    };
    m.set(i, j, false);
    assign(pair_list, k + 1, m, out);
    if (0..i).all(|a| !m.related(a, i) || m.related(a, j)) {
        m.set(i, j, true);
        assign(pair_list, k + 1, m, out);
        m.set(i, j, false);
    }
}

/// The enumerated state space of one cardinality with index lookup.
#[derive(Clone, Debug)]
pub struct CausalSetSpace {
    n: usize,
    sets: Vec<CausalSet>,
    keys: Vec<u64>,
}

impl CausalSetSpace {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_MAX_CARDINALITY)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        let sets = enumerate_causal_sets_with_cap(n, cap)?;
        let keys = sets.iter().map(|s| s.bits()).collect();
        Ok(Self { n, sets, keys })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[CausalSet] {
        &self.sets
    }

    pub fn get(&self, idx: usize) -> &CausalSet {
        &self.sets[idx]
    }

    /// Position of a bit pattern, `None` for non-causal configurations.
    pub fn index_of_bits(&self, bits: u64) -> Option<usize> {
        self.keys.binary_search(&bits).ok()
    }

    pub fn index_of(&self, m: &CausalMatrix) -> Option<usize> {
        if m.n() != self.n {
            return None;
        }
        self.index_of_bits(m.bits())
    }
}
