//! Simulation library for quantum-enhanced Markov chain Monte Carlo sampling
//! of causal sets.
//!
//! Modules, bottom up:
//!
//! * [`causet`]: bit-packed causal matrices, transitivity, enumeration, abundances.
//! * [`action`]: Benincasa–Dowker actions (smeared 4d, general d, exact 2d).
//! * [`pauli`]: Pauli-string Hamiltonians for the constraint, action and mixer terms.
//! * [`qsim`]: dense state-vector Trotter evolution and measurement.
//! * [`proposals`]: classical and quantum proposal moves and their exact kernels.
//! * [`mcmc`]: acceptance rules and chain execution.
//! * [`spectral`]: transition matrices, spectral gaps, jackknife errors, scaling fits.
//! * [`exactbd`]: the ancilla-based cubic encoding of the exact 2d action.

pub mod action;
pub mod causet;
pub mod error;
pub mod exactbd;
pub mod mcmc;
pub mod pauli;
pub mod proposals;
pub mod qsim;
pub mod spectral;

pub use causet::{CausalMatrix, CausalSet, CausalSetSpace};
pub use error::{Error, Result};
