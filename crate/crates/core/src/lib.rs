//! Classical simulation of entanglement-entropy measurements on the SYK model.
//!
//! The crate covers the whole pipeline: the Majorana SYK Hamiltonian in
//! Pauli form ([`syk`]), first-order Trotter circuits ([`trotter`]), a dense
//! statevector engine ([`state`]), the swap-test and randomized-measurement
//! purity protocols ([`protocols`]), noise injection and mitigation
//! ([`noise`], [`mitigation`]), packed batch execution ([`executor`]) and the
//! experiment driver ([`experiment`]). The dense [`exact`] module provides
//! the reference values every estimate is checked against.

pub mod circuit;
pub mod error;
pub mod exact;
pub mod executor;
pub mod experiment;
pub mod mitigation;
pub mod noise;
pub mod pauli;
pub mod protocols;
pub mod rng;
pub mod state;
pub mod syk;
pub mod trotter;

pub use error::{Error, Result};

/// Dense complex matrix used by the oracles.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
