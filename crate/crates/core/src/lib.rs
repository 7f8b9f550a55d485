//! Polynomial phase gates for the GKP bosonic code.
//!
//! The crate is organised bottom-up:
//!
//! * [`polyalg`] — exact rational polynomials, the integer-valued basis
//!   `L_n`, and synthesis of lexicographically minimal gate polynomials.
//! * [`symplectic`] — Gaussian circuit algebra over `N` modes: generators,
//!   covariance propagation, homodyne conditioning and the biasing identities.
//! * [`fock`] — truncated Fock-space operators, approximate GKP codewords,
//!   polynomial phase gates and Pauli measurement operators.
//! * [`channel`] — the effective logical channel, average gate fidelity,
//!   T-state fidelity, parameter sweeps and the vacuum-state baseline.
//! * [`analytic`] — closed-form error moments, the twirled cubic density,
//!   the fault-tolerance lower bound and lattice-sum characteristic functions.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod fock;
pub mod polyalg;
pub mod symplectic;

pub use error::{Error, Result};
