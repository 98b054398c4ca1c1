//! Simulation of pre- and post-selected (PPS) quantum systems.
//!
//! The crate covers four layers, bottom to top:
//!
//! - [`hilbert`]: dense complex linear algebra for small Hilbert spaces
//!   (states, operators, tensor products, Pauli strings, spectral observables).
//! - [`pps`]: ABL conditional probabilities for ideal intermediate
//!   measurements, weak values, definiteness detection and sequential chains.
//! - [`weakmeas`]: the von Neumann pointer model in the momentum
//!   representation, at arbitrary coupling strength, plus a seeded sampler.
//! - [`contextuality`]: noncontextual value-assignment search over commuting
//!   contexts and GF(2) parity certificates of unsatisfiability.
//!
//! [`scenarios`] binds these to the canonical experiments (three boxes, the
//! Mermin nonet, an EPR pair with an ancilla, GHZ) and evaluates their
//! expected values.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contextuality;
mod error;
pub mod hilbert;
pub mod pps;
pub mod scenarios;
pub mod weakmeas;

pub use error::{Error, Result};
pub use hilbert::{Complex, Operator, SpectralObservable, StateVector, Tolerances};
pub use pps::{OutcomeDistribution, PpsEnsemble, WeakValue};
