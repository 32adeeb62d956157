//! Numerical toolkit for detecting and repairing complete-positivity and
//! trace-preservation violations in approximate open-quantum-system
//! dynamical maps.
//!
//! An approximate map (Redfield, Born, ...) is carried to its Choi operator;
//! physicality is a positivity-plus-partial-trace check there. Unphysical
//! Choi operators are replaced by their Frobenius-nearest physical ones via
//! a semidefinite least-squares projection ([`projection`]), which provably
//! never moves the map farther from the exact dynamics. A Kossakowski-form
//! Redfield solver ([`redfield`]) and closed-form qubit damping benchmarks
//! ([`models`]) provide the dynamics to regularize, and [`diagnostics`]
//! turns trajectories into the distinguishability / distance / violation
//! series used to compare methods.

pub mod choi;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod optim;
pub mod projection;
pub mod quad;
pub mod random;
pub mod redfield;

pub use error::{Error, Result};
