//! Two-atom Rydberg gate simulator.
//!
//! Each atom carries the levels `|0⟩`, `|1⟩` and a Rydberg level `|r⟩`; the
//! pair lives in the 9-dimensional product space. The crate builds the
//! driven two-atom Hamiltonian and its invariant blocks, propagates
//! piecewise-constant pulse sequences exactly, constructs the blockade
//! π–2π–π gate and the four-segment phase-toggled geometric gate, extracts
//! controlled phases, leakage and fidelities, calibrates the geometric gate to a
//! target controlled phase, and runs seeded Monte-Carlo noise studies.
//!
//! Units: ħ = 1. All frequencies (Ω, Δ, V) are angular frequencies in a
//! reference unit of the caller's choosing, times are in the inverse unit.

pub mod analysis;
pub mod calibration;
mod error;
pub mod hamiltonians;
pub mod propagation;
pub mod protocols;
pub mod robustness;
pub mod statespace;

pub use error::{Error, Result};
