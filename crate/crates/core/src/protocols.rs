//! Gate protocols: the blockade π–2π–π sequence and the four-segment
//! phase-toggled geometric sequence, with their closed-form gate times.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::invalid;
use crate::hamiltonians::{DriveParams, RydbergParams};
use crate::propagation::{PulseSegment, PulseSequence};
use crate::Result;

/// Seed κ for the controlled-Z working point.
pub const CZ_KAPPA_SEED: f64 = 1.65;

/// Laser phases of the four geometric segments.
pub const GEOMETRIC_PHASES: [f64; 4] = [0.0, FRAC_PI_2, 0.0, FRAC_PI_2];

/// Weak-interaction geometric gate, parameterized by `κ = Ω/V` and `V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometricProtocolParams {
    kappa: f64,
    v: f64,
}

impl GeometricProtocolParams {
    pub fn new(kappa: f64, v: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid(format!("kappa must be finite and > 0, got {kappa}")));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("interaction V must be finite and > 0, got {v}")));
        }
        let p = Self { kappa, v };
        if !(p.segment_time().is_finite() && p.segment_time() > 0.0) {
            return Err(invalid("segment time is not finite"));
        }
        Ok(p)
    }

    /// Same protocol specified by `(κ, Ω)`, with `V = Ω/κ`.
    pub fn from_rabi(kappa: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(format!("Rabi frequency must be finite and > 0, got {omega}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid(format!("kappa must be finite and > 0, got {kappa}")));
        }
        Self::new(kappa, omega / kappa)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn rabi(&self) -> f64 {
        self.kappa * self.v
    }

    pub fn detuning(&self) -> f64 {
        -self.v / 2.0
    }

    /// Generalized frequency `S = √(4Ω² + V²/4)`.
    pub fn cyclic_frequency(&self) -> f64 {
        let omega = self.rabi();
        (4.0 * omega * omega + self.v * self.v / 4.0).sqrt()
    }

    /// Segment time `T = 2π/S`.
    pub fn segment_time(&self) -> f64 {
        2.0 * PI / self.cyclic_frequency()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockadeProtocolParams {
    rabi: f64,
    v: f64,
}

impl BlockadeProtocolParams {
    pub fn new(rabi: f64, v: f64) -> Result<Self> {
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(invalid(format!("Rabi frequency must be finite and > 0, got {rabi}")));
        }
        if !v.is_finite() {
            return Err(invalid(format!("interaction V must be finite, got {v}")));
        }
        Ok(Self { rabi, v })
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn v(&self) -> f64 {
        self.v
    }
}

/// Four segments of duration `T` with `Ω = κV`, `Δ = −V/2` on both atoms and
/// laser phases `(0, π/2, 0, π/2)`.
pub fn geometric_sequence(p: &GeometricProtocolParams) -> PulseSequence {
    let ryd = RydbergParams { v: p.v };
    let t = p.segment_time();
    let segments = GEOMETRIC_PHASES
        .iter()
        .map(|&phase| {
            let d = DriveParams::new(p.rabi(), p.detuning(), phase).expect("validated parameters");
            PulseSegment::symmetric(t, d, ryd).expect("positive segment time")
        })
        .collect();
    PulseSequence::new(segments).expect("four segments")
}

/// π pulse on atom 1, 2π pulse on atom 2, π pulse on atom 1, all resonant
/// with zero phase.
pub fn blockade_pdp_sequence(p: &BlockadeProtocolParams) -> PulseSequence {
    let ryd = RydbergParams { v: p.v };
    let d = DriveParams::resonant(p.rabi).expect("validated parameters");
    let pi_time = PI / p.rabi;
    let segments = vec![
        PulseSegment::new(pi_time, Some(d), None, ryd),
        PulseSegment::new(2.0 * pi_time, None, Some(d), ryd),
        PulseSegment::new(pi_time, Some(d), None, ryd),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("positive durations");
    PulseSequence::new(segments).expect("three segments")
}

/// `T_t = 8π / (Ω √(4 + 1/(4κ²)))`.
///
/// # Panics
/// If `kappa` or `omega` is not strictly positive.
pub fn gate_time_geometric(kappa: f64, omega: f64) -> f64 {
    assert!(kappa > 0.0 && omega > 0.0, "kappa and omega must be > 0");
    8.0 * PI / (omega * (4.0 + 1.0 / (4.0 * kappa * kappa)).sqrt())
}

/// `T_b = 4π/Ω`.
///
/// # Panics
/// If `omega` is not strictly positive.
pub fn gate_time_blockade(omega: f64) -> f64 {
    assert!(omega > 0.0, "omega must be > 0");
    4.0 * PI / omega
}
