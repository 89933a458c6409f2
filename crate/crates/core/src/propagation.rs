//! Piecewise-constant pulse sequences and their exact propagators, plus a
//! midpoint-sampled propagator for smoothly varying controls.

use serde::Serialize;

use crate::error::invalid;
use crate::hamiltonians::{h_full, DriveParams, RydbergParams};
use crate::statespace::{max_abs, propagator, Operator, StateVector};
use crate::{Error, Result};

/// One interval of constant controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseSegment {
    pub duration: f64,
    pub drive1: Option<DriveParams>,
    pub drive2: Option<DriveParams>,
    pub ryd: RydbergParams,
}

impl PulseSegment {
    pub fn new(
        duration: f64,
        drive1: Option<DriveParams>,
        drive2: Option<DriveParams>,
        ryd: RydbergParams,
    ) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(format!("segment duration must be finite and > 0, got {duration}")));
        }
        Ok(Self { duration, drive1, drive2, ryd })
    }

    /// Both atoms driven identically.
    pub fn symmetric(duration: f64, drive: DriveParams, ryd: RydbergParams) -> Result<Self> {
        Self::new(duration, Some(drive), Some(drive), ryd)
    }

    /// Splits the segment at fraction `f` of its duration.
    pub fn split(&self, f: f64) -> Result<(Self, Self)> {
        Ok((
            Self::new(self.duration * f, self.drive1, self.drive2, self.ryd)?,
            Self::new(self.duration * (1.0 - f), self.drive1, self.drive2, self.ryd)?,
        ))
    }
}

/// Time-ordered list of segments; the first segment acts first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseSequence {
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("pulse sequence needs at least one segment"));
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Applies `f` to every segment, e.g. to perturb the physical parameters
    /// while keeping the programmed schedule.
    pub fn map_segments(&self, f: impl FnMut(&PulseSegment) -> Result<PulseSegment>) -> Result<Self> {
        Self::new(self.segments.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

pub fn segment_hamiltonian(seg: &PulseSegment) -> Operator {
    h_full(seg.drive1.as_ref(), seg.drive2.as_ref(), seg.ryd)
}

pub fn segment_unitary(seg: &PulseSegment) -> Operator {
    propagator(&segment_hamiltonian(seg), seg.duration)
}

/// `U_n ··· U_2 U_1`.
pub fn sequence_unitary(seq: &PulseSequence) -> Operator {
    seq.segments()
        .iter()
        .fold(Operator::identity(), |acc, seg| segment_unitary(seg) * acc)
}

pub fn propagate_state(seq: &PulseSequence, psi: &StateVector) -> StateVector {
    seq.segments().iter().fold(*psi, |acc, seg| segment_unitary(seg) * acc)
}

/// Drives of both atoms at one instant.
pub type DrivePair = (Option<DriveParams>, Option<DriveParams>);

/// Controls sampled at the midpoints of a uniform grid over `[0, duration]`.
#[derive(Clone, Debug)]
pub struct SampledControls {
    pub dt: f64,
    /// Midpoint times `(k + ½)·dt`.
    pub times: Vec<f64>,
    pub drives: Vec<DrivePair>,
    pub ryd: RydbergParams,
}

impl SampledControls {
    /// Samples `controls` on `steps` uniform steps covering `[0, duration]`.
    pub fn sample(
        duration: f64,
        steps: usize,
        ryd: RydbergParams,
        controls: impl Fn(f64) -> DrivePair,
    ) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(format!("duration must be finite and > 0, got {duration}")));
        }
        if steps == 0 {
            return Err(invalid("need at least one time step"));
        }
        let dt = duration / steps as f64;
        let times: Vec<f64> = (0..steps).map(|k| (k as f64 + 0.5) * dt).collect();
        let drives = times.iter().map(|&t| controls(t)).collect();
        Ok(Self { dt, times, drives, ryd })
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.times.len() as f64
    }
}

/// Product of exact per-step exponentials of the midpoint Hamiltonians.
pub fn sampled_unitary(c: &SampledControls) -> Operator {
    c.drives.iter().fold(Operator::identity(), |acc, (d1, d2)| {
        propagator(&h_full(d1.as_ref(), d2.as_ref(), c.ryd), c.dt) * acc
    })
}

#[derive(Clone, Debug)]
pub struct ConvergedPropagator {
    pub unitary: Operator,
    pub steps: usize,
    /// Max-entry difference between the last two refinements.
    pub residual: f64,
}

/// Default change threshold between successive step halvings.
pub const SAMPLED_TOLERANCE: f64 = 1e-8;
/// Default cap on step halvings.
pub const MAX_HALVINGS: usize = 12;

/// Halves the step until successive midpoint propagators differ by less
/// than `tolerance` in every entry.
pub fn propagate_converged(
    duration: f64,
    ryd: RydbergParams,
    controls: impl Fn(f64) -> DrivePair,
    initial_steps: usize,
    tolerance: f64,
    max_halvings: usize,
) -> Result<ConvergedPropagator> {
    let mut steps = initial_steps.max(1);
    let mut prev = sampled_unitary(&SampledControls::sample(duration, steps, ryd, &controls)?);
    let mut residual = f64::INFINITY;
    for _ in 0..max_halvings {
        steps *= 2;
        let next = sampled_unitary(&SampledControls::sample(duration, steps, ryd, &controls)?);
        residual = max_abs(&(next - prev));
        prev = next;
        if residual < tolerance {
            return Ok(ConvergedPropagator { unitary: prev, steps, residual });
        }
    }
    Err(Error::NotConverged { halvings: max_halvings, residual, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::{basis_index, unitarity_defect, Level};
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    fn ryd(v: f64) -> RydbergParams {
        RydbergParams::new(v).unwrap()
    }

    #[test]
    fn segment_validation() {
        assert!(PulseSegment::new(0.0, None, None, ryd(0.0)).is_err());
        assert!(PulseSegment::new(-1.0, None, None, ryd(0.0)).is_err());
        assert!(PulseSegment::new(f64::INFINITY, None, None, ryd(0.0)).is_err());
        assert!(PulseSequence::new(vec![]).is_err());
    }

    #[test]
    fn undriven_zero_interaction_is_identity() {
        let seg = PulseSegment::new(3.7, None, None, ryd(0.0)).unwrap();
        assert!(max_abs(&(segment_unitary(&seg) - Operator::identity())) < 1e-15);
    }

    #[test]
    fn pi_pulse_on_atom_one() {
        for v in [0.0, 3.0, 100.0] {
            let omega = 1.7;
            let d = DriveParams::resonant(omega).unwrap();
            let seg = PulseSegment::new(PI / omega, Some(d), None, ryd(v)).unwrap();
            let u = segment_unitary(&seg);
            let from = basis_index(Level::G1, Level::G0);
            let to = basis_index(Level::Ryd, Level::G0);
            assert!((u[(to, from)] - C64::new(0.0, -1.0)).norm() < 1e-12);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn single_segment_sequence_equals_segment() {
        let d = DriveParams::new(1.2, -0.4, 0.3).unwrap();
        let seg = PulseSegment::symmetric(0.9, d, ryd(2.0)).unwrap();
        let seq = PulseSequence::new(vec![seg]).unwrap();
        assert!(max_abs(&(sequence_unitary(&seq) - segment_unitary(&seg))) < 1e-15);
    }

    #[test]
    fn split_segment_reproduces_whole() {
        let d = DriveParams::new(0.8, 0.6, -1.1).unwrap();
        let seg = PulseSegment::new(2.3, Some(d), None, ryd(1.5)).unwrap();
        let (a, b) = seg.split(0.37).unwrap();
        let seq = PulseSequence::new(vec![a, b]).unwrap();
        assert!(max_abs(&(sequence_unitary(&seq) - segment_unitary(&seg))) < 1e-10);
    }

    #[test]
    fn sampled_constant_controls_match_segment() {
        let d = DriveParams::new(1.1, 0.2, 0.4).unwrap();
        let seg = PulseSegment::symmetric(2.0, d, ryd(0.7)).unwrap();
        let c = SampledControls::sample(2.0, 16, ryd(0.7), |_| (Some(d), Some(d))).unwrap();
        assert!((c.duration() - 2.0).abs() < 1e-15);
        assert!(max_abs(&(sampled_unitary(&c) - segment_unitary(&seg))) < 1e-8);
    }

    #[test]
    fn non_convergence_is_reported() {
        let controls = |t: f64| {
            let d = DriveParams::new(5.0 + 4.0 * (3.0 * t).sin(), 0.0, 0.0).unwrap();
            (Some(d), Some(d))
        };
        match propagate_converged(4.0, ryd(1.0), controls, 2, 1e-14, 2) {
            Err(Error::NotConverged { halvings, residual, .. }) => {
                assert_eq!(halvings, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
