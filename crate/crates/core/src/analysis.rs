//! Gate characterization: diagonal phases, controlled phase, leakage,
//! controlled-phase fidelity and actuation-cost proxies.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::propagation::{segment_hamiltonian, sequence_unitary, PulseSequence};
use crate::statespace::{basis_levels, propagator, Level, Operator, StateVector, DIM};

/// Product-basis indices of `|00⟩, |01⟩, |10⟩, |11⟩`.
pub const COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];

/// Below this return amplitude a diagonal phase is flagged unreliable.
pub const RELIABLE_AMPLITUDE: f64 = 0.5;

/// Wraps an angle into (−π, π]; −π maps to π.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Diagonal return amplitudes of the computational states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseReport {
    /// `(φ₀₀, φ₀₁, φ₁₀, φ₁₁)`
    pub phases: [f64; 4],
    /// `1 − |⟨b|U|b⟩|²` per computational state.
    pub leakage: [f64; 4],
    /// False where `|⟨b|U|b⟩| < 0.5` (evolution far from cyclic).
    pub reliable: [bool; 4],
}

impl PhaseReport {
    pub fn from_diagonal(diag: [C64; 4]) -> Self {
        Self {
            phases: diag.map(|z| z.arg()),
            leakage: diag.map(|z| (1.0 - z.norm_sqr()).max(0.0)),
            reliable: diag.map(|z| z.norm() >= RELIABLE_AMPLITUDE),
        }
    }

    pub fn leakage_max(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    pub fn all_reliable(&self) -> bool {
        self.reliable.iter().all(|&r| r)
    }
}

pub fn phases_and_leakage(u: &Operator) -> PhaseReport {
    PhaseReport::from_diagonal(COMPUTATIONAL.map(|i| u[(i, i)]))
}

/// Phase report of a 4×4 gate on `{|00⟩, |01⟩, |10⟩, |11⟩}`.
pub fn phases_and_leakage_4(u: &Matrix4<C64>) -> PhaseReport {
    PhaseReport::from_diagonal([0, 1, 2, 3].map(|i| u[(i, i)]))
}

/// `φ₁₁ + φ₀₀ − φ₁₀ − φ₀₁` without wrapping.
pub fn controlled_phase_unwrapped(phases: &[f64; 4]) -> f64 {
    let [p00, p01, p10, p11] = *phases;
    p11 + p00 - p10 - p01
}

/// Controlled phase wrapped into (−π, π].
pub fn controlled_phase(phases: &[f64; 4]) -> f64 {
    wrap_phase(controlled_phase_unwrapped(phases))
}

/// `c_k = conj(t_k)·U_kk` on the computational diagonal for target
/// `diag(1, 1, 1, e^{iφ})`, plus `Tr(M M†)`.
fn fidelity_terms(u: &Operator, target_phi: f64) -> ([C64; 4], f64) {
    let target = [0.0, 0.0, 0.0, target_phi].map(|p| C64::from_polar(1.0, -p));
    let mut c = [C64::new(0.0, 0.0); 4];
    for (k, &i) in COMPUTATIONAL.iter().enumerate() {
        c[k] = target[k] * u[(i, i)];
    }
    let frob = COMPUTATIONAL
        .iter()
        .flat_map(|&i| COMPUTATIONAL.iter().map(move |&j| (i, j)))
        .map(|(i, j)| u[(i, j)].norm_sqr())
        .sum();
    (c, frob)
}

/// Average gate fidelity `(|Tr M|² + Tr(M M†))/20` with
/// `M = P·(L·U_t)†·U·P`, `U_t = diag(1, 1, 1, e^{iφ})` and the local Z phases
/// `L = diag(1, e^{ia}, e^{ib}, e^{i(a+b)})` held fixed.
pub fn average_fidelity_cphase(u: &Operator, target_phi: f64, local: (f64, f64)) -> f64 {
    let (c, frob) = fidelity_terms(u, target_phi);
    let (a, b) = local;
    let tr = c[0]
        + C64::from_polar(1.0, -a) * c[1]
        + C64::from_polar(1.0, -b) * c[2]
        + C64::from_polar(1.0, -(a + b)) * c[3];
    (tr.norm_sqr() + frob) / 20.0
}

const PHASE_GRID: usize = 720;
const PHASE_TOL: f64 = 1e-9;

/// Average gate fidelity against a controlled-phase target, maximized over
/// single-qubit Z phases.
///
/// For fixed `b` the trace is `A(b) + e^{−ia} B(b)`, so the best `a` gives
/// `|A| + |B|`; the remaining one-dimensional maximization over `b` is a
/// coarse grid followed by golden-section refinement.
pub fn fidelity_cphase(u: &Operator, target_phi: f64) -> f64 {
    let (c, frob) = fidelity_terms(u, target_phi);
    let g = |b: f64| {
        let e = C64::from_polar(1.0, -b);
        (c[0] + e * c[2]).norm() + (c[1] + e * c[3]).norm()
    };
    let step = TAU / PHASE_GRID as f64;
    let (best_k, _) = (0..PHASE_GRID)
        .map(|k| (k, g(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let b_star = golden_max(&g, (best_k as f64 - 1.0) * step, (best_k as f64 + 1.0) * step, PHASE_TOL);
    let best = g(b_star).max(g(best_k as f64 * step));
    ((best * best + frob) / 20.0).min(1.0)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Σ over segments and atoms of Ω·duration.
pub fn pulse_area(seq: &PulseSequence) -> f64 {
    seq.segments()
        .iter()
        .map(|s| {
            let omega: f64 = [s.drive1, s.drive2].iter().flatten().map(|d| d.rabi()).sum();
            omega * s.duration
        })
        .sum()
}

/// Number of Rydberg excitations of each product state.
fn rydberg_count(index: usize) -> f64 {
    let (a, b) = basis_levels(index);
    [a, b].iter().filter(|&&l| l == Level::Ryd).count() as f64
}

pub fn rydberg_population(psi: &StateVector) -> f64 {
    (0..DIM).map(|i| rydberg_count(i) * psi[i].norm_sqr()).sum()
}

/// Minimum number of time samples per segment for [`rydberg_time`].
pub const MIN_SAMPLES_PER_SEGMENT: usize = 200;

/// Time integral of the Rydberg excitation number (single excitation counts
/// 1, double counts 2), averaged over the four computational initial states.
///
/// Each segment is split into an even number of at least
/// `samples_per_segment` intervals and integrated with Simpson's rule.
pub fn rydberg_time(seq: &PulseSequence, samples_per_segment: usize) -> f64 {
    let mut n = samples_per_segment.max(MIN_SAMPLES_PER_SEGMENT);
    if n % 2 == 1 {
        n += 1;
    }
    let total: f64 = COMPUTATIONAL
        .iter()
        .map(|&start| {
            let mut psi = StateVector::zeros();
            psi[start] = C64::new(1.0, 0.0);
            let mut integral = 0.0;
            for seg in seq.segments() {
                let h = segment_hamiltonian(seg);
                let dt = seg.duration / n as f64;
                let step = propagator(&h, dt);
                let mut acc = rydberg_population(&psi);
                for k in 1..=n {
                    psi = step * psi;
                    let w = if k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * rydberg_population(&psi);
                }
                integral += acc * dt / 3.0;
            }
            integral
        })
        .sum();
    total / COMPUTATIONAL.len() as f64
}

/// Full characterization of a gate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateReport {
    /// `[φ₀₀, φ₀₁, φ₁₀, φ₁₁]`
    pub phases: [f64; 4],
    pub controlled_phase_wrapped: f64,
    pub controlled_phase_unwrapped: f64,
    pub leakage: [f64; 4],
    pub leakage_max: f64,
    pub phases_reliable: bool,
    pub target_phase: f64,
    pub fidelity: f64,
    pub gate_time: f64,
    pub pulse_area: f64,
    pub rydberg_time: f64,
}

impl GateReport {
    /// Propagates `seq` and characterizes it against `diag(1, 1, 1, e^{iφ})`.
    pub fn analyze(seq: &PulseSequence, target_phi: f64) -> Self {
        let u = sequence_unitary(seq);
        let mut report = Self::from_unitary(&u, target_phi);
        report.gate_time = seq.total_duration();
        report.pulse_area = pulse_area(seq);
        report.rydberg_time = rydberg_time(seq, MIN_SAMPLES_PER_SEGMENT);
        report
    }

    /// Unitary-only part of the report; schedule-derived fields are zero.
    pub fn from_unitary(u: &Operator, target_phi: f64) -> Self {
        let p = phases_and_leakage(u);
        Self {
            phases: p.phases,
            controlled_phase_wrapped: controlled_phase(&p.phases),
            controlled_phase_unwrapped: controlled_phase_unwrapped(&p.phases),
            leakage: p.leakage,
            leakage_max: p.leakage_max(),
            phases_reliable: p.all_reliable(),
            target_phase: target_phi,
            fidelity: fidelity_cphase(u, target_phi),
            gate_time: 0.0,
            pulse_area: 0.0,
            rydberg_time: 0.0,
        }
    }
}
