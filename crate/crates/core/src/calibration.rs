//! κ sweeps, calibration of the geometric gate to a target controlled phase,
//! and the blockade V-independence scan.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{fidelity_cphase, phases_and_leakage, controlled_phase, controlled_phase_unwrapped, wrap_phase, GateReport};
use crate::error::invalid;
use crate::propagation::sequence_unitary;
use crate::protocols::{
    blockade_pdp_sequence, gate_time_blockade, gate_time_geometric, geometric_sequence,
    BlockadeProtocolParams, GeometricProtocolParams, CZ_KAPPA_SEED,
};
use crate::{Error, Result};

/// Points of the coarse φ_c(κ) scan preceding bisection.
pub const CALIBRATION_SCAN_POINTS: usize = 200;
/// Required `|wrap(φ_c(κ*) − target)|`.
pub const CALIBRATION_TOL: f64 = 1e-6;
/// Bisection stops once the κ bracket is this narrow.
const KAPPA_WIDTH_TOL: f64 = 1e-13;
/// Smallest V/Ω accepted by the blockade scan.
pub const BLOCKADE_MIN_V_OVER_OMEGA: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub kappa: f64,
    pub v_over_omega: f64,
    pub gate_time_omega_over_pi: f64,
    pub phi_c_wrapped: f64,
    pub phi_c_unwrapped: f64,
    pub leakage_max: f64,
    pub fidelity_cz: f64,
}

/// Geometric gate at `(κ, Ω = 1)`. The propagator depends on κ only, so the
/// record is valid for any Ω after scaling time by 1/Ω.
pub fn sweep_point(kappa: f64) -> Result<SweepRecord> {
    let p = GeometricProtocolParams::from_rabi(kappa, 1.0)?;
    let u = sequence_unitary(&geometric_sequence(&p));
    let ph = phases_and_leakage(&u);
    Ok(SweepRecord {
        kappa,
        v_over_omega: 1.0 / kappa,
        gate_time_omega_over_pi: gate_time_geometric(kappa, 1.0) / PI,
        phi_c_wrapped: controlled_phase(&ph.phases),
        phi_c_unwrapped: controlled_phase_unwrapped(&ph.phases),
        leakage_max: ph.leakage_max(),
        fidelity_cz: fidelity_cphase(&u, PI),
    })
}

/// `n` records at uniform κ spacing over `[k_min, k_max]`, ordered by κ.
pub fn sweep_kappa(k_min: f64, k_max: f64, n: usize) -> Result<Vec<SweepRecord>> {
    if !(k_min.is_finite() && k_max.is_finite() && 0.0 < k_min && k_min < k_max) {
        return Err(invalid(format!("need 0 < k_min < k_max, got [{k_min}, {k_max}]")));
    }
    if n < 2 {
        return Err(invalid(format!("sweep needs n >= 2 points, got {n}")));
    }
    linspace(k_min, k_max, n).into_par_iter().map(sweep_point).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Geometric gate report at `(κ, Ω)`.
pub fn geometric_report(kappa: f64, omega: f64, target_phi: f64) -> Result<GateReport> {
    let p = GeometricProtocolParams::from_rabi(kappa, omega)?;
    Ok(GateReport::analyze(&geometric_sequence(&p), target_phi))
}

fn phase_error(kappa: f64, target: f64) -> Result<f64> {
    let p = GeometricProtocolParams::from_rabi(kappa, 1.0)?;
    let ph = phases_and_leakage(&sequence_unitary(&geometric_sequence(&p)));
    Ok(wrap_phase(controlled_phase_unwrapped(&ph.phases) - target))
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    /// `wrap(φ_c(κ*) − target)`.
    pub residual: f64,
    pub bisection_steps: usize,
    /// Report at `(κ*, Ω = 1)`.
    pub report: GateReport,
}

/// Calibrates κ so that the geometric gate's controlled phase hits `target`,
/// starting from the seed κ = 1.65.
pub fn calibrate_kappa(target: f64, bracket: (f64, f64)) -> Result<Calibration> {
    calibrate_kappa_seeded(target, bracket, CZ_KAPPA_SEED)
}

/// Scans `e(κ) = wrap(φ_c(κ) − target)` on 200 points, picks the sign change
/// nearest `seed` that is a genuine zero (not the ±π branch jump) and
/// bisects it.
pub fn calibrate_kappa_seeded(target: f64, bracket: (f64, f64), seed: f64) -> Result<Calibration> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(invalid(format!("calibration bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    if !target.is_finite() {
        return Err(invalid("target phase must be finite"));
    }
    let kappas = linspace(lo, hi, CALIBRATION_SCAN_POINTS);
    let errors: Vec<f64> = kappas
        .par_iter()
        .map(|&k| phase_error(k, target))
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, f64)> = None;
    for i in 0..kappas.len() - 1 {
        let (a, b) = (errors[i], errors[i + 1]);
        let crosses = a == 0.0 || a.signum() != b.signum();
        if crosses && (a - b).abs() < PI {
            let dist = (0.5 * (kappas[i] + kappas[i + 1]) - seed).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((i, dist));
            }
        }
    }
    let Some((i, _)) = best else {
        let scan = kappas
            .iter()
            .zip(&errors)
            .map(|(&k, &e)| (k, wrap_phase(e + target)))
            .collect();
        return Err(Error::NoBracket { lo, hi, scan });
    };

    let (mut a, mut b) = (kappas[i], kappas[i + 1]);
    let (mut ea, mut eb) = (errors[i], errors[i + 1]);
    let mut steps = 0;
    while b - a > KAPPA_WIDTH_TOL && steps < 200 {
        let m = 0.5 * (a + b);
        let em = phase_error(m, target)?;
        steps += 1;
        if em == 0.0 {
            a = m;
            b = m;
            ea = em;
            eb = em;
            break;
        }
        if em.signum() == ea.signum() {
            a = m;
            ea = em;
        } else {
            b = m;
            eb = em;
        }
    }
    let kappa = if ea.abs() <= eb.abs() { a } else { b };
    let residual = phase_error(kappa, target)?;
    if residual.abs() > CALIBRATION_TOL {
        return Err(Error::NotConverged {
            halvings: steps,
            residual: residual.abs(),
            tolerance: CALIBRATION_TOL,
        });
    }
    Ok(Calibration {
        kappa,
        residual,
        bisection_steps: steps,
        report: geometric_report(kappa, 1.0, target)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockadeScanRecord {
    pub v: f64,
    pub v_over_omega: f64,
    pub gate_time: f64,
    pub gate_time_omega_over_pi: f64,
    pub phases: [f64; 4],
    pub phi_c_wrapped: f64,
    pub phi_c_unwrapped: f64,
    pub fidelity_cz: f64,
    pub infidelity_cz: f64,
    pub leakage_max: f64,
}

/// Runs the π–2π–π sequence at fixed Ω for each V (all V ≥ 10Ω).
pub fn blockade_invariance_scan(omega: f64, v_values: &[f64]) -> Result<Vec<BlockadeScanRecord>> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid(format!("Rabi frequency must be finite and > 0, got {omega}")));
    }
    if let Some(v) = v_values.iter().find(|&&v| v.is_nan() || v < BLOCKADE_MIN_V_OVER_OMEGA * omega) {
        return Err(invalid(format!(
            "blockade scan requires V >= {BLOCKADE_MIN_V_OVER_OMEGA}·Ω, got V = {v} with Ω = {omega}"
        )));
    }
    v_values
        .par_iter()
        .map(|&v| {
            let seq = blockade_pdp_sequence(&BlockadeProtocolParams::new(omega, v)?);
            let u = sequence_unitary(&seq);
            let ph = phases_and_leakage(&u);
            let fidelity = fidelity_cphase(&u, PI);
            let gate_time = seq.total_duration();
            debug_assert_eq!(gate_time, gate_time_blockade(omega));
            Ok(BlockadeScanRecord {
                v,
                v_over_omega: v / omega,
                gate_time,
                gate_time_omega_over_pi: gate_time * omega / PI,
                phases: ph.phases,
                phi_c_wrapped: controlled_phase(&ph.phases),
                phi_c_unwrapped: controlled_phase_unwrapped(&ph.phases),
                fidelity_cz: fidelity,
                infidelity_cz: 1.0 - fidelity,
                leakage_max: ph.leakage_max(),
            })
        })
        .collect()
}
