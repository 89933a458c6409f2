//! Seeded Monte-Carlo fidelity statistics under quasi-static parameter noise.
//!
//! Each sample draws a relative Rabi-amplitude error and a relative spacing
//! error, maps the spacing through `V = C₆/R⁶`, and propagates the nominal
//! schedule (durations and phases fixed) with the perturbed physics.
//!
//! Randomness: sample `i` uses ChaCha20 seeded with `seed` (via
//! `seed_from_u64`) on stream `i`, and draws two standard normals in the
//! order (Ω error, spacing error). Results are therefore independent of the
//! thread count and of the order in which samples run.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{controlled_phase, fidelity_cphase, phases_and_leakage, wrap_phase};
use crate::error::invalid;
use crate::hamiltonians::RydbergParams;
use crate::propagation::{sequence_unitary, PulseSegment, PulseSequence};
use crate::protocols::{blockade_pdp_sequence, geometric_sequence, BlockadeProtocolParams, GeometricProtocolParams};
use crate::Result;

/// Relative tolerance when checking that `C₆/r₀⁶` matches the protocol's V.
const NOMINAL_V_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub sigma_omega_rel: f64,
    pub sigma_r_rel: f64,
    pub c6: f64,
    pub r0: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma_omega_rel: f64, sigma_r_rel: f64, c6: f64, r0: f64, seed: u64) -> Result<Self> {
        for (name, s) in [("sigma_omega_rel", sigma_omega_rel), ("sigma_r_rel", sigma_r_rel)] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {s}")));
            }
        }
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(invalid(format!("nominal spacing r0 must be finite and > 0, got {r0}")));
        }
        if !c6.is_finite() {
            return Err(invalid(format!("c6 must be finite, got {c6}")));
        }
        Ok(Self { sigma_omega_rel, sigma_r_rel, c6, r0, seed })
    }

    /// Model whose nominal spacing `r0` yields interaction `v`.
    pub fn for_nominal_v(v: f64, r0: f64, sigma_omega_rel: f64, sigma_r_rel: f64, seed: u64) -> Result<Self> {
        Self::new(sigma_omega_rel, sigma_r_rel, v * r0.powi(6), r0, seed)
    }

    pub fn nominal_v(&self) -> f64 {
        self.c6 / self.r0.powi(6)
    }

    pub fn noiseless(&self) -> bool {
        self.sigma_omega_rel == 0.0 && self.sigma_r_rel == 0.0
    }
}

/// `V = C₆ / R⁶`.
pub fn v_of_spacing(c6: f64, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!("spacing must be finite and > 0, got {r}")));
    }
    Ok(c6 / r.powi(6))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum NoisyProtocol {
    /// Weak-interaction geometric gate; nominal `V = Ω/κ`.
    Geometric { kappa: f64 },
    /// π–2π–π gate at interaction `v`.
    Blockade { v: f64 },
}

impl NoisyProtocol {
    pub fn nominal_v(&self, omega: f64) -> f64 {
        match *self {
            NoisyProtocol::Geometric { kappa } => omega / kappa,
            NoisyProtocol::Blockade { v } => v,
        }
    }

    pub fn nominal_sequence(&self, omega: f64) -> Result<PulseSequence> {
        Ok(match *self {
            NoisyProtocol::Geometric { kappa } => geometric_sequence(&GeometricProtocolParams::from_rabi(kappa, omega)?),
            NoisyProtocol::Blockade { v } => blockade_pdp_sequence(&BlockadeProtocolParams::new(omega, v)?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Percentiles {
    pub p1: f64,
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityStats {
    pub n_samples: usize,
    pub seed: u64,
    pub target_phase: f64,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub percentiles: Percentiles,
    /// Mean of `|wrap(φ_c − target)|`.
    pub mean_phase_error: f64,
    pub mean_leakage_max: f64,
}

impl FidelityStats {
    pub fn standard_error(&self) -> f64 {
        self.std_fidelity / (self.n_samples as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Sample {
    fidelity: f64,
    phase_error: f64,
    leakage_max: f64,
}

/// Relative errors `(ε_Ω, ε_R)` of sample `index`.
pub fn sample_errors(noise: &NoiseModel, index: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(noise.seed);
    rng.set_stream(index);
    let z_omega: f64 = rng.sample(StandardNormal);
    let z_r: f64 = rng.sample(StandardNormal);
    (noise.sigma_omega_rel * z_omega, noise.sigma_r_rel * z_r)
}

/// The nominal schedule with every drive amplitude scaled by `1 + ε_Ω` and the
/// interaction replaced by `v`.
pub fn perturb_sequence(nominal: &PulseSequence, omega_scale: f64, v: f64) -> Result<PulseSequence> {
    let ryd = RydbergParams::new(v)?;
    nominal.map_segments(|seg| {
        let scale = |d: Option<crate::hamiltonians::DriveParams>| {
            d.map(|d| d.with_rabi(d.rabi() * omega_scale)).transpose()
        };
        PulseSegment::new(seg.duration, scale(seg.drive1)?, scale(seg.drive2)?, ryd)
    })
}

fn run_sample(nominal: &PulseSequence, noise: &NoiseModel, target: f64, index: u64) -> Result<Sample> {
    let (eps_omega, eps_r) = sample_errors(noise, index);
    let v = v_of_spacing(noise.c6, noise.r0 * (1.0 + eps_r))?;
    let seq = perturb_sequence(nominal, 1.0 + eps_omega, v)?;
    let u = sequence_unitary(&seq);
    let ph = phases_and_leakage(&u);
    Ok(Sample {
        fidelity: fidelity_cphase(&u, target),
        phase_error: wrap_phase(controlled_phase(&ph.phases) - target).abs(),
        leakage_max: ph.leakage_max(),
    })
}

/// Linear-interpolation percentile of sorted data, `q ∈ [0, 100]`.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Monte-Carlo fidelity statistics of `protocol` at nominal Rabi frequency
/// `omega` against `diag(1, 1, 1, e^{i·target})`.
///
/// The noise model's `C₆/r₀⁶` must equal the protocol's nominal V.
pub fn monte_carlo_fidelity(
    protocol: NoisyProtocol,
    omega: f64,
    noise: &NoiseModel,
    n: usize,
    target: f64,
) -> Result<FidelityStats> {
    if n == 0 {
        return Err(invalid("need at least one Monte-Carlo sample"));
    }
    let v_nom = protocol.nominal_v(omega);
    if (noise.nominal_v() - v_nom).abs() > NOMINAL_V_RTOL * v_nom.abs().max(1e-300) {
        return Err(invalid(format!(
            "noise model nominal V = c6/r0^6 = {} does not match the protocol's V = {v_nom}",
            noise.nominal_v()
        )));
    }
    let nominal = protocol.nominal_sequence(omega)?;
    let samples: Vec<Sample> = (0..n as u64)
        .into_par_iter()
        .map(|i| run_sample(&nominal, noise, target, i))
        .collect::<Result<_>>()?;

    let nf = n as f64;
    // shifted by the first sample so identical samples give exactly zero spread
    let shift = samples[0].fidelity;
    let mean = shift + samples.iter().map(|s| s.fidelity - shift).sum::<f64>() / nf;
    let var = if n > 1 {
        samples.iter().map(|s| (s.fidelity - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.fidelity).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(FidelityStats {
        n_samples: n,
        seed: noise.seed,
        target_phase: target,
        mean_fidelity: mean,
        std_fidelity: var.sqrt(),
        percentiles: Percentiles {
            p1: percentile(&sorted, 1.0),
            p5: percentile(&sorted, 5.0),
            p50: percentile(&sorted, 50.0),
            p95: percentile(&sorted, 95.0),
            p99: percentile(&sorted, 99.0),
        },
        mean_phase_error: samples.iter().map(|s| s.phase_error).sum::<f64>() / nf,
        mean_leakage_max: samples.iter().map(|s| s.leakage_max).sum::<f64>() / nf,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContrastRow {
    pub protocol: NoisyProtocol,
    pub v_over_omega: f64,
    /// First-order relative V spread, `6·σ_R`.
    pub sigma_v_rel: f64,
    /// Absolute V spread, `6·σ_R·V/Ω`, in units of Ω.
    pub sigma_v_over_omega: f64,
    pub stats: FidelityStats,
}

/// Geometric gate at `V = Ω/κ` next to a blockade gate at
/// `V = blockade_v_over_omega·Ω`, both under the same relative spacing noise
/// and no amplitude noise. Reported, not ranked.
pub fn spacing_noise_contrast(
    omega: f64,
    kappa: f64,
    blockade_v_over_omega: f64,
    sigma_r_rel: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<ContrastRow>> {
    [
        NoisyProtocol::Geometric { kappa },
        NoisyProtocol::Blockade { v: blockade_v_over_omega * omega },
    ]
    .into_iter()
    .map(|protocol| {
        let v = protocol.nominal_v(omega);
        let noise = NoiseModel::for_nominal_v(v, 1.0, 0.0, sigma_r_rel, seed)?;
        Ok(ContrastRow {
            protocol,
            v_over_omega: v / omega,
            sigma_v_rel: 6.0 * sigma_r_rel,
            sigma_v_over_omega: 6.0 * sigma_r_rel * v / omega,
            stats: monte_carlo_fidelity(protocol, omega, &noise, n, PI)?,
        })
    })
    .collect()
}
