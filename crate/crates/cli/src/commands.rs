use std::f64::consts::PI;

use serde::Serialize;

use rydberg_gates::analysis::GateReport;
use rydberg_gates::calibration::{
    blockade_invariance_scan, calibrate_kappa_seeded, geometric_report, sweep_kappa, BlockadeScanRecord, SweepRecord,
};
use rydberg_gates::protocols::{blockade_pdp_sequence, BlockadeProtocolParams, GeometricProtocolParams, CZ_KAPPA_SEED};
use rydberg_gates::robustness::{monte_carlo_fidelity, spacing_noise_contrast, FidelityStats, NoiseModel, NoisyProtocol};

use crate::output::{emit, fmt_g, json, Table};
use crate::{
    BlockadeScanArgs, CalibrateArgs, CliError, Command, Common, CompareArgs, ContrastArgs, Format, Protocol,
    RobustnessArgs, SimulateArgs, SweepArgs,
};

/// Header of the κ-sweep table.
pub const SWEEP_HEADER: [&str; 7] = [
    "kappa",
    "v_over_omega",
    "gate_time_omega_over_pi",
    "phi_c_wrapped_rad",
    "phi_c_unwrapped_rad",
    "leakage_max",
    "fidelity_cz",
];

const DEFAULT_TARGET_PHI: f64 = PI;
const DEFAULT_SAMPLES: usize = 1000;

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Compare(a) => compare(a),
        Command::Robustness(a) => robustness(a),
        Command::BlockadeScan(a) => blockade_scan(a),
        Command::Contrast(a) => contrast(a),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing required parameter --{flag}")))
}

fn finish(common: &Common, default: Format, json_text: impl FnOnce() -> String, csv: impl FnOnce() -> Table) -> Result<(), CliError> {
    let text = match common.format.unwrap_or(default) {
        Format::Json => json_text(),
        Format::Csv => csv().render(),
    };
    emit(&text, common.output.as_deref())
}

/// A fully specified protocol with its Ω and V.
#[derive(Clone, Copy, Debug)]
struct Resolved {
    protocol: Protocol,
    kappa: f64,
    omega: f64,
    v: f64,
}

impl Resolved {
    /// Geometric: κ with exactly one of Ω, V. Blockade: Ω and V; κ is
    /// reported as Ω/V.
    fn new(protocol: Option<Protocol>, kappa: Option<f64>, omega: Option<f64>, v: Option<f64>) -> Result<Self, CliError> {
        let protocol = require(protocol, "protocol")?;
        match protocol {
            Protocol::Geometric => {
                let kappa = require(kappa, "kappa")?;
                let p = match (omega, v) {
                    (Some(omega), None) => GeometricProtocolParams::from_rabi(kappa, omega)?,
                    (None, Some(v)) => GeometricProtocolParams::new(kappa, v)?,
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config("geometric protocol takes --omega or --v, not both".into()))
                    }
                    (None, None) => return Err(CliError::Config("geometric protocol needs --omega or --v".into())),
                };
                Ok(Self { protocol, kappa, omega: p.rabi(), v: p.v() })
            }
            Protocol::Blockade => {
                if kappa.is_some() {
                    return Err(CliError::Config("--kappa does not apply to the blockade protocol".into()));
                }
                let omega = require(omega, "omega")?;
                let v = require(v, "v")?;
                let p = BlockadeProtocolParams::new(omega, v)?;
                if p.v() == 0.0 {
                    return Err(CliError::Config("blockade protocol needs V != 0".into()));
                }
                Ok(Self { protocol, kappa: omega / v, omega, v })
            }
        }
    }

    fn name(&self) -> &'static str {
        match self.protocol {
            Protocol::Geometric => "geometric",
            Protocol::Blockade => "blockade",
        }
    }

    fn report(&self, target: f64) -> Result<GateReport, CliError> {
        Ok(match self.protocol {
            Protocol::Geometric => geometric_report(self.kappa, self.omega, target)?,
            Protocol::Blockade => {
                GateReport::analyze(&blockade_pdp_sequence(&BlockadeProtocolParams::new(self.omega, self.v)?), target)
            }
        })
    }
}

#[derive(Serialize)]
struct ProtocolReport {
    protocol: &'static str,
    kappa: f64,
    omega: f64,
    v: f64,
    #[serde(flatten)]
    report: GateReport,
    gate_time_omega_over_pi: f64,
}

impl ProtocolReport {
    fn new(r: Resolved, report: GateReport) -> Self {
        let gate_time_omega_over_pi = report.gate_time * r.omega / PI;
        Self { protocol: r.name(), kappa: r.kappa, omega: r.omega, v: r.v, report, gate_time_omega_over_pi }
    }
}

const REPORT_HEADER: [&str; 18] = [
    "protocol",
    "kappa",
    "omega",
    "v",
    "phi_00_rad",
    "phi_01_rad",
    "phi_10_rad",
    "phi_11_rad",
    "phi_c_wrapped_rad",
    "phi_c_unwrapped_rad",
    "leakage_max",
    "target_phi_rad",
    "fidelity",
    "gate_time",
    "gate_time_omega_over_pi",
    "pulse_area",
    "rydberg_time",
    "phases_reliable",
];

fn report_row(p: &ProtocolReport) -> Vec<String> {
    let r = &p.report;
    let mut row = vec![p.protocol.to_owned(), fmt_g(p.kappa), fmt_g(p.omega), fmt_g(p.v)];
    row.extend(r.phases.iter().map(|&x| fmt_g(x)));
    row.extend(
        [
            r.controlled_phase_wrapped,
            r.controlled_phase_unwrapped,
            r.leakage_max,
            r.target_phase,
            r.fidelity,
            r.gate_time,
            p.gate_time_omega_over_pi,
            r.pulse_area,
            r.rydberg_time,
        ]
        .map(fmt_g),
    );
    row.push(r.phases_reliable.to_string());
    row
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let r = Resolved::new(a.protocol, a.kappa, a.omega, a.v)?;
    let target = a.target_phi.unwrap_or(DEFAULT_TARGET_PHI);
    let out = ProtocolReport::new(r, r.report(target)?);
    finish(&a.common, Format::Json, || json(&out), || {
        let mut t = Table::new(&REPORT_HEADER);
        t.push(report_row(&out));
        t
    })
}

fn sweep_row(r: &SweepRecord) -> Vec<String> {
    [
        r.kappa,
        r.v_over_omega,
        r.gate_time_omega_over_pi,
        r.phi_c_wrapped,
        r.phi_c_unwrapped,
        r.leakage_max,
        r.fidelity_cz,
    ]
    .map(fmt_g)
    .to_vec()
}

fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let k_min = require(a.kappa_min, "kappa-min")?;
    let k_max = require(a.kappa_max, "kappa-max")?;
    let n = require(a.points, "points")?;
    let records = sweep_kappa(k_min, k_max, n)?;
    finish(&a.common, Format::Csv, || json(&records), || {
        let mut t = Table::new(&SWEEP_HEADER);
        for r in &records {
            t.push(sweep_row(r));
        }
        t
    })
}

#[derive(Serialize)]
struct CalibrationOutput {
    target_phi: f64,
    bracket: [f64; 2],
    kappa: f64,
    v_over_omega: f64,
    residual: f64,
    bisection_steps: usize,
    report: ProtocolReport,
}

fn calibrate(a: CalibrateArgs) -> Result<(), CliError> {
    let target = a.target_phi.unwrap_or(-PI);
    let bracket = require(a.bracket, "bracket")?;
    let (lo, hi) = (bracket[0], bracket[1]);
    let seed = a.seed_kappa.unwrap_or(CZ_KAPPA_SEED);
    let omega = a.omega.unwrap_or(1.0);
    let c = calibrate_kappa_seeded(target, (lo, hi), seed)?;
    let r = Resolved::new(Some(Protocol::Geometric), Some(c.kappa), Some(omega), None)?;
    let out = CalibrationOutput {
        target_phi: target,
        bracket: [lo, hi],
        kappa: c.kappa,
        v_over_omega: 1.0 / c.kappa,
        residual: c.residual,
        bisection_steps: c.bisection_steps,
        report: ProtocolReport::new(r, r.report(target)?),
    };
    finish(&a.common, Format::Json, || json(&out), || {
        let mut header = vec!["target_phi_rad", "residual_rad", "bisection_steps"];
        header.extend(REPORT_HEADER);
        let mut t = Table::new(&header);
        let mut row = vec![fmt_g(out.target_phi), fmt_g(out.residual), out.bisection_steps.to_string()];
        row.extend(report_row(&out.report));
        t.push(row);
        t
    })
}

#[derive(Serialize)]
struct ComparisonOutput {
    omega: f64,
    target_phi: f64,
    geometric: ProtocolReport,
    blockade: ProtocolReport,
    /// Geometric over blockade gate time.
    gate_time_ratio: f64,
}

fn compare(a: CompareArgs) -> Result<(), CliError> {
    let omega = require(a.omega, "omega")?;
    let kappa = a.kappa.unwrap_or(CZ_KAPPA_SEED);
    let blockade_v = require(a.blockade_v, "blockade-v")?;
    let target = a.target_phi.unwrap_or(DEFAULT_TARGET_PHI);
    let g = Resolved::new(Some(Protocol::Geometric), Some(kappa), Some(omega), None)?;
    let b = Resolved::new(Some(Protocol::Blockade), None, Some(omega), Some(blockade_v))?;
    let geometric = ProtocolReport::new(g, g.report(target)?);
    let blockade = ProtocolReport::new(b, b.report(target)?);
    let out = ComparisonOutput {
        omega,
        target_phi: target,
        gate_time_ratio: geometric.report.gate_time / blockade.report.gate_time,
        geometric,
        blockade,
    };
    finish(&a.common, Format::Json, || json(&out), || {
        let mut t = Table::new(&REPORT_HEADER);
        t.push(report_row(&out.geometric));
        t.push(report_row(&out.blockade));
        t
    })
}

#[derive(Serialize)]
struct NoiseEcho {
    sigma_omega_rel: f64,
    sigma_r_rel: f64,
    c6: f64,
    r0: f64,
}

#[derive(Serialize)]
struct RobustnessOutput {
    protocol: &'static str,
    kappa: f64,
    omega: f64,
    v: f64,
    noise: NoiseEcho,
    stats: FidelityStats,
}

const STATS_HEADER: [&str; 13] = [
    "n_samples",
    "seed",
    "target_phi_rad",
    "mean_fidelity",
    "std_fidelity",
    "p1",
    "p5",
    "p50",
    "p95",
    "p99",
    "mean_phase_error_rad",
    "mean_leakage_max",
    "standard_error",
];

fn stats_row(s: &FidelityStats) -> Vec<String> {
    let p = &s.percentiles;
    let mut row = vec![s.n_samples.to_string(), s.seed.to_string()];
    row.extend(
        [
            s.target_phase,
            s.mean_fidelity,
            s.std_fidelity,
            p.p1,
            p.p5,
            p.p50,
            p.p95,
            p.p99,
            s.mean_phase_error,
            s.mean_leakage_max,
            s.standard_error(),
        ]
        .map(fmt_g),
    );
    row
}

fn robustness(a: RobustnessArgs) -> Result<(), CliError> {
    let r = Resolved::new(a.protocol, a.kappa, a.omega, a.v)?;
    let sigma_omega = a.sigma_omega.unwrap_or(0.0);
    let sigma_r = a.sigma_r.unwrap_or(0.0);
    let r0 = a.r0.unwrap_or(1.0);
    let seed = a.seed.unwrap_or(0);
    let samples = a.samples.unwrap_or(DEFAULT_SAMPLES);
    let target = a.target_phi.unwrap_or(DEFAULT_TARGET_PHI);
    let noise = match a.c6 {
        Some(c6) => NoiseModel::new(sigma_omega, sigma_r, c6, r0, seed)?,
        None => NoiseModel::for_nominal_v(r.v, r0, sigma_omega, sigma_r, seed)?,
    };
    let protocol = match r.protocol {
        Protocol::Geometric => NoisyProtocol::Geometric { kappa: r.kappa },
        Protocol::Blockade => NoisyProtocol::Blockade { v: r.v },
    };
    let stats = monte_carlo_fidelity(protocol, r.omega, &noise, samples, target)?;
    let out = RobustnessOutput {
        protocol: r.name(),
        kappa: r.kappa,
        omega: r.omega,
        v: r.v,
        noise: NoiseEcho { sigma_omega_rel: noise.sigma_omega_rel, sigma_r_rel: noise.sigma_r_rel, c6: noise.c6, r0: noise.r0 },
        stats,
    };
    finish(&a.common, Format::Json, || json(&out), || {
        let mut header = vec!["protocol", "kappa", "omega", "v", "sigma_omega_rel", "sigma_r_rel", "c6", "r0"];
        header.extend(STATS_HEADER);
        let mut t = Table::new(&header);
        let mut row = vec![out.protocol.to_owned()];
        row.extend([out.kappa, out.omega, out.v, out.noise.sigma_omega_rel, out.noise.sigma_r_rel, out.noise.c6, out.noise.r0].map(fmt_g));
        row.extend(stats_row(&out.stats));
        t.push(row);
        t
    })
}

fn blockade_scan(a: BlockadeScanArgs) -> Result<(), CliError> {
    let omega = require(a.omega, "omega")?;
    let vs = require(a.v, "v")?;
    let records: Vec<BlockadeScanRecord> = blockade_invariance_scan(omega, &vs)?;
    finish(&a.common, Format::Csv, || json(&records), || {
        let mut t = Table::new(&[
            "v",
            "v_over_omega",
            "gate_time",
            "gate_time_omega_over_pi",
            "phi_00_rad",
            "phi_01_rad",
            "phi_10_rad",
            "phi_11_rad",
            "phi_c_wrapped_rad",
            "phi_c_unwrapped_rad",
            "fidelity_cz",
            "infidelity_cz",
            "leakage_max",
        ]);
        for r in &records {
            let mut row = [r.v, r.v_over_omega, r.gate_time, r.gate_time_omega_over_pi].map(fmt_g).to_vec();
            row.extend(r.phases.iter().map(|&x| fmt_g(x)));
            row.extend([r.phi_c_wrapped, r.phi_c_unwrapped, r.fidelity_cz, r.infidelity_cz, r.leakage_max].map(fmt_g));
            t.push(row);
        }
        t
    })
}

fn contrast(a: ContrastArgs) -> Result<(), CliError> {
    let omega = require(a.omega, "omega")?;
    let kappa = a.kappa.unwrap_or(CZ_KAPPA_SEED);
    let ratio = a.blockade_v_over_omega.unwrap_or(20.0);
    let sigma_r = require(a.sigma_r, "sigma-r")?;
    let samples = a.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = a.seed.unwrap_or(0);
    let rows = spacing_noise_contrast(omega, kappa, ratio, sigma_r, samples, seed)?;
    finish(&a.common, Format::Csv, || json(&rows), || {
        let mut header = vec!["protocol", "v_over_omega", "sigma_v_rel", "sigma_v_over_omega"];
        header.extend(STATS_HEADER);
        let mut t = Table::new(&header);
        for r in &rows {
            let name = match r.protocol {
                NoisyProtocol::Geometric { .. } => "geometric",
                NoisyProtocol::Blockade { .. } => "blockade",
            };
            let mut row = vec![name.to_owned()];
            row.extend([r.v_over_omega, r.sigma_v_rel, r.sigma_v_over_omega].map(fmt_g));
            row.extend(stats_row(&r.stats));
            t.push(row);
        }
        t
    })
}
