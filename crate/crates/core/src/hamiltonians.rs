//! Hamiltonian builders: the driven two-atom Rydberg Hamiltonian, its
//! invariant blocks, the literal blockade effective model and the
//! direct-coupling spin Hamiltonians used as reference gates.
//!
//! Drive convention: a laser with Rabi frequency Ω, detuning Δ and phase φ on
//! atom k contributes `(Ω/2) e^{iφ} |r⟩_k⟨1| + h.c. + Δ |r⟩_k⟨r|`, i.e. the laser
//! phase rides on the raising operator. Both atoms carry the same prefactor.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analysis::wrap_phase;
use crate::error::invalid;
use crate::statespace::{atom_outer, basis_index, basis_state, kron, AtomOperator, Level, Operator, StateVector};
use crate::Result;

/// Laser drive on one atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    rabi: f64,
    detuning: f64,
    phase: f64,
}

impl DriveParams {
    /// Rejects negative or non-finite Ω and non-finite Δ, φ. The phase is
    /// wrapped into (−π, π].
    pub fn new(rabi: f64, detuning: f64, phase: f64) -> Result<Self> {
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(invalid(format!("Rabi frequency must be finite and >= 0, got {rabi}")));
        }
        if !detuning.is_finite() {
            return Err(invalid(format!("detuning must be finite, got {detuning}")));
        }
        if !phase.is_finite() {
            return Err(invalid(format!("phase must be finite, got {phase}")));
        }
        Ok(Self { rabi, detuning, phase: wrap_phase(phase) })
    }

    /// Resonant drive with zero phase.
    pub fn resonant(rabi: f64) -> Result<Self> {
        Self::new(rabi, 0.0, 0.0)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Same drive with Ω replaced. A negative amplitude is folded into a π
    /// phase shift.
    pub fn with_rabi(&self, rabi: f64) -> Result<Self> {
        if rabi < 0.0 {
            Self::new(-rabi, self.detuning, self.phase + PI)
        } else {
            Self::new(rabi, self.detuning, self.phase)
        }
    }

    /// `(Ω/2) e^{iφ}`, the `⟨r|H|1⟩` matrix element.
    pub fn coupling(&self) -> C64 {
        C64::from_polar(self.rabi / 2.0, self.phase)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RydbergParams {
    pub v: f64,
}

impl RydbergParams {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(invalid(format!("interaction strength must be finite, got {v}")));
        }
        Ok(Self { v })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingKind {
    /// `J (σx⊗σx + σy⊗σy)`
    XY,
    /// `(J/4) σz⊗σz`
    ZZ,
    /// `J (σ₊⊗σ₋ + σ₋⊗σ₊)`
    PM,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub j: f64,
}

impl CouplingSpec {
    pub fn new(kind: CouplingKind, j: f64) -> Result<Self> {
        if !j.is_finite() {
            return Err(invalid(format!("coupling strength must be finite, got {j}")));
        }
        Ok(Self { kind, j })
    }
}

/// Single-atom drive operator on `{|0⟩, |1⟩, |r⟩}`.
pub fn atom_drive(d: &DriveParams) -> AtomOperator {
    let raise = atom_outer(Level::Ryd, Level::G1) * d.coupling();
    raise + raise.adjoint() + atom_outer(Level::Ryd, Level::Ryd) * C64::new(d.detuning, 0.0)
}

/// Full two-atom Hamiltonian. An absent drive leaves that atom undriven.
pub fn h_full(d1: Option<&DriveParams>, d2: Option<&DriveParams>, ryd: RydbergParams) -> Operator {
    let id = AtomOperator::identity();
    let mut h = Operator::zeros();
    if let Some(d) = d1 {
        h += kron(&atom_drive(d), &id);
    }
    if let Some(d) = d2 {
        h += kron(&id, &atom_drive(d));
    }
    let rr = basis_index(Level::Ryd, Level::Ryd);
    h[(rr, rr)] += C64::new(ryd.v, 0.0);
    h
}

/// Same drive on both atoms.
pub fn h_symmetric(d: &DriveParams, ryd: RydbergParams) -> Operator {
    h_full(Some(d), Some(d), ryd)
}

/// Block over `{|01⟩, |0r⟩}` (the `{|10⟩, |r0⟩}` block is identical).
pub fn h_block_01(d: &DriveParams) -> Matrix2<C64> {
    let g = d.coupling();
    Matrix2::new(
        C64::new(0.0, 0.0), g.conj(),
        g, C64::new(d.detuning, 0.0),
    )
}

/// Block over `{|11⟩, |R⟩, |rr⟩}` with `|R⟩ = (|1r⟩ + |r1⟩)/√2`.
pub fn h_block_11(d: &DriveParams, ryd: RydbergParams) -> Matrix3<C64> {
    let g = C64::from_polar(FRAC_1_SQRT_2 * d.rabi, d.phase);
    let zero = C64::new(0.0, 0.0);
    Matrix3::new(
        zero, g.conj(), zero,
        g, C64::new(d.detuning, 0.0), g.conj(),
        zero, g, C64::new(ryd.v + 2.0 * d.detuning, 0.0),
    )
}

/// Orthonormal bases of the subspaces left invariant by [`h_symmetric`]:
/// `{|00⟩}`, `{|01⟩, |0r⟩}`, `{|10⟩, |r0⟩}`, `{|11⟩, |R⟩, |rr⟩}` and the
/// antisymmetric dark state. Together they span the full space.
pub fn invariant_subspaces() -> Vec<Vec<StateVector>> {
    use crate::statespace::{bright_state, dark_state};
    use Level::*;
    vec![
        vec![basis_state(G0, G0)],
        vec![basis_state(G0, G1), basis_state(G0, Ryd)],
        vec![basis_state(G1, G0), basis_state(Ryd, G0)],
        vec![basis_state(G1, G1), bright_state(), basis_state(Ryd, Ryd)],
        vec![dark_state()],
    ]
}

/// Restriction `⟨e_i|H|e_j⟩` of an operator onto an ordered set of states.
pub fn restrict(h: &Operator, states: &[StateVector]) -> Vec<Vec<C64>> {
    states
        .iter()
        .map(|bra| states.iter().map(|ket| bra.dotc(&(h * ket))).collect())
        .collect()
}

/// The literal two-level blockade model over `{|R⟩, |b⟩}`.
#[derive(Clone, Debug)]
pub struct BlockadeEffective {
    pub hamiltonian: Matrix2<C64>,
    pub theta11: f64,
    /// `|b⟩ = sin(θ₁₁/2) e^{−2iφ} |11⟩ + cos(θ₁₁/2) |rr⟩` in the product basis.
    pub b_state: StateVector,
}

/// Mixing angle with `tan θ₁₁ = Ω/Δ`, taken in [0, π].
pub fn blockade_theta11(d: &DriveParams) -> f64 {
    d.rabi.atan2(d.detuning)
}

/// Coupling `Ω e^{iφ}` between `|R⟩` and `|b⟩`, diagonal `(Δ, 0)`.
pub fn h_blockade_eff(d: &DriveParams, theta11: f64) -> BlockadeEffective {
    let g = C64::from_polar(d.rabi, d.phase);
    let hamiltonian = Matrix2::new(
        C64::new(d.detuning, 0.0), g,
        g.conj(), C64::new(0.0, 0.0),
    );
    let b_state = basis_state(Level::G1, Level::G1) * C64::from_polar((theta11 / 2.0).sin(), -2.0 * d.phase)
        + basis_state(Level::Ryd, Level::Ryd) * C64::new((theta11 / 2.0).cos(), 0.0);
    BlockadeEffective { hamiltonian, theta11, b_state }
}

/// Side-by-side `|R⟩` population histories of three blockade descriptions.
#[derive(Clone, Debug, Serialize)]
pub struct BlockadeModelComparison {
    pub times: Vec<f64>,
    /// Full three-level block, starting in `|11⟩`.
    pub p_bright_block: Vec<f64>,
    /// Literal effective model, starting in `|b⟩`.
    pub p_bright_literal: Vec<f64>,
    /// Two-level `{|11⟩, |R⟩}` model with coupling `Ω/√2`, starting in `|11⟩`.
    pub p_bright_sqrt2: Vec<f64>,
    pub max_discrepancy_literal: f64,
    pub max_discrepancy_sqrt2: f64,
}

/// Compares the literal blockade model against the exact `|11⟩` block over
/// `[0, duration]`. No agreement is implied; the discrepancies are reported.
pub fn compare_blockade_models(
    d: &DriveParams,
    ryd: RydbergParams,
    duration: f64,
    samples: usize,
) -> BlockadeModelComparison {
    use crate::statespace::propagator;
    let block = h_block_11(d, ryd);
    let eff = h_blockade_eff(d, blockade_theta11(d));
    // coupling Ω/√2 between |11⟩ and |R⟩, detuning Δ on |R⟩
    let g = C64::from_polar(d.rabi * FRAC_1_SQRT_2, d.phase);
    let two_level = Matrix2::new(
        C64::new(0.0, 0.0), g.conj(),
        g, C64::new(d.detuning, 0.0),
    );

    let n = samples.max(2);
    let mut out = BlockadeModelComparison {
        times: Vec::with_capacity(n),
        p_bright_block: Vec::with_capacity(n),
        p_bright_literal: Vec::with_capacity(n),
        p_bright_sqrt2: Vec::with_capacity(n),
        max_discrepancy_literal: 0.0,
        max_discrepancy_sqrt2: 0.0,
    };
    for k in 0..n {
        let t = duration * k as f64 / (n - 1) as f64;
        let p_block = propagator(&block, t)[(1, 0)].norm_sqr();
        // |b⟩ is the second basis vector of the literal model
        let p_lit = propagator(&eff.hamiltonian, t)[(0, 1)].norm_sqr();
        let p_two = propagator(&two_level, t)[(1, 0)].norm_sqr();
        out.max_discrepancy_literal = out.max_discrepancy_literal.max((p_block - p_lit).abs());
        out.max_discrepancy_sqrt2 = out.max_discrepancy_sqrt2.max((p_block - p_two).abs());
        out.times.push(t);
        out.p_bright_block.push(p_block);
        out.p_bright_literal.push(p_lit);
        out.p_bright_sqrt2.push(p_two);
    }
    out
}

/// Direct spin-spin Hamiltonian over `{|00⟩, |01⟩, |10⟩, |11⟩}` with
/// `σz = diag(1, −1)` and `σ₊ = |0⟩⟨1|`.
pub fn h_direct(spec: &CouplingSpec) -> Matrix4<C64> {
    let j = spec.j;
    let mut h = Matrix4::zeros();
    match spec.kind {
        CouplingKind::XY => {
            h[(1, 2)] = C64::new(2.0 * j, 0.0);
            h[(2, 1)] = C64::new(2.0 * j, 0.0);
        }
        CouplingKind::PM => {
            h[(1, 2)] = C64::new(j, 0.0);
            h[(2, 1)] = C64::new(j, 0.0);
        }
        CouplingKind::ZZ => {
            for (i, s) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
                h[(i, i)] = C64::new(s * j / 4.0, 0.0);
            }
        }
    }
    h
}

/// Evolution operator `exp(−i H_direct t)`.
pub fn direct_unitary(spec: &CouplingSpec, t: f64) -> Matrix4<C64> {
    crate::statespace::propagator(&h_direct(spec), t)
}

/// The XY evolution in closed form: identity on `|00⟩, |11⟩` and
/// `[[cos θ, i sin θ], [i sin θ, cos θ]]` on `{|01⟩, |10⟩}`.
///
/// `exp(−i H_XY t)` equals this matrix at `θ = −2Jt`; the form with
/// `θ = 2Jt` is its complex conjugate.
pub fn xy_closed_form(theta: f64) -> Matrix4<C64> {
    let mut u = Matrix4::identity();
    let (s, c) = theta.sin_cos();
    u[(1, 1)] = C64::new(c, 0.0);
    u[(2, 2)] = C64::new(c, 0.0);
    u[(1, 2)] = C64::new(0.0, s);
    u[(2, 1)] = C64::new(0.0, s);
    u
}
