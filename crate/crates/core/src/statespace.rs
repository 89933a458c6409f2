//! Linear algebra over the fixed two-atom space.
//!
//! Product basis ordering is row-major over (atom 1, atom 2) with level codes
//! `0, 1, r → 0, 1, 2`, so `|ab⟩` sits at index `3·a + b`.

use nalgebra::{DMatrix, SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub const DIM: usize = 9;

/// 9×9 complex matrix over the product basis.
pub type Operator = SMatrix<C64, DIM, DIM>;
/// 9-component amplitude vector over the product basis.
pub type StateVector = SVector<C64, DIM>;
/// Single-atom 3×3 operator over `{|0⟩, |1⟩, |r⟩}`.
pub type AtomOperator = SMatrix<C64, 3, 3>;

/// Hermiticity tolerance, relative to `max(1, max |H_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G0,
    G1,
    Ryd,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G0, Level::G1, Level::Ryd];

    pub fn code(self) -> usize {
        match self {
            Level::G0 => 0,
            Level::G1 => 1,
            Level::Ryd => 2,
        }
    }

    pub fn from_code(code: usize) -> Option<Level> {
        Self::ALL.get(code).copied()
    }
}

pub fn basis_index(a: Level, b: Level) -> usize {
    3 * a.code() + b.code()
}

/// Inverse of [`basis_index`].
pub fn basis_levels(index: usize) -> (Level, Level) {
    assert!(index < DIM, "basis index {index} out of range");
    (
        Level::from_code(index / 3).unwrap(),
        Level::from_code(index % 3).unwrap(),
    )
}

pub fn basis_state(a: Level, b: Level) -> StateVector {
    let mut psi = StateVector::zeros();
    psi[basis_index(a, b)] = C64::new(1.0, 0.0);
    psi
}

/// Symmetric single-excitation state `(|1r⟩ + |r1⟩)/√2`.
pub fn bright_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (basis_state(Level::G1, Level::Ryd) + basis_state(Level::Ryd, Level::G1)) * C64::new(s, 0.0)
}

/// Antisymmetric single-excitation state `(|1r⟩ − |r1⟩)/√2`.
pub fn dark_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (basis_state(Level::G1, Level::Ryd) - basis_state(Level::Ryd, Level::G1)) * C64::new(s, 0.0)
}

/// Projector `|a⟩⟨b|` on a single atom.
pub fn atom_outer(a: Level, b: Level) -> AtomOperator {
    let mut m = AtomOperator::zeros();
    m[(a.code(), b.code())] = C64::new(1.0, 0.0);
    m
}

pub fn kron(a: &AtomOperator, b: &AtomOperator) -> Operator {
    Operator::from_fn(|row, col| a[(row / 3, col / 3)] * b[(row % 3, col % 3)])
}

/// Largest entry of `|H − H†|`.
pub fn hermiticity_defect<const N: usize>(h: &SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_defect<const N: usize>(u: &SMatrix<C64, N, N>) -> f64 {
    let g = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn check_hermitian<const N: usize>(h: &SMatrix<C64, N, N>) -> Result<()> {
    let scale = h.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let asymmetry = hermiticity_defect(h);
    if asymmetry > HERMITIAN_TOL * scale || !asymmetry.is_finite() {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

fn eigh<const N: usize>(h: &SMatrix<C64, N, N>) -> SymmetricEigen<C64, nalgebra::Dyn> {
    // The Hermitian part is taken so that round-off asymmetry below the
    // tolerance cannot leak into the eigenvectors.
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(DMatrix::from_iterator(N, N, herm.iter().copied()))
}

/// Sorted real spectrum of a Hermitian matrix.
pub fn eigenvalues_hermitian<const N: usize>(h: &SMatrix<C64, N, N>) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut values: Vec<f64> = eigh(h).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `exp(−iHt)` through the spectral decomposition of `H`.
pub fn expm_hermitian<const N: usize>(h: &SMatrix<C64, N, N>, t: f64) -> Result<SMatrix<C64, N, N>> {
    check_hermitian(h)?;
    if !t.is_finite() {
        return Err(crate::error::invalid(format!("propagation time must be finite, got {t}")));
    }
    Ok(propagator(h, t))
}

/// Unchecked variant of [`expm_hermitian`] for matrices Hermitian by
/// construction.
pub(crate) fn propagator<const N: usize>(h: &SMatrix<C64, N, N>, t: f64) -> SMatrix<C64, N, N> {
    if t == 0.0 {
        return SMatrix::identity();
    }
    let eig = eigh(h);
    let q = &eig.eigenvectors;
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&e| C64::from_polar(1.0, -e * t))
        .collect();
    SMatrix::from_fn(|i, j| {
        (0..N).fold(C64::new(0.0, 0.0), |acc, k| {
            acc + q[(i, k)] * phases[k] * q[(j, k)].conj()
        })
    })
}

/// Largest entry modulus.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn norm_sqr(psi: &StateVector) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(basis_index(Level::G0, Level::G0), 0);
        assert_eq!(basis_index(Level::G1, Level::Ryd), 5);
        assert_eq!(basis_index(Level::Ryd, Level::G1), 7);
        assert_eq!(basis_index(Level::Ryd, Level::Ryd), 8);
    }

    #[test]
    fn basis_index_is_bijective() {
        let mut seen = [false; DIM];
        for a in Level::ALL {
            for b in Level::ALL {
                let i = basis_index(a, b);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(basis_levels(i), (a, b));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn kron_identity_and_projector() {
        let id = AtomOperator::identity();
        assert_eq!(kron(&id, &id), Operator::identity());
        let rr = atom_outer(Level::Ryd, Level::Ryd);
        let p = kron(&rr, &rr);
        for i in 0..DIM {
            for j in 0..DIM {
                let want = if (i, j) == (8, 8) { 1.0 } else { 0.0 };
                assert_eq!(p[(i, j)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn kron_matches_double_loop() {
        let a = AtomOperator::from_fn(|i, j| c(i as f64 + 0.3 * j as f64, 1.0 - j as f64));
        let b = AtomOperator::from_fn(|i, j| c(0.7 * j as f64 - i as f64, 0.5 * (i * j) as f64));
        let k = kron(&a, &b);
        for i in 0..3 {
            for j in 0..3 {
                for m in 0..3 {
                    for n in 0..3 {
                        assert_eq!(k[(3 * i + m, 3 * j + n)], a[(i, j)] * b[(m, n)]);
                    }
                }
            }
        }
    }

    #[test]
    fn expm_at_zero_time_is_identity() {
        let h = Operator::from_fn(|i, j| if i == j { c(i as f64, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(expm_hermitian(&h, 0.0).unwrap(), Operator::identity());
    }

    #[test]
    fn two_pi_rabi_pulse_gives_minus_one_on_driven_pair() {
        let omega = 1.3;
        let g = basis_index(Level::G0, Level::G1);
        let e = basis_index(Level::G0, Level::Ryd);
        let mut h = Operator::zeros();
        h[(g, e)] = c(omega / 2.0, 0.0);
        h[(e, g)] = c(omega / 2.0, 0.0);
        let u = expm_hermitian(&h, 2.0 * PI / omega).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                let want = if i != j {
                    0.0
                } else if i == g || i == e {
                    -1.0
                } else {
                    1.0
                };
                assert!((u[(i, j)] - c(want, 0.0)).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected_with_asymmetry() {
        let mut h = Operator::zeros();
        h[(0, 1)] = c(1.0, 0.0);
        match expm_hermitian(&h, 1.0) {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_time_is_rejected() {
        assert!(expm_hermitian(&Operator::zeros(), f64::NAN).is_err());
    }

    #[test]
    fn bright_and_dark_states_are_orthonormal() {
        let b = bright_state();
        let d = dark_state();
        assert!((norm_sqr(&b) - 1.0).abs() < 1e-15);
        assert!((norm_sqr(&d) - 1.0).abs() < 1e-15);
        assert!(b.dotc(&d).norm() < 1e-15);
    }
}
