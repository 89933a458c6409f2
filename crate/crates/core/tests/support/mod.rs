//! Independent reference routines for tests: a classical fourth-order
//! Runge–Kutta integrator and seeded random operators.

#![allow(dead_code)]

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn max_diff<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Integrates `dU/dt = −i H(t) U` from 0 to `t` with `steps` RK4 steps.
pub fn rk4_fixed<const N: usize>(
    h: &impl Fn(f64) -> SMatrix<C64, N, N>,
    t: f64,
    steps: usize,
) -> SMatrix<C64, N, N> {
    let mi = C64::new(0.0, -1.0);
    let dt = t / steps as f64;
    let f = |s: f64, u: &SMatrix<C64, N, N>| h(s) * u * mi;
    let mut u = SMatrix::<C64, N, N>::identity();
    for k in 0..steps {
        let s = k as f64 * dt;
        let k1 = f(s, &u);
        let k2 = f(s + dt / 2.0, &(u + k1 * C64::new(dt / 2.0, 0.0)));
        let k3 = f(s + dt / 2.0, &(u + k2 * C64::new(dt / 2.0, 0.0)));
        let k4 = f(s + dt, &(u + k3 * C64::new(dt, 0.0)));
        u += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
    }
    u
}

/// RK4 with step halving until two successive results agree to `tol`.
pub fn rk4_converged<const N: usize>(
    h: &impl Fn(f64) -> SMatrix<C64, N, N>,
    t: f64,
    tol: f64,
) -> SMatrix<C64, N, N> {
    let scale = h(0.0).iter().map(|z| z.norm()).fold(1.0, f64::max) * N as f64;
    let mut steps = ((t.abs() * scale * 4.0).ceil() as usize).max(8);
    let mut prev = rk4_fixed(h, t, steps);
    for _ in 0..14 {
        steps *= 2;
        let next = rk4_fixed(h, t, steps);
        if max_diff(&next, &prev) < tol {
            return next;
        }
        prev = next;
    }
    panic!("RK4 oracle did not converge");
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Hermitian matrix with entries of modulus ≲ `scale`.
pub fn random_hermitian<const N: usize>(rng: &mut impl Rng, scale: f64) -> SMatrix<C64, N, N> {
    let a = SMatrix::<C64, N, N>::from_fn(|_, _| {
        C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
    });
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}
