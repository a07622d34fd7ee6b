//! Seeded random operators and states for property checks and the verify battery.

use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::linops::{cr, hermitian_part, trace, Operator, QuantumState};

pub fn complex_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    Operator::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    hermitian_part(&complex_matrix(dim, rng))
}

/// `G G^dagger / tr` plus a small multiple of the identity, so the smallest
/// eigenvalue stays comfortably away from zero.
pub fn state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumState {
    let g = complex_matrix(dim, rng);
    let w = &g * g.adjoint() + Operator::identity(dim, dim) * cr(0.05);
    let tr = trace(&w).re;
    QuantumState::normalized(&(w / cr(tr))).expect("Gram matrix plus identity is positive")
}

/// Random product of two independent states.
pub fn product_state<R: Rng + ?Sized>(a: usize, b: usize, rng: &mut R) -> QuantumState {
    let x = state(a, rng);
    let y = state(b, rng);
    QuantumState::normalized(&x.rho().kronecker(y.rho())).expect("product of positive states")
}
