//! Modular dissipative bracket, relative entropy operator and master-equation right-hand sides.
//!
//! For a channel with components `(A_i, nu_i, h_i)` the bracket is
//!
//! ```text
//! [[A, B]] = sum_ij sqrt(h_i h_j) int_0^1 e^{-lambda beta (nu_i + nu_j) / 2}
//!            rho^{-lambda/2} [A, A_j^dagger] rho^lambda [A_i, B] rho^{-lambda/2} dlambda
//! ```
//!
//! and its Schrodinger-picture dual, defined by `tr(F D(rho)) = tr(rho [[F, X]])`, is
//!
//! ```text
//! D(rho) = sum_ij sqrt(h_i h_j) [A_j^dagger, int_0^1 e^{-lambda beta (nu_i + nu_j) / 2}
//!          rho^lambda [A_i, X] rho^{1-lambda} dlambda].
//! ```
//!
//! Both lambda-integrals are done in closed form in the eigenbasis of `rho`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linops::{commutator, cr, trace, EigenSystem, Operator, QuantumState};
use crate::model::{bohr_decompose, BracketChannel, CouplingFamily, SpectralFunction, SystemModel};
use crate::quadrature::gauss_legendre;

/// Overall normalization of the sum over bracket channels. With it the Davies
/// scheme reproduces the Davies generator exactly.
pub const CHANNEL_SUM_SCALE: f64 = 0.5;

/// States whose smallest eigenvalue falls below this are rejected by [`delta_s`].
pub const POSITIVITY_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaQuadrature {
    /// Gauss-Legendre order used when the integral is done numerically.
    pub nodes: usize,
    /// Integrate the exponential channel profile in closed form.
    pub analytic: bool,
}

impl Default for LambdaQuadrature {
    fn default() -> Self {
        Self {
            nodes: 32,
            analytic: true,
        }
    }
}

impl LambdaQuadrature {
    pub fn numeric(nodes: usize) -> Self {
        Self {
            nodes,
            analytic: false,
        }
    }
}

/// `expm1(a) / a`, i.e. `int_0^1 e^{lambda a} dlambda`.
fn phi(a: f64) -> f64 {
    if a.abs() < 1e-9 {
        1.0 + 0.5 * a
    } else {
        a.exp_m1() / a
    }
}

/// `int_0^1 e^{lambda x + (1 - lambda) y} dlambda`.
fn log_domain_mean(x: f64, y: f64) -> f64 {
    y.exp() * phi(x - y)
}

/// `Delta S = -ln rho - beta H`.
pub fn delta_s(rho: &QuantumState, beta: f64, h: &Operator) -> Result<Operator> {
    let p0 = rho.min_eigenvalue();
    if !(p0 > POSITIVITY_FLOOR) {
        return Err(Error::Domain { eigenvalue: p0 });
    }
    if h.shape() != rho.rho().shape() {
        return Err(Error::Input("state and Hamiltonian dimensions differ".into()));
    }
    Ok(-rho.log() - h * cr(beta))
}

fn ln_populations(eig: &EigenSystem) -> Vec<f64> {
    eig.eigenvalues.iter().map(|p| p.ln()).collect()
}

fn pair_weight(ch: &BracketChannel, i: usize, j: usize) -> (f64, f64) {
    let (ci, cj) = (&ch.components[i], &ch.components[j]);
    ((ci.weight * cj.weight).sqrt(), 0.5 * (ci.nu + cj.nu))
}

/// Bracket of a single channel, without the channel measure or overall scale.
pub fn channel_bracket(
    rho: &QuantumState,
    beta: f64,
    a: &Operator,
    b: &Operator,
    channel: &BracketChannel,
    quad: LambdaQuadrature,
) -> Operator {
    let eig = rho.eigen();
    let d = rho.dim();
    if !quad.analytic {
        let rule = gauss_legendre(quad.nodes, 0.0, 1.0);
        let mut acc = Operator::zeros(d, d);
        for (&lam, &w) in rule.nodes.iter().zip(&rule.weights) {
            let q = channel.q_at(lam, beta);
            let left = commutator(a, &q.adjoint());
            let right = commutator(&q, b);
            let half = rho.power(-0.5 * lam);
            acc += (&half * left * rho.power(lam) * right * &half) * cr(w);
        }
        return acc;
    }
    let l = ln_populations(eig);
    let a_t = eig.to_eigenbasis(a);
    let b_t = eig.to_eigenbasis(b);
    let comps: Vec<Operator> = channel.components.iter().map(|c| eig.to_eigenbasis(&c.op)).collect();
    let mut acc = Operator::zeros(d, d);
    for (i, ai) in comps.iter().enumerate() {
        let right = commutator(ai, &b_t);
        for (j, aj) in comps.iter().enumerate() {
            let (amp, s) = pair_weight(channel, i, j);
            if amp == 0.0 {
                continue;
            }
            let left = commutator(&a_t, &aj.adjoint());
            let bs = beta * s;
            for n in 0..d {
                for m in 0..d {
                    let mut v = cr(0.0);
                    for k in 0..d {
                        v += left[(m, k)] * right[(k, n)] * phi(l[k] - 0.5 * l[m] - 0.5 * l[n] - bs);
                    }
                    acc[(m, n)] += v * amp;
                }
            }
        }
    }
    eig.from_eigenbasis(&acc)
}

/// `[[A, B]]` summed over the channels of a family.
pub fn modular_bracket(
    rho: &QuantumState,
    family: &CouplingFamily,
    a: &Operator,
    b: &Operator,
    quad: LambdaQuadrature,
) -> Operator {
    let d = rho.dim();
    family
        .channels
        .par_iter()
        .map(|ch| channel_bracket(rho, family.beta, a, b, ch, quad) * cr(CHANNEL_SUM_SCALE * ch.quad_weight))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Operator::zeros(d, d), |x, y| x + y)
}

/// Bracket with a numeric lambda-rule and an error estimate from doubling its order.
pub fn modular_bracket_estimate(
    rho: &QuantumState,
    family: &CouplingFamily,
    a: &Operator,
    b: &Operator,
    nodes: usize,
) -> (Operator, f64) {
    let coarse = modular_bracket(rho, family, a, b, LambdaQuadrature::numeric(nodes));
    let fine = modular_bracket(rho, family, a, b, LambdaQuadrature::numeric(2 * nodes));
    let err = crate::linops::max_abs(&(&fine - &coarse));
    (fine, err)
}

fn channel_dual(
    rho: &QuantumState,
    beta: f64,
    x_t: &Operator,
    channel: &BracketChannel,
    quad: LambdaQuadrature,
) -> Operator {
    let eig = rho.eigen();
    let d = rho.dim();
    let l = ln_populations(eig);
    let mut acc = Operator::zeros(d, d);
    if !quad.analytic {
        let rule = gauss_legendre(quad.nodes, 0.0, 1.0);
        for (&lam, &w) in rule.nodes.iter().zip(&rule.weights) {
            let q = eig.to_eigenbasis(&channel.q_at(lam, beta));
            let mut m = commutator(&q, x_t);
            for c in 0..d {
                for r in 0..d {
                    m[(r, c)] *= cr((lam * l[r] + (1.0 - lam) * l[c]).exp());
                }
            }
            acc += commutator(&q.adjoint(), &m) * cr(w);
        }
        return acc;
    }
    let comps: Vec<Operator> = channel.components.iter().map(|c| eig.to_eigenbasis(&c.op)).collect();
    for (i, ai) in comps.iter().enumerate() {
        let g = commutator(ai, x_t);
        for (j, aj) in comps.iter().enumerate() {
            let (amp, s) = pair_weight(channel, i, j);
            if amp == 0.0 {
                continue;
            }
            let bs = beta * s;
            let m = Operator::from_fn(d, d, |r, c| g[(r, c)] * cr(log_domain_mean(l[r] - bs, l[c])));
            acc += commutator(&aj.adjoint(), &m) * cr(amp);
        }
    }
    acc
}

/// `D(rho)` for a general force `X`: the operator with `tr(F D) = tr(rho [[F, X]])` for all `F`.
pub fn dual_form(rho: &QuantumState, family: &CouplingFamily, x: &Operator, quad: LambdaQuadrature) -> Operator {
    let eig = rho.eigen();
    let d = rho.dim();
    let x_t = eig.to_eigenbasis(x);
    let acc = family
        .channels
        .par_iter()
        .map(|ch| channel_dual(rho, family.beta, &x_t, ch, quad) * cr(CHANNEL_SUM_SCALE * ch.quad_weight))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Operator::zeros(d, d), |x, y| x + y);
    eig.from_eigenbasis(&acc)
}

/// Dissipative part of the nonlinear master equation for one bath.
pub fn mds_dissipator(
    rho: &QuantumState,
    family: &CouplingFamily,
    h: &Operator,
    quad: LambdaQuadrature,
) -> Result<Operator> {
    let ds = delta_s(rho, family.beta, h)?;
    Ok(dual_form(rho, family, &ds, quad))
}

/// Lindblad channel `rate * (A rho A^dagger - {A^dagger A, rho} / 2)`.
#[derive(Clone, Debug)]
pub struct DaviesChannel {
    pub nu: f64,
    pub op: Operator,
    pub rate: f64,
}

/// Davies channels built from a coupling family's components (any scheme).
pub fn davies_channels(family: &CouplingFamily) -> Vec<DaviesChannel> {
    family
        .components()
        .map(|c| DaviesChannel {
            nu: c.nu,
            op: c.op.clone(),
            rate: c.weight,
        })
        .collect()
}

/// Davies channels from the Bohr decomposition with arbitrary (possibly non-KMS) rates.
pub fn davies_channels_from(
    h: &Operator,
    r: &Operator,
    spectral: &SpectralFunction,
    beta: f64,
) -> Result<Vec<DaviesChannel>> {
    Ok(bohr_decompose(h, r)?
        .into_iter()
        .map(|(nu, op)| DaviesChannel {
            rate: spectral.value(nu, beta),
            nu,
            op,
        })
        .collect())
}

pub fn davies_dissipator(rho: &Operator, channels: &[DaviesChannel]) -> Operator {
    let d = rho.nrows();
    channels.iter().fold(Operator::zeros(d, d), |acc, ch| {
        let a = &ch.op;
        let ad = a.adjoint();
        let ada = &ad * a;
        let term = a * rho * &ad - (&ada * rho + rho * &ada) * cr(0.5);
        acc + term * cr(ch.rate)
    })
}

/// `-i[H, rho] + sum_nu h(nu) (A_nu rho A_nu^dagger - {A_nu^dagger A_nu, rho} / 2)`.
pub fn davies_rhs(rho: &Operator, channels: &[DaviesChannel], h: &Operator) -> Operator {
    hamiltonian_part(rho, h) + davies_dissipator(rho, channels)
}

pub fn davies_superoperator(channels: &[DaviesChannel], dim: usize) -> crate::linops::Superoperator {
    crate::linops::Superoperator::from_map_unchecked(|x| davies_dissipator(x, channels), dim)
}

/// `-i [H, rho]`.
pub fn hamiltonian_part(rho: &Operator, h: &Operator) -> Operator {
    commutator(h, rho) * num_complex::Complex64::new(0.0, -1.0)
}

#[derive(Clone, Debug)]
pub struct RhsReport {
    pub drho_dt: Operator,
    pub hamiltonian: Operator,
    /// Dissipative contribution of each bath, in bath order.
    pub dissipative: Vec<Operator>,
}

impl RhsReport {
    pub fn trace_residual(&self) -> f64 {
        trace(&self.drho_dt).norm()
    }
}

/// `-i[H, rho] + sum_j D_j(rho)` with each bath at its own temperature.
pub fn full_rhs(rho: &QuantumState, model: &SystemModel) -> Result<RhsReport> {
    let h = model.h_s();
    let hamiltonian = hamiltonian_part(rho.rho(), h);
    let dissipative = model
        .baths()
        .iter()
        .map(|b| mds_dissipator(rho, &b.family, h, model.lambda))
        .collect::<Result<Vec<_>>>()?;
    let drho_dt = dissipative.iter().fold(hamiltonian.clone(), |acc, x| acc + x);
    Ok(RhsReport {
        drho_dt,
        hamiltonian,
        dissipative,
    })
}
