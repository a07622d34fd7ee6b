//! Linear response around equilibrium: linearized generator, detailed balance,
//! flux operators and Onsager matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dissipator::{davies_channels, davies_superoperator, dual_form, hamiltonian_part, mds_dissipator};
use crate::dynamics::{entropy_production, steady_state, SteadyOptions};
use crate::error::{Error, Result};
use crate::linops::{
    cr, from_hermitian_coords, gibbs_state, hermitian_coords, identity, krho_apply, krho_inv_apply, trace,
    trace_distance, superop_from_map, Operator, QuantumState, Superoperator,
};
use crate::model::{GaussianScheme, Scheme, SystemModel};

/// Eigenvalues closer than this to zero count as stationary modes.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;
/// Eigenvalues with larger real part count as unstable.
pub const POSITIVE_REAL_TOL: f64 = 1e-10;

/// Generator of the dynamics linearized at `rho_beta`, Schrodinger picture.
#[derive(Clone, Debug)]
pub struct LinearizedGenerator {
    pub beta: f64,
    pub rho_beta: QuantumState,
    /// `-i[H, .]`.
    pub hamiltonian: Superoperator,
    /// One dissipative part per bath, all at the common `beta`.
    pub dissipative: Vec<Superoperator>,
    pub total: Superoperator,
}

impl LinearizedGenerator {
    pub fn dim(&self) -> usize {
        self.rho_beta.dim()
    }

    pub fn dissipative_total(&self) -> Superoperator {
        self.dissipative
            .iter()
            .fold(Superoperator::zeros(self.dim()), |acc, d| acc.add(d))
    }

    /// Heisenberg-picture generator.
    pub fn total_star(&self) -> Superoperator {
        self.total.adjoint()
    }
}

/// `delta -> -D(rho_beta; K^{-1} delta)`, the derivative of each bath's dissipator at `rho_beta`.
pub fn linearized_generator(model: &SystemModel, beta: f64) -> Result<LinearizedGenerator> {
    let model = model.with_common_beta(beta)?;
    let rho_beta = gibbs_state(model.h_s(), beta)?;
    let d = model.dim();
    let h = model.h_s().clone();
    let hamiltonian = superop_from_map(|x| hamiltonian_part(x, &h), d)?;
    let dissipative = model
        .baths()
        .iter()
        .map(|b| {
            superop_from_map(
                |x| {
                    let y = krho_inv_apply(&rho_beta, x).expect("Gibbs state is strictly positive");
                    -dual_form(&rho_beta, &b.family, &y, model.lambda)
                },
                d,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let total = dissipative.iter().fold(hamiltonian.clone(), |acc, x| acc.add(x));
    Ok(LinearizedGenerator {
        beta,
        rho_beta,
        hamiltonian,
        dissipative,
        total,
    })
}

/// `K_rho` and its inverse as superoperators.
pub fn krho_superoperators(rho: &QuantumState) -> Result<(Superoperator, Superoperator)> {
    let d = rho.dim();
    let k = Superoperator::from_map_unchecked(|x| krho_apply(rho, x), d);
    krho_inv_apply(rho, &identity(d))?;
    let kinv = Superoperator::from_map_unchecked(|x| krho_inv_apply(rho, x).expect("checked"), d);
    Ok((k, kinv))
}

/// `max|L* - K^{-1} L K|`: zero when `L` is self-adjoint in the Kubo product of `rho`.
pub fn kubo_symmetry_residual(l: &Superoperator, rho: &QuantumState) -> Result<f64> {
    let (k, kinv) = krho_superoperators(rho)?;
    Ok(l.adjoint().max_abs_diff(&kinv.compose(l).compose(&k)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetailedBalance {
    /// `max|D* - K^{-1} D K|` for the summed dissipative part.
    pub dissipative: f64,
    /// Largest per-bath residual.
    pub per_bath_max: f64,
    /// `max|L_H* + K^{-1} L_H K|`: the Hamiltonian part must be Kubo anti-self-adjoint.
    pub hamiltonian: f64,
}

impl DetailedBalance {
    pub fn max(&self) -> f64 {
        self.dissipative.max(self.per_bath_max).max(self.hamiltonian)
    }
}

pub fn detailed_balance_residual(gen: &LinearizedGenerator) -> Result<DetailedBalance> {
    let (k, kinv) = krho_superoperators(&gen.rho_beta)?;
    let sym = |l: &Superoperator| l.adjoint().max_abs_diff(&kinv.compose(l).compose(&k));
    let per_bath_max = gen.dissipative.iter().map(sym).fold(0.0, f64::max);
    let dissipative = sym(&gen.dissipative_total());
    let lh = &gen.hamiltonian;
    let hamiltonian = lh.adjoint().add(&kinv.compose(lh).compose(&k)).max_abs();
    Ok(DetailedBalance {
        dissipative,
        per_bath_max,
        hamiltonian,
    })
}

/// `J_j = D_j*(H)`.
pub fn flux_operator(gen: &LinearizedGenerator, bath: usize, h: &Operator) -> Operator {
    gen.dissipative[bath].adjoint().apply(h)
}

/// `<A; B> = tr(A^dagger K_rho B)`.
pub fn kubo_inner(a: &Operator, b: &Operator, rho: &QuantumState) -> Complex64 {
    trace(&(a.adjoint() * krho_apply(rho, b)))
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ordered by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    pub zero_count: usize,
    pub positive_count: usize,
    /// Smallest decay rate among the non-stationary modes.
    pub gap: f64,
    /// Normalized kernel vector of the generator.
    pub zero_vector: Operator,
    /// Trace distance of the kernel vector to `rho_beta`.
    pub zero_vector_error: f64,
}

pub fn generator_spectrum(gen: &LinearizedGenerator) -> Spectrum {
    let m = gen.total.real_representation();
    let n = m.nrows();
    let mut eigenvalues: Vec<Complex64> = m.clone().schur().complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let zero_count = eigenvalues.iter().filter(|z| z.norm() < ZERO_EIGENVALUE_TOL).count();
    let positive_count = eigenvalues.iter().filter(|z| z.re > POSITIVE_REAL_TOL).count();
    let mut by_modulus = eigenvalues.clone();
    by_modulus.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let gap = by_modulus.iter().skip(1).map(|z| -z.re).fold(f64::INFINITY, f64::min);

    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let x = DVector::from_iterator(n, v_t.row(imin).iter().copied());
    let mut zero_vector = from_hermitian_coords(&x, gen.dim());
    let tr = trace(&zero_vector).re;
    zero_vector /= cr(tr);
    let zero_vector_error = trace_distance(&zero_vector, gen.rho_beta.rho());
    Spectrum {
        eigenvalues,
        zero_count,
        positive_count,
        gap,
        zero_vector,
        zero_vector_error,
    }
}

/// `-(L*)^{-1} P j` with `P` removing the component along the identity; unique solution orthogonal to the kernel.
pub fn green_kubo_solve(gen: &LinearizedGenerator, j: &Operator) -> Result<(Operator, GkDiagnostics)> {
    let d = gen.dim();
    let m = gen.total_star().real_representation();
    let n = m.nrows();
    let svd_m = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd_m.singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let top = sv[n - 1];
    let kernel_rank = sv.iter().filter(|&&s| s < ZERO_EIGENVALUE_TOL * top.max(1.0)).count();
    let gap = sv[1];
    if kernel_rank != 1 || gap < 1e-10 * top {
        return Err(Error::IllConditioned { gap });
    }
    let rho = gen.rho_beta.rho();
    let jp = j - identity(d) * trace(&(rho * j));
    let jv = hermitian_coords(&jp);
    let r = hermitian_coords(rho);
    let mut sys = DMatrix::<f64>::zeros(n + 1, n);
    sys.view_mut((0, 0), (n, n)).copy_from(&m);
    sys.row_mut(n).copy_from(&r.transpose());
    let mut rhs = DVector::<f64>::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(&(-&jv));
    let svd = sys.svd(true, true);
    let x = svd
        .solve(&rhs, 1e-13 * top)
        .map_err(|e| Error::Input(format!("Green-Kubo solve failed: {e}")))?;
    let residual = (&m * &x + &jv).amax();
    Ok((
        from_hermitian_coords(&x, d),
        GkDiagnostics {
            kernel_rank,
            gap,
            residual,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GkDiagnostics {
    pub kernel_rank: usize,
    /// Second-smallest singular value of the Heisenberg generator.
    pub gap: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnsagerMethod {
    GreenKubo,
    FiniteDifference,
}

#[derive(Clone, Debug)]
pub struct OnsagerResult {
    /// `J_j = sum_k L_jk X_k` with `X_k = beta_k - beta` and `J_j` the energy current into bath `j`.
    pub l: DMatrix<f64>,
    pub method: OnsagerMethod,
    /// Flux autocorrelation integrals `C_jk = int_0^inf <J_j(t); J_k> dt` (Green-Kubo only).
    pub correlations: Option<DMatrix<f64>>,
    pub kernel_rank: usize,
    pub gap: f64,
    pub solve_residual: f64,
    /// `|sigma(rho_+) - sum_j X_j J_j|` at the largest force used (finite difference only).
    pub sum_rule_residual: Option<f64>,
}

impl OnsagerResult {
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.l.amax().max(f64::MIN_POSITIVE);
        (&self.l - self.l.transpose()).amax() / scale
    }

    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let s = (&self.l + self.l.transpose()) * 0.5;
        s.symmetric_eigen().eigenvalues.min()
    }
}

/// Onsager matrix from flux correlation integrals, computed by resolvent solves.
///
/// A force on bath `k` drives the steady state through `J_k` and also shifts the
/// instantaneous current of bath `k` itself by `-<H; J_k> X_k`. Energy conservation
/// makes that term the row sum of the correlation matrix, so `L = diag(C 1) - C`.
pub fn onsager_green_kubo(model: &SystemModel, beta: f64) -> Result<OnsagerResult> {
    let gen = linearized_generator(model, beta)?;
    let h = model.h_s();
    let n = model.baths().len();
    let fluxes: Vec<Operator> = (0..n).map(|j| flux_operator(&gen, j, h)).collect();
    let mut solves = Vec::with_capacity(n);
    for f in &fluxes {
        solves.push(green_kubo_solve(&gen, f)?);
    }
    let c = DMatrix::from_fn(n, n, |j, k| kubo_inner(&fluxes[j], &solves[k].0, &gen.rho_beta).re);
    let row_sums = DVector::from_iterator(n, c.row_iter().map(|r| r.sum()));
    let l = DMatrix::from_diagonal(&row_sums) - &c;
    let diag = &solves[0].1;
    Ok(OnsagerResult {
        l,
        method: OnsagerMethod::GreenKubo,
        correlations: Some(c),
        kernel_rank: diag.kernel_rank,
        gap: diag.gap,
        solve_residual: solves.iter().map(|s| s.1.residual).fold(0.0, f64::max),
        sum_rule_residual: None,
    })
}

/// Energy current into each bath, `-tr(H D_j(rho))`.
pub fn bath_energy_currents(rho: &QuantumState, model: &SystemModel) -> Result<Vec<f64>> {
    let h = model.h_s();
    model
        .baths()
        .iter()
        .map(|b| Ok(-trace(&(h * mds_dissipator(rho, &b.family, h, model.lambda)?)).re))
        .collect()
}

/// Onsager matrix from steady-state currents at `beta_k = beta + dx`, one bath at a time.
pub fn onsager_finite_difference(
    model: &SystemModel,
    beta: f64,
    dx: f64,
    opts: &SteadyOptions,
) -> Result<OnsagerResult> {
    if !(dx > 0.0) {
        return Err(Error::Config(format!("force step must be positive, got {dx}")));
    }
    let n = model.baths().len();
    let base = model.with_common_beta(beta)?;
    let rho_beta = gibbs_state(base.h_s(), beta)?;
    let j0 = bath_energy_currents(&rho_beta, &base)?;
    let columns = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut betas = vec![beta; n];
            betas[k] += dx;
            let mk = base.with_betas(&betas)?;
            let (rho_plus, _) = steady_state(&mk, Some(&rho_beta), opts)?;
            let j = bath_energy_currents(&rho_plus, &mk)?;
            let sigma = entropy_production(&rho_plus, &mk)?.total;
            let col: Vec<f64> = j.iter().zip(&j0).map(|(a, b)| (a - b) / dx).collect();
            Ok((col, (sigma - dx * j[k]).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let l = DMatrix::from_fn(n, n, |j, k| columns[k].0[j]);
    let sum_rule = columns.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(OnsagerResult {
        l,
        method: OnsagerMethod::FiniteDifference,
        correlations: None,
        kernel_rank: 1,
        gap: f64::NAN,
        solve_residual: 0.0,
        sum_rule_residual: Some(sum_rule),
    })
}

/// `max|D_gauss - D_davies|` between the linearized dissipators of bath 0 under a
/// Gaussian window of collision time `t` and under the Davies scheme.
pub fn davies_limit_distance(model: &SystemModel, collision_time: f64) -> Result<f64> {
    let single = model.single_bath(0)?;
    let beta = single.baths()[0].spec.beta;
    let gauss = single.with_scheme(Scheme::Gaussian(GaussianScheme::new(collision_time)))?;
    let gen = linearized_generator(&gauss, beta)?;
    let davies = single.with_scheme(Scheme::Davies)?;
    let reference = davies_superoperator(&davies_channels(&davies.baths()[0].family), model.dim());
    Ok(gen.dissipative[0].max_abs_diff(&reference))
}

/// `<e^{L* t} A; B>` by matrix exponential of the Heisenberg generator.
pub fn flux_correlation(gen: &LinearizedGenerator, a: &Operator, b: &Operator, t: f64) -> f64 {
    let m = gen.total_star().real_representation() * t;
    let x = m.exp() * hermitian_coords(a);
    let at = from_hermitian_coords(&x, gen.dim());
    kubo_inner(&at, b, &gen.rho_beta).re
}
