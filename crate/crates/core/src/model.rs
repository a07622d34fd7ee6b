//! System, bath and coupling-operator families.
//!
//! A bath couples to the system through one Hermitian operator `R` and a
//! spectral function `h(nu)`. The coupling scheme decides how `R` is turned
//! into the family of scattering operators `Q^lambda_alpha`:
//!
//! * `davies`: Bohr-frequency eigenoperators `A_nu` of `R`, one bracket channel each;
//! * `gaussian`: Gaussian-window operators `A~_nu` on a quadrature grid in `nu`;
//! * `single_q`: the single operator `sum_nu e^{-lambda beta nu / 2} sqrt(h(nu)) A_nu`.
//!
//! In every case `Q^lambda = sum_c e^{-lambda beta nu_c / 2} sqrt(h(nu_c)) A_c`
//! over the components of the channel.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dissipator::LambdaQuadrature;
use crate::error::{Error, Result};
use crate::linops::{
    cr, herm_eig, hermitian_part, hermiticity_residual, max_abs, EigenSystem, Operator,
};
use crate::quadrature::{composite, merge_intervals};

/// Relative KMS residual tolerated on validation.
pub const KMS_TOL: f64 = 1e-8;
/// Degenerate Bohr frequencies are merged within this multiple of the spectral range.
pub const BOHR_MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralFunction {
    /// `h(nu) = amplitude * exp(beta nu / 2)`.
    GibbsExponential { amplitude: f64 },
    /// `h(nu) = amplitude * nu / (1 - exp(-beta nu)) * exp(-|nu| / cutoff)`.
    Ohmic { amplitude: f64, cutoff: f64 },
    /// Log-linear interpolation of `(nu, h)` pairs; zero outside the table.
    Table { points: Vec<(f64, f64)> },
}

impl SpectralFunction {
    pub fn table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("spectral table needs at least two points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config("spectral table has repeated frequencies".into()));
        }
        if let Some(&(nu, value)) = points.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::SpectralValue { nu, value });
        }
        Ok(SpectralFunction::Table { points })
    }

    pub fn value(&self, nu: f64, beta: f64) -> f64 {
        match self {
            SpectralFunction::GibbsExponential { amplitude } => amplitude * (0.5 * beta * nu).exp(),
            SpectralFunction::Ohmic { amplitude, cutoff } => {
                let x = beta * nu;
                let bose = if x.abs() < 1e-8 {
                    (1.0 + 0.5 * x) / beta
                } else {
                    nu / -(-x).exp_m1()
                };
                amplitude * bose * (-nu.abs() / cutoff).exp()
            }
            SpectralFunction::Table { points } => {
                let first = points[0];
                let last = points[points.len() - 1];
                if nu < first.0 || nu > last.0 {
                    return 0.0;
                }
                let i = points.partition_point(|p| p.0 <= nu).clamp(1, points.len() - 1);
                let (x0, y0) = points[i - 1];
                let (x1, y1) = points[i];
                let s = (nu - x0) / (x1 - x0);
                (y0.ln() * (1.0 - s) + y1.ln() * s).exp()
            }
        }
    }

    /// True when the function vanishes identically (a decoupled bath).
    pub fn is_zero(&self) -> bool {
        match self {
            SpectralFunction::GibbsExponential { amplitude }
            | SpectralFunction::Ohmic { amplitude, .. } => *amplitude == 0.0,
            SpectralFunction::Table { .. } => false,
        }
    }
}

/// Largest `|h(nu) - e^{beta nu} h(-nu)| / h(nu)` over the samples.
pub fn kms_residual(spec: &SpectralFunction, beta: f64, nu_samples: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &nu in nu_samples {
        let (h_plus, h_minus) = (spec.value(nu, beta), spec.value(-nu, beta));
        for (x, v) in [(nu, h_plus), (-nu, h_minus)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::SpectralValue { nu: x, value: v });
            }
        }
        worst = worst.max((h_plus - (beta * nu).exp() * h_minus).abs() / h_plus);
    }
    Ok(worst)
}

fn check_kms(spec: &SpectralFunction, beta: f64, samples: &[f64]) -> Result<()> {
    let mut worst = (0.0, 0.0);
    for &nu in samples {
        let r = kms_residual(spec, beta, &[nu])?;
        if r > worst.0 {
            worst = (r, nu);
        }
    }
    if worst.0 > KMS_TOL {
        return Err(Error::Kms {
            residual: worst.0,
            nu: worst.1,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianScheme {
    /// Collision time `T`, the standard deviation of the time window.
    pub collision_time: f64,
    /// Each grid peak spans its center `+- half_width_factor / T`.
    pub half_width_factor: f64,
    /// Gauss-Legendre nodes per panel.
    pub points_per_peak: usize,
    /// Composite panels across one peak.
    pub panels_per_peak: usize,
    /// Grid centers; defaults to the Bohr frequencies carried by the coupling operator.
    pub centers: Option<Vec<f64>>,
}

impl GaussianScheme {
    pub fn new(collision_time: f64) -> Self {
        Self {
            collision_time,
            half_width_factor: 5.0,
            points_per_peak: 15,
            panels_per_peak: 4,
            centers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Davies,
    Gaussian(GaussianScheme),
    SingleQ,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Davies => "davies",
            Scheme::Gaussian(_) => "gaussian",
            Scheme::SingleQ => "single_q",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BathSpec {
    pub beta: f64,
    pub spectral: SpectralFunction,
    /// Hermitian system operator `R` coupled to the bath.
    pub coupling: Operator,
    pub scheme: Scheme,
}

/// One summand `A_c` of a scattering operator, at frequency `nu` with spectral weight `h(nu)`.
#[derive(Clone, Debug)]
pub struct Component {
    pub op: Operator,
    pub nu: f64,
    pub weight: f64,
}

impl Component {
    pub fn amplitude(&self) -> f64 {
        self.weight.sqrt()
    }
}

/// A term of the dissipative bracket: one scattering operator `Q^lambda`.
#[derive(Clone, Debug)]
pub struct BracketChannel {
    pub components: Vec<Component>,
    /// Measure of the channel in the sum (or `nu`-integral) over channels.
    pub quad_weight: f64,
}

impl BracketChannel {
    pub fn q_at(&self, lambda: f64, beta: f64) -> Operator {
        let d = self.components[0].op.nrows();
        self.components.iter().fold(Operator::zeros(d, d), |acc, c| {
            acc + &c.op * cr((-0.5 * lambda * beta * c.nu).exp() * c.amplitude())
        })
    }
}

/// Quadrature grid in `nu` for the Gaussian-window scheme.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub centers: Vec<f64>,
    pub half_width_factor: f64,
    pub points_per_peak: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CouplingFamily {
    pub beta: f64,
    pub scheme: Scheme,
    pub channels: Vec<BracketChannel>,
    pub grid: Option<GridSpec>,
}

impl CouplingFamily {
    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.channels.iter().flat_map(|c| c.components.iter())
    }

    /// Largest violation of `Q_alpha^{lambda dagger} = Q_{alpha'}^{1 - lambda}` over the
    /// channels, with the best partner `alpha'` picked per channel.
    pub fn adjoint_closure_residual(&self) -> f64 {
        let lambdas = [0.0, 0.3, 1.0];
        let mut worst = 0.0f64;
        for ch in &self.channels {
            let mut best = f64::INFINITY;
            for partner in &self.channels {
                if (partner.quad_weight - ch.quad_weight).abs() > 1e-12 * ch.quad_weight.abs().max(1.0) {
                    continue;
                }
                let r = lambdas
                    .iter()
                    .map(|&l| {
                        let lhs = ch.q_at(l, self.beta).adjoint();
                        let rhs = partner.q_at(1.0 - l, self.beta);
                        max_abs(&(lhs - rhs))
                    })
                    .fold(0.0, f64::max);
                best = best.min(r);
            }
            worst = worst.max(best);
        }
        worst
    }
}

fn spectral_range(eig: &EigenSystem) -> f64 {
    eig.eigenvalues[eig.dim() - 1] - eig.eigenvalues[0]
}

/// Splits `R` into eigenoperators `A_nu` with `[A_nu, H] = nu A_nu`, ascending in `nu`.
pub fn bohr_decompose(h: &Operator, r: &Operator) -> Result<Vec<(f64, Operator)>> {
    let eig = herm_eig(h)?;
    if r.shape() != h.shape() {
        return Err(Error::Input("coupling and Hamiltonian dimensions differ".into()));
    }
    Ok(bohr_decompose_in(&eig, r))
}

fn bohr_decompose_in(eig: &EigenSystem, r: &Operator) -> Vec<(f64, Operator)> {
    let d = eig.dim();
    let e = &eig.eigenvalues;
    let tol = BOHR_MERGE_TOL * spectral_range(eig);
    let r_t = hermitian_part(&eig.to_eigenbasis(r));

    // Cluster |omega| ascending; a new bin opens when a value exceeds the
    // current bin's lowest member by more than tol.
    let mut gaps: Vec<f64> = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            gaps.push((e[n] - e[m]).abs());
        }
    }
    gaps.sort_by(f64::total_cmp);
    let mut bins: Vec<(f64, f64, usize)> = Vec::new(); // (lowest, sum, count)
    for g in gaps {
        match bins.last_mut() {
            Some(b) if g - b.0 <= tol => {
                b.1 += g;
                b.2 += 1;
            }
            _ => bins.push((g, g, 1)),
        }
    }
    let centers: Vec<f64> = bins
        .iter()
        .map(|&(lo, sum, n)| if lo <= tol { 0.0 } else { sum / n as f64 })
        .collect();
    let bin_of = |g: f64| bins.partition_point(|b| b.0 <= g + 0.0) - 1;

    let mut signed: Vec<f64> = centers
        .iter()
        .flat_map(|&c| if c == 0.0 { vec![0.0] } else { vec![-c, c] })
        .collect();
    signed.sort_by(f64::total_cmp);
    let mut ops = vec![Operator::zeros(d, d); signed.len()];
    for m in 0..d {
        for n in 0..d {
            let w = e[n] - e[m];
            let c = centers[bin_of(w.abs())];
            let nu = if c == 0.0 { 0.0 } else { c.copysign(w) };
            let k = signed.iter().position(|&s| s == nu).expect("frequency bin");
            ops[k][(m, n)] = r_t[(m, n)];
        }
    }
    let scale = max_abs(&r_t).max(1.0);
    signed
        .into_iter()
        .zip(ops)
        .filter(|(_, a)| max_abs(a) > 1e-14 * scale)
        .map(|(nu, a)| (nu, eig.from_eigenbasis(&a)))
        .collect()
}

/// Smallest nonzero Bohr frequency of `H`.
pub fn min_bohr_gap(h: &Operator) -> Result<f64> {
    let eig = herm_eig(h)?;
    let e = &eig.eigenvalues;
    let tol = BOHR_MERGE_TOL * spectral_range(&eig);
    e.windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > tol)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::Config("Hamiltonian has no nonzero Bohr frequency".into()))
}

/// `(8 pi T^2)^{1/4}`: Fourier transform of the square root of a normalized Gaussian of width `T`.
pub fn gaussian_window_constant(collision_time: f64) -> f64 {
    (8.0 * PI * collision_time * collision_time).powf(0.25)
}

/// Evaluates Gaussian-window operators `A~_nu` for a fixed `(H, R, T)`.
#[derive(Clone, Debug)]
pub struct GaussianWindow {
    eig: EigenSystem,
    r_t: Operator,
    collision_time: f64,
}

impl GaussianWindow {
    pub fn new(h: &Operator, r: &Operator, collision_time: f64) -> Result<Self> {
        if !(collision_time > 0.0 && collision_time.is_finite()) {
            return Err(Error::Config(format!(
                "collision time must be positive and finite, got {collision_time}"
            )));
        }
        let eig = herm_eig(h)?;
        let r_t = hermitian_part(&eig.to_eigenbasis(r));
        Ok(Self { eig, r_t, collision_time })
    }

    /// `(A~_nu)_{mn} = c(T) R_{mn} exp(-T^2 (nu - (E_n - E_m))^2)` in the eigenbasis of `H`.
    pub fn op(&self, nu: f64) -> Operator {
        let e = &self.eig.eigenvalues;
        let t2 = self.collision_time * self.collision_time;
        let c = gaussian_window_constant(self.collision_time);
        let d = e.len();
        let a = Operator::from_fn(d, d, |m, n| {
            let w = e[n] - e[m];
            self.r_t[(m, n)] * cr(c * (-t2 * (nu - w) * (nu - w)).exp())
        });
        self.eig.from_eigenbasis(&a)
    }

    /// Bohr frequencies `E_n - E_m` on which `R` has weight.
    fn active_frequencies(&self) -> Vec<f64> {
        let e = &self.eig.eigenvalues;
        let d = e.len();
        let scale = max_abs(&self.r_t).max(1.0);
        let mut out = Vec::new();
        for m in 0..d {
            for n in 0..d {
                if self.r_t[(m, n)].norm() > 1e-14 * scale {
                    out.push(e[n] - e[m]);
                }
            }
        }
        out
    }
}

pub fn gaussian_window_op(h: &Operator, r: &Operator, collision_time: f64, nu: f64) -> Result<Operator> {
    Ok(GaussianWindow::new(h, r, collision_time)?.op(nu))
}

fn build_grid(required: &[f64], scheme: &GaussianScheme) -> Result<GridSpec> {
    let t = scheme.collision_time;
    let k = scheme.half_width_factor;
    let n = scheme.points_per_peak;
    if !(k > 0.0) || n == 0 || scheme.panels_per_peak == 0 {
        return Err(Error::Config("grid needs a positive half-width factor and points per peak".into()));
    }
    let half = k / t;
    let mut centers: Vec<f64> = match &scheme.centers {
        Some(c) => c.clone(),
        None => required.to_vec(),
    };
    // The grid must be mirror-symmetric for adjoint closure.
    let mirrored: Vec<f64> = centers.iter().map(|c| -c).collect();
    centers.extend(mirrored);
    centers.sort_by(f64::total_cmp);
    centers.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * half);

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in merge_intervals(centers.iter().map(|c| (c - half, c + half)).collect()) {
        let peaks = (((b - a) / (2.0 * half)) - 1e-9).ceil().max(1.0) as usize;
        let panels = peaks * scheme.panels_per_peak;
        let rule = composite(n, a, b, panels);
        nodes.extend(rule.nodes);
        weights.extend(rule.weights);
    }
    // Exact mirror symmetry.
    let len = nodes.len();
    for i in 0..len / 2 {
        let j = len - 1 - i;
        if (nodes[i] + nodes[j]).abs() > 1e-9 * half {
            return Err(Error::Config("frequency grid is not mirror symmetric".into()));
        }
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if len % 2 == 1 {
        nodes[len / 2] = 0.0;
    }
    for &w in required {
        let covered = nodes.iter().filter(|&&x| (x - w).abs() <= half * (1.0 + 1e-12)).count();
        if covered < n {
            return Err(Error::Config(format!(
                "frequency grid covers Bohr frequency {w} with {covered} nodes, need {n}"
            )));
        }
    }
    Ok(GridSpec {
        centers,
        half_width_factor: k,
        points_per_peak: n,
        nodes,
        weights,
    })
}

/// Builds the scattering-operator family of a bath after KMS validation.
pub fn build_coupling_family(bath: &BathSpec, h: &Operator) -> Result<CouplingFamily> {
    build_family(bath, h, true)
}

/// As [`build_coupling_family`] without the KMS check. Only for negative controls.
pub fn build_coupling_family_unchecked(bath: &BathSpec, h: &Operator) -> Result<CouplingFamily> {
    build_family(bath, h, false)
}

fn build_family(bath: &BathSpec, h: &Operator, validate: bool) -> Result<CouplingFamily> {
    if !(bath.beta > 0.0 && bath.beta.is_finite()) {
        return Err(Error::Config(format!("bath beta must be positive, got {}", bath.beta)));
    }
    if bath.coupling.shape() != h.shape() {
        return Err(Error::Config(format!(
            "coupling operator is {}x{}, Hamiltonian is {}x{}",
            bath.coupling.nrows(),
            bath.coupling.ncols(),
            h.nrows(),
            h.ncols()
        )));
    }
    if hermiticity_residual(&bath.coupling) > 1e-10 * max_abs(&bath.coupling).max(1.0) {
        return Err(Error::Config("coupling operator is not Hermitian".into()));
    }
    let beta = bath.beta;
    let empty = CouplingFamily {
        beta,
        scheme: bath.scheme.clone(),
        channels: Vec::new(),
        grid: None,
    };
    if bath.spectral.is_zero() || max_abs(&bath.coupling) == 0.0 {
        return Ok(empty);
    }
    let spec = &bath.spectral;
    match &bath.scheme {
        Scheme::Davies | Scheme::SingleQ => {
            let parts = bohr_decompose(h, &bath.coupling)?;
            let freqs: Vec<f64> = parts.iter().map(|p| p.0).collect();
            if validate {
                check_kms(spec, beta, &freqs)?;
            }
            let components: Vec<Component> = parts
                .into_iter()
                .map(|(nu, op)| Component {
                    weight: spec.value(nu, beta),
                    op,
                    nu,
                })
                .collect();
            let channels = if bath.scheme == Scheme::Davies {
                components
                    .into_iter()
                    .map(|c| BracketChannel {
                        components: vec![c],
                        quad_weight: 1.0,
                    })
                    .collect()
            } else {
                vec![BracketChannel {
                    components,
                    quad_weight: 1.0,
                }]
            };
            Ok(CouplingFamily { channels, ..empty })
        }
        Scheme::Gaussian(g) => {
            let window = GaussianWindow::new(h, &bath.coupling, g.collision_time)?;
            let grid = build_grid(&window.active_frequencies(), g)?;
            if validate {
                check_kms(spec, beta, &grid.nodes)?;
            }
            // The nu-measure is dnu / 2pi; with it the T -> infinity limit is the Davies generator.
            let channels = grid
                .nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&nu, &w)| BracketChannel {
                    components: vec![Component {
                        op: window.op(nu),
                        nu,
                        weight: spec.value(nu, beta),
                    }],
                    quad_weight: w / (2.0 * PI),
                })
                .filter(|c| c.components[0].weight > 0.0)
                .collect();
            Ok(CouplingFamily {
                channels,
                grid: Some(grid),
                ..empty
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ergodicity {
    pub ergodic: bool,
    /// Dimension of the commutant of `{H} U {A_alpha}`.
    pub commutant_dim: usize,
}

/// Tests irreducibility: only multiples of the identity may commute with `H` and every component.
pub fn ergodicity_check(h: &Operator, family: &CouplingFamily) -> Ergodicity {
    let d = h.nrows();
    let id = Operator::identity(d, d);
    let mut gram = DMatrix::<Complex64>::zeros(d * d, d * d);
    let mut add = |x: &Operator| {
        let s = max_abs(x);
        if s == 0.0 {
            return;
        }
        let x = x / cr(s);
        // vec(XA - AX) = (I (x) X - X^T (x) I) vec(A)
        let ad = id.kronecker(&x) - x.transpose().kronecker(&id);
        gram += ad.adjoint() * &ad;
    };
    add(h);
    for c in family.components() {
        add(&c.op);
        add(&c.op.adjoint());
    }
    let vals = hermitian_part(&gram).symmetric_eigen().eigenvalues;
    let top = vals.iter().fold(0.0f64, |m, &v| m.max(v)).max(1e-300);
    let commutant_dim = vals.iter().filter(|&&v| v < 1e-9 * top).count();
    Ergodicity {
        ergodic: commutant_dim == 1,
        commutant_dim,
    }
}

#[derive(Clone, Debug)]
pub struct Bath {
    pub spec: BathSpec,
    pub family: CouplingFamily,
}

/// System Hamiltonian plus baths, with every coupling family prebuilt.
#[derive(Clone, Debug)]
pub struct SystemModel {
    h_s: Operator,
    baths: Vec<Bath>,
    pub lambda: LambdaQuadrature,
}

impl SystemModel {
    pub fn new(h_s: Operator, baths: Vec<BathSpec>) -> Result<Self> {
        if h_s.nrows() != h_s.ncols() || h_s.nrows() < 2 {
            return Err(Error::Config(format!(
                "system dimension must be at least 2, got {}x{}",
                h_s.nrows(),
                h_s.ncols()
            )));
        }
        if hermiticity_residual(&h_s) > 1e-10 * max_abs(&h_s).max(1.0) {
            return Err(Error::Config("system Hamiltonian is not Hermitian".into()));
        }
        if baths.is_empty() {
            return Err(Error::Config("at least one bath is required".into()));
        }
        let h_s = hermitian_part(&h_s);
        let baths = baths
            .into_iter()
            .map(|spec| {
                let family = build_coupling_family(&spec, &h_s)?;
                Ok(Bath { spec, family })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            h_s,
            baths,
            lambda: LambdaQuadrature::default(),
        })
    }

    /// Builds from already constructed families (no validation of KMS).
    pub fn from_parts(h_s: Operator, baths: Vec<Bath>) -> Self {
        Self {
            h_s,
            baths,
            lambda: LambdaQuadrature::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.h_s.nrows()
    }

    pub fn h_s(&self) -> &Operator {
        &self.h_s
    }

    pub fn baths(&self) -> &[Bath] {
        &self.baths
    }

    pub fn betas(&self) -> Vec<f64> {
        self.baths.iter().map(|b| b.spec.beta).collect()
    }

    fn rebuild(&self, specs: Vec<BathSpec>) -> Result<Self> {
        let mut m = SystemModel::new(self.h_s.clone(), specs)?;
        m.lambda = self.lambda;
        Ok(m)
    }

    pub fn with_betas(&self, betas: &[f64]) -> Result<Self> {
        if betas.len() != self.baths.len() {
            return Err(Error::Config(format!(
                "{} temperatures given for {} baths",
                betas.len(),
                self.baths.len()
            )));
        }
        self.rebuild(
            self.baths
                .iter()
                .zip(betas)
                .map(|(b, &beta)| BathSpec { beta, ..b.spec.clone() })
                .collect(),
        )
    }

    pub fn with_common_beta(&self, beta: f64) -> Result<Self> {
        self.with_betas(&vec![beta; self.baths.len()])
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Result<Self> {
        self.rebuild(
            self.baths
                .iter()
                .map(|b| BathSpec {
                    scheme: scheme.clone(),
                    ..b.spec.clone()
                })
                .collect(),
        )
    }

    pub fn single_bath(&self, index: usize) -> Result<Self> {
        let spec = self
            .baths
            .get(index)
            .ok_or_else(|| Error::Config(format!("no bath {index}")))?
            .spec
            .clone();
        self.rebuild(vec![spec])
    }

    /// Same system with an extra copy of bath `index`.
    pub fn with_duplicate_bath(&self, index: usize) -> Result<Self> {
        let mut specs: Vec<BathSpec> = self.baths.iter().map(|b| b.spec.clone()).collect();
        specs.push(specs[index].clone());
        self.rebuild(specs)
    }

    pub fn ergodicity(&self) -> Ergodicity {
        let merged = CouplingFamily {
            beta: self.baths[0].spec.beta,
            scheme: Scheme::Davies,
            channels: self
                .baths
                .iter()
                .flat_map(|b| b.family.channels.iter().cloned())
                .collect(),
            grid: None,
        };
        ergodicity_check(&self.h_s, &merged)
    }
}

/// Common Hamiltonians and coupling operators.
pub mod presets {
    use super::*;

    /// `diag(0, E)`.
    pub fn qubit(energy: f64) -> Operator {
        crate::linops::diag(&[0.0, energy])
    }

    pub fn sigma_x() -> Operator {
        crate::linops::real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn sigma_z() -> Operator {
        crate::linops::diag(&[1.0, -1.0])
    }

    /// Truncated oscillator `omega * diag(0, 1, ..., n - 1)`.
    pub fn oscillator(levels: usize, omega: f64) -> Operator {
        let e: Vec<f64> = (0..levels).map(|k| omega * k as f64).collect();
        crate::linops::diag(&e)
    }

    /// Truncated position operator `(a + a^dagger) / sqrt(2)`.
    pub fn position(levels: usize) -> Operator {
        Operator::from_fn(levels, levels, |i, j| {
            if i + 1 == j {
                cr((j as f64 / 2.0).sqrt())
            } else if j + 1 == i {
                cr((i as f64 / 2.0).sqrt())
            } else {
                cr(0.0)
            }
        })
    }

    /// Seeded random Hermitian matrix with entries in `[-1, 1]`.
    pub fn random_hermitian(dim: usize, seed: u64) -> Operator {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        crate::random::hermitian(dim, &mut rng)
    }

    /// Three-level system with non-degenerate gaps and a fully connecting coupling.
    pub fn three_level() -> (Operator, Operator) {
        let h = crate::linops::diag(&[0.0, 1.0, 2.3]);
        let r = crate::linops::real_matrix(3, &[0.2, 1.0, 0.5, 1.0, -0.3, 0.7, 0.5, 0.7, 0.1]);
        (h, r)
    }

    pub fn ohmic(amplitude: f64) -> SpectralFunction {
        SpectralFunction::Ohmic {
            amplitude,
            cutoff: 10.0,
        }
    }
}
