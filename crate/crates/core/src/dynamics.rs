//! Time evolution, steady states and thermodynamic observables.

use nalgebra::{DMatrix, DVector};

use crate::dissipator::{delta_s, full_rhs, mds_dissipator};
use crate::error::{Error, Result};
use crate::linops::{
    cr, from_hermitian_coords, gibbs_state, hermitian_coords, hermitian_part, identity, max_abs, trace,
    trace_distance, Operator, QuantumState,
};
use crate::model::{BathSpec, SystemModel};

/// Largest Hilbert-space dimension accepted by [`ancilla_extend`].
pub const MAX_EXTENDED_DIM: usize = 16;
/// Trace drift tolerated over one step before renormalization.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub positivity_floor: f64,
    /// Consecutive guard rejections allowed before giving up.
    pub max_retries: usize,
    /// Record only at multiples of this interval (steps are shortened to land on them).
    pub sample_dt: Option<f64>,
    /// Compute thermodynamic observables at every record.
    pub observables: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            initial_step: 1e-2,
            max_step: 1.0,
            positivity_floor: 1e-12,
            max_retries: 30,
            sample_dt: None,
            observables: true,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.positivity_floor >= 0.0) {
            return Err(Error::Config("positivity_floor must be non-negative".into()));
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("sample_dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Thermodynamic quantities of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    pub t: f64,
    pub energy: f64,
    pub entropy: f64,
    /// Entropy production per bath.
    pub sigma: Vec<f64>,
    pub sigma_total: f64,
    /// Entropy flux into each bath.
    pub flux: Vec<f64>,
    pub flux_total: f64,
    /// Relative entropy to the Gibbs state at the first bath's temperature.
    pub rel_entropy: f64,
    pub min_eig: f64,
    pub trace_drift: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted: usize,
    /// Steps rejected by the error estimate.
    pub rejected: usize,
    /// Steps rejected by the trace or positivity guard.
    pub guard_retries: usize,
    pub rhs_evals: usize,
    pub max_trace_drift: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// Empty unless observables were requested.
    pub records: Vec<Observables>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn last(&self) -> &QuantumState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProduction {
    pub per_bath: Vec<f64>,
    pub total: f64,
}

/// `sigma_j = tr(rho [[Delta S_j, Delta S_j]]_j) = tr(Delta S_j D_j(rho))`.
pub fn entropy_production(rho: &QuantumState, model: &SystemModel) -> Result<EntropyProduction> {
    let h = model.h_s();
    let per_bath = model
        .baths()
        .iter()
        .map(|b| {
            let ds = delta_s(rho, b.spec.beta, h)?;
            let d = mds_dissipator(rho, &b.family, h, model.lambda)?;
            Ok(trace(&(ds * d)).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = per_bath.iter().sum();
    Ok(EntropyProduction { per_bath, total })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThermoRecord {
    pub entropy: f64,
    pub energy: f64,
    /// `J_j = -beta_j tr(D_j(rho) H)`.
    pub flux: Vec<f64>,
    pub rel_entropy: f64,
}

/// `tr(rho (ln rho - ln sigma))`.
pub fn relative_entropy(rho: &QuantumState, sigma: &QuantumState) -> f64 {
    trace(&(rho.rho() * (rho.log() - sigma.log()))).re
}

pub fn entropy_and_flux(rho: &QuantumState, model: &SystemModel) -> Result<ThermoRecord> {
    let obs = observe(0.0, rho, model, &reference_gibbs(model)?, 0.0)?;
    Ok(ThermoRecord {
        entropy: obs.entropy,
        energy: obs.energy,
        flux: obs.flux,
        rel_entropy: obs.rel_entropy,
    })
}

fn reference_gibbs(model: &SystemModel) -> Result<QuantumState> {
    gibbs_state(model.h_s(), model.baths()[0].spec.beta)
}

/// All observables of `rho` with one dissipator evaluation per bath.
pub fn observe(
    t: f64,
    rho: &QuantumState,
    model: &SystemModel,
    gibbs: &QuantumState,
    trace_drift: f64,
) -> Result<Observables> {
    let h = model.h_s();
    let mut sigma = Vec::new();
    let mut flux = Vec::new();
    for b in model.baths() {
        let ds = delta_s(rho, b.spec.beta, h)?;
        let d = mds_dissipator(rho, &b.family, h, model.lambda)?;
        sigma.push(trace(&(ds * &d)).re);
        flux.push(-b.spec.beta * trace(&(d * h)).re);
    }
    Ok(Observables {
        t,
        energy: trace(&(rho.rho() * h)).re,
        entropy: rho.entropy(),
        sigma_total: sigma.iter().sum(),
        flux_total: flux.iter().sum(),
        sigma,
        flux,
        rel_entropy: relative_entropy(rho, gibbs),
        min_eig: rho.min_eigenvalue(),
        trace_drift,
    })
}

/// `dS/dt = -tr(rho' ln rho)`.
pub fn entropy_rate(rho: &QuantumState, model: &SystemModel) -> Result<f64> {
    let rhs = full_rhs(rho, model)?;
    Ok(-trace(&(rhs.drho_dt * rho.log())).re)
}

// Dormand-Prince 5(4) tableau; the right-hand side is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

enum StepOutcome {
    Accepted { y: Operator, k_last: Operator, err: f64 },
    ErrorReject { err: f64 },
    StageFailure,
}

fn dp_step(y: &Operator, k1: &Operator, h: f64, model: &SystemModel, opts: &IntegratorOptions, evals: &mut usize) -> StepOutcome {
    let mut k: Vec<Operator> = Vec::with_capacity(7);
    k.push(k1.clone());
    for s in 1..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            if A[s][j] != 0.0 {
                ys += kj * cr(h * A[s][j]);
            }
        }
        *evals += 1;
        match rhs_raw(&ys, model) {
            Ok(v) => k.push(v),
            Err(_) => return StepOutcome::StageFailure,
        }
    }
    let mut y5 = y.clone();
    let mut diff = Operator::zeros(y.nrows(), y.ncols());
    for s in 0..7 {
        y5 += &k[s] * cr(h * B5[s]);
        diff += &k[s] * cr(h * (B5[s] - B4[s]));
    }
    let mut err = 0.0f64;
    for (i, dz) in diff.iter().enumerate() {
        let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y5[i].norm());
        err = err.max(dz.norm() / scale);
    }
    if err <= 1.0 {
        StepOutcome::Accepted {
            y: y5,
            k_last: k.pop().expect("seven stages"),
            err,
        }
    } else {
        StepOutcome::ErrorReject { err }
    }
}

/// Adaptive Dormand-Prince integration of the nonlinear master equation with a positivity guard.
pub fn integrate(
    rho0: &QuantumState,
    model: &SystemModel,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let (t0, t1) = t_span;
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Config(format!("invalid time span ({t0}, {t1})")));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::Input("initial state and model dimensions differ".into()));
    }
    let gibbs = if opts.observables { Some(reference_gibbs(model)?) } else { None };
    let mut stats = IntegratorStats::default();
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![rho0.clone()],
        records: Vec::new(),
        stats: IntegratorStats::default(),
    };
    if let Some(g) = &gibbs {
        traj.records.push(observe(t0, rho0, model, g, 0.0)?);
    }

    let mut t = t0;
    let mut y = rho0.rho().clone();
    let mut k1 = full_rhs(rho0, model)?.drho_dt;
    stats.rhs_evals += 1;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut prev_err = 1e-4f64;
    let mut retries = 0usize;
    let mut next_sample = opts.sample_dt.map(|dt| t0 + dt);
    let mut sample_index = 1u64;

    while t < t1 {
        let target = next_sample.map_or(t1, |s| s.min(t1));
        let mut step = h.min(opts.max_step);
        let lands = t + step >= target - 1e-12 * target.abs().max(1.0);
        if lands {
            step = target - t;
        }
        let fail = |stats: &IntegratorStats, reason: String, y: &Operator| Error::Integration {
            time: t,
            reason: format!("{reason} after {} guard retries", stats.guard_retries),
            last_state: Box::new(y.clone()),
        };
        if step < 1e-14 * t1.abs().max(1.0) && !lands {
            return Err(fail(&stats, "step size underflow".into(), &y));
        }
        match dp_step(&y, &k1, step, model, opts, &mut stats.rhs_evals) {
            StepOutcome::StageFailure => {
                stats.guard_retries += 1;
                retries += 1;
                if retries > opts.max_retries {
                    return Err(fail(&stats, "stage state lost positivity".into(), &y));
                }
                h = 0.5 * step;
                continue;
            }
            StepOutcome::ErrorReject { err } => {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                continue;
            }
            StepOutcome::Accepted { y: y_new, k_last, err } => {
                let y_h = hermitian_part(&y_new);
                let drift = (trace(&y_h) - cr(1.0)).norm();
                if drift >= TRACE_DRIFT_TOL {
                    stats.guard_retries += 1;
                    retries += 1;
                    if retries > opts.max_retries {
                        return Err(fail(&stats, format!("trace drift {drift:e}"), &y));
                    }
                    h = 0.5 * step;
                    continue;
                }
                let state = match QuantumState::normalized(&y_h) {
                    Ok(s) if s.min_eigenvalue() > opts.positivity_floor => s,
                    _ => {
                        stats.guard_retries += 1;
                        retries += 1;
                        if retries > opts.max_retries {
                            return Err(fail(&stats, "positivity floor violated".into(), &y));
                        }
                        h = 0.5 * step;
                        continue;
                    }
                };
                retries = 0;
                stats.accepted += 1;
                stats.max_trace_drift = stats.max_trace_drift.max(drift);
                t = if lands { target } else { t + step };
                y = state.rho().clone();
                // The derivative at the renormalized state differs from the last stage only by rounding.
                k1 = k_last;
                let err = err.max(1e-10);
                let factor = (0.9 * err.powf(-0.7 / 5.0) * prev_err.powf(0.4 / 5.0)).clamp(0.2, 5.0);
                prev_err = err;
                if !lands {
                    h = step * factor;
                } else {
                    h = h.max(step * factor);
                }
                let record_now = match next_sample {
                    None => true,
                    Some(s) => {
                        if lands && (t - s).abs() <= 1e-12 * s.abs().max(1.0) {
                            sample_index += 1;
                            next_sample = Some(t0 + sample_index as f64 * opts.sample_dt.unwrap_or(1.0));
                            true
                        } else {
                            t >= t1
                        }
                    }
                };
                if record_now {
                    if let Some(g) = &gibbs {
                        traj.records.push(observe(t, &state, model, g, drift)?);
                    }
                    traj.times.push(t);
                    traj.states.push(state);
                }
            }
        }
    }
    traj.stats = stats;
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyOptions {
    pub integrator: IntegratorOptions,
    /// Switch from integration to Newton once `max|rhs|` falls below this.
    pub rhs_switch_tol: f64,
    pub max_time: f64,
    pub residual_tol: f64,
    pub step_tol: f64,
    pub max_newton: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions {
                observables: false,
                ..IntegratorOptions::default()
            },
            rhs_switch_tol: 1e-6,
            max_time: 1e5,
            residual_tol: 1e-11,
            step_tol: 1e-12,
            max_newton: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyReport {
    pub integration_time: f64,
    pub newton_iterations: usize,
    pub residual: f64,
    pub last_step: f64,
    /// `max|rhs|` after each Newton iterate.
    pub history: Vec<f64>,
    pub ergodic: bool,
}

fn rhs_max(rho: &QuantumState, model: &SystemModel) -> Result<f64> {
    Ok(max_abs(&full_rhs(rho, model)?.drho_dt))
}

/// Jacobian of the right-hand side in Hermitian coordinates by central differences.
fn rhs_jacobian(rho: &QuantumState, model: &SystemModel) -> Result<DMatrix<f64>> {
    let x0 = hermitian_coords(rho.rho());
    let n = x0.len();
    let d = rho.dim();
    let h = 1e-6 * rho.rho().norm();
    let cols = (0..n)
        .map(|k| {
            let mut xp = x0.clone();
            let mut xm = x0.clone();
            xp[k] += h;
            xm[k] -= h;
            let fp = rhs_raw(&from_hermitian_coords(&xp, d), model)?;
            let fm = rhs_raw(&from_hermitian_coords(&xm, d), model)?;
            Ok((hermitian_coords(&fp) - hermitian_coords(&fm)) / (2.0 * h))
        })
        .collect::<Result<Vec<DVector<f64>>>>()?;
    Ok(DMatrix::from_columns(&cols))
}

/// Right-hand side at a positive matrix without renormalizing its trace.
fn rhs_raw(y: &Operator, model: &SystemModel) -> Result<Operator> {
    let state = QuantumState::normalized(y)?;
    let tr = trace(&hermitian_part(y)).re;
    // The right-hand side is homogeneous of degree one in rho.
    Ok(full_rhs(&state, model)?.drho_dt * cr(tr))
}

/// Steady state by long-time integration followed by Newton refinement.
pub fn steady_state(
    model: &SystemModel,
    initial: Option<&QuantumState>,
    opts: &SteadyOptions,
) -> Result<(QuantumState, SteadyReport)> {
    let d = model.dim();
    let ergodic = model.ergodicity().ergodic;
    let mut rho = initial.cloned().unwrap_or_else(|| QuantumState::maximally_mixed(d));
    let mut t = 0.0;
    let mut chunk = 1.0;
    let mut residual = rhs_max(&rho, model)?;
    while residual > opts.rhs_switch_tol {
        if t >= opts.max_time {
            return Err(Error::SteadyState {
                reason: format!("integration reached t = {t} with residual {residual:e}"),
                history: vec![residual],
            });
        }
        let traj = integrate(&rho, model, (t, t + chunk), &opts.integrator)?;
        rho = traj.last().clone();
        t += chunk;
        chunk = (2.0 * chunk).min(opts.max_time);
        residual = rhs_max(&rho, model)?;
    }

    let trace_row = hermitian_coords(&identity(d));
    let mut history = Vec::new();
    let mut last_step = f64::INFINITY;
    for it in 1..=opts.max_newton {
        let f = hermitian_coords(&full_rhs(&rho, model)?.drho_dt);
        let jac = rhs_jacobian(&rho, model)?;
        let n = f.len();
        let mut sys = DMatrix::<f64>::zeros(n + 1, n);
        sys.view_mut((0, 0), (n, n)).copy_from(&jac);
        sys.row_mut(n).copy_from(&trace_row.transpose());
        let mut rhs = DVector::<f64>::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(-&f));
        rhs[n] = 1.0 - trace(rho.rho()).re;
        let svd = sys.svd(true, true);
        let delta = svd
            .solve(&rhs, 1e-14 * svd.singular_values.max())
            .map_err(|e| Error::SteadyState {
                reason: format!("Newton solve failed: {e}"),
                history: history.clone(),
            })?;
        let mut damping = 1.0;
        let next = loop {
            let cand = hermitian_part(&(rho.rho() + from_hermitian_coords(&(&delta * damping), d)));
            match QuantumState::normalized(&cand) {
                Ok(s) if s.min_eigenvalue() > opts.integrator.positivity_floor => break s,
                _ if damping > 1e-6 => damping *= 0.5,
                _ => {
                    return Err(Error::SteadyState {
                        reason: "Newton step leaves the positive cone".into(),
                        history,
                    })
                }
            }
        };
        last_step = trace_distance(next.rho(), rho.rho());
        rho = next;
        residual = rhs_max(&rho, model)?;
        history.push(residual);
        if residual < opts.residual_tol && last_step < opts.step_tol {
            return Ok((
                rho,
                SteadyReport {
                    integration_time: t,
                    newton_iterations: it,
                    residual,
                    last_step,
                    history,
                    ergodic,
                },
            ));
        }
    }
    Err(Error::SteadyState {
        reason: format!("no convergence in {} Newton iterations (last step {last_step:e})", opts.max_newton),
        history,
    })
}

/// `H (x) 1 + 1 (x) H'` with every bath coupled through `R_j (x) 1 + 1 (x) R'`.
pub fn ancilla_extend(model: &SystemModel, ancilla_h: &Operator, ancilla_r: &Operator) -> Result<SystemModel> {
    let d = model.dim();
    let da = ancilla_h.nrows();
    if ancilla_h.ncols() != da || ancilla_r.shape() != ancilla_h.shape() {
        return Err(Error::Config("ancilla operators must be square and of equal size".into()));
    }
    if d * da > MAX_EXTENDED_DIM {
        return Err(Error::Config(format!(
            "extended dimension {} exceeds the maximum {MAX_EXTENDED_DIM}",
            d * da
        )));
    }
    let (is, ia) = (identity(d), identity(da));
    let h = model.h_s().kronecker(&ia) + is.kronecker(ancilla_h);
    let specs = model
        .baths()
        .iter()
        .map(|b| BathSpec {
            coupling: b.spec.coupling.kronecker(&ia) + is.kronecker(ancilla_r),
            ..b.spec.clone()
        })
        .collect();
    let mut out = SystemModel::new(h, specs)?;
    out.lambda = model.lambda;
    Ok(out)
}

/// Partial trace over the second tensor factor of dimension `db`.
pub fn partial_trace_second(rho: &Operator, db: usize) -> Operator {
    let da = rho.nrows() / db;
    Operator::from_fn(da, da, |i, j| (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::diag;
    use crate::model::presets::*;
    use crate::model::{Scheme, SpectralFunction};

    fn qubit_model(amplitude: f64) -> SystemModel {
        SystemModel::new(
            qubit(1.0),
            vec![BathSpec {
                beta: 1.0,
                spectral: ohmic(amplitude),
                coupling: sigma_x(),
                scheme: Scheme::Davies,
            }],
        )
        .unwrap()
    }

    #[test]
    fn unitary_evolution_is_isospectral() {
        let model = qubit_model(0.0);
        let rho0 = QuantumState::normalized(&crate::linops::real_matrix(2, &[0.7, 0.2, 0.2, 0.3])).unwrap();
        let traj = integrate(&rho0, &model, (0.0, 5.0), &IntegratorOptions::default()).unwrap();
        for s in &traj.states {
            for (a, b) in s.populations().iter().zip(rho0.populations()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gibbs_trajectory_is_stationary() {
        let model = qubit_model(0.2);
        let g = gibbs_state(model.h_s(), 1.0).unwrap();
        let traj = integrate(&g, &model, (0.0, 10.0), &IntegratorOptions::default()).unwrap();
        for s in &traj.states {
            assert!(max_abs(&(s.rho() - g.rho())) < 1e-8);
        }
    }

    #[test]
    fn populations_follow_rate_equation() {
        let model = qubit_model(0.2);
        let spec = ohmic(0.2);
        let (up, down) = (spec.value(-1.0, 1.0), spec.value(1.0, 1.0));
        let rho0 = QuantumState::diagonal(&[0.99, 0.01]).unwrap();
        let opts = IntegratorOptions {
            sample_dt: Some(1.0),
            ..IntegratorOptions::default()
        };
        let traj = integrate(&rho0, &model, (0.0, 8.0), &opts).unwrap();
        let p_eq = down / (up + down);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let want = p_eq + (0.99 - p_eq) * (-(up + down) * t).exp();
            assert!((s.rho()[(0, 0)].re - want).abs() < 1e-8, "t = {t}");
        }
        assert_eq!(traj.times.len(), 9);
    }

    #[test]
    fn entropy_balance_at_a_state() {
        let model = qubit_model(0.3);
        let rho = QuantumState::normalized(&crate::linops::real_matrix(2, &[0.4, 0.1, 0.1, 0.6])).unwrap();
        let sigma = entropy_production(&rho, &model).unwrap().total;
        let flux: f64 = entropy_and_flux(&rho, &model).unwrap().flux.iter().sum();
        let ds = entropy_rate(&rho, &model).unwrap();
        assert!(sigma > 0.0);
        assert!((sigma - ds - flux).abs() < 1e-13);
    }

    #[test]
    fn maximally_mixed_entropy() {
        let model = qubit_model(0.3);
        let r = entropy_and_flux(&QuantumState::maximally_mixed(2), &model).unwrap();
        assert!((r.entropy - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn steady_state_single_bath_is_gibbs() {
        let model = qubit_model(0.2);
        let (rho, rep) = steady_state(&model, None, &SteadyOptions::default()).unwrap();
        let g = gibbs_state(model.h_s(), 1.0).unwrap();
        assert!(trace_distance(rho.rho(), g.rho()) < 1e-10);
        assert!(rep.residual < 1e-11);
    }

    #[test]
    fn two_bath_steady_state_matches_rate_oracle() {
        let spec = |beta| BathSpec {
            beta,
            spectral: ohmic(0.2),
            coupling: sigma_x(),
            scheme: Scheme::Davies,
        };
        let model = SystemModel::new(qubit(1.0), vec![spec(1.0), spec(1.2)]).unwrap();
        let (rho, _) = steady_state(&model, None, &SteadyOptions::default()).unwrap();
        let s = ohmic(0.2);
        let down = s.value(1.0, 1.0) + s.value(1.0, 1.2);
        let up = s.value(-1.0, 1.0) + s.value(-1.0, 1.2);
        let ratio = rho.rho()[(1, 1)].re / rho.rho()[(0, 0)].re;
        assert!((ratio - up / down).abs() < 1e-10);
        assert!(ratio < (-1.0f64).exp() && ratio > (-1.2f64).exp());
        assert!(rho.rho()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn ancilla_product_state_factorizes() {
        let model = qubit_model(0.2);
        let ext = ancilla_extend(&model, &Operator::zeros(2, 2), &Operator::zeros(2, 2)).unwrap();
        let rho_s = QuantumState::diagonal(&[0.8, 0.2]).unwrap();
        let rho_a = QuantumState::diagonal(&[0.3, 0.7]).unwrap();
        let rho0 = QuantumState::normalized(&rho_s.rho().kronecker(rho_a.rho())).unwrap();
        let opts = IntegratorOptions {
            observables: false,
            ..IntegratorOptions::default()
        };
        let ext_traj = integrate(&rho0, &ext, (0.0, 3.0), &opts).unwrap();
        let traj = integrate(&rho_s, &model, (0.0, 3.0), &opts).unwrap();
        let reduced = partial_trace_second(ext_traj.last().rho(), 2);
        assert!(max_abs(&(reduced - traj.last().rho())) < 1e-8);
    }

    #[test]
    fn ancilla_dimension_limit() {
        let model = qubit_model(0.2);
        let h = diag(&[0.0; 9]);
        assert!(matches!(ancilla_extend(&model, &h, &h), Err(Error::Config(_))));
    }

    #[test]
    fn zero_table_is_not_a_valid_spectrum() {
        assert!(SpectralFunction::table(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
    }
}
