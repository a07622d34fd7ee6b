//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use mdslab::dissipator::*;
use mdslab::dynamics::*;
use mdslab::linops::*;
use mdslab::linres::*;
use mdslab::model::presets::*;
use mdslab::model::*;
use mdslab::quadrature::gauss_legendre;
use mdslab::{Operator, QuantumState, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn bath(beta: f64, coupling: Operator, amplitude: f64) -> BathSpec {
    BathSpec {
        beta,
        spectral: ohmic(amplitude),
        coupling,
        scheme: Scheme::Davies,
    }
}

fn qubit_model() -> SystemModel {
    SystemModel::new(qubit(1.0), vec![bath(1.0, sigma_x(), 0.1)]).unwrap()
}

fn qubit_two_baths(beta_b: f64) -> SystemModel {
    SystemModel::new(qubit(1.0), vec![bath(1.0, sigma_x(), 0.1), bath(beta_b, sigma_x(), 0.2)]).unwrap()
}

fn three_level_model() -> SystemModel {
    let (h, r) = three_level();
    SystemModel::new(h, vec![bath(1.0, r, 0.1)]).unwrap()
}

/// Davies, Gaussian window with `T = 2 / gap`, and the single-operator scheme.
fn schemes(model: &SystemModel) -> Vec<Scheme> {
    let gap = min_bohr_gap(model.h_s()).unwrap();
    vec![
        Scheme::Davies,
        Scheme::Gaussian(GaussianScheme::new(2.0 / gap)),
        Scheme::SingleQ,
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn davies_equivalence() -> Result<Outcome> {
    let model = qubit_model();
    let fam = &model.baths()[0].family;
    let channels = davies_channels(fam);
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let rho = mdslab::random::state(2, &mut r);
        let mds = mds_dissipator(&rho, fam, model.h_s(), model.lambda)?;
        let lin = davies_rhs(rho.rho(), &channels, model.h_s()) - hamiltonian_part(rho.rho(), model.h_s());
        worst = worst.max(max_abs(&(mds - lin)));
    }
    outcome(worst < 1e-9, format!("max deviation {worst:.3e} over 50 states (tol 1e-9)"))
}

fn gibbs_steady_state() -> Result<Outcome> {
    let base = qubit_model();
    let gibbs = gibbs_state(base.h_s(), 1.0)?;
    let mut r = rng(2);
    let starts: Vec<QuantumState> = (0..5).map(|_| mdslab::random::state(2, &mut r)).collect();
    let mut worst_dist = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut parts = Vec::new();
    for s in schemes(&base) {
        let m = base.with_scheme(s.clone())?;
        let mut d_s = 0.0f64;
        for rho0 in &starts {
            let (rho, rep) = steady_state(&m, Some(rho0), &SteadyOptions::default())?;
            d_s = d_s.max(trace_distance(rho.rho(), gibbs.rho()));
            worst_res = worst_res.max(rep.residual);
        }
        worst_dist = worst_dist.max(d_s);
        parts.push(format!("{}={d_s:.2e}", s.name()));
    }
    outcome(
        worst_dist < 1e-8 && worst_res < 1e-11,
        format!(
            "trace distance {} (tol 1e-8), Newton residual {worst_res:.2e} (tol 1e-11)",
            parts.join(" ")
        ),
    )
}

/// Test trajectories shared by the entropy and positivity criteria.
struct Runs {
    min_sigma_sampled: f64,
    worst_balance: f64,
    min_eig: f64,
    guard_retries: usize,
}

fn run_trajectories() -> Result<Runs> {
    let mut runs = Runs {
        min_sigma_sampled: f64::INFINITY,
        worst_balance: 0.0,
        min_eig: f64::INFINITY,
        guard_retries: 0,
    };
    let opts = IntegratorOptions {
        sample_dt: Some(1.0),
        ..IntegratorOptions::default()
    };
    let mut r = rng(3);
    for base in [qubit_two_baths(0.5), three_level_model()] {
        for s in schemes(&base) {
            let m = base.with_scheme(s)?;
            for _ in 0..5 {
                let rho0 = mdslab::random::state(m.dim(), &mut r);
                let traj = integrate(&rho0, &m, (0.0, 30.0), &opts)?;
                runs.guard_retries += traj.stats.guard_retries;
                for (rho, obs) in traj.states.iter().zip(&traj.records) {
                    runs.min_eig = runs.min_eig.min(rho.min_eigenvalue());
                    runs.min_sigma_sampled = runs.min_sigma_sampled.min(obs.sigma_total);
                    let ds_dt = entropy_rate(rho, &m)?;
                    let scale = obs.sigma_total.abs().max(ds_dt.abs() + obs.flux_total.abs()).max(1e-300);
                    let rel = (obs.sigma_total - ds_dt - obs.flux_total).abs() / scale;
                    runs.worst_balance = runs.worst_balance.max(rel);
                }
            }
        }
    }
    Ok(runs)
}

fn entropy_production_sign(runs: &Runs) -> Result<Outcome> {
    let mut r = rng(4);
    let mut min_sigma = f64::INFINITY;
    for base in [qubit_two_baths(0.5), three_level_model()] {
        for s in schemes(&base) {
            let m = base.with_scheme(s)?;
            for _ in 0..200 {
                let rho = mdslab::random::state(m.dim(), &mut r);
                min_sigma = min_sigma.min(entropy_production(&rho, &m)?.total);
            }
        }
    }
    outcome(
        min_sigma >= -1e-12 && runs.min_sigma_sampled >= -1e-10 && runs.worst_balance <= 1e-6,
        format!(
            "min sigma on random states {min_sigma:.3e} (tol -1e-12), along trajectories {:.3e} (tol -1e-10), balance relative error {:.2e} (tol 1e-6)",
            runs.min_sigma_sampled, runs.worst_balance
        ),
    )
}

fn positivity(runs: &Runs) -> Result<Outcome> {
    let base = qubit_model();
    let mut r = rng(5);
    let mut ancilla_min = f64::INFINITY;
    let opts = IntegratorOptions {
        observables: false,
        ..IntegratorOptions::default()
    };
    for s in schemes(&base) {
        let m = base.with_scheme(s)?;
        let ext = ancilla_extend(&m, &qubit(1.0), &sigma_x())?;
        let rho0 = mdslab::random::product_state(2, 2, &mut r);
        let traj = integrate(&rho0, &ext, (0.0, 30.0), &opts)?;
        ancilla_min = traj.states.iter().map(|x| x.min_eigenvalue()).fold(ancilla_min, f64::min);
    }
    outcome(
        runs.min_eig > 1e-12 && runs.guard_retries <= 5 && ancilla_min > 1e-12,
        format!(
            "min eigenvalue {:.3e}, guard retries {} (max 5), ancilla min eigenvalue {ancilla_min:.3e}",
            runs.min_eig, runs.guard_retries
        ),
    )
}

fn detailed_balance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for base in [qubit_model(), three_level_model()] {
        for s in schemes(&base) {
            let m = base.with_scheme(s)?;
            let gen = linearized_generator(&m, 1.0)?;
            worst = worst.max(detailed_balance_residual(&gen)?.max());
        }
    }
    outcome(worst < 1e-9, format!("max residual {worst:.3e} (tol 1e-9)"))
}

fn generator_spectrum_check() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, base) in [("qubit", qubit_model()), ("three_level", three_level_model())] {
        for s in schemes(&base) {
            let m = base.with_scheme(s.clone())?;
            if !m.ergodicity().ergodic {
                continue;
            }
            let sp = generator_spectrum(&linearized_generator(&m, 1.0)?);
            let max_re = sp.eigenvalues.iter().skip(1).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            ok &= sp.zero_count == 1 && sp.zero_vector_error < 1e-8 && max_re <= 1e-10;
            parts.push(format!(
                "{name}/{}: zeros {} kernel error {:.1e} max Re {:.2e}",
                s.name(),
                sp.zero_count,
                sp.zero_vector_error,
                max_re
            ));
        }
    }
    outcome(ok, parts.join("; "))
}

fn onsager() -> Result<Outcome> {
    let model = qubit_two_baths(1.0);
    let gk = onsager_green_kubo(&model, 1.0)?;
    let opts = SteadyOptions::default();
    let fd = onsager_finite_difference(&model, 1.0, 1e-3, &opts)?;
    let fd_half = onsager_finite_difference(&model, 1.0, 5e-4, &opts)?;
    let scale = gk.l.amax();
    let gap = (&fd.l - &gk.l).amax() / scale;
    let gap_half = (&fd_half.l - &gk.l).amax() / scale;
    let sym = gk.symmetry_residual();
    let eig = gk.min_symmetric_eigenvalue();
    outcome(
        sym < 1e-8 && eig >= -1e-9 && gap < 1e-3 && gap_half < gap,
        format!(
            "symmetry {sym:.2e} (tol 1e-8), min eigenvalue {eig:.2e}, relative gap {gap:.3e} at dX=1e-3 and {gap_half:.3e} at dX=5e-4"
        ),
    )
}

fn davies_recovery() -> Result<Outcome> {
    let model = three_level_model();
    let e = min_bohr_gap(model.h_s())?;
    let dists = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|t| davies_limit_distance(&model, t / e))
        .collect::<Result<Vec<f64>>>()?;
    let monotone = dists.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = dists.iter().map(|d| format!("{d:.3e}")).collect();
    outcome(monotone, format!("distances over T = 1, 2, 4, 8: {}", shown.join(", ")))
}

fn linearization_consistency() -> Result<Outcome> {
    let mut r = rng(6);
    let eps = 1e-6;
    let mut worst = 0.0f64;
    for base in [qubit_model(), three_level_model()] {
        let d = base.dim();
        for s in schemes(&base) {
            let m = base.with_scheme(s)?;
            let gen = linearized_generator(&m, 1.0)?;
            let lin = gen.dissipative_total();
            let rho_b = gibbs_state(m.h_s(), 1.0)?;
            let fam = &m.baths()[0].family;
            for _ in 0..5 {
                let mut delta = mdslab::random::hermitian(d, &mut r);
                let tr = trace(&delta) / Complex64::new(d as f64, 0.0);
                delta -= identity(d) * tr;
                let plus = QuantumState::new(rho_b.rho() + &delta * cr(eps))?;
                let minus = QuantumState::new(rho_b.rho() - &delta * cr(eps))?;
                let fd = (mds_dissipator(&plus, fam, m.h_s(), m.lambda)? - mds_dissipator(&minus, fam, m.h_s(), m.lambda)?)
                    / cr(2.0 * eps);
                let exact = lin.apply(&delta);
                worst = worst.max(max_abs(&(fd - &exact)) / max_abs(&exact));
            }
        }
    }
    outcome(worst < 1e-4, format!("max relative deviation {worst:.3e} (tol 1e-4)"))
}

fn oracle_equivalences() -> Result<Outcome> {
    let mut r = rng(7);
    let (h, rc) = three_level();

    // Primal-dual identity.
    let model = three_level_model();
    let mut primal_dual = 0.0f64;
    for s in schemes(&model) {
        let m = model.with_scheme(s)?;
        let fam = &m.baths()[0].family;
        let rho = mdslab::random::state(3, &mut r);
        let ds = delta_s(&rho, 1.0, &h)?;
        let dual = mds_dissipator(&rho, fam, &h, m.lambda)?;
        for _ in 0..10 {
            let x = mdslab::random::hermitian(3, &mut r);
            let lhs = trace(&(&x * &dual));
            let rhs = trace(&(rho.rho() * modular_bracket(&rho, fam, &x, &ds, m.lambda)));
            primal_dual = primal_dual.max((lhs - rhs).norm());
        }
    }

    // Logarithmic-mean map against a 64-node rule in lambda.
    let rho = mdslab::random::state(3, &mut r);
    let a = mdslab::random::complex_matrix(3, &mut r);
    let rule = gauss_legendre(64, 0.0, 1.0);
    let mut quad = Operator::zeros(3, 3);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        quad += rho.power(*x) * &a * rho.power(1.0 - x) * cr(*w);
    }
    let krho = max_abs(&(krho_apply(&rho, &a) - quad));

    // Window operator against its defining time integral.
    let t_c = 1.5;
    let eig = herm_eig(&h)?;
    let mut window = 0.0f64;
    for nu in [-1.3, -0.2, 0.0, 0.9, 2.3] {
        let closed = gaussian_window_op(&h, &rc, t_c, nu)?;
        let half = 14.0 * t_c;
        let rule = mdslab::quadrature::composite(20, -half, half, 40);
        let mut acc = Operator::zeros(3, 3);
        let norm = (2.0 * std::f64::consts::PI * t_c * t_c).powf(-0.25);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let ut = eig.from_eigenbasis(&Operator::from_diagonal(&nalgebra::DVector::from_iterator(
                3,
                eig.eigenvalues.iter().map(|e| Complex64::new(0.0, e * t).exp()),
            )));
            let heis = &ut * &rc * ut.adjoint();
            let env = norm * (-t * t / (4.0 * t_c * t_c)).exp();
            acc += heis * (Complex64::new(0.0, nu * t).exp() * env * w);
        }
        window = window.max(max_abs(&(closed - acc)));
    }

    outcome(
        primal_dual <= 1e-9 && krho <= 1e-10 && window <= 1e-8,
        format!("primal-dual {primal_dual:.2e} (tol 1e-9), K_rho {krho:.2e} (tol 1e-10), window {window:.2e} (tol 1e-8)"),
    )
}

fn report(name: &str, started: Instant, r: Result<Outcome>) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match r {
        Ok(o) => {
            println!("{} {name}: {} [{secs:.1} s]", if o.passed { "PASS" } else { "FAIL" }, o.detail);
            o.passed
        }
        Err(e) => {
            println!("FAIL {name}: error {e} [{secs:.1} s]");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    let t = Instant::now();
    ok &= report("davies_equivalence", t, davies_equivalence());
    let t = Instant::now();
    ok &= report("gibbs_steady_state", t, gibbs_steady_state());
    let t = Instant::now();
    let runs = run_trajectories();
    match &runs {
        Ok(runs) => {
            ok &= report("entropy_production_sign", t, entropy_production_sign(runs));
            let t = Instant::now();
            ok &= report("positivity", t, positivity(runs));
        }
        Err(e) => {
            println!("FAIL entropy_production_sign: trajectory error {e}");
            println!("FAIL positivity: trajectory error {e}");
            ok = false;
        }
    }
    let t = Instant::now();
    ok &= report("detailed_balance", t, detailed_balance());
    let t = Instant::now();
    ok &= report("generator_spectrum", t, generator_spectrum_check());
    let t = Instant::now();
    ok &= report("onsager", t, onsager());
    let t = Instant::now();
    ok &= report("davies_recovery", t, davies_recovery());
    let t = Instant::now();
    ok &= report("linearization_consistency", t, linearization_consistency());
    let t = Instant::now();
    ok &= report("oracle_equivalences", t, oracle_equivalences());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
