//! Scenario execution for the command-line tool: one function per command, all
//! outputs deterministic given the configuration and seed.

use std::fmt::Write as _;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{operator_json, ScenarioConfig, SCHEMA_VERSION};
use crate::dissipator::{davies_channels, davies_dissipator, mds_dissipator};
use crate::dynamics::{
    ancilla_extend, entropy_production, integrate, steady_state, IntegratorOptions, SteadyOptions, Trajectory,
};
use crate::error::{Error, Result};
use crate::linops::{gibbs_state, max_abs, trace_distance};
use crate::linres::{
    davies_limit_distance, detailed_balance_residual, generator_spectrum, linearized_generator,
    onsager_finite_difference, onsager_green_kubo, OnsagerResult,
};
use crate::model::{min_bohr_gap, presets, GaussianScheme, Scheme, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Steady,
    Onsager,
    Spectrum,
    Verify,
}

/// What a command produced: the files written and whether any check failed.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub checks_failed: bool,
}

pub fn run_scenario(cmd: Command, cfg: &ScenarioConfig, out: &Path, seed: u64) -> Result<RunOutcome> {
    fs::create_dir_all(out)?;
    let model = cfg.build_model()?;
    let result = match cmd {
        Command::Simulate => simulate(cfg, &model, out, seed),
        Command::Steady => steady(&model, out),
        Command::Onsager => onsager(cfg, &model, out),
        Command::Spectrum => spectrum(&model, out),
        Command::Verify => verify(cfg, &model, out, seed),
    };
    match result {
        Err(Error::Integration {
            time,
            reason,
            last_state,
        }) => {
            let path = out.join("last_good_state.json");
            write_json(
                &path,
                &json!({ "schema_version": SCHEMA_VERSION, "time": time, "reason": reason, "state": operator_json(&last_state) }),
            )?;
            Err(Error::Integration {
                time,
                reason: format!("{reason}; last good state written to {}", path.display()),
                last_state,
            })
        }
        other => other,
    }
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names of the trajectory table.
pub fn csv_header(baths: usize, dim: usize, with_state: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "energy", "entropy", "sigma_total"].iter().map(|s| s.to_string()).collect();
    cols.extend((0..baths).map(|j| format!("sigma_{j}")));
    cols.extend((0..baths).map(|j| format!("flux_{j}")));
    cols.extend(["rel_entropy_to_gibbs", "min_eig", "trace_drift"].iter().map(|s| s.to_string()));
    if with_state {
        for i in 0..dim {
            for j in 0..dim {
                cols.push(format!("re_{i}_{j}"));
                cols.push(format!("im_{i}_{j}"));
            }
        }
    }
    cols
}

pub fn trajectory_csv(traj: &Trajectory, baths: usize, with_state: bool) -> String {
    let dim = traj.states[0].dim();
    let mut s = format!("# schema_version={SCHEMA_VERSION}\n");
    s.push_str(&csv_header(baths, dim, with_state).join(","));
    s.push('\n');
    for (r, st) in traj.records.iter().zip(&traj.states) {
        let mut row = vec![fmt(r.t), fmt(r.energy), fmt(r.entropy), fmt(r.sigma_total)];
        row.extend(r.sigma.iter().map(|&x| fmt(x)));
        row.extend(r.flux.iter().map(|&x| fmt(x)));
        row.extend([fmt(r.rel_entropy), fmt(r.min_eig), fmt(r.trace_drift)]);
        if with_state {
            for i in 0..dim {
                for j in 0..dim {
                    let z = st.rho()[(i, j)];
                    row.push(fmt(z.re));
                    row.push(fmt(z.im));
                }
            }
        }
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

fn integrator_opts(cfg: &ScenarioConfig) -> IntegratorOptions {
    IntegratorOptions {
        sample_dt: cfg.output.sample_dt,
        ..cfg.run.integrator.clone()
    }
}

fn simulate(cfg: &ScenarioConfig, model: &SystemModel, out: &Path, seed: u64) -> Result<RunOutcome> {
    let rho0 = cfg.initial_state(seed)?;
    let traj = integrate(&rho0, model, cfg.run.t_span, &integrator_opts(cfg))?;
    let csv = out.join("trajectory.csv");
    fs::write(&csv, trajectory_csv(&traj, model.baths().len(), cfg.output.write_state))?;
    let last = traj.records.last().expect("initial record");
    let summary = out.join("summary.json");
    write_json(
        &summary,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "t_span": [cfg.run.t_span.0, cfg.run.t_span.1],
            "final_state": operator_json(traj.last().rho()),
            "final_rel_entropy_to_gibbs": last.rel_entropy,
            "final_sigma_total": last.sigma_total,
            "min_eig_over_run": traj.records.iter().map(|r| r.min_eig).fold(f64::INFINITY, f64::min),
            "stats": {
                "accepted": traj.stats.accepted,
                "rejected": traj.stats.rejected,
                "guard_retries": traj.stats.guard_retries,
                "rhs_evals": traj.stats.rhs_evals,
                "max_trace_drift": traj.stats.max_trace_drift,
            },
        }),
    )?;
    Ok(RunOutcome {
        files: vec![csv, summary],
        summary: vec![
            format!("samples: {}", traj.times.len()),
            format!("final relative entropy to Gibbs: {:.3e}", last.rel_entropy),
            format!("guard retries: {}", traj.stats.guard_retries),
        ],
        checks_failed: false,
    })
}

fn steady(model: &SystemModel, out: &Path) -> Result<RunOutcome> {
    let (rho, rep) = steady_state(model, None, &SteadyOptions::default())?;
    let gibbs: Vec<f64> = model
        .betas()
        .iter()
        .map(|&b| gibbs_state(model.h_s(), b).map(|g| trace_distance(rho.rho(), g.rho())))
        .collect::<Result<_>>()?;
    let sigma = entropy_production(&rho, model)?;
    let path = out.join("steady.json");
    write_json(
        &path,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "steady",
            "state": operator_json(rho.rho()),
            "residual": rep.residual,
            "newton_iterations": rep.newton_iterations,
            "residual_history": rep.history,
            "last_step": rep.last_step,
            "integration_time": rep.integration_time,
            "ergodic": rep.ergodic,
            "trace_distance_to_gibbs": gibbs,
            "entropy_production": sigma.total,
            "entropy_production_per_bath": sigma.per_bath,
        }),
    )?;
    Ok(RunOutcome {
        files: vec![path],
        summary: vec![
            format!("Newton residual: {:.3e} after {} iterations", rep.residual, rep.newton_iterations),
            format!("trace distance to Gibbs per bath temperature: {gibbs:?}"),
        ],
        checks_failed: false,
    })
}

fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&x| Value::from(x)).collect()))
            .collect(),
    )
}

fn relative_gap(a: &OnsagerResult, b: &OnsagerResult) -> f64 {
    (&a.l - &b.l).amax() / a.l.amax().max(f64::MIN_POSITIVE)
}

fn onsager(cfg: &ScenarioConfig, model: &SystemModel, out: &Path) -> Result<RunOutcome> {
    let beta = cfg.run.onsager.beta.unwrap_or(model.betas()[0]);
    let dx = cfg.run.onsager.dx;
    // A single bath has no transport; split it into two identical copies.
    let duplicated = model.baths().len() < 2;
    let split;
    let model = if duplicated {
        split = model.with_duplicate_bath(0)?;
        &split
    } else {
        model
    };
    let gk = onsager_green_kubo(model, beta)?;
    let opts = SteadyOptions::default();
    let fd = onsager_finite_difference(model, beta, dx, &opts)?;
    let fd_half = onsager_finite_difference(model, beta, 0.5 * dx, &opts)?;
    let gap = relative_gap(&gk, &fd);
    let gap_half = relative_gap(&gk, &fd_half);
    let path = out.join("onsager.json");
    write_json(
        &path,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "onsager",
            "beta": beta,
            "duplicated_bath": duplicated,
            "green_kubo": {
                "L": matrix_json(&gk.l),
                "flux_correlations": gk.correlations.as_ref().map(matrix_json),
                "symmetry_residual": gk.symmetry_residual(),
                "min_symmetric_eigenvalue": gk.min_symmetric_eigenvalue(),
                "generator_gap": gk.gap,
                "solve_residual": gk.solve_residual,
            },
            "finite_difference": {
                "dx": dx,
                "L": matrix_json(&fd.l),
                "L_half_step": matrix_json(&fd_half.l),
                "sum_rule_residual": fd.sum_rule_residual,
            },
            "relative_gap": gap,
            "relative_gap_half_step": gap_half,
        }),
    )?;
    Ok(RunOutcome {
        files: vec![path],
        summary: vec![
            format!("Green-Kubo L = {:?}", gk.l.as_slice()),
            format!("relative gap to finite difference: {gap:.3e} (dx), {gap_half:.3e} (dx/2)"),
        ],
        checks_failed: false,
    })
}

fn spectrum(model: &SystemModel, out: &Path) -> Result<RunOutcome> {
    let beta = model.betas()[0];
    let gen = linearized_generator(model, beta)?;
    let sp = generator_spectrum(&gen);
    let db = detailed_balance_residual(&gen)?;
    let path = out.join("spectrum.json");
    write_json(
        &path,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "spectrum",
            "beta": beta,
            "eigenvalues": sp.eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "zero_count": sp.zero_count,
            "positive_count": sp.positive_count,
            "gap": sp.gap,
            "zero_vector_error": sp.zero_vector_error,
            "detailed_balance": {
                "dissipative": db.dissipative,
                "per_bath_max": db.per_bath_max,
                "hamiltonian": db.hamiltonian,
            },
        }),
    )?;
    Ok(RunOutcome {
        files: vec![path],
        summary: vec![
            format!("zero eigenvalues: {}, unstable: {}, gap: {:.3e}", sp.zero_count, sp.positive_count, sp.gap),
            format!("detailed-balance residual: {:.3e}", db.max()),
        ],
        checks_failed: false,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<(bool, f64, String)>) -> Check {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok((passed, residual, detail))) => Check {
            name: name.into(),
            passed,
            residual,
            tolerance,
            detail,
        },
        Ok(Err(e)) => Check {
            name: name.into(),
            passed: false,
            residual: f64::NAN,
            tolerance,
            detail: format!("error: {e}"),
        },
        Err(_) => Check {
            name: name.into(),
            passed: false,
            residual: f64::NAN,
            tolerance,
            detail: "panicked".into(),
        },
    }
}

fn schemes_for(model: &SystemModel) -> Result<Vec<Scheme>> {
    let gap = min_bohr_gap(model.h_s())?;
    Ok(vec![
        Scheme::Davies,
        Scheme::Gaussian(GaussianScheme::new(2.0 / gap)),
        Scheme::SingleQ,
    ])
}

/// Runs every property check at the scale of the configuration.
pub fn verify_battery(cfg: &ScenarioConfig, model: &SystemModel, seed: u64) -> VerifyReport {
    let v = &cfg.run.verify;
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<_> = (0..v.random_states).map(|_| crate::random::state(d, &mut rng)).collect();
    let traj_states: Vec<_> = (0..v.trajectories).map(|_| crate::random::state(d, &mut rng)).collect();
    let ancilla_state = crate::random::product_state(d, 2, &mut rng);
    let mut checks = Vec::new();

    checks.push(check("davies_equivalence", 1e-9, || {
        let dm = model.with_scheme(Scheme::Davies)?;
        let mut worst = 0.0f64;
        for b in dm.baths() {
            let ch = davies_channels(&b.family);
            for s in &states {
                let mds = mds_dissipator(s, &b.family, dm.h_s(), dm.lambda)?;
                worst = worst.max(max_abs(&(mds - davies_dissipator(s.rho(), &ch))));
            }
        }
        Ok((worst < 1e-9, worst, format!("{} states", states.len())))
    }));

    checks.push(check("detailed_balance", 1e-9, || {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for s in schemes_for(model)? {
            let m = model.with_scheme(s.clone())?;
            let r = detailed_balance_residual(&linearized_generator(&m, m.betas()[0])?)?.max();
            parts.push(format!("{}={r:.2e}", s.name()));
            worst = worst.max(r);
        }
        Ok((worst < 1e-9, worst, parts.join(" ")))
    }));

    checks.push(check("entropy_production_sign", 1e-12, || {
        let mut min = f64::INFINITY;
        for s in schemes_for(model)? {
            let m = model.with_scheme(s)?;
            for st in &states {
                min = min.min(entropy_production(st, &m)?.total);
            }
        }
        Ok((min >= -1e-12, (-min).max(0.0), format!("min sigma {min:.3e}")))
    }));

    checks.push(check("gibbs_steady_state", 1e-8, || {
        let m = model.single_bath(0)?;
        let (rho, rep) = steady_state(&m, None, &SteadyOptions::default())?;
        let g = gibbs_state(m.h_s(), m.betas()[0])?;
        let dist = trace_distance(rho.rho(), g.rho());
        Ok((
            dist < 1e-8 && rep.residual < 1e-11,
            dist,
            format!("Newton residual {:.2e}", rep.residual),
        ))
    }));

    let onsager_model = || -> Result<SystemModel> {
        if model.baths().len() >= 2 {
            Ok(model.clone())
        } else {
            model.with_duplicate_bath(0)
        }
    };
    let beta = cfg.run.onsager.beta.unwrap_or(model.betas()[0]);
    let gk = onsager_model().and_then(|m| onsager_green_kubo(&m, beta));
    checks.push(check("onsager_symmetry", 1e-8, || {
        let r = gk.as_ref().map_err(|e| Error::Input(e.to_string()))?;
        let s = r.symmetry_residual();
        Ok((s < 1e-8, s, format!("L = {:?}", r.l.as_slice())))
    }));
    checks.push(check("onsager_positivity", 1e-9, || {
        let r = gk.as_ref().map_err(|e| Error::Input(e.to_string()))?;
        let e = r.min_symmetric_eigenvalue();
        Ok((e >= -1e-9, (-e).max(0.0), format!("min eigenvalue {e:.3e}")))
    }));

    checks.push(check("positivity_guard_stats", 5.0, || {
        let opts = IntegratorOptions {
            observables: false,
            ..cfg.run.integrator.clone()
        };
        let mut retries = 0;
        let mut min_eig = f64::INFINITY;
        for s in &traj_states {
            let t = integrate(s, model, (0.0, v.t_end), &opts)?;
            retries += t.stats.guard_retries;
            min_eig = t.states.iter().map(|x| x.min_eigenvalue()).fold(min_eig, f64::min);
        }
        Ok((
            retries <= 5 && min_eig > opts.positivity_floor,
            retries as f64,
            format!("min eigenvalue {min_eig:.3e}"),
        ))
    }));

    checks.push(check("T_limit_convergence", 0.0, || {
        let gap = min_bohr_gap(model.h_s())?;
        let dists = v
            .collision_times
            .iter()
            .map(|t| davies_limit_distance(model, t / gap))
            .collect::<Result<Vec<f64>>>()?;
        let monotone = dists.windows(2).all(|w| w[1] < w[0]);
        Ok((monotone, *dists.last().expect("two or more"), format!("distances {:?}", dists.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>())))
    }));

    checks.push(check("ancilla_positivity", 1e-12, || {
        if 2 * d > crate::dynamics::MAX_EXTENDED_DIM {
            return Ok((true, 0.0, "skipped: extended dimension too large".into()));
        }
        let gap = min_bohr_gap(model.h_s())?;
        let ext = ancilla_extend(model, &presets::qubit(gap), &presets::sigma_x())?;
        let opts = IntegratorOptions {
            observables: false,
            ..cfg.run.integrator.clone()
        };
        let t = integrate(&ancilla_state, &ext, (0.0, v.t_end), &opts)?;
        let min_eig = t.states.iter().map(|x| x.min_eigenvalue()).fold(f64::INFINITY, f64::min);
        Ok((min_eig > 1e-12, min_eig, format!("guard retries {}", t.stats.guard_retries)))
    }));

    let all_passed = checks.iter().all(|c| c.passed);
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        checks,
        all_passed,
    }
}

fn verify(cfg: &ScenarioConfig, model: &SystemModel, out: &Path, seed: u64) -> Result<RunOutcome> {
    let report = verify_battery(cfg, model, seed);
    let path = out.join("verify.json");
    write_json(&path, &report)?;
    let summary = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{:<4} {:<24} residual {:.3e} (tol {:.1e}) {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.detail
            )
        })
        .collect();
    Ok(RunOutcome {
        files: vec![path],
        summary,
        checks_failed: !report.all_passed,
    })
}
