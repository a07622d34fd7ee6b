//! Relaxation of an excited qubit and the steady-state solver.

use mdslab::dynamics::{integrate, steady_state, IntegratorOptions, SteadyOptions};
use mdslab::linops::{gibbs_state, trace_distance, QuantumState};
use mdslab::model::presets::{ohmic, qubit, sigma_x};
use mdslab::model::{BathSpec, Scheme, SystemModel};

fn main() -> mdslab::Result<()> {
    let model = SystemModel::new(
        qubit(1.0),
        vec![BathSpec {
            beta: 1.0,
            spectral: ohmic(0.1),
            coupling: sigma_x(),
            scheme: Scheme::SingleQ,
        }],
    )?;
    let rho0 = QuantumState::diagonal(&[0.01, 0.99])?;
    let opts = IntegratorOptions {
        sample_dt: Some(5.0),
        ..IntegratorOptions::default()
    };
    let traj = integrate(&rho0, &model, (0.0, 60.0), &opts)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "energy", "entropy", "sigma", "D(rho||g)");
    for r in &traj.records {
        println!(
            "{:6.1} {:12.6} {:12.6} {:12.4e} {:12.4e}",
            r.t, r.energy, r.entropy, r.sigma_total, r.rel_entropy
        );
    }
    println!("steps {} rejected {} guard retries {}", traj.stats.accepted, traj.stats.rejected, traj.stats.guard_retries);

    let (rho, report) = steady_state(&model, Some(traj.last()), &SteadyOptions::default())?;
    let gibbs = gibbs_state(model.h_s(), 1.0)?;
    println!(
        "steady state: {} Newton iterations, residual {:.2e}, trace distance to Gibbs {:.2e}",
        report.newton_iterations,
        report.residual,
        trace_distance(rho.rho(), gibbs.rho())
    );
    Ok(())
}
