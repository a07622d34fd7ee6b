//! Evolution of a system entangled with an untouched ancilla qubit.

use mdslab::dynamics::{ancilla_extend, integrate, partial_trace_second, IntegratorOptions};
use mdslab::linops::{max_abs, QuantumState};
use mdslab::model::presets::{ohmic, qubit, sigma_x};
use mdslab::model::{BathSpec, Scheme, SystemModel};
use mdslab::Operator;
use num_complex::Complex64;

fn main() -> mdslab::Result<()> {
    let model = SystemModel::new(
        qubit(1.0),
        vec![BathSpec {
            beta: 1.0,
            spectral: ohmic(0.1),
            coupling: sigma_x(),
            scheme: Scheme::Davies,
        }],
    )?;
    let ext = ancilla_extend(&model, &qubit(0.7), &sigma_x())?;
    // Nearly maximally entangled pair, mixed slightly with noise.
    let mut psi = Operator::zeros(4, 4);
    let s = Complex64::new(0.5, 0.0);
    for i in [0, 3] {
        for j in [0, 3] {
            psi[(i, j)] = s;
        }
    }
    let rho0 = QuantumState::new(psi * Complex64::new(0.98, 0.0) + Operator::identity(4, 4) * Complex64::new(0.005, 0.0))?;
    let opts = IntegratorOptions {
        sample_dt: Some(10.0),
        ..IntegratorOptions::default()
    };
    let traj = integrate(&rho0, &ext, (0.0, 60.0), &opts)?;
    for (t, st) in traj.times.iter().zip(&traj.states) {
        println!("t = {t:5.1}  min eigenvalue {:.4e}", st.min_eigenvalue());
    }
    let alone = integrate(&QuantumState::new(partial_trace_second(rho0.rho(), 2))?, &model, (0.0, 60.0), &opts)?;
    let reduced = partial_trace_second(traj.last().rho(), 2);
    println!("reduced state vs direct evolution: {:.2e}", max_abs(&(reduced - alone.last().rho())));
    Ok(())
}
