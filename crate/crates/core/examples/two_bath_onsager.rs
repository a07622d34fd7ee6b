//! Onsager matrix of a qubit between two baths: Green-Kubo against steady-state currents.

use mdslab::dynamics::SteadyOptions;
use mdslab::linres::{onsager_finite_difference, onsager_green_kubo};
use mdslab::model::presets::{ohmic, qubit, sigma_x};
use mdslab::model::{BathSpec, Scheme, SystemModel};

fn main() -> mdslab::Result<()> {
    let bath = |amplitude| BathSpec {
        beta: 1.0,
        spectral: ohmic(amplitude),
        coupling: sigma_x(),
        scheme: Scheme::Davies,
    };
    let model = SystemModel::new(qubit(1.0), vec![bath(0.1), bath(0.2)])?;
    let gk = onsager_green_kubo(&model, 1.0)?;
    println!("Green-Kubo L = {}", gk.l);
    println!("symmetry residual {:.2e}, min eigenvalue {:.3e}", gk.symmetry_residual(), gk.min_symmetric_eigenvalue());
    for dx in [1e-3, 5e-4] {
        let fd = onsager_finite_difference(&model, 1.0, dx, &SteadyOptions::default())?;
        let gap = (&fd.l - &gk.l).amax() / gk.l.amax();
        println!("dX = {dx:.0e}: relative gap {gap:.3e}");
    }
    Ok(())
}
