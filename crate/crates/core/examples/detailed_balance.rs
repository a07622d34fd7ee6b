//! Kubo self-adjointness of the linearized generator, with a flat-rate Davies generator as a negative control.

use mdslab::dissipator::{davies_channels_from, davies_superoperator};
use mdslab::linops::gibbs_state;
use mdslab::linres::{detailed_balance_residual, kubo_symmetry_residual, linearized_generator};
use mdslab::model::presets::{ohmic, three_level};
use mdslab::model::{BathSpec, GaussianScheme, Scheme, SpectralFunction, SystemModel};

fn main() -> mdslab::Result<()> {
    let (h, r) = three_level();
    for scheme in [Scheme::Davies, Scheme::Gaussian(GaussianScheme::new(2.0)), Scheme::SingleQ] {
        let name = scheme.name();
        let model = SystemModel::new(
            h.clone(),
            vec![BathSpec {
                beta: 1.0,
                spectral: ohmic(0.1),
                coupling: r.clone(),
                scheme,
            }],
        )?;
        let db = detailed_balance_residual(&linearized_generator(&model, 1.0)?)?;
        println!("{name:>9}: dissipative {:.2e}  hamiltonian {:.2e}", db.dissipative, db.hamiltonian);
    }
    let flat = SpectralFunction::table(vec![(-5.0, 1.0), (5.0, 1.0)])?;
    let control = davies_superoperator(&davies_channels_from(&h, &r, &flat, 1.0)?, 3);
    let rho = gibbs_state(&h, 1.0)?;
    println!("flat-rate control: {:.3e}", kubo_symmetry_residual(&control, &rho)?);
    Ok(())
}
