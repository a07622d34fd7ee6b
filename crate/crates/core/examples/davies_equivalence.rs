//! The nonlinear dissipator with Davies eigenoperators against the linear Davies generator.

use mdslab::dissipator::{davies_channels, davies_dissipator, mds_dissipator};
use mdslab::linops::max_abs;
use mdslab::model::presets::{ohmic, qubit, sigma_x};
use mdslab::model::{BathSpec, Scheme, SystemModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

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
    let family = &model.baths()[0].family;
    let channels = davies_channels(family);
    for ch in &channels {
        println!("Bohr frequency {:+.3}  rate {:.6}", ch.nu, ch.rate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rho = mdslab::random::state(2, &mut rng);
        let nonlinear = mds_dissipator(&rho, family, model.h_s(), model.lambda)?;
        worst = worst.max(max_abs(&(nonlinear - davies_dissipator(rho.rho(), &channels))));
    }
    println!("max deviation over 20 random states: {worst:.3e}");
    Ok(())
}
