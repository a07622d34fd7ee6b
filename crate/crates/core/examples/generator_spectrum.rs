//! Spectrum of the linearized generator around the Gibbs state.

use mdslab::linres::{generator_spectrum, linearized_generator};
use mdslab::model::presets::{ohmic, three_level};
use mdslab::model::{BathSpec, Scheme, SystemModel};

fn main() -> mdslab::Result<()> {
    let (h, r) = three_level();
    let model = SystemModel::new(
        h,
        vec![BathSpec {
            beta: 1.0,
            spectral: ohmic(0.1),
            coupling: r,
            scheme: Scheme::Davies,
        }],
    )?;
    let sp = generator_spectrum(&linearized_generator(&model, 1.0)?);
    for z in &sp.eigenvalues {
        println!("{:+.6e} {:+.6e}i", z.re, z.im);
    }
    println!(
        "zero eigenvalues {}, unstable {}, gap {:.4e}, kernel distance to Gibbs {:.1e}",
        sp.zero_count, sp.positive_count, sp.gap, sp.zero_vector_error
    );
    Ok(())
}
