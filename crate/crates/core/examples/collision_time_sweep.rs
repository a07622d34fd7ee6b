//! Distance between the Gaussian-window and Davies linearized generators as the collision time grows.

use mdslab::linres::davies_limit_distance;
use mdslab::model::presets::{ohmic, three_level};
use mdslab::model::{min_bohr_gap, BathSpec, Scheme, SystemModel};

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
    let gap = min_bohr_gap(model.h_s())?;
    for t in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        println!("T = {:5.1}  distance {:.4e}", t / gap, davies_limit_distance(&model, t / gap)?);
    }
    Ok(())
}
