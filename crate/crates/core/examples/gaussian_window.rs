//! Gaussian-window scattering operators and the coupling family built from them.

use mdslab::linops::max_abs;
use mdslab::model::presets::{ohmic, three_level};
use mdslab::model::{build_coupling_family, gaussian_window_op, BathSpec, GaussianScheme, Scheme};

fn main() -> mdslab::Result<()> {
    let (h, r) = three_level();
    for t in [1.0, 2.0, 4.0] {
        let on = gaussian_window_op(&h, &r, t, 1.0)?;
        let off = gaussian_window_op(&h, &r, t, 0.5)?;
        let closure = max_abs(&(gaussian_window_op(&h, &r, t, -0.7)?.adjoint() - gaussian_window_op(&h, &r, t, 0.7)?));
        println!(
            "T = {t}: |A(1.0)| = {:.4e}  |A(0.5)| = {:.4e}  adjoint mismatch at 0.7 {:.1e}",
            max_abs(&on),
            max_abs(&off),
            closure
        );
    }
    let bath = BathSpec {
        beta: 1.0,
        spectral: ohmic(0.1),
        coupling: r,
        scheme: Scheme::Gaussian(GaussianScheme::new(2.0)),
    };
    let family = build_coupling_family(&bath, &h)?;
    println!(
        "family at T = 2: {} channels, adjoint closure residual {:.1e}",
        family.channels.len(),
        family.adjoint_closure_residual()
    );
    Ok(())
}
