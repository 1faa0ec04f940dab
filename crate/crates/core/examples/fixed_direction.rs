//! Fixed-direction packets: as the profile narrows the localized correlation
//! approaches the sharp-momentum value.

use localized_epr::integrals::minimum_nodes_fixed;
use localized_epr::{
    correlation_fixed_directions, correlation_sharp, on_shell, DetectorRegion, Direction, FactorizedState,
    QuadratureSpec, RadialProfile, Vec3,
};

fn main() -> localized_epr::Result<()> {
    let mass = 1.0;
    let (dir_a, dir_b) = (Direction::x(), Direction::y());
    let a = Direction::x();
    let b = Direction::new(Vec3::new(0.0, 1.0, 1.0))?;
    let sharp = correlation_sharp(
        &on_shell(mass, dir_a.into_vec())?,
        &on_shell(mass, dir_b.into_vec())?,
        &a,
        &b,
        mass,
    )?;
    println!("sharp: {:.10}", sharp.value);

    let det_a = DetectorRegion::cube(Vec3::new(3.0, 0.0, 0.0), 5.0)?;
    let det_b = DetectorRegion::cube(Vec3::new(0.0, 3.0, 0.0), 5.0)?;
    for sigma in [0.5, 0.2, 0.1, 0.03, 0.01] {
        let profile = RadialProfile::gaussian(1.0, sigma)?;
        let state = FactorizedState {
            profile_a: profile,
            profile_b: profile,
            dir_a,
            dir_b,
            mass,
        };
        // wide profiles oscillate more across the detector and need more nodes
        let needed = minimum_nodes_fixed(&profile, &dir_a, &det_a, 1e-10)?;
        let spec = QuadratureSpec {
            nodes_1d: needed.max(48),
            ..QuadratureSpec::default()
        };
        let c = correlation_fixed_directions(&state, &det_a, &det_b, &a, &b, &spec)?;
        println!(
            "sigma {sigma:>5}: C = {:.10} ± {:.1e}  (rel. deviation from sharp {:.2e})",
            c.value,
            c.abs_error,
            ((c.value - sharp.value) / sharp.value).abs()
        );
    }
    Ok(())
}
