//! The CHSH combination against momentum, sharp and localized.

use std::f64::consts::SQRT_2;

use localized_epr::correlator::correlation_from_rays;
use localized_epr::{
    chsh, correlation_sharp, fixed_direction_integrals, on_shell, DetectorRegion, Direction, QuadratureSpec,
    RadialProfile, Vec3,
};

fn main() -> localized_epr::Result<()> {
    let mass = 1.0;
    let a = Direction::z();
    let a2 = Direction::x();
    let b = Direction::new(Vec3::new(1.0, 0.0, 1.0))?;
    let b2 = Direction::new(Vec3::new(1.0, 0.0, -1.0))?;
    let (dir_a, dir_b) = (Direction::x(), Direction::y());
    let det_a = DetectorRegion::cube(Vec3::new(8.0, 0.0, 0.0), 4.0)?;
    let det_b = DetectorRegion::ball(Vec3::new(0.0, 8.0, 0.0), 2.0)?;
    let spec = QuadratureSpec::default();

    println!("{:>6} {:>12} {:>12}   (Tsirelson {:.6})", "|q|", "sharp", "localized", 2.0 * SQRT_2);
    for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let qa = on_shell(mass, dir_a.into_vec() * k)?;
        let qb = on_shell(mass, dir_b.into_vec() * k)?;
        let sharp = chsh(|x, y| correlation_sharp(&qa, &qb, x, y, mass), &a, &a2, &b, &b2)?;

        let profile = RadialProfile::gaussian(k, 0.05)?;
        let ia = fixed_direction_integrals(&profile, &dir_a, &det_a, mass, &spec)?;
        let ib = fixed_direction_integrals(&profile, &dir_b, &det_b, mass, &spec)?;
        let local = chsh(|x, y| correlation_from_rays(&ia, &ib, x, y), &a, &a2, &b, &b2)?;
        println!("{k:>6} {:>12.8} {:>12.8}", sharp.value, local.value);
    }
    Ok(())
}
