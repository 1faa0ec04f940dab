//! The localization kernel of box and ball detectors.

use localized_epr::{DetectorRegion, Vec3};
use nalgebra::Rotation3;

fn main() -> localized_epr::Result<()> {
    let cube = DetectorRegion::cube(Vec3::new(2.0, 0.0, 0.0), 1.0)?;
    let ball = DetectorRegion::ball(Vec3::zeros(), 0.75)?;
    let tilted = cube.rotated(&Rotation3::new(Vec3::new(0.0, 0.0, 0.4)));
    for (name, det) in [("cube", cube), ("tilted cube", tilted), ("ball", ball)] {
        println!("{name}: volume {:?}", det.volume());
        for q in [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, -3.0, 0.5)] {
            let d = det.delta_kernel(&q)?;
            println!("  q = {:?}  Δ = {d:.6e}", q.as_slice());
        }
    }
    match DetectorRegion::AllSpace.delta_kernel(&Vec3::zeros()) {
        Err(e) => println!("all space: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
