//! The brute-force pair sum, which forms the spin traces by explicit matrix
//! products, against the integral reduction on the same small grids.

use localized_epr::correlator::{localized_moments, normalized_correlation};
use localized_epr::integrals::grid_integrals;
use localized_epr::quadrature::MomentumGrid;
use localized_epr::wavepacket::MomentumDomain;
use localized_epr::{brute_force_pair_moments, Complex, DetectorRegion, Direction, PairGrid, Vec3};

fn main() -> localized_epr::Result<()> {
    let mass = 1.0;
    let grid = |c: Vec3| {
        MomentumGrid::tensor(
            &MomentumDomain::Cuboid {
                center: c,
                half_widths: Vec3::repeat(0.4),
            },
            3,
        )
    };
    let pairs = PairGrid {
        a: grid(Vec3::new(1.0, 0.0, 0.0))?,
        b: grid(Vec3::new(0.0, 1.0, 0.2))?,
    };
    let phi_a = |k: &Vec3| Complex::new(0.0, (k - Vec3::new(1.0, 0.0, 0.0)).dot(&Vec3::new(0.5, 0.1, 0.0))).exp();
    let phi_b = |p: &Vec3| Complex::new(-(p - Vec3::new(0.0, 1.0, 0.2)).norm_squared(), 0.3 * p.z).exp();
    let det_a = DetectorRegion::cube(Vec3::new(3.0, 0.0, 0.0), 2.0)?;
    let det_b = DetectorRegion::ball(Vec3::new(0.0, 3.0, 0.0), 1.0)?;
    let a = Direction::spherical(0.7, 0.2);
    let b = Direction::spherical(1.9, 2.5);

    let (num, den) = brute_force_pair_moments(|k, p| phi_a(k) * phi_b(p), &det_a, &det_b, &a, &b, mass, &pairs)?;
    let ia = grid_integrals(phi_a, &pairs.a, &det_a, mass)?;
    let ib = grid_integrals(phi_b, &pairs.b, &det_b, mass)?;
    let (n, d) = localized_moments(&ia, &ib, &a, &b, mass);
    println!("{} pair terms", pairs.a.len().pow(2) * pairs.b.len().pow(2));
    println!("numerator:   brute {num:.15e}\n             reduced {n:.15e}");
    println!("denominator: brute {den:.15e}\n             reduced {d:.15e}");
    println!(
        "C: brute {:.15}  reduced {:.15}",
        normalized_correlation(num, den)?,
        normalized_correlation(n, d)?
    );
    Ok(())
}
