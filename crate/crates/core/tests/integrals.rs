mod common;

use localized_epr::correlator::{correlation_from_integrals, correlation_from_rays, localized_moments, normalized_correlation};
use localized_epr::integrals::{grid_integrals, minimum_nodes_fixed, ray_integrals, MomentumIntegrals};
use localized_epr::kinematics::energy;
use localized_epr::quadrature::{gauss_legendre, MomentumGrid};
use localized_epr::wavepacket::{MomentumDomain, MomentumProfile, RadialAmplitude};
use localized_epr::{
    correlation_general, correlation_sharp, fixed_direction_integrals, general_integrals, on_shell, Complex,
    DetectorRegion, Direction, Error, GaussianPacket, Isotropic, PacketState, QuadratureSpec, RadialProfile, Regime,
    Vec3, C64,
};

fn spec_with(nodes: usize) -> QuadratureSpec {
    QuadratureSpec {
        nodes_1d: nodes,
        ..QuadratureSpec::default()
    }
}

/// The ray integrands written out directly, for midpoint Riemann sums.
fn ray_riemann(profile: &RadialProfile, n: &Vec3, det: &DetectorRegion, mass: f64, cells: usize) -> [C64; 3] {
    let (lo, hi) = profile.support_bounds(1e-10).unwrap();
    let h = (hi - lo) / cells as f64;
    let nodes: Vec<(f64, f64)> = (0..cells)
        .map(|i| {
            let t = lo + (i as f64 + 0.5) * h;
            (t, profile.eval(t).unwrap())
        })
        .collect();
    let mut out = [C64::new(0.0, 0.0); 3];
    for &(t, ft) in &nodes {
        let et = mass + energy(mass, t);
        for &(u, fu) in &nodes {
            let eu = mass + energy(mass, u);
            let k = det.delta_kernel(&(n * (t - u))).unwrap() * (ft * fu * h * h);
            out[0] += k * (et * eu);
            out[1] += k * (u * et);
            out[2] += k * (t * u);
        }
    }
    out
}

#[test]
fn narrow_gaussian_matches_riemann_oracle() {
    let profile = RadialProfile::gaussian(1.0, 0.01).unwrap();
    let dir = Direction::x();
    let det = DetectorRegion::cube(Vec3::new(1.0, 0.5, -0.3), 5.0).unwrap();
    let (ray, _, warning) = ray_integrals(&profile, &dir, &det, 1.0, &spec_with(48)).unwrap();
    assert!(warning.is_none());
    let oracle = ray_riemann(&profile, dir.as_vec(), &det, 1.0, 2048);
    for (got, want) in [ray.i1, ray.i2, ray.i3].iter().zip(&oracle) {
        assert!((got - want).norm() <= 1e-6 * want.norm(), "{got} vs {want}");
    }
    // I₁ and I₃ are Hermitian forms of a positive kernel: real and positive
    for v in [ray.i1, ray.i3] {
        assert!(v.re > 0.0 && v.im.abs() <= 1e-12 * v.re, "{v}");
    }
}

#[test]
fn large_box_collapses_to_one_dimensional_integrals() {
    // For a box of side L along the ray, Δ((t−u)x) = (L/2π)² sin((t−u)L/2)/(π(t−u)),
    // which tends to (L/2π)² δ(t−u); the ratio I₃/I₁ becomes a single integral.
    let mass = 1.0;
    let profile = RadialProfile::gaussian(0.5, 0.1).unwrap();
    let det = DetectorRegion::cube(Vec3::zeros(), 200.0).unwrap();
    let dir = Direction::x();
    let nodes = minimum_nodes_fixed(&profile, &dir, &det, 1e-10).unwrap();
    let (ray, _, _) = ray_integrals(&profile, &dir, &det, mass, &spec_with(nodes)).unwrap();

    let (lo, hi) = profile.support_bounds(1e-10).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (t, w) in gauss_legendre(200, lo, hi).unwrap() {
        let f2 = profile.eval(t).unwrap().powi(2);
        num += w * f2 * t * t;
        den += w * f2 * (mass + energy(mass, t)).powi(2);
    }
    let ratio = ray.i3.re / ray.i1.re;
    assert!((ratio - num / den).abs() <= 1e-6 * (num / den), "{ratio} vs {}", num / den);
}

#[test]
fn empty_support_is_a_domain_error() {
    assert!(matches!(RadialProfile::rectangular(1.0, 1.0), Err(Error::Domain(_))));
    let degenerate = RadialProfile::Rectangular { kmin: 1.0, kmax: 1.0 };
    let det = DetectorRegion::cube(Vec3::zeros(), 1.0).unwrap();
    let r = fixed_direction_integrals(&degenerate, &Direction::z(), &det, 1.0, &QuadratureSpec::default());
    assert!(matches!(r, Err(Error::Domain(_))), "{r:?}");
}

#[test]
fn undersampled_kernel_is_an_accuracy_error() {
    let profile = RadialProfile::gaussian(2.0, 0.5).unwrap();
    let det = DetectorRegion::cube(Vec3::zeros(), 20.0).unwrap();
    let needed = minimum_nodes_fixed(&profile, &Direction::x(), &det, 1e-10).unwrap();
    let r = fixed_direction_integrals(&profile, &Direction::x(), &det, 1.0, &spec_with(needed - 1));
    match r {
        Err(Error::Accuracy(msg)) => assert!(msg.contains(&format!("minimum admissible value is {needed}")), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(fixed_direction_integrals(&profile, &Direction::x(), &det, 1.0, &spec_with(needed)).is_ok());
    assert!(matches!(
        fixed_direction_integrals(&profile, &Direction::x(), &DetectorRegion::AllSpace, 1.0, &spec_with(needed)),
        Err(Error::DistributionalKernel)
    ));
}

#[test]
fn error_estimates_bound_the_distance_to_a_refined_result() {
    let mut rng = common::rng(21);
    for _ in 0..20 {
        let profile = RadialProfile::gaussian(1.5, 0.3).unwrap();
        let dir = common::direction(&mut rng);
        let det = common::detector(&mut rng, dir.into_vec() * 2.0, 1.0, 3.0);
        let nodes = minimum_nodes_fixed(&profile, &dir, &det, 1e-10).unwrap();
        let spec = QuadratureSpec {
            target_rel_error: 1e-30,
            ..spec_with(nodes)
        };
        let (coarse, _, warning) = ray_integrals(&profile, &dir, &det, 1.0, &spec).unwrap();
        assert!(warning.is_some());
        let (fine, _, _) = ray_integrals(&profile, &dir, &det, 1.0, &spec_with(8 * nodes)).unwrap();
        for (i, (c, f)) in [(coarse.i1, fine.i1), (coarse.i2, fine.i2), (coarse.i3, fine.i3)].iter().enumerate() {
            assert!((c - f).norm() <= coarse.errors[i].max(1e-14 * f.norm()), "{i}: {c} vs {f} ± {}", coarse.errors[i]);
        }
    }
}

struct Scaled<P>(P, f64);

impl<P: RadialAmplitude> RadialAmplitude for Scaled<P> {
    fn amplitude(&self, t: f64) -> C64 {
        self.0.amplitude(t) * self.1
    }

    fn support(&self, tail: f64) -> localized_epr::Result<(f64, f64)> {
        self.0.support(tail)
    }
}

impl<P: MomentumProfile> MomentumProfile for Scaled<P> {
    fn amplitude(&self, k: &Vec3) -> C64 {
        self.0.amplitude(k) * self.1
    }

    fn domain(&self, tail: f64) -> localized_epr::Result<MomentumDomain> {
        self.0.domain(tail)
    }
}

#[test]
fn amplitude_scale_cancels() {
    let profile = RadialProfile::rectangular(0.5, 1.5).unwrap();
    let (na, nb) = (Direction::x(), Direction::new(Vec3::new(0.2, 1.0, 0.3)).unwrap());
    let det_a = DetectorRegion::ball(Vec3::new(2.0, 0.0, 0.0), 1.0).unwrap();
    let det_b = DetectorRegion::cube(Vec3::new(0.0, 2.0, 0.5), 1.5).unwrap();
    let (a, b) = (Direction::spherical(0.4, 0.1), Direction::spherical(2.0, 1.0));
    let spec = spec_with(48);
    let c = |s: f64| {
        let scaled = Scaled(profile, s);
        let ia = fixed_direction_integrals(&scaled, &na, &det_a, 1.0, &spec).unwrap();
        let ib = fixed_direction_integrals(&scaled, &nb, &det_b, 1.0, &spec).unwrap();
        (ia.i1, correlation_from_rays(&ia, &ib, &a, &b).unwrap().value)
    };
    let ((i1, c1), (i7, c7)) = (c(1.0), c(7.0));
    assert!((i7 - i1 * 49.0).norm() <= 1e-12 * i7.norm());
    assert!((c1 - c7).abs() < 1e-12);

    let iso = Isotropic(RadialProfile::gaussian(1.0, 0.3).unwrap());
    let ball = DetectorRegion::ball(Vec3::new(0.1, 0.0, 0.0), 0.3).unwrap();
    let spec = QuadratureSpec {
        node_cap: u64::MAX,
        ..spec_with(14)
    };
    let ia = general_integrals(&iso, &ball, 1.0, &spec).unwrap();
    let ia7 = general_integrals(&Scaled(iso, 7.0), &ball, 1.0, &spec).unwrap();
    let g1 = correlation_from_integrals(&ia, &ia, &a, &b, 1.0, Regime::GeneralFactorized).unwrap().value;
    let g7 = correlation_from_integrals(&ia7, &ia7, &a, &b, 1.0, Regime::GeneralFactorized).unwrap().value;
    assert!((g1 - g7).abs() < 1e-12);
}

fn assert_isotropic(ints: &MomentumIntegrals, slack: f64) {
    assert!(ints.i2.norm() <= slack * (ints.err_i2.norm() + 1e-15 * ints.i1.norm()), "{}", ints.i2);
    let mean = (ints.i3[(0, 0)] + ints.i3[(1, 1)] + ints.i3[(2, 2)]) / 3.0;
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { mean } else { C64::new(0.0, 0.0) };
            let err = ints.err_i3[(i, j)] + 1e-14 * mean.norm();
            assert!((ints.i3[(i, j)] - expected).norm() <= slack * err, "i3[{i},{j}] = {}", ints.i3[(i, j)]);
        }
    }
}

#[test]
fn isotropic_profile_in_centred_ball() {
    let iso = Isotropic(RadialProfile::gaussian(1.0, 0.2).unwrap());
    let ball = DetectorRegion::ball(Vec3::zeros(), 0.3).unwrap();
    let spec = QuadratureSpec {
        node_cap: u64::MAX,
        ..spec_with(12)
    };
    let ints = general_integrals(&iso, &ball, 1.0, &spec).unwrap();
    assert_isotropic(&ints, 10.0);
    // Hermitian i3 for a real profile and an inversion-symmetric detector
    assert!((ints.i3 - ints.i3.adjoint()).norm() <= 10.0 * ints.err_i3.norm() + 1e-15 * ints.i3.norm());

    let state = PacketState {
        side_a: iso,
        side_b: iso,
        mass: 1.0,
    };
    let mut rng = common::rng(22);
    for _ in 0..5 {
        let (a, b) = (common::direction(&mut rng), common::direction(&mut rng));
        let c = correlation_general(&state, &ball, &ball, &a, &b, &spec).unwrap();
        let ab = a.dot(&b);
        if ab.abs() > 0.05 {
            let s = -c.value / ab;
            assert!(s > 0.0 && s <= 1.0 + c.abs_error / ab.abs(), "scale {s}");
        }
    }
}

#[test]
fn monte_carlo_agrees_with_tensor_quadrature() {
    let iso = Isotropic(RadialProfile::gaussian(1.0, 0.2).unwrap());
    let det = DetectorRegion::cube(Vec3::new(0.1, -0.2, 0.0), 0.5).unwrap();
    let tensor = general_integrals(
        &iso,
        &det,
        1.0,
        &QuadratureSpec {
            node_cap: u64::MAX,
            ..spec_with(16)
        },
    )
    .unwrap();
    let mc = general_integrals(
        &iso,
        &det,
        1.0,
        &QuadratureSpec {
            node_cap: 200_000,
            mc_seed: 5,
            ..spec_with(16)
        },
    )
    .unwrap();
    assert!(matches!(mc.method, localized_epr::integrals::Method::MonteCarlo { .. }));
    assert!((tensor.i1 - mc.i1).norm() <= 2.0 * (tensor.err_i1 + mc.err_i1));
    for i in 0..3 {
        for j in 0..3 {
            let (t, m) = (tensor.i3[(i, j)], mc.i3[(i, j)]);
            assert!((t - m).norm() <= 2.0 * (tensor.err_i3[(i, j)] + mc.err_i3[(i, j)]), "{t} vs {m}");
        }
    }
    // same seed, same numbers
    let again = general_integrals(
        &iso,
        &det,
        1.0,
        &QuadratureSpec {
            node_cap: 200_000,
            mc_seed: 5,
            ..spec_with(16)
        },
    )
    .unwrap();
    assert_eq!(mc, again);
}

/// `φ(k) ∝ f(|k|)·√(k⁰(m+k⁰))/|k|²` inside a cone of half-angle `width`
/// about `axis`; as the cone closes this becomes the fixed-direction state.
struct Cone {
    radial: RadialProfile,
    axis: Direction,
    width: f64,
    mass: f64,
}

impl MomentumProfile for Cone {
    fn amplitude(&self, k: &Vec3) -> C64 {
        let t = k.norm();
        if t == 0.0 || k.dot(self.axis.as_vec()) < t * self.width.cos() {
            return C64::new(0.0, 0.0);
        }
        let e = energy(self.mass, t);
        self.radial.amplitude(t) * ((e * (self.mass + e)).sqrt() / (t * t))
    }

    fn domain(&self, tail: f64) -> localized_epr::Result<MomentumDomain> {
        Ok(MomentumDomain::Spherical {
            radial: self.radial.support_bounds(tail)?,
            axis: self.axis,
            max_polar: self.width,
        })
    }
}

#[test]
fn narrowing_cone_converges_to_fixed_direction() {
    let mass = 1.0;
    let radial = RadialProfile::gaussian(1.0, 0.15).unwrap();
    let (na, nb) = (Direction::new(Vec3::new(1.0, 0.2, 0.0)).unwrap(), Direction::new(Vec3::new(-0.3, 1.0, 0.4)).unwrap());
    let det_a = DetectorRegion::ball(na.into_vec() * 1.5, 0.8).unwrap();
    let det_b = DetectorRegion::cube(nb.into_vec() * 1.5, 1.2).unwrap();
    let (a, b) = (Direction::new(Vec3::new(1.0, 0.0, 1.0)).unwrap(), Direction::new(Vec3::new(0.0, 1.0, 1.0)).unwrap());
    let spec = spec_with(48);
    let fixed = correlation_from_rays(
        &fixed_direction_integrals(&radial, &na, &det_a, mass, &spec).unwrap(),
        &fixed_direction_integrals(&radial, &nb, &det_b, mass, &spec).unwrap(),
        &a,
        &b,
    )
    .unwrap()
    .value;

    let mut gaps = Vec::new();
    for width in [0.2, 0.1, 0.05] {
        let cone = |axis| Cone {
            radial,
            axis,
            width,
            mass,
        };
        let spec = QuadratureSpec {
            node_cap: u64::MAX,
            target_rel_error: 1e-4,
            ..spec_with(14)
        };
        let c = correlation_general(
            &PacketState {
                side_a: cone(na),
                side_b: cone(nb),
                mass,
            },
            &det_a,
            &det_b,
            &a,
            &b,
            &spec,
        )
        .unwrap();
        gaps.push((c.value - fixed).abs());
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-3, "{gaps:?}");
}

#[test]
fn single_point_grids_give_the_sharp_value() {
    let mut rng = common::rng(23);
    for _ in 0..50 {
        let mass = 1.0;
        let (k, p) = (common::vec3(&mut rng, 3.0), common::vec3(&mut rng, 3.0));
        let det_a = common::detector(&mut rng, Vec3::zeros(), 2.0, 2.0);
        let det_b = common::detector(&mut rng, Vec3::zeros(), 2.0, 2.0);
        let (a, b) = (common::direction(&mut rng), common::direction(&mut rng));
        let phase = Complex::from_polar(1.3, 0.4);
        let ia = grid_integrals(|_| phase, &MomentumGrid::single(k), &det_a, mass).unwrap();
        let ib = grid_integrals(|_| phase.conj(), &MomentumGrid::single(p), &det_b, mass).unwrap();
        let (n, d) = localized_moments(&ia, &ib, &a, &b, mass);
        let c = normalized_correlation(n, d).unwrap();
        let sharp = correlation_sharp(&on_shell(mass, k).unwrap(), &on_shell(mass, p).unwrap(), &a, &b, mass).unwrap();
        assert!((c - sharp.value).abs() < 1e-12, "{c} vs {}", sharp.value);
    }
}

#[test]
fn narrow_packets_approach_the_sharp_value() {
    let mass = 1.0;
    let (ka, kb) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
    let state = PacketState {
        side_a: GaussianPacket::new(ka, 0.01).unwrap(),
        side_b: GaussianPacket::new(kb, 0.01).unwrap(),
        mass,
    };
    let det = DetectorRegion::cube(Vec3::zeros(), 2.0).unwrap();
    let (a, b) = (Direction::new(Vec3::new(1.0, 0.0, 1.0)).unwrap(), Direction::new(Vec3::new(0.0, 1.0, 1.0)).unwrap());
    let spec = QuadratureSpec {
        node_cap: u64::MAX,
        ..spec_with(10)
    };
    let c = correlation_general(&state, &det, &det, &a, &b, &spec).unwrap();
    let sharp = correlation_sharp(&on_shell(mass, ka).unwrap(), &on_shell(mass, kb).unwrap(), &a, &b, mass).unwrap();
    assert!(((c.value - sharp.value) / sharp.value).abs() < 0.01, "{} vs {}", c.value, sharp.value);
}
