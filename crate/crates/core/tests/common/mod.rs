#![allow(dead_code)]

use localized_epr::{on_shell, Complex, DetectorRegion, Direction, FourMomentum, Vec3, C64};
use nalgebra::Rotation3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn direction(rng: &mut impl Rng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Direction::spherical(z.acos(), phi)
}

pub fn rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    let axis = direction(rng).into_vec();
    Rotation3::new(axis * rng.gen_range(0.0..std::f64::consts::PI))
}

/// On-shell momentum with `|p| ∈ [0, max]` in a random direction.
pub fn momentum(rng: &mut impl Rng, mass: f64, max: f64) -> FourMomentum {
    let k = rng.gen_range(0.0..=max);
    on_shell(mass, direction(rng).into_vec() * k).unwrap()
}

pub fn vec3(rng: &mut impl Rng, half: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
        rng.gen_range(-half..half),
    )
}

/// A box or ball of size `0.5..size` centred within `offset` of `around`.
pub fn detector(rng: &mut impl Rng, around: Vec3, offset: f64, size: f64) -> DetectorRegion {
    let center = around + vec3(rng, offset);
    if rng.gen_bool(0.5) {
        let sides = Vec3::new(
            rng.gen_range(0.5..size),
            rng.gen_range(0.5..size),
            rng.gen_range(0.5..size),
        );
        DetectorRegion::cuboid(center, sides).unwrap().rotated_in_place(&rotation(rng))
    } else {
        DetectorRegion::ball(center, rng.gen_range(0.25..size / 2.0)).unwrap()
    }
}

pub trait InPlace {
    fn rotated_in_place(&self, r: &Rotation3<f64>) -> DetectorRegion;
}

impl InPlace for DetectorRegion {
    /// Turns the region about its own centre.
    fn rotated_in_place(&self, r: &Rotation3<f64>) -> DetectorRegion {
        match *self {
            DetectorRegion::Box {
                center,
                sides,
                orientation,
            } => DetectorRegion::Box {
                center,
                sides,
                orientation: r * orientation,
            },
            other => other,
        }
    }
}

/// A smooth random complex amplitude: a Gaussian bump with a plane-wave phase.
pub fn amplitude(rng: &mut impl Rng, center: Vec3) -> impl Fn(&Vec3) -> C64 + Sync + Copy {
    let width = rng.gen_range(0.2..0.8);
    let shift = vec3(rng, 3.0);
    let c = Complex::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.0));
    move |k: &Vec3| c * Complex::new(-(k - center).norm_squared() / (4.0 * width * width), k.dot(&shift)).exp()
}

/// Reference value of the region kernel by 64³ Gauss–Legendre integration
/// of `e^{−iq·x}` over the region.
pub fn kernel_by_region_integration(det: &DetectorRegion, q: &Vec3) -> C64 {
    let gl = localized_epr::quadrature::gauss_legendre(64, -1.0, 1.0).unwrap();
    let norm = (2.0 * std::f64::consts::PI).powi(3);
    let phase = |x: Vec3| Complex::new(0.0, -q.dot(&x)).exp();
    match *det {
        DetectorRegion::Box {
            center,
            sides,
            orientation,
        } => {
            let h = sides / 2.0;
            let mut sum = C64::new(0.0, 0.0);
            for &(x, wx) in &gl {
                for &(y, wy) in &gl {
                    for &(z, wz) in &gl {
                        let local = Vec3::new(x * h.x, y * h.y, z * h.z);
                        sum += phase(center + orientation * local) * (wx * wy * wz);
                    }
                }
            }
            sum * h.product() / norm
        }
        DetectorRegion::Ball { center, radius } => {
            let mut sum = C64::new(0.0, 0.0);
            for &(r, wr) in &gl {
                let r = radius * (r + 1.0) / 2.0;
                for &(ct, wt) in &gl {
                    let st = (1.0 - ct * ct).sqrt();
                    for &(ph, wp) in &gl {
                        let ph = std::f64::consts::PI * (ph + 1.0);
                        let x = Vec3::new(st * ph.cos(), st * ph.sin(), ct) * r;
                        sum += phase(center + x) * (wr * wt * wp * r * r);
                    }
                }
            }
            sum * (radius / 2.0) * std::f64::consts::PI / norm
        }
        DetectorRegion::AllSpace => unreachable!(),
    }
}

/// `∫_{−Q}^{Q} g(q−s) g(s) ds` for `g(s) = sin(sL/2)/(πs)`, the one-dimensional
/// factor of a centred box kernel, by Gauss–Legendre panels a quarter period wide.
pub fn sinc_self_convolution(q: f64, side: f64, truncation: f64) -> f64 {
    let g = |s: f64| {
        let x = s * side / 2.0;
        if x.abs() < 1e-8 {
            side / (2.0 * std::f64::consts::PI)
        } else {
            x.sin() / (std::f64::consts::PI * s)
        }
    };
    let gl = localized_epr::quadrature::gauss_legendre(16, -1.0, 1.0).unwrap();
    let width = std::f64::consts::PI / side;
    let panels = (2.0 * truncation / width).ceil() as usize;
    let h = 2.0 * truncation / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = -truncation + (i as f64 + 0.5) * h;
        let mut panel = 0.0;
        for &(x, w) in &gl {
            let s = mid + x * h / 2.0;
            panel += w * g(q - s) * g(s);
        }
        total += panel * h / 2.0;
    }
    total
}
