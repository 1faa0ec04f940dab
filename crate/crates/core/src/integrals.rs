//! Momentum-space integral families for factorized states.
//!
//! For one detector `A` and one single-particle amplitude `φ` the localized
//! moments are
//!
//! ```text
//! I₁   = ∫ d³k′ d³k (m+k⁰)(m+k′⁰) Δ_A(k′−k) φ*(k′) φ(k) / (√(k⁰(m+k⁰)) √(k′⁰(m+k′⁰)))
//! I₂ⁱ  = ∫ d³k′ d³k kⁱ (m+k′⁰)      Δ_A(k′−k) φ*(k′) φ(k) / (…)
//! I₃ⁱʲ = ∫ d³k′ d³k kⁱ k′ʲ          Δ_A(k′−k) φ*(k′) φ(k) / (…)
//! ```
//!
//! and along a fixed ray `n` they collapse to double integrals over the
//! radial variables `t` (primed) and `u` (unprimed).
//!
//! All pair sums run row by row over the primed node in parallel; row
//! partials are added in row order so results do not depend on the thread
//! count.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amplitude::{amplitude_matrix, sigma_dot, sigma_dot_transposed, Mat2};
use crate::detector::DetectorRegion;
use crate::error::{Error, Result};
use crate::kinematics::{energy, on_shell, Direction};
use crate::quadrature::{align_z_to, domain_span, gauss_legendre, MomentumGrid};
use crate::wavepacket::{MomentumDomain, MomentumProfile, RadialAmplitude};
use crate::{Vec3, C64};

pub type CVec3 = Vector3<C64>;
pub type CMat3 = Matrix3<C64>;

/// Multiple of machine epsilon applied to absolute term sums as a roundoff floor.
const ROUNDOFF_FACTOR: f64 = 64.0 * f64::EPSILON;

/// Numerical settings shared by every quadrature path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per dimension on the first level.
    pub nodes_1d: usize,
    /// Probability mass discarded when truncating the radial support.
    pub truncation_tail: f64,
    /// Number of node doublings allowed on the fixed-direction path.
    pub max_refinements: usize,
    pub target_rel_error: f64,
    /// Largest number of pair evaluations done by tensor quadrature on the
    /// general path before switching to stratified Monte Carlo.
    pub node_cap: u64,
    pub mc_seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_1d: 48,
            truncation_tail: crate::wavepacket::DEFAULT_TAIL,
            max_refinements: 1,
            target_rel_error: 1e-8,
            node_cap: 1_000_000,
            mc_seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_1d < 8 {
            return Err(Error::Domain(format!("nodes_1d must be ≥ 8, got {}", self.nodes_1d)));
        }
        if !(self.truncation_tail > 0.0 && self.truncation_tail < 1.0) {
            return Err(Error::Domain(format!(
                "truncation_tail must lie in (0, 1), got {}",
                self.truncation_tail
            )));
        }
        if !(self.target_rel_error > 0.0) {
            return Err(Error::Domain(format!(
                "target_rel_error must be > 0, got {}",
                self.target_rel_error
            )));
        }
        if self.node_cap < 2 {
            return Err(Error::Domain("node_cap must be ≥ 2".into()));
        }
        Ok(())
    }
}

/// Minimum admissible `nodes_1d` for a support of width `span` and a
/// detector of extent `extent` along the integration direction.
pub fn required_nodes(span: f64, extent: f64) -> usize {
    8 + (span * extent / std::f64::consts::PI).ceil().max(0.0) as usize
}

fn check_oscillation(spec: &QuadratureSpec, needed: usize) -> Result<()> {
    if spec.nodes_1d < needed {
        Err(Error::Accuracy(format!(
            "nodes_1d = {} is below the oscillation bound 8 + ceil(span·L/π); \
             minimum admissible value is {needed}",
            spec.nodes_1d
        )))
    } else {
        Ok(())
    }
}

/// Smallest admissible `nodes_1d` for a fixed-direction integral.
pub fn minimum_nodes_fixed<P: RadialAmplitude>(
    profile: &P,
    dir: &Direction,
    detector: &DetectorRegion,
    truncation_tail: f64,
) -> Result<usize> {
    let (lo, hi) = profile.support(truncation_tail)?;
    if !(hi > lo) {
        return Err(Error::Domain(format!("truncated support [{lo}, {hi}] is empty")));
    }
    let reach = detector.reach_along(dir).ok_or(Error::DistributionalKernel)?;
    Ok(required_nodes(hi - lo, 2.0 * reach))
}

/// Smallest admissible `nodes_1d` for a general-path integral.
pub fn minimum_nodes_general<P: MomentumProfile>(
    profile: &P,
    detector: &DetectorRegion,
    truncation_tail: f64,
) -> Result<usize> {
    let domain = profile.domain(truncation_tail)?;
    if let MomentumDomain::Spherical { radial: (lo, hi), .. } = domain {
        if !(hi > lo) {
            return Err(Error::Domain(format!("truncated support [{lo}, {hi}] is empty")));
        }
    }
    let radius = detector.bounding_radius().ok_or(Error::DistributionalKernel)?;
    Ok(required_nodes(domain_span(&domain), 2.0 * radius))
}

/// How a set of integrals was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Fixed-direction Gauss–Legendre with the final per-axis node count.
    Ray { nodes: usize },
    /// Tensor quadrature on the general path (fine nodes per dimension).
    Tensor { nodes: usize },
    MonteCarlo { samples: u64 },
    /// User-supplied grid, no error estimate beyond roundoff.
    Grid { points: usize },
}

/// Scalar fixed-direction integrals `I₁ⁿ`, `I₂ⁿ`, `I₃ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayIntegrals {
    pub direction: Direction,
    pub i1: C64,
    pub i2: C64,
    pub i3: C64,
    /// Absolute error estimates of `i1`, `i2`, `i3`.
    pub errors: [f64; 3],
}

/// The triple `(I₁, I₂, I₃)` for one detector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumIntegrals {
    pub i1: C64,
    pub i2: CVec3,
    pub i3: CMat3,
    pub err_i1: f64,
    pub err_i2: Vector3<f64>,
    pub err_i3: Matrix3<f64>,
    pub detector: DetectorRegion,
    /// Present for the fixed-direction reduction.
    pub ray: Option<RayIntegrals>,
    pub method: Method,
    /// Set when the error target was not met.
    pub warning: Option<String>,
}

impl MomentumIntegrals {
    /// Lifts ray integrals to `I₂ = I₂ⁿ n`, `I₃ = I₃ⁿ n⊗n`.
    pub fn from_ray(ray: RayIntegrals, detector: DetectorRegion, method: Method, warning: Option<String>) -> Self {
        let n = ray.direction.into_vec();
        let nc = n.map(|x| C64::new(x, 0.0));
        let outer = n * n.transpose();
        MomentumIntegrals {
            i1: ray.i1,
            i2: nc * ray.i2,
            i3: outer.map(|x| C64::new(x, 0.0)) * ray.i3,
            err_i1: ray.errors[0],
            err_i2: n.abs() * ray.errors[1],
            err_i3: outer.abs() * ray.errors[2],
            detector,
            ray: Some(ray),
            method,
            warning,
        }
    }

    /// Multiplies every integral by `factor` (errors by `|factor|`).
    pub fn scaled(&self, factor: f64) -> Self {
        let c = C64::new(factor, 0.0);
        let mut out = self.clone();
        out.i1 *= c;
        out.i2 *= c;
        out.i3 *= c;
        out.err_i1 *= factor.abs();
        out.err_i2 *= factor.abs();
        out.err_i3 *= factor.abs();
        out.ray = self.ray.map(|r| RayIntegrals {
            i1: r.i1 * c,
            i2: r.i2 * c,
            i3: r.i3 * c,
            errors: r.errors.map(|e| e * factor.abs()),
            ..r
        });
        out
    }
}

/// Per-node quantities shared by the ray and grid paths.
#[derive(Clone, Copy)]
struct NodeFactors {
    /// `w φ (m+k⁰)/√(k⁰(m+k⁰))`
    scalar: C64,
    /// `w φ k/√(k⁰(m+k⁰))`
    vector: CVec3,
}

fn node_factors(k: &Vec3, weight: f64, phi: C64, mass: f64) -> NodeFactors {
    let e = energy(mass, k.norm());
    let norm = 1.0 / (e * (mass + e)).sqrt();
    let base = phi * (weight * norm);
    NodeFactors {
        scalar: base * (mass + e),
        vector: k.map(|x| base * x),
    }
}

/// Accumulated pair sums plus absolute sums for the roundoff floor.
#[derive(Clone, Copy)]
struct Sums {
    i1: C64,
    i2: CVec3,
    i3: CMat3,
    abs1: f64,
    abs2: f64,
    abs3: f64,
}

impl Sums {
    fn zero() -> Self {
        Sums {
            i1: C64::new(0.0, 0.0),
            i2: CVec3::zeros(),
            i3: CMat3::zeros(),
            abs1: 0.0,
            abs2: 0.0,
            abs3: 0.0,
        }
    }

    fn add(mut self, other: &Sums) -> Self {
        self.i1 += other.i1;
        self.i2 += other.i2;
        self.i3 += other.i3;
        self.abs1 += other.abs1;
        self.abs2 += other.abs2;
        self.abs3 += other.abs3;
        self
    }

    /// Adds the pair (primed node `p`, unprimed node `u`) with kernel `kernel`.
    #[inline]
    fn accumulate(&mut self, p: &NodeFactors, u: &NodeFactors, kernel: C64) {
        let ps = p.scalar.conj();
        let row_scalar = kernel * u.scalar;
        self.i1 += ps * row_scalar;
        self.abs1 += (ps * row_scalar).norm();
        let kv = u.vector * kernel;
        self.i2 += kv * ps;
        self.abs2 += kv.norm() * ps.norm();
        let pv = p.vector.map(|x| x.conj());
        // I₃ⁱʲ: unprimed index i, primed index j.
        self.i3 += kv * pv.transpose();
        self.abs3 += kv.norm() * pv.norm();
    }
}

fn pair_sums(primed: &[NodeFactors], unprimed: &[NodeFactors], points_p: &[Vec3], points_u: &[Vec3], det: &DetectorRegion) -> Sums {
    let rows: Vec<Sums> = primed
        .par_iter()
        .zip(points_p.par_iter())
        .map(|(p, kp)| {
            let mut s = Sums::zero();
            for (u, k) in unprimed.iter().zip(points_u) {
                s.accumulate(p, u, det.kernel_unchecked(&(kp - k)));
            }
            s
        })
        .collect();
    rows.iter().fold(Sums::zero(), |acc, r| acc.add(r))
}

/// Evaluates `I₁`, `I₂`, `I₃` as plain weighted sums over `grid` for both
/// the primed and unprimed momentum.
///
/// Errors carry only a roundoff floor; accuracy is the caller's concern.
pub fn grid_integrals<F>(phi: F, grid: &MomentumGrid, detector: &DetectorRegion, mass: f64) -> Result<MomentumIntegrals>
where
    F: Fn(&Vec3) -> C64 + Sync,
{
    detector.delta_kernel(&Vec3::zeros())?;
    let factors: Vec<_> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(k, &w)| node_factors(k, w, phi(k), mass))
        .collect();
    let s = pair_sums(&factors, &factors, &grid.points, &grid.points, detector);
    Ok(MomentumIntegrals {
        i1: s.i1,
        i2: s.i2,
        i3: s.i3,
        err_i1: ROUNDOFF_FACTOR * s.abs1,
        err_i2: Vector3::repeat(ROUNDOFF_FACTOR * s.abs2),
        err_i3: Matrix3::repeat(ROUNDOFF_FACTOR * s.abs3),
        detector: *detector,
        ray: None,
        method: Method::Grid { points: grid.len() },
        warning: None,
    })
}

fn ray_level<P: RadialAmplitude>(
    profile: &P,
    dir: &Direction,
    detector: &DetectorRegion,
    mass: f64,
    lo: f64,
    hi: f64,
    nodes: usize,
) -> Result<([C64; 3], [f64; 3])> {
    let n = dir.as_vec();
    let rule = gauss_legendre(nodes, lo, hi)?;
    let factors: Vec<(f64, C64, C64)> = rule
        .iter()
        .map(|&(t, w)| {
            let f = profile.amplitude(t) * w;
            (t, f * (mass + energy(mass, t)), f * t)
        })
        .collect();
    let rows: Vec<([C64; 3], [f64; 3])> = factors
        .par_iter()
        .map(|&(t, a_t, b_t)| {
            let (a_t, b_t) = (a_t.conj(), b_t.conj());
            let mut sum = [C64::new(0.0, 0.0); 3];
            let mut abs = [0.0; 3];
            for &(u, a_u, b_u) in &factors {
                let kernel = detector.kernel_unchecked(&(n * (t - u)));
                let terms = [a_t * kernel * a_u, a_t * kernel * b_u, b_t * kernel * b_u];
                for i in 0..3 {
                    sum[i] += terms[i];
                    abs[i] += terms[i].norm();
                }
            }
            (sum, abs)
        })
        .collect();
    let mut sum = [C64::new(0.0, 0.0); 3];
    let mut abs = [0.0; 3];
    for (s, a) in &rows {
        for i in 0..3 {
            sum[i] += s[i];
            abs[i] += a[i];
        }
    }
    Ok((sum, abs))
}

/// Scalar integrals `I₁ⁿ`, `I₂ⁿ`, `I₃ⁿ` along the ray `dir`:
///
/// ```text
/// I₁ⁿ = ∫₀^∞ dt du (m+√(m²+t²)) (m+√(m²+u²)) Δ((t−u)n) f*(t) f(u)
/// I₂ⁿ = ∫₀^∞ dt du u (m+√(m²+t²)) Δ((t−u)n) f*(t) f(u)
/// I₃ⁿ = ∫₀^∞ dt du t u Δ((t−u)n) f*(t) f(u)
/// ```
///
/// Evaluated by tensor Gauss–Legendre on the truncated support, doubling
/// the node count up to `max_refinements` times; the error estimate is the
/// change between the last two levels (never below the roundoff floor).
pub fn ray_integrals<P: RadialAmplitude>(
    profile: &P,
    dir: &Direction,
    detector: &DetectorRegion,
    mass: f64,
    spec: &QuadratureSpec,
) -> Result<(RayIntegrals, Method, Option<String>)> {
    spec.validate()?;
    detector.delta_kernel(&Vec3::zeros())?;
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    check_oscillation(spec, minimum_nodes_fixed(profile, dir, detector, spec.truncation_tail)?)?;
    let (lo, hi) = profile.support(spec.truncation_tail)?;

    let mut nodes = spec.nodes_1d;
    let (mut previous, _) = ray_level(profile, dir, detector, mass, lo, hi, nodes)?;
    let mut level = 0;
    loop {
        nodes *= 2;
        let (current, abs) = ray_level(profile, dir, detector, mass, lo, hi, nodes)?;
        let mut errors = [0.0; 3];
        let mut converged = true;
        for i in 0..3 {
            let floor = ROUNDOFF_FACTOR * abs[i];
            errors[i] = (current[i] - previous[i]).norm().max(floor);
            if errors[i] > (spec.target_rel_error * current[i].norm()).max(floor) {
                converged = false;
            }
        }
        level += 1;
        if converged || level >= spec.max_refinements.max(1) {
            let warning = (!converged).then(|| {
                format!(
                    "fixed-direction quadrature missed target {:e} after {} nodes (errors {:?})",
                    spec.target_rel_error, nodes, errors
                )
            });
            let ray = RayIntegrals {
                direction: *dir,
                i1: current[0],
                i2: current[1],
                i3: current[2],
                errors,
            };
            return Ok((ray, Method::Ray { nodes }, warning));
        }
        previous = current;
    }
}

/// Fixed-direction integrals lifted to the general `(I₁, I₂, I₃)` shape.
pub fn fixed_direction_integrals<P: RadialAmplitude>(
    profile: &P,
    dir: &Direction,
    detector: &DetectorRegion,
    mass: f64,
    spec: &QuadratureSpec,
) -> Result<MomentumIntegrals> {
    let (ray, method, warning) = ray_integrals(profile, dir, detector, mass, spec)?;
    Ok(MomentumIntegrals::from_ray(ray, *detector, method, warning))
}

/// General-path integrals for a three-dimensional amplitude `φ(k)`.
///
/// Tensor quadrature (Gauss–Legendre in `|k|`, `cos θ`; trapezoid in the
/// azimuth, or Gauss–Legendre cubed for cuboid domains) at `nodes_1d` and at
/// two thirds of it, the difference serving as error estimate. When the fine
/// level needs more than `node_cap` pair evaluations, stratified Monte Carlo
/// over the six-dimensional pair space is used instead.
pub fn general_integrals<P: MomentumProfile>(
    profile: &P,
    detector: &DetectorRegion,
    mass: f64,
    spec: &QuadratureSpec,
) -> Result<MomentumIntegrals> {
    spec.validate()?;
    detector.delta_kernel(&Vec3::zeros())?;
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    check_oscillation(spec, minimum_nodes_general(profile, detector, spec.truncation_tail)?)?;
    let domain = profile.domain(spec.truncation_tail)?;

    let fine_nodes = spec.nodes_1d;
    let points_per_side = match domain {
        MomentumDomain::Spherical { .. } | MomentumDomain::Cuboid { .. } => (fine_nodes as u64).pow(3),
    };
    if points_per_side.saturating_mul(points_per_side) > spec.node_cap {
        return monte_carlo_integrals(profile, &domain, detector, mass, spec);
    }

    let coarse_nodes = (2 * fine_nodes).div_ceil(3).max(4);
    let phi = |k: &Vec3| profile.amplitude(k);
    let fine = grid_integrals(phi, &MomentumGrid::tensor(&domain, fine_nodes)?, detector, mass)?;
    let coarse = grid_integrals(phi, &MomentumGrid::tensor(&domain, coarse_nodes)?, detector, mass)?;

    let err_i1 = (fine.i1 - coarse.i1).norm().max(fine.err_i1);
    let err_i2 = (fine.i2 - coarse.i2).map(|z| z.norm()).zip_map(&fine.err_i2, f64::max);
    let err_i3 = (fine.i3 - coarse.i3).map(|z| z.norm()).zip_map(&fine.err_i3, f64::max);
    let scale = spec.target_rel_error;
    let missed = err_i1 > (scale * fine.i1.norm()).max(fine.err_i1)
        || err_i2.max() > (scale * fine.i2.norm()).max(fine.err_i2.max())
        || err_i3.max() > (scale * fine.i3.norm()).max(fine.err_i3.max());
    let warning = missed.then(|| {
        format!(
            "general tensor quadrature missed target {:e} with {} nodes per dimension",
            spec.target_rel_error, fine_nodes
        )
    });
    Ok(MomentumIntegrals {
        err_i1,
        err_i2,
        err_i3,
        method: Method::Tensor { nodes: fine_nodes },
        warning,
        ..fine
    })
}

/// Maps `u ∈ [0,1]³` into the domain; returns the point and the Jacobian.
fn map_unit_cube(domain: &MomentumDomain, u: [f64; 3]) -> (Vec3, f64) {
    match *domain {
        MomentumDomain::Spherical {
            radial: (lo, hi),
            axis,
            max_polar,
        } => {
            let cmin = max_polar.cos();
            let r = lo + u[0] * (hi - lo);
            let ct = cmin + u[1] * (1.0 - cmin);
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * u[2];
            let local = Vec3::new(st * phi.cos(), st * phi.sin(), ct) * r;
            let jac = r * r * (hi - lo) * (1.0 - cmin) * 2.0 * std::f64::consts::PI;
            (align_z_to(&axis) * local, jac)
        }
        MomentumDomain::Cuboid {
            center,
            half_widths,
        } => {
            let k = Vec3::new(
                center.x + (2.0 * u[0] - 1.0) * half_widths.x,
                center.y + (2.0 * u[1] - 1.0) * half_widths.y,
                center.z + (2.0 * u[2] - 1.0) * half_widths.z,
            );
            (k, 8.0 * half_widths.product())
        }
    }
}

/// Stratified Monte Carlo over `(k′, k)` with two samples per stratum of a
/// uniform `s⁶` partition. Errors are two standard errors.
fn monte_carlo_integrals<P: MomentumProfile>(
    profile: &P,
    domain: &MomentumDomain,
    detector: &DetectorRegion,
    mass: f64,
    spec: &QuadratureSpec,
) -> Result<MomentumIntegrals> {
    const PER_STRATUM: usize = 2;
    let per_dim = (((spec.node_cap / PER_STRATUM as u64) as f64).powf(1.0 / 6.0).floor() as u64).max(1);
    let strata = per_dim.pow(6);
    let inv = 1.0 / per_dim as f64;
    let cell_weight = 1.0 / strata as f64;
    let chunk = per_dim.pow(3);

    // 13 complex components: I₁, I₂ (3), I₃ (9).
    type Acc = ([C64; 13], [f64; 13]);
    let chunks: Vec<Acc> = (0..strata / chunk)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.mc_seed);
            rng.set_stream(c);
            let mut mean = [C64::new(0.0, 0.0); 13];
            let mut var = [0.0; 13];
            for h in c * chunk..(c + 1) * chunk {
                let mut idx = [0u64; 6];
                let mut rest = h;
                for slot in idx.iter_mut() {
                    *slot = rest % per_dim;
                    rest /= per_dim;
                }
                let mut samples = [[C64::new(0.0, 0.0); 13]; PER_STRATUM];
                for sample in samples.iter_mut() {
                    let mut u = [0.0; 6];
                    for d in 0..6 {
                        u[d] = (idx[d] as f64 + rng.gen::<f64>()) * inv;
                    }
                    let (kp, jp) = map_unit_cube(domain, [u[0], u[1], u[2]]);
                    let (k, j) = map_unit_cube(domain, [u[3], u[4], u[5]]);
                    let p = node_factors(&kp, jp, profile.amplitude(&kp), mass);
                    let q = node_factors(&k, j, profile.amplitude(&k), mass);
                    let mut s = Sums::zero();
                    s.accumulate(&p, &q, detector.kernel_unchecked(&(kp - k)));
                    sample[0] = s.i1;
                    for i in 0..3 {
                        sample[1 + i] = s.i2[i];
                        for jj in 0..3 {
                            sample[4 + 3 * i + jj] = s.i3[(i, jj)];
                        }
                    }
                }
                for comp in 0..13 {
                    let m = (samples[0][comp] + samples[1][comp]) * 0.5;
                    let v = (samples[0][comp] - m).norm_sqr() + (samples[1][comp] - m).norm_sqr();
                    mean[comp] += m * cell_weight;
                    // sample variance (n−1 = 1) of the stratum mean of 2 draws
                    var[comp] += cell_weight * cell_weight * v / PER_STRATUM as f64;
                }
            }
            (mean, var)
        })
        .collect();

    let mut mean = [C64::new(0.0, 0.0); 13];
    let mut var = [0.0; 13];
    for (m, v) in &chunks {
        for i in 0..13 {
            mean[i] += m[i];
            var[i] += v[i];
        }
    }
    let err: Vec<f64> = var.iter().map(|v| 2.0 * v.sqrt()).collect();
    let i2 = CVec3::from_fn(|i, _| mean[1 + i]);
    let i3 = CMat3::from_fn(|i, j| mean[4 + 3 * i + j]);
    let err_i2 = Vector3::from_fn(|i, _| err[1 + i]);
    let err_i3 = Matrix3::from_fn(|i, j| err[4 + 3 * i + j]);
    let target = spec.target_rel_error;
    let missed = err[0] > target * mean[0].norm()
        || err_i2.max() > target * i2.norm().max(mean[0].norm() * f64::EPSILON)
        || err_i3.max() > target * i3.norm();
    let samples = strata * PER_STRATUM as u64;
    let warning = missed.then(|| {
        format!(
            "Monte Carlo standard error above target {:e} with {} samples",
            target, samples
        )
    });
    Ok(MomentumIntegrals {
        i1: mean[0],
        i2,
        i3,
        err_i1: err[0],
        err_i2,
        err_i3,
        detector: *detector,
        ray: None,
        method: Method::MonteCarlo { samples },
        warning,
    })
}

/// Two momentum grids, one per particle.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGrid {
    pub a: MomentumGrid,
    pub b: MomentumGrid,
}

/// Direct discretization of the localized numerator and denominator over a
/// (possibly non-factorizing) two-particle amplitude `phi(k, p)`:
///
/// ```text
/// num = ¼ Σ w Δ_A(k′−k) Δ_B(p′−p) φ*(k′,p′) φ(k,p) Tr{(a·σ) M(k,p) (b·σᵀ) M†(k′,p′)} / √(2k′⁰ 2k⁰ 2p′⁰ 2p⁰)
/// den =   Σ w Δ_A(k′−k) Δ_B(p′−p) φ*(k′,p′) φ(k,p) Tr{M(k,p) M†(k′,p′)} / √(…)
/// ```
///
/// The traces are formed by explicit 2×2 matrix products, independently of
/// the closed forms. Cost is `|A|²·|B|²` terms; this is an oracle.
pub fn brute_force_pair_moments<F>(
    phi: F,
    det_a: &DetectorRegion,
    det_b: &DetectorRegion,
    a: &Vec3,
    b: &Vec3,
    mass: f64,
    grid: &PairGrid,
) -> Result<(C64, C64)>
where
    F: Fn(&Vec3, &Vec3) -> C64 + Sync,
{
    crate::amplitude::require_unit_pair(a, b)?;
    let (na, nb) = (grid.a.len(), grid.b.len());
    let kernel_a = pair_kernel(&grid.a, det_a)?;
    let kernel_b = pair_kernel(&grid.b, det_b)?;

    let sa = sigma_dot(a);
    let sbt = sigma_dot_transposed(b);
    // Per (k, p): spin-dressed and plain amplitudes with all real weights and φ folded in.
    let mut dressed = Vec::with_capacity(na * nb);
    let mut plain = Vec::with_capacity(na * nb);
    for (k, wk) in grid.a.points.iter().zip(&grid.a.weights) {
        let kk = on_shell(mass, *k)?;
        for (p, wp) in grid.b.points.iter().zip(&grid.b.weights) {
            let pp = on_shell(mass, *p)?;
            let m = amplitude_matrix(&kk, &pp, mass)?.mat;
            let scale = phi(k, p) * (wk * wp / (4.0 * kk.e * pp.e).sqrt());
            dressed.push(sa * m * sbt * scale);
            plain.push(m * scale);
        }
    }

    let tr = |x: &Mat2, y: &Mat2| -> C64 { x.iter().zip(y.iter()).map(|(u, v)| u * v.conj()).sum() };
    let rows: Vec<(C64, C64)> = (0..na)
        .into_par_iter()
        .map(|kp| {
            let mut num = C64::new(0.0, 0.0);
            let mut den = C64::new(0.0, 0.0);
            for pp in 0..nb {
                let primed = &plain[kp * nb + pp];
                for k in 0..na {
                    let da = kernel_a[kp * na + k];
                    for p in 0..nb {
                        let w = da * kernel_b[pp * nb + p];
                        num += tr(&dressed[k * nb + p], primed) * w;
                        den += tr(&plain[k * nb + p], primed) * w;
                    }
                }
            }
            (num, den)
        })
        .collect();
    let (num, den) = rows
        .iter()
        .fold((C64::new(0.0, 0.0), C64::new(0.0, 0.0)), |(n, d), (x, y)| (n + x, d + y));
    Ok((num * 0.25, den))
}

/// `Δ(k′_j − k_l)` for every ordered node pair, row-major in the primed index.
fn pair_kernel(grid: &MomentumGrid, det: &DetectorRegion) -> Result<Vec<C64>> {
    det.delta_kernel(&Vec3::zeros())?;
    Ok(grid
        .points
        .iter()
        .flat_map(|kp| grid.points.iter().map(move |k| det.kernel_unchecked(&(kp - k))))
        .collect())
}
