//! Factorized momentum-space wave functions `φ(k, p) = φ(k) φ(p)`.
//!
//! Two families are provided: radial profiles `f(|k|)` for states whose
//! momenta are pinned to fixed directions, and full three-dimensional
//! profiles for the general factorized case.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::kinematics::Direction;
use crate::{Vec3, C64};

/// Default probability mass discarded when truncating `[0, ∞)`.
pub const DEFAULT_TAIL: f64 = 1e-10;

/// Radial profile `f(t)`, `t = |k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `exp(−(t−k0)²/(4σ²))`, so `f²` has standard deviation `sigma`.
    Gaussian { k0: f64, sigma: f64 },
    /// Indicator of `[kmin, kmax]`.
    Rectangular { kmin: f64, kmax: f64 },
}

impl RadialProfile {
    pub fn gaussian(k0: f64, sigma: f64) -> Result<Self> {
        let p = RadialProfile::Gaussian { k0, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn rectangular(kmin: f64, kmax: f64) -> Result<Self> {
        let p = RadialProfile::Rectangular { kmin, kmax };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialProfile::Gaussian { k0, sigma } => {
                if !(k0 >= 0.0 && k0.is_finite()) {
                    return Err(Error::Domain(format!("gaussian k0 must be ≥ 0, got {k0}")));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::Domain(format!("gaussian sigma must be > 0, got {sigma}")));
                }
            }
            RadialProfile::Rectangular { kmin, kmax } => {
                if !(kmin >= 0.0 && kmax.is_finite()) {
                    return Err(Error::Domain(format!(
                        "rectangular profile needs 0 ≤ kmin, finite kmax; got [{kmin}, {kmax}]"
                    )));
                }
                if !(kmax > kmin) {
                    return Err(Error::Domain(format!(
                        "rectangular profile [{kmin}, {kmax}] has empty support"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `f(t)`; negative `t` is a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("profile argument must be ≥ 0, got {t}")));
        }
        Ok(self.value(t))
    }

    #[inline]
    fn value(&self, t: f64) -> f64 {
        match *self {
            RadialProfile::Gaussian { k0, sigma } => {
                let d = t - k0;
                (-d * d / (4.0 * sigma * sigma)).exp()
            }
            RadialProfile::Rectangular { kmin, kmax } => {
                if (kmin..=kmax).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval holding at least `1 − mass_tail` of `∫₀^∞ f²`.
    ///
    /// The Gaussian window is `k0 ± zσ√2` with `z` the two-sided normal
    /// quantile of `mass_tail`, clipped at zero.
    pub fn support_bounds(&self, mass_tail: f64) -> Result<(f64, f64)> {
        check_tail(mass_tail)?;
        match *self {
            RadialProfile::Gaussian { k0, sigma } => {
                let half = two_sided_quantile(mass_tail) * sigma * std::f64::consts::SQRT_2;
                Ok(((k0 - half).max(0.0), k0 + half))
            }
            RadialProfile::Rectangular { kmin, kmax } => Ok((kmin, kmax)),
        }
    }

    /// The same profile recentred at `center` (peak for a Gaussian, midpoint
    /// for a rectangle, width kept).
    pub fn recentered(&self, center: f64) -> Self {
        match *self {
            RadialProfile::Gaussian { sigma, .. } => RadialProfile::Gaussian { k0: center, sigma },
            RadialProfile::Rectangular { kmin, kmax } => {
                let half = 0.5 * (kmax - kmin);
                RadialProfile::Rectangular {
                    kmin: center - half,
                    kmax: center + half,
                }
            }
        }
    }

    /// Characteristic momentum: `k0`, or the midpoint of the rectangle.
    pub fn center(&self) -> f64 {
        match *self {
            RadialProfile::Gaussian { k0, .. } => k0,
            RadialProfile::Rectangular { kmin, kmax } => 0.5 * (kmin + kmax),
        }
    }
}

fn check_tail(mass_tail: f64) -> Result<()> {
    if mass_tail > 0.0 && mass_tail < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("truncation tail must lie in (0, 1), got {mass_tail}")))
    }
}

/// `z` with `P(|Z| > z) = tail` for a standard normal `Z`.
fn two_sided_quantile(tail: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - 0.5 * tail)
}

/// A radial amplitude usable by the fixed-direction quadrature.
pub trait RadialAmplitude: Sync {
    fn amplitude(&self, t: f64) -> C64;
    /// Truncated support; an empty interval is a domain error.
    fn support(&self, mass_tail: f64) -> Result<(f64, f64)>;
}

impl RadialAmplitude for RadialProfile {
    fn amplitude(&self, t: f64) -> C64 {
        C64::new(self.value(t), 0.0)
    }

    fn support(&self, mass_tail: f64) -> Result<(f64, f64)> {
        self.validate()?;
        self.support_bounds(mass_tail)
    }
}

/// Two particles with momenta pinned to `dir_a` and `dir_b` and radial
/// profiles on each ray.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedState<P = RadialProfile> {
    pub profile_a: P,
    pub profile_b: P,
    pub dir_a: Direction,
    pub dir_b: Direction,
    pub mass: f64,
}

/// Integration domain of a three-dimensional momentum profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumDomain {
    /// `t ∈ radial`, polar angle from `axis` up to `max_polar`.
    Spherical {
        radial: (f64, f64),
        axis: Direction,
        max_polar: f64,
    },
    Cuboid { center: Vec3, half_widths: Vec3 },
}

/// A single-particle momentum amplitude `φ(k)` on all of momentum space.
pub trait MomentumProfile: Sync {
    fn amplitude(&self, k: &Vec3) -> C64;
    fn domain(&self, mass_tail: f64) -> Result<MomentumDomain>;
}

/// `φ(k) = f(|k|)` over the full solid angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isotropic<P = RadialProfile>(pub P);

impl<P: RadialAmplitude> MomentumProfile for Isotropic<P> {
    fn amplitude(&self, k: &Vec3) -> C64 {
        self.0.amplitude(k.norm())
    }

    fn domain(&self, mass_tail: f64) -> Result<MomentumDomain> {
        let (lo, hi) = self.0.support(mass_tail)?;
        if !(hi > lo) {
            return Err(Error::Domain(format!("radial support [{lo}, {hi}] is empty")));
        }
        Ok(MomentumDomain::Spherical {
            radial: (lo, hi),
            axis: Direction::z(),
            max_polar: std::f64::consts::PI,
        })
    }
}

/// Gaussian wave packet `exp(−|k−center|²/(4σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: Vec3,
    pub sigma: f64,
}

impl GaussianPacket {
    pub fn new(center: Vec3, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("packet sigma must be > 0, got {sigma}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("packet centre must be finite".into()));
        }
        Ok(GaussianPacket { center, sigma })
    }
}

impl MomentumProfile for GaussianPacket {
    fn amplitude(&self, k: &Vec3) -> C64 {
        C64::new((-(k - self.center).norm_squared() / (4.0 * self.sigma * self.sigma)).exp(), 0.0)
    }

    fn domain(&self, mass_tail: f64) -> Result<MomentumDomain> {
        check_tail(mass_tail)?;
        // |φ|² is a product of three normals; split the tail evenly.
        let half = two_sided_quantile(mass_tail / 3.0) * self.sigma;
        Ok(MomentumDomain::Cuboid {
            center: self.center,
            half_widths: Vec3::repeat(half),
        })
    }
}

/// Two particles with independent three-dimensional momentum profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketState<A, B = A> {
    pub side_a: A,
    pub side_b: B,
    pub mass: f64,
}
