//! Detector regions and the Newton–Wigner localization kernel
//! `Δ_Ω(q) = (2π)⁻³ ∫_Ω d³x e^{−iq·x}`.

use std::f64::consts::PI;

use nalgebra::Rotation3;

use crate::error::{Error, Result};
use crate::{Vec3, C64};

/// Below this `|qᵢLᵢ|` the box factor uses its Taylor series.
const BOX_SERIES_BELOW: f64 = 1e-4;
/// Below this `|q|R` the ball factor uses its Taylor series.
const BALL_SERIES_BELOW: f64 = 0.5;

/// A localization region. Lengths are in units of the inverse mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorRegion {
    /// Rectangular box; `orientation` maps box axes to lab axes.
    Box {
        center: Vec3,
        sides: Vec3,
        orientation: Rotation3<f64>,
    },
    Ball {
        center: Vec3,
        radius: f64,
    },
    /// No localization; the kernel is `δ³(q)`.
    AllSpace,
}

/// Region volume; all of space is flagged rather than represented by a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Volume {
    Finite(f64),
    Infinite,
}

impl Volume {
    pub fn finite(self) -> Option<f64> {
        match self {
            Volume::Finite(v) => Some(v),
            Volume::Infinite => None,
        }
    }
}

impl DetectorRegion {
    /// Axis-aligned box.
    pub fn cuboid(center: Vec3, sides: Vec3) -> Result<Self> {
        let region = DetectorRegion::Box {
            center,
            sides,
            orientation: Rotation3::identity(),
        };
        region.validate()?;
        Ok(region)
    }

    /// Axis-aligned cube centred at `center`.
    pub fn cube(center: Vec3, side: f64) -> Result<Self> {
        Self::cuboid(center, Vec3::repeat(side))
    }

    pub fn ball(center: Vec3, radius: f64) -> Result<Self> {
        let region = DetectorRegion::Ball { center, radius };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DetectorRegion::Box { center, sides, .. } => {
                if !sides.iter().all(|&l| l > 0.0 && l.is_finite()) {
                    return Err(Error::Domain(format!(
                        "box side lengths must be positive, got {:?}",
                        sides.as_slice()
                    )));
                }
                finite_center(center)
            }
            DetectorRegion::Ball { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Domain(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                finite_center(center)
            }
            DetectorRegion::AllSpace => Ok(()),
        }
    }

    pub fn is_all_space(&self) -> bool {
        matches!(self, DetectorRegion::AllSpace)
    }

    pub fn volume(&self) -> Volume {
        match self {
            DetectorRegion::Box { sides, .. } => Volume::Finite(sides.product()),
            DetectorRegion::Ball { radius, .. } => {
                Volume::Finite(4.0 * PI * radius.powi(3) / 3.0)
            }
            DetectorRegion::AllSpace => Volume::Infinite,
        }
    }

    /// Evaluates `Δ_Ω(q)` in closed form.
    pub fn delta_kernel(&self, q: &Vec3) -> Result<C64> {
        match self {
            DetectorRegion::AllSpace => Err(Error::DistributionalKernel),
            _ => Ok(self.kernel_unchecked(q)),
        }
    }

    /// Kernel without the all-space check; all-space returns zero.
    #[inline]
    pub(crate) fn kernel_unchecked(&self, q: &Vec3) -> C64 {
        match self {
            DetectorRegion::Box {
                center,
                sides,
                orientation,
            } => {
                let local = orientation.inverse_transform_vector(q);
                let magnitude = box_factor(local.x, sides.x)
                    * box_factor(local.y, sides.y)
                    * box_factor(local.z, sides.z);
                phase(q, center) * magnitude
            }
            DetectorRegion::Ball { center, radius } => {
                phase(q, center) * ball_factor(q.norm(), *radius)
            }
            DetectorRegion::AllSpace => C64::new(0.0, 0.0),
        }
    }

    /// Largest `|x·n|` over the region; `None` for all space.
    pub fn reach_along(&self, n: &Vec3) -> Option<f64> {
        match self {
            DetectorRegion::Box {
                center,
                sides,
                orientation,
            } => {
                let local = orientation.inverse_transform_vector(n);
                let half = 0.5 * sides.component_mul(&local.abs()).sum();
                Some(center.dot(n).abs() + half)
            }
            DetectorRegion::Ball { center, radius } => Some(center.dot(n).abs() + radius),
            DetectorRegion::AllSpace => None,
        }
    }

    /// Largest `|x|` over the region; `None` for all space.
    pub fn bounding_radius(&self) -> Option<f64> {
        match self {
            DetectorRegion::Box { center, sides, .. } => Some(center.norm() + 0.5 * sides.norm()),
            DetectorRegion::Ball { center, radius } => Some(center.norm() + radius),
            DetectorRegion::AllSpace => None,
        }
    }

    /// The same region rigidly rotated about the origin.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        match *self {
            DetectorRegion::Box {
                center,
                sides,
                orientation,
            } => DetectorRegion::Box {
                center: rotation * center,
                sides,
                orientation: rotation * orientation,
            },
            DetectorRegion::Ball { center, radius } => DetectorRegion::Ball {
                center: rotation * center,
                radius,
            },
            DetectorRegion::AllSpace => DetectorRegion::AllSpace,
        }
    }

    /// The same region with every length multiplied by `factor` about its centre.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            DetectorRegion::Box {
                center,
                sides,
                orientation,
            } => DetectorRegion::Box {
                center,
                sides: sides * factor,
                orientation,
            },
            DetectorRegion::Ball { center, radius } => DetectorRegion::Ball {
                center,
                radius: radius * factor,
            },
            DetectorRegion::AllSpace => DetectorRegion::AllSpace,
        }
    }
}

fn finite_center(center: &Vec3) -> Result<()> {
    if center.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("detector centre must be finite".into()))
    }
}

#[inline]
fn phase(q: &Vec3, center: &Vec3) -> C64 {
    let arg = q.dot(center);
    if arg == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        let (s, c) = arg.sin_cos();
        C64::new(c, -s)
    }
}

/// `sin(qL/2)/(πq)`, with limit `L/(2π)` at `q = 0`.
#[inline]
fn box_factor(q: f64, side: f64) -> f64 {
    let x = q * side;
    if x.abs() < BOX_SERIES_BELOW {
        let y2 = 0.25 * x * x;
        side / (2.0 * PI) * (1.0 - y2 / 6.0 + y2 * y2 / 120.0)
    } else {
        (0.5 * x).sin() / (PI * q)
    }
}

/// `(sin(qR) − qR cos(qR))/(2π² q³)`, with limit `R³/(6π²)` at `q = 0`.
#[inline]
fn ball_factor(q: f64, radius: f64) -> f64 {
    let x = q * radius;
    if x < BALL_SERIES_BELOW {
        // (sin x − x cos x)/x³ = Σₙ (−1)ⁿ⁺¹ 2n x²ⁿ⁻² / (2n+1)!
        let x2 = x * x;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for n in 2..=8u32 {
            let n = n as f64;
            term *= -x2 * n / ((n - 1.0) * (2.0 * n) * (2.0 * n + 1.0));
            sum += term;
        }
        radius.powi(3) / (2.0 * PI * PI) * sum
    } else {
        let (s, c) = x.sin_cos();
        (s - x * c) / (2.0 * PI * PI * q.powi(3))
    }
}
