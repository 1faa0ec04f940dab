//! Gauss–Legendre rules and discrete momentum grids.

use std::f64::consts::{FRAC_PI_2, PI};

use gauss_quad::GaussLegendre;
use nalgebra::{Rotation3, Unit};

use crate::error::{Error, Result};
use crate::kinematics::Direction;
use crate::wavepacket::MomentumDomain;
use crate::Vec3;

/// Gauss–Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(n.max(2))
        .map_err(|e| Error::Domain(format!("cannot build Gauss–Legendre rule of degree {n}: {e}")))?;
    let mid = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    Ok(rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect())
}

/// A weighted set of momentum nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentumGrid {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(points: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        Ok(MomentumGrid { points, weights })
    }

    /// A single node of unit weight.
    pub fn single(point: Vec3) -> Self {
        MomentumGrid {
            points: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Tensor-product grid with `n` nodes per dimension.
    ///
    /// Spherical domains use Gauss–Legendre in `|k|` and `cos θ` and the
    /// periodic trapezoid rule in the azimuth; cuboids are Gauss–Legendre cubed.
    pub fn tensor(domain: &MomentumDomain, n: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match *domain {
            MomentumDomain::Spherical {
                radial: (lo, hi),
                axis,
                max_polar,
            } => {
                let rot = align_z_to(&axis);
                let radial = gauss_legendre(n, lo, hi)?;
                let polar = gauss_legendre(n, max_polar.cos(), 1.0)?;
                let step = 2.0 * PI / n as f64;
                for &(r, wr) in &radial {
                    for &(ct, wt) in &polar {
                        let st = (1.0 - ct * ct).max(0.0).sqrt();
                        for j in 0..n {
                            let phi = (j as f64 + 0.5) * step;
                            let local = Vec3::new(st * phi.cos(), st * phi.sin(), ct) * r;
                            points.push(rot * local);
                            weights.push(wr * wt * step * r * r);
                        }
                    }
                }
            }
            MomentumDomain::Cuboid {
                center,
                half_widths,
            } => {
                let axes: Vec<_> = (0..3)
                    .map(|i| gauss_legendre(n, center[i] - half_widths[i], center[i] + half_widths[i]))
                    .collect::<Result<_>>()?;
                for &(x, wx) in &axes[0] {
                    for &(y, wy) in &axes[1] {
                        for &(z, wz) in &axes[2] {
                            points.push(Vec3::new(x, y, z));
                            weights.push(wx * wy * wz);
                        }
                    }
                }
            }
        }
        Ok(MomentumGrid { points, weights })
    }
}

/// Rotation taking `ẑ` to `axis`.
pub(crate) fn align_z_to(axis: &Direction) -> Rotation3<f64> {
    Rotation3::rotation_between(&Vec3::z(), axis.as_vec()).unwrap_or_else(|| {
        // antiparallel
        Rotation3::from_axis_angle(&Unit::new_unchecked(Vec3::x()), PI)
    })
}

/// Largest physical extent of a momentum domain along any of its grid
/// coordinates (radial span or arc length).
pub(crate) fn domain_span(domain: &MomentumDomain) -> f64 {
    match *domain {
        MomentumDomain::Spherical {
            radial: (lo, hi),
            max_polar,
            ..
        } => {
            let widest = if max_polar >= FRAC_PI_2 { 1.0 } else { max_polar.sin() };
            (hi - lo).max(hi * max_polar).max(2.0 * PI * hi * widest)
        },
        MomentumDomain::Cuboid { half_widths, .. } => 2.0 * half_widths.max(),
    }
}
