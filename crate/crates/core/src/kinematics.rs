//! On-shell four-momenta and unit directions in natural units (ħ = c = 1).

use crate::error::{Error, Result};
use crate::Vec3;

/// Relative tolerance of the mass-shell check.
pub const ON_SHELL_TOL: f64 = 1e-12;
/// Tolerance on `|n| = 1` for directions handed in as already normalized.
pub const UNIT_TOL: f64 = 1e-12;

/// An on-shell four-momentum `(e, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourMomentum {
    pub e: f64,
    pub p: Vec3,
}

impl FourMomentum {
    /// Momentum at rest for the given mass.
    pub fn rest(mass: f64) -> Result<Self> {
        on_shell(mass, Vec3::zeros())
    }

    /// True if `e² − |p|² = mass²` to relative [`ON_SHELL_TOL`] and `e ≥ mass > 0`.
    pub fn is_on_shell(&self, mass: f64) -> bool {
        if !(mass > 0.0) || !(self.e >= mass * (1.0 - ON_SHELL_TOL)) {
            return false;
        }
        let residual = self.e * self.e - self.p.norm_squared() - mass * mass;
        residual.abs() <= ON_SHELL_TOL * self.e * self.e
    }

    pub fn check_on_shell(&self, mass: f64) -> Result<()> {
        if self.is_on_shell(mass) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "four-momentum (e = {}, |p| = {}) is not on shell for mass {}",
                self.e,
                self.p.norm(),
                mass
            )))
        }
    }
}

/// Builds `(√(mass² + |p|²), p)`.
pub fn on_shell(mass: f64, p: Vec3) -> Result<FourMomentum> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !p.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain("momentum components must be finite".into()));
    }
    Ok(FourMomentum {
        e: energy(mass, p.norm()),
        p,
    })
}

/// On-shell energy for a momentum of magnitude `t`.
#[inline]
pub fn energy(mass: f64, t: f64) -> f64 {
    mass.hypot(t)
}

/// Minkowski product `a⁰b⁰ − a·b` (mostly-minus signature).
pub fn minkowski_dot(a: &FourMomentum, b: &FourMomentum) -> f64 {
    a.e * b.e - a.p.dot(&b.p)
}

/// A unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec3);

impl Direction {
    /// Normalizes a non-zero vector.
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain(format!("cannot normalize vector {:?}", v.as_slice())));
        }
        Ok(Direction(v / norm))
    }

    /// Accepts `v` only if it is already a unit vector to [`UNIT_TOL`].
    pub fn from_unit(v: Vec3) -> Result<Self> {
        check_unit(&v, "direction")?;
        Ok(Direction(v))
    }

    pub fn x() -> Self {
        Direction(Vec3::x())
    }

    pub fn y() -> Self {
        Direction(Vec3::y())
    }

    pub fn z() -> Self {
        Direction(Vec3::z())
    }

    /// Unit vector at polar angle `theta` and azimuth `phi`.
    pub fn spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction(Vec3::new(st * cp, st * sp, ct))
    }

    #[inline]
    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    #[inline]
    pub fn into_vec(self) -> Vec3 {
        self.0
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

impl std::ops::Deref for Direction {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

pub(crate) fn check_unit(v: &Vec3, what: &str) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be a unit vector, |v| = {norm}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;
    use proptest::prelude::*;

    #[test]
    fn on_shell_examples() {
        assert_eq!(on_shell(1.0, Vec3::zeros()).unwrap().e, 1.0);
        assert_eq!(on_shell(1.0, Vec3::z()).unwrap().e, 2f64.sqrt());
        let q = on_shell(0.511, Vec3::new(0.3, 0.4, 0.0)).unwrap();
        assert!((q.e - (0.511f64 * 0.511 + 0.25).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn non_positive_mass_is_rejected() {
        assert!(matches!(on_shell(0.0, Vec3::zeros()), Err(Error::Domain(_))));
        assert!(matches!(on_shell(-1.0, Vec3::x()), Err(Error::Domain(_))));
        assert!(matches!(on_shell(f64::NAN, Vec3::x()), Err(Error::Domain(_))));
    }

    #[test]
    fn minkowski_examples() {
        let rest = FourMomentum::rest(1.0).unwrap();
        assert_eq!(minkowski_dot(&rest, &rest), 1.0);
        let up = on_shell(1.0, Vec3::z()).unwrap();
        let down = on_shell(1.0, -Vec3::z()).unwrap();
        assert!((minkowski_dot(&up, &down) - 3.0).abs() < 1e-15);
        let x = on_shell(1.0, Vec3::x()).unwrap();
        let y = on_shell(1.0, Vec3::y()).unwrap();
        assert!((minkowski_dot(&x, &y) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn off_shell_is_detected() {
        let q = FourMomentum { e: 1.5, p: Vec3::x() };
        assert!(q.check_on_shell(1.0).is_err());
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(Vec3::zeros()).is_err());
        assert!(Direction::from_unit(Vec3::new(1.0, 1.0, 0.0)).is_err());
        let d = Direction::new(Vec3::new(3.0, 4.0, 0.0)).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-15);
    }

    fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
        (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn on_shell_round_trips(mass in 0.01f64..10.0, dir in vec3(1.0), scale in 0.0f64..1e3) {
            let p = dir * scale * mass;
            prop_assert!(on_shell(mass, p).unwrap().is_on_shell(mass));
        }
    }

    proptest! {
        #[test]
        fn minkowski_symmetric_and_rotation_invariant(
            a in vec3(10.0), b in vec3(10.0), axis in vec3(1.0), angle in 0.0f64..6.3
        ) {
            let qa = on_shell(1.0, a).unwrap();
            let qb = on_shell(1.0, b).unwrap();
            let ab = minkowski_dot(&qa, &qb);
            prop_assert!((ab - minkowski_dot(&qb, &qa)).abs() <= 1e-12 * ab.abs());
            let rot = Rotation3::new(axis.normalize() * angle);
            let ra = FourMomentum { e: qa.e, p: rot * qa.p };
            let rb = FourMomentum { e: qb.e, p: rot * qb.p };
            prop_assert!((minkowski_dot(&ra, &rb) - ab).abs() <= 1e-12 * ab.abs());
        }
    }
}
