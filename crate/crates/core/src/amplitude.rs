//! The covariant singlet amplitude `M(k, p)` and its two spin traces.
//!
//! Each trace has two routes: the expanded closed form (production) and a
//! direct 2×2 complex matrix product (oracle). Debug builds cross-check them
//! on every call.

use nalgebra::Matrix2;

use crate::error::Result;
use crate::kinematics::{check_unit, FourMomentum};
use crate::{Vec3, C64};

pub type Mat2 = Matrix2<C64>;

const ORACLE_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The standard Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [Mat2; 3] {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Mat2::new(zero, one, one, zero),
        Mat2::new(zero, -i, i, zero),
        Mat2::new(one, zero, zero, -one),
    ]
}

/// `v·σ`.
pub fn sigma_dot(v: &Vec3) -> Mat2 {
    let s = pauli();
    s[0] * c(v.x, 0.0) + s[1] * c(v.y, 0.0) + s[2] * c(v.z, 0.0)
}

/// `v·σᵀ`, i.e. `(v·σ)ᵀ`.
pub fn sigma_dot_transposed(v: &Vec3) -> Mat2 {
    sigma_dot(v).transpose()
}

/// `M(k, p)` together with the momenta it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletAmplitude {
    pub mat: Mat2,
    pub k: FourMomentum,
    pub p: FourMomentum,
    pub mass: f64,
}

impl SingletAmplitude {
    /// `(m+k⁰)(m+p⁰) − k·p`, the scalar part of the bracket.
    fn scalar_part(&self) -> f64 {
        let m = self.mass;
        (m + self.k.e) * (m + self.p.e) - self.k.p.dot(&self.p.p)
    }

    fn cross(&self) -> Vec3 {
        self.k.p.cross(&self.p.p)
    }

    fn norm_factor(&self) -> f64 {
        ((self.mass + self.k.e) * (self.mass + self.p.e)).sqrt()
    }
}

/// `M(k,p) = −i (2m√((m+p⁰)(m+k⁰)))⁻¹ ([(m+k⁰)(m+p⁰) − k·p − iσ·(k×p)] σ₂)`.
pub fn amplitude_matrix(k: &FourMomentum, p: &FourMomentum, mass: f64) -> Result<SingletAmplitude> {
    k.check_on_shell(mass)?;
    p.check_on_shell(mass)?;
    Ok(amplitude_unchecked(k, p, mass))
}

pub(crate) fn amplitude_unchecked(k: &FourMomentum, p: &FourMomentum, mass: f64) -> SingletAmplitude {
    let m = mass;
    let scalar = (m + k.e) * (m + p.e) - k.p.dot(&p.p);
    let cross = k.p.cross(&p.p);
    let bracket = Mat2::identity() * c(scalar, 0.0) - sigma_dot(&cross) * c(0.0, 1.0);
    let prefactor = c(0.0, -1.0 / (2.0 * m * ((m + p.e) * (m + k.e)).sqrt()));
    SingletAmplitude {
        mat: bracket * pauli()[1] * prefactor,
        k: *k,
        p: *p,
        mass,
    }
}

/// `Tr{(a·σ) M (b·σᵀ) M′†}` by explicit matrix multiplication.
pub fn trace_ab_direct(a: &Vec3, b: &Vec3, m: &Mat2, m_prime: &Mat2) -> C64 {
    (sigma_dot(a) * m * sigma_dot_transposed(b) * m_prime.adjoint()).trace()
}

/// `Tr{M M′†}` by explicit matrix multiplication.
pub fn trace_plain_direct(m: &Mat2, m_prime: &Mat2) -> C64 {
    (m * m_prime.adjoint()).trace()
}

/// `Tr{(a·σ) M(k,p) (b·σᵀ) M†(k′,p′)}` in expanded closed form.
///
/// `a` and `b` must be unit vectors.
pub fn trace_ab(a: &Vec3, b: &Vec3, m: &SingletAmplitude, m_prime: &SingletAmplitude) -> Result<C64> {
    check_unit(a, "measurement direction a")?;
    check_unit(b, "measurement direction b")?;
    debug_assert!((m.mass - m_prime.mass).abs() <= 1e-15 * m.mass);

    let mass = m.mass;
    let kp = m.cross();
    let kp_prime = m_prime.cross();
    let s = m.scalar_part();
    let s_prime = m_prime.scalar_part();
    let ab = a.dot(b);
    let axb = a.cross(b);

    let bracket = a.dot(&kp) * b.dot(&kp_prime) + a.dot(&kp_prime) * b.dot(&kp)
        - ab * kp.dot(&kp_prime)
        + ab * s * s_prime
        - axb.dot(&(kp_prime * s + kp * s_prime));
    let value = c(
        -bracket / (2.0 * mass * mass * m.norm_factor() * m_prime.norm_factor()),
        0.0,
    );

    if cfg!(debug_assertions) {
        let direct = trace_ab_direct(a, b, &m.mat, &m_prime.mat);
        let scale = m.mat.norm() * m_prime.mat.norm();
        debug_assert!(
            (direct - value).norm() <= ORACLE_TOL * scale.max(f64::MIN_POSITIVE),
            "trace_ab closed form {value} disagrees with matrix product {direct}"
        );
    }
    Ok(value)
}

/// `Tr{M(k,p) M†(k′,p′)}` in expanded closed form.
pub fn trace_plain(m: &SingletAmplitude, m_prime: &SingletAmplitude) -> C64 {
    let mass = m.mass;
    let bracket = m.scalar_part() * m_prime.scalar_part() + m.cross().dot(&m_prime.cross());
    let value = c(
        bracket / (2.0 * mass * mass * m.norm_factor() * m_prime.norm_factor()),
        0.0,
    );

    if cfg!(debug_assertions) {
        let direct = trace_plain_direct(&m.mat, &m_prime.mat);
        let scale = m.mat.norm() * m_prime.mat.norm();
        debug_assert!(
            (direct - value).norm() <= ORACLE_TOL * scale.max(f64::MIN_POSITIVE),
            "trace_plain closed form {value} disagrees with matrix product {direct}"
        );
    }
    value
}

pub(crate) fn require_unit_pair(a: &Vec3, b: &Vec3) -> Result<()> {
    check_unit(a, "measurement direction a")?;
    check_unit(b, "measurement direction b")
}
