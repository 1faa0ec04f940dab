//! The normalized localized spin correlation `C(a, b)` and CHSH combinations.
//!
//! All regimes funnel through [`normalized_correlation`], which holds the
//! full prefactor chain: the `¼` of the spin expectation, the `−1/(2⁵m²)` and
//! `1/(2³m²)` of the integral-assembled moments, and the overall factor `4`.

use std::fmt;

use crate::amplitude::{amplitude_matrix, trace_ab_direct, trace_plain_direct};
use crate::detector::DetectorRegion;
use crate::error::{Error, Result};
use crate::integrals::{
    fixed_direction_integrals, general_integrals, CMat3, CVec3, MomentumIntegrals, QuadratureSpec,
};
use crate::kinematics::{minkowski_dot, Direction, FourMomentum};
use crate::wavepacket::{FactorizedState, MomentumProfile, PacketState, RadialAmplitude};
use crate::{Vec3, C64};

/// Tolerance of the debug-build cross-check between the sharp closed form and
/// the trace ratio.
const SHARP_ORACLE_TOL: f64 = 1e-12;
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SharpMomentum,
    FixedDirection,
    GeneralFactorized,
    BruteForceOracle,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SharpMomentum => "sharp",
            Regime::FixedDirection => "fixed-direction",
            Regime::GeneralFactorized => "general",
            Regime::BruteForceOracle => "brute-force",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    /// First-order propagated error; exactly zero for closed forms.
    pub abs_error: f64,
    pub regime: Regime,
    pub inputs_digest: String,
    /// Accuracy warning inherited from the quadrature, if any.
    pub warning: Option<String>,
}

/// `4 · numerator / denominator`, the normalized correlation.
///
/// The imaginary part of the ratio must vanish up to roundoff; it is dropped.
pub fn normalized_correlation(numerator: C64, denominator: C64) -> Result<f64> {
    if !(denominator.norm() > 0.0) || !denominator.re.is_finite() {
        return Err(Error::DegenerateState(format!(
            "normalization ⟨Π_A ⊗ Π_B⟩ = {denominator} vanishes"
        )));
    }
    Ok((numerator * 4.0 / denominator).re)
}

/// Closed form for sharp momenta `q_a`, `q_b`:
///
/// ```text
/// C = −a·b + (q_a×q_b)/(m² + q_a·q_b) · [(a×b) + ((a·q_a)(b×q_b) − (b·q_b)(a×q_a)) / ((q_a⁰+m)(q_b⁰+m))]
/// ```
///
/// with `q_a·q_b` the Minkowski product. Localization drops out entirely.
pub fn correlation_sharp(
    qa: &FourMomentum,
    qb: &FourMomentum,
    a: &Direction,
    b: &Direction,
    mass: f64,
) -> Result<CorrelationResult> {
    qa.check_on_shell(mass)?;
    qb.check_on_shell(mass)?;
    let (av, bv) = (a.as_vec(), b.as_vec());
    let cross = qa.p.cross(&qb.p);
    let inner = av.cross(bv)
        + (bv.cross(&qb.p) * av.dot(&qa.p) - av.cross(&qa.p) * bv.dot(&qb.p))
            / ((qa.e + mass) * (qb.e + mass));
    let value = -av.dot(bv) + cross.dot(&inner) / (mass * mass + minkowski_dot(qa, qb));
    // |C| ≤ 1 holds exactly; keep roundoff from stepping outside it
    let value = value.clamp(-1.0, 1.0);

    if cfg!(debug_assertions) {
        let ratio = sharp_trace_ratio(qa, qb, a, b, mass)?;
        debug_assert!(
            (ratio - value).abs() <= SHARP_ORACLE_TOL,
            "sharp closed form {value} disagrees with trace ratio {ratio}"
        );
    }
    Ok(CorrelationResult {
        value,
        abs_error: 0.0,
        regime: Regime::SharpMomentum,
        inputs_digest: format!(
            "sharp qa={:?} qb={:?} a={:?} b={:?} m={mass}",
            qa.p.as_slice(),
            qb.p.as_slice(),
            av.as_slice(),
            bv.as_slice()
        ),
        warning: None,
    })
}

/// `Tr{(a·σ) M (b·σᵀ) M†} / Tr{M M†}` at `M = M(q_a, q_b)`, by matrix products.
pub fn sharp_trace_ratio(qa: &FourMomentum, qb: &FourMomentum, a: &Direction, b: &Direction, mass: f64) -> Result<f64> {
    let m = amplitude_matrix(qa, qb, mass)?.mat;
    let num = trace_ab_direct(a, b, &m, &m);
    let den = trace_plain_direct(&m, &m);
    Ok((num / den).re)
}

/// Numerator and denominator of the sharp-momentum correlation with the
/// detector volumes kept:
/// `q_a⁰q_b⁰/(2π)⁶ Tr{(a·σ)M(b·σᵀ)M†} Vol(A)Vol(B)` and
/// `4q_a⁰q_b⁰/(2π)⁶ Tr{MM†} Vol(A)Vol(B)`.
pub fn sharp_localized_moments(
    qa: &FourMomentum,
    qb: &FourMomentum,
    a: &Direction,
    b: &Direction,
    mass: f64,
    det_a: &DetectorRegion,
    det_b: &DetectorRegion,
) -> Result<(C64, C64)> {
    let vol_a = det_a.volume().finite().ok_or(Error::DistributionalKernel)?;
    let vol_b = det_b.volume().finite().ok_or(Error::DistributionalKernel)?;
    let m = amplitude_matrix(qa, qb, mass)?.mat;
    let common = qa.e * qb.e / (2.0 * std::f64::consts::PI).powi(6) * vol_a * vol_b;
    Ok((
        trace_ab_direct(a, b, &m, &m) * common,
        trace_plain_direct(&m, &m) * (4.0 * common),
    ))
}

fn dot(u: &CVec3, v: &CVec3) -> C64 {
    u.iter().zip(v.iter()).map(|(x, y)| x * y).sum()
}

fn cross(u: &CVec3, v: &CVec3) -> CVec3 {
    CVec3::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
}

fn real(v: &Vec3) -> CVec3 {
    v.map(|x| C64::new(x, 0.0))
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The curly brackets `N` and `D` of the integral-assembled moments:
/// numerator `= −N/(2⁵m²)`, denominator `= D/(2³m²)`.
///
/// Conjugate terms are formed literally and never folded into real parts.
pub fn correlation_brackets(ia: &MomentumIntegrals, ib: &MomentumIntegrals, a: &Vec3, b: &Vec3) -> (C64, C64) {
    brackets_raw(ia.i1, &ia.i2, &ia.i3, ib.i1, &ib.i2, &ib.i3, a, b)
}

#[allow(clippy::too_many_arguments)]
fn brackets_raw(
    i1a: C64,
    i2a: &CVec3,
    i3a: &CMat3,
    i1b: C64,
    i2b: &CVec3,
    i3b: &CMat3,
    a: &Vec3,
    b: &Vec3,
) -> (C64, C64) {
    let ab = a.dot(b);
    let axb = real(&a.cross(b));
    let (ac, bc) = (real(a), real(b));
    let i2_dot = dot(i2a, i2b);
    let i3a_conj = i3a.conjugate();
    let i3b_conj = i3b.conjugate();
    let tr_ab_conj = (i3a * i3b_conj).trace();
    let tr_ab = (i3a * i3b).trace();
    let tr_tr = i3a.trace() * i3b.trace();

    let mut n = (i1a * i1b - i2_dot - i2_dot.conj() + tr_ab_conj + tr_ab - tr_tr) * ab;
    let i2_cross = cross(i2a, i2b);
    n -= dot(&axb, &(i2_cross + i2_cross.map(|z| z.conj())));
    let sandwich = i3a * i3b_conj - i3b * i3a_conj + i3a_conj * i3b - i3b_conj * i3a;
    n += dot(&ac, &(sandwich * bc));
    let mut eps_term = C64::new(0.0, 0.0);
    for i in 0..3 {
        for q in 0..3 {
            let coef = a[i] * b[q];
            if coef == 0.0 {
                continue;
            }
            for j in 0..3 {
                for k in 0..3 {
                    let e1 = levi_civita(i, j, k);
                    if e1 == 0.0 {
                        continue;
                    }
                    for r in 0..3 {
                        for s in 0..3 {
                            let e2 = levi_civita(q, r, s);
                            if e2 != 0.0 {
                                eps_term += i3a[(j, r)] * i3b[(k, s)] * (e1 * e2 * coef);
                            }
                        }
                    }
                }
            }
        }
    }
    n += eps_term + eps_term.conj();

    let d = i1a * i1b - i2_dot - i2_dot.conj() + tr_ab_conj - tr_ab + tr_tr;
    (n, d)
}

/// Numerator `⟨Π_A (a·S) ⊗ (b·S) Π_B⟩` and denominator `⟨Π_A ⊗ Π_B⟩`
/// assembled from the integral families.
pub fn localized_moments(ia: &MomentumIntegrals, ib: &MomentumIntegrals, a: &Vec3, b: &Vec3, mass: f64) -> (C64, C64) {
    let (n, d) = correlation_brackets(ia, ib, a, b);
    let m2 = mass * mass;
    (-n / (32.0 * m2), d / (8.0 * m2))
}

/// The fixed-direction closed ratio `N/D` with `n = dir_a`, `m = dir_b`.
///
/// `ray_a`/`ray_b` hold `(I₁ⁿ, I₂ⁿ, I₃ⁿ)` for each side.
pub fn fixed_direction_brackets(
    ray_a: [C64; 3],
    ray_b: [C64; 3],
    dir_a: &Vec3,
    dir_b: &Vec3,
    a: &Vec3,
    b: &Vec3,
) -> (C64, C64) {
    let ab = a.dot(b);
    let nxm = dir_a.cross(dir_b);
    let nm = dir_a.dot(dir_b);
    let axb_nxm = a.cross(b).dot(&nxm);
    let i11 = ray_a[0] * ray_b[0];
    let i22 = ray_a[1] * ray_b[1];
    let i33 = ray_a[2] * ray_b[2];
    let i22_sym = i22 + i22.conj();

    let coef3 = ab * nxm.norm_squared() - ab * nm * nm - 2.0 * a.dot(&nxm) * b.dot(&nxm) - 2.0 * axb_nxm * nm;
    let numerator = -i11 * ab + i33 * coef3 + i22_sym * (ab * nm + axb_nxm);
    let denominator = i11 + i33 - i22_sym * nm;
    (numerator, denominator)
}

/// `C` from the fixed-direction ratio (already normalized; no extra factor).
fn fixed_ratio(ray_a: [C64; 3], ray_b: [C64; 3], dir_a: &Vec3, dir_b: &Vec3, a: &Vec3, b: &Vec3) -> Result<f64> {
    let (n, d) = fixed_direction_brackets(ray_a, ray_b, dir_a, dir_b, a, b);
    // N/D is already C; route through the shared normalization as ¼N/D.
    normalized_correlation(n * 0.25, d)
}

/// First-order error of `f` at `x` from independent perturbations of every
/// real and imaginary part by `errors`.
fn propagate<F>(f: F, x: &[C64], errors: &[f64]) -> f64
where
    F: Fn(&[C64]) -> Result<f64>,
{
    let Ok(base) = f(x) else { return f64::INFINITY };
    let mut buf = x.to_vec();
    let mut total = 0.0;
    for (i, &e) in errors.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        for shift in [C64::new(e, 0.0), C64::new(0.0, e)] {
            buf[i] = x[i] + shift;
            total += f(&buf).map(|v| (v - base).abs()).unwrap_or(f64::INFINITY);
        }
        buf[i] = x[i];
    }
    total
}

/// Correlation for momenta pinned to `state.dir_a` and `state.dir_b`.
pub fn correlation_fixed_directions<P: RadialAmplitude>(
    state: &FactorizedState<P>,
    det_a: &DetectorRegion,
    det_b: &DetectorRegion,
    a: &Direction,
    b: &Direction,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult> {
    let ia = fixed_direction_integrals(&state.profile_a, &state.dir_a, det_a, state.mass, spec)?;
    let ib = fixed_direction_integrals(&state.profile_b, &state.dir_b, det_b, state.mass, spec)?;
    correlation_from_rays(&ia, &ib, a, b)
}

/// Assembles `C` from two fixed-direction integral sets.
pub fn correlation_from_rays(
    ia: &MomentumIntegrals,
    ib: &MomentumIntegrals,
    a: &Direction,
    b: &Direction,
) -> Result<CorrelationResult> {
    let (ra, rb) = match (ia.ray, ib.ray) {
        (Some(ra), Some(rb)) => (ra, rb),
        _ => return Err(Error::Domain("fixed-direction assembly needs ray integrals".into())),
    };
    let (na, nb) = (ra.direction.into_vec(), rb.direction.into_vec());
    let (av, bv) = (a.into_vec(), b.into_vec());
    let x = [ra.i1, ra.i2, ra.i3, rb.i1, rb.i2, rb.i3];
    let errors = [ra.errors, rb.errors].concat();
    let f = |v: &[C64]| fixed_ratio([v[0], v[1], v[2]], [v[3], v[4], v[5]], &na, &nb, &av, &bv);
    let value = f(&x)?;

    let (_, d) = fixed_direction_brackets(x[..3].try_into().unwrap(), x[3..].try_into().unwrap(), &na, &nb, &av, &bv);
    let magnitude = (x[0] * x[3]).norm() + 2.0 * (x[1] * x[4]).norm() + (x[2] * x[5]).norm();
    let floor = ROUNDOFF * (1.0 + value.abs()) * magnitude / d.norm();
    let abs_error = propagate(f, &x, &errors).max(floor);

    Ok(CorrelationResult {
        value,
        abs_error,
        regime: Regime::FixedDirection,
        inputs_digest: format!(
            "fixed-direction dir_a={:?} dir_b={:?} a={:?} b={:?}",
            na.as_slice(),
            nb.as_slice(),
            av.as_slice(),
            bv.as_slice()
        ),
        warning: merge_warnings(&ia.warning, &ib.warning),
    })
}

/// Correlation for a general factorized state `φ(k)φ(p)`.
pub fn correlation_general<A: MomentumProfile, B: MomentumProfile>(
    state: &PacketState<A, B>,
    det_a: &DetectorRegion,
    det_b: &DetectorRegion,
    a: &Direction,
    b: &Direction,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult> {
    let ia = general_integrals(&state.side_a, det_a, state.mass, spec)?;
    let ib = general_integrals(&state.side_b, det_b, state.mass, spec)?;
    correlation_from_integrals(&ia, &ib, a, b, state.mass, Regime::GeneralFactorized)
}

fn flatten(ints: &MomentumIntegrals) -> (Vec<C64>, Vec<f64>) {
    let mut x = vec![ints.i1];
    let mut e = vec![ints.err_i1];
    x.extend(ints.i2.iter());
    e.extend(ints.err_i2.iter());
    x.extend(ints.i3.iter());
    e.extend(ints.err_i3.iter());
    (x, e)
}

fn unflatten(v: &[C64]) -> (C64, CVec3, CMat3) {
    (v[0], CVec3::from_column_slice(&v[1..4]), CMat3::from_column_slice(&v[4..13]))
}

/// Assembles `C` from general integral sets with first-order error propagation.
pub fn correlation_from_integrals(
    ia: &MomentumIntegrals,
    ib: &MomentumIntegrals,
    a: &Direction,
    b: &Direction,
    mass: f64,
    regime: Regime,
) -> Result<CorrelationResult> {
    let (av, bv) = (a.into_vec(), b.into_vec());
    let (mut x, mut errors) = flatten(ia);
    let (xb, eb) = flatten(ib);
    x.extend(xb);
    errors.extend(eb);
    let m2 = mass * mass;
    let f = |v: &[C64]| {
        let (i1a, i2a, i3a) = unflatten(&v[..13]);
        let (i1b, i2b, i3b) = unflatten(&v[13..]);
        let (n, d) = brackets_raw(i1a, &i2a, &i3a, i1b, &i2b, &i3b, &av, &bv);
        normalized_correlation(-n / (32.0 * m2), d / (8.0 * m2))
    };
    let value = f(&x)?;
    let (_, d) = correlation_brackets(ia, ib, &av, &bv);
    let magnitude = (ia.i1 * ib.i1).norm() + 2.0 * ia.i2.norm() * ib.i2.norm() + 6.0 * ia.i3.norm() * ib.i3.norm();
    let floor = ROUNDOFF * (1.0 + value.abs()) * magnitude / d.norm();
    let abs_error = propagate(f, &x, &errors).max(floor);
    Ok(CorrelationResult {
        value,
        abs_error,
        regime,
        inputs_digest: format!("{regime} a={:?} b={:?} m={mass}", av.as_slice(), bv.as_slice()),
        warning: merge_warnings(&ia.warning, &ib.warning),
    })
}

fn merge_warnings(a: &Option<String>, b: &Option<String>) -> Option<String> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(format!("A: {x}; B: {y}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult {
    pub value: f64,
    pub abs_error: f64,
    pub terms: [CorrelationResult; 4],
    pub warning: Option<String>,
}

/// `C(a,b) − C(a,b′) + C(a′,b) + C(a′,b′)` with errors added linearly.
pub fn chsh<F>(correlation: F, a: &Direction, a_prime: &Direction, b: &Direction, b_prime: &Direction) -> Result<ChshResult>
where
    F: Fn(&Direction, &Direction) -> Result<CorrelationResult>,
{
    let terms = [
        correlation(a, b)?,
        correlation(a, b_prime)?,
        correlation(a_prime, b)?,
        correlation(a_prime, b_prime)?,
    ];
    let value = terms[0].value - terms[1].value + terms[2].value + terms[3].value;
    let abs_error = terms.iter().map(|t| t.abs_error).sum();
    let mut warnings: Vec<String> = Vec::new();
    for w in terms.iter().filter_map(|t| t.warning.clone()) {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    let warning = (!warnings.is_empty()).then(|| warnings.join("; "));
    Ok(ChshResult {
        value,
        abs_error,
        terms,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::on_shell;

    fn rest() -> FourMomentum {
        FourMomentum::rest(1.0).unwrap()
    }

    #[test]
    fn rest_frame_prefactor_chain_gives_minus_a_dot_b() {
        // A state sharply at rest: I₁ = (2m)², I₂ = I₃ = 0 on both sides.
        let det = DetectorRegion::cube(Vec3::zeros(), 1.0).unwrap();
        let ints = MomentumIntegrals {
            i1: C64::new(4.0, 0.0),
            i2: CVec3::zeros(),
            i3: CMat3::zeros(),
            err_i1: 0.0,
            err_i2: Vec3::zeros(),
            err_i3: nalgebra::Matrix3::zeros(),
            detector: det,
            ray: None,
            method: crate::integrals::Method::Grid { points: 1 },
            warning: None,
        };
        let a = Direction::new(Vec3::new(0.3, -0.2, 0.9)).unwrap();
        let b = Direction::new(Vec3::new(-0.5, 0.1, 0.4)).unwrap();
        let (num, den) = localized_moments(&ints, &ints, &a, &b, 1.0);
        assert_eq!(normalized_correlation(num, den).unwrap(), -a.dot(&b));
    }

    #[test]
    fn zero_denominator_is_degenerate() {
        let err = normalized_correlation(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateState(_)));
    }

    #[test]
    fn sharp_at_rest_and_collinear() {
        let a = Direction::new(Vec3::new(1.0, 2.0, 3.0)).unwrap();
        let b = Direction::new(Vec3::new(-1.0, 0.5, 0.2)).unwrap();
        let c = correlation_sharp(&rest(), &rest(), &a, &b, 1.0).unwrap();
        assert!((c.value + a.dot(&b)).abs() < 1e-15);
        assert_eq!(c.abs_error, 0.0);
        let qa = on_shell(1.0, Vec3::new(0.0, 0.0, 2.0)).unwrap();
        let qb = on_shell(1.0, Vec3::new(0.0, 0.0, -2.0)).unwrap();
        let c = correlation_sharp(&qa, &qb, &a, &b, 1.0).unwrap();
        assert!((c.value + a.dot(&b)).abs() < 1e-15);
    }

    #[test]
    fn sharp_perpendicular_example() {
        let qa = on_shell(1.0, Vec3::x()).unwrap();
        let qb = on_shell(1.0, Vec3::y()).unwrap();
        let (a, b) = (Direction::z(), Direction::x());
        let c = correlation_sharp(&qa, &qb, &a, &b, 1.0).unwrap();
        let oracle = sharp_trace_ratio(&qa, &qb, &a, &b, 1.0).unwrap();
        assert!((c.value - oracle).abs() < 1e-14);
        // a·b = 0, (q_a×q_b) = ẑ, (a×b) = ŷ: only the (a·q_a)… terms could
        // contribute and a·q_a = 0, b·q_b = 0, so C = 0.
        assert!(c.value.abs() < 1e-15);

        let b = Direction::y();
        let c = correlation_sharp(&qa, &qb, &a, &b, 1.0).unwrap();
        // a×b = −x̂ ⟂ ẑ, and the second bracket is −(b·q_b)(a×q_a) = −ŷ, also ⟂ ẑ.
        assert!((c.value - sharp_trace_ratio(&qa, &qb, &a, &b, 1.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn sharp_localized_moments_cancel_volumes() {
        let qa = on_shell(1.0, Vec3::new(0.4, 0.1, 0.0)).unwrap();
        let qb = on_shell(1.0, Vec3::new(-0.2, 0.7, 0.3)).unwrap();
        let (a, b) = (Direction::z(), Direction::new(Vec3::new(1.0, 1.0, 0.0)).unwrap());
        let small = DetectorRegion::cube(Vec3::zeros(), 0.5).unwrap();
        let big = DetectorRegion::ball(Vec3::new(3.0, 0.0, 0.0), 7.0).unwrap();
        let (n1, d1) = sharp_localized_moments(&qa, &qb, &a, &b, 1.0, &small, &small).unwrap();
        let (n2, d2) = sharp_localized_moments(&qa, &qb, &a, &b, 1.0, &small, &big).unwrap();
        let c1 = normalized_correlation(n1, d1).unwrap();
        let c2 = normalized_correlation(n2, d2).unwrap();
        let closed = correlation_sharp(&qa, &qb, &a, &b, 1.0).unwrap().value;
        assert!((c1 - c2).abs() <= 1e-15);
        assert!((c1 - closed).abs() <= 1e-14);
        assert!(sharp_localized_moments(&qa, &qb, &a, &b, 1.0, &DetectorRegion::AllSpace, &small).is_err());
    }

    #[test]
    fn chsh_tsirelson_and_degenerate() {
        let corr = |a: &Direction, b: &Direction| correlation_sharp(&rest(), &rest(), a, b, 1.0);
        let at = |deg: f64| Direction::spherical(deg.to_radians(), 0.0);
        let s = chsh(corr, &at(0.0), &at(90.0), &at(45.0), &at(135.0)).unwrap();
        assert!((s.value + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let a = at(10.0);
        let b = at(77.0);
        let s = chsh(corr, &a, &a, &b, &b).unwrap();
        let c = corr(&a, &b).unwrap().value;
        assert!((s.value - 2.0 * c).abs() < 1e-15);
    }

    #[test]
    fn boosted_chsh_is_below_tsirelson() {
        let qa = on_shell(1.0, Vec3::new(0.0, 3.0, 0.0)).unwrap();
        let qb = on_shell(1.0, Vec3::new(3.0, 0.0, 0.0)).unwrap();
        let corr = |a: &Direction, b: &Direction| correlation_sharp(&qa, &qb, a, b, 1.0);
        let at = |deg: f64| Direction::spherical(deg.to_radians(), 0.0);
        let s = chsh(corr, &at(0.0), &at(90.0), &at(45.0), &at(135.0)).unwrap();
        assert!(s.value.abs() < 2.0 * 2f64.sqrt() - 1e-6, "{}", s.value);
    }

    #[test]
    fn fixed_direction_ratio_matches_general_assembly() {
        // Fixed-direction reduction fed into the general brackets must agree
        // with the closed fixed-direction ratio, including complex I₂.
        let det = DetectorRegion::cube(Vec3::zeros(), 1.0).unwrap();
        let n = Direction::new(Vec3::new(0.2, -0.7, 0.4)).unwrap();
        let m = Direction::new(Vec3::new(-0.3, 0.1, 0.9)).unwrap();
        let a = Direction::new(Vec3::new(1.0, 0.3, -0.2)).unwrap();
        let b = Direction::new(Vec3::new(0.1, 0.8, 0.5)).unwrap();
        let ray = |dir, v: [C64; 3]| crate::integrals::RayIntegrals {
            direction: dir,
            i1: v[0],
            i2: v[1],
            i3: v[2],
            errors: [0.0; 3],
        };
        let ra = [C64::new(3.1, 0.0), C64::new(0.7, 0.4), C64::new(0.9, 0.0)];
        let rb = [C64::new(2.5, 0.0), C64::new(-0.4, 0.2), C64::new(1.3, 0.0)];
        let method = crate::integrals::Method::Grid { points: 0 };
        let ia = MomentumIntegrals::from_ray(ray(n, ra), det, method, None);
        let ib = MomentumIntegrals::from_ray(ray(m, rb), det, method, None);
        let general = correlation_from_integrals(&ia, &ib, &a, &b, 1.0, Regime::GeneralFactorized).unwrap();
        let fixed = correlation_from_rays(&ia, &ib, &a, &b).unwrap();
        assert!((general.value - fixed.value).abs() < 1e-13, "{} vs {}", general.value, fixed.value);
    }
}
