//! Turning a configuration into evaluated rows.

use std::time::Instant;

use nalgebra::{Rotation3, Unit};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RegimeKind, RunConfig, SweepParameter};
use crate::correlator::{
    chsh, correlation_from_integrals, correlation_from_rays, correlation_sharp, CorrelationResult, Regime,
};
use crate::detector::DetectorRegion;
use crate::error::{Error, Result};
use crate::integrals::{
    fixed_direction_integrals, general_integrals, minimum_nodes_fixed, minimum_nodes_general, MomentumIntegrals,
    QuadratureSpec,
};
use crate::kinematics::{on_shell, Direction};
use crate::wavepacket::{GaussianPacket, Isotropic, MomentumDomain, MomentumProfile, RadialProfile};
use crate::{Vec3, C64};

/// What a run evaluates at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Correlation,
    Chsh,
}

/// One configuration problem, addressed by its dotted key path.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A three-dimensional momentum profile for the general regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Isotropic(RadialProfile),
    Packet(GaussianPacket),
}

impl MomentumProfile for Side {
    fn amplitude(&self, k: &Vec3) -> C64 {
        match self {
            Side::Isotropic(p) => Isotropic(*p).amplitude(k),
            Side::Packet(p) => p.amplitude(k),
        }
    }

    fn domain(&self, mass_tail: f64) -> Result<MomentumDomain> {
        match self {
            Side::Isotropic(p) => Isotropic(*p).domain(mass_tail),
            Side::Packet(p) => p.domain(mass_tail),
        }
    }
}

/// State content of a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointState {
    Sharp { qa: Vec3, qb: Vec3 },
    Fixed { dir_a: Vec3, dir_b: Vec3, profile_a: RadialProfile, profile_b: RadialProfile },
    General { side_a: Side, side_b: Side },
}

/// Fully resolved inputs of one output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    pub a_angle: f64,
    pub b_angle: f64,
    pub momentum: Option<f64>,
    pub detector_scale: f64,
    pub a: Vec3,
    pub b: Vec3,
    pub a_prime: Option<Vec3>,
    pub b_prime: Option<Vec3>,
    pub state: PointState,
    pub det_a: DetectorRegion,
    pub det_b: DetectorRegion,
}

fn vec(v: [f64; 3]) -> Vec3 {
    Vec3::from(v)
}

fn nonzero(v: [f64; 3]) -> bool {
    let v = vec(v);
    v.iter().all(|c| c.is_finite()) && v.norm() > 0.0
}

fn finite(v: [f64; 3]) -> bool {
    v.iter().all(|c| c.is_finite())
}

fn unit(v: [f64; 3]) -> Vec3 {
    vec(v).normalize()
}

/// Checks everything that can be checked without integrating.
pub fn validate(cfg: &RunConfig, quantity: Quantity, sweep: bool) -> Vec<Issue> {
    let mut issues = Vec::new();
    if !(cfg.mass > 0.0 && cfg.mass.is_finite()) {
        issues.push(Issue::new("mass", format!("must be > 0, got {}", cfg.mass)));
    }

    let m = &cfg.measurement;
    for (name, v) in [("a", Some(m.a)), ("b", Some(m.b)), ("a_prime", m.a_prime), ("b_prime", m.b_prime)] {
        if let Some(v) = v {
            if !nonzero(v) {
                issues.push(Issue::new(format!("measurement.{name}"), "must be a finite nonzero vector"));
            }
        }
    }
    if quantity == Quantity::Chsh {
        for (name, v) in [("a_prime", m.a_prime), ("b_prime", m.b_prime)] {
            if v.is_none() {
                issues.push(Issue::new(format!("measurement.{name}"), "required by the chsh command"));
            }
        }
    }

    let s = &cfg.state;
    let unused = |issues: &mut Vec<Issue>, present: &[(&str, bool)]| {
        for (name, p) in present {
            if *p {
                issues.push(Issue::new(format!("state.{name}"), format!("not used by the {:?} regime", cfg.regime)));
            }
        }
    };
    match cfg.regime {
        RegimeKind::Sharp => {
            for (name, v) in [("qa", s.qa), ("qb", s.qb)] {
                match v {
                    None => issues.push(Issue::new(format!("state.{name}"), "required by the sharp regime")),
                    Some(v) if !finite(v) => issues.push(Issue::new(format!("state.{name}"), "must be finite")),
                    _ => {}
                }
            }
            unused(
                &mut issues,
                &[
                    ("dir_a", s.dir_a.is_some()),
                    ("dir_b", s.dir_b.is_some()),
                    ("profile_a", s.profile_a.is_some()),
                    ("profile_b", s.profile_b.is_some()),
                    ("packet_a", s.packet_a.is_some()),
                    ("packet_b", s.packet_b.is_some()),
                ],
            );
        }
        RegimeKind::FixedDirection => {
            for (name, v) in [("dir_a", s.dir_a), ("dir_b", s.dir_b)] {
                match v {
                    None => issues.push(Issue::new(format!("state.{name}"), "required by the fixed-direction regime")),
                    Some(v) if !nonzero(v) => {
                        issues.push(Issue::new(format!("state.{name}"), "must be a finite nonzero vector"))
                    }
                    _ => {}
                }
            }
            for (name, p) in [("profile_a", s.profile_a), ("profile_b", s.profile_b)] {
                match p {
                    None => issues.push(Issue::new(format!("state.{name}"), "required by the fixed-direction regime")),
                    Some(p) => {
                        if let Err(e) = p.to_profile().validate() {
                            issues.push(Issue::new(format!("state.{name}"), e.to_string()));
                        }
                    }
                }
            }
            unused(
                &mut issues,
                &[
                    ("qa", s.qa.is_some()),
                    ("qb", s.qb.is_some()),
                    ("packet_a", s.packet_a.is_some()),
                    ("packet_b", s.packet_b.is_some()),
                ],
            );
        }
        RegimeKind::General => {
            for (side, profile, packet) in [("a", s.profile_a, s.packet_a), ("b", s.profile_b, s.packet_b)] {
                match (profile, packet) {
                    (Some(p), None) => {
                        if let Err(e) = p.to_profile().validate() {
                            issues.push(Issue::new(format!("state.profile_{side}"), e.to_string()));
                        }
                    }
                    (None, Some(p)) => {
                        if let Err(e) = GaussianPacket::new(vec(p.center), p.sigma) {
                            issues.push(Issue::new(format!("state.packet_{side}"), e.to_string()));
                        }
                    }
                    _ => issues.push(Issue::new(
                        format!("state.packet_{side}"),
                        format!("the general regime needs exactly one of profile_{side} or packet_{side}"),
                    )),
                }
            }
            unused(
                &mut issues,
                &[
                    ("qa", s.qa.is_some()),
                    ("qb", s.qb.is_some()),
                    ("dir_a", s.dir_a.is_some()),
                    ("dir_b", s.dir_b.is_some()),
                ],
            );
        }
    }

    for (name, det) in [("detector_a", cfg.detector_a), ("detector_b", cfg.detector_b)] {
        let region = det.to_region();
        if let Err(e) = region.validate() {
            issues.push(Issue::new(detector_key(name, &e), e.to_string()));
        }
        if region.is_all_space() && cfg.regime != RegimeKind::Sharp {
            issues.push(Issue::new(
                name,
                "an all-space detector has a distributional kernel; only the sharp regime accepts it",
            ));
        }
    }

    let spec = cfg.quadrature.to_spec(0);
    if cfg.regime != RegimeKind::Sharp {
        if let Err(e) = spec.validate() {
            issues.push(Issue::new(quadrature_key(&e), e.to_string()));
        }
    }

    if sweep {
        if cfg.sweep.is_empty() {
            issues.push(Issue::new("sweep", "the sweep command needs at least one [[sweep]] axis"));
        }
        if cfg.sweep.len() > 2 {
            issues.push(Issue::new("sweep", format!("at most two sweep axes are supported, got {}", cfg.sweep.len())));
        }
        for (i, axis) in cfg.sweep.iter().enumerate() {
            let path = format!("sweep.{i}");
            if cfg.sweep[..i].iter().any(|o| o.parameter == axis.parameter) {
                issues.push(Issue::new(&path, format!("parameter {} appears twice", axis.parameter.name())));
            }
            if axis.steps < 1 {
                issues.push(Issue::new(format!("{path}.steps"), "must be ≥ 1"));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                issues.push(Issue::new(&path, "start and stop must be finite"));
                continue;
            }
            let low = axis.start.min(axis.stop);
            match axis.parameter {
                SweepParameter::DetectorScale if !(low > 0.0) => {
                    issues.push(Issue::new(&path, format!("detector scale must stay > 0, range starts at {low}")))
                }
                SweepParameter::Momentum if low < 0.0 => {
                    issues.push(Issue::new(&path, format!("momentum must stay ≥ 0, range starts at {low}")))
                }
                SweepParameter::AAngle | SweepParameter::BAngle if !nonzero(m.rotation_axis) => {
                    issues.push(Issue::new("measurement.rotation_axis", "must be a finite nonzero vector"))
                }
                _ => {}
            }
            if axis.parameter == SweepParameter::Momentum {
                let zero_dir = match cfg.regime {
                    RegimeKind::Sharp => [s.qa, s.qb].iter().any(|q| q.is_some_and(|q| !nonzero(q))),
                    RegimeKind::General => [s.packet_a, s.packet_b].iter().any(|p| p.is_some_and(|p| !nonzero(p.center))),
                    RegimeKind::FixedDirection => false,
                };
                if zero_dir {
                    issues.push(Issue::new(&path, "a momentum sweep needs nonzero momentum directions"));
                }
            }
        }
    }

    if cfg.regime != RegimeKind::Sharp && spec.validate().is_ok() {
        if let Ok(points) = points(cfg, sweep) {
            let needed = points
                .iter()
                .flat_map(|p| side_minimum_nodes(p, spec.truncation_tail))
                .filter_map(|n| n.ok())
                .max();
            if let Some(needed) = needed {
                if spec.nodes_1d < needed {
                    issues.push(Issue::new(
                        "quadrature.nodes",
                        format!(
                            "{} is below the oscillation bound 8 + ceil(span·L/π); minimum admissible value is {needed}",
                            spec.nodes_1d
                        ),
                    ));
                }
            }
        }
    }
    issues
}

fn detector_key(name: &str, e: &Error) -> String {
    let text = e.to_string();
    for (needle, key) in [("radius", "radius"), ("side", "sides"), ("cent", "center")] {
        if text.contains(needle) {
            return format!("{name}.{key}");
        }
    }
    name.to_string()
}

fn quadrature_key(e: &Error) -> String {
    let text = e.to_string();
    for (needle, key) in [
        ("nodes_1d", "nodes"),
        ("truncation_tail", "tail"),
        ("target_rel_error", "target_rel_error"),
        ("node_cap", "node_cap"),
    ] {
        if text.contains(needle) {
            return format!("quadrature.{key}");
        }
    }
    "quadrature".into()
}

/// Minimum node count for each side of a point; sides with invalid
/// detectors or profiles yield errors.
pub fn side_minimum_nodes(p: &Point, tail: f64) -> Vec<Result<usize>> {
    let checked = |det: &DetectorRegion| det.validate().map(|_| *det);
    match &p.state {
        PointState::Sharp { .. } => vec![],
        PointState::Fixed {
            dir_a,
            dir_b,
            profile_a,
            profile_b,
        } => [(profile_a, dir_a, &p.det_a), (profile_b, dir_b, &p.det_b)]
            .into_iter()
            .map(|(profile, dir, det)| {
                profile.validate()?;
                minimum_nodes_fixed(profile, &Direction::new(*dir)?, &checked(det)?, tail)
            })
            .collect(),
        PointState::General { side_a, side_b } => [(side_a, &p.det_a), (side_b, &p.det_b)]
            .into_iter()
            .map(|(side, det)| minimum_nodes_general(side, &checked(det)?, tail))
            .collect(),
    }
}

/// Expands the sweep axes (first axis slowest) into resolved points.
/// Without `sweep` only the base configuration is produced.
pub fn points(cfg: &RunConfig, sweep: bool) -> Result<Vec<Point>> {
    let axes: &[_] = if sweep { &cfg.sweep } else { &[] };
    let mut combos: Vec<Vec<(SweepParameter, f64)>> = vec![vec![]];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                axis.values().into_iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push((axis.parameter, v));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .enumerate()
        .map(|(index, params)| resolve(cfg, index, &params))
        .collect()
}

fn resolve(cfg: &RunConfig, index: usize, params: &[(SweepParameter, f64)]) -> Result<Point> {
    let get = |p: SweepParameter| params.iter().find(|(q, _)| *q == p).map(|(_, v)| *v);
    let a_angle = get(SweepParameter::AAngle).unwrap_or(0.0);
    let b_angle = get(SweepParameter::BAngle).unwrap_or(0.0);
    let momentum = get(SweepParameter::Momentum);
    let detector_scale = get(SweepParameter::DetectorScale).unwrap_or(1.0);

    let m = &cfg.measurement;
    let axis = vec(m.rotation_axis);
    let rot = |angle: f64| {
        if angle == 0.0 {
            Rotation3::identity()
        } else {
            Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle)
        }
    };
    let (ra, rb) = (rot(a_angle), rot(b_angle));

    let missing = |name: &str| Error::Domain(format!("state.{name} is missing"));
    let s = &cfg.state;
    let state = match cfg.regime {
        RegimeKind::Sharp => {
            let (mut qa, mut qb) = (vec(s.qa.ok_or(missing("qa"))?), vec(s.qb.ok_or(missing("qb"))?));
            if let Some(k) = momentum {
                qa = qa.normalize() * k;
                qb = qb.normalize() * k;
            }
            PointState::Sharp { qa, qb }
        }
        RegimeKind::FixedDirection => {
            let mut profile_a = s.profile_a.ok_or(missing("profile_a"))?.to_profile();
            let mut profile_b = s.profile_b.ok_or(missing("profile_b"))?.to_profile();
            if let Some(k) = momentum {
                profile_a = profile_a.recentered(k);
                profile_b = profile_b.recentered(k);
            }
            PointState::Fixed {
                dir_a: unit(s.dir_a.ok_or(missing("dir_a"))?),
                dir_b: unit(s.dir_b.ok_or(missing("dir_b"))?),
                profile_a,
                profile_b,
            }
        }
        RegimeKind::General => {
            let side = |profile: Option<super::config::ProfileConfig>,
                        packet: Option<super::config::PacketConfig>,
                        name: &str|
             -> Result<Side> {
                match (profile, packet) {
                    (Some(p), _) => {
                        let p = p.to_profile();
                        Ok(Side::Isotropic(momentum.map_or(p, |k| p.recentered(k))))
                    }
                    (None, Some(p)) => {
                        let mut packet = p.to_packet();
                        if let Some(k) = momentum {
                            packet.center = packet.center.normalize() * k;
                        }
                        Ok(Side::Packet(packet))
                    }
                    (None, None) => Err(missing(name)),
                }
            };
            PointState::General {
                side_a: side(s.profile_a, s.packet_a, "profile_a")?,
                side_b: side(s.profile_b, s.packet_b, "profile_b")?,
            }
        }
    };

    Ok(Point {
        index,
        a_angle,
        b_angle,
        momentum,
        detector_scale,
        a: ra * unit(m.a),
        b: rb * unit(m.b),
        a_prime: m.a_prime.map(|v| ra * unit(v)),
        b_prime: m.b_prime.map(|v| rb * unit(v)),
        state,
        det_a: cfg.detector_a.to_region().scaled(detector_scale),
        det_b: cfg.detector_b.to_region().scaled(detector_scale),
    })
}

/// One output row. Column order is fixed; `a_prime_*`, `b_prime_*` appear
/// only for CHSH runs and `wall_time_s` only when timing is requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub quantity: &'static str,
    pub regime: &'static str,
    pub mass: f64,
    pub a_angle: f64,
    pub b_angle: f64,
    pub detector_scale: f64,
    pub momentum_a: f64,
    pub momentum_b: f64,
    pub ka_x: f64,
    pub ka_y: f64,
    pub ka_z: f64,
    pub kb_x: f64,
    pub kb_y: f64,
    pub kb_z: f64,
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    pub b_x: f64,
    pub b_y: f64,
    pub b_z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime_z: Option<f64>,
    pub value: f64,
    pub abs_error: f64,
    /// `ok`, `warning` (accuracy target missed) or `error` (no value).
    pub status: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Row {
    pub fn flagged(&self) -> bool {
        self.status != "ok"
    }
}

/// Central momentum vector and magnitude for each side.
fn central_momenta(state: &PointState) -> ([Vec3; 2], [f64; 2]) {
    match state {
        PointState::Sharp { qa, qb } => ([*qa, *qb], [qa.norm(), qb.norm()]),
        PointState::Fixed {
            dir_a,
            dir_b,
            profile_a,
            profile_b,
        } => {
            let (ka, kb) = (profile_a.center(), profile_b.center());
            ([dir_a * ka, dir_b * kb], [ka, kb])
        }
        PointState::General { side_a, side_b } => {
            let one = |s: &Side| match s {
                Side::Isotropic(p) => (Vec3::zeros(), p.center()),
                Side::Packet(p) => (p.center, p.center.norm()),
            };
            let ((va, ka), (vb, kb)) = (one(side_a), one(side_b));
            ([va, vb], [ka, kb])
        }
    }
}

enum Prepared {
    Sharp,
    Rays(MomentumIntegrals, MomentumIntegrals),
    General(MomentumIntegrals, MomentumIntegrals),
}

fn prepare(p: &Point, mass: f64, spec: &QuadratureSpec) -> Result<Prepared> {
    Ok(match &p.state {
        PointState::Sharp { .. } => Prepared::Sharp,
        PointState::Fixed {
            dir_a,
            dir_b,
            profile_a,
            profile_b,
        } => Prepared::Rays(
            fixed_direction_integrals(profile_a, &Direction::new(*dir_a)?, &p.det_a, mass, spec)?,
            fixed_direction_integrals(profile_b, &Direction::new(*dir_b)?, &p.det_b, mass, spec)?,
        ),
        PointState::General { side_a, side_b } => Prepared::General(
            general_integrals(side_a, &p.det_a, mass, spec)?,
            general_integrals(side_b, &p.det_b, mass, spec)?,
        ),
    })
}

fn correlation(
    prepared: &Prepared,
    p: &Point,
    mass: f64,
    a: &Direction,
    b: &Direction,
) -> Result<CorrelationResult> {
    match (prepared, &p.state) {
        (Prepared::Sharp, PointState::Sharp { qa, qb }) => {
            correlation_sharp(&on_shell(mass, *qa)?, &on_shell(mass, *qb)?, a, b, mass)
        }
        (Prepared::Rays(ia, ib), _) => correlation_from_rays(ia, ib, a, b),
        (Prepared::General(ia, ib), _) => correlation_from_integrals(ia, ib, a, b, mass, Regime::GeneralFactorized),
        _ => unreachable!("prepared integrals match the point state"),
    }
}

fn evaluate(p: &Point, mass: f64, spec: &QuadratureSpec, quantity: Quantity) -> Result<(f64, f64, Option<String>)> {
    let prepared = prepare(p, mass, spec)?;
    let (a, b) = (Direction::new(p.a)?, Direction::new(p.b)?);
    match quantity {
        Quantity::Correlation => {
            let r = correlation(&prepared, p, mass, &a, &b)?;
            Ok((r.value, r.abs_error, r.warning))
        }
        Quantity::Chsh => {
            let missing = || Error::Domain("CHSH needs a_prime and b_prime".into());
            let a2 = Direction::new(p.a_prime.ok_or_else(missing)?)?;
            let b2 = Direction::new(p.b_prime.ok_or_else(missing)?)?;
            let r = chsh(|x, y| correlation(&prepared, p, mass, x, y), &a, &a2, &b, &b2)?;
            Ok((r.value, r.abs_error, r.warning))
        }
    }
}

/// Evaluates one point into a row.
pub fn evaluate_row(
    p: &Point,
    regime: RegimeKind,
    mass: f64,
    spec: &QuadratureSpec,
    quantity: Quantity,
    timing: bool,
) -> Row {
    let start = Instant::now();
    let outcome = evaluate(p, mass, spec, quantity);
    let elapsed = start.elapsed().as_secs_f64();
    let ([ka, kb], [ma, mb]) = central_momenta(&p.state);
    let (value, abs_error, status, message) = match outcome {
        Ok((v, e, None)) => (v, e, "ok", String::new()),
        Ok((v, e, Some(w))) => (v, e, "warning", w),
        Err(e) => (f64::NAN, f64::NAN, "error", e.to_string()),
    };
    let prime = |v: Option<Vec3>, i: usize| match quantity {
        Quantity::Chsh => v.map(|v| v[i]),
        Quantity::Correlation => None,
    };
    Row {
        index: p.index,
        quantity: match quantity {
            Quantity::Correlation => "correlation",
            Quantity::Chsh => "chsh",
        },
        regime: match regime {
            RegimeKind::Sharp => "sharp",
            RegimeKind::FixedDirection => "fixed-direction",
            RegimeKind::General => "general",
        },
        mass,
        a_angle: p.a_angle,
        b_angle: p.b_angle,
        detector_scale: p.detector_scale,
        momentum_a: ma,
        momentum_b: mb,
        ka_x: ka.x,
        ka_y: ka.y,
        ka_z: ka.z,
        kb_x: kb.x,
        kb_y: kb.y,
        kb_z: kb.z,
        a_x: p.a.x,
        a_y: p.a.y,
        a_z: p.a.z,
        b_x: p.b.x,
        b_y: p.b.y,
        b_z: p.b.z,
        a_prime_x: prime(p.a_prime, 0),
        a_prime_y: prime(p.a_prime, 1),
        a_prime_z: prime(p.a_prime, 2),
        b_prime_x: prime(p.b_prime, 0),
        b_prime_y: prime(p.b_prime, 1),
        b_prime_z: prime(p.b_prime, 2),
        value,
        abs_error,
        status,
        message,
        wall_time_s: timing.then_some(elapsed),
    }
}

/// Evaluates every point in parallel; rows come back in point order.
pub fn run(cfg: &RunConfig, quantity: Quantity, sweep: bool, seed: u64, timing: bool) -> Result<Vec<Row>> {
    let spec = cfg.quadrature.to_spec(seed);
    let points = points(cfg, sweep)?;
    Ok(points
        .par_iter()
        .map(|p| evaluate_row(p, cfg.regime, cfg.mass, &spec, quantity, timing))
        .collect())
}
