//! Run configuration files (TOML).

use std::collections::HashMap;

use nalgebra::Rotation3;
use serde::Deserialize;

use crate::detector::DetectorRegion;
use crate::integrals::QuadratureSpec;
use crate::wavepacket::{GaussianPacket, RadialProfile};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeKind {
    Sharp,
    FixedDirection,
    General,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub mass: f64,
    pub regime: RegimeKind,
    #[serde(default)]
    pub seed: Option<u64>,
    pub state: StateConfig,
    #[serde(default)]
    pub detector_a: DetectorConfig,
    #[serde(default)]
    pub detector_b: DetectorConfig,
    pub measurement: MeasurementConfig,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

/// State parameters; which fields are required depends on the regime.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    /// Sharp momenta (sharp regime).
    pub qa: Option<[f64; 3]>,
    pub qb: Option<[f64; 3]>,
    /// Ray directions (fixed-direction regime).
    pub dir_a: Option<[f64; 3]>,
    pub dir_b: Option<[f64; 3]>,
    /// Radial profiles: on the rays (fixed-direction) or isotropic (general).
    pub profile_a: Option<ProfileConfig>,
    pub profile_b: Option<ProfileConfig>,
    /// Three-dimensional Gaussian packets (general regime).
    pub packet_a: Option<PacketConfig>,
    pub packet_b: Option<PacketConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    Gaussian { k0: f64, sigma: f64 },
    Rectangular { kmin: f64, kmax: f64 },
}

impl ProfileConfig {
    pub fn to_profile(self) -> RadialProfile {
        match self {
            ProfileConfig::Gaussian { k0, sigma } => RadialProfile::Gaussian { k0, sigma },
            ProfileConfig::Rectangular { kmin, kmax } => RadialProfile::Rectangular { kmin, kmax },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub center: [f64; 3],
    pub sigma: f64,
}

impl PacketConfig {
    pub fn to_packet(self) -> GaussianPacket {
        GaussianPacket {
            center: Vec3::from(self.center),
            sigma: self.sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DetectorConfig {
    Box {
        #[serde(default)]
        center: [f64; 3],
        sides: [f64; 3],
        /// Rotation vector (axis × angle in radians) of the box axes.
        #[serde(default)]
        rotation: [f64; 3],
    },
    Ball {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
    },
    #[default]
    AllSpace,
}

impl DetectorConfig {
    pub fn to_region(self) -> DetectorRegion {
        match self {
            DetectorConfig::Box {
                center,
                sides,
                rotation,
            } => DetectorRegion::Box {
                center: Vec3::from(center),
                sides: Vec3::from(sides),
                orientation: Rotation3::new(Vec3::from(rotation)),
            },
            DetectorConfig::Ball { center, radius } => DetectorRegion::Ball {
                center: Vec3::from(center),
                radius,
            },
            DetectorConfig::AllSpace => DetectorRegion::AllSpace,
        }
    }
}

/// Measurement directions; vectors are normalized on load.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub a_prime: Option<[f64; 3]>,
    pub b_prime: Option<[f64; 3]>,
    /// Axis about which `a-angle` / `b-angle` sweeps rotate `a` and `b`.
    #[serde(default = "default_axis")]
    pub rotation_axis: [f64; 3],
}

fn default_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Rotation angle (radians) applied to `a` (and `a_prime`).
    AAngle,
    /// Rotation angle (radians) applied to `b` (and `b_prime`).
    BAngle,
    /// Momentum magnitude: `|q_a| = |q_b|`, or the centre of both profiles.
    Momentum,
    /// Factor applied to every detector length.
    DetectorScale,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::AAngle => "a-angle",
            SweepParameter::BAngle => "b-angle",
            SweepParameter::Momentum => "momentum",
            SweepParameter::DetectorScale => "detector-scale",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + h * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub tail: f64,
    pub target_rel_error: f64,
    pub max_refinements: usize,
    pub node_cap: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let spec = QuadratureSpec::default();
        QuadratureConfig {
            nodes: spec.nodes_1d,
            tail: spec.truncation_tail,
            target_rel_error: spec.target_rel_error,
            max_refinements: spec.max_refinements,
            node_cap: spec.node_cap,
        }
    }
}

impl QuadratureConfig {
    pub fn to_spec(self, seed: u64) -> QuadratureSpec {
        QuadratureSpec {
            nodes_1d: self.nodes,
            truncation_tail: self.tail,
            max_refinements: self.max_refinements,
            target_rel_error: self.target_rel_error,
            node_cap: self.node_cap,
            mc_seed: seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<String>,
    /// Adds a wall-time column; output is then no longer reproducible byte for byte.
    pub timing: bool,
}

impl RunConfig {
    /// Parses TOML; errors carry the line and column of the offending token.
    pub fn from_toml(source: &str) -> Result<Self, String> {
        toml::from_str(source).map_err(|e| e.to_string())
    }
}

/// 1-based line of the entry at a dotted `path` such as `detector_b.radius`
/// or `sweep.1.steps` (the second `[[sweep]]`), falling back to the deepest
/// prefix that can be found.
pub fn locate(source: &str, path: &str) -> Option<usize> {
    let parts: Vec<&str> = path.split('.').collect();
    let headers = table_headers(source);
    (1..=parts.len()).rev().find_map(|depth| {
        let table = parts[..depth - 1].join(".");
        let full = parts[..depth].join(".");
        let key = parts[depth - 1];
        let mut current = String::new();
        for (i, line) in source.lines().enumerate() {
            if let Some(name) = headers.get(&i) {
                if *name == full {
                    return Some(i + 1);
                }
                current = name.clone();
            } else if current == table {
                if let Some((lhs, _)) = line.trim().split_once('=') {
                    if lhs.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    })
}

/// Table names by 0-based line; array tables get their index appended.
fn table_headers(source: &str) -> HashMap<usize, String> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut headers = HashMap::new();
    for (i, line) in source.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(inner) = trimmed.strip_prefix("[[") {
            let name = inner.split("]]").next().unwrap_or("").trim().to_string();
            let n = counts.entry(name.clone()).or_insert(0);
            headers.insert(i, format!("{name}.{n}"));
            *n += 1;
        } else if let Some(inner) = trimmed.strip_prefix('[') {
            headers.insert(i, inner.split(']').next().unwrap_or("").trim().to_string());
        }
    }
    headers
}
