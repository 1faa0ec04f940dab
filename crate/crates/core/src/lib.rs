//! Relativistic EPR spin correlations for two massive spin-½ particles in the
//! covariant singlet state, with each spin measurement conditioned on
//! Newton–Wigner localization of the particle inside a finite detector.
//!
//! Natural units `ħ = c = 1` throughout; momenta and energies are in units of
//! the particle mass, lengths in units of the inverse mass.
//!
//! - [`kinematics`]: on-shell four-momenta and directions
//! - [`amplitude`]: the singlet amplitude matrix and its spin traces
//! - [`detector`]: regions and the localization kernel `Δ_Ω`
//! - [`wavepacket`]: factorized momentum profiles
//! - [`integrals`]: the `I₁`, `I₂`, `I₃` integral families and a brute-force oracle
//! - [`correlator`]: the normalized correlation and CHSH combinations
//! - [`cli`]: configuration files, sweeps, and CSV/JSON output

pub mod amplitude;
pub mod cli;
pub mod correlator;
pub mod detector;
pub mod error;
pub mod integrals;
pub mod kinematics;
pub mod quadrature;
pub mod wavepacket;

pub use nalgebra::Complex;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type C64 = nalgebra::Complex<f64>;

pub use amplitude::{amplitude_matrix, trace_ab, trace_plain, SingletAmplitude};
pub use correlator::{
    chsh, correlation_fixed_directions, correlation_general, correlation_sharp, ChshResult,
    CorrelationResult, Regime,
};
pub use detector::{DetectorRegion, Volume};
pub use error::{Error, Result};
pub use integrals::{
    brute_force_pair_moments, fixed_direction_integrals, general_integrals, MomentumIntegrals,
    PairGrid, QuadratureSpec,
};
pub use kinematics::{minkowski_dot, on_shell, Direction, FourMomentum};
pub use quadrature::MomentumGrid;
pub use wavepacket::{FactorizedState, GaussianPacket, Isotropic, PacketState, RadialProfile};
