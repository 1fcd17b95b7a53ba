//! Simulation toolkit for Rydberg-interaction entangling gates between
//! trapped ions.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the bottom of this file fix `f64`, which every experiment driver uses.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bbr;
pub mod budget;
pub mod error;
pub mod fit;
pub mod gate;
pub mod lindblad;
pub mod phonon;
pub mod qcore;
pub mod scalar;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use qcore::{DensityState, Level, LevelScheme, Operator, OperatorKind};
pub use scalar::{Real, C};
pub use spectra::{MicrowaveField, RydbergPair, StirapFields};

/// Double-precision aliases used by the experiment drivers.
pub type DensityState64 = qcore::DensityState<f64>;
pub type Operator64 = qcore::Operator<f64>;
pub type LevelScheme64 = qcore::LevelScheme<f64>;
pub type MicrowaveField64 = spectra::MicrowaveField<f64>;
pub type NoiseModel64 = lindblad::NoiseModel<f64>;
pub type GateParams64 = gate::GateParams<f64>;
pub type GateResult64 = gate::GateResult<f64>;
pub type IonCrystal64 = phonon::IonCrystal<f64>;
pub type ModeSpectrum64 = phonon::ModeSpectrum<f64>;
pub type ErrorBudget64 = budget::ErrorBudget<f64>;
