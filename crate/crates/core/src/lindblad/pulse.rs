use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the Stokes envelope behaves after its zero at `T/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesSign {
    /// `Ω2(t) = Ω2max |cos(πt/T)|`, a nonnegative envelope.
    #[default]
    Rectified,
    /// `Ω2(t) = Ω2max cos(πt/T)`, i.e. a π phase jump of the Stokes field at
    /// `T/2`. The dark state then evolves smoothly and returns as `−|0>`.
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PulseShape {
    /// Both fields on at their maximum for the whole duration.
    Constant,
    /// `Ω1 = Ω1max sin(πt/T)` with the Stokes field leading as a cosine.
    DoubleStirapSinusoid { stokes: StokesSign },
}

/// Time-dependent laser drive of the `|0> – |e> – |s>` ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule<T> {
    /// Duration `T` in μs.
    pub duration: T,
    pub omega1_max: T,
    pub omega2_max: T,
    /// Intermediate-state detuning Δ (energy of `|e>` in the rotating frame).
    pub delta: T,
    /// Extra energy of the Rydberg levels relative to two-photon resonance
    /// with the dressed `|+>` state, e.g. a light-shift compensation.
    pub two_photon_detuning: T,
    pub shape: PulseShape,
}

impl<T: Real> PulseSchedule<T> {
    fn validated(self) -> Result<Self> {
        let finite = [self.duration, self.omega1_max, self.omega2_max, self.delta, self.two_photon_detuning]
            .iter()
            .all(|x| x.is_finite_value());
        if !finite {
            return Err(Error::Config("pulse parameters must be finite".into()));
        }
        if !(self.duration > T::zero()) {
            return Err(Error::Config("pulse duration must be positive".into()));
        }
        if self.omega1_max < T::zero() || self.omega2_max < T::zero() {
            return Err(Error::Config("Rabi frequencies must be >= 0".into()));
        }
        Ok(self)
    }

    pub fn constant(omega1: T, omega2: T, delta: T, duration: T) -> Result<Self> {
        Self {
            duration,
            omega1_max: omega1,
            omega2_max: omega2,
            delta,
            two_photon_detuning: T::zero(),
            shape: PulseShape::Constant,
        }
        .validated()
    }

    pub fn double_stirap(omega1_max: T, omega2_max: T, delta: T, duration: T, stokes: StokesSign) -> Result<Self> {
        Self {
            duration,
            omega1_max,
            omega2_max,
            delta,
            two_photon_detuning: T::zero(),
            shape: PulseShape::DoubleStirapSinusoid { stokes },
        }
        .validated()
    }

    pub fn with_two_photon_detuning(mut self, detuning: T) -> Result<Self> {
        self.two_photon_detuning = detuning;
        self.validated()
    }

    pub fn omega1(&self, t: T) -> T {
        match self.shape {
            PulseShape::Constant => self.omega1_max,
            PulseShape::DoubleStirapSinusoid { .. } => self.omega1_max * (T::pi() * t / self.duration).sin(),
        }
    }

    pub fn omega2(&self, t: T) -> T {
        match self.shape {
            PulseShape::Constant => self.omega2_max,
            PulseShape::DoubleStirapSinusoid { stokes } => {
                let c = (T::pi() * t / self.duration).cos();
                match stokes {
                    StokesSign::Rectified => self.omega2_max * c.abs(),
                    StokesSign::Signed => self.omega2_max * c,
                }
            }
        }
    }

    /// Largest coupling or detuning scale in the drive (rad/μs).
    pub fn omega_max(&self) -> T {
        self.omega1_max.max(self.omega2_max).max(self.delta.abs())
    }

    /// Times at which an envelope has a kink, so an integrator should land
    /// on them.
    pub fn kinks(&self) -> Vec<T> {
        match self.shape {
            PulseShape::DoubleStirapSinusoid { stokes: StokesSign::Rectified } => vec![self.duration * T::lit(0.5)],
            _ => Vec::new(),
        }
    }
}
