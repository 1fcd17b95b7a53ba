//! Double-STIRAP controlled-phase gate: pulse schedule, simulation and the
//! tomography-style analysis used to extract fidelity.

mod analysis;
mod presets;

pub use analysis::{
    analyzer_pulse, conditional_phase_scan, local_rotation, parity_oscillation, qubit_block, uniform_phases,
    ConditionalPhaseScan, ParityOscillation,
};
pub use presets::{GateScenario, CURRENT_DELTA_MHZ, CURRENT_DELTA_MW_MHZ, CURRENT_OMEGA_MW_MHZ, IMPROVED_OMEGA_MW_MHZ, SCENARIO_STOKES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::simpson;
use crate::lindblad::{evolve, uniform_grid, EvolveOptions, NamedObservable, NoiseModel, PulseSchedule, Setup, StokesSign};
use crate::qcore::{basis_ket, product_ket, DensityState, Level, LevelScheme, Operator, OperatorKind};
use crate::scalar::{C, Real};
use crate::spectra::{dressed_states, interaction_strength, MicrowaveField, RydbergPair};

/// How the gate duration follows from the interaction strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateTimeConvention {
    /// `T = 8π/(3V)`: the sinusoidal double-STIRAP pulse accumulates
    /// `V ∫ρ_rr dt = π` with `∫ρ_rr dt = 3T/8`.
    #[default]
    StirapPhase,
    /// `T = π/V`: full-excitation phase gate.
    FullExcitation,
}

impl GateTimeConvention {
    pub fn duration<T: Real>(self, v: T) -> Result<T> {
        if !(v > T::zero()) || !v.is_finite_value() {
            return Err(Error::Config("interaction strength must be positive".into()));
        }
        Ok(match self {
            GateTimeConvention::StirapPhase => T::lit(8.0) * T::pi() / (T::lit(3.0) * v),
            GateTimeConvention::FullExcitation => T::pi() / v,
        })
    }
}

/// Gate duration `8π/(3V)` (μs for `V` in rad/μs).
pub fn gate_time<T: Real>(v: T) -> Result<T> {
    GateTimeConvention::StirapPhase.duration(v)
}

/// `Ω1 = Ω1max sin(πt/T)`, `Ω2 = Ω2max |cos(πt/T)|`: the Stokes field leads,
/// transfers `|0> → |r>` by `T/2` and back by `T`.
pub fn double_stirap_schedule<T: Real>(omega1_max: T, omega2_max: T, delta: T, duration: T) -> Result<PulseSchedule<T>> {
    PulseSchedule::double_stirap(omega1_max, omega2_max, delta, duration, StokesSign::Rectified)
}

/// Physical parameters of one gate run.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams<T> {
    pub omega1: T,
    pub omega2: T,
    /// Intermediate-state detuning Δ.
    pub delta: T,
    pub mw: MicrowaveField<T>,
    pub pair: RydbergPair,
    pub scheme: LevelScheme<T>,
    pub stokes: StokesSign,
    /// Overrides the `8π/(3V)` gate time.
    pub duration: Option<T>,
    /// Points of the trajectory grid used for the phase integral.
    pub samples: usize,
}

impl<T: Real> GateParams<T> {
    /// Dressed interaction `V` seen by `|rr>`.
    pub fn interaction(&self) -> T {
        interaction_strength(&self.mw, &self.pair)
    }

    pub fn duration(&self) -> Result<T> {
        match self.duration {
            Some(t) if t > T::zero() => Ok(t),
            Some(_) => Err(Error::Config("gate duration must be positive".into())),
            None => gate_time(self.interaction()),
        }
    }

    pub fn schedule(&self) -> Result<PulseSchedule<T>> {
        PulseSchedule::double_stirap(self.omega1, self.omega2, self.delta, self.duration()?, self.stokes)
    }
}

/// Outcome of a simulated gate.
#[derive(Debug, Clone)]
pub struct GateResult<T: Real> {
    pub final_state: DensityState<T>,
    pub stokes: StokesSign,
    pub duration: T,
    /// Interaction `V` used for the phase integral.
    pub interaction: T,
    pub times: Vec<T>,
    /// `<rr|ρ(t)|rr>` with `|r>` the laser-coupled dressed state.
    pub rr_population: Vec<T>,
    /// `V ∫ ρ_rr dt` normalised to the initial `|00>` weight, so that an
    /// ideal gate gives π.
    pub controlled_phase: T,
    /// Population `P` of the Bell-frame `|00>`, `|11>` after the local rotation.
    pub population: T,
    /// Parity-oscillation amplitude `C`.
    pub coherence: T,
    /// `(P + C)/2`.
    pub fidelity: T,
    pub shots: usize,
}

impl<T: Real> GateResult<T> {
    pub fn infidelity(&self) -> T {
        T::one() - self.fidelity
    }
}

/// Analyzer phases used for the fidelity stored in [`GateResult`].
pub const DEFAULT_ANALYZER_PHASES: usize = 48;

/// Laser-coupled Rydberg state: the dressed `|+>`, or `|s>` without dressing.
pub fn rydberg_ket<T: Real>(mw: &MicrowaveField<T>) -> nalgebra::DVector<C<T>> {
    match dressed_states(mw) {
        Ok(d) => {
            basis_ket::<T>(Level::S) * C::new(d.plus.c_s, T::zero()) + basis_ket::<T>(Level::P) * C::new(d.plus.c_p, T::zero())
        }
        Err(_) => basis_ket(Level::S),
    }
}

const INITIAL_00_WEIGHT: f64 = 0.25;

/// `(|0> + |1>)(|0> + |1>)/2` as a two-ion density matrix.
pub fn initial_state<T: Real>() -> Result<DensityState<T>> {
    let plus = basis_ket::<T>(Level::Q0) + basis_ket::<T>(Level::Q1);
    DensityState::from_ket(&product_ket(&plus, &plus))
}

/// Runs the double-STIRAP gate on `(|0> + |1>)^⊗2/2` and analyses the result.
pub fn run_gate<T: Real>(params: &GateParams<T>, noise: &NoiseModel<T>, opts: &EvolveOptions<T>) -> Result<GateResult<T>> {
    if params.samples < 3 {
        return Err(Error::Config("gate trajectory needs at least 3 samples".into()));
    }
    let pulse = params.schedule()?;
    let duration = pulse.duration;
    let interaction = params.interaction();
    let setup = Setup::new(params.scheme, params.mw, &params.pair, 2)?;
    let r = rydberg_ket(&params.mw);
    let rr = product_ket(&r, &r);
    let rr_op = Operator::new(&rr * rr.adjoint(), OperatorKind::Observable)?;
    let observables: Vec<NamedObservable<T>> = vec![("rr".into(), rr_op)];
    let grid = uniform_grid(duration, params.samples);
    let opts = EvolveOptions { keep_states: false, ..opts.clone() };
    let traj = evolve(&initial_state()?, &pulse, &setup, noise, &grid, &observables, &opts)?;

    let rr_population = traj.observable("rr").unwrap_or_default().to_vec();
    // Only the |00> quarter of the initial superposition reaches |rr>.
    let h = grid[1] - grid[0];
    let controlled_phase = interaction * simpson(&rr_population, h) / T::lit(INITIAL_00_WEIGHT);
    let final_state = traj.final_state().clone();
    let parity = parity_oscillation(&final_state, params.stokes, &uniform_phases(DEFAULT_ANALYZER_PHASES))?;
    log::debug!(
        "gate T = {:.4} μs, φ = {:.4}, P = {:.4}, C = {:.4}, F = {:.4} ({} steps)",
        duration.to_f64_lossy(),
        controlled_phase.to_f64_lossy(),
        parity.population.to_f64_lossy(),
        parity.coherence.to_f64_lossy(),
        parity.fidelity.to_f64_lossy(),
        traj.stats.accepted
    );
    Ok(GateResult {
        final_state,
        stokes: params.stokes,
        duration,
        interaction,
        times: grid,
        rr_population,
        controlled_phase,
        population: parity.population,
        coherence: parity.coherence,
        fidelity: parity.fidelity,
        shots: traj.shots,
    })
}
