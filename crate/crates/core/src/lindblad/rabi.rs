//! Constant-drive Rabi oscillations of one and two ions between `|0>` and
//! the dressed Rydberg state, with tunable interaction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve, uniform_grid, EvolveOptions, NamedObservable};
use super::hamiltonian::Setup;
use super::noise::NoiseModel;
use super::pulse::PulseSchedule;
use crate::error::{Error, Result};
use crate::fit::{fit_damped_cosine, fit_damped_cosine_with_overtone};
use crate::qcore::{basis_ket, product_ket, DensityState, Level, LevelScheme, Operator, OperatorKind, LEVELS};
use crate::scalar::{cr, Real};
use crate::spectra::{dressed_states, interaction_strength, MicrowaveField, RydbergPair};
use crate::units;

/// Parameters of one Rabi panel.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiPanel<T> {
    pub label: String,
    pub omega1: T,
    pub omega2: T,
    /// Intermediate-state detuning Δ.
    pub delta: T,
    pub mw: MicrowaveField<T>,
    pub pair: RydbergPair,
    pub scheme: LevelScheme<T>,
    pub noise: NoiseModel<T>,
    /// Pulse durations are sampled on `[0, duration]` (μs).
    pub duration: T,
    pub samples: usize,
    /// Shift the Rydberg levels to cancel the differential light shift.
    pub compensate_light_shift: bool,
}

/// Curves and fitted frequencies of one panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiCurves<T> {
    pub label: String,
    pub times: Vec<T>,
    /// Single ion: probability of having left `|0>`.
    pub p_single: Vec<T>,
    /// Two ions: both have left `|0>`.
    pub p_rr: Vec<T>,
    /// Two ions: exactly one has left `|0>`.
    pub p_symmetric: Vec<T>,
    /// Expected single-ion two-photon Rabi frequency Ω1Ω2c_s/(2Δ).
    pub omega_uv: T,
    /// Dressed interaction V (rad/μs).
    pub interaction: T,
    pub single_frequency: T,
    /// Frequency of the two-ion ground-state depletion `1 − P_00`, fitted
    /// with a free second harmonic since `1 − cos⁴(Ωt/2)` carries one.
    pub collective_frequency: T,
    pub ratio: T,
    /// Time of the first single-ion excitation maximum, π/ω_single.
    pub first_single_maximum: T,
    /// `P_rr` at that time, by linear interpolation.
    pub rr_at_first_single_maximum: T,
}

/// Light-shift-compensating Rydberg detuning `(Ω2eff² − Ω1²)/(4Δ)`.
pub fn light_shift_compensation<T: Real>(omega1: T, omega2_eff: T, delta: T) -> T {
    if delta == T::zero() {
        return T::zero();
    }
    (omega2_eff * omega2_eff - omega1 * omega1) / (T::lit(4.0) * delta)
}

/// `|s>` amplitude of the laser-coupled Rydberg state (1 without dressing).
pub fn rydberg_s_amplitude<T: Real>(mw: &MicrowaveField<T>) -> T {
    dressed_states(mw).map_or(T::one(), |d| d.plus.c_s)
}

fn diag_observable<T: Real>(dim: usize, weight: impl Fn(usize) -> bool) -> Operator<T> {
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == j && weight(i) { cr(T::one()) } else { cr(T::zero()) });
    Operator::from_matrix_unchecked(m, OperatorKind::Observable)
}

fn excited(level_index: usize) -> bool {
    level_index != Level::Q0.index()
}

pub fn rabi_experiment<T: Real>(panel: &RabiPanel<T>, opts: &EvolveOptions<T>) -> Result<RabiCurves<T>> {
    if panel.samples < 16 {
        return Err(Error::Config("at least 16 samples are needed per Rabi curve".into()));
    }
    if !(panel.delta != T::zero()) {
        return Err(Error::DetuningRequired);
    }
    let c_s = rydberg_s_amplitude(&panel.mw);
    let omega2_eff = panel.omega2 * c_s;
    let omega_uv = panel.omega1 * omega2_eff / (T::lit(2.0) * panel.delta.abs());
    let mut pulse = PulseSchedule::constant(panel.omega1, panel.omega2, panel.delta, panel.duration)?;
    if panel.compensate_light_shift {
        pulse = pulse.with_two_photon_detuning(light_shift_compensation(panel.omega1, omega2_eff, panel.delta))?;
    }
    let grid = uniform_grid(panel.duration, panel.samples);
    let opts = EvolveOptions { keep_states: false, ..opts.clone() };

    let one = Setup::new(panel.scheme, panel.mw, &panel.pair, 1)?;
    let rho1 = DensityState::from_ket(&basis_ket(Level::Q0))?;
    let obs1: Vec<NamedObservable<T>> = vec![("p_single".into(), diag_observable(LEVELS, excited))];
    let single = evolve(&rho1, &pulse, &one, &panel.noise, &grid, &obs1, &opts)?;

    let two = Setup::new(panel.scheme, panel.mw, &panel.pair, 2)?;
    let q0 = basis_ket::<T>(Level::Q0);
    let rho2 = DensityState::from_ket(&product_ket(&q0, &q0))?;
    let dim = LEVELS * LEVELS;
    let obs2: Vec<NamedObservable<T>> = vec![
        ("p_rr".into(), diag_observable(dim, |k| excited(k / LEVELS) && excited(k % LEVELS))),
        ("p_symmetric".into(), diag_observable(dim, |k| excited(k / LEVELS) != excited(k % LEVELS))),
    ];
    let pair = evolve(&rho2, &pulse, &two, &panel.noise, &grid, &obs2, &opts)?;

    let p_single = single.observable("p_single").unwrap_or_default().to_vec();
    let p_rr = pair.observable("p_rr").unwrap_or_default().to_vec();
    let p_symmetric = pair.observable("p_symmetric").unwrap_or_default().to_vec();
    let depletion: Vec<T> = p_rr.iter().zip(&p_symmetric).map(|(a, b)| *a + *b).collect();

    let guess = if omega_uv > T::zero() { omega_uv } else { T::one() };
    let single_fit = fit_damped_cosine(&grid, &p_single, guess)?;
    let collective_fit = fit_damped_cosine_with_overtone(&grid, &depletion, single_fit.omega)?;
    let t_star = T::pi() / single_fit.omega;
    let rr_at = interpolate(&grid, &p_rr, t_star);
    let ratio = collective_fit.omega / single_fit.omega;
    log::info!(
        "{}: ω_single = 2π×{:.4} MHz, ω_collective = 2π×{:.4} MHz, ratio {:.4}",
        panel.label,
        units::to_mhz(single_fit.omega),
        units::to_mhz(collective_fit.omega),
        ratio.to_f64_lossy()
    );
    Ok(RabiCurves {
        label: panel.label.clone(),
        times: grid,
        p_single,
        p_rr,
        p_symmetric,
        omega_uv,
        interaction: interaction_strength(&panel.mw, &panel.pair),
        single_frequency: single_fit.omega,
        collective_frequency: collective_fit.omega,
        ratio,
        first_single_maximum: t_star,
        rr_at_first_single_maximum: rr_at,
    })
}

fn interpolate<T: Real>(x: &[T], y: &[T], at: T) -> T {
    if at <= x[0] {
        return y[0];
    }
    for i in 1..x.len() {
        if at <= x[i] {
            let w = (at - x[i - 1]) / (x[i] - x[i - 1]);
            return y[i - 1] + (y[i] - y[i - 1]) * w;
        }
    }
    *y.last().unwrap()
}

/// Identifies the three preset interaction strengths for Rabi runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RabiPanelKind {
    NoInteraction,
    Intermediate,
    Blockade,
}

impl RabiPanelKind {
    pub const ALL: [RabiPanelKind; 3] = [RabiPanelKind::NoInteraction, RabiPanelKind::Intermediate, RabiPanelKind::Blockade];

    pub fn label(self) -> &'static str {
        match self {
            RabiPanelKind::NoInteraction => "b_no_interaction",
            RabiPanelKind::Intermediate => "c_intermediate",
            RabiPanelKind::Blockade => "d_blockade",
        }
    }

    /// `(Ω_MW, Δ_MW, Ω1, Ω2)` in MHz.
    pub fn fields_mhz(self) -> (f64, f64, f64, f64) {
        match self {
            RabiPanelKind::NoInteraction => (0.0, 0.0, 18.1, 22.0),
            RabiPanelKind::Intermediate => (134.0, 178.0, 20.0, 25.6),
            RabiPanelKind::Blockade => (178.0, 0.0, 20.0, 28.2),
        }
    }
}

/// Default intermediate detuning for the Rabi panels (MHz), chosen
/// large enough that `|e>` stays nearly empty.
pub const RABI_DEFAULT_DELTA_MHZ: f64 = 400.0;
/// Duration sampled per panel (μs).
pub const RABI_DEFAULT_DURATION_US: f64 = 3.0;

/// The preset parameter set for one panel, with n = 46 ions at 4.2 μm,
/// Γ_e = 2π × 4.5 MHz, τ_s = 3.5 μs, τ_p = 12 μs and 2π × 50 kHz linewidths.
pub fn preset_panel<T: Real>(kind: RabiPanelKind) -> Result<RabiPanel<T>> {
    let (om_mw, de_mw, o1, o2) = kind.fields_mhz();
    let linewidth = units::mhz::<T>(0.05);
    Ok(RabiPanel {
        label: kind.label().to_string(),
        omega1: units::mhz(o1),
        omega2: units::mhz(o2),
        delta: units::mhz(RABI_DEFAULT_DELTA_MHZ),
        mw: MicrowaveField::new(units::mhz(om_mw), units::mhz(de_mw))?,
        pair: RydbergPair::reference(),
        scheme: LevelScheme::new(units::mhz(4.5), units::rate_from_lifetime(3.5), units::rate_from_lifetime(12.0))?,
        noise: NoiseModel { gamma1: linewidth, gamma2: linewidth, ..NoiseModel::none() },
        duration: T::lit(RABI_DEFAULT_DURATION_US),
        samples: 301,
        compensate_light_shift: true,
    })
}
