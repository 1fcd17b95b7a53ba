//! TOML run configuration.
//!
//! Frequencies are cyclic, in MHz (`omega1_mhz = 40` means Ω1 = 2π × 40 MHz).
//! Times are in μs, lengths in μm, temperatures in μK (crystal) or K (black
//! body). Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rydgate::gate::{GateParams, GateScenario, GateTimeConvention};
use rydgate::lindblad::{preset_panel, EvolveOptions, NoiseModel, RabiPanel, RabiPanelKind, StokesSign};
use rydgate::phonon::{IonCrystal, PairInteraction, DEFAULT_MASS_AMU};
use rydgate::units::mhz;
use rydgate::MicrowaveField;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Context};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub rabi: Option<RabiConfig>,
    pub gate: Option<GateConfig>,
    pub phonons: Option<PhononConfig>,
    pub bbr: Option<BbrConfig>,
    pub budget: Option<BudgetConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.solver.validate()?;
        Ok(cfg)
    }

    pub fn section<'a, S>(&'a self, section: &'a Option<S>, name: &str) -> CliResult<&'a S> {
        section.as_ref().ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
    }
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    /// Cap on integrator steps per evolution.
    pub max_steps: Option<usize>,
}

impl SolverConfig {
    fn validate(&self) -> CliResult<()> {
        if let Some(r) = self.rtol {
            positive("solver.rtol", r)?;
        }
        if let Some(a) = self.atol {
            positive("solver.atol", a)?;
        }
        if self.max_steps == Some(0) {
            return Err(CliError::Config("solver.max_steps must be >= 1".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> EvolveOptions<f64> {
        let mut o = EvolveOptions::default();
        if let Some(r) = self.rtol {
            o.integrator.rtol = r;
        }
        if let Some(a) = self.atol {
            o.integrator.atol = a;
        }
        if let Some(n) = self.max_steps {
            o.integrator.max_steps = n;
        }
        o
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiConfig {
    pub panels: Vec<RabiPanelConfig>,
}

/// One Rabi panel. Starts from `preset` when given; without a preset the
/// four drive fields are required.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiPanelConfig {
    pub preset: Option<RabiPanelKind>,
    pub label: Option<String>,
    pub omega1_mhz: Option<f64>,
    pub omega2_mhz: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub omega_mw_mhz: Option<f64>,
    pub delta_mw_mhz: Option<f64>,
    pub linewidth_mhz: Option<f64>,
    pub duration_us: Option<f64>,
    pub samples: Option<usize>,
    pub compensate_light_shift: Option<bool>,
}

impl RabiPanelConfig {
    pub fn panel(&self, index: usize) -> CliResult<RabiPanel<f64>> {
        let mut p = preset_panel::<f64>(self.preset.unwrap_or(RabiPanelKind::NoInteraction)).context("rabi preset")?;
        if self.preset.is_none() {
            let missing: Vec<&str> = [
                ("omega1_mhz", self.omega1_mhz),
                ("omega2_mhz", self.omega2_mhz),
                ("omega_mw_mhz", self.omega_mw_mhz),
                ("delta_mw_mhz", self.delta_mw_mhz),
            ]
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
            .collect();
            if !missing.is_empty() {
                return Err(CliError::Config(format!("rabi panel {index}: no preset, so {} required", missing.join(", "))));
            }
            p.label = format!("panel{index}");
        }
        if let Some(l) = &self.label {
            if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(CliError::Config(format!("rabi panel {index}: label must be [A-Za-z0-9_-]+")));
            }
            p.label = l.clone();
        }
        if let Some(v) = self.omega1_mhz {
            p.omega1 = mhz(positive("omega1_mhz", v)?);
        }
        if let Some(v) = self.omega2_mhz {
            p.omega2 = mhz(positive("omega2_mhz", v)?);
        }
        if let Some(v) = self.delta_mhz {
            p.delta = mhz(positive("delta_mhz", v)?);
        }
        let om = self.omega_mw_mhz.map(|v| non_negative("omega_mw_mhz", v)).transpose()?;
        let dm = self.delta_mw_mhz.map(|v| finite("delta_mw_mhz", v)).transpose()?;
        if om.is_some() || dm.is_some() {
            p.mw = MicrowaveField::new(om.map_or(p.mw.omega_mw, mhz), dm.map_or(p.mw.delta_mw, mhz)).context("rabi panel")?;
        }
        if let Some(v) = self.linewidth_mhz {
            let g = mhz(non_negative("linewidth_mhz", v)?);
            p.noise.gamma1 = g;
            p.noise.gamma2 = g;
        }
        if let Some(v) = self.duration_us {
            p.duration = positive("duration_us", v)?;
        }
        if let Some(n) = self.samples {
            if n < 16 {
                return Err(CliError::Config("samples must be >= 16".into()));
            }
            p.samples = n;
        }
        if let Some(c) = self.compensate_light_shift {
            p.compensate_light_shift = c;
        }
        Ok(p)
    }
}

/// Gate run on top of a scenario preset.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    #[serde(default = "current")]
    pub scenario: GateScenario,
    pub omega1_mhz: Option<f64>,
    pub omega2_mhz: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub omega_mw_mhz: Option<f64>,
    pub delta_mw_mhz: Option<f64>,
    pub duration_us: Option<f64>,
    pub stokes: Option<StokesSign>,
    pub samples: Option<usize>,
    pub linewidth_mhz: Option<f64>,
    pub mw_sigma: Option<f64>,
    pub shots: Option<usize>,
    #[serde(default = "analyzer_phases")]
    pub analyzer_phases: usize,
}

fn current() -> GateScenario {
    GateScenario::Current
}

fn analyzer_phases() -> usize {
    rydgate::gate::DEFAULT_ANALYZER_PHASES
}

impl GateConfig {
    pub fn params(&self) -> CliResult<GateParams<f64>> {
        let mut p = self.scenario.params::<f64>().context("gate preset")?;
        if let Some(v) = self.omega1_mhz {
            p.omega1 = mhz(positive("omega1_mhz", v)?);
        }
        if let Some(v) = self.omega2_mhz {
            p.omega2 = mhz(positive("omega2_mhz", v)?);
        }
        if let Some(v) = self.delta_mhz {
            p.delta = mhz(positive("delta_mhz", v)?);
        }
        let om = self.omega_mw_mhz.map(|v| non_negative("omega_mw_mhz", v)).transpose()?;
        let dm = self.delta_mw_mhz.map(|v| finite("delta_mw_mhz", v)).transpose()?;
        if om.is_some() || dm.is_some() {
            p.mw = MicrowaveField::new(om.map_or(p.mw.omega_mw, mhz), dm.map_or(p.mw.delta_mw, mhz)).context("gate")?;
        }
        if let Some(v) = self.duration_us {
            p.duration = Some(positive("duration_us", v)?);
        }
        if let Some(s) = self.stokes {
            p.stokes = s;
        }
        if let Some(n) = self.samples {
            if n < 16 {
                return Err(CliError::Config("samples must be >= 16".into()));
            }
            p.samples = n;
        }
        Ok(p)
    }

    pub fn noise(&self, seed: u64) -> CliResult<NoiseModel<f64>> {
        let mut n = self.scenario.noise::<f64>(self.shots.unwrap_or(200), seed);
        if let Some(v) = self.linewidth_mhz {
            let g = mhz(non_negative("linewidth_mhz", v)?);
            n.gamma1 = g;
            n.gamma2 = g;
        }
        if let Some(v) = self.mw_sigma {
            n.mw_fractional_sigma = non_negative("mw_sigma", v)?;
        }
        n.validate().context("gate noise")?;
        if self.analyzer_phases < 8 {
            return Err(CliError::Config("analyzer_phases must be >= 8".into()));
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononConfig {
    pub crystal: CrystalConfig,
    /// Ion pair `[j, k]`; defaults to the two central ions.
    pub pair: Option<[usize; 2]>,
    /// Pair interaction W/2π (MHz).
    pub w_mhz: Option<f64>,
    /// `C3/2π` (MHz μm³); W follows from the equilibrium separation.
    pub c3_mhz_um3: Option<f64>,
    pub temperatures_uk: Vec<f64>,
    pub t_max_us: f64,
    #[serde(default = "time_points")]
    pub points: usize,
    /// Crystal sizes for the `G_max(N)` table, same trap parameters.
    #[serde(default)]
    pub g_max_n_ions: Vec<usize>,
    /// Evaluate `1 − exp(−G(τ_g))` at the gate time of this convention.
    pub gate_time: Option<GateTimeConvention>,
}

fn time_points() -> usize {
    201
}

impl PhononConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.temperatures_uk.is_empty() {
            return Err(CliError::Config("phonons.temperatures_uk must not be empty".into()));
        }
        for &t in &self.temperatures_uk {
            non_negative("temperatures_uk", t)?;
        }
        positive("t_max_us", self.t_max_us)?;
        if self.points < 2 {
            return Err(CliError::Config("phonons.points must be >= 2".into()));
        }
        match (self.w_mhz, self.c3_mhz_um3) {
            (Some(w), None) => positive("w_mhz", w).map(|_| ()),
            (None, Some(c)) => positive("c3_mhz_um3", c).map(|_| ()),
            _ => Err(CliError::Config("give exactly one of phonons.w_mhz and phonons.c3_mhz_um3".into())),
        }
    }

    pub fn interaction(&self) -> PairInteraction<f64> {
        match (self.w_mhz, self.c3_mhz_um3) {
            (Some(w), _) => PairInteraction::W(mhz(w)),
            (_, Some(c)) => PairInteraction::C3(mhz(c)),
            _ => unreachable!("validated"),
        }
    }

    /// Pair interaction used for the gate time and the total phase.
    pub fn w_at(&self, separation_um: f64) -> f64 {
        match self.interaction() {
            PairInteraction::W(w) => w,
            PairInteraction::C3(c3) => c3 / separation_um.powi(3),
        }
    }

    pub fn pair(&self, n_ions: usize) -> (usize, usize) {
        self.pair.map_or_else(|| IonCrystal::<f64>::central_pair(n_ions), |[j, k]| (j, k))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum CrystalConfig {
    /// Ring of equally spaced ions.
    EqualSpaced {
        n_ions: usize,
        spacing_um: f64,
        trap_frequency_mhz: f64,
        #[serde(default = "unit")]
        xi: f64,
        mass_amu: Option<f64>,
    },
    /// Linear crystal in a harmonic trap, fixed either by the trap frequency
    /// or by the spacing of the central pair.
    Harmonic {
        n_ions: usize,
        trap_frequency_mhz: Option<f64>,
        central_spacing_um: Option<f64>,
        mass_amu: Option<f64>,
    },
}

fn unit() -> f64 {
    1.0
}

impl CrystalConfig {
    pub fn n_ions(&self) -> usize {
        match self {
            CrystalConfig::EqualSpaced { n_ions, .. } | CrystalConfig::Harmonic { n_ions, .. } => *n_ions,
        }
    }

    /// The crystal with `n_ions` replaced.
    pub fn build(&self, n_ions: usize) -> CliResult<IonCrystal<f64>> {
        match *self {
            CrystalConfig::EqualSpaced { spacing_um, trap_frequency_mhz, xi, mass_amu, .. } => {
                positive("spacing_um", spacing_um)?;
                positive("trap_frequency_mhz", trap_frequency_mhz)?;
                positive("xi", xi)?;
                let mass = positive("mass_amu", mass_amu.unwrap_or(DEFAULT_MASS_AMU))?;
                IonCrystal::equal_spaced(n_ions, spacing_um, mhz(trap_frequency_mhz), xi)
                    .and_then(|c| c.with_mass(mass))
                    .context("crystal")
            }
            CrystalConfig::Harmonic { trap_frequency_mhz, central_spacing_um, mass_amu, .. } => {
                let mass = positive("mass_amu", mass_amu.unwrap_or(DEFAULT_MASS_AMU))?;
                match (trap_frequency_mhz, central_spacing_um) {
                    (Some(f), None) => IonCrystal::harmonic_1d(n_ions, mhz(positive("trap_frequency_mhz", f)?))
                        .and_then(|c| c.with_mass(mass))
                        .context("crystal"),
                    (None, Some(s)) => {
                        IonCrystal::harmonic_with_central_spacing_and_mass(n_ions, positive("central_spacing_um", s)?, mass)
                            .context("crystal")
                    }
                    _ => Err(CliError::Config(
                        "harmonic crystal needs exactly one of trap_frequency_mhz and central_spacing_um".into(),
                    )),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BbrConfig {
    pub n_min: u32,
    pub n_max: u32,
    #[serde(default)]
    pub l: u32,
    pub temperatures_k: Vec<f64>,
    pub temperature_sweep: Option<TemperatureSweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSweep {
    pub n: u32,
    #[serde(default)]
    pub l: u32,
    pub t_min_k: f64,
    pub t_max_k: f64,
    pub points: usize,
}

impl BbrConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(CliError::Config("bbr needs 1 <= n_min <= n_max".into()));
        }
        if self.temperatures_k.is_empty() {
            return Err(CliError::Config("bbr.temperatures_k must not be empty".into()));
        }
        for &t in &self.temperatures_k {
            non_negative("temperatures_k", t)?;
        }
        if let Some(s) = &self.temperature_sweep {
            non_negative("t_min_k", s.t_min_k)?;
            positive("t_max_k", s.t_max_k)?;
            if s.t_min_k >= s.t_max_k || s.points < 2 || s.n == 0 {
                return Err(CliError::Config("temperature_sweep needs n >= 1, t_min_k < t_max_k and points >= 2".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub scenario: GateScenario,
    /// Quasi-static microwave samples; ignored without microwave noise.
    #[serde(default = "budget_shots")]
    pub shots: usize,
}

fn budget_shots() -> usize {
    200
}
