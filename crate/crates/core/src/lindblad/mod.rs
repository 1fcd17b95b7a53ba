//! Lindblad master-equation dynamics of one and two six-level ions.

pub mod evolve;
pub mod hamiltonian;
pub mod integrator;
pub mod noise;
pub mod pulse;
pub mod rabi;

pub use evolve::{evolve, uniform_grid, EvolveOptions, NamedObservable, Trajectory};
pub use hamiltonian::{
    build_hamiltonian, collapse_operators, exchange_strength, rydberg_reference_energy, HamiltonianParts,
    LindbladGenerator, Setup,
};
pub use integrator::{integrate, IntegratorOptions, IntegratorStats};
pub use noise::NoiseModel;
pub use pulse::{PulseSchedule, PulseShape, StokesSign};
pub use rabi::{preset_panel, rabi_experiment, RabiCurves, RabiPanel, RabiPanelKind};
