use nalgebra::DMatrix;

use super::hamiltonian::{collapse_operators, HamiltonianParts, LindbladGenerator, Setup};
use super::integrator::{integrate, IntegratorOptions, IntegratorStats};
use super::noise::NoiseModel;
use super::pulse::PulseSchedule;
use crate::error::{Error, Result};
use crate::qcore::{expectation, DensityState, Operator};
use crate::scalar::{Real, C};

/// Solver settings for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions<T> {
    pub integrator: IntegratorOptions<T>,
    /// On integrator failure, retry once with the step capped at
    /// `0.1 / Ω_max`.
    pub retry_with_small_steps: bool,
    /// Keep the full density matrix at every grid point.
    pub keep_states: bool,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self { integrator: IntegratorOptions::default(), retry_with_small_steps: true, keep_states: true }
    }
}

/// Density matrices and observables sampled on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    /// One entry per grid point when states are kept, otherwise only the
    /// final state.
    pub states: Vec<DensityState<T>>,
    pub observables: Vec<(String, Vec<T>)>,
    pub stats: IntegratorStats,
    pub shots: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn observable(&self, name: &str) -> Option<&[T]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn final_state(&self) -> &DensityState<T> {
        self.states.last().expect("trajectory always holds at least one state")
    }
}

/// Named observable evaluated along a trajectory.
pub type NamedObservable<T> = (String, Operator<T>);

fn check_grid<T: Real>(grid: &[T], pulse: &PulseSchedule<T>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("time grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("time grid must be strictly increasing".into()));
    }
    let slack = pulse.duration * T::lit(1e-12);
    if grid[0] < T::zero() || *grid.last().unwrap() > pulse.duration + slack {
        return Err(Error::Config("time grid must lie within [0, T]".into()));
    }
    Ok(())
}

/// Integrates the master equation from `rho0` at `t = 0` and samples the
/// state on `grid`. With microwave power noise the result is the average
/// over `noise.shots` quasi-static samples; without it a single run is made.
pub fn evolve<T: Real>(
    rho0: &DensityState<T>,
    pulse: &PulseSchedule<T>,
    setup: &Setup<T>,
    noise: &NoiseModel<T>,
    grid: &[T],
    observables: &[NamedObservable<T>],
    opts: &EvolveOptions<T>,
) -> Result<Trajectory<T>> {
    noise.validate()?;
    check_grid(grid, pulse)?;
    let dim = setup.dim();
    if rho0.dim() != dim {
        return Err(Error::Dimension(format!("initial state has dim {}, system has {dim}", rho0.dim())));
    }
    if let Some((name, _)) = observables.iter().find(|(_, o)| o.dim() != dim) {
        return Err(Error::Dimension(format!("observable `{name}` has wrong dimension")));
    }
    let collapses = collapse_operators(&setup.scheme, noise, setup.ions)?;
    let samples = noise.sample_mw(&setup.mw);
    let shots = samples.len();
    let keep = if opts.keep_states { grid.len() } else { 1 };
    let zero = C::new(T::zero(), T::zero());

    let mut state_sum: Vec<DMatrix<C<T>>> = vec![DMatrix::from_element(dim, dim, zero); keep];
    let mut obs_sum: Vec<Vec<T>> = vec![vec![T::zero(); grid.len()]; observables.len()];
    let mut stats = IntegratorStats::default();

    for mw in &samples {
        let parts = HamiltonianParts::new(pulse, mw, &setup.mw, setup.v_max, setup.ions)?;
        let run = |integrator: &IntegratorOptions<T>,
                   state_sum: &mut Vec<DMatrix<C<T>>>,
                   obs_sum: &mut Vec<Vec<T>>|
         -> Result<IntegratorStats> {
            let mut gen = LindbladGenerator::new(&parts, &collapses, pulse)?;
            let mut local_states = vec![DMatrix::from_element(dim, dim, zero); keep];
            let mut local_obs = vec![vec![T::zero(); grid.len()]; observables.len()];
            let mut failure = None;
            let s = integrate(
                |t, y, dy| gen.apply(t, y, dy),
                T::zero(),
                rho0.rho().as_slice(),
                grid,
                integrator,
                |i, _, y| {
                    let rho = DMatrix::from_column_slice(dim, dim, y);
                    let st = DensityState::from_matrix_unchecked(rho);
                    for (k, (_, o)) in observables.iter().enumerate() {
                        match expectation(&st, o) {
                            Ok(v) => local_obs[k][i] = v.re,
                            Err(e) => failure = Some(e),
                        }
                    }
                    if opts.keep_states {
                        local_states[i] = st.into_matrix();
                    } else if i + 1 == grid.len() {
                        local_states[0] = st.into_matrix();
                    }
                },
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            for (acc, m) in state_sum.iter_mut().zip(local_states) {
                *acc += m;
            }
            for (acc, v) in obs_sum.iter_mut().zip(local_obs) {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
            }
            Ok(s)
        };
        let mut integrator = opts.integrator.clone();
        integrator.tstops.extend(pulse.kinks());
        let s = match run(&integrator, &mut state_sum, &mut obs_sum) {
            Ok(s) => s,
            Err(err @ Error::Integrator { .. }) if opts.retry_with_small_steps => {
                let cap = T::lit(0.1) / pulse.omega_max().max(setup.mw.omega_mw).max(T::eps());
                log::warn!("integrator failed ({err}); retrying with max step {:e} μs", cap.to_f64_lossy());
                integrator.max_step = Some(integrator.max_step.map_or(cap, |m| m.min(cap)));
                run(&integrator, &mut state_sum, &mut obs_sum)?
            }
            Err(e) => return Err(e),
        };
        stats.accepted += s.accepted;
        stats.rejected += s.rejected;
        stats.evaluations += s.evaluations;
    }

    let states = if shots == 1 {
        state_sum.into_iter().map(DensityState::from_matrix_unchecked).collect()
    } else {
        let w = C::new(T::one() / T::lit(shots as f64), T::zero());
        for v in obs_sum.iter_mut() {
            for x in v.iter_mut() {
                *x /= T::lit(shots as f64);
            }
        }
        state_sum.into_iter().map(|m| DensityState::from_matrix_unchecked(m * w)).collect()
    };
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        observables: observables.iter().map(|(n, _)| n.clone()).zip(obs_sum).collect(),
        stats,
        shots,
    })
}

/// Evenly spaced grid of `points` samples on `[0, duration]`.
pub fn uniform_grid<T: Real>(duration: T, points: usize) -> Vec<T> {
    let points = points.max(2);
    let step = duration / T::lit((points - 1) as f64);
    (0..points).map(|i| if i + 1 == points { duration } else { step * T::lit(i as f64) }).collect()
}
