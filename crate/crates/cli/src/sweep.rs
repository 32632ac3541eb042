//! Duration sweeps: one propagated run plus both closed-form spectra per
//! pulse duration, executed in parallel with per-point failure isolation.

use std::time::Instant;

use kapitza::analytic::default_m_max;
use kapitza::propagator::{max_binnable_order, EvolveError, RunError};
use kapitza::spectrum::Source;
use kapitza::{
    modified_spectrum, raman_nath_spectrum, run_simulation, DetuningSign, DiffractionSpectrum,
    GridSpec, PulseShape, SimParams,
};
use rayon::prelude::*;
use thiserror::Error;

/// What went wrong, bucketed by exit code: bad inputs (2) versus a solver
/// losing its footing mid-run (3).
#[derive(Debug, Error, PartialEq)]
pub enum PointError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerics(String),
}

impl From<RunError> for PointError {
    fn from(err: RunError) -> Self {
        match &err {
            RunError::Evolve(EvolveError::NormDrift { .. }) => {
                PointError::Numerics(err.to_string())
            }
            _ => PointError::Validation(err.to_string()),
        }
    }
}

/// Everything one (q, tau_r) point produces: the three spectra over a shared
/// binning window plus solver health data.
#[derive(Debug, Clone)]
pub struct PointSpectra {
    pub numeric: DiffractionSpectrum,
    pub plain: DiffractionSpectrum,
    pub modified: DiffractionSpectrum,
    pub dt_used: f64,
    pub n_steps: usize,
    pub norm_drift: f64,
    pub wall_ms: f64,
}

/// Run all three methods at one parameter point. The numeric spectrum is
/// binned over `|m| <= m_max`; the closed-form spectra are evaluated over a
/// window at least that wide so every emitted order is covered.
pub fn run_point(
    params: &SimParams,
    grid: &GridSpec,
    dt: Option<f64>,
    m_max: usize,
) -> Result<PointSpectra, PointError> {
    let started = Instant::now();
    let outcome = run_simulation(params, grid, dt, Some(m_max))?;
    let wide = m_max.max(default_m_max(params));
    let plain = raman_nath_spectrum(params, wide)
        .map_err(|e| PointError::Validation(e.to_string()))?;
    let modified = modified_spectrum(params, wide)
        .map_err(|e| PointError::Validation(e.to_string()))?;
    Ok(PointSpectra {
        numeric: outcome.spectrum,
        plain: DiffractionSpectrum::from_analytic(&plain),
        modified: DiffractionSpectrum::from_analytic(&modified),
        dt_used: outcome.stats.dt,
        n_steps: outcome.stats.steps,
        norm_drift: outcome.stats.norm_drift,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Resolved sweep inputs: everything needed to reproduce the outputs
/// byte for byte.
#[derive(Debug, Clone)]
pub struct SweepSettings {
    pub q: f64,
    pub p0: f64,
    pub pulse: PulseShape,
    pub detuning_sign: DetuningSign,
    pub n_periods: usize,
    pub points_per_period: usize,
    pub sigma: f64,
    /// Step override; `None` picks the phase-advance policy per point.
    pub dt: Option<f64>,
    /// Shared binning window for every point.
    pub m_max: usize,
    pub tau_values: Vec<f64>,
    pub jobs: Option<usize>,
}

impl SweepSettings {
    pub fn grid(&self) -> Result<GridSpec, PointError> {
        GridSpec::new(self.n_periods, self.points_per_period, self.sigma)
            .map_err(|e| PointError::Validation(e.to_string()))
    }

    pub fn params_at(&self, tau_r: f64) -> Result<SimParams, PointError> {
        SimParams::new(self.q, tau_r, self.p0, self.pulse, self.detuning_sign)
            .map_err(|e| PointError::Validation(e.to_string()))
    }
}

/// Pick the shared binning window for a sweep: wide enough for the analytic
/// comb at the longest duration, capped so every tooth stays on the grid.
pub fn auto_m_max(settings: &SweepSettings) -> Result<usize, PointError> {
    let grid = settings.grid()?;
    let cap = max_binnable_order(settings.p0, &grid);
    match settings.tau_values.last() {
        Some(&tau) => Ok(default_m_max(&settings.params_at(tau)?).min(cap)),
        None => Ok(0),
    }
}

#[derive(Debug, Clone)]
pub enum PointOutcome {
    Done(Box<PointSpectra>),
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub tau_r: f64,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub m_max: usize,
    pub points: Vec<SweepPoint>,
}

fn check_tau_values(tau_values: &[f64]) -> Result<(), PointError> {
    for pair in tau_values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(PointError::Validation(format!(
                "tau_r values must be strictly increasing ({} then {})",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(&first) = tau_values.first() {
        if !first.is_finite() || first <= 0.0 {
            return Err(PointError::Validation(format!(
                "tau_r values must be positive and finite, got {first}"
            )));
        }
    }
    Ok(())
}

/// Run every duration in the sweep. Points fail independently: a bad point
/// becomes a skip marker and the sweep carries on.
pub fn sweep_tau(settings: &SweepSettings) -> Result<SweepResult, PointError> {
    check_tau_values(&settings.tau_values)?;
    let grid = settings.grid()?;
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(PointError::Validation("--jobs must be at least 1".into()));
        }
    }

    let run_one = |&tau_r: &f64| -> SweepPoint {
        let outcome = settings
            .params_at(tau_r)
            .and_then(|params| run_point(&params, &grid, settings.dt, settings.m_max));
        SweepPoint {
            tau_r,
            outcome: match outcome {
                Ok(spectra) => PointOutcome::Done(Box::new(spectra)),
                Err(e) => PointOutcome::Skipped { reason: e.to_string() },
            },
        }
    };

    let points: Vec<SweepPoint> = match settings.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| PointError::Validation(e.to_string()))?
            .install(|| settings.tau_values.par_iter().map(run_one).collect()),
        None => settings.tau_values.par_iter().map(run_one).collect(),
    };

    Ok(SweepResult { m_max: settings.m_max, points })
}

/// Linear duration ladder over `(tau_min, tau_max]`, `points` steps.
pub fn linear_tau_values(tau_min: f64, tau_max: f64, points: usize) -> Result<Vec<f64>, PointError> {
    if !tau_min.is_finite() || tau_min < 0.0 {
        return Err(PointError::Validation(format!(
            "--tau-min must be finite and non-negative, got {tau_min}"
        )));
    }
    if !tau_max.is_finite() || tau_max <= tau_min {
        return Err(PointError::Validation(format!(
            "--tau-max must be finite and above --tau-min, got {tau_max}"
        )));
    }
    Ok((1..=points)
        .map(|i| tau_min + (tau_max - tau_min) * i as f64 / points as f64)
        .collect())
}

/// Spectrum selector for emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Numeric,
    Plain,
    Modified,
}

impl MethodChoice {
    pub fn of<'a>(self, spectra: &'a PointSpectra) -> &'a DiffractionSpectrum {
        match self {
            MethodChoice::Numeric => &spectra.numeric,
            MethodChoice::Plain => &spectra.plain,
            MethodChoice::Modified => &spectra.modified,
        }
    }

    pub fn source(self) -> Source {
        match self {
            MethodChoice::Numeric => Source::Numeric,
            MethodChoice::Plain => Source::PlainRn,
            MethodChoice::Modified => Source::ModifiedRn,
        }
    }
}
