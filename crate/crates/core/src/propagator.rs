//! Split-step Fourier integration of the pulsed-lattice Schrödinger
//! equation on a periodic grid.
//!
//! Each step applies `exp(-iK dt/2) exp(-iV dt) exp(-iK dt/2)`: the kinetic
//! phase `p²dt/2` acts exactly in the transform basis, the potential phase
//! acts pointwise in position with the envelope evaluated at the step's
//! midpoint time, and adjacent half-kicks merge so one transform round trip
//! is spent per step. Every factor is a pure phase, so the evolution is
//! unitary to rounding and the measured norm drift doubles as a health check.
//!
//! The state carries the full carrier `exp(i p0 z)` of the moving packet;
//! no co-moving frame is used, the spectral kinetic factor handles the drift
//! and the dispersion together.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::grid::GridSpec;
use crate::params::{cos_squared_half_width, lattice_depth, PulseShape, SimParams};
use crate::spectrum::{bin_orders, momentum_distribution, DiffractionSpectrum, SpectrumError};

/// Allowed phase advance per split factor per step, in radians.
const MAX_PHASE_STEP: f64 = 0.1;
/// Steps between norm checks; drift is also checked after the final step.
const NORM_CHECK_INTERVAL: usize = 64;
const NORM_ABORT: f64 = 1e-8;
const MAX_STEPS: usize = 50_000_000;

/// Complex amplitudes over the spatial grid at time `t`.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    pub amplitudes: Vec<Complex64>,
    pub t: f64,
    pub grid: GridSpec,
}

impl Wavefunction {
    /// Discrete norm `Σ|ψ|² dz`.
    pub fn norm(&self) -> f64 {
        let dz = self.grid.dz();
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dz
    }
}

/// Normalized Gaussian packet `exp(-z²/2σ²) exp(i p0 z)` centered in the
/// box, at `t = 0`. Its momentum density is a Gaussian of 1/e half-width
/// `1/σ` around `p0`, far narrower than the order spacing of 2.
pub fn init_wavepacket(grid: &GridSpec, p0: f64) -> Wavefunction {
    let center = grid.box_length() / 2.0;
    let sigma = grid.sigma;
    let amplitudes: Vec<Complex64> = (0..grid.n())
        .map(|j| {
            let z = grid.position_at(j) - center;
            Complex64::from_polar((-z * z / (2.0 * sigma * sigma)).exp(), p0 * z)
        })
        .collect();
    let mut psi = Wavefunction { amplitudes, t: 0.0, grid: *grid };
    let scale = 1.0 / psi.norm().sqrt();
    for a in &mut psi.amplitudes {
        *a *= scale;
    }
    psi
}

#[derive(Debug, Error, PartialEq)]
pub enum EvolveError {
    #[error("time step must be finite and positive, got {0}")]
    StepSize(f64),
    #[error("{0} steps exceed the {MAX_STEPS} cap; widen dt or shrink the window")]
    TooManySteps(usize),
    #[error(
        "dt = {dt:.3e} advances phases too far per step \
         (kinetic {kinetic:.2} rad, potential {potential:.2} rad, limit {MAX_PHASE_STEP})"
    )]
    PhaseAdvance { dt: f64, kinetic: f64, potential: f64 },
    #[error("norm drifted by {drift:.3e} after {steps} steps at dt = {dt:.3e}")]
    NormDrift { dt: f64, steps: usize, drift: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveStats {
    pub steps: usize,
    /// Actual step used: the span divided into equal steps no longer than
    /// the requested dt.
    pub dt: f64,
    pub norm_drift: f64,
}

/// Default step: keep both split phases below [`MAX_PHASE_STEP`] per step
/// and resolve the envelope with a thousand steps per duration.
pub fn dt_policy(params: &SimParams, grid: &GridSpec) -> f64 {
    let kinetic = MAX_PHASE_STEP / (grid.p_max() * grid.p_max());
    let potential = MAX_PHASE_STEP / (8.0 * params.q);
    kinetic.min(potential).min(params.tau_r / 1000.0)
}

/// Integration window: `[-2τ, 2τ]` for the Gaussian envelope (which has
/// fallen to e⁻⁸ of peak intensity there), the padded support for cos².
pub fn time_window(params: &SimParams) -> (f64, f64) {
    match params.pulse {
        PulseShape::Gaussian => (-2.0 * params.tau_r, 2.0 * params.tau_r),
        PulseShape::CosSquared => {
            let w = 1.1 * cos_squared_half_width(params.tau_r);
            (-w, w)
        }
    }
}

/// Evolve to `t_end` (either direction) in equal steps of at most `dt`.
pub fn split_step_evolve(
    mut psi: Wavefunction,
    params: &SimParams,
    t_end: f64,
    dt: f64,
) -> Result<(Wavefunction, EvolveStats), EvolveError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(EvolveError::StepSize(dt));
    }
    let span = t_end - psi.t;
    if span == 0.0 {
        return Ok((psi, EvolveStats { steps: 0, dt, norm_drift: 0.0 }));
    }
    let steps_needed = (span.abs() / dt).ceil();
    if !(steps_needed < MAX_STEPS as f64) {
        return Err(EvolveError::TooManySteps(steps_needed as usize));
    }
    let steps = steps_needed as usize;
    let h = span / steps as f64;

    let p_max = psi.grid.p_max();
    let kinetic_phase = p_max * p_max * h.abs();
    let potential_phase = 8.0 * params.q * h.abs();
    if kinetic_phase > MAX_PHASE_STEP * 1.000_001 || potential_phase > MAX_PHASE_STEP * 1.000_001 {
        return Err(EvolveError::PhaseAdvance {
            dt,
            kinetic: kinetic_phase,
            potential: potential_phase,
        });
    }

    let n = psi.grid.n();
    let inv_n = 1.0 / n as f64;
    let mut kin_half = Vec::with_capacity(n);
    let mut kin_full = Vec::with_capacity(n);
    let mut cos_2z = Vec::with_capacity(n);
    for j in 0..n {
        let p = psi.grid.momentum_at(j);
        // the transforms are unnormalized; fold 1/N into the kinetic factor
        // applied once per round trip
        kin_half.push(Complex64::cis(-p * p * h / 2.0) * inv_n);
        kin_full.push(Complex64::cis(-p * p * h) * inv_n);
        cos_2z.push((2.0 * psi.grid.position_at(j)).cos());
    }

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut scratch =
        vec![Complex64::default(); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];

    let t_start = psi.t;
    let dz = psi.grid.dz();
    let norm_reference = psi.norm();
    let buf = &mut psi.amplitudes;

    let check_norm = |buf: &[Complex64], step: usize| -> Result<f64, EvolveError> {
        let norm: f64 = buf.iter().map(|a| a.norm_sqr()).sum::<f64>() * dz;
        let drift = (norm - norm_reference).abs();
        if !(drift <= NORM_ABORT) {
            return Err(EvolveError::NormDrift { dt, steps: step, drift });
        }
        Ok(drift)
    };

    for step in 0..steps {
        forward.process_with_scratch(buf, &mut scratch);
        let kin = if step == 0 { &kin_half } else { &kin_full };
        for (a, k) in buf.iter_mut().zip(kin) {
            *a *= k;
        }
        inverse.process_with_scratch(buf, &mut scratch);

        let t_mid = t_start + (step as f64 + 0.5) * h;
        let phase = lattice_depth(t_mid, params) * h;
        if phase != 0.0 {
            for (a, c) in buf.iter_mut().zip(&cos_2z) {
                *a *= Complex64::cis(-phase * c);
            }
        }
        if step % NORM_CHECK_INTERVAL == NORM_CHECK_INTERVAL - 1 {
            check_norm(buf, step + 1)?;
        }
    }
    forward.process_with_scratch(buf, &mut scratch);
    for (a, k) in buf.iter_mut().zip(&kin_half) {
        *a *= k;
    }
    inverse.process_with_scratch(buf, &mut scratch);

    let norm_drift = check_norm(buf, steps)?;
    psi.t = t_end;
    Ok((psi, EvolveStats { steps, dt: h.abs(), norm_drift }))
}

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: Wavefunction,
    pub spectrum: DiffractionSpectrum,
    pub stats: EvolveStats,
}

/// Largest order window that keeps every tooth on the momentum grid.
pub fn max_binnable_order(p0: f64, grid: &GridSpec) -> usize {
    let cap = (grid.p_max() - 1.0 - p0.abs()) / 2.0;
    if cap < 0.0 {
        0
    } else {
        cap.floor() as usize
    }
}

/// Full experiment: initialize the packet before the pulse, evolve through
/// it, bin the final state. `dt` and `m_max` fall back to [`dt_policy`] and
/// the grid-capped default analytic window.
pub fn run_simulation(
    params: &SimParams,
    grid: &GridSpec,
    dt: Option<f64>,
    m_max: Option<usize>,
) -> Result<RunOutcome, RunError> {
    let (t_begin, t_end) = time_window(params);
    let dt = dt.unwrap_or_else(|| dt_policy(params, grid));
    let m_max = m_max.unwrap_or_else(|| {
        crate::analytic::default_m_max(params).min(max_binnable_order(params.p0, grid))
    });
    let mut psi = init_wavepacket(grid, params.p0);
    psi.t = t_begin;
    let (state, stats) = split_step_evolve(psi, params, t_end, dt)?;
    let spectrum = bin_orders(&momentum_distribution(&state), params.p0, m_max)?;
    Ok(RunOutcome { state, spectrum, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_grid() -> GridSpec {
        GridSpec::new(16, 32, 4.0).unwrap()
    }

    #[test]
    fn packet_is_normalized() {
        let psi = init_wavepacket(&small_grid(), 1.0);
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn free_evolution_keeps_momentum_density() {
        let grid = small_grid();
        let params = SimParams::gaussian(0.0, 0.1, 1.0).unwrap();
        let psi = init_wavepacket(&grid, 1.0);
        let before = momentum_distribution(&psi);
        let (after, stats) = split_step_evolve(psi, &params, 0.4, 9e-5).unwrap();
        let after = momentum_distribution(&after);
        let worst = before
            .mass
            .iter()
            .zip(&after.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "worst mass change {worst:.3e}");
        assert!(stats.norm_drift < 1e-12);
    }

    #[test]
    fn evolution_reverses_exactly() {
        let grid = small_grid();
        for q in [0.0, 3.5] {
            let params = SimParams::gaussian(q, 0.1, 1.0).unwrap();
            let psi = init_wavepacket(&grid, 1.0);
            let reference = psi.amplitudes.clone();
            let (forward, _) = split_step_evolve(psi, &params, 0.2, 9e-5).unwrap();
            let (back, _) = split_step_evolve(forward, &params, 0.0, 9e-5).unwrap();
            let worst = back
                .amplitudes
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "q={q}: worst amplitude change {worst:.3e}");
        }
    }

    #[test]
    fn norm_conserved_through_pulse() {
        let grid = small_grid();
        let params = SimParams::gaussian(3.5, 0.2, 1.0).unwrap();
        let outcome = run_simulation(&params, &grid, None, None).unwrap();
        assert!(outcome.stats.norm_drift < 1e-10);
        assert_abs_diff_eq!(outcome.spectrum.total(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn vanishing_pulse_leaves_packet_alone() {
        let grid = small_grid();
        let params = SimParams::gaussian(52.9, 1e-6, 2.0).unwrap();
        let outcome = run_simulation(&params, &grid, None, None).unwrap();
        assert!(outcome.spectrum.population(0) > 0.9999);
    }

    #[test]
    fn step_errors_reported() {
        let grid = small_grid();
        let params = SimParams::gaussian(3.5, 0.2, 1.0).unwrap();
        let psi = init_wavepacket(&grid, 1.0);
        assert!(matches!(
            split_step_evolve(psi.clone(), &params, 0.4, 1e-2),
            Err(EvolveError::PhaseAdvance { .. })
        ));
        assert!(matches!(
            split_step_evolve(psi.clone(), &params, 0.4, -1.0),
            Err(EvolveError::StepSize(_))
        ));
        assert!(matches!(
            split_step_evolve(psi, &params, 1e9, 1e-9),
            Err(EvolveError::TooManySteps(_))
        ));
    }

    #[test]
    fn corrupted_state_aborts() {
        let grid = small_grid();
        let params = SimParams::gaussian(3.5, 0.2, 1.0).unwrap();
        let mut psi = init_wavepacket(&grid, 1.0);
        psi.amplitudes[7] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            split_step_evolve(psi, &params, 0.4, 9e-5),
            Err(EvolveError::NormDrift { .. })
        ));
    }

    #[test]
    fn policy_step_reference_value() {
        let params = SimParams::gaussian(52.9, 0.0375, 20.0).unwrap();
        let grid = GridSpec::new(32, 64, 10.0).unwrap();
        assert_eq!(dt_policy(&params, &grid), 0.1 / 4096.0);
        // with the potential weak and the pulse short, envelope resolution wins
        let weak = SimParams::gaussian(1e-3, 0.02, 20.0).unwrap();
        assert_eq!(dt_policy(&weak, &grid), 0.02 / 1000.0);
    }

    #[test]
    fn window_follows_pulse_shape() {
        let gauss = SimParams::gaussian(1.0, 0.3, 0.0).unwrap();
        assert_eq!(time_window(&gauss), (-0.6, 0.6));
        let cos2 = SimParams::new(
            1.0,
            0.3,
            0.0,
            PulseShape::CosSquared,
            crate::params::DetuningSign::Positive,
        )
        .unwrap();
        let (a, b) = time_window(&cos2);
        assert!(b > cos_squared_half_width(0.3));
        assert_eq!(a, -b);
    }

    #[test]
    fn halving_dt_converges_quadratically() {
        let grid = small_grid();
        let params = SimParams::gaussian(3.5, 0.1, 1.0).unwrap();
        let pops = |dt: f64| {
            let outcome = run_simulation(&params, &grid, Some(dt), Some(10)).unwrap();
            outcome.spectrum.populations
        };
        let base = dt_policy(&params, &grid);
        let coarse = pops(base);
        let mid = pops(base / 2.0);
        let fine = pops(base / 4.0);
        let diff = |a: &std::collections::BTreeMap<i64, f64>,
                    b: &std::collections::BTreeMap<i64, f64>| {
            a.iter().map(|(m, p)| (p - b[m]).abs()).fold(0.0, f64::max)
        };
        let d1 = diff(&coarse, &mid);
        let d2 = diff(&mid, &fine);
        let ratio = d1 / d2;
        assert!((3.0..5.0).contains(&ratio), "d1={d1:.3e} d2={d2:.3e} ratio={ratio:.2}");
    }
}
