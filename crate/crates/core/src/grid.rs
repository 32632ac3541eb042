//! Periodic spatial grid for the propagator.
//!
//! The box holds an integer number of lattice periods (each `π` long), so the
//! momentum grid has spacing `2/n_periods` recoils and every diffraction
//! order `p0 + 2m` with integer `p0` falls exactly on a grid point.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid size {0} = n_periods * points_per_period must be a power of two")]
    NotPowerOfTwo(usize),
    #[error("need at least 2 lattice periods so integer momenta stay on the grid, got {0}")]
    TooFewPeriods(usize),
    #[error("packet waist sigma must be finite and positive, got {0}")]
    Waist(f64),
    #[error("box length {length:.1} shorter than 8 sigma = {minimum:.1}; the packet would wrap")]
    BoxTooSmall { length: f64, minimum: f64 },
}

/// Spatial grid: `n_periods · points_per_period` points over a box of length
/// `n_periods · π`, plus the waist of the initial packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_periods: usize,
    pub points_per_period: usize,
    pub sigma: f64,
}

impl GridSpec {
    pub fn new(n_periods: usize, points_per_period: usize, sigma: f64) -> Result<Self, GridError> {
        if n_periods < 2 {
            return Err(GridError::TooFewPeriods(n_periods));
        }
        let n = n_periods * points_per_period;
        if !n.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(n));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(GridError::Waist(sigma));
        }
        let spec = Self { n_periods, points_per_period, sigma };
        if spec.box_length() < 8.0 * sigma {
            return Err(GridError::BoxTooSmall {
                length: spec.box_length(),
                minimum: 8.0 * sigma,
            });
        }
        Ok(spec)
    }

    /// Total number of grid points.
    pub fn n(&self) -> usize {
        self.n_periods * self.points_per_period
    }

    pub fn box_length(&self) -> f64 {
        self.n_periods as f64 * std::f64::consts::PI
    }

    pub fn dz(&self) -> f64 {
        std::f64::consts::PI / self.points_per_period as f64
    }

    /// Momentum-grid spacing, `2/n_periods` recoils.
    pub fn dp(&self) -> f64 {
        2.0 / self.n_periods as f64
    }

    /// Largest representable momentum; equals `points_per_period`.
    pub fn p_max(&self) -> f64 {
        self.points_per_period as f64
    }

    /// Momentum carried by transform mode `j` (FFT index order: positive
    /// frequencies first, then negative).
    pub fn momentum_at(&self, j: usize) -> f64 {
        let n = self.n();
        let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        signed * self.dp()
    }

    pub fn position_at(&self, j: usize) -> f64 {
        j as f64 * self.dz()
    }
}
