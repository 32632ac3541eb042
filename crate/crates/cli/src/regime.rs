//! Dynamical-regime classification of a pulse by intensity and duration.

use thiserror::Error;

/// Pulse duration below which the lattice acts as a thin phase grating at
/// intensity `q`: the pulse is over before order kinetic energies matter.
pub fn raman_nath_boundary(q: f64) -> f64 {
    1.0 / (2.0 * (2.0 * q).sqrt())
}

/// The three qualitatively different responses of an atom to a pulsed
/// lattice, partitioning the (q, tau_r) quarter-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Short pulse: thin phase grating, Bessel expansions apply.
    RamanNath,
    /// Long weak pulse: kinetic energy conserved, two-state oscillation.
    Bragg,
    /// Long strong pulse: atoms oscillate inside the lattice wells.
    Channeling,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::RamanNath => "raman-nath",
            Regime::Bragg => "bragg",
            Regime::Channeling => "channeling",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RegimeError {
    #[error("intensity q must be positive and finite, got {0}")]
    Intensity(f64),
    #[error("duration tau_r must be positive and finite, got {0}")]
    Duration(f64),
}

/// Place a pulse in its regime. Points exactly on a boundary belong to the
/// longer-pulse / stronger-pulse side.
pub fn classify_regime(q: f64, tau_r: f64) -> Result<Regime, RegimeError> {
    if !q.is_finite() || q <= 0.0 {
        return Err(RegimeError::Intensity(q));
    }
    if !tau_r.is_finite() || tau_r <= 0.0 {
        return Err(RegimeError::Duration(tau_r));
    }
    if tau_r < raman_nath_boundary(q) {
        Ok(Regime::RamanNath)
    } else if q < 1.0 {
        Ok(Regime::Bragg)
    } else {
        Ok(Regime::Channeling)
    }
}
