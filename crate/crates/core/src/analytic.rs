//! Closed-form diffraction spectra for Gaussian pulses.
//!
//! Integrating the coupling over the pulse turns the lattice into a thin
//! phase grating and the order populations into squared Bessel functions.
//! Two variants are provided:
//!
//! * the plain expansion `P(m) = |J_m(f(p0))|²`, which ignores kinetic
//!   energy during the pulse and holds only for short pulses;
//! * the modified expansion `P(m) = |J_m(f(p0 + m))|²`, which evaluates the
//!   Doppler suppression at the mean momentum of the m-th transfer. Note the
//!   argument advances by one recoil per order while the orders themselves
//!   sit two recoils apart; that offset is intentional, not a typo, since the
//!   momentum halfway through an m-pair exchange is `p0 + m`.
//!
//! The modified populations carry no sum rule; their total is reported
//! as-is and never renormalized.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::bessel::{bessel_j, BesselError, MAX_ORDER};
use crate::params::SimParams;

/// Pulse-integrated grating strength `f(p)`; argument of the Bessel orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselArgument {
    pub value: f64,
}

/// `f(p) = 4√(2π)·q·τ·exp(-2p²τ²)` for a Gaussian pulse.
///
/// The prefactor is half the peak lattice depth `8q` times the fluence
/// `τ√(π/2)` (half because `cos 2z` splits into two ladder couplings); the
/// exponential is the pulse-bandwidth suppression of a transfer that is
/// Doppler-shifted by `2p` recoil frequencies at momentum `p`.
pub fn rn_argument(params: &SimParams, p_tilde: f64) -> BesselArgument {
    let tau = params.tau_r;
    let value =
        4.0 * (2.0 * PI).sqrt() * params.q * tau * (-2.0 * p_tilde * p_tilde * tau * tau).exp();
    BesselArgument { value }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PlainRn,
    ModifiedRn,
}

/// Closed-form spectrum: populations for `|m| ≤ m_max` plus their reported
/// total. The total is `1` minus truncation for [`Method::PlainRn`] and a
/// genuinely free quantity for [`Method::ModifiedRn`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum {
    pub method: Method,
    pub p0: f64,
    pub populations: BTreeMap<i64, f64>,
    pub total: f64,
}

impl AnalyticSpectrum {
    pub fn population(&self, m: i64) -> f64 {
        self.populations.get(&m).copied().unwrap_or(0.0)
    }

    pub fn m_max(&self) -> i64 {
        self.populations.keys().next_back().copied().unwrap_or(0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("m_max must be at least 1")]
    WindowEmpty,
    #[error("m_max = {m_max} truncates the spectrum: tail mass {tail:.3e} exceeds 1e-10")]
    Truncated { m_max: usize, tail: f64 },
    #[error(transparent)]
    Bessel(#[from] BesselError),
}

const TAIL_TOLERANCE: f64 = 1e-10;
const TAIL_CUTOFF: f64 = 1e-18;

/// Default order window: the argument peaks at `f(0) = 4√(2π)qτ` and
/// `J_m(x)` dies super-exponentially for `m > x`, so `ceil(f(0)) + 40`
/// truncates below 1e-10 with a wide margin.
pub fn default_m_max(params: &SimParams) -> usize {
    let peak = rn_argument(params, 0.0).value;
    (peak.ceil() as usize + 40).min(MAX_ORDER as usize)
}

/// Plain short-pulse spectrum: `population(m) = |J_m(f(p0))|²`.
pub fn raman_nath_spectrum(
    params: &SimParams,
    m_max: usize,
) -> Result<AnalyticSpectrum, AnalyticError> {
    if m_max == 0 {
        return Err(AnalyticError::WindowEmpty);
    }
    let x = rn_argument(params, params.p0).value;
    let mut populations = BTreeMap::new();
    let mut total = 0.0;
    for m in -(m_max as i64)..=m_max as i64 {
        let j = bessel_j(m, x)?;
        populations.insert(m, j * j);
        total += j * j;
    }
    let tail = (1.0 - total).max(0.0);
    if tail > TAIL_TOLERANCE {
        return Err(AnalyticError::Truncated { m_max, tail });
    }
    Ok(AnalyticSpectrum { method: Method::PlainRn, p0: params.p0, populations, total })
}

/// Doppler-corrected spectrum: `population(m) = |J_m(f(p0 + m))|²`.
pub fn modified_spectrum(
    params: &SimParams,
    m_max: usize,
) -> Result<AnalyticSpectrum, AnalyticError> {
    if m_max == 0 {
        return Err(AnalyticError::WindowEmpty);
    }
    let pop = |m: i64| -> Result<f64, BesselError> {
        let arg = rn_argument(params, params.p0 + m as f64).value;
        let j = bessel_j(m, arg)?;
        Ok(j * j)
    };
    let mut populations = BTreeMap::new();
    let mut total = 0.0;
    for m in -(m_max as i64)..=m_max as i64 {
        let p = pop(m)?;
        populations.insert(m, p);
        total += p;
    }
    // No sum rule to lean on: probe the orders beyond the window directly
    // until they stay negligible (or the engine envelope ends).
    let mut tail = 0.0;
    for direction in [1i64, -1] {
        let mut quiet = 0;
        let mut m = direction * (m_max as i64 + 1);
        loop {
            if m.abs() > MAX_ORDER {
                return Err(AnalyticError::Truncated { m_max, tail: f64::NAN });
            }
            let p = pop(m)?;
            tail += p;
            quiet = if p < TAIL_CUTOFF { quiet + 1 } else { 0 };
            if quiet >= 3 {
                break;
            }
            m += direction;
        }
    }
    if tail > TAIL_TOLERANCE {
        return Err(AnalyticError::Truncated { m_max, tail });
    }
    Ok(AnalyticSpectrum { method: Method::ModifiedRn, p0: params.p0, populations, total })
}
