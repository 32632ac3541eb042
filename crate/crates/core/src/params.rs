//! Reduced-unit experiment description: pulse intensity, duration, envelope
//! shape and the lattice potential they generate.

use std::f64::consts::PI;

use thiserror::Error;

/// Sign of the detuning between the light and the atomic transition.
///
/// The sign decides whether the lattice wells sit at the intensity maxima or
/// minima; order populations are insensitive to it (flipping the sign is
/// equivalent to shifting the lattice by half a period).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningSign {
    #[default]
    Positive,
    Negative,
}

impl DetuningSign {
    pub fn value(self) -> f64 {
        match self {
            DetuningSign::Positive => 1.0,
            DetuningSign::Negative => -1.0,
        }
    }
}

/// Temporal envelope of the single-beam field amplitude, peak-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    /// `exp(-t²/τ²)` with `τ = tau_r` in reduced time.
    #[default]
    Gaussian,
    /// `cos²(αt)` on `|t| ≤ π/2α`, zero outside. The rate `α` is derived
    /// from `tau_r` so that the pulse fluence `∫envelope²dt` matches the
    /// Gaussian of the same duration; see [`cos_squared_alpha`].
    CosSquared,
}

/// `α` for the cos² envelope of duration `tau_r`, fixed by fluence matching:
/// `∫cos⁴(αt)dt = 3π/8α` over the support must equal the Gaussian value
/// `τ√(π/2)`, giving `α = 3√(2π)/8τ`.
pub fn cos_squared_alpha(tau_r: f64) -> f64 {
    3.0 * (2.0 * PI).sqrt() / (8.0 * tau_r)
}

/// Half-width `π/2α` of the cos² support, ≈ 1.671 τ.
pub fn cos_squared_half_width(tau_r: f64) -> f64 {
    PI / (2.0 * cos_squared_alpha(tau_r))
}

/// Single-beam field envelope at time `t`, in `[0, 1]` with peak 1 at `t = 0`.
pub fn envelope(shape: PulseShape, t: f64, tau_r: f64) -> f64 {
    match shape {
        PulseShape::Gaussian => (-(t * t) / (tau_r * tau_r)).exp(),
        PulseShape::CosSquared => {
            let alpha = cos_squared_alpha(tau_r);
            if t.abs() <= PI / (2.0 * alpha) {
                let c = (alpha * t).cos();
                c * c
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("intensity q must be finite and non-negative, got {0}")]
    Intensity(f64),
    #[error("pulse duration tau_r must be finite and positive, got {0}")]
    Duration(f64),
    #[error("initial momentum p0 must be finite, got {0}")]
    Momentum(f64),
}

/// Complete description of one pulse-diffraction experiment.
///
/// All downstream physics depends only on these five fields; dimensional
/// quantities (field amplitudes, detuning, atomic mass, wavenumber) never
/// appear past this boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Dimensionless lattice intensity, ≥ 0. The peak lattice depth is `8q`
    /// in energy units.
    pub q: f64,
    /// Pulse duration in reduced time, > 0.
    pub tau_r: f64,
    /// Initial packet momentum in photon recoils.
    pub p0: f64,
    pub pulse: PulseShape,
    pub detuning_sign: DetuningSign,
}

impl SimParams {
    pub fn new(
        q: f64,
        tau_r: f64,
        p0: f64,
        pulse: PulseShape,
        detuning_sign: DetuningSign,
    ) -> Result<Self, ParamError> {
        if !q.is_finite() || q < 0.0 {
            return Err(ParamError::Intensity(q));
        }
        if !tau_r.is_finite() || tau_r <= 0.0 {
            return Err(ParamError::Duration(tau_r));
        }
        if !p0.is_finite() {
            return Err(ParamError::Momentum(p0));
        }
        Ok(Self { q, tau_r, p0, pulse, detuning_sign })
    }

    /// Gaussian defaults: positive detuning, Gaussian envelope.
    pub fn gaussian(q: f64, tau_r: f64, p0: f64) -> Result<Self, ParamError> {
        Self::new(q, tau_r, p0, PulseShape::Gaussian, DetuningSign::Positive)
    }
}

/// Spatially uniform part of the lattice: `sign(Δ)·8q·envelope(t)²`.
///
/// The envelope enters squared because the interference term carries the
/// product of both beam envelopes. The two single-beam light-shift terms are
/// spatially constant and contribute only a global phase, so they are
/// dropped.
pub fn lattice_depth(t: f64, params: &SimParams) -> f64 {
    let env = envelope(params.pulse, t, params.tau_r);
    params.detuning_sign.value() * 8.0 * params.q * env * env
}

/// Lattice potential `sign(Δ)·8q·envelope(t)²·cos(2z)` in energy units.
pub fn lattice_potential(z: f64, t: f64, params: &SimParams) -> f64 {
    lattice_depth(t, params) * (2.0 * z).cos()
}
