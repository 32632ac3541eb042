//! Diffraction of an atomic wavepacket from a pulsed standing-wave light field.
//!
//! Two counter-propagating pulses of wavenumber `k` build an optical lattice
//! `V ∝ cos(2kz)` whose depth follows the pulse envelope. An atom crossing the
//! pulse exchanges photon pairs with the field and its momentum distribution
//! breaks into a comb of diffraction orders spaced by two photon recoils.
//!
//! Everything here works in reduced units:
//!
//! | quantity | unit                          |
//! |----------|-------------------------------|
//! | length   | `1/k`                         |
//! | momentum | `ħk`                          |
//! | time     | `1/ω_r`, `ω_r = ħk²/2M`       |
//! | energy   | `ħω_r`                        |
//!
//! In these units the kinetic energy of momentum `p` is `p²`, the lattice
//! period is `π`, and a two-photon kick moves `p` by exactly 2. A pulse is
//! described by the dimensionless intensity `q`, the duration `tau_r` and the
//! envelope shape; see [`SimParams`].
//!
//! The crate provides three routes to the post-pulse spectrum:
//!
//! * [`propagator`]: numerically exact split-step integration on a periodic
//!   grid,
//! * [`analytic::raman_nath_spectrum`]: the thin-phase-grating Bessel
//!   expansion, valid for short pulses,
//! * [`analytic::modified_spectrum`]: the same expansion with a per-order
//!   Doppler suppression factor that extends its reach to longer pulses.
//!
//! [`spectrum`] turns propagated states into binned order populations and
//! computes comparison metrics between any two spectra.

pub mod analytic;
pub mod bessel;
pub mod grid;
pub mod params;
pub mod propagator;
pub mod spectrum;

pub use analytic::{modified_spectrum, raman_nath_spectrum, rn_argument, AnalyticSpectrum};
pub use grid::GridSpec;
pub use params::{envelope, lattice_potential, DetuningSign, PulseShape, SimParams};
pub use propagator::{init_wavepacket, run_simulation, split_step_evolve, Wavefunction};
pub use spectrum::{bin_orders, compare, momentum_distribution, DiffractionSpectrum};
