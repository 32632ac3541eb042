//! Front-end plumbing for the `kapitza` binary: regime classification,
//! duration sweeps with per-point failure isolation, file emission
//! (CSV / P3 pixmap / JSON), and replayable run manifests.

pub mod emit;
pub mod manifest;
pub mod regime;
pub mod sweep;
