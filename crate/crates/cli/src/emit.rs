//! File emission: CSV spectra tables, P3 heatmaps, regime-map lattices.
//! Formats are pinned byte for byte; floats print as shortest round-trip
//! decimals so identical inputs give identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use kapitza::compare;
use serde::Serialize;
use thiserror::Error;

use crate::manifest::pulse_name;
use crate::regime::{classify_regime, raman_nath_boundary, RegimeError};
use crate::sweep::{MethodChoice, PointOutcome, PointSpectra, SweepResult, SweepSettings};

pub const CSV_HEADER: &str = "tau_r,m,p_final,pop_numeric,pop_plain_rn,pop_modified_rn";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("heatmap needs at least 2 sweep points, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error("regime map bounds must be positive and ascending")]
    BadBounds,
    #[error("regime map resolution must be at least 2, got {0}")]
    BadResolution(usize),
}

fn write_file(path: &Path, text: &str) -> Result<(), EmitError> {
    fs::write(path, text).map_err(|source| EmitError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Sweep spectra as CSV: one row per (tau_r, order), sorted; skipped points
/// contribute no rows.
pub fn csv_string(result: &SweepResult, p0: f64) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let m_max = result.m_max as i64;
    for point in &result.points {
        let spectra = match &point.outcome {
            PointOutcome::Done(s) => s,
            PointOutcome::Skipped { .. } => continue,
        };
        for m in -m_max..=m_max {
            let p_final = p0 + 2.0 * m as f64;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                point.tau_r,
                m,
                p_final,
                spectra.numeric.population(m),
                spectra.plain.population(m),
                spectra.modified.population(m),
            );
        }
    }
    out
}

pub fn emit_csv(result: &SweepResult, p0: f64, path: &Path) -> Result<(), EmitError> {
    write_file(path, &csv_string(result, p0))
}

/// Five-stop dark-blue → blue → cyan → yellow → red ramp over [0, 1].
fn ramp(v: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [0.0, 0.0, 128.0],
        [0.0, 0.0, 255.0],
        [0.0, 255.0, 255.0],
        [255.0, 255.0, 0.0],
        [255.0, 0.0, 0.0],
    ];
    let v = v.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (v.floor() as usize).min(STOPS.len() - 2);
    let t = v - i as f64;
    let mut px = [0u8; 3];
    for c in 0..3 {
        px[c] = (STOPS[i][c] + t * (STOPS[i + 1][c] - STOPS[i][c])).round() as u8;
    }
    px
}

/// Sweep populations as a plain-text pixmap: rows are durations (ascending
/// downward), columns are orders (ascending), intensity normalized to the
/// sweep-wide maximum of the chosen method. Skipped points render black-blue
/// (zero) rows.
pub fn heatmap_string(result: &SweepResult, method: MethodChoice) -> Result<String, EmitError> {
    if result.points.len() < 2 {
        return Err(EmitError::TooFewPoints(result.points.len()));
    }
    let m_max = result.m_max as i64;
    let width = 2 * result.m_max + 1;
    let height = result.points.len();

    let rows: Vec<Vec<f64>> = result
        .points
        .iter()
        .map(|point| match &point.outcome {
            PointOutcome::Done(s) => (-m_max..=m_max)
                .map(|m| method.of(s).population(m))
                .collect(),
            PointOutcome::Skipped { .. } => vec![0.0; width],
        })
        .collect();
    let peak = rows
        .iter()
        .flatten()
        .cloned()
        .fold(0.0f64, f64::max);

    let mut out = String::from("P3\n");
    let _ = writeln!(
        out,
        "# {} population vs (order, tau_r); rows tau_r ascending downward, \
         columns m = -{m_max}..{m_max}; intensity / sweep max; \
         ramp dark-blue (0,0,128) -> blue -> cyan -> yellow -> red (255,0,0)",
        match method {
            MethodChoice::Numeric => "numeric",
            MethodChoice::Plain => "plain-rn",
            MethodChoice::Modified => "modified-rn",
        },
    );
    let _ = writeln!(out, "{width} {height}");
    out.push_str("255\n");
    for row in &rows {
        for &value in row {
            let v = if peak > 0.0 { value / peak } else { 0.0 };
            let [r, g, b] = ramp(v);
            let _ = writeln!(out, "{r} {g} {b}");
        }
    }
    Ok(out)
}

pub fn emit_heatmap(
    result: &SweepResult,
    method: MethodChoice,
    path: &Path,
) -> Result<(), EmitError> {
    write_file(path, &heatmap_string(result, method)?)
}

/// Regime labels over a log-spaced (q, tau_r) lattice, plus the two
/// boundary curves as their own series (empty regime column).
pub fn regime_map_string(
    q_range: (f64, f64),
    tau_range: (f64, f64),
    resolution: usize,
) -> Result<String, EmitError> {
    let (q_lo, q_hi) = q_range;
    let (tau_lo, tau_hi) = tau_range;
    if !(q_lo > 0.0 && q_hi > q_lo && tau_lo > 0.0 && tau_hi > tau_lo)
        || !q_hi.is_finite()
        || !tau_hi.is_finite()
    {
        return Err(EmitError::BadBounds);
    }
    if resolution < 2 {
        return Err(EmitError::BadResolution(resolution));
    }
    let log_spaced = |lo: f64, hi: f64| -> Vec<f64> {
        (0..resolution)
            .map(|i| {
                if i == resolution - 1 {
                    hi
                } else {
                    lo * (hi / lo).powf(i as f64 / (resolution - 1) as f64)
                }
            })
            .collect()
    };
    let qs = log_spaced(q_lo, q_hi);
    let taus = log_spaced(tau_lo, tau_hi);

    let mut out = String::from("series,q,tau_r,regime\n");
    for &q in &qs {
        for &tau in &taus {
            let label = classify_regime(q, tau)?;
            let _ = writeln!(out, "grid,{q},{tau},{}", label.name());
        }
    }
    for &q in &qs {
        let _ = writeln!(out, "raman-nath-boundary,{q},{},", raman_nath_boundary(q));
    }
    for &tau in &taus {
        let _ = writeln!(out, "bragg-channeling-boundary,1,{tau},");
    }
    Ok(out)
}

pub fn emit_regime_map(
    q_range: (f64, f64),
    tau_range: (f64, f64),
    resolution: usize,
    path: &Path,
) -> Result<(), EmitError> {
    write_file(path, &regime_map_string(q_range, tau_range, resolution)?)
}

#[derive(Serialize)]
struct PointRecord {
    tau_r: f64,
    status: &'static str,
    skip_reason: Option<String>,
    dt_used: Option<f64>,
    n_steps: Option<u64>,
    wall_ms: Option<f64>,
    norm_drift: Option<f64>,
    off_comb: Option<f64>,
    pop_numeric: Option<Vec<f64>>,
    pop_plain_rn: Option<Vec<f64>>,
    pop_modified_rn: Option<Vec<f64>>,
    rms_plain_vs_numeric: Option<f64>,
    rms_modified_vs_numeric: Option<f64>,
    max_abs_plain_vs_numeric: Option<f64>,
    max_abs_modified_vs_numeric: Option<f64>,
    tvd_plain_vs_numeric: Option<f64>,
    tvd_modified_vs_numeric: Option<f64>,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    schema: u32,
    tool_version: &'static str,
    command: &'a str,
    regime: Option<&'static str>,
    q: f64,
    p0: f64,
    pulse: &'static str,
    detuning_sign: i8,
    n_periods: usize,
    points_per_period: usize,
    sigma: f64,
    dt: Option<f64>,
    m_max: usize,
    orders: Vec<i64>,
    p_final: Vec<f64>,
    points: Vec<PointRecord>,
}

fn point_record(m_max: i64, tau_r: f64, outcome: &PointOutcome) -> PointRecord {
    let spectra = match outcome {
        PointOutcome::Done(s) => s,
        PointOutcome::Skipped { reason } => {
            return PointRecord {
                tau_r,
                status: "skipped",
                skip_reason: Some(reason.clone()),
                dt_used: None,
                n_steps: None,
                wall_ms: None,
                norm_drift: None,
                off_comb: None,
                pop_numeric: None,
                pop_plain_rn: None,
                pop_modified_rn: None,
                rms_plain_vs_numeric: None,
                rms_modified_vs_numeric: None,
                max_abs_plain_vs_numeric: None,
                max_abs_modified_vs_numeric: None,
                tvd_plain_vs_numeric: None,
                tvd_modified_vs_numeric: None,
            }
        }
    };
    let pops = |s: &kapitza::DiffractionSpectrum| -> Vec<f64> {
        (-m_max..=m_max).map(|m| s.population(m)).collect()
    };
    let vs_plain = compare(&spectra.numeric, &spectra.plain).expect("same p0");
    let vs_modified = compare(&spectra.numeric, &spectra.modified).expect("same p0");
    PointRecord {
        tau_r,
        status: "ok",
        skip_reason: None,
        dt_used: Some(spectra.dt_used),
        n_steps: Some(spectra.n_steps as u64),
        wall_ms: Some(spectra.wall_ms),
        norm_drift: Some(spectra.norm_drift),
        off_comb: Some(spectra.numeric.off_comb),
        pop_numeric: Some(pops(&spectra.numeric)),
        pop_plain_rn: Some(pops(&spectra.plain)),
        pop_modified_rn: Some(pops(&spectra.modified)),
        rms_plain_vs_numeric: Some(vs_plain.rms),
        rms_modified_vs_numeric: Some(vs_modified.rms),
        max_abs_plain_vs_numeric: Some(vs_plain.max_abs),
        max_abs_modified_vs_numeric: Some(vs_modified.max_abs),
        tvd_plain_vs_numeric: Some(vs_plain.tvd),
        tvd_modified_vs_numeric: Some(vs_modified.tvd),
    }
}

/// The whole run/sweep as one JSON document: parameter echo, shared order
/// axis, then per-point populations and comparison metrics.
pub fn json_string(
    command: &str,
    regime: Option<&'static str>,
    settings: &SweepSettings,
    result: &SweepResult,
) -> String {
    let m_max = result.m_max as i64;
    let record = SweepRecord {
        schema: crate::manifest::SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        regime,
        q: settings.q,
        p0: settings.p0,
        pulse: pulse_name(settings.pulse),
        detuning_sign: settings.detuning_sign.value() as i8,
        n_periods: settings.n_periods,
        points_per_period: settings.points_per_period,
        sigma: settings.sigma,
        dt: settings.dt,
        m_max: result.m_max,
        orders: (-m_max..=m_max).collect(),
        p_final: (-m_max..=m_max).map(|m| settings.p0 + 2.0 * m as f64).collect(),
        points: result
            .points
            .iter()
            .map(|p| point_record(m_max, p.tau_r, &p.outcome))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    text
}

/// Wrap one finished point as a 1-row result so the sweep emitters apply.
pub fn single_point_result(m_max: usize, tau_r: f64, spectra: PointSpectra) -> SweepResult {
    SweepResult {
        m_max,
        points: vec![crate::sweep::SweepPoint {
            tau_r,
            outcome: PointOutcome::Done(Box::new(spectra)),
        }],
    }
}
