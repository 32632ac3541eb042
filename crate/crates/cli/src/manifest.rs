//! Run manifests: a flat JSON record of every input plus per-point solver
//! health, sufficient to replay a sweep and reproduce its CSV byte for byte.

use std::fs;
use std::path::Path;

use kapitza::{DetuningSign, PulseShape};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sweep::{PointOutcome, SweepResult, SweepSettings};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub q: f64,
    pub p0: f64,
    pub pulse: String,
    pub detuning_sign: i8,
    pub n_periods: usize,
    pub points_per_period: usize,
    pub sigma: f64,
    /// Requested step; null means the phase-advance policy per point.
    pub dt: Option<f64>,
    pub m_max: usize,
    pub sweep_points: usize,
    pub tau_values: Vec<f64>,
    pub dt_used: Vec<f64>,
    pub n_steps: Vec<u64>,
    pub wall_ms: Vec<f64>,
    pub norm_drift: Vec<f64>,
    pub skipped_indices: Vec<usize>,
    pub skipped_reasons: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not a manifest: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported manifest schema {0} (expected {SCHEMA})")]
    Schema(u32),
    #[error("unknown pulse shape {0:?} in manifest")]
    Pulse(String),
    #[error("unknown detuning sign {0} in manifest")]
    Detuning(i8),
}

pub fn pulse_name(pulse: PulseShape) -> &'static str {
    match pulse {
        PulseShape::Gaussian => "gaussian",
        PulseShape::CosSquared => "cos2",
    }
}

fn pulse_from_name(name: &str) -> Result<PulseShape, ManifestError> {
    match name {
        "gaussian" => Ok(PulseShape::Gaussian),
        "cos2" => Ok(PulseShape::CosSquared),
        other => Err(ManifestError::Pulse(other.to_string())),
    }
}

/// Record a finished sweep (or single run: one point, command "run").
pub fn build(command: &str, settings: &SweepSettings, result: &SweepResult) -> Manifest {
    let n = result.points.len();
    let mut manifest = Manifest {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        q: settings.q,
        p0: settings.p0,
        pulse: pulse_name(settings.pulse).to_string(),
        detuning_sign: settings.detuning_sign.value() as i8,
        n_periods: settings.n_periods,
        points_per_period: settings.points_per_period,
        sigma: settings.sigma,
        dt: settings.dt,
        m_max: settings.m_max,
        sweep_points: n,
        tau_values: settings.tau_values.clone(),
        dt_used: vec![0.0; n],
        n_steps: vec![0; n],
        wall_ms: vec![0.0; n],
        norm_drift: vec![0.0; n],
        skipped_indices: Vec::new(),
        skipped_reasons: Vec::new(),
    };
    for (i, point) in result.points.iter().enumerate() {
        match &point.outcome {
            PointOutcome::Done(s) => {
                manifest.dt_used[i] = s.dt_used;
                manifest.n_steps[i] = s.n_steps as u64;
                manifest.wall_ms[i] = s.wall_ms;
                manifest.norm_drift[i] = s.norm_drift;
            }
            PointOutcome::Skipped { reason } => {
                manifest.skipped_indices.push(i);
                manifest.skipped_reasons.push(reason.clone());
            }
        }
    }
    manifest
}

/// The sweep inputs a manifest pins down (health arrays are informational
/// and play no part in a replay).
pub fn settings_from(manifest: &Manifest) -> Result<SweepSettings, ManifestError> {
    if manifest.schema != SCHEMA {
        return Err(ManifestError::Schema(manifest.schema));
    }
    let detuning_sign = match manifest.detuning_sign {
        1 => DetuningSign::Positive,
        -1 => DetuningSign::Negative,
        other => return Err(ManifestError::Detuning(other)),
    };
    Ok(SweepSettings {
        q: manifest.q,
        p0: manifest.p0,
        pulse: pulse_from_name(&manifest.pulse)?,
        detuning_sign,
        n_periods: manifest.n_periods,
        points_per_period: manifest.points_per_period,
        sigma: manifest.sigma,
        dt: manifest.dt,
        m_max: manifest.m_max,
        tau_values: manifest.tau_values.clone(),
        jobs: None,
    })
}

pub fn write(manifest: &Manifest, path: &Path) -> Result<(), ManifestError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| ManifestError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn read(path: &Path) -> Result<Manifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| ManifestError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    if manifest.schema != SCHEMA {
        return Err(ManifestError::Schema(manifest.schema));
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::sweep_tau;

    fn demo_settings() -> SweepSettings {
        SweepSettings {
            q: 3.5,
            p0: 1.0,
            pulse: PulseShape::Gaussian,
            detuning_sign: DetuningSign::Positive,
            n_periods: 16,
            points_per_period: 32,
            sigma: 5.0,
            dt: None,
            m_max: 8,
            // The second value sits one ulp off a short decimal, as ladder
            // arithmetic routinely produces; the round trip must not round
            // it to 0.1 (JSON parsing is only bit-exact with serde_json's
            // float_roundtrip feature).
            tau_values: vec![0.05, 0.02 + (0.3 - 0.02) * 4.0 / 14.0],
            jobs: Some(2),
        }
    }

    #[test]
    fn round_trips_through_disk() {
        let settings = demo_settings();
        assert_ne!(settings.tau_values[1], 0.1, "fixture must stay off-grid");
        let result = sweep_tau(&settings).unwrap();
        let manifest = build("sweep", &settings, &result);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        write(&manifest, &path).unwrap();
        let back = read(&path).unwrap();
        assert_eq!(back, manifest);
        assert_eq!(back.schema, 1);
        assert_eq!(back.sweep_points, 2);
        assert!(back.skipped_indices.is_empty());
        assert!(back.n_steps.iter().all(|&s| s > 0));

        let replay = settings_from(&back).unwrap();
        assert_eq!(replay.tau_values, settings.tau_values);
        assert_eq!(replay.m_max, settings.m_max);
        assert_eq!(replay.pulse, settings.pulse);
        assert_eq!(replay.jobs, None);
    }

    #[test]
    fn skips_are_recorded_with_reasons() {
        let mut settings = demo_settings();
        settings.m_max = 40;
        let result = sweep_tau(&settings).unwrap();
        let manifest = build("sweep", &settings, &result);
        assert_eq!(manifest.skipped_indices, vec![0, 1]);
        assert_eq!(manifest.skipped_reasons.len(), 2);
        assert!(manifest.skipped_reasons[0].contains("window"));
        assert_eq!(manifest.dt_used, vec![0.0, 0.0]);
    }

    #[test]
    fn foreign_schema_rejected() {
        let settings = demo_settings();
        let result = sweep_tau(&settings).unwrap();
        let mut manifest = build("sweep", &settings, &result);
        manifest.schema = 2;
        assert!(matches!(settings_from(&manifest), Err(ManifestError::Schema(2))));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        write(&manifest, &path).unwrap();
        assert!(matches!(read(&path), Err(ManifestError::Schema(2))));
    }

    #[test]
    fn manifest_json_is_flat_with_schema_field() {
        let settings = demo_settings();
        let result = sweep_tau(&settings).unwrap();
        let manifest = build("sweep", &settings, &result);
        let value: serde_json::Value =
            serde_json::to_value(&manifest).unwrap();
        let object = value.as_object().unwrap();
        assert_eq!(object["schema"], 1);
        assert_eq!(object["pulse"], "gaussian");
        assert_eq!(object["detuning_sign"], 1);
        // flat: no nested objects, scalars and arrays of scalars only
        for (key, field) in object {
            assert!(!field.is_object(), "{key} nests an object");
            if let Some(items) = field.as_array() {
                assert!(items.iter().all(|v| !v.is_object() && !v.is_array()));
            }
        }
    }
}
