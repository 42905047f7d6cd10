//! Oracle comparisons, parameter sweeps and interval statistics.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bragg::{analytic_amplitudes, default_halfwidth, ladder_evolve, ladder_series, pendellosung_b, pi_time, BraggParams};
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, ProtocolConfig};
use crate::VERSION;

/// z-score of the two-sided 95% interval.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at z-score `z`.
/// Returns `(0, 1)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub time: f64,
    pub analytic_undeflected: f64,
    pub analytic_deflected: f64,
    pub oracle_undeflected: f64,
    pub oracle_deflected: f64,
    /// Larger of the two population differences.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub rows: Vec<OracleRow>,
    pub max_error: f64,
    pub max_boundary_population: f64,
    pub truncation_warning: bool,
}

/// `samples + 1` equally spaced times over one Pendellösung period `2π/|B|`.
pub fn period_grid(p: &BraggParams, samples: usize) -> Result<Vec<f64>> {
    let b = pendellosung_b(&p.with_photons(p.n.max(1)));
    if b == 0.0 || !b.is_finite() {
        return Err(Error::param("n", "Pendellösung frequency vanishes"));
    }
    let period = 2.0 * std::f64::consts::PI / b.abs();
    let samples = samples.max(1);
    Ok((0..=samples).map(|k| period * k as f64 / samples as f64).collect())
}

/// Closed-form against ladder populations at each time (ascending).
pub fn oracle_compare(p: &BraggParams, times: &[f64]) -> Result<OracleComparison> {
    p.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("times", "must be ascending"));
    }
    let states = ladder_series(p, times)?;
    let mut rows = Vec::with_capacity(times.len());
    let (mut max_error, mut max_boundary, mut warn) = (0.0_f64, 0.0_f64, false);
    for s in &states {
        let (cp, cm) = analytic_amplitudes(p, s.time);
        let (au, ad) = (cp.norm_sqr(), cm.norm_sqr());
        let (ou, od) = (s.undeflected(), s.deflected());
        let error = (au - ou).abs().max((ad - od).abs());
        max_error = max_error.max(error);
        max_boundary = max_boundary.max(s.boundary_population);
        warn |= s.truncation_warning;
        rows.push(OracleRow {
            time: s.time,
            analytic_undeflected: au,
            analytic_deflected: ad,
            oracle_undeflected: ou,
            oracle_deflected: od,
            error,
        });
    }
    Ok(OracleComparison {
        rows,
        max_error,
        max_boundary_population: max_boundary,
        truncation_warning: warn,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DeltaOverG,
    InteractionTimeScale,
    L0,
    LadderHalfwidth,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::DeltaOverG => "delta_over_g",
            SweepAxis::InteractionTimeScale => "interaction_time_scale",
            SweepAxis::L0 => "l0",
            SweepAxis::LadderHalfwidth => "ladder_halfwidth",
        }
    }

    fn integral(self) -> bool {
        matches!(self, SweepAxis::L0 | SweepAxis::LadderHalfwidth)
    }
}

fn default_samples() -> usize {
    64
}

fn default_time_scale() -> f64 {
    1.0
}

fn default_efficiency() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: BraggParams,
    pub shots: u64,
    pub seed: u64,
    /// Grid points per Pendellösung period for the oracle error.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_time_scale")]
    pub time_scale: f64,
    #[serde(default = "default_efficiency")]
    pub detection_efficiency: f64,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, values: Vec<f64>, base: BraggParams, shots: u64, seed: u64) -> Self {
        SweepSpec {
            axis,
            values,
            base,
            shots,
            seed,
            samples: default_samples(),
            time_scale: default_time_scale(),
            detection_efficiency: default_efficiency(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::param("values", "sweep needs at least one value"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sweep value"));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::param("values", "must be strictly monotone"));
        }
        if self.axis.integral() && self.values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
            return Err(Error::param("values", format!("{} takes non-negative integers", self.axis.name())));
        }
        if self.shots == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        Ok(())
    }

    /// Parameters and interaction time scale for one axis value.
    pub fn point(&self, value: f64) -> (BraggParams, f64) {
        let mut p = self.base.clone();
        let mut scale = self.time_scale;
        match self.axis {
            SweepAxis::DeltaOverG => p.delta = value * p.g,
            SweepAxis::InteractionTimeScale => scale = value,
            SweepAxis::L0 => {
                p.l0 = value as u32;
                p.ladder_halfwidth = p.ladder_halfwidth.max(default_halfwidth(p.l0));
            }
            SweepAxis::LadderHalfwidth => p.ladder_halfwidth = value as u32,
        }
        (p, scale)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub index: usize,
    pub value: f64,
    /// `|C₋|²` of the closed form at the interaction time.
    pub analytic_deflection: Option<f64>,
    /// Deflected population of the ladder oracle at the interaction time.
    pub oracle_deflection: Option<f64>,
    pub abs_error: Option<f64>,
    /// Largest oracle error over one Pendellösung period.
    pub max_period_error: Option<f64>,
    pub truncation_warning: bool,
    pub success_probability: Option<f64>,
    pub success_rate: Option<f64>,
    pub mean_fidelity: Option<f64>,
    pub error: Option<String>,
}

struct RowValues {
    analytic: f64,
    oracle: f64,
    period: OracleComparison,
    success_probability: f64,
    success_rate: f64,
    mean_fidelity: Option<f64>,
}

fn evaluate_row(spec: &SweepSpec, index: usize) -> Result<RowValues> {
    let (p, scale) = spec.point(spec.values[index]);
    for w in p.validate()? {
        log::warn!("sweep row {index}: {w}");
    }
    let t = scale * pi_time(&p.with_photons(p.n.max(1)))?;
    let (_, cm) = analytic_amplitudes(&p, t);
    let oracle = ladder_evolve(&p, t)?.deflected();
    let period = oracle_compare(&p, &period_grid(&p, spec.samples)?)?;
    let report = run_protocol(&ProtocolConfig {
        params: p.with_photons(1),
        time_scale: scale,
        detection_efficiency: spec.detection_efficiency,
        shots: spec.shots,
        seed: spec.seed.wrapping_add(index as u64),
    })?;
    Ok(RowValues {
        analytic: cm.norm_sqr(),
        oracle,
        period,
        success_probability: report.success_probability,
        success_rate: report.success_rate,
        mean_fidelity: report.mean_entangled_fidelity,
    })
}

/// One row per axis value, in the given order. Row `i` samples with seed
/// `seed + i`; a failing row carries its error and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ComparisonRow>> {
    spec.validate()?;
    Ok((0..spec.values.len())
        .into_par_iter()
        .map(|i| {
            let value = spec.values[i];
            match evaluate_row(spec, i) {
                Ok(v) => ComparisonRow {
                    index: i,
                    value,
                    analytic_deflection: Some(v.analytic),
                    oracle_deflection: Some(v.oracle),
                    abs_error: Some((v.analytic - v.oracle).abs()),
                    max_period_error: Some(v.period.max_error),
                    truncation_warning: v.period.truncation_warning,
                    success_probability: Some(v.success_probability),
                    success_rate: Some(v.success_rate),
                    mean_fidelity: v.mean_fidelity,
                    error: None,
                },
                Err(e) => {
                    log::warn!("sweep row {i} ({} = {value}) failed: {e}", spec.axis.name());
                    ComparisonRow {
                        index: i,
                        value,
                        analytic_deflection: None,
                        oracle_deflection: None,
                        abs_error: None,
                        max_period_error: None,
                        truncation_warning: false,
                        success_probability: None,
                        success_rate: None,
                        mean_fidelity: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect())
}

/// Column order of the sweep CSV.
pub const SWEEP_CSV_COLUMNS: [&str; 12] = [
    "index",
    "axis",
    "value",
    "analytic_deflection",
    "oracle_deflection",
    "abs_error",
    "max_period_error",
    "truncation_warning",
    "success_probability",
    "success_rate",
    "mean_fidelity",
    "error",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Sweep table under a `#` header that echoes `config`.
pub fn sweep_csv_string<C: Serialize>(config: &C, spec: &SweepSpec, rows: &[ComparisonRow]) -> Result<String> {
    let mut out = crate::protocol::comment_header(config)?.into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(SWEEP_CSV_COLUMNS)?;
        for r in rows {
            w.write_record([
                r.index.to_string(),
                spec.axis.name().to_string(),
                r.value.to_string(),
                opt(r.analytic_deflection),
                opt(r.oracle_deflection),
                opt(r.abs_error),
                opt(r.max_period_error),
                r.truncation_warning.to_string(),
                opt(r.success_probability),
                opt(r.success_rate),
                opt(r.mean_fidelity),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub version: String,
    pub spec: SweepSpec,
    pub csv: String,
    pub rows: usize,
    pub failed_rows: Vec<usize>,
}

/// Writes `<stem>.csv` and the `<stem>.manifest.json` manifest into `dir`;
/// the CSV header echoes `config`.
pub fn write_sweep<C: Serialize>(
    dir: &Path,
    stem: &str,
    config: &C,
    spec: &SweepSpec,
    rows: &[ComparisonRow],
) -> Result<SweepManifest> {
    std::fs::create_dir_all(dir)?;
    let csv_name = format!("{stem}.csv");
    std::fs::File::create(dir.join(&csv_name))?.write_all(sweep_csv_string(config, spec, rows)?.as_bytes())?;
    let manifest = SweepManifest {
        version: VERSION.to_string(),
        spec: spec.clone(),
        csv: csv_name,
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.error.is_some()).map(|r| r.index).collect(),
    };
    std::fs::File::create(dir.join(format!("{stem}.manifest.json")))?
        .write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

pub fn oracle_csv_string<C: Serialize>(config: &C, cmp: &OracleComparison) -> Result<String> {
    let mut out = crate::protocol::comment_header(config)?.into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record([
            "time",
            "analytic_undeflected",
            "analytic_deflected",
            "oracle_undeflected",
            "oracle_deflected",
            "error",
        ])?;
        for r in &cmp.rows {
            w.write_record([
                r.time.to_string(),
                r.analytic_undeflected.to_string(),
                r.analytic_deflected.to_string(),
                r.oracle_undeflected.to_string(),
                r.oracle_deflected.to_string(),
                r.error.to_string(),
            ])?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}
