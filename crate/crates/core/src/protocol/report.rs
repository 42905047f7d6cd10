//! End-to-end protocol runs and their CSV/JSON reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::herald::{agrees_with_paper, click_distribution, ClickDistribution, HeraldClass};
use super::joint::{assemble_joint_state, assemble_joint_state_at, JointState};
use super::sampling::{sample_shots, Sampler};
use crate::bragg::{bragg_phase, BraggParams};
use crate::error::{Error, Result};
use crate::metrics::{wilson_interval, WILSON_Z};
use crate::VERSION;

/// Column order of the per-pattern CSV.
pub const PATTERN_CSV_COLUMNS: [&str; 11] = [
    "pattern",
    "probability",
    "empirical_frequency",
    "classification",
    "paper_label",
    "fidelity",
    "concurrence",
    "count",
    "wilson_low",
    "wilson_high",
    "agrees_with_paper",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub params: BraggParams,
    /// Interaction time as a multiple of the pi time.
    pub time_scale: f64,
    /// Per-atom detection probability; a shot with a missed atom is discarded.
    pub detection_efficiency: f64,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            params: BraggParams::default(),
            time_scale: 1.0,
            detection_efficiency: 1.0,
            shots: 100_000,
            seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.shots == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        if !(self.time_scale >= 0.0 && self.time_scale.is_finite()) {
            return Err(Error::param("time_scale", format!("must be finite and >= 0, got {}", self.time_scale)));
        }
        if !(self.detection_efficiency > 0.0 && self.detection_efficiency <= 1.0) {
            return Err(Error::param(
                "detection_efficiency",
                format!("must lie in (0, 1], got {}", self.detection_efficiency),
            ));
        }
        self.params.validate()
    }
}

/// Joint state for an interaction of `time_scale` pi times. The nominal
/// time uses the two-term pair; any other time keeps the leakage term.
pub fn joint_state_for(p: &BraggParams, time_scale: f64) -> Result<JointState> {
    if time_scale == 1.0 {
        assemble_joint_state(p)
    } else {
        assemble_joint_state_at(p, time_scale)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub pattern: String,
    pub probability: f64,
    pub count: u64,
    pub empirical_frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub classification: Option<HeraldClass>,
    pub paper_label: String,
    pub agrees_with_paper: bool,
    pub fidelity: Option<f64>,
    pub concurrence: Option<f64>,
    pub purity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: HeraldClass,
    pub probability: f64,
    pub count: u64,
    pub empirical_frequency: f64,
    /// Probability-weighted fidelity to the class target.
    pub fidelity: Option<f64>,
    pub concurrence: Option<f64>,
    /// Fidelity averaged over the sampled shots of this class.
    pub empirical_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDivergence {
    pub pattern: String,
    pub classification: Option<HeraldClass>,
    pub paper_label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub version: String,
    pub config: ProtocolConfig,
    pub bragg_phase: f64,
    pub shots: u64,
    pub detected: u64,
    pub discarded: u64,
    /// Exact probability of a ψ± herald.
    pub success_probability: f64,
    /// Fraction of detected shots heralding ψ±.
    pub success_rate: f64,
    pub success_rate_wilson: (f64, f64),
    pub mean_entangled_fidelity: Option<f64>,
    pub mean_entangled_concurrence: Option<f64>,
    pub rows: Vec<PatternRow>,
    pub classes: Vec<ClassSummary>,
    /// Patterns whose computed herald differs from the published table.
    pub table_divergences: Vec<TableDivergence>,
    pub warnings: Vec<String>,
}

fn frequency(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Exact distribution, seeded sampling and per-class aggregation.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolReport> {
    let warnings = cfg.validate()?;
    let state = joint_state_for(&cfg.params, cfg.time_scale)?;
    let dist = click_distribution(&state)?;
    build_report(cfg, &dist, warnings)
}

fn build_report(cfg: &ProtocolConfig, dist: &ClickDistribution, warnings: Vec<String>) -> Result<ProtocolReport> {
    let sampler = Sampler::new(dist)?;
    let counts = sample_shots(&sampler, cfg.shots, cfg.seed, cfg.detection_efficiency)?;
    let detected = counts.detected();

    let rows: Vec<PatternRow> = dist
        .results
        .iter()
        .zip(&counts.counts)
        .map(|(r, &count)| {
            let (wilson_low, wilson_high) = wilson_interval(count, detected, WILSON_Z);
            PatternRow {
                pattern: r.pattern.to_string(),
                probability: r.probability,
                count,
                empirical_frequency: frequency(count, detected),
                wilson_low,
                wilson_high,
                classification: r.classification,
                paper_label: r.paper_label.to_string(),
                agrees_with_paper: agrees_with_paper(r.pattern),
                fidelity: r.fidelity_to_class,
                concurrence: r.concurrence,
                purity: r.purity(),
            }
        })
        .collect();

    let classes = HeraldClass::ALL
        .iter()
        .map(|&class| {
            let members: Vec<&PatternRow> = rows.iter().filter(|r| r.classification == Some(class)).collect();
            let count: u64 = members.iter().map(|r| r.count).sum();
            let emp_num: f64 = members
                .iter()
                .filter_map(|r| r.fidelity.map(|f| f * r.count as f64))
                .sum();
            ClassSummary {
                class,
                probability: members.iter().map(|r| r.probability).sum(),
                count,
                empirical_frequency: frequency(count, detected),
                fidelity: dist.weighted_mean(&[class], |r| r.fidelity_to_class),
                concurrence: dist.weighted_mean(&[class], |r| r.concurrence),
                empirical_fidelity: (count > 0).then(|| emp_num / count as f64),
            }
        })
        .collect::<Vec<_>>();

    let successes: u64 = classes.iter().filter(|c| c.class.is_entangled()).map(|c| c.count).sum();
    let table_divergences = rows
        .iter()
        .filter(|r| !r.agrees_with_paper)
        .map(|r| TableDivergence {
            pattern: r.pattern.clone(),
            classification: r.classification,
            paper_label: r.paper_label.clone(),
        })
        .collect();

    Ok(ProtocolReport {
        version: VERSION.to_string(),
        config: cfg.clone(),
        bragg_phase: bragg_phase(&cfg.params),
        shots: cfg.shots,
        detected,
        discarded: counts.discarded,
        success_probability: dist.success_probability(),
        success_rate: frequency(successes, detected),
        success_rate_wilson: wilson_interval(successes, detected, WILSON_Z),
        mean_entangled_fidelity: dist.mean_entangled_fidelity(),
        mean_entangled_concurrence: dist.mean_entangled_concurrence(),
        rows,
        classes,
        table_divergences,
        warnings,
    })
}

/// `#`-prefixed lines naming the version and the resolved configuration.
pub fn comment_header<C: Serialize>(config: &C) -> Result<String> {
    Ok(format!(
        "# braggswap {VERSION}\n# config: {}\n",
        serde_json::to_string(config)?
    ))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ProtocolReport {
    pub fn to_csv_string(&self) -> Result<String> {
        self.to_csv_string_with(&self.config)
    }

    /// Pattern table under a `#` header that echoes `config`.
    pub fn to_csv_string_with<C: Serialize>(&self, config: &C) -> Result<String> {
        let mut out = comment_header(config)?.into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(PATTERN_CSV_COLUMNS)?;
            for r in &self.rows {
                w.write_record([
                    r.pattern.clone(),
                    r.probability.to_string(),
                    r.empirical_frequency.to_string(),
                    r.classification.map_or("none".to_string(), |c| c.to_string()),
                    r.paper_label.clone(),
                    opt(r.fidelity),
                    opt(r.concurrence),
                    r.count.to_string(),
                    r.wilson_low.to_string(),
                    r.wilson_high.to_string(),
                    r.agrees_with_paper.to_string(),
                ])?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::File::create(dir.join(format!("{stem}.csv")))?.write_all(self.to_csv_string()?.as_bytes())?;
        std::fs::File::create(dir.join(format!("{stem}.json")))?.write_all(self.to_json_string()?.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shots_rejected() {
        let cfg = ProtocolConfig { shots: 0, ..Default::default() };
        assert!(matches!(run_protocol(&cfg), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn nominal_report() {
        let cfg = ProtocolConfig { shots: 20_000, seed: 11, ..Default::default() };
        let rep = run_protocol(&cfg).unwrap();
        assert_eq!(rep.detected, 20_000);
        assert!((rep.success_probability - 0.5).abs() < 1e-12);
        assert!((rep.success_rate - 0.5).abs() < 0.02);
        assert!((rep.mean_entangled_concurrence.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(rep.table_divergences.len(), 8);
        let csv = rep.to_csv_string().unwrap();
        assert!(csv.starts_with("# braggswap "));
        assert!(csv.lines().nth(2).unwrap().starts_with("pattern,probability,empirical_frequency,classification,paper_label,fidelity,concurrence"));
        assert_eq!(csv, run_protocol(&cfg).unwrap().to_csv_string().unwrap());
    }

    #[test]
    fn lossy_detection_discards() {
        let cfg = ProtocolConfig { shots: 10_000, detection_efficiency: 0.5, ..Default::default() };
        let rep = run_protocol(&cfg).unwrap();
        let kept = rep.detected as f64 / rep.shots as f64;
        assert!((kept - 0.25).abs() < 0.02, "{kept}");
        assert!((rep.success_rate - 0.5).abs() < 0.04);
    }

    #[test]
    fn off_nominal_degrades() {
        let cfg = ProtocolConfig { shots: 1000, time_scale: 1.1, ..Default::default() };
        let f = run_protocol(&cfg).unwrap().mean_entangled_fidelity.unwrap();
        assert!(f > 0.5 && f < 1.0, "{f}");
    }
}
