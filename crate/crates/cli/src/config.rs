//! JSON configuration, flag overrides and unit conversion.

use std::path::{Path, PathBuf};

use braggswap::bragg::{default_halfwidth, recoil_frequency, BraggParams};
use braggswap::metrics::{SweepAxis, SweepSpec};
use braggswap::protocol::ProtocolConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parameters in SI units; rates in rad/s are divided by the recoil
/// frequency of `mass_kg` at `wavelength_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub mass_kg: f64,
    pub wavelength_m: f64,
    pub g_rad_s: f64,
    pub delta_rad_s: f64,
}

/// Parameters already in units of the recoil frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessBlock {
    pub g: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// Largest allowed oracle population error.
    pub max_error: Option<f64>,
    /// Smallest allowed oracle deflection at the interaction time.
    pub min_deflection: Option<f64>,
    pub min_success_rate: Option<f64>,
    /// Smallest allowed mean heralded ψ± fidelity.
    pub min_fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// The configuration file as written.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub physical: Option<PhysicalBlock>,
    pub dimensionless: Option<DimensionlessBlock>,
    pub l0: Option<u32>,
    pub r: Option<u32>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub ladder_halfwidth: Option<u32>,
    pub step: Option<f64>,
    pub time_scale: Option<f64>,
    pub detection_efficiency: Option<f64>,
    pub output_dir: Option<PathBuf>,
    /// Grid points per Pendellösung period.
    pub samples: Option<usize>,
    #[serde(rename = "assert")]
    pub assertions: Option<Assertions>,
    pub sweep: Option<SweepBlock>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub out: Option<PathBuf>,
    pub time_scale: Option<f64>,
    pub l0: Option<u32>,
    pub detection_efficiency: Option<f64>,
}

/// Fully resolved configuration, echoed into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub params: BraggParams,
    /// Recoil frequency in rad/s when physical units were given.
    pub omega_rec_rad_s: Option<f64>,
    pub shots: u64,
    pub seed: u64,
    pub time_scale: f64,
    pub detection_efficiency: f64,
    pub output_dir: PathBuf,
    pub samples: usize,
    #[serde(rename = "assert")]
    pub assertions: Assertions,
    pub sweep: Option<SweepBlock>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("invalid config {}: {e}", path.display())))
    }

    /// Applies overrides, converts units once and validates.
    pub fn resolve(self, o: &Overrides) -> Result<Config, CliError> {
        let (g, delta, omega_rec_rad_s) = match (&self.physical, &self.dimensionless) {
            (Some(_), Some(_)) => {
                return Err(CliError::Invalid(
                    "config must contain exactly one of `physical` and `dimensionless`, found both".into(),
                ))
            }
            (Some(ph), None) => {
                let w = recoil_frequency(ph.mass_kg, ph.wavelength_m).map_err(CliError::from)?;
                (ph.g_rad_s / w, ph.delta_rad_s / w, Some(w))
            }
            (None, Some(d)) => (d.g, d.delta, None),
            (None, None) => {
                return Err(CliError::Invalid(
                    "config must contain exactly one of `physical` and `dimensionless`, found neither".into(),
                ))
            }
        };

        let base = BraggParams::default();
        let l0 = o.l0.or(self.l0).unwrap_or(base.l0);
        let params = BraggParams {
            g,
            delta,
            l0,
            r: self.r.unwrap_or(base.r),
            n: 1,
            ladder_halfwidth: self.ladder_halfwidth.unwrap_or_else(|| default_halfwidth(l0)),
            step: self.step.unwrap_or(base.step),
            omega_rec: 1.0,
        };
        for w in params.validate().map_err(CliError::from)? {
            log::warn!("{w}");
        }

        let cfg = Config {
            params,
            omega_rec_rad_s,
            shots: o.shots.or(self.shots).unwrap_or(100_000),
            seed: o.seed.or(self.seed).unwrap_or(0),
            time_scale: o.time_scale.or(self.time_scale).unwrap_or(1.0),
            detection_efficiency: o.detection_efficiency.or(self.detection_efficiency).unwrap_or(1.0),
            output_dir: o.out.clone().or(self.output_dir).unwrap_or_else(|| PathBuf::from("out")),
            samples: self.samples.unwrap_or(64),
            assertions: self.assertions.unwrap_or_default(),
            sweep: self.sweep,
        };
        cfg.protocol().validate().map_err(CliError::from)?;
        if cfg.samples == 0 {
            return Err(CliError::Invalid("samples: must be at least 1".into()));
        }
        Ok(cfg)
    }
}

impl Config {
    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            params: self.params.clone(),
            time_scale: self.time_scale,
            detection_efficiency: self.detection_efficiency,
            shots: self.shots,
            seed: self.seed,
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let block = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Invalid("the sweep command needs a `sweep` block".into()))?;
        let spec = SweepSpec {
            axis: block.axis,
            values: block.values.clone(),
            base: self.params.clone(),
            shots: self.shots,
            seed: self.seed,
            samples: self.samples,
            time_scale: self.time_scale,
            detection_efficiency: self.detection_efficiency,
        };
        spec.validate().map_err(CliError::from)?;
        Ok(spec)
    }
}
