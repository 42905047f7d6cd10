//! Atom–cavity Bragg scattering in the dispersive regime.
//!
//! Units: ħ = 1, energies and frequencies in units of the recoil frequency
//! `ω_rec = ħk²/2M`, momenta in units of ħk. An atom entering with momentum
//! `P_{l₀} = (l₀/2)ħk` is coupled by the standing wave `cos 2kx` to the
//! ladder `P̃_l = P_{l₀} + l ħk` for even `l`; Bragg resonance connects
//! `l = 0` to `l = −l₀`.

mod analytic;
mod hamiltonian;
mod ladder;

pub use analytic::{
    analytic_amplitudes, bragg_phase, entangle_pair, pair_state_at, pendellosung_a, pendellosung_b,
    pi_time, PAIR_LABELS,
};
pub use hamiltonian::{build_effective_hamiltonian, build_full_hamiltonian, Hamiltonian};
pub use ladder::{adiabaticity_check, ladder_evolve, ladder_evolve_from, ladder_label, ladder_series, AdiabaticityReport, LadderState};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Smallest accepted Δ/g.
pub const MIN_DETUNING_RATIO: f64 = 10.0;
/// Below this Δ/g a dispersive-regime warning is raised.
pub const WARN_DETUNING_RATIO: f64 = 50.0;
/// Boundary population above which a ladder run is flagged as too tightly truncated.
pub const BOUNDARY_WARN: f64 = 1e-6;

/// `ω_rec = ħk²/2M` with `k = 2π/λ`, in rad/s.
pub fn recoil_frequency(mass_kg: f64, wavelength_m: f64) -> Result<f64> {
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(Error::param("mass_kg", format!("must be positive, got {mass_kg}")));
    }
    if !(wavelength_m > 0.0 && wavelength_m.is_finite()) {
        return Err(Error::param(
            "wavelength_m",
            format!("must be positive, got {wavelength_m}"),
        ));
    }
    let k = 2.0 * std::f64::consts::PI / wavelength_m;
    Ok(HBAR * k * k / (2.0 * mass_kg))
}

/// Parameters of one atom–cavity Bragg interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraggParams {
    /// Vacuum Rabi frequency.
    pub g: f64,
    /// Detuning Δ = ω₀ − ν.
    pub delta: f64,
    /// Bragg order label: incident momentum is `(l0/2)ħk`. Even, at least 2.
    pub l0: u32,
    /// Odd multiplier on the Pendellösung half period.
    pub r: u32,
    /// Photon number seen by the atom.
    pub n: u32,
    /// Ladder spans `l ∈ {−2L, …, 2L}` in steps of 2.
    pub ladder_halfwidth: u32,
    /// Maximum RK4 step.
    pub step: f64,
    /// Recoil frequency in the working units (1 unless rescaled).
    pub omega_rec: f64,
}

impl Default for BraggParams {
    fn default() -> Self {
        BraggParams {
            g: 1.0,
            delta: 100.0,
            l0: 2,
            r: 1,
            n: 1,
            ladder_halfwidth: default_halfwidth(2),
            step: 1e-3,
            omega_rec: 1.0,
        }
    }
}

/// Default ladder truncation for a given order: `l0/2 + 6`.
pub fn default_halfwidth(l0: u32) -> u32 {
    l0 / 2 + 6
}

impl BraggParams {
    /// Default parameters at Bragg order `l0`, with the matching default ladder.
    pub fn with_order(l0: u32) -> Self {
        BraggParams {
            l0,
            ladder_halfwidth: default_halfwidth(l0),
            ..Default::default()
        }
    }

    /// Checks every invariant. Returns human-readable warnings for
    /// parameters that are valid but outside the comfortable regime;
    /// logging them is left to the caller.
    pub fn validate(&self) -> Result<Vec<String>> {
        for (name, v) in [("g", self.g), ("delta", self.delta), ("step", self.step), ("omega_rec", self.omega_rec)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.g < 0.0 {
            return Err(Error::param("g", "must be non-negative"));
        }
        if self.delta <= 0.0 {
            return Err(Error::param("delta", "must be positive"));
        }
        if self.l0 < 2 || !self.l0.is_multiple_of(2) {
            return Err(Error::param("l0", format!("must be even and >= 2, got {}", self.l0)));
        }
        if self.r % 2 != 1 {
            return Err(Error::param("r", format!("must be odd and >= 1, got {}", self.r)));
        }
        if self.step <= 0.0 {
            return Err(Error::param("step", "must be positive"));
        }
        if self.omega_rec <= 0.0 {
            return Err(Error::param("omega_rec", "must be positive"));
        }
        let min_l = self.l0 / 2 + 2;
        if self.ladder_halfwidth < min_l {
            return Err(Error::param(
                "ladder_halfwidth",
                format!("must be >= l0/2 + 2 = {min_l}, got {}", self.ladder_halfwidth),
            ));
        }
        let mut warnings = Vec::new();
        if self.g > 0.0 {
            let ratio = self.delta / self.g;
            if ratio < MIN_DETUNING_RATIO {
                return Err(Error::param(
                    "delta",
                    format!("delta/g = {ratio} is below the dispersive limit {MIN_DETUNING_RATIO}"),
                ));
            }
            if ratio < WARN_DETUNING_RATIO {
                let w = format!("delta/g = {ratio} is below {WARN_DETUNING_RATIO}; adiabatic elimination is marginal");
                warnings.push(w);
            }
        }
        Ok(warnings)
    }

    /// Incident momentum `l0/2` in units of ħk.
    pub fn incident_momentum(&self) -> f64 {
        self.l0 as f64 / 2.0
    }

    /// Momentum of ladder index `l`, in units of ħk.
    pub fn momentum(&self, l: i64) -> f64 {
        self.incident_momentum() + l as f64
    }

    /// Ladder indices `−2L, −2L+2, …, 2L`.
    pub fn ladder_indices(&self) -> Vec<i64> {
        let half = self.ladder_halfwidth as i64;
        (-half..=half).map(|k| 2 * k).collect()
    }

    /// Ladder index of the deflected state `P_{−l₀}`.
    pub fn deflected_index(&self) -> i64 {
        -(self.l0 as i64)
    }

    /// Off-diagonal coupling magnitude `g²n/4Δ` on the ladder.
    pub fn ladder_coupling(&self, n: u32) -> f64 {
        self.g * self.g * n as f64 / (4.0 * self.delta)
    }

    /// Uniform diagonal light shift `−g²n/2Δ` of photon block `n`.
    pub fn uniform_shift(&self, n: u32) -> f64 {
        -self.g * self.g * n as f64 / (2.0 * self.delta)
    }

    /// Copy with a different photon number.
    pub fn with_photons(&self, n: u32) -> Self {
        BraggParams { n, ..self.clone() }
    }
}
