//! Brute-force evolution on the truncated momentum ladder. This is the
//! reference the closed-form amplitudes are checked against.

use num_complex::Complex64;

use super::{build_effective_hamiltonian, build_full_hamiltonian, pi_time, BraggParams, BOUNDARY_WARN};
use crate::error::{Error, Result};
use crate::quantum::{evolve, evolve_series, StateVector};

pub fn ladder_label(n: u32, l: i64) -> String {
    format!("n={n};l={l}")
}

/// A state on the `(n, l)` ladder at some time, with truncation diagnostics.
#[derive(Clone, Debug)]
pub struct LadderState {
    pub params: BraggParams,
    pub time: f64,
    pub state: StateVector,
    /// Population on the outermost ladder sites.
    pub boundary_population: f64,
    /// Set when `boundary_population` exceeds [`BOUNDARY_WARN`].
    pub truncation_warning: bool,
}

impl LadderState {
    fn new(params: BraggParams, time: f64, state: StateVector) -> Self {
        let edge = 2 * params.ladder_halfwidth as i64;
        let boundary_population: f64 = (0..=params.n)
            .flat_map(|n| [ladder_label(n, edge), ladder_label(n, -edge)])
            .filter_map(|l| state.amplitude(&l))
            .map(|a| a.norm_sqr())
            .sum();
        let truncation_warning = boundary_population > BOUNDARY_WARN;
        if truncation_warning {
            log::warn!(
                "ladder boundary population {boundary_population:e} at t = {time}; increase ladder_halfwidth"
            );
        }
        LadderState {
            params,
            time,
            state,
            boundary_population,
            truncation_warning,
        }
    }

    pub fn population(&self, n: u32, l: i64) -> f64 {
        self.state
            .amplitude(&ladder_label(n, l))
            .map_or(0.0, |a| a.norm_sqr())
    }

    pub fn amplitude(&self, n: u32, l: i64) -> Complex64 {
        self.state
            .amplitude(&ladder_label(n, l))
            .unwrap_or_default()
    }

    /// Population left in `P_{+l₀}` in photon block `p.n`.
    pub fn undeflected(&self) -> f64 {
        self.population(self.params.n, 0)
    }

    /// Population in `P_{−l₀}` in photon block `p.n`.
    pub fn deflected(&self) -> f64 {
        self.population(self.params.n, self.params.deflected_index())
    }

    /// Population outside the two Bragg states, summed over photon blocks.
    pub fn outside_bragg_pair(&self) -> f64 {
        let keep = [0, self.params.deflected_index()];
        self.params
            .ladder_indices()
            .into_iter()
            .filter(|l| !keep.contains(l))
            .flat_map(|l| (0..=self.params.n).map(move |n| (n, l)))
            .map(|(n, l)| self.population(n, l))
            .sum()
    }

    /// Removes the uniform light shift `−g²n/2Δ` accumulated by each
    /// photon block, i.e. multiplies block `n` by `exp(−i g²n t / 2Δ)`.
    /// The closed-form amplitudes are expressed in this frame.
    pub fn without_uniform_shift(&self) -> Result<StateVector> {
        let mut amps = self.state.amps().clone();
        let sites = self.params.ladder_indices().len();
        for n in 0..=self.params.n {
            let phase = Complex64::from_polar(1.0, self.params.uniform_shift(n) * self.time);
            for k in 0..sites {
                amps[n as usize * sites + k] *= phase;
            }
        }
        self.state.with_amps(amps)
    }

    /// Projection onto the four pair labels of [`super::PAIR_LABELS`],
    /// taken in the frame without the uniform shift.
    pub fn pair_projection(&self) -> Result<StateVector> {
        let frame = self.without_uniform_shift()?;
        let defl = self.params.deflected_index();
        let pick = |n: u32, l: i64| frame.amplitude(&ladder_label(n, l)).unwrap_or_default();
        StateVector::new(
            super::PAIR_LABELS.iter().map(|s| s.to_string()).collect(),
            vec![pick(0, 0), pick(0, defl), pick(1, 0), pick(1, defl)],
        )
    }
}

fn initial_state(p: &BraggParams, labels: &[String]) -> Result<StateVector> {
    let mut amps = vec![Complex64::default(); labels.len()];
    let target = ladder_label(p.n, 0);
    let idx = labels
        .iter()
        .position(|l| *l == target)
        .ok_or_else(|| Error::param("n", "initial ladder site missing"))?;
    amps[idx] = Complex64::new(1.0, 0.0);
    StateVector::new(labels.to_vec(), amps)
}

/// Evolve `|n = p.n, l = 0⟩` for time `t` under the effective Hamiltonian.
pub fn ladder_evolve(p: &BraggParams, t: f64) -> Result<LadderState> {
    let h = build_effective_hamiltonian(p)?;
    let psi0 = initial_state(p, &h.labels)?;
    let state = evolve(&h.operator, &psi0, t)?;
    Ok(LadderState::new(p.clone(), t, state))
}

/// Evolve an arbitrary ladder state (labels must match the ladder basis).
pub fn ladder_evolve_from(p: &BraggParams, psi0: &StateVector, t: f64) -> Result<LadderState> {
    let h = build_effective_hamiltonian(p)?;
    if psi0.labels() != h.labels.as_slice() {
        return Err(Error::param("psi0", "basis does not match the ladder basis"));
    }
    let state = evolve(&h.operator, psi0, t)?;
    Ok(LadderState::new(p.clone(), t, state))
}

/// Ladder states at each of `times` (ascending) from `|p.n, 0⟩`.
pub fn ladder_series(p: &BraggParams, times: &[f64]) -> Result<Vec<LadderState>> {
    let h = build_effective_hamiltonian(p)?;
    let psi0 = initial_state(p, &h.labels)?;
    let states = evolve_series(&h.operator, &psi0, times)?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, s)| LadderState::new(p.clone(), t, s))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdiabaticityReport {
    /// Largest excited-manifold population seen on the time grid.
    pub max_excited: f64,
    /// Ground-state population in `P_{−l₀}` at the end of the run.
    pub final_deflected: f64,
    pub duration: f64,
}

/// Runs the full model over one pi time on `samples + 1` equally spaced
/// times and records the excited-state population.
pub fn adiabaticity_check(p: &BraggParams, samples: usize) -> Result<AdiabaticityReport> {
    let h = build_full_hamiltonian(p)?;
    let duration = pi_time(p)?;
    let start = format!("g;n={};l=0", p.n);
    let mut amps = vec![Complex64::default(); h.dim()];
    amps[h.index_of(&start).expect("incident ground site")] = Complex64::new(1.0, 0.0);
    let psi0 = StateVector::new(h.labels.clone(), amps)?;

    let samples = samples.max(1);
    let times: Vec<f64> = (0..=samples).map(|k| duration * k as f64 / samples as f64).collect();
    let states = evolve_series(&h.operator, &psi0, &times)?;
    let excited: Vec<usize> = h
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.starts_with("e;"))
        .map(|(i, _)| i)
        .collect();
    let max_excited = states
        .iter()
        .map(|s| excited.iter().map(|&i| s.amps()[i].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let last = states.last().expect("at least one sample");
    let defl = format!("g;n={};l={}", p.n, p.deflected_index());
    let final_deflected = last.amplitude(&defl).map_or(0.0, |a| a.norm_sqr());
    Ok(AdiabaticityReport {
        max_excited,
        final_deflected,
        duration,
    })
}
