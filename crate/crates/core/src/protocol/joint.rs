//! The two atom–cavity pairs combined into one state over
//! `(cavity 1) ⊗ (cavity 2) ⊗ (two-atom Fock space of a₁ a₂ b₁ b₂)`.

use num_complex::Complex64;

use super::modes::{beam_splitter_unitary, FockBasis, Mode};
use crate::bragg::{bragg_phase, entangle_pair, pair_state_at, pi_time, BraggParams, PAIR_LABELS};
use crate::error::{Error, Result};
use crate::quantum::state::{I, ZERO};
use crate::quantum::{partial_trace, DensityMatrix, Operator, StateVector};

/// Residual below which the EPR decomposition is accepted.
pub const EPR_RESIDUAL_TOL: f64 = 1e-12;

/// Number of cavity basis states (two qubits).
pub const CAVITY_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct JointState {
    pub state: StateVector,
    /// Effective Bragg phase φ: each pair is `(|0,P₊⟩ + i e^{−iφ}|1,P₋⟩)/√2`
    /// at nominal timing.
    pub phase: f64,
    fock: FockBasis,
}

fn joint_labels(fock: &FockBasis) -> Vec<String> {
    let mut labels = Vec::with_capacity(CAVITY_DIM * fock.len());
    for c1 in 0..2 {
        for c2 in 0..2 {
            for f in 0..fock.len() {
                labels.push(format!("{c1}{c2};{}", fock.label(f)));
            }
        }
    }
    labels
}

impl JointState {
    /// Combines two pair states over [`PAIR_LABELS`] into the joint state.
    /// Atom 1 populates modes a₁/b₁ and atom 2 populates a₂/b₂, so each
    /// product term is a singly occupied Fock state.
    pub fn from_pairs(pair1: &StateVector, pair2: &StateVector, phase: f64) -> Result<Self> {
        for pair in [pair1, pair2] {
            if pair.labels().iter().map(String::as_str).ne(PAIR_LABELS) {
                return Err(Error::param("pair", "expected the cavity ⊗ momentum pair basis"));
            }
        }
        let fock = FockBasis::fixed(4, 2);
        let mut amps = vec![ZERO; CAVITY_DIM * fock.len()];
        let modes1 = [Mode::A1, Mode::B1];
        let modes2 = [Mode::A2, Mode::B2];
        for c1 in 0..2 {
            for (s1, &m1) in modes1.iter().enumerate() {
                let a1 = pair1.amps()[2 * c1 + s1];
                for c2 in 0..2 {
                    for (s2, &m2) in modes2.iter().enumerate() {
                        let a2 = pair2.amps()[2 * c2 + s2];
                        let mut occ = vec![0u8; 4];
                        occ[m1.index()] += 1;
                        occ[m2.index()] += 1;
                        let f = fock.index_of(&occ).expect("two distinct modes");
                        amps[(2 * c1 + c2) * fock.len() + f] += a1 * a2;
                    }
                }
            }
        }
        let state = StateVector::new(joint_labels(&fock), amps)?;
        Ok(JointState { state, phase, fock })
    }

    pub fn fock(&self) -> &FockBasis {
        &self.fock
    }

    /// Amplitude of `|c₁c₂⟩ ⊗ |occupation⟩`.
    pub fn amplitude(&self, c1: usize, c2: usize, occupation: &[u8]) -> Complex64 {
        self.fock
            .index_of(occupation)
            .map_or(ZERO, |f| self.state.amps()[(2 * c1 + c2) * self.fock.len() + f])
    }

    /// State of the two cavities with the atoms traced out.
    pub fn cavity_state(&self) -> Result<DensityMatrix> {
        let rho = DensityMatrix::from_pure(&self.state)?;
        partial_trace(&rho, &[2, 2, self.fock.len()], &[0, 1])
    }

    /// Applies the beam-splitter network to the atomic modes.
    pub fn after_beam_splitters(&self) -> Result<JointState> {
        let bs = joint_beam_splitter()?;
        Ok(JointState {
            state: bs.apply(&self.state)?,
            phase: self.phase,
            fock: self.fock.clone(),
        })
    }
}

/// `I_cavities ⊗ U_BS` on the 40-dimensional joint space.
pub fn joint_beam_splitter() -> Result<Operator> {
    let bs = beam_splitter_unitary()?;
    Operator::new(nalgebra::DMatrix::identity(CAVITY_DIM, CAVITY_DIM).kronecker(bs.matrix()))
}

/// Joint state at the pi time:
/// `½[|00⟩a₁†a₂† + ie^{−iφ}|01⟩a₁†b₂† + ie^{−iφ}|10⟩b₁†a₂† − e^{−2iφ}|11⟩b₁†b₂†]|vac⟩`.
pub fn assemble_joint_state(p: &BraggParams) -> Result<JointState> {
    let pair = entangle_pair(p)?;
    let phase = effective_phase(p);
    JointState::from_pairs(&pair, &pair, phase)
}

/// Joint state after an interaction of `time_scale` times the pi time,
/// keeping the undeflected one-photon term.
pub fn assemble_joint_state_at(p: &BraggParams, time_scale: f64) -> Result<JointState> {
    p.validate()?;
    if !(time_scale >= 0.0 && time_scale.is_finite()) {
        return Err(Error::param("time_scale", format!("must be finite and >= 0, got {time_scale}")));
    }
    let t = time_scale * pi_time(&p.with_photons(1))?;
    let pair = pair_state_at(p, t)?;
    JointState::from_pairs(&pair, &pair, effective_phase(p))
}

/// Bragg phase with the `sin(rπ/2)` sign folded in.
fn effective_phase(p: &BraggParams) -> f64 {
    let phi = bragg_phase(p);
    if p.r % 4 == 1 {
        phi
    } else {
        phi + std::f64::consts::PI
    }
}

/// One branch of the EPR decomposition: a cavity Bell state paired with a
/// two-atom momentum state.
#[derive(Clone, Debug)]
pub struct EprBranch {
    pub cavity: &'static str,
    pub momentum: &'static str,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct EprCheck {
    pub holds: bool,
    pub residual: f64,
    pub branches: Vec<EprBranch>,
}

/// Momentum product state `|P^{(1)}_{s₁}, P^{(2)}_{s₂}⟩`; `false` is `+l₀`.
fn momentum_occupation(deflected1: bool, deflected2: bool) -> Vec<u8> {
    let mut occ = vec![0u8; 4];
    occ[if deflected1 { Mode::B1 } else { Mode::A1 }.index()] = 1;
    occ[if deflected2 { Mode::B2 } else { Mode::A2 }.index()] = 1;
    occ
}

/// Rebuilds the state as four cavity-Bell ⊗ momentum-EPR branches and
/// compares it with `s`:
///
/// ```text
/// ¼(|P₊P₊⟩ + e^{−2iφ}|P₋P₋⟩)(|00⟩ − |11⟩) + ¼(|P₊P₊⟩ − e^{−2iφ}|P₋P₋⟩)(|00⟩ + |11⟩)
/// + ¼ie^{−iφ}(|P₊P₋⟩ + |P₋P₊⟩)(|01⟩ + |10⟩) + ¼ie^{−iφ}(|P₊P₋⟩ − |P₋P₊⟩)(|01⟩ − |10⟩)
/// ```
///
/// Cavity kets are `|c₁c₂⟩`.
pub fn epr_decomposition_check(s: &JointState) -> Result<EprCheck> {
    let fock = s.fock();
    let e1 = Complex64::from_polar(1.0, -s.phase);
    let e2 = e1 * e1;
    let quarter = Complex64::new(0.25, 0.0);

    // (coefficient, [(deflected1, deflected2, sign)], [(c1, c2, sign)])
    type Term = (Complex64, Vec<(bool, bool, Complex64)>, Vec<(usize, usize, f64)>);
    let one = Complex64::new(1.0, 0.0);
    let terms: Vec<Term> = vec![
        (quarter, vec![(false, false, one), (true, true, e2)], vec![(0, 0, 1.0), (1, 1, -1.0)]),
        (quarter, vec![(false, false, one), (true, true, -e2)], vec![(0, 0, 1.0), (1, 1, 1.0)]),
        (quarter * I * e1, vec![(false, true, one), (true, false, one)], vec![(0, 1, 1.0), (1, 0, 1.0)]),
        (quarter * I * e1, vec![(false, true, one), (true, false, -one)], vec![(0, 1, 1.0), (1, 0, -1.0)]),
    ];

    let mut rebuilt = vec![ZERO; s.state.dim()];
    for (coef, momenta, cavities) in &terms {
        for &(d1, d2, ms) in momenta {
            let f = fock.index_of(&momentum_occupation(d1, d2)).expect("valid occupation");
            for &(c1, c2, cs) in cavities {
                rebuilt[(2 * c1 + c2) * fock.len() + f] += coef * ms * cs;
            }
        }
    }
    let rebuilt = s.state.with_amps(nalgebra::DVector::from_vec(rebuilt))?;
    let residual = s.state.max_abs_diff(&rebuilt)?;
    let branches = vec![
        EprBranch { cavity: "phi_minus", momentum: "P+P+ + e^{-2i phi} P-P-", weight: 0.25 },
        EprBranch { cavity: "phi_plus", momentum: "P+P+ - e^{-2i phi} P-P-", weight: 0.25 },
        EprBranch { cavity: "psi_plus", momentum: "P+P- + P-P+", weight: 0.25 },
        EprBranch { cavity: "psi_minus", momentum: "P+P- - P-P+", weight: 0.25 },
    ];
    Ok(EprCheck {
        holds: residual <= EPR_RESIDUAL_TOL,
        residual,
        branches,
    })
}
