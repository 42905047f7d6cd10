//! Atomic momentum modes, bosonic Fock spaces and the beam-splitter network.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::state::{I, ZERO};
use crate::quantum::Operator;

/// Input modes, in the fixed index order used throughout.
///
/// `A*` are the undeflected `P_{+l₀}` modes and `B*` the deflected `P_{−l₀}`
/// modes of atoms 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A1 = 0,
    A2 = 1,
    B1 = 2,
    B2 = 3,
}

pub const MODES: [Mode; 4] = [Mode::A1, Mode::A2, Mode::B1, Mode::B2];

impl Mode {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Detector watching the output port with the same index.
    pub fn detector(self) -> Detector {
        match self {
            Mode::A1 => Detector::D4,
            Mode::A2 => Detector::D3,
            Mode::B1 => Detector::D2,
            Mode::B2 => Detector::D1,
        }
    }

    pub fn deflected(self) -> bool {
        matches!(self, Mode::B1 | Mode::B2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
}

impl Detector {
    pub fn number(self) -> u8 {
        match self {
            Detector::D1 => 1,
            Detector::D2 => 2,
            Detector::D3 => 3,
            Detector::D4 => 4,
        }
    }

    /// Output mode observed by this detector.
    pub fn mode(self) -> Mode {
        match self {
            Detector::D4 => Mode::A1,
            Detector::D3 => Mode::A2,
            Detector::D2 => Mode::B1,
            Detector::D1 => Mode::B2,
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.number())
    }
}

/// Occupation-number basis for a fixed set of particle numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    states: Vec<Vec<u8>>,
}

impl FockBasis {
    /// All occupations of `modes` modes with exactly `particles` bosons,
    /// in descending lexicographic order.
    pub fn fixed(modes: usize, particles: usize) -> Self {
        let mut states = Vec::new();
        let mut cur = vec![0u8; modes];
        fill(&mut states, &mut cur, 0, particles);
        FockBasis { modes, states }
    }

    /// Every sector from 0 up to `max_particles` bosons, lowest sector first.
    pub fn up_to(modes: usize, max_particles: usize) -> Self {
        let states = (0..=max_particles)
            .flat_map(|n| FockBasis::fixed(modes, n).states)
            .collect();
        FockBasis { modes, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.states.iter().position(|s| s == occupation)
    }

    /// Label such as `m=1001` (occupations in mode order a₁ a₂ b₁ b₂).
    pub fn label(&self, index: usize) -> String {
        let digits: String = self.states[index].iter().map(|n| n.to_string()).collect();
        format!("m={digits}")
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u8;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u8;
        fill(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

/// Single-particle splitter matrix `u[out, in]` on the four modes.
///
/// `a₁ → (a₁′ + i a₂′)/√2`, `a₂ → (i a₁′ + a₂′)/√2`, and likewise for
/// `b₁`, `b₂`.
pub fn single_particle_splitter() -> DMatrix<Complex64> {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let is = I * FRAC_1_SQRT_2;
    let mut u = DMatrix::from_element(4, 4, ZERO);
    for (x, y) in [(Mode::A1.index(), Mode::A2.index()), (Mode::B1.index(), Mode::B2.index())] {
        u[(x, x)] = s;
        u[(y, x)] = is;
        u[(x, y)] = is;
        u[(y, y)] = s;
    }
    u
}

/// Permanent of a square matrix by expansion over permutations.
/// Intended for the handful of particles in this protocol.
pub fn permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut used = vec![false; n];
    perm_rec(m, 0, &mut used)
}

fn perm_rec(m: &DMatrix<Complex64>, row: usize, used: &mut [bool]) -> Complex64 {
    if row == m.nrows() {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc = ZERO;
    for col in 0..m.ncols() {
        if used[col] || m[(row, col)] == ZERO {
            continue;
        }
        used[col] = true;
        acc += m[(row, col)] * perm_rec(m, row + 1, used);
        used[col] = false;
    }
    acc
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

fn mode_list(occ: &[u8]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(m, &k)| std::iter::repeat_n(m, k as usize))
        .collect()
}

/// Lifts a single-particle unitary to a bosonic Fock basis:
/// `⟨out|U|in⟩ = perm(u[out modes, in modes]) / √(∏ n_in! ∏ n_out!)`.
/// Sectors with different particle number never couple.
pub fn lift_to_fock(u: &DMatrix<Complex64>, basis: &FockBasis) -> Result<Operator> {
    let dim = basis.len();
    let mut big = DMatrix::from_element(dim, dim, ZERO);
    let lists: Vec<Vec<usize>> = basis.states().iter().map(|s| mode_list(s)).collect();
    let norms: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| s.iter().map(|&k| factorial(k)).product::<f64>().sqrt())
        .collect();
    for (j, ins) in lists.iter().enumerate() {
        for (i, outs) in lists.iter().enumerate() {
            if ins.len() != outs.len() {
                continue;
            }
            let sub = DMatrix::from_fn(outs.len(), ins.len(), |r, c| u[(outs[r], ins[c])]);
            big[(i, j)] = permanent(&sub) / (norms[i] * norms[j]);
        }
    }
    Operator::new(big)
}

/// The beam-splitter network on the two-atom Fock space (10 states).
pub fn beam_splitter_unitary() -> Result<Operator> {
    lift_to_fock(&single_particle_splitter(), &FockBasis::fixed(4, 2))
}
