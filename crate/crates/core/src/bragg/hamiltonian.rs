use nalgebra::DMatrix;
use num_complex::Complex64;

use super::BraggParams;
use crate::error::Result;
use crate::quantum::Operator;

/// An operator together with the labels of the basis it acts on.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub labels: Vec<String>,
    pub operator: Operator,
}

impl Hamiltonian {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Effective ground-state Hamiltonian after adiabatic elimination of the
/// excited state, on the basis `(photon number n ∈ 0..=p.n) ⊗ (ladder l)`.
///
/// Diagonal: `ω_rec(p_l² − p_{l₀}²) − g²n/2Δ`. Off-diagonal between `l` and
/// `l ± 2`: `−g²n/4Δ`. Photon blocks do not couple.
pub fn build_effective_hamiltonian(p: &BraggParams) -> Result<Hamiltonian> {
    p.validate()?;
    let ladder = p.ladder_indices();
    let sites = ladder.len();
    let blocks = p.n as usize + 1;
    let dim = blocks * sites;
    let p0 = p.incident_momentum();

    let mut labels = Vec::with_capacity(dim);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..=p.n {
        let base = n as usize * sites;
        let shift = p.uniform_shift(n);
        let coupling = -p.ladder_coupling(n);
        for (k, &l) in ladder.iter().enumerate() {
            labels.push(super::ladder_label(n, l));
            let pl = p.momentum(l);
            m[(base + k, base + k)] = re(p.omega_rec * (pl * pl - p0 * p0) + shift);
            if k + 1 < sites && coupling != 0.0 {
                m[(base + k, base + k + 1)] = re(coupling);
                m[(base + k + 1, base + k)] = re(coupling);
            }
        }
    }
    Ok(Hamiltonian {
        labels,
        operator: Operator::new(m)?,
    })
}

/// Full atom–field Hamiltonian in the frame rotating at the cavity
/// frequency, restricted to the excitation manifold of `p.n`:
/// ground states `|g, n, l even⟩` and excited states `|e, n−1, l odd⟩`.
///
/// The excited manifold sits `Δ` above the ground manifold, and `cos kx`
/// couples `|g, n, l⟩` to `|e, n−1, l ± 1⟩` with strength `g√n/2`.
/// With `n = 0` the excited manifold is empty.
pub fn build_full_hamiltonian(p: &BraggParams) -> Result<Hamiltonian> {
    p.validate()?;
    let ground = p.ladder_indices();
    let excited: Vec<i64> = if p.n == 0 {
        Vec::new()
    } else {
        let half = p.ladder_halfwidth as i64;
        (-half - 1..=half).map(|k| 2 * k + 1).collect()
    };
    let dim = ground.len() + excited.len();
    let p0 = p.incident_momentum();
    let kinetic = |l: i64| {
        let pl = p.momentum(l);
        p.omega_rec * (pl * pl - p0 * p0)
    };

    let mut labels = Vec::with_capacity(dim);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (k, &l) in ground.iter().enumerate() {
        labels.push(format!("g;n={};l={}", p.n, l));
        m[(k, k)] = re(kinetic(l));
    }
    let off = ground.len();
    let coupling = p.g * (p.n as f64).sqrt() / 2.0;
    for (k, &l) in excited.iter().enumerate() {
        let idx = off + k;
        labels.push(format!("e;n={};l={}", p.n - 1, l));
        m[(idx, idx)] = re(kinetic(l) + p.delta);
        for (j, &lg) in ground.iter().enumerate() {
            if (lg - l).abs() == 1 && coupling != 0.0 {
                m[(idx, j)] = re(coupling);
                m[(j, idx)] = re(coupling);
            }
        }
    }
    Ok(Hamiltonian {
        labels,
        operator: Operator::new(m)?,
    })
}
