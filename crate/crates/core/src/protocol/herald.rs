//! Click patterns and the cavity states they herald.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::joint::{JointState, CAVITY_DIM};
use super::modes::{Detector, FockBasis, MODES};
use crate::error::{Error, Result};
use crate::quantum::{bell, concurrence, fidelity, partial_trace, DensityMatrix, StateVector};

/// Tolerance on the total probability of all click patterns.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Patterns below this probability carry no conditional state.
pub const PROBABILITY_FLOOR: f64 = 1e-20;

/// Two detector clicks; `first` is always the higher-numbered detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClickPattern {
    pub first: Detector,
    pub second: Detector,
}

impl ClickPattern {
    pub fn new(a: Detector, b: Detector) -> Self {
        if a >= b {
            ClickPattern { first: a, second: b }
        } else {
            ClickPattern { first: b, second: a }
        }
    }

    pub fn double(d: Detector) -> Self {
        ClickPattern { first: d, second: d }
    }

    pub fn is_double(&self) -> bool {
        self.first == self.second
    }

    /// Pattern registered for a two-atom output occupation.
    pub fn from_occupation(occ: &[u8]) -> Self {
        let mut hits = MODES
            .iter()
            .flat_map(|m| std::iter::repeat_n(m.detector(), occ[m.index()] as usize));
        let a = hits.next().expect("two atoms");
        let b = hits.next().expect("two atoms");
        ClickPattern::new(a, b)
    }

    pub fn occupation(&self) -> Vec<u8> {
        let mut occ = vec![0u8; 4];
        occ[self.first.mode().index()] += 1;
        occ[self.second.mode().index()] += 1;
        occ
    }

    pub fn parse(s: &str) -> Option<Self> {
        let (a, b) = s.split_once('&')?;
        let det = |x: &str| match x.trim() {
            "D1" => Some(Detector::D1),
            "D2" => Some(Detector::D2),
            "D3" => Some(Detector::D3),
            "D4" => Some(Detector::D4),
            _ => None,
        };
        Some(ClickPattern::new(det(a)?, det(b)?))
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}&{}", self.first, self.second)
    }
}

/// Cavity state announced for a click pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeraldClass {
    PsiPlus,
    PsiMinus,
    Product00,
    Product11,
}

impl HeraldClass {
    pub const ALL: [HeraldClass; 4] = [
        HeraldClass::PsiPlus,
        HeraldClass::PsiMinus,
        HeraldClass::Product00,
        HeraldClass::Product11,
    ];

    pub fn target(self) -> StateVector {
        match self {
            HeraldClass::PsiPlus => bell::psi_plus(),
            HeraldClass::PsiMinus => bell::psi_minus(),
            HeraldClass::Product00 => bell::product(0, 0),
            HeraldClass::Product11 => bell::product(1, 1),
        }
    }

    pub fn is_entangled(self) -> bool {
        matches!(self, HeraldClass::PsiPlus | HeraldClass::PsiMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            HeraldClass::PsiPlus => "psi_plus",
            HeraldClass::PsiMinus => "psi_minus",
            HeraldClass::Product00 => "product_00",
            HeraldClass::Product11 => "product_11",
        }
    }
}

impl fmt::Display for HeraldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Announcement rule of the protocol, fixed by the ideal mode network.
///
/// Cross-momentum coincidences on the same atom index (D4&D2, D3&D1)
/// herald ψ⁺, those on opposite indices (D4&D1, D3&D2) herald ψ⁻; two atoms
/// in one undeflected port mean `|00⟩`, in one deflected port `|11⟩`.
/// Same-class coincidences (D4&D3, D2&D1) cannot occur.
pub fn herald_class(pattern: ClickPattern) -> Option<HeraldClass> {
    use Detector::*;
    match (pattern.first, pattern.second) {
        (D4, D2) | (D3, D1) => Some(HeraldClass::PsiPlus),
        (D4, D1) | (D3, D2) => Some(HeraldClass::PsiMinus),
        (D4, D4) | (D3, D3) => Some(HeraldClass::Product00),
        (D2, D2) | (D1, D1) => Some(HeraldClass::Product11),
        _ => None,
    }
}

/// Label the published detector table gives to a pattern, kept for
/// side-by-side comparison with [`herald_class`].
pub fn paper_label(pattern: ClickPattern) -> &'static str {
    use Detector::*;
    match (pattern.first, pattern.second) {
        (D4, D1) | (D3, D2) => "psi_plus",
        (D4, D2) | (D3, D1) => "psi_minus",
        _ if pattern.is_double() => "phi_plus_or_phi_minus",
        _ => "none",
    }
}

/// Whether the published label names the same state as the computed one.
pub fn agrees_with_paper(pattern: ClickPattern) -> bool {
    match herald_class(pattern) {
        Some(c @ (HeraldClass::PsiPlus | HeraldClass::PsiMinus)) => paper_label(pattern) == c.name(),
        Some(_) => false,
        None => paper_label(pattern) == "none",
    }
}

/// All ten two-click patterns in output Fock-basis order.
pub fn all_patterns() -> Vec<ClickPattern> {
    FockBasis::fixed(4, 2)
        .states()
        .iter()
        .map(|occ| ClickPattern::from_occupation(occ))
        .collect()
}

#[derive(Clone, Debug)]
pub struct HeraldResult {
    pub pattern: ClickPattern,
    pub probability: f64,
    /// Normalized cavity state given the pattern; absent for impossible patterns.
    pub conditional_state: Option<DensityMatrix>,
    pub classification: Option<HeraldClass>,
    pub concurrence: Option<f64>,
    pub fidelity_to_class: Option<f64>,
    pub paper_label: &'static str,
}

impl HeraldResult {
    pub fn purity(&self) -> Option<f64> {
        self.conditional_state.as_ref().map(DensityMatrix::purity)
    }
}

/// Exact distribution over the ten click patterns.
#[derive(Clone, Debug)]
pub struct ClickDistribution {
    pub results: Vec<HeraldResult>,
}

impl ClickDistribution {
    pub fn get(&self, pattern: ClickPattern) -> Option<&HeraldResult> {
        self.results.iter().find(|r| r.pattern == pattern)
    }

    pub fn probability(&self, pattern: ClickPattern) -> f64 {
        self.get(pattern).map_or(0.0, |r| r.probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.results.iter().map(|r| r.probability).sum()
    }

    /// Probability of heralding an entangled (ψ±) cavity state.
    pub fn success_probability(&self) -> f64 {
        self.results
            .iter()
            .filter(|r| r.classification.is_some_and(HeraldClass::is_entangled))
            .map(|r| r.probability)
            .sum()
    }

    /// Probability-weighted mean of `f` over patterns heralding one of `classes`.
    pub fn weighted_mean(&self, classes: &[HeraldClass], f: impl Fn(&HeraldResult) -> Option<f64>) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for r in &self.results {
            if r.classification.is_some_and(|c| classes.contains(&c)) && r.probability > PROBABILITY_FLOOR {
                if let Some(v) = f(r) {
                    num += r.probability * v;
                    den += r.probability;
                }
            }
        }
        (den > 0.0).then(|| num / den)
    }

    /// Mean fidelity of the heralded ψ± states.
    pub fn mean_entangled_fidelity(&self) -> Option<f64> {
        self.weighted_mean(&[HeraldClass::PsiPlus, HeraldClass::PsiMinus], |r| r.fidelity_to_class)
    }

    pub fn mean_entangled_concurrence(&self) -> Option<f64> {
        self.weighted_mean(&[HeraldClass::PsiPlus, HeraldClass::PsiMinus], |r| r.concurrence)
    }
}

/// Passes the atoms of `s` through the beam splitters and computes, for
/// every click pattern, its probability and the conditional cavity state
/// `Tr_atoms[(I ⊗ Π) ρ (I ⊗ Π)] / p`.
pub fn click_distribution(s: &JointState) -> Result<ClickDistribution> {
    let out = s.after_beam_splitters()?;
    let fock = out.fock().clone();
    let rho = DensityMatrix::from_pure(&out.state)?;

    let mut results = Vec::with_capacity(fock.len());
    for (f, occ) in fock.states().iter().enumerate() {
        let pattern = ClickPattern::from_occupation(occ);
        let idx: Vec<usize> = (0..CAVITY_DIM).map(|c| c * fock.len() + f).collect();
        let probability: f64 = idx.iter().map(|&i| rho.matrix()[(i, i)].re).sum();
        let classification = herald_class(pattern);

        let (conditional_state, concurrence_v, fidelity_v) = if probability > PROBABILITY_FLOOR {
            let mut projected = nalgebra::DMatrix::zeros(rho.dim(), rho.dim());
            for &i in &idx {
                for &j in &idx {
                    projected[(i, j)] = rho.matrix()[(i, j)];
                }
            }
            let projected = DensityMatrix::from_unnormalized(projected)?;
            let cavity = partial_trace(&projected, &[2, 2, fock.len()], &[0, 1])?;
            let c = concurrence(&cavity)?;
            let fid = classification
                .map(|cls| fidelity(&cavity, &cls.target()))
                .transpose()?;
            (Some(cavity), Some(c), fid)
        } else {
            (None, None, None)
        };

        results.push(HeraldResult {
            pattern,
            probability,
            conditional_state,
            classification,
            concurrence: concurrence_v,
            fidelity_to_class: fidelity_v,
            paper_label: paper_label(pattern),
        });
    }

    let dist = ClickDistribution { results };
    let sum = dist.total_probability();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::ProbabilityLeak { sum });
    }
    Ok(dist)
}
