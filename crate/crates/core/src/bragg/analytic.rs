//! Closed-form two-mode Bragg amplitudes.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::BraggParams;
use crate::error::{Error, Result};
use crate::quantum::state::{I, ZERO};
use crate::quantum::StateVector;

/// Basis of a single atom–cavity pair: cavity Fock slowest, momentum fastest.
pub const PAIR_LABELS: [&str; 4] = ["0;+l0", "0;-l0", "1;+l0", "1;-l0"];

/// Pendellösung frequency `|B_n|`.
///
/// First order: `g²n/2Δ`. Higher orders:
/// `(g²n/2Δ)^{l₀/2} / [(2ω_rec)^{l₀/2−1} · (l₀−2)(l₀−4)⋯4·2]`.
pub fn pendellosung_b(p: &BraggParams) -> f64 {
    let base = p.g * p.g * p.n as f64 / (2.0 * p.delta);
    if p.l0 == 2 {
        return base;
    }
    let half = (p.l0 / 2) as i32;
    let even_factorial: f64 = (1..half).map(|j| 2.0 * j as f64).product();
    base.powi(half) / ((2.0 * p.omega_rec).powi(half - 1) * even_factorial)
}

/// Phase rate `A_n`: zero at first order, otherwise
/// `−(g²n/4Δ)² / [ω_rec (l₀−2) · 2]`.
pub fn pendellosung_a(p: &BraggParams) -> f64 {
    if p.l0 == 2 {
        return 0.0;
    }
    let v = p.g * p.g * p.n as f64 / (4.0 * p.delta);
    -(v * v) / (p.omega_rec * (p.l0 as f64 - 2.0) * 2.0)
}

/// `(C_{n,+l₀}(t), C_{n,−l₀}(t))` for an atom entering in `+l₀`.
pub fn analytic_amplitudes(p: &BraggParams, t: f64) -> (Complex64, Complex64) {
    let a = pendellosung_a(p);
    let b = pendellosung_b(p);
    let phase = Complex64::from_polar(1.0, -a * t);
    let half = 0.5 * b * t;
    (phase * half.cos(), I * phase * half.sin())
}

/// Interaction time `rπ/|B_n|` giving full deflection.
pub fn pi_time(p: &BraggParams) -> Result<f64> {
    if p.n == 0 {
        return Err(Error::param("n", "pi time is undefined without photons"));
    }
    let b = pendellosung_b(p).abs();
    if b == 0.0 {
        return Err(Error::param("g", "zero coupling has no pi time"));
    }
    Ok(p.r as f64 * PI / b)
}

/// Bragg phase `φ = rπA₁/B₁`, always evaluated at one photon.
pub fn bragg_phase(p: &BraggParams) -> f64 {
    let one = p.with_photons(1);
    let b = pendellosung_b(&one);
    if b == 0.0 {
        return 0.0;
    }
    p.r as f64 * PI * pendellosung_a(&one) / b
}

/// Pair state after an interaction of duration `t`, starting from
/// `(|0⟩ + |1⟩)/√2 ⊗ |P_{+l₀}⟩`. Keeps the undeflected one-photon term.
pub fn pair_state_at(p: &BraggParams, t: f64) -> Result<StateVector> {
    let (c_plus, c_minus) = analytic_amplitudes(&p.with_photons(1), t);
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    pair_state(vec![s, ZERO, s * c_plus, s * c_minus])
}

/// Atom–cavity pair at the pi time: `(|0, P_{l₀}⟩ + i e^{−iφ}|1, P_{−l₀}⟩)/√2`.
///
/// For `r ≡ 3 (mod 4)` the deflected term carries an extra sign from
/// `sin(rπ/2) = −1`.
pub fn entangle_pair(p: &BraggParams) -> Result<StateVector> {
    p.validate()?;
    let one = p.with_photons(1);
    pi_time(&one)?;
    let phi = bragg_phase(p);
    let sign = if p.r % 4 == 1 { 1.0 } else { -1.0 };
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let deflected = I * Complex64::from_polar(sign, -phi) * s;
    pair_state(vec![s, ZERO, ZERO, deflected])
}

fn pair_state(amps: Vec<Complex64>) -> Result<StateVector> {
    StateVector::new(PAIR_LABELS.iter().map(|s| s.to_string()).collect(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{partial_trace, DensityMatrix};

    fn order(l0: u32) -> BraggParams {
        BraggParams::with_order(l0)
    }

    #[test]
    fn b_first_order() {
        assert!((pendellosung_b(&order(2)) - 0.005).abs() < 1e-18);
    }

    #[test]
    fn b_second_order() {
        // (0.005)² / (2·2)
        assert!((pendellosung_b(&order(4)) - 6.25e-6).abs() < 1e-20);
    }

    #[test]
    fn b_without_photons() {
        assert_eq!(pendellosung_b(&order(2).with_photons(0)), 0.0);
        assert_eq!(pendellosung_b(&order(6).with_photons(0)), 0.0);
    }

    #[test]
    fn a_values() {
        assert_eq!(pendellosung_a(&order(2)), 0.0);
        // −(0.0025)² / 4
        assert!((pendellosung_a(&order(4)) + 1.5625e-6).abs() < 1e-20);
        let a1 = pendellosung_a(&order(4));
        let a2 = pendellosung_a(&order(4).with_photons(2));
        assert!((a2 / a1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_limits() {
        let p = order(2);
        let (cp, cm) = analytic_amplitudes(&p, 0.0);
        assert_eq!((cp, cm), (Complex64::new(1.0, 0.0), ZERO));

        let t = pi_time(&p).unwrap();
        let (cp, cm) = analytic_amplitudes(&p, t);
        assert!(cp.norm() < 1e-15);
        assert!((cm.norm() - 1.0).abs() < 1e-15);

        let (cp, cm) = analytic_amplitudes(&p, t / 2.0);
        assert!((cp.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((cm.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pi_time_values() {
        let p = order(2);
        assert!((pi_time(&p).unwrap() - 200.0 * PI).abs() < 1e-9);
        assert!((pi_time(&p).unwrap() - 2.0 * PI * p.delta / (p.g * p.g)).abs() < 1e-9);
        let p3 = BraggParams { r: 3, ..order(2) };
        assert!((pi_time(&p3).unwrap() / pi_time(&p).unwrap() - 3.0).abs() < 1e-14);
        let p4 = order(4);
        assert!((pi_time(&p4).unwrap() - PI / pendellosung_b(&p4)).abs() < 1e-6);
        assert!(pi_time(&p.with_photons(0)).is_err());
    }

    #[test]
    fn phase_values() {
        assert_eq!(bragg_phase(&order(2)), 0.0);
        assert!((bragg_phase(&order(4)) + PI / 4.0).abs() < 1e-12);
        let p3 = BraggParams { r: 3, ..order(4) };
        assert!((bragg_phase(&p3) / bragg_phase(&order(4)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_pair() {
        let pair = entangle_pair(&order(2)).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((pair.amplitude("0;+l0").unwrap() - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((pair.amplitude("1;-l0").unwrap() - Complex64::new(0.0, s)).norm() < 1e-15);
        assert_eq!(pair.amplitude("1;+l0").unwrap(), ZERO);
        let rho = DensityMatrix::from_pure(&pair).unwrap();
        let cavity = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(cavity.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn pair_matches_general_state_at_pi_time() {
        for l0 in [2, 4] {
            for r in [1, 3, 5] {
                let p = BraggParams { r, ..order(l0) };
                let nominal = entangle_pair(&p).unwrap();
                let general = pair_state_at(&p, pi_time(&p).unwrap()).unwrap();
                assert!(nominal.max_abs_diff(&general).unwrap() < 1e-9, "l0={l0} r={r}");
            }
        }
    }
}
