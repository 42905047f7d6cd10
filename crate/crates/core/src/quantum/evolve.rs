//! Schrödinger evolution `ψ(t) = exp(−iHt)ψ₀` (ħ = 1).
//!
//! Two independent routes are provided. The reference route builds the
//! propagator with a scaling-and-squaring Padé(13) matrix exponential. The
//! cross-check route integrates `dψ/dt = −iHψ` with classical fixed-step RK4.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{Operator, StateVector, I};
use crate::error::{Error, Result};

/// Hermiticity tolerance, relative to `max(1, ‖H‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Upper bound on RK4 steps in a single call.
pub const MAX_RK4_STEPS: u64 = 50_000_000;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvolutionMethod {
    /// Scaling-and-squaring matrix exponential.
    Expm,
    /// Fixed-step fourth-order Runge–Kutta with the given maximum step.
    Rk4 { step: f64 },
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential of an arbitrary square complex matrix.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale(0.5_f64.powi(squarings));

    let ident = DMatrix::<Complex64>::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &scaled * (&a6 * &inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * &inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is nonsingular for a scaled argument");

    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

pub(crate) fn require_hermitian(h: &Operator) -> Result<()> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// `U(t) = exp(−iHt)`.
pub fn propagator(h: &Operator, t: f64) -> Result<Operator> {
    require_hermitian(h)?;
    let gen = h.matrix() * Complex64::new(0.0, -t);
    Operator::new(expm(&gen))
}

/// Reference evolution through the matrix exponential.
pub fn evolve(h: &Operator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    psi0.check_dim(h.dim())?;
    propagator(h, t)?.apply(psi0)
}

/// Cross-check evolution by RK4. The step actually used is `t / ceil(|t| / step)`.
pub fn evolve_rk4(h: &Operator, psi0: &StateVector, t: f64, step: f64) -> Result<StateVector> {
    psi0.check_dim(h.dim())?;
    require_hermitian(h)?;
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let steps_f = (t.abs() / step).ceil();
    if steps_f > MAX_RK4_STEPS as f64 {
        return Err(Error::StepOverflow {
            steps: steps_f as u64,
            max: MAX_RK4_STEPS,
        });
    }
    let steps = steps_f as u64;
    if steps == 0 {
        return Ok(psi0.clone());
    }
    let dt = t / steps as f64;
    let gen = h.matrix() * (-I);
    let mut y = psi0.amps().clone();
    let half = Complex64::new(dt / 2.0, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    for _ in 0..steps {
        let k1 = &gen * &y;
        let k2 = &gen * (&y + &k1 * half);
        let k3 = &gen * (&y + &k2 * half);
        let k4 = &gen * (&y + &k3 * full);
        y += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * sixth;
    }
    psi0.with_amps(y)
}

pub fn evolve_with(
    method: EvolutionMethod,
    h: &Operator,
    psi0: &StateVector,
    t: f64,
) -> Result<StateVector> {
    match method {
        EvolutionMethod::Expm => evolve(h, psi0, t),
        EvolutionMethod::Rk4 { step } => evolve_rk4(h, psi0, t, step),
    }
}

/// Evolve to each time in `times` (ascending, first may be 0) by chaining
/// propagators over the gaps. Returns one state per time.
pub fn evolve_series(h: &Operator, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    psi0.check_dim(h.dim())?;
    require_hermitian(h)?;
    let mut out = Vec::with_capacity(times.len());
    let mut current = psi0.clone();
    let mut now = 0.0;
    // Uniform grids reuse one propagator.
    let mut cached: Option<(f64, Operator)> = None;
    for &t in times {
        let dt = t - now;
        if dt != 0.0 {
            let reuse = matches!(&cached, Some((d, _)) if (d - dt).abs() <= 1e-12 * dt.abs());
            if !reuse {
                cached = Some((dt, propagator(h, dt)?));
            }
            let (_, u) = cached.as_ref().expect("propagator cached above");
            current = u.apply(&current)?;
            now = t;
        }
        out.push(current.clone());
    }
    Ok(out)
}
