use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::state::{StateVector, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Tolerance on trace, Hermiticity and negative eigenvalues.
pub const DENSITY_TOL: f64 = 1e-9;

/// A mixed state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = DensityMatrix::unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Rescales an unnormalized positive operator to unit trace.
    pub fn from_unnormalized(matrix: DMatrix<Complex64>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::param("density matrix", format!("trace {tr} is not positive")));
        }
        Self::new(matrix.unscale(tr))
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        Self::from_unnormalized(psi.outer())
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: DMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`. Weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, r)| r.dim())
            .ok_or_else(|| Error::param("mixture", "no components"))?;
        let mut acc = DMatrix::zeros(dim, dim);
        for (w, r) in parts {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::param("mixture", "negative weight"));
            }
            acc += r.matrix() * Complex64::new(*w, 0.0);
        }
        Self::new(acc)
    }

    fn unchecked(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        Ok(DensityMatrix { matrix })
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let mut herm = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                herm = herm.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = self.matrix.trace();
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::param("density matrix", format!("trace {tr} differs from 1")));
        }
        // ρ + tol·I is positive definite iff every eigenvalue exceeds −tol.
        let shifted = hermitian_part(&self.matrix) + DMatrix::identity(n, n).scale(DENSITY_TOL);
        if !positive_definite(&shifted) {
            let min_eig = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product with `self` as the slow factor.
    pub fn kron(&self, other: &DensityMatrix) -> Result<Self> {
        DensityMatrix::unchecked(self.matrix.kronecker(&other.matrix))
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.nrows(),
            });
        }
        DensityMatrix::new(u * &self.matrix * u.adjoint())
    }
}

/// Cholesky factorization of a Hermitian matrix, failing on any pivot ≤ 0.
fn positive_definite(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Reduced state on the subsystems listed in `keep`.
///
/// `dims` gives the subsystem dimensions with the first subsystem varying
/// slowest; `keep` lists subsystem indices (any order, no repeats). The
/// kept subsystems appear in ascending index order in the result.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() || dims.contains(&0) {
        return Err(Error::BadFactorization {
            dims: dims.to_vec(),
            total: rho.dim(),
        });
    }
    let mut keep_mask = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || keep_mask[k] {
            return Err(Error::BadFactorization {
                dims: dims.to_vec(),
                total: rho.dim(),
            });
        }
        keep_mask[k] = true;
    }

    let kept_dim: usize = dims
        .iter()
        .zip(&keep_mask)
        .filter(|(_, &k)| k)
        .map(|(d, _)| d)
        .product();

    // Split every flat index into (kept index, traced index).
    let split = |mut flat: usize| -> (usize, usize) {
        let (mut kept, mut kept_stride) = (0, 1);
        let (mut traced, mut traced_stride) = (0, 1);
        for (d, &k) in dims.iter().zip(&keep_mask).rev() {
            let digit = flat % d;
            flat /= d;
            if k {
                kept += digit * kept_stride;
                kept_stride *= d;
            } else {
                traced += digit * traced_stride;
                traced_stride *= d;
            }
        }
        (kept, traced)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();

    let mut out = DMatrix::zeros(kept_dim, kept_dim);
    for (i, &(ki, ti)) in parts.iter().enumerate() {
        for (j, &(kj, tj)) in parts.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    DensityMatrix::unchecked(out)
}

/// `⟨target|ρ|target⟩` for a normalized target.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    target.check_dim(rho.dim())?;
    let v = target.amps();
    let f = v.dotc(&(rho.matrix() * v));
    Ok(f.re)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let eig = hermitian_part(rho.matrix()).symmetric_eigen();
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigen-decomposition"));
    }
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -DENSITY_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min_eig,
        });
    }
    let sqrt_rho = psd_sqrt(&eig);

    let yy = sigma_y_sigma_y();
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let m = &sqrt_rho * flipped * &sqrt_rho;
    let mut lambdas: Vec<f64> = hermitian_part(&m)
        .symmetric_eigenvalues()
        .iter()
        .map(|&mu| mu.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

fn psd_sqrt(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>) -> DMatrix<Complex64> {
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

fn sigma_y_sigma_y() -> DMatrix<Complex64> {
    let sy = DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    sy.kronecker(&sy)
}

/// The four Bell states over two qubits, `|c₁c₂⟩` ordering.
pub mod bell {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_qubit(amps: [f64; 4]) -> StateVector {
        let labels = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
        StateVector::new(labels, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
            .expect("fixed two-qubit state")
    }

    pub fn phi_plus() -> StateVector {
        two_qubit([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
    }
    pub fn phi_minus() -> StateVector {
        two_qubit([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2])
    }
    pub fn psi_plus() -> StateVector {
        two_qubit([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0])
    }
    pub fn psi_minus() -> StateVector {
        two_qubit([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])
    }
    pub fn product(c1: u8, c2: u8) -> StateVector {
        let mut a = [0.0; 4];
        a[(2 * c1 + c2) as usize] = 1.0;
        two_qubit(a)
    }
}
