use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude. All stored amplitudes are finite.
pub type ComplexAmp = Complex64;

/// Largest dimension a tensor product may produce unless a caller passes
/// its own limit to [`tensor_product_with_limit`].
pub const DEFAULT_MAX_DIM: usize = 4096;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A pure state over an ordered, labeled basis.
///
/// Labels are plain strings so that serialized states compare byte for byte.
/// Composite labels produced by [`tensor_product`] join the factor labels
/// with `;`, first factor first.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<String>,
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(labels: Vec<String>, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_dvector(labels, DVector::from_vec(amps))
    }

    pub fn from_dvector(labels: Vec<String>, amps: DVector<Complex64>) -> Result<Self> {
        if labels.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: amps.len(),
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(StateVector { labels, amps })
    }

    /// Computational basis `|0⟩ … |dim-1⟩` with amplitude 1 on `index`.
    pub fn computational(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = DVector::from_element(dim, ZERO);
        amps[index] = ONE;
        Self::from_dvector(computational_labels(dim), amps)
    }

    /// Same basis, new amplitudes.
    pub fn with_amps(&self, amps: DVector<Complex64>) -> Result<Self> {
        Self::from_dvector(self.labels.clone(), amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn amplitude(&self, label: &str) -> Option<Complex64> {
        self.index_of(label).map(|i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        StateVector {
            labels: self.labels.clone(),
            amps: self.amps.unscale(n),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest `|a_i - b_i|` over the basis.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn outer(&self) -> DMatrix<Complex64> {
        &self.amps * self.amps.adjoint()
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (l, a) in self.labels.iter().zip(self.amps.iter()) {
            if a.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, l)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub(crate) fn computational_labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| i.to_string()).collect()
}

/// A dense square complex matrix acting on a state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Operator { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entry modulus, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        psi.check_dim(self.dim())?;
        psi.with_amps(&self.matrix * psi.amps())
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Operator {
            matrix: &self.matrix * &other.matrix,
        })
    }
}

/// Kronecker product with the first factor varying slowest.
pub trait TensorProduct: Sized {
    fn tensor_dim(&self) -> usize;
    fn kron_unchecked(&self, other: &Self) -> Result<Self>;
}

impl TensorProduct for StateVector {
    fn tensor_dim(&self) -> usize {
        self.dim()
    }

    fn kron_unchecked(&self, other: &Self) -> Result<Self> {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a};{b}"));
            }
        }
        StateVector::from_dvector(labels, self.amps.kronecker(&other.amps))
    }
}

impl TensorProduct for Operator {
    fn tensor_dim(&self) -> usize {
        self.dim()
    }

    fn kron_unchecked(&self, other: &Self) -> Result<Self> {
        Operator::new(self.matrix.kronecker(&other.matrix))
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    tensor_product_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_product_with_limit<T: TensorProduct>(a: &T, b: &T, max_dim: usize) -> Result<T> {
    let dim = a
        .tensor_dim()
        .checked_mul(b.tensor_dim())
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            max: max_dim,
        })?;
    if dim > max_dim {
        return Err(Error::DimensionOverflow { dim, max: max_dim });
    }
    a.kron_unchecked(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn kron_of_basis_states() {
        let zero = StateVector::computational(2, 0).unwrap();
        let one = StateVector::computational(2, 1).unwrap();
        let k = tensor_product(&zero, &one).unwrap();
        assert_eq!(k.dim(), 4);
        assert_eq!(k.amps()[1], ONE);
        assert_eq!(k.labels()[1], "0;1");
        assert_eq!(k.norm_sqr(), 1.0);
    }

    #[test]
    fn identity_kron_identity() {
        let k = tensor_product(&Operator::identity(2), &Operator::identity(2)).unwrap();
        assert_eq!(k, Operator::identity(4));
    }

    #[test]
    fn uniform_superposition_product() {
        let plus = StateVector::new(
            vec!["0".into(), "1".into()],
            vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
        )
        .unwrap();
        let k = tensor_product(&plus, &plus).unwrap();
        for a in k.amps().iter() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn overflow_is_rejected() {
        let a = Operator::identity(100);
        let err = tensor_product_with_limit(&a, &a, 1000).unwrap_err();
        assert_eq!(err, Error::DimensionOverflow { dim: 10000, max: 1000 });
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = StateVector::new(vec!["x".into(), "x".into()], vec![ONE, ZERO]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(_)));
    }

    #[test]
    fn non_finite_rejected() {
        let err = StateVector::new(vec!["a".into()], vec![Complex64::new(f64::NAN, 0.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn hermitian_and_unitary_measures() {
        let sx = Operator::new(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap();
        assert_eq!(sx.hermitian_deviation(), 0.0);
        assert_eq!(sx.unitarity_deviation(), 0.0);
        let upper = Operator::new(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])).unwrap();
        assert_eq!(upper.hermitian_deviation(), 1.0);
    }
}
