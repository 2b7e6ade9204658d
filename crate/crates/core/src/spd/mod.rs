//! Symmetric positive-definite matrices and the spectral calculus on them.

mod eigen;
mod matrix;
mod random;

pub use eigen::SpectralDecomposition;
pub use matrix::{Matrix, MatrixJson};
pub use random::{random_spd, MAX_LOG_CONDITION};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff: `λ_min ≤ dim · POSITIVITY_CUTOFF · λ_max` is
/// treated as singular.
pub const POSITIVITY_CUTOFF: f64 = 1e-12;

/// Condition estimate above which a congruence transform counts as singular.
pub const MAX_TRANSFORM_CONDITION: f64 = 1e12;

/// A validated symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct SpdMatrix(Matrix);

impl TryFrom<Matrix> for SpdMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        SpdMatrix::new(m)
    }
}

impl From<SpdMatrix> for Matrix {
    fn from(m: SpdMatrix) -> Matrix {
        m.0
    }
}

impl AsRef<Matrix> for SpdMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Decompose `m`, requiring symmetry and strict positivity.
pub fn spectral_decompose(m: &Matrix) -> Result<SpectralDecomposition> {
    let d = SpectralDecomposition::of_symmetric(m)?;
    let (lo, hi) = (d.min(), d.max());
    if !(hi > 0.0) || lo <= m.dim() as f64 * POSITIVITY_CUTOFF * hi {
        return Err(Error::NotSpd(format!(
            "eigenvalue range [{lo:e}, {hi:e}] is not safely positive"
        )));
    }
    Ok(d)
}

impl SpdMatrix {
    /// Validate symmetry and positivity. The stored matrix is the exact
    /// symmetrization of the input.
    pub fn new(m: Matrix) -> Result<Self> {
        spectral_decompose(&m)?;
        Ok(SpdMatrix(m.symmetrized()))
    }

    pub fn identity(dim: usize) -> Self {
        SpdMatrix(Matrix::identity(dim))
    }

    /// `value · I`; `value` must be positive.
    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NotSpd(format!("scalar {value} is not positive")));
        }
        Ok(SpdMatrix(Matrix::scalar(dim, value)))
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        SpdMatrix::new(Matrix::diag(values))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SpdMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition> {
        spectral_decompose(&self.0)
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectral_decompose()?.eigenvalues)
    }

    /// Spectral norm (largest eigenvalue).
    pub fn norm2(&self) -> Result<f64> {
        Ok(self.spectral_decompose()?.max())
    }

    /// `φ(A)` by functional calculus; the result is symmetric but need not be
    /// positive.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<Matrix> {
        self.spectral_decompose()?.map(f)
    }

    /// `φ(A)` for a function that is positive on the spectrum.
    pub fn apply_positive(&self, f: impl Fn(f64) -> f64) -> Result<SpdMatrix> {
        SpdMatrix::new(self.apply(f)?)
    }

    pub fn powf(&self, p: f64) -> Result<SpdMatrix> {
        self.apply_positive(|x| x.powf(p))
    }

    pub fn sqrt(&self) -> Result<SpdMatrix> {
        self.apply_positive(f64::sqrt)
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        self.apply_positive(|x| 1.0 / x)
    }

    pub fn log(&self) -> Result<Matrix> {
        self.apply(f64::ln)
    }

    /// `(A^{1/2}, A^{-1/2})` from a single decomposition.
    pub fn sqrt_and_inv_sqrt(&self) -> Result<(Matrix, Matrix)> {
        let d = self.spectral_decompose()?;
        Ok((d.map(f64::sqrt)?, d.map(|x| 1.0 / x.sqrt())?))
    }

    /// `Xᵀ A X` for invertible `X`.
    pub fn congruence(&self, x: &Matrix) -> Result<SpdMatrix> {
        check_dims(self.dim(), x.dim())?;
        let gram = x.transpose().matmul(x).symmetrized();
        let d = SpectralDecomposition::of_symmetric(&gram)?;
        let cond = if d.min() > 0.0 {
            (d.max() / d.min()).sqrt()
        } else {
            f64::INFINITY
        };
        if !(cond < MAX_TRANSFORM_CONDITION) {
            return Err(Error::SingularTransform(cond));
        }
        SpdMatrix::new(self.0.congruence_by(x))
    }

    /// Congruence by a symmetric matrix known to be invertible (e.g. `X^{-1/2}`),
    /// skipping the condition estimate.
    pub(crate) fn congruence_sym(&self, x: &Matrix) -> Result<SpdMatrix> {
        SpdMatrix::new(x.matmul(&self.0).matmul(x).symmetrized())
    }

    /// Weighted geometric mean `A ♯_λ B = A^{1/2}(A^{-1/2} B A^{-1/2})^λ A^{1/2}`.
    pub fn geodesic(&self, other: &SpdMatrix, lambda: f64) -> Result<SpdMatrix> {
        check_dims(self.dim(), other.dim())?;
        let (half, inv_half) = self.sqrt_and_inv_sqrt()?;
        let inner = other.congruence_sym(&inv_half)?.powf(lambda)?;
        inner.congruence_sym(&half)
    }

    pub fn add(&self, other: &SpdMatrix) -> Result<SpdMatrix> {
        check_dims(self.dim(), other.dim())?;
        SpdMatrix::new(&self.0 + &other.0)
    }

    pub fn scale(&self, s: f64) -> Result<SpdMatrix> {
        SpdMatrix::new(self.0.scale(s))
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimMismatch { expected, found });
    }
    Ok(())
}

/// `φ(A)` for a symmetric matrix `A` (not necessarily definite).
pub fn apply_symmetric(m: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    SpectralDecomposition::of_symmetric(m)?.map(f)
}

/// Functional calculus entry point: `basis · diag(φ(λᵢ)) · basisᵀ`.
pub fn apply_scalar_function(a: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    a.apply(f)
}

/// Scale used by relative Löwner tolerances: `max(1, ‖A‖₂, ‖B‖₂)`.
pub fn loewner_scale(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    Ok(1.0f64.max(a.norm2()?).max(b.norm2()?))
}

/// Smallest eigenvalue of `B − A` divided by `max(1, ‖A‖₂, ‖B‖₂)`.
/// Non-negative iff `A ≤ B` in the Löwner order.
pub fn loewner_margin(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let diff = (b.matrix() - a.matrix()).symmetrized();
    let lo = SpectralDecomposition::of_symmetric(&diff)?.min();
    Ok(lo / loewner_scale(a, b)?)
}

/// `A ≤ B` up to `tol · max(1, ‖A‖₂, ‖B‖₂)`.
pub fn loewner_leq(a: &SpdMatrix, b: &SpdMatrix, tol: f64) -> Result<bool> {
    if !(tol >= 0.0) {
        return Err(Error::BadParameter(format!("tolerance {tol} must be >= 0")));
    }
    Ok(loewner_margin(a, b)? >= -tol)
}

/// Thompson metric: spectral norm of `log(A^{-1/2} B A^{-1/2})`.
pub fn thompson_distance(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let (_, inv_half) = a.sqrt_and_inv_sqrt()?;
    let inner = b.matrix().congruence_by(&inv_half);
    let d = SpectralDecomposition::of_symmetric(&inner)?;
    if d.min() <= 0.0 {
        return Err(Error::NotSpd("A^{-1/2} B A^{-1/2} lost positivity".into()));
    }
    Ok(d.min().ln().abs().max(d.max().ln().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(rows: &[&[f64]]) -> SpdMatrix {
        SpdMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let d = SpdMatrix::identity(3).spectral_decompose().unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let d = SpdMatrix::diag(&[4.0, 1.0]).unwrap().eigenvalues().unwrap();
        assert_eq!(d, vec![1.0, 4.0]);
    }

    #[test]
    fn rejects_indefinite_and_nearly_singular() {
        assert!(matches!(
            SpdMatrix::diag(&[1.0, -1.0]),
            Err(Error::NotSpd(_))
        ));
        assert!(SpdMatrix::diag(&[1.0, 1e-13]).is_err());
        assert!(SpdMatrix::diag(&[1.0, 1e-11]).is_ok());
        assert!(SpdMatrix::from_rows(&[vec![1.0, 0.3], vec![0.2, 1.0]]).is_err());
    }

    #[test]
    fn functional_calculus_on_diagonals() {
        let a = SpdMatrix::diag(&[1.0, 4.0]).unwrap();
        assert_eq!(a.sqrt().unwrap().matrix(), &Matrix::diag(&[1.0, 2.0]));
        let same = apply_scalar_function(&a, |x| x).unwrap();
        assert!((&same - a.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn log_of_two_by_two() {
        // eigenvectors (1,-1)/√2 for 1 and (1,1)/√2 for 3
        let a = spd(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let l = a.log().unwrap();
        let h = 0.5 * 3f64.ln();
        assert!((l[(0, 0)] - h).abs() < 1e-14);
        assert!((l[(0, 1)] - h).abs() < 1e-14);
        assert!((l[(1, 1)] - h).abs() < 1e-14);
    }

    #[test]
    fn domain_error_on_nonfinite_function() {
        let a = SpdMatrix::diag(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            a.apply(|x| if x > 1.5 { f64::NAN } else { x }),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn congruence_examples() {
        let a = spd(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(a.congruence(&Matrix::identity(2)).unwrap(), a);
        let d = SpdMatrix::identity(2)
            .congruence(&Matrix::diag(&[2.0, 3.0]))
            .unwrap();
        assert_eq!(d.matrix(), &Matrix::diag(&[4.0, 9.0]));
        assert!(matches!(
            a.congruence(&Matrix::diag(&[1.0, 1e-13])),
            Err(Error::SingularTransform(_))
        ));
        assert!(matches!(
            a.congruence(&Matrix::identity(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn loewner_examples() {
        let i = SpdMatrix::identity(2);
        let two = SpdMatrix::scalar(2, 2.0).unwrap();
        assert!(loewner_leq(&i, &two, 0.0).unwrap());
        assert!(loewner_leq(&two, &two, 0.0).unwrap());
        let a = SpdMatrix::diag(&[1.0, 3.0]).unwrap();
        let b = SpdMatrix::diag(&[2.0, 2.0]).unwrap();
        assert!(!loewner_leq(&a, &b, 1e-12).unwrap());
        assert!(!loewner_leq(&b, &a, 1e-12).unwrap());
        assert!(loewner_leq(&i, &SpdMatrix::identity(3), 0.0).is_err());
    }

    #[test]
    fn thompson_scalar_reduction() {
        let a = SpdMatrix::scalar(3, 2.0).unwrap();
        let b = SpdMatrix::scalar(3, 7.0).unwrap();
        let d = thompson_distance(&a, &b).unwrap();
        assert!((d - (2.0f64 / 7.0).ln().abs()).abs() < 1e-14);
        assert!(thompson_distance(&a, &a).unwrap() < 1e-14);
    }

    #[test]
    fn geodesic_endpoints() {
        let a = spd(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let b = SpdMatrix::diag(&[1.0, 5.0]).unwrap();
        let at0 = a.geodesic(&b, 0.0).unwrap();
        let at1 = a.geodesic(&b, 1.0).unwrap();
        assert!((at0.matrix() - a.matrix()).max_abs() < 1e-13);
        assert!((at1.matrix() - b.matrix()).max_abs() < 1e-13);
    }
}
