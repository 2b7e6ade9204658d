//! Cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Rotations are applied until every off-diagonal entry is negligible next to
//! its two diagonal partners, which gives eigenvalues with small *relative*
//! error on positive definite input.

use crate::error::{Error, Result};

use super::matrix::Matrix;

const MAX_SWEEPS: usize = 60;

/// Eigen-pairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors.
    pub basis: Matrix,
}

impl SpectralDecomposition {
    /// Decompose a symmetric matrix. Fails with `NotSpd` only when the
    /// symmetry check fails; definiteness is not required.
    pub fn of_symmetric(m: &Matrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::NotSpd(format!(
                "asymmetry {:e} exceeds tolerance",
                m.asymmetry()
            )));
        }
        Ok(jacobi(&m.symmetrized()))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `basis · diag(values) · basisᵀ`, symmetrized.
    pub fn recompose(&self, values: &[f64]) -> Matrix {
        let n = self.dim();
        let v = &self.basis;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, lam) in values.iter().enumerate() {
                    s += v[(i, k)] * lam * v[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    /// Apply a scalar function to the spectrum. Every value must be finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Matrix> {
        let mut vals = Vec::with_capacity(self.dim());
        for &lam in &self.eigenvalues {
            let v = f(lam);
            if !v.is_finite() {
                return Err(Error::DomainError(lam));
            }
            vals.push(v);
        }
        Ok(self.recompose(&vals))
    }
}

/// Cyclic Jacobi on an exactly symmetric matrix.
pub(crate) fn jacobi(m: &Matrix) -> SpectralDecomposition {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].abs())
            .sum();
        if off == 0.0 {
            break;
        }
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let guard = 100.0 * apq.abs();
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if sweep > 3 && app.abs() + guard == app.abs() && aqq.abs() + guard == aqq.abs()
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + guard == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut basis = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            basis[(r, col)] = v[(r, src)];
        }
    }
    SpectralDecomposition { eigenvalues, basis }
}

/// `A ← Pᵀ A P`, `V ← V P` for the plane rotation with `P[p][p] = P[q][q] = c`,
/// `P[p][q] = s`, `P[q][p] = -s`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
