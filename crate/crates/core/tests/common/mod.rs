//! Independent oracles built on nalgebra.

#![allow(dead_code)]

use gkemean::{Matrix, SpdMatrix};
use nalgebra::DMatrix;

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn fn_of(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let e = sym.symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Eigenvalues of `A^{-1} B` via a Cholesky factor of `A`.
pub fn relative_eigenvalues(a: &SpdMatrix, b: &SpdMatrix) -> Vec<f64> {
    let l = to_na(a.matrix()).cholesky().expect("SPD").l();
    let li = l.try_inverse().expect("invertible");
    eigenvalues(&(&li * to_na(b.matrix()) * li.transpose()))
}

pub fn thompson(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    relative_eigenvalues(a, b)
        .into_iter()
        .map(|x| x.ln().abs())
        .fold(0.0, f64::max)
}

/// `λ_min(B − A) / max(1, ‖A‖₂, ‖B‖₂)`.
pub fn loewner_margin(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = 1.0f64
        .max(*eigenvalues(a).last().unwrap())
        .max(*eigenvalues(b).last().unwrap());
    eigenvalues(&(b - a))[0] / scale
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn arithmetic(weights: &[f64], mats: &[SpdMatrix]) -> DMatrix<f64> {
    let d = mats[0].dim();
    weights
        .iter()
        .zip(mats)
        .fold(DMatrix::zeros(d, d), |acc, (w, a)| acc + to_na(a.matrix()) * *w)
}

pub fn harmonic(weights: &[f64], mats: &[SpdMatrix]) -> DMatrix<f64> {
    let d = mats[0].dim();
    weights
        .iter()
        .zip(mats)
        .fold(DMatrix::zeros(d, d), |acc, (w, a)| {
            acc + to_na(a.matrix()).try_inverse().unwrap() * *w
        })
        .try_inverse()
        .unwrap()
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^λ A^{1/2}`.
pub fn geodesic(a: &SpdMatrix, b: &SpdMatrix, lambda: f64) -> DMatrix<f64> {
    let an = to_na(a.matrix());
    let half = fn_of(&an, f64::sqrt);
    let inv_half = fn_of(&an, |x| 1.0 / x.sqrt());
    let inner = &inv_half * to_na(b.matrix()) * &inv_half;
    &half * fn_of(&inner, |x| x.powf(lambda)) * &half
}
