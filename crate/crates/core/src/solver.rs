//! Generalized Karcher Equation solver and the means built on it.
//!
//! The mean `σ_g(ω; 𝔸)` is the unique SPD solution of
//! `S(X) = Σᵢ wᵢ·g(X^{-1/2} Aᵢ X^{-1/2}) = 0`. It is computed by the damped
//! fixed-point iteration `X ← X^{1/2} · g⁻¹(θ·S(X)) · X^{1/2}` and certified by
//! the Frobenius norm of `S` at the returned point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::spd::{check_dims, Matrix, SpdMatrix, SpectralDecomposition};

/// Tolerance on `Σ wᵢ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Damping below this value aborts the solve.
pub const MIN_DAMPING: f64 = 1e-8;

/// Probability vector with strictly positive entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Entries must lie in `(0, 1)` (a single weight may equal 1) and sum to 1
    /// within [`WEIGHT_SUM_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadParameter("weight vector is empty".into()));
        }
        let single = weights.len() == 1;
        for &w in &weights {
            let ok = w > 0.0 && (w < 1.0 || (single && w == 1.0));
            if !ok {
                return Err(Error::BadParameter(format!("weight {w} outside (0, 1)")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::BadParameter(format!("weights sum to {sum}, not 1")));
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("weight vector is empty".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `(1 − λ, λ)` for `λ ∈ (0, 1)`.
    pub fn pair(lambda: f64) -> Result<Self> {
        Self::new(vec![1.0 - lambda, lambda])
    }

    /// Accept `raw` if it sums to 1 within `tol`, then rescale by the sum.
    pub fn normalized(raw: Vec<f64>, tol: f64) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !((sum - 1.0).abs() <= tol) {
            return Err(Error::BadParameter(format!(
                "weights sum to {sum}, not 1 within {tol:e}"
            )));
        }
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Vec<f64> {
        w.0
    }
}

/// A weighted family of equally sized SPD matrices and a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GkeProblem {
    weights: WeightVector,
    matrices: Vec<SpdMatrix>,
    generator: Generator,
}

impl GkeProblem {
    pub fn new(weights: WeightVector, matrices: Vec<SpdMatrix>, generator: Generator) -> Result<Self> {
        check_dims(weights.len(), matrices.len())?;
        let dim = matrices[0].dim();
        for m in &matrices[1..] {
            check_dims(dim, m.dim())?;
        }
        Ok(GkeProblem {
            weights,
            matrices,
            generator,
        })
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn matrices(&self) -> &[SpdMatrix] {
        &self.matrices
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn with_generator(&self, generator: Generator) -> GkeProblem {
        GkeProblem {
            generator,
            ..self.clone()
        }
    }

    pub fn with_matrices(&self, matrices: Vec<SpdMatrix>) -> Result<GkeProblem> {
        GkeProblem::new(self.weights.clone(), matrices, self.generator.clone())
    }

    pub fn arithmetic_mean(&self) -> Result<SpdMatrix> {
        arithmetic_mean(&self.weights, &self.matrices)
    }

    pub fn harmonic_mean(&self) -> Result<SpdMatrix> {
        harmonic_mean(&self.weights, &self.matrices)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Starting point; the weighted arithmetic mean when `None`.
    pub initial_guess: Option<SpdMatrix>,
    /// Use exact formulas where they exist (one matrix, two-matrix Karcher
    /// mean, arithmetic and harmonic means). Disable to force the iteration.
    pub closed_forms: bool,
    /// Try a Newton step before each damped fixed-point step and keep it when
    /// it lowers the residual.
    pub newton: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-10,
            max_iterations: 500,
            initial_damping: 1.0,
            initial_guess: None,
            closed_forms: true,
            newton: true,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::BadParameter(format!(
                "residual_tol {} must be positive",
                self.residual_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::BadParameter("max_iterations must be >= 1".into()));
        }
        if !(self.initial_damping > 0.0 && self.initial_damping <= 1.0) {
            return Err(Error::BadParameter(format!(
                "initial_damping {} outside (0, 1]",
                self.initial_damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solution: SpdMatrix,
    /// `‖S(solution)‖_F`.
    pub residual: f64,
    pub iterations: usize,
    /// Accepted Newton steps, included in `iterations`.
    pub newton_steps: usize,
    /// Damping factor of every accepted fixed-point step.
    pub damping_history: Vec<f64>,
}

pub fn arithmetic_mean(weights: &WeightVector, matrices: &[SpdMatrix]) -> Result<SpdMatrix> {
    check_dims(weights.len(), matrices.len())?;
    let dim = matrices[0].dim();
    let mut sum = Matrix::zeros(dim);
    for (w, a) in weights.as_slice().iter().zip(matrices) {
        check_dims(dim, a.dim())?;
        sum = &sum + &a.matrix().scale(*w);
    }
    SpdMatrix::new(sum)
}

pub fn harmonic_mean(weights: &WeightVector, matrices: &[SpdMatrix]) -> Result<SpdMatrix> {
    let inverses = matrices
        .iter()
        .map(SpdMatrix::inverse)
        .collect::<Result<Vec<_>>>()?;
    arithmetic_mean(weights, &inverses)?.inverse()
}

/// `S(X)` given `X^{-1/2}`, with the spectral decompositions of
/// `Cᵢ = X^{-1/2} Aᵢ X^{-1/2}`.
fn gke_parts(problem: &GkeProblem, inv_half: &Matrix) -> Result<(Matrix, Vec<SpectralDecomposition>)> {
    let g = &problem.generator;
    let mut sum = Matrix::zeros(problem.dim());
    let mut parts = Vec::with_capacity(problem.matrices.len());
    for (w, a) in problem.weights.as_slice().iter().zip(&problem.matrices) {
        let d = SpectralDecomposition::of_symmetric(&a.matrix().congruence_by(inv_half))?;
        sum = &sum + &d.map(|x| g.eval(x))?.scale(*w);
        parts.push(d);
    }
    Ok((sum.symmetrized(), parts))
}

fn gke_sum(problem: &GkeProblem, inv_half: &Matrix) -> Result<Matrix> {
    Ok(gke_parts(problem, inv_half)?.0)
}

/// `‖Σᵢ wᵢ·g(X^{-1/2} Aᵢ X^{-1/2})‖_F`.
pub fn residual(problem: &GkeProblem, x: &SpdMatrix) -> Result<f64> {
    check_dims(problem.dim(), x.dim())?;
    let (_, inv_half) = x.sqrt_and_inv_sqrt()?;
    Ok(gke_sum(problem, &inv_half)?.frobenius_norm())
}

fn closed_form(problem: &GkeProblem) -> Result<Option<SpdMatrix>> {
    let g = &problem.generator;
    let mats = &problem.matrices;
    if mats.len() == 1 {
        return Ok(Some(mats[0].clone()));
    }
    if g.is_log() && mats.len() == 2 {
        let lambda = problem.weights.as_slice()[1];
        return Ok(Some(mats[0].geodesic(&mats[1], lambda)?));
    }
    match g.power_exponent() {
        Some(1.0) => Ok(Some(problem.arithmetic_mean()?)),
        Some(-1.0) => Ok(Some(problem.harmonic_mean()?)),
        _ => Ok(None),
    }
}

/// Iterate state: the point, its square root, `S` at it and the
/// decompositions of the normalized inputs.
struct Iterate {
    x: SpdMatrix,
    half: Matrix,
    s: Matrix,
    parts: Vec<SpectralDecomposition>,
    residual: f64,
}

impl Iterate {
    fn at(problem: &GkeProblem, x: SpdMatrix) -> Result<Self> {
        let (half, inv_half) = x.sqrt_and_inv_sqrt()?;
        let (s, parts) = gke_parts(problem, &inv_half)?;
        let residual = s.frobenius_norm();
        Ok(Iterate {
            x,
            half,
            s,
            parts,
            residual,
        })
    }

    /// `X^{1/2} · M · X^{1/2}`.
    fn lift(&self, m: &Matrix) -> Result<SpdMatrix> {
        SpdMatrix::new(self.half.matmul(m).matmul(&self.half).symmetrized())
    }
}

/// Divided difference `g[x, y]`, with `g′` at the midpoint for nearly equal
/// arguments.
fn divided_difference(g: &Generator, x: f64, y: f64) -> f64 {
    if (x - y).abs() <= 1e-6 * x.max(y) {
        g.derivative(0.5 * (x + y))
    } else {
        (g.eval(x) - g.eval(y)) / (x - y)
    }
}

/// Newton correction `E` for the update `X ← X^{1/2}(I + E)X^{1/2}`.
///
/// Writing the new point as `T Tᵀ` with `T = X^{1/2}(I + E)^{1/2}` changes
/// `S` only by an orthogonal similarity, and to first order
/// `T⁻¹ Aᵢ T⁻ᵀ = Cᵢ − ½(E Cᵢ + Cᵢ E)`. The linearization
/// `Σ wᵢ Dg(Cᵢ)[−½(E Cᵢ + Cᵢ E)] = −S` is assembled with the
/// Daleckii–Krein formula over a basis of symmetric matrices.
fn newton_direction(problem: &GkeProblem, cur: &Iterate) -> Option<Matrix> {
    let d = problem.dim();
    let g = &problem.generator;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let m = pairs.len();
    let mut jac = vec![0.0; m * m];
    for (w, part) in problem.weights.as_slice().iter().zip(&cur.parts) {
        let lam = &part.eigenvalues;
        let u = &part.basis;
        let ut = u.transpose();
        let mut kernel = Matrix::zeros(d);
        for j in 0..d {
            for k in 0..d {
                kernel[(j, k)] = -0.5 * (lam[j] + lam[k]) * divided_difference(g, lam[j], lam[k]);
            }
        }
        for (col, &(a, b)) in pairs.iter().enumerate() {
            let mut inner = Matrix::zeros(d);
            for j in 0..d {
                for k in 0..d {
                    let e = if a == b {
                        u[(a, j)] * u[(a, k)]
                    } else {
                        u[(a, j)] * u[(b, k)] + u[(b, j)] * u[(a, k)]
                    };
                    inner[(j, k)] = kernel[(j, k)] * e;
                }
            }
            let out = u.matmul(&inner).matmul(&ut);
            for (row, &(r, c)) in pairs.iter().enumerate() {
                jac[row * m + col] += w * out[(r, c)];
            }
        }
    }
    let inv = Matrix::from_vec(m, jac).inverse().ok()?;
    let rhs: Vec<f64> = pairs.iter().map(|&(r, c)| -cur.s[(r, c)]).collect();
    let mut e = Matrix::zeros(d);
    for (row, &(r, c)) in pairs.iter().enumerate() {
        let v: f64 = (0..m).map(|k| inv[(row, k)] * rhs[k]).sum();
        if !v.is_finite() {
            return None;
        }
        e[(r, c)] = v;
        e[(c, r)] = v;
    }
    Some(e)
}

/// Solve the GKE. The result satisfies `residual ≤ config.residual_tol`.
pub fn solve_gke(problem: &GkeProblem, config: &SolverConfig) -> Result<SolverReport> {
    config.validate()?;
    let tol = config.residual_tol;

    let mut start = None;
    if config.closed_forms {
        if let Some(x) = closed_form(problem)? {
            let r = residual(problem, &x)?;
            if r <= tol {
                return Ok(SolverReport {
                    solution: x,
                    residual: r,
                    iterations: 0,
                    newton_steps: 0,
                    damping_history: Vec::new(),
                });
            }
            start = Some(x);
        }
    }
    let start = match (start, &config.initial_guess) {
        (Some(x), _) => x,
        (None, Some(x)) => {
            check_dims(problem.dim(), x.dim())?;
            x.clone()
        }
        (None, None) => problem.arithmetic_mean()?,
    };

    let g = &problem.generator;
    let range = g.range_endpoints();
    let mut cur = Iterate::at(problem, start)?;
    let mut theta = config.initial_damping;
    let mut streak = 0usize;
    let mut history = Vec::new();
    let mut iterations = 0usize;
    let mut newton_steps = 0usize;

    while cur.residual > tol {
        if iterations >= config.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual: cur.residual,
            });
        }
        iterations += 1;

        if config.newton {
            let id = Matrix::identity(problem.dim());
            let next = newton_direction(problem, &cur)
                .and_then(|e| cur.lift(&(&id + &e)).and_then(|x| Iterate::at(problem, x)).ok());
            if let Some(it) = next.filter(|it| it.residual < cur.residual) {
                cur = it;
                newton_steps += 1;
                continue;
            }
        }

        let spec = SpectralDecomposition::of_symmetric(&cur.s)?;
        let in_range = spec.eigenvalues.iter().all(|&s| range.contains(theta * s));
        let trial = if in_range {
            let step = spec.map(|s| g.inverse(theta * s).unwrap_or(f64::NAN))?;
            let next = cur.lift(&step).and_then(|x| Iterate::at(problem, x));
            match next {
                Ok(it) if it.residual < cur.residual || it.residual <= tol => Some(it),
                _ => None,
            }
        } else {
            None
        };

        match trial {
            Some(next) => {
                history.push(theta);
                cur = next;
                streak += 1;
                if streak >= 2 {
                    theta = (theta * 1.5).min(1.0);
                    streak = 0;
                }
            }
            None => {
                streak = 0;
                theta *= 0.5;
                if theta < MIN_DAMPING {
                    if in_range {
                        return Err(Error::NoConvergence {
                            iterations,
                            residual: cur.residual,
                        });
                    }
                    return Err(Error::DampingUnderflow(theta));
                }
            }
        }
    }

    Ok(SolverReport {
        solution: cur.x,
        residual: cur.residual,
        iterations,
        newton_steps,
        damping_history: history,
    })
}

/// Weighted Karcher (geometric) mean.
pub fn karcher_mean(
    weights: &WeightVector,
    matrices: &[SpdMatrix],
    config: &SolverConfig,
) -> Result<SolverReport> {
    let problem = GkeProblem::new(weights.clone(), matrices.to_vec(), Generator::log())?;
    solve_gke(&problem, config)
}

/// Weighted power mean `P_t` for `t ∈ [−1, 1]`; `|t| < 1e-8` gives the
/// Karcher mean.
pub fn power_mean(
    weights: &WeightVector,
    matrices: &[SpdMatrix],
    t: f64,
    config: &SolverConfig,
) -> Result<SolverReport> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::BadParameter(format!("power mean exponent {t} outside [-1, 1]")));
    }
    if t.abs() < crate::generator::POWER_ZERO_CUTOFF {
        return karcher_mean(weights, matrices, config);
    }
    let problem = GkeProblem::new(weights.clone(), matrices.to_vec(), Generator::power(t)?)?;
    if t == 1.0 || t == -1.0 {
        let config = SolverConfig {
            closed_forms: true,
            ..config.clone()
        };
        return solve_gke(&problem, &config);
    }
    solve_gke(&problem, config)
}

/// `g⁻¹(Σᵢ wᵢ·g(Aᵢ))`.
pub fn quasi_arithmetic(
    weights: &WeightVector,
    matrices: &[SpdMatrix],
    g: &Generator,
) -> Result<SpdMatrix> {
    check_dims(weights.len(), matrices.len())?;
    let dim = matrices[0].dim();
    let mut sum = Matrix::zeros(dim);
    for (w, a) in weights.as_slice().iter().zip(matrices) {
        check_dims(dim, a.dim())?;
        sum = &sum + &a.apply(|x| g.eval(x))?.scale(*w);
    }
    let spec = SpectralDecomposition::of_symmetric(&sum.symmetrized())?;
    let mut values = Vec::with_capacity(dim);
    for &s in &spec.eigenvalues {
        values.push(g.inverse(s)?);
    }
    SpdMatrix::new(spec.recompose(&values))
}

/// `S(A|B) = A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}`.
pub fn relative_entropy(a: &SpdMatrix, b: &SpdMatrix) -> Result<Matrix> {
    entropy_with(a, b, f64::ln)
}

/// `T_t(A|B) = (A ♯_t B − A)/t` for `t ∈ (0, 1]`, evaluated as
/// `A^{1/2}·((C^t − I)/t)·A^{1/2}` with `C = A^{-1/2} B A^{-1/2}`.
pub fn tsallis_entropy(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<Matrix> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::BadParameter(format!("Tsallis parameter {t} outside (0, 1]")));
    }
    entropy_with(a, b, |c| (t * c.ln()).exp_m1() / t)
}

fn entropy_with(a: &SpdMatrix, b: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    check_dims(a.dim(), b.dim())?;
    let (half, inv_half) = a.sqrt_and_inv_sqrt()?;
    let c = b.matrix().congruence_by(&inv_half);
    let d = SpectralDecomposition::of_symmetric(&c)?;
    if d.min() <= 0.0 {
        return Err(Error::NotSpd("A^{-1/2} B A^{-1/2} lost positivity".into()));
    }
    Ok(d.map(f)?.congruence_by(&half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repfn::{rep_eval, DEFAULT_TOL};
    use crate::spd::{random_spd, thompson_distance};

    fn iterative() -> SolverConfig {
        SolverConfig {
            closed_forms: false,
            ..SolverConfig::default()
        }
    }

    fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn weights_validated() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![1.0]).is_ok());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        let w = WeightVector::normalized(vec![0.3333, 0.3333, 0.3334], 1e-9).unwrap();
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(WeightVector::normalized(vec![0.3, 0.3], 1e-9).is_err());
    }

    #[test]
    fn single_matrix_is_its_own_mean() {
        let a = random_spd(3, 2.0, 1);
        let p = GkeProblem::new(WeightVector::uniform(1).unwrap(), vec![a.clone()], Generator::moebius())
            .unwrap();
        let r = solve_gke(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.solution, a);
    }

    #[test]
    fn iterative_karcher_matches_geodesic() {
        let a = random_spd(4, 2.0, 3);
        let b = random_spd(4, 2.0, 4);
        let w = WeightVector::pair(0.3).unwrap();
        let p = GkeProblem::new(w, vec![a.clone(), b.clone()], Generator::log()).unwrap();
        let r = solve_gke(&p, &iterative()).unwrap();
        assert!(r.iterations > 0);
        assert!(r.residual <= 1e-10);
        let exact = a.geodesic(&b, 0.3).unwrap();
        assert!(rel_err(r.solution.matrix(), exact.matrix()) < 1e-9);
    }

    #[test]
    fn commuting_karcher_is_entrywise_geometric() {
        let mats = vec![
            SpdMatrix::diag(&[2.0, 3.0]).unwrap(),
            SpdMatrix::diag(&[8.0, 0.5]).unwrap(),
            SpdMatrix::diag(&[1.0, 7.0]).unwrap(),
        ];
        let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let r = karcher_mean(&w, &mats, &SolverConfig::default()).unwrap();
        let e0 = 2f64.powf(0.2) * 8f64.powf(0.5);
        let e1 = 3f64.powf(0.2) * 0.5f64.powf(0.5) * 7f64.powf(0.3);
        let expected = Matrix::diag(&[e0, e1]);
        assert!(rel_err(r.solution.matrix(), &expected) < 1e-10);
    }

    #[test]
    fn power_endpoints_iterative() {
        let mats: Vec<_> = (0..3).map(|s| random_spd(3, 2.0, 10 + s)).collect();
        let w = WeightVector::new(vec![0.5, 0.25, 0.25]).unwrap();
        for (t, exact) in [
            (1.0, arithmetic_mean(&w, &mats).unwrap()),
            (-1.0, harmonic_mean(&w, &mats).unwrap()),
        ] {
            let p = GkeProblem::new(w.clone(), mats.clone(), Generator::power(t).unwrap()).unwrap();
            let r = solve_gke(&p, &iterative()).unwrap();
            assert!(rel_err(r.solution.matrix(), exact.matrix()) < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn scalar_consistency_with_rep_eval() {
        for g in Generator::catalogue() {
            for &(lambda, x) in &[(0.3, 5.0), (0.7, 0.2), (0.5, 40.0)] {
                let p = GkeProblem::new(
                    WeightVector::pair(lambda).unwrap(),
                    vec![SpdMatrix::identity(2), SpdMatrix::scalar(2, x).unwrap()],
                    g.clone(),
                )
                .unwrap();
                let r = solve_gke(&p, &iterative()).unwrap();
                let y = rep_eval(&g, lambda, x, DEFAULT_TOL).unwrap();
                let got = r.solution.matrix();
                assert!((got[(0, 0)] - y).abs() < 1e-9 * y.max(1.0), "{g} {lambda} {x}");
                assert!(got[(0, 1)].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn catalogue_converges_from_both_bounds() {
        let mats: Vec<_> = (0..4).map(|s| random_spd(4, 3.0, 40 + s)).collect();
        let w = WeightVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for g in Generator::catalogue() {
            let p = GkeProblem::new(w.clone(), mats.clone(), g.clone()).unwrap();
            let a = solve_gke(&p, &iterative()).unwrap();
            let cfg = SolverConfig {
                initial_guess: Some(p.harmonic_mean().unwrap()),
                ..iterative()
            };
            let b = solve_gke(&p, &cfg).unwrap();
            assert!(a.residual <= 1e-10 && b.residual <= 1e-10);
            assert!(thompson_distance(&a.solution, &b.solution).unwrap() < 1e-8, "{g}");
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mats: Vec<_> = (0..3).map(|s| random_spd(3, 4.0, 70 + s)).collect();
        let p = GkeProblem::new(WeightVector::uniform(3).unwrap(), mats, Generator::moebius()).unwrap();
        let cfg = SolverConfig {
            max_iterations: 1,
            ..iterative()
        };
        assert!(matches!(solve_gke(&p, &cfg), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn quasi_arithmetic_scalar_case() {
        let g = Generator::power(0.5).unwrap();
        let mats = vec![SpdMatrix::scalar(2, 4.0).unwrap(), SpdMatrix::scalar(2, 9.0).unwrap()];
        let w = WeightVector::pair(0.5).unwrap();
        let q = quasi_arithmetic(&w, &mats, &g).unwrap();
        assert!((q.matrix()[(0, 0)] - 6.25).abs() < 1e-12);
    }

    #[test]
    fn quasi_arithmetic_out_of_range() {
        // g(1e300) rounds to the upper endpoint 2.
        let g = Generator::moebius();
        let mats = vec![SpdMatrix::scalar(1, 1e300).unwrap()];
        let w = WeightVector::uniform(1).unwrap();
        assert!(matches!(quasi_arithmetic(&w, &mats, &g), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn entropies() {
        let a = random_spd(3, 2.0, 5);
        let b = random_spd(3, 2.0, 6);
        assert!(relative_entropy(&a, &a).unwrap().max_abs() < 1e-13);
        let i = SpdMatrix::identity(3);
        let s = relative_entropy(&i, &SpdMatrix::scalar(3, std::f64::consts::E).unwrap()).unwrap();
        assert!((&s - &Matrix::identity(3)).max_abs() < 1e-14);
        let t1 = tsallis_entropy(&a, &b, 1.0).unwrap();
        assert!((&t1 - &(b.matrix() - a.matrix())).max_abs() < 1e-12);
        let t = 0.3;
        let direct = (a.geodesic(&b, t).unwrap().matrix() - a.matrix()).scale(1.0 / t);
        assert!(rel_err(&tsallis_entropy(&a, &b, t).unwrap(), &direct) < 1e-12);
        let small = tsallis_entropy(&a, &b, 1e-6).unwrap();
        assert!(rel_err(&small, &relative_entropy(&a, &b).unwrap()) < 1e-4);
        assert!(tsallis_entropy(&a, &b, 0.0).is_err());
    }
}
