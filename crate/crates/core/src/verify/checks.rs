use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{log_grid, Generator};
use crate::repfn::{rep_eval, DEFAULT_TOL};
use crate::solver::{quasi_arithmetic, solve_gke, GkeProblem, SolverConfig, WeightVector};
use crate::spd::{
    loewner_margin, random_spd, thompson_distance, Matrix, SpdMatrix, SpectralDecomposition,
};

use super::Instance;

/// Which side of `g` the deformations `g_p` fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `g_p ≤ g`: `σ_g(𝔸) ≥ I` implies `σ_g(𝔸^p) ≥ I`.
    Le,
    /// `g_p ≥ g`: `σ_g(𝔸) ≤ I` implies `σ_g(𝔸^p) ≤ I`.
    Ge,
    /// `g_p = g`: both implications.
    Equal,
}

impl Direction {
    fn lower_side(self) -> bool {
        matches!(self, Direction::Le | Direction::Equal)
    }

    fn upper_side(self) -> bool {
        matches!(self, Direction::Ge | Direction::Equal)
    }
}

/// One randomized check, with everything needed to re-evaluate an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    SignLemma { g: Generator },
    Bounds { g: Generator },
    PointwiseOrder { g: Generator, f: Generator },
    #[serde(rename = "ando_hiai_1")]
    AndoHiai1 { g: Generator, p: Vec<f64> },
    #[serde(rename = "ando_hiai_2")]
    AndoHiai2 { g: Generator, p: Vec<f64>, direction: Direction },
    Conjecture { g: Generator },
    Congruence { g: Generator },
    Monotonicity { g: Generator },
    Permutation { g: Generator },
    InitIndependence { g: Generator },
}

/// Relative Frobenius error bound for congruence equivariance.
pub const CONGRUENCE_BOUND: f64 = 1e-7;
/// Relative Frobenius error bound for permutation invariance.
pub const PERMUTATION_BOUND: f64 = 1e-10;
/// Thompson distance bound between solves from different starting points.
pub const INIT_BOUND: f64 = 1e-8;

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::SignLemma { .. } => "sign_lemma",
            CheckSpec::Bounds { .. } => "bounds",
            CheckSpec::PointwiseOrder { .. } => "pointwise_order",
            CheckSpec::AndoHiai1 { .. } => "ando_hiai_1",
            CheckSpec::AndoHiai2 { .. } => "ando_hiai_2",
            CheckSpec::Conjecture { .. } => "conjecture",
            CheckSpec::Congruence { .. } => "congruence",
            CheckSpec::Monotonicity { .. } => "monotonicity",
            CheckSpec::Permutation { .. } => "permutation",
            CheckSpec::InitIndependence { .. } => "init_independence",
        }
    }

    pub fn generator(&self) -> &Generator {
        match self {
            CheckSpec::SignLemma { g }
            | CheckSpec::Bounds { g }
            | CheckSpec::PointwiseOrder { g, .. }
            | CheckSpec::AndoHiai1 { g, .. }
            | CheckSpec::AndoHiai2 { g, .. }
            | CheckSpec::Conjecture { g }
            | CheckSpec::Congruence { g }
            | CheckSpec::Monotonicity { g }
            | CheckSpec::Permutation { g }
            | CheckSpec::InitIndependence { g } => g,
        }
    }

    /// A trial violates the check when its margin is below `-threshold`.
    pub fn threshold(&self, tolerance: f64) -> f64 {
        match self {
            CheckSpec::Congruence { .. } => CONGRUENCE_BOUND,
            CheckSpec::Permutation { .. } => PERMUTATION_BOUND,
            CheckSpec::InitIndependence { .. } => INIT_BOUND,
            _ => tolerance,
        }
    }

    /// Margin of one instance; `None` when the instance does not meet the
    /// check's hypothesis.
    pub fn evaluate(&self, inst: &Instance) -> Result<Option<f64>> {
        match self {
            CheckSpec::SignLemma { g } => sign_lemma(g, inst),
            CheckSpec::Bounds { g } => bounds(g, inst).map(Some),
            CheckSpec::PointwiseOrder { g, f } => {
                let xg = solve(g, &inst.weights, &inst.matrices)?;
                let xf = solve(f, &inst.weights, &inst.matrices)?;
                loewner_margin(&xg, &xf).map(Some)
            }
            CheckSpec::AndoHiai1 { g, p } => ando_hiai_1(g, p, inst).map(Some),
            CheckSpec::AndoHiai2 { g, p, direction } => {
                ando_hiai_2(g, p, *direction, inst).map(Some)
            }
            CheckSpec::Conjecture { g } => match norm_ratios(g, inst) {
                Ok((rho, _)) => Ok(Some(1.0 - rho)),
                Err(Error::OutOfRange { .. }) => Ok(None),
                Err(e) => Err(e),
            },
            CheckSpec::Congruence { g } => congruence(g, inst).map(Some),
            CheckSpec::Monotonicity { g } => monotonicity(g, inst).map(Some),
            CheckSpec::Permutation { g } => permutation(g, inst).map(Some),
            CheckSpec::InitIndependence { g } => init_independence(g, inst).map(Some),
        }
    }
}

fn solve_with(
    g: &Generator,
    weights: &WeightVector,
    mats: &[SpdMatrix],
    config: &SolverConfig,
) -> Result<SpdMatrix> {
    let problem = GkeProblem::new(weights.clone(), mats.to_vec(), g.clone())?;
    Ok(solve_gke(&problem, config)?.solution)
}

fn solve(g: &Generator, weights: &WeightVector, mats: &[SpdMatrix]) -> Result<SpdMatrix> {
    solve_with(g, weights, mats, &SolverConfig::default())
}

/// `Σ wᵢ g(c·Aᵢ)`.
fn generator_sum(g: &Generator, weights: &WeightVector, mats: &[SpdMatrix], c: f64) -> Result<Matrix> {
    let mut sum = Matrix::zeros(mats[0].dim());
    for (w, a) in weights.as_slice().iter().zip(mats) {
        sum = &sum + &a.apply(|x| g.eval(c * x))?.scale(*w);
    }
    Ok(sum.symmetrized())
}

fn sum_spectrum(g: &Generator, inst: &Instance, c: f64) -> Result<(f64, f64)> {
    let d = SpectralDecomposition::of_symmetric(&generator_sum(g, &inst.weights, &inst.matrices, c)?)?;
    Ok((d.min(), d.max()))
}

/// Scale `c` with `λ_min(Σ wᵢ g(c·Aᵢ))` just above 0 (`upper = false`) or
/// `λ_max` just below 0 (`upper = true`). `Σ wᵢ g(c·Aᵢ)` increases with `c`.
fn tightening_scale(g: &Generator, inst: &Instance, upper: bool) -> Result<Option<f64>> {
    let h = |u: f64| -> Result<f64> {
        let (lo, hi) = sum_spectrum(g, inst, u.exp())?;
        Ok(if upper { hi } else { lo })
    };
    let (mut a, mut b) = (-40.0f64, 40.0f64);
    if !(h(a)? < 0.0 && h(b)? > 0.0) {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if h(mid)? > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(if upper { a } else { b }.exp()))
}

fn sign_lemma(g: &Generator, inst: &Instance) -> Result<Option<f64>> {
    let id = SpdMatrix::identity(inst.matrices[0].dim());
    let mut margins = Vec::new();
    let mut assert_on = |c: f64, lower: bool| -> Result<()> {
        let mats = inst
            .matrices
            .iter()
            .map(|a| a.scale(c))
            .collect::<Result<Vec<_>>>()?;
        let x = solve(g, &inst.weights, &mats)?;
        margins.push(if lower {
            loewner_margin(&id, &x)?
        } else {
            loewner_margin(&x, &id)?
        });
        Ok(())
    };

    let (lo, hi) = sum_spectrum(g, inst, 1.0)?;
    if lo >= 0.0 {
        assert_on(1.0, true)?;
    }
    if hi <= 0.0 {
        assert_on(1.0, false)?;
    }
    if let Some(c) = tightening_scale(g, inst, false)? {
        if sum_spectrum(g, inst, c)?.0 >= 0.0 {
            assert_on(c, true)?;
        }
    }
    if let Some(c) = tightening_scale(g, inst, true)? {
        if sum_spectrum(g, inst, c)?.1 <= 0.0 {
            assert_on(c, false)?;
        }
    }
    Ok(margins.into_iter().reduce(f64::min))
}

fn bounds(g: &Generator, inst: &Instance) -> Result<f64> {
    let problem = GkeProblem::new(inst.weights.clone(), inst.matrices.clone(), g.clone())?;
    let x = solve_gke(&problem, &SolverConfig::default())?.solution;
    let lower = loewner_margin(&problem.harmonic_mean()?, &x)?;
    let upper = loewner_margin(&x, &problem.arithmetic_mean()?)?;
    Ok(lower.min(upper))
}

#[derive(Clone, Copy)]
enum Side {
    /// `σ_g = I`.
    Equal,
    /// `σ_g ≤ I`, strictly.
    Below,
    /// `σ_g ≥ I`, strictly.
    Above,
}

/// Congruence `Aᵢ ↦ Y^{-1/2} Aᵢ Y^{-1/2}` where `Y = X`, `X + δI` or
/// `(X⁻¹ + δI)⁻¹`, so that `σ_g` of the result equals `Y^{-1/2} X Y^{-1/2}`.
fn normalize(mats: &[SpdMatrix], x: &SpdMatrix, side: Side) -> Result<Vec<SpdMatrix>> {
    let dim = x.dim();
    let y = match side {
        Side::Equal => x.clone(),
        Side::Below => {
            let delta = 0.25 * x.norm2()?;
            SpdMatrix::new(x.matrix() + &Matrix::scalar(dim, delta))?
        }
        Side::Above => {
            let inv = x.inverse()?;
            let delta = 0.25 * inv.norm2()?;
            SpdMatrix::new(inv.matrix() + &Matrix::scalar(dim, delta))?.inverse()?
        }
    };
    let (_, inv_half) = y.sqrt_and_inv_sqrt()?;
    mats.iter()
        .map(|a| SpdMatrix::new(a.matrix().congruence_by(&inv_half)))
        .collect()
}

fn powered(mats: &[SpdMatrix], p: f64) -> Result<Vec<SpdMatrix>> {
    mats.iter().map(|a| a.powf(p)).collect()
}

fn ando_hiai_1(g: &Generator, p_list: &[f64], inst: &Instance) -> Result<f64> {
    let id = SpdMatrix::identity(inst.matrices[0].dim());
    let x = solve(g, &inst.weights, &inst.matrices)?;
    let mut worst = f64::INFINITY;
    for side in [Side::Equal, Side::Below, Side::Above] {
        let normalized = normalize(&inst.matrices, &x, side)?;
        for &p in p_list {
            let y = solve(&g.deform(p)?, &inst.weights, &powered(&normalized, p)?)?;
            let below = || loewner_margin(&y, &id);
            let above = || loewner_margin(&id, &y);
            let m = match side {
                Side::Equal => below()?.min(above()?),
                Side::Below => below()?,
                Side::Above => above()?,
            };
            worst = worst.min(m);
        }
    }
    Ok(worst)
}

fn ando_hiai_2(g: &Generator, p_list: &[f64], direction: Direction, inst: &Instance) -> Result<f64> {
    let id = SpdMatrix::identity(inst.matrices[0].dim());
    let x = solve(g, &inst.weights, &inst.matrices)?;
    let mut worst = f64::INFINITY;
    let mut sides = Vec::new();
    if direction.lower_side() {
        sides.push((Side::Equal, true));
        sides.push((Side::Above, true));
    }
    if direction.upper_side() {
        sides.push((Side::Equal, false));
        sides.push((Side::Below, false));
    }
    for (side, lower) in sides {
        let normalized = normalize(&inst.matrices, &x, side)?;
        for &p in p_list {
            let y = solve(g, &inst.weights, &powered(&normalized, p)?)?;
            let m = if lower {
                loewner_margin(&id, &y)?
            } else {
                loewner_margin(&y, &id)?
            };
            worst = worst.min(m);
        }
    }
    Ok(worst)
}

/// `(‖σ_g‖₂ / ‖Q‖₂, ‖σ_g‖_F / ‖Q‖_F)` with `Q = g⁻¹(Σ wᵢ g(Aᵢ))`.
pub fn norm_ratios(g: &Generator, inst: &Instance) -> Result<(f64, f64)> {
    let q = quasi_arithmetic(&inst.weights, &inst.matrices, g)?;
    let x = solve(g, &inst.weights, &inst.matrices)?;
    Ok((
        x.norm2()? / q.norm2()?,
        x.matrix().frobenius_norm() / q.matrix().frobenius_norm(),
    ))
}

/// Product of two random SPD matrices: invertible, generally not symmetric.
fn random_invertible(dim: usize, seed: u64) -> Matrix {
    let a = random_spd(dim, 2.0, seed);
    let b = random_spd(dim, 2.0, seed.wrapping_add(1));
    a.matrix().matmul(b.matrix())
}

fn rel_frobenius(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm()
}

fn congruence(g: &Generator, inst: &Instance) -> Result<f64> {
    let t = random_invertible(inst.matrices[0].dim(), inst.aux_seed);
    let x = solve(g, &inst.weights, &inst.matrices)?;
    let moved = inst
        .matrices
        .iter()
        .map(|a| a.congruence(&t))
        .collect::<Result<Vec<_>>>()?;
    let y = solve(g, &inst.weights, &moved)?;
    Ok(-rel_frobenius(y.matrix(), x.congruence(&t)?.matrix()))
}

fn monotonicity(g: &Generator, inst: &Instance) -> Result<f64> {
    let x = solve(g, &inst.weights, &inst.matrices)?;
    let bigger = inst
        .matrices
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let r = random_spd(a.dim(), 2.0, inst.aux_seed.wrapping_add(i as u64));
            SpdMatrix::new(a.matrix() + &r.matrix().scale(0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    let y = solve(g, &inst.weights, &bigger)?;
    loewner_margin(&x, &y)
}

fn permutation(g: &Generator, inst: &Instance) -> Result<f64> {
    let config = SolverConfig {
        residual_tol: 1e-12,
        ..SolverConfig::default()
    };
    let x = solve_with(g, &inst.weights, &inst.matrices, &config)?;
    let mut w = inst.weights.as_slice().to_vec();
    let mut mats = inst.matrices.clone();
    w.reverse();
    mats.reverse();
    let shift = (inst.aux_seed as usize) % mats.len();
    w.rotate_left(shift);
    mats.rotate_left(shift);
    let y = solve_with(g, &WeightVector::new(w)?, &mats, &config)?;
    Ok(-rel_frobenius(y.matrix(), x.matrix()))
}

fn init_independence(g: &Generator, inst: &Instance) -> Result<f64> {
    let problem = GkeProblem::new(inst.weights.clone(), inst.matrices.clone(), g.clone())?;
    let base = SolverConfig {
        closed_forms: false,
        ..SolverConfig::default()
    };
    let a = solve_gke(&problem, &base)?.solution;
    let from_harmonic = SolverConfig {
        initial_guess: Some(problem.harmonic_mean()?),
        ..base
    };
    let b = solve_gke(&problem, &from_harmonic)?.solution;
    Ok(-thompson_distance(&a, &b)?)
}

/// Relative slack for scalar grid comparisons.
fn slack(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

/// Grid used for scalar prechecks.
pub fn scalar_grid() -> Vec<f64> {
    log_grid(1e-6, 1e6, 241)
}

/// Points of the scalar grid where `g(x) > f(x)`.
pub fn pointwise_violations(g: &Generator, f: &Generator) -> Vec<f64> {
    scalar_grid()
        .into_iter()
        .filter(|&x| {
            let (a, b) = (g.eval(x), f.eval(x));
            a > b + slack(b)
        })
        .collect()
}

/// Compare `g_p` with `g` on the scalar grid for every `p`.
pub fn classify_deformation(g: &Generator, p_list: &[f64]) -> Result<Direction> {
    let (mut le, mut ge) = (true, true);
    for &p in p_list {
        let gp = g.deform(p)?;
        for x in scalar_grid() {
            let (a, b) = (gp.eval(x), g.eval(x));
            le &= a <= b + slack(b);
            ge &= a >= b - slack(b);
        }
    }
    match (le, ge) {
        (true, true) => Ok(Direction::Equal),
        (true, false) => Ok(Direction::Le),
        (false, true) => Ok(Direction::Ge),
        (false, false) => Err(Error::Inconclusive(format!(
            "{g}: deformations fall on both sides of g"
        ))),
    }
}

/// Scalar condition `f_λ(x^{1/p})^p ≤ f_λ(x)` (or `≥`, or both) on a
/// `(λ, x)` grid. Returns `(points, violations)`.
pub fn scalar_condition(g: &Generator, p_list: &[f64], direction: Direction) -> Result<(usize, usize)> {
    let lambdas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let xs = log_grid(1e-3, 1e3, 21);
    let (mut points, mut bad) = (0, 0);
    for &p in p_list {
        for &lambda in &lambdas {
            for &x in &xs {
                let lhs = rep_eval(g, lambda, x.powf(1.0 / p), DEFAULT_TOL)?.powf(p);
                let rhs = rep_eval(g, lambda, x, DEFAULT_TOL)?;
                let s = 1e-10 * rhs;
                let ok_le = lhs <= rhs + s;
                let ok_ge = lhs >= rhs - s;
                let ok = match direction {
                    Direction::Le => ok_le,
                    Direction::Ge => ok_ge,
                    Direction::Equal => ok_le && ok_ge,
                };
                points += 1;
                if !ok {
                    bad += 1;
                }
            }
        }
    }
    Ok((points, bad))
}
