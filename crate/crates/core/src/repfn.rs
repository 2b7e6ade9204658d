//! Scalar representing functions `f_λ` of two-point generalized Karcher means.
//!
//! `y = f_λ(x)` is the unique positive root of
//! `φ(y) = (1−λ)·g(1/y) + λ·g(x/y)`. `φ` is strictly decreasing in `y`, and
//! the harmonic/arithmetic bounds `[(1−λ) + λ/x]⁻¹ ≤ y ≤ (1−λ) + λx` bracket
//! the root, so bisection always converges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{Generator, RangeCase};

/// Default absolute tolerance on `|φ(y)|`.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_ITERATIONS: usize = 400;
const NEWTON_POLISH_STEPS: usize = 3;

/// Probe points used for bounded-range generators.
pub const RANGE_PROBE_LOW: f64 = 1e-12;
pub const RANGE_PROBE_HIGH: f64 = 1e12;

fn validate(lambda: f64, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::BadParameter(format!("lambda {lambda} outside [0, 1]")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::BadParameter(format!("x {x} must be positive and finite")));
    }
    Ok(())
}

/// `f_λ(x)` for generator `g`, with `|φ(y)| ≤ tol` or the bracket reduced to
/// adjacent floats.
pub fn rep_eval(g: &Generator, lambda: f64, x: f64, tol: f64) -> Result<f64> {
    validate(lambda, x)?;
    if !(tol > 0.0) {
        return Err(Error::BadParameter(format!("tolerance {tol} must be positive")));
    }
    if lambda == 0.0 || x == 1.0 {
        return Ok(1.0);
    }
    if lambda == 1.0 {
        return Ok(x);
    }

    let phi = |y: f64| (1.0 - lambda) * g.eval(1.0 / y) + lambda * g.eval(x / y);
    let dphi = |y: f64| {
        -((1.0 - lambda) * g.derivative(1.0 / y) + lambda * x * g.derivative(x / y)) / (y * y)
    };

    let harmonic = 1.0 / ((1.0 - lambda) + lambda / x);
    let arithmetic = (1.0 - lambda) + lambda * x;
    let (mut lo, mut hi) = if harmonic <= arithmetic {
        (harmonic, arithmetic)
    } else {
        (arithmetic, harmonic)
    };
    let (mut f_lo, mut f_hi) = (phi(lo), phi(hi));
    let slack = 1e-13 * (1.0 + x.ln().abs());
    if f_lo < -slack || f_hi > slack {
        return Err(Error::BracketViolated { lo: f_lo, hi: f_hi });
    }
    if f_lo <= 0.0 {
        return Ok(lo);
    }
    if f_hi >= 0.0 {
        return Ok(hi);
    }

    let mut width_target = 1e-14 * (1.0 + x);
    let mut iterations = 0;
    loop {
        while hi - lo > width_target && iterations < MAX_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = phi(mid);
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid > 0.0 {
                (lo, f_lo) = (mid, f_mid);
            } else {
                (hi, f_hi) = (mid, f_mid);
            }
            iterations += 1;
        }

        // Newton polish from the better endpoint, kept inside the bracket.
        let mut y = if f_lo.abs() < f_hi.abs() { lo } else { hi };
        for _ in 0..NEWTON_POLISH_STEPS {
            let f = phi(y);
            if f == 0.0 {
                return Ok(y);
            }
            if f > 0.0 {
                (lo, f_lo) = (y, f);
            } else {
                (hi, f_hi) = (y, f);
            }
            let next = y - f / dphi(y);
            y = if next.is_finite() && next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            iterations += 1;
        }

        let f = phi(y);
        let mid = 0.5 * (lo + hi);
        if f.abs() <= tol || mid <= lo || mid >= hi {
            return Ok(y);
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: f.abs(),
            });
        }
        if f > 0.0 {
            (lo, f_lo) = (y, f);
        } else {
            (hi, f_hi) = (y, f);
        }
        width_target *= 1e-3;
    }
}

/// `f_λ⁻¹(x) = x · g⁻¹(−((1−λ)/λ) · g(1/x))` for `λ ∈ (0, 1)`.
///
/// `OutOfRange` signals that `x` lies outside the range of `f_λ`.
pub fn rep_inverse(g: &Generator, lambda: f64, x: f64) -> Result<f64> {
    validate(lambda, x)?;
    if lambda == 0.0 || lambda == 1.0 {
        return Err(Error::BadParameter(format!(
            "inverse needs lambda strictly inside (0, 1), got {lambda}"
        )));
    }
    let arg = -((1.0 - lambda) / lambda) * g.eval(1.0 / x);
    Ok(x * g.inverse(arg)?)
}

/// Range `(y₀, y_∞)` of `f_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepRange {
    pub lower: f64,
    pub upper: f64,
    /// True when the endpoints come from probing `f_λ` at
    /// [`RANGE_PROBE_LOW`] / [`RANGE_PROBE_HIGH`] instead of a closed form.
    pub numeric: bool,
}

pub fn rep_range(g: &Generator, lambda: f64) -> Result<RepRange> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::BadParameter(format!(
            "range needs lambda strictly inside (0, 1), got {lambda}"
        )));
    }
    let ends = g.range_endpoints();
    let ratio = lambda / (1.0 - lambda);
    let closed = |endpoint: f64| -> Result<f64> { Ok(1.0 / g.inverse(-ratio * endpoint)?) };
    let range = match ends.case {
        RangeCase::Unbounded => RepRange {
            lower: 0.0,
            upper: f64::INFINITY,
            numeric: false,
        },
        RangeCase::BoundedAbove => RepRange {
            lower: 0.0,
            upper: closed(ends.upper)?,
            numeric: false,
        },
        RangeCase::BoundedBelow => RepRange {
            lower: closed(ends.lower)?,
            upper: f64::INFINITY,
            numeric: false,
        },
        RangeCase::Bounded => RepRange {
            lower: rep_eval(g, lambda, RANGE_PROBE_LOW, DEFAULT_TOL)?,
            upper: rep_eval(g, lambda, RANGE_PROBE_HIGH, DEFAULT_TOL)?,
            numeric: true,
        },
    };
    Ok(range)
}

/// Forward difference `(f_h(x) − 1)/h`, which tends to `g(x)` as `h → 0`.
pub fn lambda_derivative_at_zero(g: &Generator, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-4) {
        return Err(Error::BadParameter(format!("step {h} outside (0, 1e-4]")));
    }
    Ok((rep_eval(g, h, x, DEFAULT_TOL)? - 1.0) / h)
}

/// Representing function of the deformed generator `g_p`, which equals
/// `f_λ(x^{1/p})^p`.
pub fn deformed_rep_eval(g: &Generator, p: f64, lambda: f64, x: f64) -> Result<f64> {
    rep_eval(&g.deform(p)?, lambda, x, DEFAULT_TOL)
}
