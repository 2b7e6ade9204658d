//! Operator monotone generators `g` on `(0, ∞)` normalized by `g(1) = 0`,
//! `g'(1) = 1`, together with their closed-form inverses and the deformation
//! `g_p(x) = p · g(x^{1/p})`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power exponents with `|t|` below this are treated as the logarithm.
pub const POWER_ZERO_CUTOFF: f64 = 1e-8;

/// Catalogued generator shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// `log x`
    Log,
    /// `(xᵗ − 1)/t`, `t ∈ [−1, 1] \ {0}`
    Power(f64),
    /// `2(√x − 1)`
    Sqrt2,
    /// `1 − 1/x`
    Reciprocal1,
    /// `2(1 − 2/(x + 1))`
    Moebius,
    /// `p · base(x^{1/p})`, `p ≥ 1`
    Deformed { base: Box<Generator>, p: f64 },
}

/// A member of the generator class, constructed only through validated
/// constructors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Generator {
    kind: GeneratorKind,
}

/// Which of the four finiteness patterns of `(g(0⁺), g(+∞))` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeCase {
    /// `g(0) = −∞`, `g(∞) = +∞`
    Unbounded = 1,
    /// `g(0) = −∞`, `g(∞) < +∞`
    BoundedAbove = 2,
    /// `g(0) > −∞`, `g(∞) = +∞`
    BoundedBelow = 3,
    /// both finite
    Bounded = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeEndpoints {
    pub lower: f64,
    pub upper: f64,
    pub case: RangeCase,
}

impl RangeEndpoints {
    pub fn case_id(&self) -> u8 {
        self.case as u8
    }

    /// Open-interval membership.
    pub fn contains(&self, s: f64) -> bool {
        s > self.lower && s < self.upper
    }
}

impl Generator {
    pub fn log() -> Self {
        Generator {
            kind: GeneratorKind::Log,
        }
    }

    /// `(xᵗ − 1)/t`. Exponents with `0 < |t| < 1e-8` are redirected to
    /// [`Generator::log`]; `t = 0` itself is rejected.
    pub fn power(t: f64) -> Result<Self> {
        if !t.is_finite() || t == 0.0 || !(-1.0..=1.0).contains(&t) {
            return Err(Error::BadParameter(format!(
                "power exponent {t} must lie in [-1, 1] \\ {{0}}"
            )));
        }
        if t.abs() < POWER_ZERO_CUTOFF {
            return Ok(Self::log());
        }
        Ok(Generator {
            kind: GeneratorKind::Power(t),
        })
    }

    pub fn sqrt2() -> Self {
        Generator {
            kind: GeneratorKind::Sqrt2,
        }
    }

    pub fn reciprocal1() -> Self {
        Generator {
            kind: GeneratorKind::Reciprocal1,
        }
    }

    pub fn moebius() -> Self {
        Generator {
            kind: GeneratorKind::Moebius,
        }
    }

    /// `g_p(x) = p · g(x^{1/p})` for `p ≥ 1`.
    pub fn deform(&self, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::BadParameter(format!(
                "deformation parameter {p} must be >= 1"
            )));
        }
        Ok(Generator {
            kind: GeneratorKind::Deformed {
                base: Box::new(self.clone()),
                p,
            },
        })
    }

    /// The generators exercised by the verification suite.
    pub fn catalogue() -> Vec<Generator> {
        vec![
            Self::log(),
            Self::power(0.5).unwrap(),
            Self::power(-0.5).unwrap(),
            Self::power(1.0).unwrap(),
            Self::power(-1.0).unwrap(),
            Self::sqrt2(),
            Self::reciprocal1(),
            Self::moebius(),
        ]
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn is_log(&self) -> bool {
        matches!(self.kind, GeneratorKind::Log)
    }

    /// Exponent `t` when this generator is the power generator or a member of
    /// the power family under another name (`sqrt2`, `reciprocal1`, deformed
    /// powers).
    pub fn power_exponent(&self) -> Option<f64> {
        match &self.kind {
            GeneratorKind::Power(t) => Some(*t),
            GeneratorKind::Sqrt2 => Some(0.5),
            GeneratorKind::Reciprocal1 => Some(-1.0),
            GeneratorKind::Deformed { base, p } => base.power_exponent().map(|t| t / p),
            GeneratorKind::Log | GeneratorKind::Moebius => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Log => x.ln(),
            GeneratorKind::Power(t) => power_eval(*t, x),
            GeneratorKind::Sqrt2 => 2.0 * (x.sqrt() - 1.0),
            GeneratorKind::Reciprocal1 => 1.0 - 1.0 / x,
            GeneratorKind::Moebius => 2.0 * (x - 1.0) / (x + 1.0),
            GeneratorKind::Deformed { base, p } => p * base.eval(x.powf(1.0 / p)),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Log => 1.0 / x,
            GeneratorKind::Power(t) => x.powf(t - 1.0),
            GeneratorKind::Sqrt2 => 1.0 / x.sqrt(),
            GeneratorKind::Reciprocal1 => 1.0 / (x * x),
            GeneratorKind::Moebius => 4.0 / ((x + 1.0) * (x + 1.0)),
            GeneratorKind::Deformed { base, p } => {
                let r = x.powf(1.0 / p);
                base.derivative(r) * r / x
            }
        }
    }

    /// `g⁻¹(s)`; `OutOfRange` unless `s` lies strictly inside `(g(0), g(∞))`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        let range = self.range_endpoints();
        if !range.contains(s) {
            return Err(Error::OutOfRange {
                value: s,
                lower: range.lower,
                upper: range.upper,
            });
        }
        Ok(self.inverse_unchecked(s))
    }

    fn inverse_unchecked(&self, s: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Log => s.exp(),
            GeneratorKind::Power(t) => power_inverse(*t, s),
            GeneratorKind::Sqrt2 => {
                let r = 1.0 + 0.5 * s;
                r * r
            }
            GeneratorKind::Reciprocal1 => 1.0 / (1.0 - s),
            GeneratorKind::Moebius => (2.0 + s) / (2.0 - s),
            GeneratorKind::Deformed { base, p } => base.inverse_unchecked(s / p).powf(*p),
        }
    }

    /// `(g(0⁺), g(+∞))` and its finiteness case.
    pub fn range_endpoints(&self) -> RangeEndpoints {
        let (lower, upper) = match &self.kind {
            GeneratorKind::Log => (f64::NEG_INFINITY, f64::INFINITY),
            GeneratorKind::Power(t) if *t > 0.0 => (-1.0 / t, f64::INFINITY),
            GeneratorKind::Power(t) => (f64::NEG_INFINITY, -1.0 / t),
            GeneratorKind::Sqrt2 => (-2.0, f64::INFINITY),
            GeneratorKind::Reciprocal1 => (f64::NEG_INFINITY, 1.0),
            GeneratorKind::Moebius => (-2.0, 2.0),
            GeneratorKind::Deformed { base, p } => {
                let r = base.range_endpoints();
                (p * r.lower, p * r.upper)
            }
        };
        let case = match (lower.is_finite(), upper.is_finite()) {
            (false, false) => RangeCase::Unbounded,
            (false, true) => RangeCase::BoundedAbove,
            (true, false) => RangeCase::BoundedBelow,
            (true, true) => RangeCase::Bounded,
        };
        RangeEndpoints { lower, upper, case }
    }

    pub fn class_l_report(&self, grid: &[f64]) -> ClassLReport {
        check_class_l(|x| self.eval(x), |x| self.derivative(x), grid)
    }
}

fn power_eval(t: f64, x: f64) -> f64 {
    if t == 1.0 {
        x - 1.0
    } else if t == -1.0 {
        1.0 - 1.0 / x
    } else {
        (t * x.ln()).exp_m1() / t
    }
}

fn power_inverse(t: f64, s: f64) -> f64 {
    if t == 1.0 {
        1.0 + s
    } else if t == -1.0 {
        1.0 / (1.0 - s)
    } else {
        ((t * s).ln_1p() / t).exp()
    }
}

/// Log-spaced grid of `points` values over `[lo, hi]`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let last = points - 1;
            (0..points)
                .map(|i| match i {
                    0 => lo,
                    i if i == last => hi,
                    i => (a + (b - a) * i as f64 / last as f64).exp(),
                })
                .collect()
        }
    }
}

/// Membership diagnostics of a scalar function against the class
/// `{g : g(1) = 0, g'(1) = 1}` and the elementary bounds `1 − 1/x ≤ g(x) ≤ x − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassLReport {
    pub value_at_one: f64,
    pub derivative_residual: f64,
    /// Grid points `x_{i+1}` where `g(x_{i+1}) ≤ g(x_i)`.
    pub monotonicity_violations: Vec<f64>,
    /// Grid points where one of the elementary bounds fails.
    pub bound_violations: Vec<f64>,
}

impl ClassLReport {
    pub fn is_clean(&self) -> bool {
        self.value_at_one.abs() <= 1e-12
            && self.derivative_residual <= 1e-12
            && self.monotonicity_violations.is_empty()
            && self.bound_violations.is_empty()
    }
}

/// Refutation-only check; a clean report does not prove operator monotonicity.
pub fn check_class_l(
    eval: impl Fn(f64) -> f64,
    derivative: impl Fn(f64) -> f64,
    grid: &[f64],
) -> ClassLReport {
    let mut sorted: Vec<f64> = grid.iter().copied().filter(|x| *x > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    let values: Vec<f64> = sorted.iter().map(|&x| eval(x)).collect();

    let monotonicity_violations = sorted
        .windows(2)
        .zip(values.windows(2))
        .filter(|(xs, vs)| xs[1] > xs[0] && vs[1] <= vs[0])
        .map(|(xs, _)| xs[1])
        .collect();

    let bound_violations = sorted
        .iter()
        .zip(&values)
        .filter(|(&x, &v)| {
            let lower = 1.0 - 1.0 / x;
            let upper = x - 1.0;
            let slack = 1e-12 * 1.0f64.max(lower.abs()).max(upper.abs());
            v < lower - slack || v > upper + slack
        })
        .map(|(&x, _)| x)
        .collect();

    ClassLReport {
        value_at_one: eval(1.0),
        derivative_residual: (derivative(1.0) - 1.0).abs(),
        monotonicity_violations,
        bound_violations,
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GeneratorKind::Log => write!(f, "log"),
            GeneratorKind::Power(t) => write!(f, "power:{t}"),
            GeneratorKind::Sqrt2 => write!(f, "sqrt2"),
            GeneratorKind::Reciprocal1 => write!(f, "reciprocal1"),
            GeneratorKind::Moebius => write!(f, "moebius"),
            GeneratorKind::Deformed { base, p } => write!(f, "deform:{p}:{base}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Grammar: `log | power:<t> | sqrt2 | reciprocal1 | moebius | deform:<p>:<spec>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {v:?} in generator spec: {e}")))
        };
        match s {
            "log" => Ok(Self::log()),
            "sqrt2" => Ok(Self::sqrt2()),
            "reciprocal1" => Ok(Self::reciprocal1()),
            "moebius" => Ok(Self::moebius()),
            _ => {
                if let Some(t) = s.strip_prefix("power:") {
                    Self::power(number(t)?)
                } else if let Some(rest) = s.strip_prefix("deform:") {
                    let (p, base) = rest.split_once(':').ok_or_else(|| {
                        Error::Parse(format!("expected deform:<p>:<spec>, got {s:?}"))
                    })?;
                    base.parse::<Generator>()?.deform(number(p)?)
                } else {
                    Err(Error::Parse(format!("unknown generator spec {s:?}")))
                }
            }
        }
    }
}

impl TryFrom<String> for Generator {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Generator> for String {
    fn from(g: Generator) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        log_grid(1e-6, 1e6, 121)
    }

    fn all() -> Vec<Generator> {
        let mut v = Generator::catalogue();
        v.push(Generator::power(0.3).unwrap());
        v.push(Generator::moebius().deform(2.0).unwrap());
        v.push(Generator::power(-0.7).unwrap().deform(1.5).unwrap());
        v
    }

    #[test]
    fn log_values() {
        let g = Generator::log();
        assert!((g.eval(std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert!((g.inverse(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn power_formula_and_inverse() {
        for &t in &[0.5, -0.5, 0.3, -1.0, 1.0] {
            let g = Generator::power(t).unwrap();
            for &x in &[0.2f64, 1.7, 9.0] {
                let expect = (x.powf(t) - 1.0) / t;
                assert!((g.eval(x) - expect).abs() < 1e-14 * expect.abs().max(1.0));
            }
            for &s in &[-0.5, 0.1, 0.9] {
                let expect = (1.0 + t * s).powf(1.0 / t);
                assert!((g.inverse(s).unwrap() - expect).abs() < 1e-14 * expect);
            }
        }
    }

    #[test]
    fn moebius_normalization() {
        let g = Generator::moebius();
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.derivative(1.0), 1.0);
        assert!((g.eval(3.0) - 2.0 * (1.0 - 2.0 / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn power_parameter_validation() {
        assert!(Generator::power(0.0).is_err());
        assert!(Generator::power(1.5).is_err());
        assert!(Generator::power(-1.01).is_err());
        assert!(Generator::power(f64::NAN).is_err());
        assert!(Generator::power(1e-10).unwrap().is_log());
        assert!(Generator::log().deform(0.5).is_err());
    }

    #[test]
    fn class_members_are_normalized_and_monotone() {
        for g in all() {
            assert_eq!(g.eval(1.0), 0.0, "{g}");
            assert!((g.derivative(1.0) - 1.0).abs() <= 1e-12, "{g}");
            let report = g.class_l_report(&grid());
            assert!(report.is_clean(), "{g}: {report:?}");
        }
    }

    #[test]
    fn non_member_is_refuted() {
        let report = check_class_l(|x| x * x - 1.0, |x| 2.0 * x, &[0.5, 1.0, 3.0]);
        assert!(report.bound_violations.contains(&3.0));
        assert!(!report.is_clean());
    }

    #[test]
    fn inverse_round_trip_on_grid() {
        for g in all() {
            for x in grid() {
                let back = g.inverse(g.eval(x)).unwrap();
                assert!((back - x).abs() <= 1e-10 * x, "{g} at {x}: {back}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        for g in all() {
            for x in log_grid(1e-3, 1e3, 31) {
                let h = 1e-6 * x;
                let fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
                let d = g.derivative(x);
                assert!((fd - d).abs() <= 1e-5 * d.abs(), "{g} at {x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn range_cases() {
        let r = Generator::log().range_endpoints();
        assert_eq!((r.case_id(), r.lower, r.upper), (1, f64::NEG_INFINITY, f64::INFINITY));
        assert_eq!(Generator::reciprocal1().range_endpoints().case_id(), 2);
        assert_eq!(Generator::sqrt2().range_endpoints().case_id(), 3);
        let m = Generator::moebius().range_endpoints();
        assert_eq!((m.case_id(), m.lower, m.upper), (4, -2.0, 2.0));
        let p = Generator::power(0.25).unwrap().range_endpoints();
        assert_eq!((p.lower, p.upper), (-4.0, f64::INFINITY));
        let n = Generator::power(-0.25).unwrap().range_endpoints();
        assert_eq!((n.lower, n.upper), (f64::NEG_INFINITY, 4.0));
        assert!(matches!(
            Generator::moebius().inverse(2.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn deformation_identities() {
        let xs = log_grid(1e-3, 1e3, 41);
        for g in all() {
            let same = g.deform(1.0).unwrap();
            for &x in &xs {
                assert!((same.eval(x) - g.eval(x)).abs() <= 1e-14 * g.eval(x).abs().max(1.0));
            }
        }
        for &p in &[1.0, 1.5, 2.0, 5.0] {
            let lp = Generator::log().deform(p).unwrap();
            for &x in &xs {
                assert!((lp.eval(x) - x.ln()).abs() <= 1e-13 * x.ln().abs().max(1.0));
            }
            for &t in &[0.5, -0.5, 1.0] {
                let gp = Generator::power(t).unwrap().deform(p).unwrap();
                let direct = Generator::power(t / p).unwrap();
                for &x in &xs {
                    let (a, b) = (gp.eval(x), direct.eval(x));
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "t={t} p={p} x={x}");
                }
            }
            for g in all() {
                let d = g.deform(p).unwrap();
                assert!(d.eval(1.0).abs() <= 1e-10);
                assert!((d.derivative(1.0) - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn nested_deformation_composes() {
        let xs = log_grid(1e-3, 1e3, 41);
        for g in all() {
            let nested = g.deform(1.5).unwrap().deform(2.0).unwrap();
            let flat = g.deform(3.0).unwrap();
            for &x in &xs {
                let (a, b) = (nested.eval(x), flat.eval(x));
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{g} at {x}");
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["log", "power:0.5", "power:-1", "sqrt2", "reciprocal1", "moebius", "deform:2:power:0.5", "deform:1.5:deform:2:moebius"] {
            let g: Generator = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("power:x".parse::<Generator>().is_err());
        assert!("cosh".parse::<Generator>().is_err());
        assert!("deform:0.5:log".parse::<Generator>().is_err());
    }
}
