//! Randomized verification of the mean inequalities, with reproducible
//! witnesses for every failure.
//!
//! Each trial draws its instance from a ChaCha stream selected by the trial
//! index, so reports do not depend on how trials are scheduled across threads.

mod checks;

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::solver::WeightVector;
use crate::spd::{random_spd, SpdMatrix};

pub use checks::{
    classify_deformation, norm_ratios, pointwise_violations, scalar_condition, scalar_grid,
    CheckSpec, Direction, CONGRUENCE_BOUND, INIT_BOUND, PERMUTATION_BOUND,
};

/// Largest matrix dimension a plan may request.
pub const MAX_DIM: usize = 16;

/// Exponents used by the Ando–Hiai checks in the property suite.
pub const DEFAULT_P_LIST: [f64; 3] = [1.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub n_operators: Vec<usize>,
    /// Spread of log-eigenvalues of each random matrix.
    pub log_condition: f64,
    /// Relative Löwner tolerance.
    pub tolerance: f64,
}

impl Default for TrialPlan {
    fn default() -> Self {
        TrialPlan {
            seed: 1,
            trials: 100,
            dims: vec![2, 3, 5],
            n_operators: vec![2, 3, 5],
            log_condition: 2.0,
            tolerance: 1e-8,
        }
    }
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadParameter("trials must be >= 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
            return Err(Error::BadParameter(format!(
                "dims {:?} must be non-empty and within [1, {MAX_DIM}]",
                self.dims
            )));
        }
        if self.n_operators.is_empty() || self.n_operators.contains(&0) {
            return Err(Error::BadParameter(format!(
                "operator counts {:?} must be non-empty and positive",
                self.n_operators
            )));
        }
        if !(0.0..=crate::spd::MAX_LOG_CONDITION).contains(&self.log_condition) {
            return Err(Error::BadParameter(format!(
                "log_condition {} outside [0, {}]",
                self.log_condition,
                crate::spd::MAX_LOG_CONDITION
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::BadParameter(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn with_trials(&self, trials: usize) -> TrialPlan {
        TrialPlan {
            trials,
            ..self.clone()
        }
    }
}

/// A random weighted family plus a seed for any auxiliary randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub weights: WeightVector,
    pub matrices: Vec<SpdMatrix>,
    pub aux_seed: u64,
}

/// Instance number `trial` of `plan`.
pub fn draw_instance(plan: &TrialPlan, trial: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(trial as u64);
    let dim = plan.dims[rng.random_range(0..plan.dims.len())];
    let n = plan.n_operators[rng.random_range(0..plan.n_operators.len())];
    let weights = if n == 1 {
        vec![1.0]
    } else {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|w| w / sum).collect()
    };
    let matrices = (0..n)
        .map(|_| random_spd(dim, plan.log_condition, rng.next_u64()))
        .collect();
    Instance {
        weights: WeightVector::new(weights).expect("normalized weights are valid"),
        matrices,
        aux_seed: rng.next_u64(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Statement guaranteed by a theorem; violations are failures.
    Assertion,
    /// Exploratory search; violations are findings.
    Report,
}

/// Serialized failing instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub spec: CheckSpec,
    pub seed: u64,
    pub trial: usize,
    pub aux_seed: u64,
    pub weights: WeightVector,
    pub matrices: Vec<SpdMatrix>,
    /// Margin of this instance, absent when evaluation failed.
    pub margin: Option<f64>,
    pub error: Option<String>,
}

impl Witness {
    pub fn instance(&self) -> Instance {
        Instance {
            weights: self.weights.clone(),
            matrices: self.matrices.clone(),
            aux_seed: self.aux_seed,
        }
    }
}

/// Re-evaluate the margin of a witness.
pub fn replay_witness(w: &Witness) -> Result<Option<f64>> {
    w.spec.evaluate(&w.instance())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub generator: String,
    pub kind: CheckKind,
    pub trials: usize,
    pub violations: usize,
    /// Trials whose instance did not meet the hypothesis.
    pub skipped: usize,
    /// Most negative margin observed.
    pub worst_margin: Option<f64>,
    /// Violation threshold: a margin below `-threshold` is a violation.
    pub threshold: f64,
    pub witness: Option<Witness>,
    pub stats: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl CheckOutcome {
    /// Outcome of a check that could not run.
    pub fn not_run(name: &str, generator: &Generator, kind: CheckKind, err: &Error) -> Self {
        CheckOutcome {
            name: name.to_string(),
            generator: generator.to_string(),
            kind,
            trials: 0,
            violations: 0,
            skipped: 0,
            worst_margin: None,
            threshold: 0.0,
            witness: None,
            stats: BTreeMap::new(),
            note: Some(err.to_string()),
        }
    }

    /// True for assertion checks with violations, counting scalar-grid
    /// violations recorded in `stats`.
    pub fn failed(&self) -> bool {
        let scalar = self.stats.get("scalar_violations").is_some_and(|&v| v > 0.0);
        self.kind == CheckKind::Assertion && (self.violations > 0 || scalar)
    }
}

struct TrialResult {
    trial: usize,
    margin: Result<Option<f64>>,
}

/// Run `spec` on every instance of `plan`.
pub fn run_check(spec: &CheckSpec, kind: CheckKind, plan: &TrialPlan) -> Result<CheckOutcome> {
    plan.validate()?;
    let threshold = spec.threshold(plan.tolerance);
    let results: Vec<TrialResult> = (0..plan.trials)
        .into_par_iter()
        .map(|trial| TrialResult {
            trial,
            margin: spec.evaluate(&draw_instance(plan, trial)),
        })
        .collect();

    let mut violations = 0;
    let mut skipped = 0;
    let mut worst: Option<f64> = None;
    let mut culprit: Option<(usize, f64)> = None;
    for r in &results {
        let m = match &r.margin {
            Ok(None) => {
                skipped += 1;
                continue;
            }
            Ok(Some(m)) => {
                worst = Some(worst.map_or(*m, |w| w.min(*m)));
                *m
            }
            Err(_) => f64::NEG_INFINITY,
        };
        if m < -threshold {
            violations += 1;
            if culprit.is_none_or(|(_, c)| m < c) {
                culprit = Some((r.trial, m));
            }
        }
    }

    let witness = culprit.map(|(trial, _)| {
        let inst = draw_instance(plan, trial);
        let (margin, error) = match &results[trial].margin {
            Ok(m) => (*m, None),
            Err(e) => (None, Some(format!("{}: {e}", e.name()))),
        };
        Witness {
            spec: spec.clone(),
            seed: plan.seed,
            trial,
            aux_seed: inst.aux_seed,
            weights: inst.weights,
            matrices: inst.matrices,
            margin,
            error,
        }
    });

    Ok(CheckOutcome {
        name: spec.name().to_string(),
        generator: spec.generator().to_string(),
        kind,
        trials: plan.trials,
        violations,
        skipped,
        worst_margin: worst,
        threshold,
        witness,
        stats: BTreeMap::new(),
        note: None,
    })
}

/// `Σ wᵢ g(Aᵢ) ≥ 0 ⟹ σ_g ≥ I` and `Σ wᵢ g(Aᵢ) ≤ 0 ⟹ σ_g ≤ I`.
///
/// Besides the raw draw (usually indefinite, then skipped), every trial
/// rescales the family so that `Σ wᵢ g(c·Aᵢ)` is semidefinite with an
/// eigenvalue at zero, which makes the conclusion tight.
pub fn check_sign_lemma(g: &Generator, plan: &TrialPlan) -> Result<CheckOutcome> {
    run_check(&CheckSpec::SignLemma { g: g.clone() }, CheckKind::Assertion, plan)
}

/// Harmonic mean `≤ σ_g ≤` arithmetic mean.
pub fn check_bounds(g: &Generator, plan: &TrialPlan) -> Result<CheckOutcome> {
    run_check(&CheckSpec::Bounds { g: g.clone() }, CheckKind::Assertion, plan)
}

/// `g ≤ f` pointwise ⟹ `σ_g ≤ σ_f`. Fails with `PrecheckFailed` when the
/// scalar grid refutes `g ≤ f`.
pub fn check_pointwise_order(g: &Generator, f: &Generator, plan: &TrialPlan) -> Result<CheckOutcome> {
    let bad = pointwise_violations(g, f);
    if let Some(x) = bad.first() {
        return Err(Error::PrecheckFailed(format!(
            "{g} > {f} at x = {x:e} ({} grid points)",
            bad.len()
        )));
    }
    run_check(
        &CheckSpec::PointwiseOrder {
            g: g.clone(),
            f: f.clone(),
        },
        CheckKind::Assertion,
        plan,
    )
}

fn validate_p_list(p_list: &[f64]) -> Result<()> {
    if p_list.is_empty() || p_list.iter().any(|&p| !(p >= 1.0) || !p.is_finite()) {
        return Err(Error::BadParameter(format!(
            "exponents {p_list:?} must be non-empty and >= 1"
        )));
    }
    Ok(())
}

/// `σ_g(𝔸) ≤ I ⟹ σ_{g_p}(𝔸^p) ≤ I` and the reverse, on families normalized
/// so that `σ_g = I` and on strict variants with `σ_g < I` and `σ_g > I`.
pub fn check_ando_hiai_1(g: &Generator, plan: &TrialPlan, p_list: &[f64]) -> Result<CheckOutcome> {
    validate_p_list(p_list)?;
    run_check(
        &CheckSpec::AndoHiai1 {
            g: g.clone(),
            p: p_list.to_vec(),
        },
        CheckKind::Assertion,
        plan,
    )
}

/// Same-generator implication for powered families. The direction comes from
/// comparing `g_p` with `g` on a scalar grid; `Inconclusive` when the
/// deformations cross `g`. Stats carry the scalar representing-function
/// condition on a `(λ, x)` grid.
pub fn check_ando_hiai_2(g: &Generator, plan: &TrialPlan, p_list: &[f64]) -> Result<CheckOutcome> {
    validate_p_list(p_list)?;
    let direction = classify_deformation(g, p_list)?;
    let (points, bad) = scalar_condition(g, p_list, direction)?;
    let mut outcome = run_check(
        &CheckSpec::AndoHiai2 {
            g: g.clone(),
            p: p_list.to_vec(),
            direction,
        },
        CheckKind::Assertion,
        plan,
    )?;
    outcome.stats.insert("scalar_points".into(), points as f64);
    outcome.stats.insert("scalar_violations".into(), bad as f64);
    outcome.note = Some(format!("direction: {direction:?}"));
    Ok(outcome)
}

/// Ratio `‖σ_g‖₂ / ‖g⁻¹(Σ wᵢ g(Aᵢ))‖₂` over random families. Report only.
pub fn conjecture_search(g: &Generator, plan: &TrialPlan) -> Result<CheckOutcome> {
    let spec = CheckSpec::Conjecture { g: g.clone() };
    let mut outcome = run_check(&spec, CheckKind::Report, plan)?;
    let ratios: Vec<(f64, f64)> = (0..plan.trials)
        .into_par_iter()
        .filter_map(|t| norm_ratios(g, &draw_instance(plan, t)).ok())
        .collect();
    if !ratios.is_empty() {
        let n = ratios.len() as f64;
        let ops = ratios.iter().map(|r| r.0);
        let fro = ratios.iter().map(|r| r.1);
        outcome.stats.insert("max_ratio".into(), ops.clone().fold(f64::MIN, f64::max));
        outcome.stats.insert("min_ratio".into(), ops.clone().fold(f64::MAX, f64::min));
        outcome.stats.insert("mean_ratio".into(), ops.sum::<f64>() / n);
        outcome.stats.insert("max_frobenius_ratio".into(), fro.fold(f64::MIN, f64::max));
    }
    Ok(outcome)
}

/// Full report of [`run_property_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub plan: TrialPlan,
    pub outcomes: Vec<CheckOutcome>,
    pub passed: bool,
}

fn record(outcomes: &mut Vec<CheckOutcome>, name: &str, g: &Generator, kind: CheckKind, r: Result<CheckOutcome>) {
    outcomes.push(r.unwrap_or_else(|e| CheckOutcome::not_run(name, g, kind, &e)));
}

/// Every check over the generator catalogue, plus solver invariants.
pub fn run_property_suite(plan: &TrialPlan) -> Result<SuiteReport> {
    plan.validate()?;
    let mut outcomes = Vec::new();
    for g in Generator::catalogue() {
        use CheckKind::*;
        record(&mut outcomes, "sign_lemma", &g, Assertion, check_sign_lemma(&g, plan));
        record(&mut outcomes, "bounds", &g, Assertion, check_bounds(&g, plan));
        record(&mut outcomes, "ando_hiai_1", &g, Assertion, check_ando_hiai_1(&g, plan, &DEFAULT_P_LIST));
        record(&mut outcomes, "ando_hiai_2", &g, Assertion, check_ando_hiai_2(&g, plan, &DEFAULT_P_LIST));
        record(&mut outcomes, "conjecture", &g, Report, conjecture_search(&g, plan));
        for spec in [
            CheckSpec::Congruence { g: g.clone() },
            CheckSpec::Monotonicity { g: g.clone() },
            CheckSpec::Permutation { g: g.clone() },
            CheckSpec::InitIndependence { g: g.clone() },
        ] {
            record(&mut outcomes, spec.name(), &g, Assertion, run_check(&spec, Assertion, plan));
        }
    }
    let chain = [
        Generator::power(-1.0)?,
        Generator::power(-0.5)?,
        Generator::log(),
        Generator::power(0.5)?,
        Generator::power(1.0)?,
    ];
    for pair in chain.windows(2) {
        record(
            &mut outcomes,
            "pointwise_order",
            &pair[0],
            CheckKind::Assertion,
            check_pointwise_order(&pair[0], &pair[1], plan),
        );
    }
    let passed = !outcomes.iter().any(CheckOutcome::failed);
    Ok(SuiteReport {
        plan: plan.clone(),
        outcomes,
        passed,
    })
}
