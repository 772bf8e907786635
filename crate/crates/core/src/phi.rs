//! Generalized weak Φ-functions `φ(x,t)` and their growth diagnostics.
//!
//! A Φ-function here is an evaluator `(x, t) ↦ [0, +∞]` together with
//! growth metadata: the aInc exponent `p` and constant `L` when known in
//! closed form. `+∞` is an ordinary value (the indicator families return
//! it), never an error.
//!
//! "Increasing" is read as nondecreasing throughout, so the indicator
//! family `t ↦ ∞·χ_{(1,∞)}(t)` qualifies.

use std::sync::Arc;

use crate::domain::GridDomain;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    /// `t^p`
    Power,
    /// `(1/n) t^n`
    ScaledPower,
    /// `t^{p(x)}`
    VariableExponent,
    /// `t^p + a(x) t^q`
    DoublePhase,
    /// `∞·χ_{(1,∞)}(t)`; the Luxemburg norm becomes the sup norm
    Infinity,
    /// `∞·χ_{(1/a,∞)}(t)`
    ScaledInfinity,
    /// `max{0, 2t−1} + ∞·χ_{(1,∞)}(t)`
    LinearPlusInfinity,
    /// `(a t)^n`
    ScaledBase,
    /// pointwise division by `φ(x,1)`
    Normalized,
    Custom,
}

type PhiEval = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// Evaluator for `φ(x,t)` with declared growth metadata.
#[derive(Clone)]
pub struct PhiFunction {
    tag: FamilyTag,
    eval: Arc<PhiEval>,
    /// aInc exponent, when analytically known.
    pub declared_p: Option<f64>,
    /// aInc constant for `declared_p`, when analytically known.
    pub declared_l: Option<f64>,
}

fn indicator_above(threshold: f64, t: f64) -> f64 {
    if t > threshold { f64::INFINITY } else { 0.0 }
}

impl PhiFunction {
    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn evaluate(&self, x: &[f64], t: f64) -> f64 {
        (self.eval)(x, t)
    }

    /// `t^p`, `p ≥ 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("power exponent p = {p}, need p >= 1")));
        }
        Ok(Self {
            tag: FamilyTag::Power,
            eval: Arc::new(move |_, t| t.powf(p)),
            declared_p: Some(p),
            declared_l: Some(1.0),
        })
    }

    /// `(1/n) t^n`, `n ≥ 1`.
    pub fn scaled_power(n: f64) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("scaled power n = {n}, need n >= 1")));
        }
        Ok(Self {
            tag: FamilyTag::ScaledPower,
            eval: Arc::new(move |_, t| t.powf(n) / n),
            declared_p: Some(n),
            declared_l: Some(1.0),
        })
    }

    /// `t^{p(x)}` with a spatial exponent field, `p(x) ≥ 1` expected on the grid.
    pub fn variable_exponent(
        p_of_x: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            tag: FamilyTag::VariableExponent,
            eval: Arc::new(move |x, t| t.powf(p_of_x(x))),
            declared_p: None,
            declared_l: None,
        }
    }

    /// `t^p + a(x) t^q` with `1 ≤ p ≤ q` and coefficient `a(x) ≥ 0`.
    /// Satisfies aInc(p) with constant 1.
    pub fn double_phase(
        p: f64,
        q: f64,
        a_of_x: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(p >= 1.0) || !(q >= p) {
            return Err(Error::InvalidParameter(format!(
                "double phase needs 1 <= p <= q, got p = {p}, q = {q}"
            )));
        }
        Ok(Self {
            tag: FamilyTag::DoublePhase,
            eval: Arc::new(move |x, t| t.powf(p) + a_of_x(x) * t.powf(q)),
            declared_p: Some(p),
            declared_l: Some(1.0),
        })
    }

    /// `φ_∞(x,t) = ∞·χ_{(1,∞)}(t)`.
    pub fn infinity() -> Self {
        Self {
            tag: FamilyTag::Infinity,
            eval: Arc::new(|_, t| indicator_above(1.0, t)),
            declared_p: None,
            declared_l: Some(1.0),
        }
    }

    /// `φ_{a,∞}(x,t) = ∞·χ_{(1/a,∞)}(t)`, `a > 0`.
    pub fn scaled_infinity(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("scaled infinity a = {a}, need a > 0")));
        }
        Ok(Self {
            tag: FamilyTag::ScaledInfinity,
            eval: Arc::new(move |_, t| indicator_above(1.0 / a, t)),
            declared_p: None,
            declared_l: Some(1.0),
        })
    }

    /// `max{0, 2t−1} + ∞·χ_{(1,∞)}(t)`. Satisfies aInc(1) with constant 1;
    /// for larger exponents p the constant grows, bounded by `2^{p−1}`.
    pub fn linear_plus_infinity() -> Self {
        Self {
            tag: FamilyTag::LinearPlusInfinity,
            eval: Arc::new(|_, t| (2.0 * t - 1.0).max(0.0) + indicator_above(1.0, t)),
            declared_p: Some(1.0),
            declared_l: Some(1.0),
        }
    }

    /// `(a t)^n`, `a > 0`, `n ≥ 1`.
    pub fn scaled_base(a: f64, n: f64) -> Result<Self> {
        if !(a > 0.0) || !(n >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "scaled base needs a > 0 and n >= 1, got a = {a}, n = {n}"
            )));
        }
        Ok(Self {
            tag: FamilyTag::ScaledBase,
            eval: Arc::new(move |_, t| (a * t).powf(n)),
            declared_p: Some(n),
            declared_l: Some(1.0),
        })
    }

    pub fn custom(eval: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { tag: FamilyTag::Custom, eval: Arc::new(eval), declared_p: None, declared_l: None }
    }

    pub fn custom_with_growth(
        eval: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        p: f64,
        l: f64,
    ) -> Self {
        Self {
            tag: FamilyTag::Custom,
            eval: Arc::new(eval),
            declared_p: Some(p),
            declared_l: Some(l),
        }
    }
}

/// Min and max of `φ(x,1)` over masked cell centers: `(φ⁻(1), φ⁺(1))`.
pub fn anchor_bounds(phi: &PhiFunction, domain: &GridDomain) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for x in domain.centers() {
        let v = phi.evaluate(x, 1.0);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// (A0) anchor: `φ(x,β) ≤ 1 ≤ φ(x,1/β)` at every cell center.
pub fn check_a0(phi: &PhiFunction, beta: f64, domain: &GridDomain) -> Result<bool> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta}, need beta in (0,1]")));
    }
    Ok(domain
        .centers()
        .all(|x| phi.evaluate(x, beta) <= 1.0 && 1.0 <= phi.evaluate(x, 1.0 / beta)))
}

/// One sampled violation of a declared growth bound.
#[derive(Clone, Debug)]
pub struct AincViolation {
    pub x: Vec<f64>,
    pub t: f64,
    pub lambda: f64,
    pub ratio: f64,
}

/// Result of sampling the aInc(p) inequality `φ(x,λt) ≤ L λ^p φ(x,t)`.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub p: f64,
    /// Supremum of `φ(x,λt) / (λ^p φ(x,t))` over admissible samples; `+∞`
    /// when an infinite numerator meets a finite positive denominator.
    pub estimated_l: f64,
    pub x_samples: usize,
    pub t_samples: usize,
    pub lambda_samples: usize,
    /// Samples where the declared `L` bound failed (empty when no bound declared).
    pub violations: Vec<AincViolation>,
}

/// 64 log-spaced points in `[1e-4, 1e4]`.
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(1e-4, 1e4, 64)
}

/// 64 log-spaced points in `[1e-3, 1]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_spaced(1e-3, 1.0, 64)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn lin_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Estimates the smallest constant L for which aInc(p) holds on the sample.
///
/// Skip rules: a zero denominator with zero numerator is vacuous, an
/// infinite denominator with infinite numerator is automatically satisfied;
/// both are skipped. An infinite numerator over a finite positive
/// denominator forces `estimated_l = +∞`.
pub fn estimate_ainc_constant(
    phi: &PhiFunction,
    p: f64,
    domain: &GridDomain,
    t_grid: &[f64],
    lambda_grid: &[f64],
) -> Result<GrowthReport> {
    estimate_ainc_on_points(phi, p, domain.centers(), t_grid, lambda_grid)
}

/// As [`estimate_ainc_constant`], over an explicit set of spatial points.
pub fn estimate_ainc_on_points<'a>(
    phi: &PhiFunction,
    p: f64,
    points: impl Iterator<Item = &'a [f64]>,
    t_grid: &[f64],
    lambda_grid: &[f64],
) -> Result<GrowthReport> {
    if t_grid.is_empty() || lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("t and lambda grids must be nonempty".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("t grid must be positive".into()));
    }
    let declared = phi.declared_l.filter(|_| phi.declared_p.map_or(false, |dp| dp >= p));
    let mut sup = 0.0f64;
    let mut admissible = 0usize;
    let mut violations = Vec::new();
    let mut x_count = 0usize;
    for x in points {
        x_count += 1;
        for &t in t_grid {
            let den = phi.evaluate(x, t);
            for &lam in lambda_grid {
                if !(lam > 0.0 && lam <= 1.0) {
                    continue;
                }
                let num = phi.evaluate(x, lam * t);
                // subnormal evaluations have lost most of their mantissa
                // and would poison the log-space ratio below
                if (num > 0.0 && num < f64::MIN_POSITIVE) || (den > 0.0 && den < f64::MIN_POSITIVE)
                {
                    continue;
                }
                let ratio = if den == 0.0 || den.is_infinite() {
                    if num == den {
                        continue; // vacuous or automatically satisfied
                    }
                    if den.is_infinite() {
                        continue; // finite numerator, infinite bound: holds
                    }
                    f64::INFINITY // positive numerator over zero denominator
                } else if num.is_infinite() {
                    f64::INFINITY
                } else if num == 0.0 {
                    0.0
                } else {
                    // log space: λ^p underflows for large p long before the
                    // ratio itself leaves the representable range
                    (num.ln() - den.ln() - p * lam.ln()).exp()
                };
                admissible += 1;
                sup = sup.max(ratio);
                if let Some(l) = declared {
                    if ratio > l * (1.0 + 1e-12) {
                        violations.push(AincViolation { x: x.to_vec(), t, lambda: lam, ratio });
                    }
                }
            }
        }
    }
    if admissible == 0 {
        return Err(Error::NoAdmissibleSamples);
    }
    Ok(GrowthReport {
        p,
        estimated_l: sup,
        x_samples: x_count,
        t_samples: t_grid.len(),
        lambda_samples: lambda_grid.len(),
        violations,
    })
}

/// Per-axiom result of sampling the generalized weak Φ-function definition.
#[derive(Clone, Debug)]
pub struct PhiAxiomReport {
    pub zero_at_zero: bool,
    pub small_t_limit: bool,
    pub large_t_divergence: bool,
    pub monotone: bool,
    pub ainc_one: bool,
    /// aInc(1) constant observed on the sample (finite when `ainc_one`).
    pub ainc_one_constant: f64,
}

impl PhiAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.zero_at_zero
            && self.small_t_limit
            && self.large_t_divergence
            && self.monotone
            && self.ainc_one
    }
}

/// Samples the weak Φ-function axioms on `t_grid` (increasing, spanning 1).
pub fn check_weak_phi_axioms(
    phi: &PhiFunction,
    domain: &GridDomain,
    t_grid: &[f64],
) -> Result<PhiAxiomReport> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("t grid must be strictly increasing".into()));
    }
    if !(t_grid[0] < 1.0 && *t_grid.last().unwrap() > 1.0) {
        return Err(Error::InvalidParameter("t grid must span t = 1".into()));
    }
    let mut zero_at_zero = true;
    let mut small_t_limit = true;
    let mut large_t_divergence = true;
    let mut monotone = true;
    // the small-t tolerance: phi at the smallest grid point must be tiny or 0
    let small_tol = 1e-2;
    for x in domain.centers() {
        if phi.evaluate(x, 0.0) != 0.0 {
            zero_at_zero = false;
        }
        if phi.evaluate(x, t_grid[0]) > small_tol {
            small_t_limit = false;
        }
        if phi.evaluate(x, *t_grid.last().unwrap()) < 1e2 {
            large_t_divergence = false;
        }
        let mut prev = phi.evaluate(x, 0.0);
        for &t in t_grid {
            let v = phi.evaluate(x, t);
            if v < prev {
                monotone = false;
            }
            prev = v;
        }
    }
    let lambda = default_lambda_grid();
    // an all-vacuous sample set (pure indicator families) passes aInc(1)
    let (ainc_one, ainc_one_constant) =
        match estimate_ainc_constant(phi, 1.0, domain, t_grid, &lambda) {
            Ok(growth) => (growth.estimated_l.is_finite(), growth.estimated_l),
            Err(Error::NoAdmissibleSamples) => (true, 1.0),
            Err(e) => return Err(e),
        };
    Ok(PhiAxiomReport {
        zero_at_zero,
        small_t_limit,
        large_t_divergence,
        monotone,
        ainc_one,
        ainc_one_constant,
    })
}

/// Pointwise normalization `φ̂(x,t) = φ(x,t) / φ(x,1)`, so `φ̂(x,1) = 1`.
/// Fails when `φ(x,1)` is 0 or `+∞` anywhere on the grid.
pub fn normalize(phi: &PhiFunction, domain: &GridDomain) -> Result<PhiFunction> {
    for x in domain.centers() {
        let v = phi.evaluate(x, 1.0);
        if v == 0.0 || v.is_infinite() {
            return Err(Error::NormalizationAnchor { value: v });
        }
    }
    let inner = phi.clone();
    Ok(PhiFunction {
        tag: FamilyTag::Normalized,
        eval: Arc::new(move |x, t| {
            if t == 1.0 {
                return 1.0; // exact at the anchor
            }
            inner.evaluate(x, t) / inner.evaluate(x, 1.0)
        }),
        declared_p: phi.declared_p,
        declared_l: phi.declared_l,
    })
}

/// Sampled check of the power-function lower bound
/// `φ(x,t) ≥ t^p/(Lc) − 1/c` implied by aInc(p) and the anchor hypothesis.
pub fn lower_bound_check(
    phi: &PhiFunction,
    p: f64,
    l: f64,
    c: f64,
    domain: &GridDomain,
    t_grid: &[f64],
) -> bool {
    let slack = 1e-12;
    domain.centers().all(|x| {
        t_grid.iter().all(|&t| {
            let lower = t.powf(p) / (l * c) - 1.0 / c;
            phi.evaluate(x, t) >= lower - slack
        })
    })
}
