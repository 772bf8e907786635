//! Modulars, Luxemburg quasinorms and the unit-ball / embedding machinery.
//!
//! The Luxemburg quasinorm `inf{λ > 0 : ρ_φ(f/λ) ≤ 1}` is computed by
//! bracketing plus bisection on `λ ↦ ρ_φ(f/λ)`, which is nonincreasing
//! because `φ` is nondecreasing in `t`. The bracket starts at
//! `[sup|f|/4, 4 sup|f|]` and is expanded by doubling/halving up to 60
//! times before declaring `+∞` or 0.
//!
//! The bisection returns the bracket midpoint for the infimum: nothing is
//! asserted about `ρ_φ(f/‖f‖)` itself, since the modular need not be lower
//! semicontinuous in `λ`.

use crate::domain::{self, FieldExpr, GridDomain, SampledField};
use crate::phi::{self, PhiFunction};
use crate::{Error, Result};

/// Outcome of a Luxemburg-norm bisection.
#[derive(Clone, Debug)]
pub struct NormResult {
    pub value: f64,
    pub iterations: u32,
    pub bracket: (f64, f64),
    pub tolerance_met: bool,
}

const BRACKET_EXPANSIONS: u32 = 60;
const MAX_ITERATIONS: u32 = 200;

/// `ρ_φ(f) = ∫_Ω φ(x, |f(x)|) dx` by the midpoint rule.
/// Vector fields enter through the per-cell Euclidean magnitude.
pub fn modular(phi: &PhiFunction, field: &SampledField, domain: &GridDomain) -> f64 {
    let mut sum = 0.0;
    for (cell, x) in domain.centers().enumerate() {
        let v = phi.evaluate(x, field.magnitude(cell));
        if v.is_infinite() {
            return f64::INFINITY;
        }
        sum += v;
    }
    sum * domain.cell_measure()
}

/// Bisection on a nonincreasing `rho(λ)` for `inf{λ : rho(λ) ≤ 1}`,
/// starting from the scale `sup` of the data.
fn luxemburg_bisect(rho: impl Fn(f64) -> f64, sup: f64, rel_tol: f64) -> Result<NormResult> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol = {rel_tol}, need rel_tol in (0, 1e-2]"
        )));
    }
    if sup == 0.0 {
        return Ok(NormResult { value: 0.0, iterations: 0, bracket: (0.0, 0.0), tolerance_met: true });
    }
    if sup.is_infinite() {
        return Ok(NormResult {
            value: f64::INFINITY,
            iterations: 0,
            bracket: (f64::INFINITY, f64::INFINITY),
            tolerance_met: false,
        });
    }
    let mut lo = sup / 4.0;
    let mut hi = sup * 4.0;
    let mut expansions = 0;
    while rho(hi) > 1.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > BRACKET_EXPANSIONS {
            // bracket cap exceeded: no finite λ found with modular ≤ 1
            return Ok(NormResult {
                value: f64::INFINITY,
                iterations: 0,
                bracket: (lo, hi),
                tolerance_met: false,
            });
        }
    }
    expansions = 0;
    while rho(lo) <= 1.0 {
        lo /= 2.0;
        expansions += 1;
        if expansions > BRACKET_EXPANSIONS {
            // modular stays ≤ 1 down to a vanishing scale: the infimum is 0
            return Ok(NormResult {
                value: 0.0,
                iterations: 0,
                bracket: (0.0, lo),
                tolerance_met: false,
            });
        }
    }
    // invariant: rho(lo) > 1 >= rho(hi)
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if rho(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(NormResult {
        value: 0.5 * (lo + hi),
        iterations,
        bracket: (lo, hi),
        tolerance_met: hi - lo <= rel_tol * hi,
    })
}

/// Luxemburg quasinorm `inf{λ > 0 : ρ_φ(f/λ) ≤ 1}` to relative tolerance.
pub fn luxemburg_norm(
    phi: &PhiFunction,
    field: &SampledField,
    domain: &GridDomain,
    rel_tol: f64,
) -> Result<NormResult> {
    let sup = domain::sup_magnitude(field);
    let rho = |lambda: f64| {
        let mut sum = 0.0;
        for (cell, x) in domain.centers().enumerate() {
            let v = phi.evaluate(x, field.magnitude(cell) / lambda);
            if v.is_infinite() {
                return f64::INFINITY;
            }
            sum += v;
        }
        sum * domain.cell_measure()
    };
    luxemburg_bisect(rho, sup, rel_tol)
}

/// `‖f‖_{L^p} = (∫ |f|^p)^{1/p}`, or the grid sup for `p = ∞`.
pub fn lp_norm(field: &SampledField, p: f64, domain: &GridDomain) -> f64 {
    if p.is_infinite() {
        return domain::sup_magnitude(field);
    }
    let mut sum = 0.0;
    for cell in 0..field.cells() {
        let m = field.magnitude(cell);
        if m.is_infinite() {
            return f64::INFINITY;
        }
        sum += m.powf(p);
    }
    (sum * domain.cell_measure()).powf(1.0 / p)
}

/// `ρ_{1,φ}(u) = ρ_φ(|u|) + Σ_i ρ_φ(|∂u/∂x_i|)`.
pub fn sobolev_modular(phi: &PhiFunction, u: &FieldExpr, domain: &GridDomain) -> Result<f64> {
    let (uf, grad) = sample_with_gradient(u, domain)?;
    Ok(sobolev_modular_sampled(phi, &uf, &grad, u.components(), domain, 1.0))
}

/// Orlicz-Sobolev quasinorm by bisection on `λ ↦ ρ_{1,φ}(u/λ)`.
pub fn sobolev_norm(
    phi: &PhiFunction,
    u: &FieldExpr,
    domain: &GridDomain,
    rel_tol: f64,
) -> Result<NormResult> {
    let (uf, grad) = sample_with_gradient(u, domain)?;
    let d = u.components();
    let sup = domain::sup_magnitude(&uf).max(domain::sup_magnitude(&grad));
    luxemburg_bisect(
        |lambda| sobolev_modular_sampled(phi, &uf, &grad, d, domain, lambda),
        sup,
        rel_tol,
    )
}

fn sample_with_gradient(
    u: &FieldExpr,
    domain: &GridDomain,
) -> Result<(SampledField, SampledField)> {
    let uf = domain::sample(u, domain)?;
    let grad = domain::gradient(u, domain)?;
    Ok((uf, grad))
}

/// `ρ_φ(u/λ) + Σ_i ρ_φ(|∂u/∂x_i|/λ)` from pre-sampled values.
/// The gradient field is axis-major with `d` components per axis.
fn sobolev_modular_sampled(
    phi: &PhiFunction,
    u: &SampledField,
    grad: &SampledField,
    d: usize,
    domain: &GridDomain,
    lambda: f64,
) -> f64 {
    let n = domain.dim();
    let mut sum = 0.0;
    for (cell, x) in domain.centers().enumerate() {
        let vu = phi.evaluate(x, u.magnitude(cell) / lambda);
        if vu.is_infinite() {
            return f64::INFINITY;
        }
        sum += vu;
        for axis in 0..n {
            let mut sq = 0.0;
            for c in 0..d {
                let g = grad.component(cell, axis * d + c);
                sq += g * g;
            }
            let vg = phi.evaluate(x, sq.sqrt() / lambda);
            if vg.is_infinite() {
                return f64::INFINITY;
            }
            sum += vg;
        }
    }
    sum * domain.cell_measure()
}

/// Result of checking the unit-ball implication chain
/// `‖f‖_φ < 1 ⇒ ρ_φ(f) ≤ 1 ⇒ ‖f‖_φ ≤ 1`.
#[derive(Clone, Debug)]
pub struct UnitBallReport {
    pub norm: f64,
    pub modular: f64,
    pub norm_below_one_implies_modular: bool,
    pub modular_implies_norm_below_one: bool,
}

impl UnitBallReport {
    pub fn pass(&self) -> bool {
        self.norm_below_one_implies_modular && self.modular_implies_norm_below_one
    }
}

pub fn unit_ball_check(
    phi: &PhiFunction,
    field: &SampledField,
    domain: &GridDomain,
    rel_tol: f64,
) -> Result<UnitBallReport> {
    let norm = luxemburg_norm(phi, field, domain, rel_tol)?.value;
    let rho = modular(phi, field, domain);
    let first = if norm < 1.0 - rel_tol { rho <= 1.0 + rel_tol } else { true };
    let second = if rho <= 1.0 { norm <= 1.0 + rel_tol } else { true };
    Ok(UnitBallReport {
        norm,
        modular: rho,
        norm_below_one_implies_modular: first,
        modular_implies_norm_below_one: second,
    })
}

/// `(2L(|Ω| + c))^{1/p}`, the embedding constant for `L^φ ↪ L^p`.
pub fn embedding_constant(l: f64, c: f64, omega_measure: f64, p: f64) -> f64 {
    (2.0 * l * (omega_measure + c)).powf(1.0 / p)
}

#[derive(Clone, Debug)]
pub struct EmbeddingFieldResult {
    pub lp: f64,
    pub luxemburg: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub constant: f64,
    pub fields: Vec<EmbeddingFieldResult>,
}

impl EmbeddingReport {
    pub fn pass(&self) -> bool {
        self.fields.iter().all(|r| r.holds)
    }
}

/// Verifies `‖f‖_{L^p} ≤ (2L(|Ω|+c))^{1/p} ‖f‖_φ` for each field, after
/// re-checking the hypotheses `1/c ≤ φ(x,1) ≤ c` and aInc(p) with
/// constant L on the grid. A hypothesis failure is an error, distinct
/// from an inequality failure in the report.
pub fn embedding_check(
    phi: &PhiFunction,
    p: f64,
    l: f64,
    c: f64,
    fields: &[SampledField],
    domain: &GridDomain,
    rel_tol: f64,
) -> Result<EmbeddingReport> {
    let (a_lo, a_hi) = phi::anchor_bounds(phi, domain);
    if a_lo < 1.0 / c - 1e-12 || a_hi > c + 1e-12 {
        return Err(Error::Hypothesis(format!(
            "anchor bounds ({a_lo}, {a_hi}) violate 1/c <= phi(x,1) <= c with c = {c}"
        )));
    }
    let growth = phi::estimate_ainc_constant(
        phi,
        p,
        domain,
        &phi::default_t_grid(),
        &phi::default_lambda_grid(),
    );
    match growth {
        Ok(g) if g.estimated_l <= l * (1.0 + 1e-9) => {}
        Ok(g) => {
            return Err(Error::Hypothesis(format!(
                "estimated aInc({p}) constant {} exceeds declared L = {l}",
                g.estimated_l
            )))
        }
        Err(Error::NoAdmissibleSamples) => {} // vacuous
        Err(e) => return Err(e),
    }
    let constant = embedding_constant(l, c, domain.measure(), p);
    let mut results = Vec::with_capacity(fields.len());
    for field in fields {
        let lp = lp_norm(field, p, domain);
        let lux = luxemburg_norm(phi, field, domain, rel_tol)?.value;
        let holds = lp <= constant * lux * (1.0 + rel_tol) || (lp == 0.0 && lux == 0.0);
        results.push(EmbeddingFieldResult { lp, luxemburg: lux, holds });
    }
    Ok(EmbeddingReport { constant, fields: results })
}

#[derive(Clone, Debug)]
pub struct ModularBoundReport {
    pub bound: f64,
    pub norm: f64,
    pub holds: bool,
}

/// The norm-from-modular bound `‖f‖_φ ≤ max{(L ρ_φ(f))^{1/p}, 1}` under
/// aInc(p) with constant L.
pub fn norm_from_modular_bound(
    phi: &PhiFunction,
    field: &SampledField,
    p: f64,
    l: f64,
    domain: &GridDomain,
) -> Result<ModularBoundReport> {
    let rho = modular(phi, field, domain);
    let bound = (l * rho).powf(1.0 / p).max(1.0);
    let tol = 1e-6;
    let norm = luxemburg_norm(phi, field, domain, tol)?.value;
    Ok(ModularBoundReport { bound, norm, holds: norm <= bound * (1.0 + 10.0 * tol) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{sample, FieldExpr, GridDomain};

    fn interval(res: usize) -> GridDomain {
        GridDomain::build(&[(0.0, 1.0)], &[res], |_| true).unwrap()
    }

    fn linear_field(d: &GridDomain) -> SampledField {
        sample(&FieldExpr::scalar(|x| x[0]), d).unwrap()
    }

    fn const_field(d: &GridDomain, c: f64) -> SampledField {
        sample(&FieldExpr::scalar(move |_| c), d).unwrap()
    }

    #[test]
    fn modular_infinity_cases() {
        let d = interval(100);
        let phi = PhiFunction::infinity();
        assert_eq!(modular(&phi, &const_field(&d, 0.9), &d), 0.0);
        assert_eq!(modular(&phi, &const_field(&d, 2.0), &d), f64::INFINITY);
    }

    #[test]
    fn modular_power_of_linear() {
        let d = interval(10_000);
        for n in [1.0, 3.0, 10.0] {
            let phi = PhiFunction::power(n).unwrap();
            let rho = modular(&phi, &linear_field(&d), &d);
            assert!((rho - 1.0 / (n + 1.0)).abs() < 1e-4, "n = {n}: {rho}");
        }
    }

    #[test]
    fn modular_spatial_family() {
        // φ(x,t) = t² + x t⁴, f ≡ 1 → ∫ (1 + x) dx = 1.5
        let d = interval(10_000);
        let phi = PhiFunction::double_phase(2.0, 4.0, |x| x[0]).unwrap();
        assert!((modular(&phi, &const_field(&d, 1.0), &d) - 1.5).abs() < 1e-6);
    }

    #[test]
    fn luxemburg_power_constant_field() {
        let d = interval(1000);
        for p in [1.0, 2.0, 5.0] {
            let phi = PhiFunction::power(p).unwrap();
            let r = luxemburg_norm(&phi, &const_field(&d, 3.0), &d, 1e-8).unwrap();
            assert!(r.tolerance_met);
            assert!((r.value - 3.0).abs() < 1e-6, "p = {p}: {}", r.value);
        }
    }

    #[test]
    fn luxemburg_power_linear_field() {
        let d = interval(10_000);
        for n in [1.0, 2.0, 7.0] {
            let phi = PhiFunction::power(n).unwrap();
            let r = luxemburg_norm(&phi, &linear_field(&d), &d, 1e-8).unwrap();
            let exact = (n + 1.0).powf(-1.0 / n);
            assert!((r.value - exact).abs() < 1e-4, "n = {n}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn luxemburg_infinity_is_sup() {
        let d = interval(512);
        let phi = PhiFunction::infinity();
        let f = linear_field(&d);
        let r = luxemburg_norm(&phi, &f, &d, 1e-8).unwrap();
        let sup = domain::sup_magnitude(&f);
        assert!((r.value - sup).abs() <= 1e-7 * sup);
    }

    #[test]
    fn luxemburg_zero_field() {
        let d = interval(32);
        let r = luxemburg_norm(&PhiFunction::power(2.0).unwrap(), &const_field(&d, 0.0), &d, 1e-8)
            .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        let sq = GridDomain::build(&[(0.0, 1.0), (0.0, 1.0)], &[40, 40], |_| true).unwrap();
        assert!((lp_norm(&const_field(&sq, 2.0), 3.0, &sq) - 2.0).abs() < 1e-12);
        let d = interval(10_000);
        let f = linear_field(&d);
        assert!((lp_norm(&f, 2.0, &d) - 3.0f64.powf(-0.5)).abs() < 1e-4);
        let h = d.width(0);
        assert!((lp_norm(&f, f64::INFINITY, &d) - (1.0 - h / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn sobolev_modular_examples() {
        let d = interval(10_000);
        let u = FieldExpr::scalar_with_gradient(|x| x[0], |_| vec![1.0]);
        let phi = PhiFunction::power(2.0).unwrap();
        let rho = sobolev_modular(&phi, &u, &d).unwrap();
        assert!((rho - 4.0 / 3.0).abs() < 1e-4);
        let zero = FieldExpr::scalar_with_gradient(|_| 0.0, |_| vec![0.0]);
        assert_eq!(sobolev_modular(&phi, &zero, &d).unwrap(), 0.0);
        // |u| ≤ 1 and |Du| = 1 ≤ 1: the indicator modular vanishes
        assert_eq!(sobolev_modular(&PhiFunction::infinity(), &u, &d).unwrap(), 0.0);
    }

    #[test]
    fn sobolev_norm_runs() {
        let d = interval(2000);
        let u = FieldExpr::scalar_with_gradient(|x| x[0], |_| vec![1.0]);
        let phi = PhiFunction::power(2.0).unwrap();
        let r = sobolev_norm(&phi, &u, &d, 1e-8).unwrap();
        // ρ_{1,φ}(u/λ) = (1/3 + 1)/λ² = 1 → λ = √(4/3)
        assert!((r.value - (4.0f64 / 3.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn unit_ball_examples() {
        let d = interval(1000);
        let phi = PhiFunction::power(2.0).unwrap();
        let r = unit_ball_check(&phi, &const_field(&d, 0.5), &d, 1e-6).unwrap();
        assert!(r.pass() && (r.norm - 0.5).abs() < 1e-5 && (r.modular - 0.25).abs() < 1e-9);
        let r2 = unit_ball_check(&PhiFunction::infinity(), &const_field(&d, 1.0), &d, 1e-6)
            .unwrap();
        assert!(r2.pass() && r2.modular == 0.0 && (r2.norm - 1.0).abs() < 1e-5);
        let r3 = unit_ball_check(&phi, &const_field(&d, 2.0), &d, 1e-6).unwrap();
        assert!(r3.pass() && (r3.modular - 4.0).abs() < 1e-9);
    }

    #[test]
    fn embedding_constant_examples() {
        assert!((embedding_constant(1.0, 1.0, 1.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((embedding_constant(1.0, 1.0, 1.0, 1.0) - 4.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for p in [1.0, 2.0, 4.0, 16.0, 256.0] {
            let c = embedding_constant(1.0, 1.0, 1.0, p);
            assert!(c < prev && c > 1.0);
            prev = c;
        }
    }

    #[test]
    fn embedding_check_examples() {
        let d = interval(1000);
        let phi = PhiFunction::power(2.0).unwrap();
        let fields = vec![const_field(&d, 1.0), linear_field(&d)];
        let report = embedding_check(&phi, 2.0, 1.0, 1.0, &fields, &d, 1e-6).unwrap();
        assert!(report.pass());
        // hypothesis failure: φ(x,1) = 10 does not fit c = 1
        let bad = PhiFunction::custom(|_, t| 10.0 * t * t);
        assert!(matches!(
            embedding_check(&bad, 2.0, 1.0, 1.0, &fields, &d, 1e-6),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn norm_from_modular_examples() {
        let d = interval(1000);
        let phi = PhiFunction::power(2.0).unwrap();
        let r = norm_from_modular_bound(&phi, &const_field(&d, 0.5), 2.0, 1.0, &d).unwrap();
        assert!(r.holds && (r.bound - 1.0).abs() < 1e-12);
        let r2 = norm_from_modular_bound(&phi, &const_field(&d, 3.0), 2.0, 1.0, &d).unwrap();
        assert!(r2.holds && (r2.bound - 3.0).abs() < 1e-9);
        let r3 = norm_from_modular_bound(&phi, &const_field(&d, 0.0), 2.0, 1.0, &d).unwrap();
        assert!(r3.holds && r3.bound == 1.0 && r3.norm == 0.0);
    }
}
