//! Norm- and modular-type energies for integrands `f(x, u, ξ)`, their
//! `L^∞` limit objects, and the discrete level-convex Jensen inequality.
//!
//! `F_φ(u) = ‖f(·,u,Du)‖_φ` and `E_φ(u) = ρ_φ(f(·,u,Du))`; the `∞`
//! subscript denotes the indicator family `φ_∞`, for which `F_∞` is the
//! essential supremum of the composite and `E_∞` is the 0/∞ indicator of
//! `composite ≤ 1`.

use std::sync::Arc;

use crate::domain::{self, DiscreteMeasure, FieldExpr, GridDomain, SampledField};
use crate::modular::{self, NormResult};
use crate::phi::PhiFunction;
use crate::{Error, Result};

type IntegrandFn = dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync;

/// Evaluator `f(x, u, ξ) ≥ 0` with declared coercivity `f ≥ α|ξ|^γ` and a
/// level-convexity flag for `ξ ↦ f(x, u, ξ)`.
#[derive(Clone)]
pub struct Integrand {
    eval: Arc<IntegrandFn>,
    pub alpha: f64,
    pub gamma: f64,
    pub level_convex_declared: bool,
}

fn norm2(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl Integrand {
    pub fn new(
        eval: impl Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync + 'static,
        alpha: f64,
        gamma: f64,
        level_convex_declared: bool,
    ) -> Self {
        Self { eval: Arc::new(eval), alpha, gamma, level_convex_declared }
    }

    /// `f(x,u,ξ) = |ξ|`.
    pub fn abs_xi() -> Self {
        Self::new(|_, _, xi| norm2(xi), 1.0, 1.0, true)
    }

    /// `f(x,u,ξ) = |ξ|^g`, `g > 0`.
    pub fn abs_xi_pow(g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::InvalidParameter(format!("abs_xi_pow exponent {g}, need > 0")));
        }
        Ok(Self::new(move |_, _, xi| norm2(xi).powf(g), 1.0, g, true))
    }

    /// `f(x,u,ξ) = √|ξ|`.
    pub fn sqrt_abs_xi() -> Self {
        Self::new(|_, _, xi| norm2(xi).sqrt(), 1.0, 0.5, true)
    }

    pub fn evaluate(&self, x: &[f64], u: &[f64], xi: &[f64]) -> f64 {
        (self.eval)(x, u, xi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyKind {
    /// `F_φ`: Luxemburg norm of the composite.
    NormEnergy,
    /// `E_φ`: modular of the composite.
    ModularEnergy,
    /// `F_∞`: essential supremum of the composite.
    SupEnergy,
    /// `E_∞`: 0 when the composite is ≤ 1 on the grid, else `+∞`.
    IndicatorEnergy,
}

#[derive(Clone, Debug)]
pub struct EnergyValue {
    pub value: f64,
    pub kind: EnergyKind,
}

/// Samples `x ↦ f(x, u(x), Du(x))` on the masked grid.
pub fn composite_field(
    f: &Integrand,
    u: &FieldExpr,
    domain: &GridDomain,
) -> Result<SampledField> {
    let uf = domain::sample(u, domain)?;
    let grad = domain::gradient(u, domain)?;
    let d = u.components();
    let n = domain.dim();
    let mut values = Vec::with_capacity(domain.cells());
    let mut uv = vec![0.0; d];
    let mut xi = vec![0.0; n * d];
    for (cell, x) in domain.centers().enumerate() {
        for c in 0..d {
            uv[c] = uf.component(cell, c);
        }
        for k in 0..n * d {
            xi[k] = grad.component(cell, k);
        }
        values.push(f.evaluate(x, &uv, &xi));
    }
    SampledField::scalar(values)
}

/// `F_φ(u) = ‖f(·,u,Du)‖_φ`.
pub fn f_energy(
    phi: &PhiFunction,
    f: &Integrand,
    u: &FieldExpr,
    domain: &GridDomain,
    rel_tol: f64,
) -> Result<EnergyValue> {
    let composite = composite_field(f, u, domain)?;
    let norm: NormResult = modular::luxemburg_norm(phi, &composite, domain, rel_tol)?;
    Ok(EnergyValue { value: norm.value, kind: EnergyKind::NormEnergy })
}

/// `E_φ(u) = ρ_φ(f(·,u,Du))`.
pub fn e_energy(
    phi: &PhiFunction,
    f: &Integrand,
    u: &FieldExpr,
    domain: &GridDomain,
) -> Result<EnergyValue> {
    let composite = composite_field(f, u, domain)?;
    Ok(EnergyValue { value: modular::modular(phi, &composite, domain), kind: EnergyKind::ModularEnergy })
}

/// `F_∞(u)`: grid essential supremum of the composite.
pub fn f_inf_energy(f: &Integrand, u: &FieldExpr, domain: &GridDomain) -> Result<EnergyValue> {
    let composite = composite_field(f, u, domain)?;
    Ok(EnergyValue { value: domain::ess_sup(&composite, domain), kind: EnergyKind::SupEnergy })
}

/// `E_∞(u)`: 0 when the composite is ≤ 1 at every masked cell, else `+∞`.
pub fn e_inf_energy(f: &Integrand, u: &FieldExpr, domain: &GridDomain) -> Result<EnergyValue> {
    let composite = composite_field(f, u, domain)?;
    let sup = domain::ess_sup(&composite, domain);
    let value = if sup <= 1.0 { 0.0 } else { f64::INFINITY };
    Ok(EnergyValue { value, kind: EnergyKind::IndicatorEnergy })
}

/// One sampled violation of the segment form of level convexity.
#[derive(Clone, Debug)]
pub struct LevelConvexViolation {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct LevelConvexReport {
    pub violations: Vec<LevelConvexViolation>,
    pub samples: usize,
}

impl LevelConvexReport {
    /// No violation found on the sample; evidence, not proof.
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// 33-point θ-grid in `[0,1]`.
pub fn default_theta_grid() -> Vec<f64> {
    (0..33).map(|i| i as f64 / 32.0).collect()
}

/// Samples the segment form `f(x,u,θa+(1−θ)b) ≤ max{f(x,u,a), f(x,u,b)}`
/// equivalent to convexity of every sublevel set.
pub fn check_level_convex(
    f: &Integrand,
    x_samples: &[Vec<f64>],
    u_samples: &[Vec<f64>],
    xi_pairs: &[(Vec<f64>, Vec<f64>)],
    theta_grid: &[f64],
) -> Result<LevelConvexReport> {
    if x_samples.is_empty() || u_samples.is_empty() || xi_pairs.is_empty() || theta_grid.is_empty()
    {
        return Err(Error::InvalidParameter("level-convexity sample grids must be nonempty".into()));
    }
    let tol = 1e-9;
    let mut report = LevelConvexReport::default();
    let mut mid = Vec::new();
    for x in x_samples {
        for u in u_samples {
            for (a, b) in xi_pairs {
                let fa = f.evaluate(x, u, a);
                let fb = f.evaluate(x, u, b);
                let rhs = fa.max(fb);
                for &theta in theta_grid {
                    mid.clear();
                    mid.extend(a.iter().zip(b).map(|(ai, bi)| theta * ai + (1.0 - theta) * bi));
                    let lhs = f.evaluate(x, u, &mid);
                    report.samples += 1;
                    if lhs > rhs + tol {
                        report.violations.push(LevelConvexViolation {
                            x: x.clone(),
                            u: u.clone(),
                            a: a.clone(),
                            b: b.clone(),
                            theta,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct CoercivityViolation {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub xi: Vec<f64>,
    pub value: f64,
    pub lower_bound: f64,
}

#[derive(Clone, Debug, Default)]
pub struct CoercivityReport {
    pub violations: Vec<CoercivityViolation>,
    pub samples: usize,
}

impl CoercivityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sampled check of `f(x,u,ξ) ≥ α|ξ|^γ`.
pub fn check_coercivity(
    f: &Integrand,
    alpha: f64,
    gamma: f64,
    samples: &[(Vec<f64>, Vec<f64>, Vec<f64>)],
) -> CoercivityReport {
    let tol = 1e-12;
    let mut report = CoercivityReport::default();
    for (x, u, xi) in samples {
        let value = f.evaluate(x, u, xi);
        let lower_bound = alpha * norm2(xi).powf(gamma);
        report.samples += 1;
        if value < lower_bound - tol {
            report.violations.push(CoercivityViolation {
                x: x.clone(),
                u: u.clone(),
                xi: xi.clone(),
                value,
                lower_bound,
            });
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct JensenReport {
    /// `f(Σ wᵢ ξᵢ)`.
    pub at_barycenter: f64,
    /// `maxᵢ f(ξᵢ)`, the discrete μ-esssup of `f` over the atoms.
    pub max_over_atoms: f64,
    pub margin: f64,
}

impl JensenReport {
    pub fn pass(&self) -> bool {
        self.margin >= -1e-9
    }
}

/// Discrete level-convex Jensen inequality: `f(barycenter) ≤ max over atoms`.
pub fn discrete_jensen_check(
    f: impl Fn(&[f64]) -> f64,
    mu: &DiscreteMeasure,
) -> JensenReport {
    let at_barycenter = f(&mu.barycenter());
    let max_over_atoms =
        mu.atoms().iter().map(|a| f(a)).fold(f64::NEG_INFINITY, f64::max);
    JensenReport { at_barycenter, max_over_atoms, margin: max_over_atoms - at_barycenter }
}

/// `(∫_Ω Σᵢ wᵢ(x) f(x,u(x),ξᵢ(x))^p dx)^{1/p}` for each `p`, the discrete
/// stand-in for the Young-measure limit that recovers the double esssup as
/// `p → ∞`. `measures` holds one finitely supported measure per masked cell.
pub fn young_limit_probe(
    f: &Integrand,
    u: &FieldExpr,
    measures: &[DiscreteMeasure],
    domain: &GridDomain,
    p_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if measures.len() != domain.cells() {
        return Err(Error::InvalidParameter(format!(
            "need one measure per masked cell: {} != {}",
            measures.len(),
            domain.cells()
        )));
    }
    let uf = domain::sample(u, domain)?;
    let d = u.components();
    let mut uv = vec![0.0; d];
    // precompute f at every atom, and its sup for scaling: large p would
    // overflow f^p otherwise
    let mut samples: Vec<(f64, f64)> = Vec::new(); // (weight, value)
    let mut sup = 0.0f64;
    for (cell, x) in domain.centers().enumerate() {
        for c in 0..d {
            uv[c] = uf.component(cell, c);
        }
        let mu = &measures[cell];
        for (atom, &w) in mu.atoms().iter().zip(mu.weights()) {
            let v = f.evaluate(x, &uv, atom);
            sup = sup.max(v);
            samples.push((w, v));
        }
    }
    let mut out = Vec::with_capacity(p_list.len());
    for &p in p_list {
        if sup == 0.0 || sup.is_infinite() {
            out.push((p, sup));
            continue;
        }
        let sum: f64 = samples.iter().map(|&(w, v)| w * (v / sup).powf(p)).sum();
        out.push((p, sup * (sum * domain.cell_measure()).powf(1.0 / p)));
    }
    Ok(out)
}
