//! Numerics for generalized Orlicz (Musielak-Orlicz) spaces on masked grids.
//!
//! The library discretizes finite-measure open sets `Ω ⊂ R^N` as masked
//! axis-aligned grids and provides, on top of them:
//!
//! - generalized weak Φ-functions `φ(x,t)` with extended-real values,
//!   including the power, variable-exponent, double-phase and indicator
//!   (`φ_∞`) families ([`phi`]);
//! - modulars `ρ_φ(f) = ∫_Ω φ(x,|f(x)|) dx` and Luxemburg quasinorms
//!   `inf{λ > 0 : ρ_φ(f/λ) ≤ 1}` computed by monotone bisection
//!   ([`modular`]);
//! - growth-rate (aInc) constant estimation, the (A0) anchor condition and
//!   the `L^φ ↪ L^p` embedding with asymptotically sharp constant;
//! - norm- and modular-type energies `F_φ(u) = ‖f(·,u,Du)‖_φ`,
//!   `E_φ(u) = ρ_φ(f(·,u,Du))` together with their `L^∞` limits, level
//!   convexity and coercivity checks, and a discrete level-convex Jensen
//!   inequality ([`energy`]);
//! - scripted convergence experiments emitting CSV tables ([`experiments`]).
//!
//! `+∞` is a first-class value throughout: Φ-functions, modulars and field
//! values may be `f64::INFINITY`, never `NaN`.

pub mod config;
pub mod domain;
pub mod energy;
pub mod experiments;
pub mod modular;
pub mod phi;

pub use domain::{DiscreteMeasure, FieldExpr, GridDomain, SampledField};
pub use energy::{EnergyKind, EnergyValue, Integrand};
pub use experiments::ConvergenceTable;
pub use modular::NormResult;
pub use phi::{FamilyTag, GrowthReport, PhiFunction};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty mask: no cell center satisfies the domain predicate")]
    EmptyMask,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("NaN encountered: {0}")]
    NanValue(String),
    #[error("no admissible samples for growth-constant estimation")]
    NoAdmissibleSamples,
    #[error("normalization requires phi(x,1) in (0,inf); found {value} at a cell center")]
    NormalizationAnchor { value: f64 },
    #[error("field expression has no gradient and none can be computed")]
    MissingGradient,
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// CSV float formatting: 17 significant digits, `inf` / `-inf` for infinities.
pub fn fmt_csv_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.16e}")
    }
}
