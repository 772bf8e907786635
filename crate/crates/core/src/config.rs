//! Textual specs for domains, Φ-functions, fields and integrands, used by
//! the command-line interface.
//!
//! Grammar: `name` or `name:k=v,k=v`. Positional shorthand is accepted
//! where unambiguous (`const:2`).

use std::collections::BTreeMap;

use crate::domain::{FieldExpr, GridDomain};
use crate::energy::Integrand;
use crate::phi::PhiFunction;
use crate::{Error, Result};

fn err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Splits `name:params` and parses `k=v` pairs; bare values get numeric keys.
fn split_spec(spec: &str) -> Result<(&str, BTreeMap<String, String>)> {
    let mut parts = spec.splitn(2, ':');
    let name = parts.next().unwrap_or("");
    if name.is_empty() {
        return Err(err("empty spec"));
    }
    let mut params = BTreeMap::new();
    if let Some(rest) = parts.next() {
        for (i, item) in rest.split(',').enumerate() {
            if let Some((k, v)) = item.split_once('=') {
                params.insert(k.trim().to_string(), v.trim().to_string());
            } else {
                params.insert(format!("_{i}"), item.trim().to_string());
            }
        }
    }
    Ok((name, params))
}

fn get_f64(params: &BTreeMap<String, String>, keys: &[&str], spec: &str) -> Result<f64> {
    for k in keys {
        if let Some(v) = params.get(*k) {
            return v.parse().map_err(|_| err(format!("bad number `{v}` in `{spec}`")));
        }
    }
    Err(err(format!("missing parameter {} in `{spec}`", keys[0])))
}

fn get_f64_or(
    params: &BTreeMap<String, String>,
    keys: &[&str],
    default: f64,
    spec: &str,
) -> Result<f64> {
    match get_f64(params, keys, spec) {
        Ok(v) => Ok(v),
        Err(Error::Config(msg)) if msg.starts_with("missing") => Ok(default),
        Err(e) => Err(e),
    }
}

/// `box:<lo,hi per axis>:res=<cells per axis>`, e.g. `box:0,1:res=1000`
/// or `box:-1,1,-1,1:res=200,200`.
pub fn parse_domain(spec: &str, mask: Option<&str>) -> Result<GridDomain> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or("");
    if name != "box" {
        return Err(err(format!("unknown domain `{name}`, expected `box`")));
    }
    let coords: Vec<f64> = parts
        .next()
        .ok_or_else(|| err("domain spec missing box coordinates"))?
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| err(format!("bad coordinate in `{spec}`"))))
        .collect::<Result<_>>()?;
    if coords.len() % 2 != 0 || coords.is_empty() {
        return Err(err("box coordinates must come in (lo, hi) pairs"));
    }
    let bounds: Vec<(f64, f64)> = coords.chunks(2).map(|c| (c[0], c[1])).collect();
    let res_part = parts.next().ok_or_else(|| err("domain spec missing `res=`"))?;
    let res_str = res_part
        .strip_prefix("res=")
        .ok_or_else(|| err("domain spec expects `res=<cells>`"))?;
    let resolution: Vec<usize> = res_str
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| err(format!("bad resolution in `{spec}`"))))
        .collect::<Result<_>>()?;
    let resolution = if resolution.len() == 1 && bounds.len() > 1 {
        vec![resolution[0]; bounds.len()]
    } else {
        resolution
    };
    let mask_fn = parse_mask(mask.unwrap_or("all"))?;
    GridDomain::build(&bounds, &resolution, |x| mask_fn(x))
}

type MaskFn = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Built-in masks: `all`, `ball:r=1` (centered at the origin),
/// `annulus:rmin=0.5,rmax=1`.
pub fn parse_mask(spec: &str) -> Result<MaskFn> {
    let (name, params) = split_spec(spec)?;
    match name {
        "all" => Ok(Box::new(|_| true)),
        "ball" => {
            let r = get_f64_or(&params, &["r", "_0"], 1.0, spec)?;
            Ok(Box::new(move |x| x.iter().map(|v| v * v).sum::<f64>() < r * r))
        }
        "annulus" => {
            let rmin = get_f64(&params, &["rmin", "_0"], spec)?;
            let rmax = get_f64(&params, &["rmax", "_1"], spec)?;
            Ok(Box::new(move |x| {
                let r2 = x.iter().map(|v| v * v).sum::<f64>();
                r2 > rmin * rmin && r2 < rmax * rmax
            }))
        }
        other => Err(err(format!("unknown mask `{other}`"))),
    }
}

/// Built-in Φ-functions, e.g. `power:p=2`, `double_phase:p=2,q=4`
/// (coefficient `a(x) = x₁`), `variable_exponent:base=2` (`t^{base+x₁}`),
/// `infinity`, `scaled_infinity:a=2`, `linear_plus_infinity`,
/// `scaled_base:a=2,n=3`.
pub fn parse_phi(spec: &str) -> Result<PhiFunction> {
    let (name, params) = split_spec(spec)?;
    match name {
        "power" => PhiFunction::power(get_f64(&params, &["p", "_0"], spec)?),
        "scaled_power" => PhiFunction::scaled_power(get_f64(&params, &["n", "_0"], spec)?),
        "variable_exponent" => {
            let base = get_f64_or(&params, &["base", "_0"], 2.0, spec)?;
            if base < 1.0 {
                return Err(err("variable_exponent base must be >= 1"));
            }
            Ok(PhiFunction::variable_exponent(move |x| base + x[0]))
        }
        "double_phase" => {
            let p = get_f64(&params, &["p", "_0"], spec)?;
            let q = get_f64(&params, &["q", "_1"], spec)?;
            PhiFunction::double_phase(p, q, |x| x[0].abs())
        }
        "infinity" => Ok(PhiFunction::infinity()),
        "scaled_infinity" => PhiFunction::scaled_infinity(get_f64(&params, &["a", "_0"], spec)?),
        "linear_plus_infinity" => Ok(PhiFunction::linear_plus_infinity()),
        "scaled_base" => PhiFunction::scaled_base(
            get_f64(&params, &["a", "_0"], spec)?,
            get_f64(&params, &["n", "_1"], spec)?,
        ),
        other => Err(err(format!("unknown phi family `{other}`"))),
    }
}

/// A Φ-function family indexed by `n`, together with its growth exponent
/// `p_n`: `power` (`tⁿ`), `scaled_power` (`(1/n)tⁿ`), `scaled_base:a=2`
/// (`(at)ⁿ`), `variable_exponent` (`t^{n+x₁}`), `nondoubling`
/// (`t^{n+1/|x|}`; mask the origin away).
pub type PhiFamily = Box<dyn Fn(u32) -> PhiFunction + Send + Sync>;

pub fn parse_phi_family(spec: &str) -> Result<(PhiFamily, Box<dyn Fn(u32) -> f64 + Send + Sync>)> {
    let (name, params) = split_spec(spec)?;
    let p_of_n: Box<dyn Fn(u32) -> f64 + Send + Sync> = Box::new(|n| n as f64);
    match name {
        "power" => Ok((Box::new(|n| PhiFunction::power(n as f64).expect("n >= 1")), p_of_n)),
        "scaled_power" => {
            Ok((Box::new(|n| PhiFunction::scaled_power(n as f64).expect("n >= 1")), p_of_n))
        }
        "scaled_base" => {
            let a = get_f64(&params, &["a", "_0"], spec)?;
            if !(a > 0.0) {
                return Err(err("scaled_base family needs a > 0"));
            }
            Ok((
                Box::new(move |n| PhiFunction::scaled_base(a, n as f64).expect("n >= 1")),
                p_of_n,
            ))
        }
        "variable_exponent" => Ok((
            Box::new(|n| PhiFunction::variable_exponent(move |x| n as f64 + x[0])),
            p_of_n,
        )),
        "nondoubling" => Ok((
            Box::new(|n| {
                PhiFunction::variable_exponent(move |x| {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    n as f64 + 1.0 / r
                })
            }),
            p_of_n,
        )),
        other => Err(err(format!("unknown phi family `{other}`"))),
    }
}

/// Built-in fields: `const:2`, `linear` (`x₁`, gradient supplied),
/// `sin:k=3` (`sin(kπx₁)`), `osc:n=8` (`x₁ + sin(nπx₁)/n`).
pub fn parse_field(spec: &str) -> Result<FieldExpr> {
    let (name, params) = split_spec(spec)?;
    match name {
        "const" => {
            let c = get_f64(&params, &["c", "_0"], spec)?;
            Ok(FieldExpr::scalar_with_gradient(
                move |_| c,
                |x| vec![0.0; x.len()],
            ))
        }
        "linear" => Ok(FieldExpr::scalar_with_gradient(
            |x| x[0],
            |x| {
                let mut g = vec![0.0; x.len()];
                g[0] = 1.0;
                g
            },
        )),
        "sin" => {
            let k = get_f64_or(&params, &["k", "_0"], 1.0, spec)?;
            let w = k * std::f64::consts::PI;
            Ok(FieldExpr::scalar_with_gradient(
                move |x| (w * x[0]).sin(),
                move |x| {
                    let mut g = vec![0.0; x.len()];
                    g[0] = w * (w * x[0]).cos();
                    g
                },
            ))
        }
        "osc" => {
            let n = get_f64(&params, &["n", "_0"], spec)?;
            if !(n > 0.0) {
                return Err(err("osc field needs n > 0"));
            }
            let w = n * std::f64::consts::PI;
            Ok(FieldExpr::scalar_with_gradient(
                move |x| x[0] + (w * x[0]).sin() / n,
                move |x| {
                    let mut g = vec![0.0; x.len()];
                    g[0] = 1.0 + std::f64::consts::PI * (w * x[0]).cos();
                    g
                },
            ))
        }
        other => Err(err(format!("unknown field `{other}`"))),
    }
}

/// The oscillation family `u_n = u + sin(nπx₁)/n`, weakly convergent to
/// `u` by construction.
pub fn oscillation_sequence(base: FieldExpr) -> impl Fn(u32) -> FieldExpr + Sync {
    move |n| {
        let nf = n as f64;
        let w = nf * std::f64::consts::PI;
        let b = base.clone();
        let bg = base.clone();
        FieldExpr::scalar_with_gradient(
            move |x| b.value_at(x)[0] + (w * x[0]).sin() / nf,
            move |x| {
                // base fields carry analytic gradients; fall back to the
                // oscillation term alone otherwise
                let mut g = bg.gradient_at(x).unwrap_or_else(|| vec![0.0; x.len()]);
                g[0] += std::f64::consts::PI * (w * x[0]).cos();
                g
            },
        )
    }
}

/// Built-in integrands: `abs_xi`, `abs_xi_pow:g=2`, `sqrt_abs_xi`.
pub fn parse_integrand(spec: &str) -> Result<Integrand> {
    let (name, params) = split_spec(spec)?;
    match name {
        "abs_xi" => Ok(Integrand::abs_xi()),
        "abs_xi_pow" => Integrand::abs_xi_pow(get_f64(&params, &["g", "_0"], spec)?),
        "sqrt_abs_xi" => Ok(Integrand::sqrt_abs_xi()),
        other => Err(err(format!("unknown integrand `{other}`"))),
    }
}

/// Parses `1,2,4` or a doubling range `1..128`.
pub fn parse_n_list(spec: &str) -> Result<Vec<u32>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u32 = lo.parse().map_err(|_| err(format!("bad range `{spec}`")))?;
        let hi: u32 = hi.parse().map_err(|_| err(format!("bad range `{spec}`")))?;
        if lo == 0 || hi < lo {
            return Err(err(format!("bad range `{spec}`")));
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n < hi {
            out.push(n);
            n = n.saturating_mul(2);
        }
        out.push(hi);
        out.dedup();
        Ok(out)
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| err(format!("bad n `{s}` in `{spec}`")))
                    .and_then(|n| if n == 0 { Err(err("n must be >= 1")) } else { Ok(n) })
            })
            .collect()
    }
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| err(format!("bad number `{s}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_specs() {
        let d = parse_domain("box:0,1:res=1000", None).unwrap();
        assert_eq!(d.dim(), 1);
        assert_eq!(d.measure(), 1.0);
        let sq = parse_domain("box:0,1,0,1:res=20", None).unwrap();
        assert_eq!(sq.dim(), 2);
        let ann = parse_domain("box:-1,1,-1,1:res=100", Some("annulus:0.5,1")).unwrap();
        let expected = std::f64::consts::PI * (1.0 - 0.25);
        assert!((ann.measure() - expected).abs() < 0.05);
        assert!(parse_domain("sphere:0,1:res=10", None).is_err());
        assert!(parse_domain("box:0,1", None).is_err());
    }

    #[test]
    fn phi_specs() {
        assert_eq!(parse_phi("power:p=2").unwrap().evaluate(&[0.0], 3.0), 9.0);
        assert_eq!(parse_phi("power:2").unwrap().evaluate(&[0.0], 3.0), 9.0);
        assert_eq!(parse_phi("infinity").unwrap().evaluate(&[0.0], 2.0), f64::INFINITY);
        assert!(parse_phi("power:p=zero").is_err());
        assert!(parse_phi("mystery").is_err());
    }

    #[test]
    fn family_specs() {
        let (family, p_of_n) = parse_phi_family("scaled_base:a=2").unwrap();
        assert_eq!(family(3).evaluate(&[0.0], 1.0), 8.0);
        assert_eq!(p_of_n(3), 3.0);
        let (nd, _) = parse_phi_family("nondoubling").unwrap();
        // at |x| = 1 the exponent is n + 1
        assert!((nd(2).evaluate(&[1.0, 0.0], 0.5) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn field_specs() {
        let f = parse_field("const:2").unwrap();
        assert_eq!(f.value_at(&[0.3])[0], 2.0);
        let lin = parse_field("linear").unwrap();
        assert_eq!(lin.value_at(&[0.4, 0.9])[0], 0.4);
        assert!(parse_field("spiral").is_err());
    }

    #[test]
    fn n_list_specs() {
        assert_eq!(parse_n_list("1,2,4").unwrap(), vec![1, 2, 4]);
        assert_eq!(parse_n_list("1..128").unwrap(), vec![1, 2, 4, 8, 16, 32, 64, 128]);
        assert_eq!(parse_n_list("3..10").unwrap(), vec![3, 6, 10]);
        assert!(parse_n_list("0,1").is_err());
    }
}
