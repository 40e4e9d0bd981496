//! The closed registry of named test functions available to configs and
//! experiments. Every entry carries analytic derivatives where they exist,
//! shape tags, and analytic modulus-of-continuity upper bounds (derived from
//! derivative suprema on the window), so error bounds built on them stay
//! valid upper bounds.

use crate::error::{Error, Result};
use crate::function::{ScalarFunction, ShapeTags};
use crate::interval::Interval;
use crate::scalar::Real;

/// Names accepted by [`parse_function`], with their parameter grammar.
pub fn list_functions() -> Vec<&'static str> {
    vec![
        "e0 .. e6      monomials t^k",
        "sin           sine",
        "cos           cosine",
        "exp(w)        t -> exp(w t), any real w",
        "cosh(w)       t -> cosh(w t), w > 0",
        "abs(c)        t -> |t - c| (no derivative at c)",
    ]
}

fn parse_param(spec: &str, name: &str) -> Result<f64> {
    let inner = spec
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::InvalidInput(format!("malformed function spec `{spec}`")))?;
    inner
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("bad parameter in `{spec}`")))
}

/// Largest |t| on a bounded window.
fn abs_max<T: Real>(lo: T, hi: T) -> T {
    lo.abs().max(hi.abs())
}

fn monomial<T: Real>(k: usize, domain: Interval<T>) -> ScalarFunction<T> {
    let ki = k as i32;
    let nonneg = domain.lo >= T::zero();
    let f = ScalarFunction::from_fn(format!("e{k}"), domain, move |t: T| t.powi(ki))
        .with_deriv1(move |t: T| {
            if k == 0 {
                T::zero()
            } else {
                T::from_index(k) * t.powi(ki - 1)
            }
        })
        .with_deriv2(move |t: T| {
            if k < 2 {
                T::zero()
            } else {
                T::from_index(k * (k - 1)) * t.powi(ki - 2)
            }
        })
        .with_tags(ShapeTags {
            convex: k == 0 || k == 1 || k % 2 == 0 || nonneg,
            increasing: k == 0 || k % 2 == 1 || nonneg,
            lipschitz: None,
            bounded: k == 0 || domain.is_bounded(),
            exp_growth: None,
        })
        .with_omega(move |lo: T, hi: T, d: T| {
            if k == 0 {
                return T::zero();
            }
            let sup_d1 = T::from_index(k) * abs_max(lo, hi).powi(ki - 1);
            d.min(hi - lo) * sup_d1
        })
        .with_omega_deriv(move |lo: T, hi: T, d: T| {
            if k < 2 {
                return T::zero();
            }
            let sup_d2 = T::from_index(k * (k - 1)) * abs_max(lo, hi).powi(ki - 2);
            d.min(hi - lo) * sup_d2
        });
    f
}

fn sine<T: Real>(domain: Interval<T>) -> ScalarFunction<T> {
    ScalarFunction::from_fn("sin", domain, |t: T| t.sin())
        .with_deriv1(|t: T| t.cos())
        .with_deriv2(|t: T| -t.sin())
        .with_tags(ShapeTags { bounded: true, ..Default::default() })
        .with_omega(|_, _, d: T| d.min(T::of(2.0)))
        .with_omega_deriv(|_, _, d: T| d.min(T::of(2.0)))
}

fn cosine<T: Real>(domain: Interval<T>) -> ScalarFunction<T> {
    ScalarFunction::from_fn("cos", domain, |t: T| t.cos())
        .with_deriv1(|t: T| -t.sin())
        .with_deriv2(|t: T| -t.cos())
        .with_tags(ShapeTags { bounded: true, ..Default::default() })
        .with_omega(|_, _, d: T| d.min(T::of(2.0)))
        .with_omega_deriv(|_, _, d: T| d.min(T::of(2.0)))
}

fn exponential<T: Real>(w: T, domain: Interval<T>) -> ScalarFunction<T> {
    let sup_exp = move |lo: T, hi: T| (w * lo).exp().max((w * hi).exp());
    ScalarFunction::from_fn(format!("exp({w})"), domain, move |t: T| (w * t).exp())
        .with_deriv1(move |t: T| w * (w * t).exp())
        .with_deriv2(move |t: T| w * w * (w * t).exp())
        .with_tags(ShapeTags {
            convex: true,
            increasing: w >= T::zero(),
            lipschitz: None,
            bounded: domain.is_bounded(),
            exp_growth: Some(w.abs()),
        })
        .with_omega(move |lo: T, hi: T, d: T| d.min(hi - lo) * w.abs() * sup_exp(lo, hi))
        .with_omega_deriv(move |lo: T, hi: T, d: T| {
            d.min(hi - lo) * w * w * sup_exp(lo, hi)
        })
}

fn hyperbolic_cosine<T: Real>(w: T, domain: Interval<T>) -> ScalarFunction<T> {
    let cosh = move |t: T| ((w * t).exp() + (-(w * t)).exp()) * T::of(0.5);
    let sinh = move |t: T| ((w * t).exp() - (-(w * t)).exp()) * T::of(0.5);
    ScalarFunction::from_fn(format!("cosh({w})"), domain, cosh)
        .with_deriv1(move |t: T| w * sinh(t))
        .with_deriv2(move |t: T| w * w * cosh(t))
        .with_tags(ShapeTags {
            convex: true,
            increasing: domain.lo >= T::zero(),
            lipschitz: None,
            bounded: domain.is_bounded(),
            exp_growth: Some(w.abs()),
        })
        .with_omega(move |lo: T, hi: T, d: T| {
            d.min(hi - lo) * w.abs() * sinh(abs_max(lo, hi)).abs()
        })
        .with_omega_deriv(move |lo: T, hi: T, d: T| {
            d.min(hi - lo) * w * w * cosh(abs_max(lo, hi))
        })
}

fn absolute<T: Real>(c: T, domain: Interval<T>) -> ScalarFunction<T> {
    // no deriv1/deriv2: the kink at c is the point of these probes
    ScalarFunction::from_fn(format!("abs({c})"), domain, move |t: T| (t - c).abs())
        .with_tags(ShapeTags {
            convex: true,
            increasing: false,
            lipschitz: Some((T::one(), T::one())),
            bounded: domain.is_bounded(),
            exp_growth: None,
        })
        .with_omega(|lo: T, hi: T, d: T| d.min(hi - lo))
}

/// Parse a function spec like `e2`, `sin`, `exp(0.3)`, `abs(0.5)`, `cosh(1)`
/// against `domain`.
pub fn parse_function<T: Real>(spec: &str, domain: Interval<T>) -> Result<ScalarFunction<T>> {
    let spec = spec.trim();
    if let Some(k) = spec.strip_prefix('e').and_then(|r| r.parse::<usize>().ok()) {
        if k <= 6 {
            return Ok(monomial(k, domain));
        }
        return Err(Error::InvalidInput(format!(
            "monomial degree {k} out of range (e0..e6)"
        )));
    }
    match spec {
        "sin" => return Ok(sine(domain)),
        "cos" => return Ok(cosine(domain)),
        _ => {}
    }
    if spec.starts_with("exp(") {
        return Ok(exponential(T::of(parse_param(spec, "exp")?), domain));
    }
    if spec.starts_with("cosh(") {
        let w = parse_param(spec, "cosh")?;
        if w <= 0.0 {
            return Err(Error::InvalidInput(format!("cosh weight must be > 0 in `{spec}`")));
        }
        return Ok(hyperbolic_cosine(T::of(w), domain));
    }
    if spec.starts_with("abs(") {
        let c = T::of(parse_param(spec, "abs")?);
        if !domain.contains(c) {
            return Err(Error::InvalidInput(format!(
                "abs center {c} outside the function domain {domain}"
            )));
        }
        return Ok(absolute(c, domain));
    }
    Err(Error::InvalidInput(format!("unknown function `{spec}`")))
}
