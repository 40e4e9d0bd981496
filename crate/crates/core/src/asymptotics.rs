//! Asymptotic (Voronovskaja-type) verification: the scaled residual sequence
//! `n (L_{n,lambda_n}(f)(x) - f(x))` against its limit
//! `lambda(x) alpha(x)/2 f''(x) + kappa beta(x) f'(x)`.
//!
//! The factor `kappa = lim_n (1 - (1 - lambda_n)^n)` multiplying the
//! first-order term is forced by the exact first-moment identity
//! `L_{n,lambda}(psi_x)(x) = (1 - (1-lambda)^n)/n * (n m_1-average)`: it is 1
//! whenever `lambda_n` has a positive limit, but `1 - e^{-c}` for schedules
//! `lambda_n = c/n`. A commonly quoted simplification drops this factor; the
//! exact identity (and the numerics) keep it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{RealFn, ScalarFunction};
use crate::moments::central_moment;
use crate::operators::{Family, OperatorInstance};
use crate::scalar::Real;
use crate::transform::TransformedOperator;

/// The data of a Voronovskaja limit: `alpha(x) = lim n L_n(psi_x^2)(x)`,
/// `beta(x) = lim n L_n(psi_x)(x)`, the vanishing-moment order `q`, the
/// pointwise limit of the schedule, and the first-order decay factor
/// `beta_weight = lim (1 - (1 - lambda_n)^n)`.
#[derive(Clone)]
pub struct VoronovskajaSpec<T: Real> {
    pub alpha: RealFn<T>,
    pub beta: RealFn<T>,
    pub q: usize,
    pub lambda_limit: RealFn<T>,
    pub beta_weight: RealFn<T>,
}

fn family_alpha_beta<T: Real>(op: &OperatorInstance<T>) -> (RealFn<T>, RealFn<T>) {
    match op.family {
        f if f.is_exponential() => {
            let p = op.exponential_coefficient().expect("exponential").as_fn();
            (p, Arc::new(|_| T::zero()))
        }
        Family::Kantorovich => (
            Arc::new(|x: T| x * (T::one() - x)),
            Arc::new(|x: T| (T::one() - T::of(2.0) * x) * T::of(0.5)),
        ),
        Family::BernsteinSchurer => {
            (Arc::new(|x: T| x * (T::one() - x)), Arc::new(|x: T| x))
        }
        _ => unreachable!(),
    }
}

impl<T: Real> VoronovskajaSpec<T> {
    /// Limit data for a constant schedule `lambda_n = c`.
    pub fn for_constant(op: &OperatorInstance<T>, c: T) -> Result<Self> {
        if c < T::zero() || c > T::one() {
            return Err(Error::Parameter(format!("lambda constant {c} outside [0,1]")));
        }
        let (alpha, beta) = family_alpha_beta(op);
        let weight = if c > T::zero() { T::one() } else { T::zero() };
        Ok(VoronovskajaSpec {
            alpha,
            beta,
            q: 4,
            lambda_limit: Arc::new(move |_| c),
            beta_weight: Arc::new(move |_| weight),
        })
    }

    /// Limit data for a pointwise schedule `lambda_n(x) = c x`, constant in
    /// `n`: the decay factor is 1 wherever `c x > 0` and 0 where it vanishes.
    pub fn for_scaled_x(op: &OperatorInstance<T>, c: T) -> Self {
        let (alpha, beta) = family_alpha_beta(op);
        VoronovskajaSpec {
            alpha,
            beta,
            q: 4,
            lambda_limit: Arc::new(move |x| c * x),
            beta_weight: Arc::new(move |x| {
                if c * x > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }),
        }
    }

    /// Limit data for the schedule `lambda_n = 1/n`: the schedule limit is 0
    /// and the first-order decay factor is `1 - e^{-1}`.
    pub fn for_one_over_n(op: &OperatorInstance<T>) -> Self {
        let (alpha, beta) = family_alpha_beta(op);
        VoronovskajaSpec {
            alpha,
            beta,
            q: 4,
            lambda_limit: Arc::new(|_| T::zero()),
            beta_weight: Arc::new(|_| T::one() - T::of((-1.0f64).exp())),
        }
    }
}

/// `lambda(x) alpha(x)/2 f''(x) + beta_weight beta(x) f'(x)`.
pub fn voronovskaja_target<T: Real>(
    spec: &VoronovskajaSpec<T>,
    f: &ScalarFunction<T>,
    x: T,
) -> Result<T> {
    let d1 = f.deriv1_at(x)?;
    let d2 = f.deriv2_at(x)?;
    Ok((spec.lambda_limit)(x) * (spec.alpha)(x) * T::of(0.5) * d2
        + (spec.beta_weight)(x) * (spec.beta)(x) * d1)
}

/// `n (L_{n,lambda_n}(f)(x) - f(x))` along an increasing `n_list`.
pub fn residual_sequence<T: Real>(
    t: &TransformedOperator<T>,
    f: &ScalarFunction<T>,
    x: T,
    n_list: &[usize],
) -> Result<Vec<(usize, T)>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list.is_empty() || n_list[0] == 0 {
        return Err(Error::Parameter(
            "n_list must be strictly increasing and start at n >= 1".into(),
        ));
    }
    let fx = f.eval(x)?;
    n_list
        .iter()
        .map(|&n| Ok((n, T::from_index(n) * (t.apply(n, f, x)? - fx))))
        .collect()
}

/// Eliminate a `c/n` correction from the last two points:
/// `(n2 r2 - n1 r1) / (n2 - n1)`.
pub fn richardson_last_two<T: Real>(seq: &[(usize, T)]) -> Result<T> {
    if seq.len() < 3 {
        return Err(Error::Parameter(
            "extrapolation needs at least 3 residual points".into(),
        ));
    }
    let (n1, r1) = seq[seq.len() - 2];
    let (n2, r2) = seq[seq.len() - 1];
    Ok((T::from_index(n2) * r2 - T::from_index(n1) * r1)
        / (T::from_index(n2) - T::from_index(n1)))
}

#[derive(Clone, Debug)]
pub struct RateReport<T: Real> {
    pub x: T,
    pub residuals: Vec<(usize, T)>,
    pub target: T,
    pub gap_at_max_n: T,
    pub extrapolated_gap: T,
    pub pass: bool,
    /// Non-fatal observations, e.g. a non-monotone gap trend.
    pub diagnostics: Vec<String>,
}

pub fn rate_check<T: Real>(
    t: &TransformedOperator<T>,
    spec: &VoronovskajaSpec<T>,
    f: &ScalarFunction<T>,
    x: T,
    n_list: &[usize],
    tol: T,
) -> Result<RateReport<T>> {
    let residuals = residual_sequence(t, f, x, n_list)?;
    if residuals.iter().any(|(_, r)| !r.is_finite()) {
        return Err(Error::Evaluation { name: f.name.clone(), t: x.as_f64() });
    }
    let target = voronovskaja_target(spec, f, x)?;
    let gap_at_max_n = (residuals.last().unwrap().1 - target).abs();
    let extrapolated_gap = (richardson_last_two(&residuals)? - target).abs();

    let mut diagnostics = Vec::new();
    let gaps: Vec<T> = residuals.iter().map(|&(_, r)| (r - target).abs()).collect();
    if gaps.len() >= 4 {
        let tail = &gaps[gaps.len() - 4..];
        if tail.windows(2).any(|w| w[1] > w[0] * T::of(1.1)) {
            diagnostics.push(format!(
                "residual-target gap not monotone over the last 4 points at x={x}"
            ));
        }
    }
    Ok(RateReport {
        x,
        residuals,
        target,
        gap_at_max_n,
        extrapolated_gap,
        pass: extrapolated_gap <= tol,
        diagnostics,
    })
}

/// Audit of the base-moment conditions behind the limit: at a large probe
/// `n`, `n m_1` is near `beta`, `n m_2` near `alpha`, and `n m_4` decays with
/// observed order at least `1/n`.
#[derive(Clone, Copy, Debug)]
pub struct MomentAudit<T: Real> {
    pub x: T,
    pub first_gap: T,
    pub second_gap: T,
    pub fourth_scaled: T,
    pub fourth_order: T,
}

pub fn moment_condition_audit<T: Real>(
    op: &OperatorInstance<T>,
    spec: &VoronovskajaSpec<T>,
    x: T,
    n: usize,
) -> Result<MomentAudit<T>> {
    if n < 4 {
        return Err(Error::Parameter("audit needs n >= 4".into()));
    }
    let nn = T::from_index(n);
    let first_gap = (nn * central_moment(op, n, 1, x)? - (spec.beta)(x)).abs();
    let second_gap = (nn * central_moment(op, n, 2, x)? - (spec.alpha)(x)).abs();
    let fourth_scaled = nn * central_moment(op, n, 4, x)?;
    let half = n / 2;
    let fourth_half = T::from_index(half) * central_moment(op, half, 4, x)?;
    // observed decay order of n m_4 between n/2 and n
    let fourth_order = if fourth_scaled > T::zero() && fourth_half > T::zero() {
        (fourth_half / fourth_scaled).ln() / (nn / T::from_index(half)).ln()
    } else {
        T::of(f64::INFINITY)
    };
    Ok(MomentAudit { x, first_gap, second_gap, fourth_scaled, fourth_order })
}
