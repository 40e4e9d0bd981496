//! The central construction: the binomial convex combination
//! `L_{n,lambda_n}(f)(x) = sum_p C(n,p) lambda^p (1-lambda)^{n-p} L_p(f_{p/n,x})(x)`,
//! and the profile function `phi(s)` behind the lambda-monotonicity result.

use std::sync::Arc;

use crate::binomial::binomial_weights;
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::operators::OperatorInstance;
use crate::scalar::Real;

/// The rule `(n, x) -> lambda_n(x) in [0, 1]`.
#[derive(Clone)]
pub enum LambdaSchedule<T: Real> {
    Constant(T),
    /// A per-n constant, e.g. `n -> 1/n`.
    PerN(Arc<dyn Fn(usize) -> T + Send + Sync>),
    /// Fully pointwise.
    Pointwise(Arc<dyn Fn(usize, T) -> T + Send + Sync>),
}

impl<T: Real> LambdaSchedule<T> {
    pub fn constant(c: T) -> Result<Self> {
        if c < T::zero() || c > T::one() || !c.is_finite() {
            return Err(Error::Parameter(format!("lambda constant {c} outside [0,1]")));
        }
        Ok(LambdaSchedule::Constant(c))
    }

    /// `lambda_n = 1/n`.
    pub fn one_over_n() -> Self {
        LambdaSchedule::PerN(Arc::new(|n| T::one() / T::from_index(n)))
    }

    /// `lambda_n(x) = c * x` (valid only where `c x` stays in [0,1]).
    pub fn scaled_x(c: T) -> Self {
        LambdaSchedule::Pointwise(Arc::new(move |_, x| c * x))
    }

    /// Evaluate and range-check; out-of-range is an error, never a clamp.
    pub fn value(&self, n: usize, x: T) -> Result<T> {
        let v = match self {
            LambdaSchedule::Constant(c) => *c,
            LambdaSchedule::PerN(f) => f(n),
            LambdaSchedule::Pointwise(f) => f(n, x),
        };
        if v < T::zero() || v > T::one() || !v.is_finite() {
            return Err(Error::Schedule { value: v.as_f64(), n, x: x.as_f64() });
        }
        Ok(v)
    }
}

impl<T: Real> std::fmt::Debug for LambdaSchedule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaSchedule::Constant(c) => write!(f, "Constant({c})"),
            LambdaSchedule::PerN(_) => write!(f, "PerN(..)"),
            LambdaSchedule::Pointwise(_) => write!(f, "Pointwise(..)"),
        }
    }
}

/// A base family together with its lambda schedule.
#[derive(Clone, Debug)]
pub struct TransformedOperator<T: Real> {
    pub base: OperatorInstance<T>,
    pub schedule: LambdaSchedule<T>,
}

impl<T: Real> TransformedOperator<T> {
    pub fn new(base: OperatorInstance<T>, schedule: LambdaSchedule<T>) -> Self {
        TransformedOperator { base, schedule }
    }

    pub fn apply(&self, n: usize, f: &ScalarFunction<T>, x: T) -> Result<T> {
        transform_apply(self, n, f, x)
    }
}

/// Binomial convex combination of `L_p(f_{p/n,x})(x)` with mixing weight `s`.
/// Weights below `1e-16 * max_weight` cannot move the result and are skipped.
fn convex_combination<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
    s: T,
) -> Result<T> {
    let weights = binomial_weights(n, s);
    let max_w = weights.iter().cloned().fold(T::zero(), T::max);
    let cutoff = max_w * T::of(1e-16);
    let nn = T::from_index(n);
    let mut acc = T::zero();
    for (p, &w) in weights.iter().enumerate() {
        if w <= cutoff {
            continue;
        }
        let term = if p == 0 {
            f.eval(x)?
        } else {
            let composed = f.compose_alpha(T::from_index(p) / nn, x)?;
            base.apply(p, &composed, x)?
        };
        acc += w * term;
    }
    Ok(acc)
}

/// Evaluate `L_{n,lambda_n}(f)(x)`.
pub fn transform_apply<T: Real>(
    t: &TransformedOperator<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("transform requires n >= 1".into()));
    }
    let lam = t.schedule.value(n, x)?;
    convex_combination(&t.base, n, f, x, lam)
}

/// `phi(s) = sum_p C(n,p) s^p (1-s)^{n-p} L_p(f_{p/n,x})(x)` for `s in [0,1]`.
pub fn phi_profile<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
    s: T,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("phi_profile requires n >= 1".into()));
    }
    if s < T::zero() || s > T::one() {
        return Err(Error::Parameter(format!("phi_profile requires s in [0,1], got {s}")));
    }
    convex_combination(base, n, f, x, s)
}

/// Closed-form derivative of the profile:
/// `phi'(s) = n sum_{p<n} C(n-1,p) s^p (1-s)^{n-1-p}
///            (L_{p+1}(f_{(p+1)/n,x})(x) - L_p(f_{p/n,x})(x))`.
pub fn phi_derivative<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
    s: T,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("phi_derivative requires n >= 1".into()));
    }
    if s < T::zero() || s > T::one() {
        return Err(Error::Parameter(format!(
            "phi_derivative requires s in [0,1], got {s}"
        )));
    }
    let nn = T::from_index(n);
    // L_p(f_{p/n,x})(x) for p = 0..=n
    let mut terms = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let v = if p == 0 {
            f.eval(x)?
        } else {
            base.apply(p, &f.compose_alpha(T::from_index(p) / nn, x)?, x)?
        };
        terms.push(v);
    }
    let w = binomial_weights(n - 1, s);
    let mut acc = T::zero();
    for (p, &wp) in w.iter().enumerate() {
        acc += wp * (terms[p + 1] - terms[p]);
    }
    Ok(nn * acc)
}
