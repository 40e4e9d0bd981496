//! Shape preservation: monotone/convex/Lipschitz verdicts on grids,
//! decreasing-in-n sequences for convex functions, the sandwich chain, and
//! monotonicity in the mixing parameter (with its Kantorovich failure mode).

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::operators::OperatorInstance;
use crate::scalar::Real;
use crate::transform::{phi_profile, LambdaSchedule, TransformedOperator};

const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeProperty<T: Real> {
    Increasing,
    Convex,
    /// Hoelder exponent of the estimated class.
    Lipschitz(T),
}

impl<T: Real> ShapeProperty<T> {
    pub fn name(&self) -> String {
        match self {
            ShapeProperty::Increasing => "increasing".into(),
            ShapeProperty::Convex => "convex".into(),
            ShapeProperty::Lipschitz(a) => format!("lipschitz({a})"),
        }
    }
}

/// A violating pair or triple with its evaluated values.
#[derive(Clone, Debug)]
pub struct Witness<T: Real> {
    pub points: Vec<T>,
    pub values: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct ShapeVerdict<T: Real> {
    pub property: ShapeProperty<T>,
    pub holds: bool,
    pub witness: Option<Witness<T>>,
    /// Signed slack: the smallest difference (or second difference) seen;
    /// negative values measure the worst violation.
    pub margin: T,
    pub warnings: Vec<String>,
}

fn require_grid<T: Real>(grid: &[T], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::Parameter(format!("grid needs at least {min_len} points")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Nondecreasing on the grid within a `-1e-9` slack.
pub fn check_increasing<T: Real>(
    h: impl Fn(T) -> Result<T>,
    grid: &[T],
) -> Result<ShapeVerdict<T>> {
    require_grid(grid, 3)?;
    let values: Vec<T> = grid.iter().map(|&x| h(x)).collect::<Result<_>>()?;
    let mut margin = T::of(f64::INFINITY);
    let mut witness = None;
    for i in 0..values.len() - 1 {
        let d = values[i + 1] - values[i];
        if d < margin {
            margin = d;
            if d < T::of(-SLACK) && witness.is_none() {
                witness = Some(Witness {
                    points: vec![grid[i], grid[i + 1]],
                    values: vec![values[i], values[i + 1]],
                });
            }
        }
    }
    Ok(ShapeVerdict {
        property: ShapeProperty::Increasing,
        holds: margin >= T::of(-SLACK),
        witness,
        margin,
        warnings: Vec::new(),
    })
}

/// Discrete convexity: second divided differences `>= -1e-9` on the grid.
pub fn check_convex<T: Real>(
    h: impl Fn(T) -> Result<T>,
    grid: &[T],
) -> Result<ShapeVerdict<T>> {
    require_grid(grid, 3)?;
    let values: Vec<T> = grid.iter().map(|&x| h(x)).collect::<Result<_>>()?;
    let mut margin = T::of(f64::INFINITY);
    let mut witness = None;
    for i in 1..values.len() - 1 {
        let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
        // second divided difference, scale-free in the grid step
        let dd = ((values[i + 1] - values[i]) / (x2 - x1)
            - (values[i] - values[i - 1]) / (x1 - x0))
            / (x2 - x0)
            * T::of(2.0);
        if dd < margin {
            margin = dd;
            if dd < T::of(-SLACK) && witness.is_none() {
                witness = Some(Witness {
                    points: vec![x0, x1, x2],
                    values: values[i - 1..=i + 1].to_vec(),
                });
            }
        }
    }
    Ok(ShapeVerdict {
        property: ShapeProperty::Convex,
        holds: margin >= T::of(-SLACK),
        witness,
        margin,
        warnings: Vec::new(),
    })
}

/// Largest grid-pair ratio `|h(u) - h(v)| / |u - v|^alpha`: a lower bound of
/// the true Hoelder constant.
pub fn estimate_lipschitz<T: Real>(
    h: impl Fn(T) -> Result<T>,
    alpha: T,
    grid: &[T],
) -> Result<T> {
    if alpha <= T::zero() || alpha > T::one() {
        return Err(Error::Parameter(format!("alpha must be in (0,1], got {alpha}")));
    }
    require_grid(grid, 2)?;
    let values: Vec<T> = grid.iter().map(|&x| h(x)).collect::<Result<_>>()?;
    let mut best = T::zero();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let ratio = (values[j] - values[i]).abs() / (grid[j] - grid[i]).abs().powf(alpha);
            best = best.max(ratio);
        }
    }
    Ok(best)
}

fn constant_in_n_lambda<T: Real>(
    schedule: &LambdaSchedule<T>,
    x: T,
    n_probes: &[usize],
) -> Result<T> {
    let lam = schedule.value(n_probes[0], x)?;
    for &n in &n_probes[1..] {
        if (schedule.value(n, x)? - lam).abs() > T::of(1e-15) {
            return Err(Error::Parameter(
                "this check requires a schedule constant in n".into(),
            ));
        }
    }
    Ok(lam)
}

/// For convex `f` and a schedule constant in `n`: the sequence
/// `n -> L_{n,lambda}(f)(x)` is nonincreasing, provided the base sequence
/// `L_n(f)(x)` itself is. The base hypothesis is probed first; a violation
/// becomes a warning, not an error.
pub fn check_decreasing_in_n<T: Real>(
    base: &OperatorInstance<T>,
    schedule: &LambdaSchedule<T>,
    f: &ScalarFunction<T>,
    x: T,
    n_lo: usize,
    n_hi: usize,
) -> Result<ShapeVerdict<T>> {
    if n_lo == 0 || n_hi <= n_lo {
        return Err(Error::Parameter("need 1 <= n_lo < n_hi".into()));
    }
    let probes: Vec<usize> = (n_lo..=n_hi).collect();
    constant_in_n_lambda(schedule, x, &probes)?;
    let mut warnings = Vec::new();
    let mut prev_base = base.apply(n_lo, f, x)?;
    for &n in &probes[1..] {
        let cur = base.apply(n, f, x)?;
        if cur > prev_base + T::of(1e-10) {
            warnings.push(format!(
                "base sequence not decreasing at n={n}, x={x}: hypothesis violated"
            ));
            break;
        }
        prev_base = cur;
    }

    let t = TransformedOperator::new(base.clone(), schedule.clone());
    let mut margin = T::of(f64::INFINITY);
    let mut witness = None;
    let mut prev = t.apply(n_lo, f, x)?;
    for &n in &probes[1..] {
        let cur = t.apply(n, f, x)?;
        let d = prev - cur;
        if d < margin {
            margin = d;
            if d < T::of(-1e-10) && witness.is_none() {
                witness = Some(Witness { points: vec![x], values: vec![prev, cur] });
            }
        }
        prev = cur;
    }
    Ok(ShapeVerdict {
        property: ShapeProperty::Increasing,
        holds: margin >= T::of(-1e-10),
        witness,
        margin,
        warnings,
    })
}

/// The four-link chain for convex `f` and a schedule constant in `n`:
/// `f(x) <= L_{n+1,lam}(f)(x) <= L_{n,lam}(f)(x) <= lam L_1(f)(x) + (1-lam) f(x)`.
pub fn sandwich_check<T: Real>(
    base: &OperatorInstance<T>,
    schedule: &LambdaSchedule<T>,
    f: &ScalarFunction<T>,
    x: T,
    n: usize,
) -> Result<bool> {
    if n == 0 {
        return Err(Error::Parameter("sandwich needs n >= 1".into()));
    }
    let lam = constant_in_n_lambda(schedule, x, &[n, n + 1])?;
    let t = TransformedOperator::new(base.clone(), schedule.clone());
    let fx = f.eval(x)?;
    let at_n1 = t.apply(n + 1, f, x)?;
    let at_n = t.apply(n, f, x)?;
    let top = lam * base.apply(1, f, x)? + (T::one() - lam) * fx;
    let tol = T::of(1e-10);
    Ok(fx <= at_n1 + tol && at_n1 <= at_n + tol && at_n <= top + tol)
}

/// Outcome of the mixing-parameter monotonicity check. `NotApplicable`
/// reports the first index where the precondition
/// `L_p(f_{p/n,x})(x) <= L_{p+1}(f_{(p+1)/n,x})(x)` fails; it is distinct
/// from a plain `Fails`, which means the precondition held but the ordering
/// still broke (never expected).
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaMonotonicity<T: Real> {
    Holds,
    Fails { lo_value: T, hi_value: T },
    NotApplicable { p: usize },
}

/// The profile terms `p -> L_p(f_{p/n,x})(x)`, `p = 0..=n`.
fn profile_terms<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
) -> Result<Vec<T>> {
    let nn = T::from_index(n);
    let mut terms = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let v = if p == 0 {
            f.eval(x)?
        } else {
            base.apply(p, &f.compose_alpha(T::from_index(p) / nn, x)?, x)?
        };
        terms.push(v);
    }
    Ok(terms)
}

/// If the profile terms are nondecreasing in `p` (checked exhaustively),
/// then `L_{n,lo}(f)(x) <= L_{n,hi}(f)(x)` for `lo <= hi`.
pub fn lambda_monotonicity_check<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    x: T,
    lambda_lo: T,
    lambda_hi: T,
) -> Result<LambdaMonotonicity<T>> {
    if n == 0 {
        return Err(Error::Parameter("check needs n >= 1".into()));
    }
    if lambda_lo > lambda_hi {
        return Err(Error::Parameter(format!(
            "lambda_lo {lambda_lo} must not exceed lambda_hi {lambda_hi}"
        )));
    }
    let terms = profile_terms(base, n, f, x)?;
    for p in 0..n {
        if terms[p + 1] < terms[p] - T::of(1e-12) {
            return Ok(LambdaMonotonicity::NotApplicable { p });
        }
    }
    let lo = phi_profile(base, n, f, x, lambda_lo)?;
    let hi = phi_profile(base, n, f, x, lambda_hi)?;
    if lo <= hi + T::of(1e-10) {
        Ok(LambdaMonotonicity::Holds)
    } else {
        Ok(LambdaMonotonicity::Fails { lo_value: lo, hi_value: hi })
    }
}

/// Grid search for a point where the ordering breaks:
/// `L_{n,lo}(f)(x) > L_{n,hi}(f)(x)`. Returns the worst witness
/// `(x, violation)` if one exists.
pub fn ordering_violation<T: Real>(
    base: &OperatorInstance<T>,
    n: usize,
    f: &ScalarFunction<T>,
    lambda_lo: T,
    lambda_hi: T,
    grid: &[T],
) -> Result<Option<(T, T)>> {
    if lambda_lo > lambda_hi {
        return Err(Error::Parameter("lambda_lo must not exceed lambda_hi".into()));
    }
    let mut best: Option<(T, T)> = None;
    for &x in grid {
        let gap = phi_profile(base, n, f, x, lambda_lo)?
            - phi_profile(base, n, f, x, lambda_hi)?;
        if gap > T::of(1e-12) && best.map_or(true, |(_, g)| gap > g) {
            best = Some((x, gap));
        }
    }
    Ok(best)
}
