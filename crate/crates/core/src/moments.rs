//! Central moments of base and transformed operators, the binomial-sum
//! moment identities, growth constants `M1`/`M2`/`M_g`, and the exact sum
//! identity used in the inheritance bounds.

use std::sync::Arc;

use crate::binomial::binomial_weights;
use crate::error::{Error, Result};
use crate::function::{RealFn, ScalarFunction};
use crate::interval::Interval;
use crate::operators::{Family, OperatorInstance};
use crate::scalar::Real;
use crate::transform::TransformedOperator;

/// The test function `psi_x^k : t -> (t - x)^k` on `domain`.
pub fn psi_power<T: Real>(x: T, k: usize, domain: Interval<T>) -> ScalarFunction<T> {
    ScalarFunction::from_fn(format!("psi_{x}^{k}"), domain, move |t: T| {
        (t - x).powi(k as i32)
    })
}

fn check_moment_order<T: Real>(op: &OperatorInstance<T>, k: usize) -> Result<()> {
    if !op.domain.is_bounded() && k > 4 {
        return Err(Error::UnsupportedMoment { k, family: op.family.name().to_string() });
    }
    Ok(())
}

/// `L_n(psi_x^k)(x)` by direct summation/quadrature; `k = 0` returns 1.
pub fn central_moment<T: Real>(
    op: &OperatorInstance<T>,
    n: usize,
    k: usize,
    x: T,
) -> Result<T> {
    if k == 0 {
        return Ok(T::one());
    }
    check_moment_order(op, k)?;
    op.apply(n, &psi_power(x, k, op.domain), x)
}

/// Transformed central moment, the direct route: `L_{n,lambda}(psi_x^k)(x)`.
pub fn transformed_moment<T: Real>(
    t: &TransformedOperator<T>,
    n: usize,
    k: usize,
    x: T,
) -> Result<T> {
    if k == 0 {
        return Ok(T::one());
    }
    check_moment_order(&t.base, k)?;
    t.apply(n, &psi_power(x, k, t.base.domain), x)
}

/// Transformed central moment via the binomial identity on base moments:
/// `(1/n) sum_p C(n,p) lam^p (1-lam)^{n-p} (p^k / n^{k-1}) L_p(psi_x^k)(x)`.
pub fn transformed_moment_identity<T: Real>(
    t: &TransformedOperator<T>,
    n: usize,
    k: usize,
    x: T,
) -> Result<T> {
    if n == 0 || k == 0 {
        return Err(Error::Parameter("identity route requires n >= 1, k >= 1".into()));
    }
    check_moment_order(&t.base, k)?;
    let lam = t.schedule.value(n, x)?;
    let w = binomial_weights(n, lam);
    let nn = T::from_index(n);
    let mut acc = T::zero();
    for (p, &wp) in w.iter().enumerate().skip(1) {
        if wp == T::zero() {
            continue;
        }
        let scale = T::from_index(p).powi(k as i32) / nn.powi(k as i32 - 1);
        acc += wp * scale * central_moment(&t.base, p, k, x)?;
    }
    Ok(acc / nn)
}

/// First transformed moment via the shifted-index form:
/// `lam sum_{p<n} C(n-1,p) lam^p (1-lam)^{n-1-p} L_{p+1}(psi_x)(x)`.
pub fn transformed_first_moment_t1<T: Real>(
    t: &TransformedOperator<T>,
    n: usize,
    x: T,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("t1 route requires n >= 1".into()));
    }
    let lam = t.schedule.value(n, x)?;
    let w = binomial_weights(n - 1, lam);
    let mut acc = T::zero();
    for (p, &wp) in w.iter().enumerate() {
        if wp == T::zero() {
            continue;
        }
        acc += wp * central_moment(&t.base, p + 1, 1, x)?;
    }
    Ok(lam * acc)
}

/// Second transformed moment via the shifted-index form:
/// `(lam/n) sum_{p<n} C(n-1,p) lam^p (1-lam)^{n-1-p} (p+1) L_{p+1}(psi_x^2)(x)`.
pub fn transformed_second_moment_t2<T: Real>(
    t: &TransformedOperator<T>,
    n: usize,
    x: T,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("t2 route requires n >= 1".into()));
    }
    let lam = t.schedule.value(n, x)?;
    let w = binomial_weights(n - 1, lam);
    let mut acc = T::zero();
    for (p, &wp) in w.iter().enumerate() {
        if wp == T::zero() {
            continue;
        }
        acc += wp * T::from_index(p + 1) * central_moment(&t.base, p + 1, 2, x)?;
    }
    Ok(lam * acc / T::from_index(n))
}

/// The saturation inequality for a positive operator `S`:
/// `|S(psi_x)(x)| <= (1 + S(1)(x)) sqrt(S(psi_x^2)(x))`.
pub fn sat_bound<T: Real>(psi1: T, psi2: T, one: T) -> Result<bool> {
    if psi2 < T::zero() {
        return Err(Error::InvalidInput(format!("negative second moment {psi2}")));
    }
    Ok(psi1.abs() <= (T::one() + one) * psi2.sqrt() + T::of(1e-12))
}

/// The exact binomial sum
/// `s sum_{p=0}^{n-1} C(n-1,p) s^p (1-s)^{n-1-p} / (p+1)`, which telescopes
/// to `(1 - (1-s)^n) / n`.
pub fn lemma2_sum_identity<T: Real>(n: usize, s: T) -> Result<T> {
    if n == 0 {
        return Err(Error::Parameter("lemma2 identity requires n >= 1".into()));
    }
    if s < T::zero() || s > T::one() {
        return Err(Error::Parameter(format!("s must be in [0,1], got {s}")));
    }
    let w = binomial_weights(n - 1, s);
    let mut acc = T::zero();
    for (p, &wp) in w.iter().enumerate() {
        acc += wp / T::from_index(p + 1);
    }
    Ok(s * acc)
}

/// Which growth condition to estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthCondition {
    /// `|L_n(psi_x)(x)| <= M1(x)/n`
    H1,
    /// `L_n(psi_x^2)(x) <= M2(x)/n`
    H2,
}

/// Growth functions `M1`, `M2` for a family, when known.
#[derive(Clone)]
pub struct GrowthConstants<T: Real> {
    pub family: Family,
    pub m1: Option<RealFn<T>>,
    pub m2: Option<RealFn<T>>,
}

impl<T: Real> GrowthConstants<T> {
    /// Closed-form constants where derivable. Exponential families have
    /// `M1 = 0`, `M2 = p(x)` exactly; Bernstein-Schurer follows from its
    /// displayed moments; Kantorovich `M2` is the empirical supremum over
    /// `n <= 200` of `n L_n(psi_x^2)(x)` (closed-form moment) plus 1%.
    pub fn for_family(op: &OperatorInstance<T>) -> Self {
        let family = op.family;
        let (m1, m2): (RealFn<T>, RealFn<T>) = match family {
            f if f.is_exponential() => {
                let p = op.exponential_coefficient().expect("exponential").as_fn();
                (Arc::new(|_| T::zero()), p)
            }
            Family::BernsteinSchurer => (
                // |x/n| <= x/n  and  x(1-x)/n + x/n^2 <= (x(1-x)+x)/n
                Arc::new(|x: T| x),
                Arc::new(|x: T| x * (T::one() - x) + x),
            ),
            Family::Kantorovich => (
                // n |(1-2x)/(2(n+1))| <= |1-2x|/2
                Arc::new(|x: T| (T::one() - T::of(2.0) * x).abs() * T::of(0.5)),
                Arc::new(|x: T| {
                    let sup = (1..=200usize)
                        .map(|n| T::from_index(n) * kantorovich_psi2_closed(n, x))
                        .fold(T::zero(), T::max);
                    sup * T::of(1.01)
                }),
            ),
            _ => unreachable!(),
        };
        GrowthConstants { family, m1: Some(m1), m2: Some(m2) }
    }

    pub fn m1_at(&self, x: T) -> Result<T> {
        self.m1
            .as_ref()
            .map(|f| f(x))
            .ok_or_else(|| Error::Config(format!("M1 absent for {}", self.family.name())))
    }

    pub fn m2_at(&self, x: T) -> Result<T> {
        self.m2
            .as_ref()
            .map(|f| f(x))
            .ok_or_else(|| Error::Config(format!("M2 absent for {}", self.family.name())))
    }
}

/// Closed form of `K_n(psi_x^2)(x)` from exact cell integration.
fn kantorovich_psi2_closed<T: Real>(n: usize, x: T) -> T {
    let nf = T::from_index(n);
    let np1 = nf + T::one();
    let e2 = (nf * (nf - T::one()) * x * x + T::of(2.0) * nf * x + T::of(1.0 / 3.0))
        / (np1 * np1);
    let e1 = (T::of(2.0) * nf * x + T::one()) / (T::of(2.0) * np1);
    e2 - T::of(2.0) * x * e1 + x * x
}

/// Empirical per-x suprema of `n |L_n(psi_x)(x)|` (H1) or `n L_n(psi_x^2)(x)`
/// (H2) over `1 <= n <= n_max`. Returns `(x, sup)` pairs.
pub fn estimate_growth<T: Real>(
    op: &OperatorInstance<T>,
    which: GrowthCondition,
    x_grid: &[T],
    n_max: usize,
) -> Result<Vec<(T, T)>> {
    if n_max == 0 {
        return Err(Error::Parameter("estimate_growth requires n_max >= 1".into()));
    }
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let mut sup = T::zero();
        for n in 1..=n_max {
            let v = match which {
                GrowthCondition::H1 => {
                    T::from_index(n) * central_moment(op, n, 1, x)?.abs()
                }
                GrowthCondition::H2 => T::from_index(n) * central_moment(op, n, 2, x)?,
            };
            sup = sup.max(v);
        }
        out.push((x, sup));
    }
    Ok(out)
}

/// Outcome of the finite `M_g` scan: the max of `p |L_p(g)(x) - g(x)|` over
/// `1 <= p <= p_max`, with a stabilization diagnostic instead of any claim
/// about the true supremum.
#[derive(Clone, Copy, Debug)]
pub struct MgEstimate<T: Real> {
    pub value: T,
    /// Whether the last quartile of the scan comes within 5% of the max.
    pub stabilized: bool,
}

pub fn estimate_mg<T: Real>(
    op: &OperatorInstance<T>,
    g: &ScalarFunction<T>,
    x: T,
    p_max: usize,
) -> Result<MgEstimate<T>> {
    if p_max == 0 {
        return Err(Error::Parameter("estimate_mg requires p_max >= 1".into()));
    }
    let gx = g.eval(x)?;
    let mut seq = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let v = op.apply(p, g, x).map_err(|e| match e {
            Error::Evaluation { name, t } => {
                Error::Growth(format!("divergent series for `{name}` near t={t}"))
            }
            other => other,
        })?;
        seq.push(T::from_index(p) * (v - gx).abs());
    }
    let value = seq.iter().cloned().fold(T::zero(), T::max);
    let tail_start = p_max - p_max / 4;
    let tail_max = seq[tail_start.saturating_sub(1)..]
        .iter()
        .cloned()
        .fold(T::zero(), T::max);
    let stabilized = tail_max >= value * T::of(0.95);
    Ok(MgEstimate { value, stabilized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::LambdaSchedule;

    fn op(f: Family) -> OperatorInstance<f64> {
        OperatorInstance::new(f)
    }

    #[test]
    fn bernstein_second_moment_closed_form() {
        let b = op(Family::Bernstein);
        for n in [1usize, 5, 40] {
            for x in b.eval_domain.grid(11) {
                let got = central_moment(&b, n, 2, x).unwrap();
                assert!((got - x * (1.0 - x) / n as f64).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn moment_order_zero_is_one() {
        assert_eq!(central_moment(&op(Family::Baskakov), 9, 0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn unbounded_family_rejects_high_order() {
        assert!(matches!(
            central_moment(&op(Family::SzaszMirakjan), 5, 6, 1.0),
            Err(Error::UnsupportedMoment { .. })
        ));
        // bounded family accepts it
        assert!(central_moment(&op(Family::Bernstein), 5, 6, 0.5).is_ok());
    }

    #[test]
    fn kantorovich_psi2_closed_form_matches_operator() {
        let k = op(Family::Kantorovich);
        for n in [1usize, 4, 17, 60] {
            for x in [0.0, 0.25, 0.5, 0.9, 1.0] {
                let direct = central_moment(&k, n, 2, x).unwrap();
                let closed = kantorovich_psi2_closed(n, x);
                assert!((direct - closed).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn identity_routes_agree_with_direct() {
        for family in [Family::Bernstein, Family::BernsteinSchurer, Family::Kantorovich] {
            let t = TransformedOperator::new(op(family), LambdaSchedule::constant(0.6).unwrap());
            for n in [1usize, 3, 10] {
                for x in [0.1, 0.5, 0.95] {
                    for k in [1usize, 2, 4] {
                        let direct = transformed_moment(&t, n, k, x).unwrap();
                        let ident = transformed_moment_identity(&t, n, k, x).unwrap();
                        assert!(
                            (direct - ident).abs() < 1e-12,
                            "{} n={n} k={k} x={x}: {direct} vs {ident}",
                            family.name()
                        );
                    }
                    let t1 = transformed_first_moment_t1(&t, n, x).unwrap();
                    let d1 = transformed_moment(&t, n, 1, x).unwrap();
                    assert!((t1 - d1).abs() < 1e-12);
                    let t2 = transformed_second_moment_t2(&t, n, x).unwrap();
                    let d2 = transformed_moment(&t, n, 2, x).unwrap();
                    assert!((t2 - d2).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lambda_zero_kills_central_moments() {
        let t = TransformedOperator::new(
            op(Family::Bernstein),
            LambdaSchedule::constant(0.0).unwrap(),
        );
        for k in 1..=4usize {
            assert_eq!(transformed_moment(&t, 6, k, 0.4).unwrap(), 0.0);
        }
    }

    #[test]
    fn sat_bound_cases() {
        assert!(sat_bound(0.0, 0.5, 1.0).unwrap());
        // Bernstein n=10, x=0.3: first moment 0, second 0.021
        let b = op(Family::Bernstein);
        let m1 = central_moment(&b, 10, 1, 0.3).unwrap();
        let m2 = central_moment(&b, 10, 2, 0.3).unwrap();
        assert!((m2 - 0.021).abs() < 1e-14);
        assert!(sat_bound(m1, m2, 1.0).unwrap());
        // 0.5 > 2 * 0.1
        assert!(!sat_bound(0.5, 0.01, 1.0).unwrap());
        assert!(sat_bound(0.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn lemma2_identity_endpoints_and_value() {
        for n in [1usize, 7, 50] {
            assert_eq!(lemma2_sum_identity::<f64>(n, 0.0).unwrap(), 0.0);
            let at_one = lemma2_sum_identity::<f64>(n, 1.0).unwrap();
            assert!((at_one - 1.0 / n as f64).abs() < 1e-16);
        }
        let got = lemma2_sum_identity::<f64>(7, 0.37).unwrap();
        let want = (1.0 - 0.63f64.powi(7)) / 7.0;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn growth_estimates_for_exponential_families() {
        for family in [Family::Bernstein, Family::SzaszMirakjan, Family::Weierstrass] {
            let o = op(family);
            let p = o.exponential_coefficient().unwrap();
            let grid: Vec<f64> = match family {
                Family::Weierstrass => vec![-1.0, 0.0, 0.5, 2.0],
                _ => vec![0.1, 0.5, 1.0],
            };
            let h1 = estimate_growth(&o, GrowthCondition::H1, &grid, 50).unwrap();
            for (x, sup) in h1 {
                assert!(sup <= 1e-8, "{} H1 x={x} sup={sup}", family.name());
            }
            let h2 = estimate_growth(&o, GrowthCondition::H2, &grid, 50).unwrap();
            for (x, sup) in h2 {
                assert!((sup - p.value(x)).abs() <= 1e-6, "{} H2 x={x}", family.name());
            }
        }
    }

    #[test]
    fn growth_estimates_bernstein_schurer_h1() {
        let o = op(Family::BernsteinSchurer);
        let est = estimate_growth(&o, GrowthCondition::H1, &[1.0], 50).unwrap();
        // n * (x/n) = x = 1
        assert!((est[0].1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mg_closed_form_for_bernstein_quadratic() {
        // g = e2 + 1 on [0,1]: p |B_p(g)(x) - g(x)| = x(1-x) for all p
        let b = op(Family::Bernstein);
        let g = ScalarFunction::from_fn("e2+1", b.domain, |t: f64| t * t + 1.0);
        for x in [0.2, 0.5, 0.8] {
            let est = estimate_mg(&b, &g, x, 60).unwrap();
            // roundoff in L_p(g) gets amplified by the factor p
            assert!((est.value - x * (1.0 - x)).abs() < 1e-10, "x={x} got {}", est.value);
            assert!(est.stabilized);
        }
    }

    #[test]
    fn mg_szasz_cosh_weight_stabilizes() {
        let s = op(Family::SzaszMirakjan);
        let w = 0.5f64;
        let g = ScalarFunction::from_fn("cosh", s.domain, move |t: f64| {
            (w * t).exp() + (-w * t).exp()
        });
        let est = estimate_mg(&s, &g, 1.0, 400).unwrap();
        assert!(est.value.is_finite() && est.value > 0.0);
        // the sequence decreases from p=1 toward the asymptotic limit
        // x g''(x) / 2, so the max sits at the start and the tail cannot
        // come within 5% of it
        assert!(!est.stabilized);
        let limit = 1.0 * (w * w * ((w * 1.0f64).exp() + (-w * 1.0f64).exp())) / 2.0;
        assert!(est.value >= limit && est.value <= limit * 1.5);
    }

    #[test]
    fn bernoulli_remark_bound() {
        // (1 - (1-lam)^n)/n <= lam on grids
        for n in [1usize, 3, 10, 100] {
            for i in 0..=20 {
                let lam = i as f64 / 20.0;
                let lhs = (1.0 - (1.0 - lam).powi(n as i32)) / n as f64;
                assert!(lhs <= lam + 1e-15);
            }
        }
    }

    #[test]
    fn inheritance_bounds_eq1_eqx_eq2() {
        // Eq (1), (x), (2) for Bernstein with constant lambda
        let o = op(Family::Bernstein);
        let consts = GrowthConstants::for_family(&o);
        for lam in [0.25, 0.75] {
            let t = TransformedOperator::new(o.clone(), LambdaSchedule::constant(lam).unwrap());
            for n in [1usize, 5, 20] {
                for x in [0.1, 0.5, 0.9] {
                    let m1 = transformed_moment(&t, n, 1, x).unwrap();
                    let m2 = transformed_moment(&t, n, 2, x).unwrap();
                    let big_m1 = consts.m1_at(x).unwrap();
                    let big_m2 = consts.m2_at(x).unwrap();
                    assert!(m2 <= lam * big_m2 / n as f64 + 1e-10);
                    assert!(m1.abs() <= 2.0 * (lam * big_m2 / n as f64).sqrt() + 1e-10);
                    let decay = (1.0 - (1.0 - lam).powi(n as i32)) / n as f64;
                    assert!(m1.abs() <= big_m1 * decay + 1e-10);
                }
            }
        }
    }
}
