//! Evaluable real functions with optional analytic derivatives, shape
//! metadata and analytic modulus-of-continuity bounds.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Real;

pub type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Analytic upper bound of a modulus of continuity: `(window_lo, window_hi,
/// delta) -> bound`. Always an upper bound of the true modulus on the window,
/// so error estimates built from it stay valid.
pub type WindowModulus<T> = Arc<dyn Fn(T, T, T) -> T + Send + Sync>;

#[derive(Clone, Debug)]
pub struct ShapeTags<T: Real> {
    pub convex: bool,
    pub increasing: bool,
    /// Hoelder class `Lip_K(alpha)`: `(K, alpha)`.
    pub lipschitz: Option<(T, T)>,
    pub bounded: bool,
    /// Exponential growth weight `w`: `|f| <= K (e^{wt} + e^{-wt})`.
    pub exp_growth: Option<T>,
}

impl<T: Real> Default for ShapeTags<T> {
    fn default() -> Self {
        ShapeTags {
            convex: false,
            increasing: false,
            lipschitz: None,
            bounded: false,
            exp_growth: None,
        }
    }
}

#[derive(Clone)]
pub struct ScalarFunction<T: Real> {
    pub name: String,
    eval: RealFn<T>,
    deriv1: Option<RealFn<T>>,
    deriv2: Option<RealFn<T>>,
    pub tags: ShapeTags<T>,
    pub domain: Interval<T>,
    omega: Option<WindowModulus<T>>,
    omega_deriv: Option<WindowModulus<T>>,
}

impl<T: Real> ScalarFunction<T> {
    pub fn new(name: impl Into<String>, domain: Interval<T>, eval: RealFn<T>) -> Self {
        ScalarFunction {
            name: name.into(),
            eval,
            deriv1: None,
            deriv2: None,
            tags: ShapeTags::default(),
            domain,
            omega: None,
            omega_deriv: None,
        }
    }

    pub fn from_fn(
        name: impl Into<String>,
        domain: Interval<T>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, domain, Arc::new(f))
    }

    pub fn with_deriv1(mut self, d: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.deriv1 = Some(Arc::new(d));
        self
    }

    pub fn with_deriv2(mut self, d: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.deriv2 = Some(Arc::new(d));
        self
    }

    pub fn with_tags(mut self, tags: ShapeTags<T>) -> Self {
        self.tags = tags;
        self
    }

    pub fn with_omega(mut self, m: impl Fn(T, T, T) -> T + Send + Sync + 'static) -> Self {
        self.omega = Some(Arc::new(m));
        self
    }

    pub fn with_omega_deriv(
        mut self,
        m: impl Fn(T, T, T) -> T + Send + Sync + 'static,
    ) -> Self {
        self.omega_deriv = Some(Arc::new(m));
        self
    }

    /// Constant function on `domain`.
    pub fn constant(c: T, domain: Interval<T>) -> Self {
        Self::from_fn(format!("const({c})"), domain, move |_| c)
            .with_deriv1(|_| T::zero())
            .with_deriv2(|_| T::zero())
            .with_tags(ShapeTags {
                convex: true,
                increasing: true,
                lipschitz: Some((T::zero(), T::one())),
                bounded: true,
                exp_growth: None,
            })
            .with_omega(|_, _, _| T::zero())
            .with_omega_deriv(|_, _, _| T::zero())
    }

    /// The constant function 1.
    pub fn one(domain: Interval<T>) -> Self {
        Self::constant(T::one(), domain)
    }

    /// Unchecked sample; operator kernels guarantee `t` stays in the domain.
    #[inline]
    pub fn sample(&self, t: T) -> T {
        (self.eval)(t)
    }

    /// Checked sample: domain membership and finiteness.
    pub fn eval(&self, t: T) -> Result<T> {
        if !self.domain.contains(t) {
            return Err(Error::Domain { x: t.as_f64(), domain: self.domain.to_string() });
        }
        let v = (self.eval)(t);
        if !v.is_finite() {
            return Err(Error::Evaluation { name: self.name.clone(), t: t.as_f64() });
        }
        Ok(v)
    }

    pub fn deriv1(&self) -> Option<&RealFn<T>> {
        self.deriv1.as_ref()
    }

    pub fn deriv2(&self) -> Option<&RealFn<T>> {
        self.deriv2.as_ref()
    }

    pub fn deriv1_at(&self, t: T) -> Result<T> {
        match &self.deriv1 {
            Some(d) => Ok(d(t)),
            None => Err(Error::MissingDerivative(self.name.clone())),
        }
    }

    pub fn deriv2_at(&self, t: T) -> Result<T> {
        match &self.deriv2 {
            Some(d) => Ok(d(t)),
            None => Err(Error::MissingDerivative(self.name.clone())),
        }
    }

    /// Analytic modulus bound `omega(f, delta)` on `[lo, hi]`, if recorded.
    pub fn omega_bound(&self, lo: T, hi: T, delta: T) -> Option<T> {
        self.omega.as_ref().map(|m| m(lo, hi, delta))
    }

    /// Analytic modulus bound for the first derivative.
    pub fn omega_deriv_bound(&self, lo: T, hi: T, delta: T) -> Option<T> {
        self.omega_deriv.as_ref().map(|m| m(lo, hi, delta))
    }

    /// The point composition `f_{alpha,x}(t) = f(alpha t + (1-alpha) x)`:
    /// a contraction of `f` toward `x`. Shape tags, growth membership and
    /// derivative metadata carry over with the appropriate rescaling.
    pub fn compose_alpha(&self, alpha: T, x: T) -> Result<ScalarFunction<T>> {
        if alpha < T::zero() || alpha > T::one() {
            return Err(Error::Parameter(format!(
                "compose_alpha requires alpha in [0,1], got {alpha}"
            )));
        }
        if !self.domain.contains(x) {
            return Err(Error::Domain { x: x.as_f64(), domain: self.domain.to_string() });
        }
        let one_minus = T::one() - alpha;
        let base = self.eval.clone();
        let eval: RealFn<T> = Arc::new(move |t| base(alpha * t + one_minus * x));
        let mut out = ScalarFunction {
            name: format!("({})_{{{},{}}}", self.name, alpha, x),
            eval,
            deriv1: self.deriv1.clone().map(|d| {
                let f: RealFn<T> =
                    Arc::new(move |t: T| alpha * d(alpha * t + one_minus * x));
                f
            }),
            deriv2: self.deriv2.clone().map(|d| {
                let f: RealFn<T> =
                    Arc::new(move |t: T| alpha * alpha * d(alpha * t + one_minus * x));
                f
            }),
            tags: self.tags.clone(),
            domain: self.domain,
            omega: None,
            omega_deriv: None,
        };
        if let Some((k, a)) = self.tags.lipschitz {
            out.tags.lipschitz = Some((k * alpha.powf(a), a));
        }
        Ok(out)
    }
}
