//! The built-in positive linear operator families `L_n` and their evaluation
//! primitive `L_n(f)(x)`.
//!
//! Discrete families (Bernstein, Bernstein-Schurer, Szasz-Mirakjan, Baskakov)
//! are summed with mode-anchored weight recurrences; the infinite series stop
//! once the remaining tail mass bound drops below `series_tol`. Integral
//! families (Kantorovich, Weierstrass, Post-Widder) use Gaussian rules that
//! are exact for polynomial test functions.

use crate::binomial::{binomial_weights, ln_gamma};
use crate::error::{Error, Result};
use crate::function::{RealFn, ScalarFunction};
use crate::interval::Interval;
use crate::quad::{gauss_hermite, gauss_laguerre_normalized, gauss_legendre};
use crate::scalar::Real;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Bernstein,
    /// Bernstein-Schurer with shift s = 1: degree n+1 weights, samples k/n.
    BernsteinSchurer,
    SzaszMirakjan,
    Baskakov,
    Kantorovich,
    Weierstrass,
    PostWidder,
}

impl Family {
    pub fn all() -> [Family; 7] {
        [
            Family::Bernstein,
            Family::BernsteinSchurer,
            Family::SzaszMirakjan,
            Family::Baskakov,
            Family::Kantorovich,
            Family::Weierstrass,
            Family::PostWidder,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Bernstein => "bernstein",
            Family::BernsteinSchurer => "bernstein_schurer",
            Family::SzaszMirakjan => "szasz_mirakjan",
            Family::Baskakov => "baskakov",
            Family::Kantorovich => "kantorovich",
            Family::Weierstrass => "weierstrass",
            Family::PostWidder => "post_widder",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::all().into_iter().find(|f| f.name() == s)
    }

    /// The five families satisfying `d/dx L_n(f) = n/p(x) L_n(psi_x f)`.
    pub fn is_exponential(&self) -> bool {
        !matches!(self, Family::Kantorovich | Family::BernsteinSchurer)
    }

    /// Default `(I, J)`: function domain and evaluation domain.
    pub fn domains<T: Real>(&self) -> (Interval<T>, Interval<T>) {
        match self {
            Family::Bernstein | Family::Kantorovich => {
                (Interval::unit(), Interval::unit())
            }
            Family::BernsteinSchurer => {
                (Interval::closed(T::zero(), T::of(2.0)), Interval::unit())
            }
            Family::SzaszMirakjan | Family::Baskakov | Family::PostWidder => {
                (Interval::nonneg(), Interval::nonneg())
            }
            Family::Weierstrass => (Interval::real_line(), Interval::real_line()),
        }
    }
}

/// Coefficient `p(x)` of an exponential family: the limit of `n L_n(psi_x^2)(x)`.
#[derive(Clone)]
pub struct ExponentialCoefficient<T: Real> {
    pub family: Family,
    p: RealFn<T>,
}

impl<T: Real> ExponentialCoefficient<T> {
    pub fn value(&self, x: T) -> T {
        (self.p)(x)
    }

    pub fn as_fn(&self) -> RealFn<T> {
        self.p.clone()
    }
}

/// An operator family instance with its domains and numerical parameters.
#[derive(Clone, Debug)]
pub struct OperatorInstance<T: Real> {
    pub family: Family,
    /// Function domain `I`.
    pub domain: Interval<T>,
    /// Evaluation domain `J`, a subinterval of `I`.
    pub eval_domain: Interval<T>,
    /// Tail mass bound for infinite series.
    pub series_tol: T,
    /// Gaussian nodes per integral (per cell for Kantorovich).
    pub quad_nodes: usize,
}

impl<T: Real> OperatorInstance<T> {
    pub fn new(family: Family) -> Self {
        let (domain, eval_domain) = family.domains();
        OperatorInstance { family, domain, eval_domain, series_tol: T::of(1e-12), quad_nodes: 64 }
    }

    pub fn with_series_tol(mut self, tol: T) -> Self {
        assert!(tol > T::zero());
        self.series_tol = tol;
        self
    }

    pub fn with_quad_nodes(mut self, m: usize) -> Self {
        assert!(m >= 1);
        self.quad_nodes = m;
        self
    }

    /// Evaluate `L_n(f)(x)`. `n = 0` is the identity restriction to `J`.
    pub fn apply(&self, n: usize, f: &ScalarFunction<T>, x: T) -> Result<T> {
        if !self.eval_domain.contains(x) {
            return Err(Error::Domain { x: x.as_f64(), domain: self.eval_domain.to_string() });
        }
        if n == 0 {
            return f.eval(x);
        }
        let value = match self.family {
            Family::Bernstein => self.bernstein(n, f, x),
            Family::BernsteinSchurer => self.bernstein_schurer(n, f, x),
            Family::SzaszMirakjan => self.szasz(n, f, x),
            Family::Baskakov => self.baskakov(n, f, x),
            Family::Kantorovich => self.kantorovich(n, f, x),
            Family::Weierstrass => self.weierstrass(n, f, x),
            Family::PostWidder => self.post_widder(n, f, x),
        };
        if !value.is_finite() {
            return Err(Error::Evaluation { name: f.name.clone(), t: x.as_f64() });
        }
        Ok(value)
    }

    /// The coefficient `p(x)` for the five exponential families.
    pub fn exponential_coefficient(&self) -> Result<ExponentialCoefficient<T>> {
        let p: RealFn<T> = match self.family {
            Family::Bernstein => Arc::new(|x: T| x * (T::one() - x)),
            Family::SzaszMirakjan => Arc::new(|x: T| x),
            Family::Baskakov => Arc::new(|x: T| x * (T::one() + x)),
            Family::Weierstrass => Arc::new(|_| T::one()),
            Family::PostWidder => Arc::new(|x: T| x * x),
            other => return Err(Error::UnsupportedFamily(other.name().to_string())),
        };
        Ok(ExponentialCoefficient { family: self.family, p })
    }

    fn bernstein(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        let w = binomial_weights(n, x);
        let nn = T::from_index(n);
        w.iter()
            .enumerate()
            .filter(|(_, &wk)| wk != T::zero())
            .map(|(k, &wk)| wk * f.sample(T::from_index(k) / nn))
            .sum()
    }

    fn bernstein_schurer(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        // degree n+1 weights, samples at k/n up to (n+1)/n <= 2
        let w = binomial_weights(n + 1, x);
        let nn = T::from_index(n);
        w.iter()
            .enumerate()
            .filter(|(_, &wk)| wk != T::zero())
            .map(|(k, &wk)| wk * f.sample(T::from_index(k) / nn))
            .sum()
    }

    fn szasz(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        let nn = T::from_index(n);
        let rate = nn * x;
        if rate <= T::zero() {
            return f.sample(T::zero());
        }
        let cutoff = self.series_tol * T::of(1e-3);
        let rate_f = rate.as_f64();
        let mode = rate_f.floor() as usize;
        let ln_anchor = (mode as f64) * rate_f.ln() - rate_f - ln_gamma(mode as f64 + 1.0);
        let anchor = T::of(ln_anchor.exp());

        let mut acc = anchor * f.sample(T::from_index(mode) / nn);
        // downward from the mode: w_{k-1} = w_k * k / rate
        let mut wk = anchor;
        let mut k = mode;
        while k >= 1 {
            wk = wk * T::from_index(k) / rate;
            k -= 1;
            acc += wk * f.sample(T::from_index(k) / nn);
            if wk == T::zero() {
                break;
            }
            let r = T::from_index(k) / rate;
            if r < T::one() && wk * r / (T::one() - r) < cutoff {
                break;
            }
        }
        // upward: w_{k+1} = w_k * rate / (k+1)
        wk = anchor;
        k = mode;
        loop {
            wk = wk * rate / T::from_index(k + 1);
            k += 1;
            acc += wk * f.sample(T::from_index(k) / nn);
            let r = rate / T::from_index(k + 1);
            if wk == T::zero() || (r < T::one() && wk * r / (T::one() - r) < cutoff) {
                break;
            }
        }
        acc
    }

    fn baskakov(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        let nn = T::from_index(n);
        if x <= T::zero() {
            return f.sample(T::zero());
        }
        let theta = x / (T::one() + x);
        let cutoff = self.series_tol * T::of(1e-3);
        let nf = n as f64;
        let xf = x.as_f64();
        let theta_f = xf / (1.0 + xf);
        // negative binomial mode ~ (n-1) x
        let mode = (((nf - 1.0) * xf).floor().max(0.0)) as usize;
        let ln_anchor = ln_gamma(nf + mode as f64) - ln_gamma(mode as f64 + 1.0)
            - ln_gamma(nf)
            + (mode as f64) * theta_f.ln()
            + nf * (1.0 - theta_f).ln();
        let anchor = T::of(ln_anchor.exp());

        let mut acc = anchor * f.sample(T::from_index(mode) / nn);
        // downward: w_{k-1} = w_k * k / ((n+k-1) theta)
        let mut wk = anchor;
        let mut k = mode;
        while k >= 1 {
            wk = wk * T::from_index(k) / (T::from_index(n + k - 1) * theta);
            k -= 1;
            acc += wk * f.sample(T::from_index(k) / nn);
            if wk == T::zero() {
                break;
            }
            let r = T::from_index(k) / (T::from_index(n + k - 1) * theta);
            if r < T::one() && wk * r / (T::one() - r) < cutoff {
                break;
            }
        }
        // upward: w_{k+1} = w_k * (n+k)/(k+1) * theta
        wk = anchor;
        k = mode;
        loop {
            wk = wk * T::from_index(n + k) / T::from_index(k + 1) * theta;
            k += 1;
            acc += wk * f.sample(T::from_index(k) / nn);
            let r = T::from_index(n + k) / T::from_index(k + 1) * theta;
            if wk == T::zero() || (r < T::one() && wk * r / (T::one() - r) < cutoff) {
                break;
            }
        }
        acc
    }

    fn kantorovich(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        // K_n(f)(x) = (n+1) sum_k p_{n,k}(x) int_{k/(n+1)}^{(k+1)/(n+1)} f
        // with the classical (n+1)-cell indexing.
        let w = binomial_weights(n, x);
        let rule = gauss_legendre(self.quad_nodes);
        let cells = T::from_index(n + 1);
        let half = (T::one() / cells) * T::of(0.5);
        let mut acc = T::zero();
        for (k, &wk) in w.iter().enumerate() {
            if wk == T::zero() {
                continue;
            }
            let center = (T::from_index(2 * k + 1)) / (T::of(2.0) * cells);
            let mut cell = T::zero();
            for (u, gw) in rule.nodes.iter().zip(&rule.weights) {
                cell += T::of(*gw) * f.sample(center + half * T::of(*u));
            }
            // (n+1) * (cell_len/2) * sum = sum / 2 since cell_len = 1/(n+1)
            acc += wk * cell * T::of(0.5);
        }
        acc
    }

    fn weierstrass(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        // Gaussian kernel with variance 1/n; Gauss-Hermite substitution
        // t = x + u sqrt(2/n).
        let rule = gauss_hermite(self.quad_nodes);
        let scale = (T::of(2.0) / T::from_index(n)).sqrt();
        let inv_sqrt_pi = T::of(1.0 / std::f64::consts::PI.sqrt());
        let mut acc = T::zero();
        for (u, gw) in rule.nodes.iter().zip(&rule.weights) {
            acc += T::of(*gw) * f.sample(x + scale * T::of(*u));
        }
        acc * inv_sqrt_pi
    }

    fn post_widder(&self, n: usize, f: &ScalarFunction<T>, x: T) -> T {
        // Gamma(n, x/n) kernel; x = 0 degenerates to the point mass at 0.
        if x <= T::zero() {
            return f.sample(T::zero());
        }
        let rule = gauss_laguerre_normalized(self.quad_nodes, n as f64 - 1.0);
        let scale = x / T::from_index(n);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(u, v)| T::of(*v) * f.sample(scale * T::of(*u)))
            .sum()
    }
}
