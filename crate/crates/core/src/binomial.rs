//! Numerically stable binomial weights `C(n,k) s^k (1-s)^{n-k}`.
//!
//! The weight vector is anchored at the mode with a log-gamma evaluation and
//! extended to both sides with the exact multiplicative recurrence, so no
//! intermediate value under- or overflows even for large `n` or extreme `s`.

use crate::scalar::Real;

/// Lanczos approximation of `ln Gamma(x)` for `x > 0`, accurate to ~1e-14.
pub fn ln_gamma(x: f64) -> f64 {
    // g = 7, n = 9 coefficients (Godfrey's table).
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln C(n, k)`
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// All `n + 1` binomial weights `C(n,k) s^k (1-s)^{n-k}`, `k = 0..=n`.
///
/// `s` must already be in `[0,1]`; the endpoints produce exact point masses.
pub fn binomial_weights<T: Real>(n: usize, s: T) -> Vec<T> {
    let mut w = vec![T::zero(); n + 1];
    if s <= T::zero() {
        w[0] = T::one();
        return w;
    }
    if s >= T::one() {
        w[n] = T::one();
        return w;
    }
    if n == 0 {
        w[0] = T::one();
        return w;
    }

    let sf = s.as_f64();
    let q = T::one() - s;
    // Mode of the binomial distribution.
    let k0 = (((n + 1) as f64) * sf).floor().min(n as f64) as usize;
    let ln_anchor =
        ln_binomial(n, k0) + (k0 as f64) * sf.ln() + ((n - k0) as f64) * (1.0 - sf).ln();
    let anchor = T::of(ln_anchor.exp());
    w[k0] = anchor;

    // Downward: w[k-1] = w[k] * k / (n-k+1) * (1-s)/s.
    let mut cur = anchor;
    for k in (1..=k0).rev() {
        cur = cur * T::from_index(k) / T::from_index(n - k + 1) * q / s;
        w[k - 1] = cur;
    }
    // Upward: w[k+1] = w[k] * (n-k)/(k+1) * s/(1-s).
    cur = anchor;
    for k in k0..n {
        cur = cur * T::from_index(n - k) / T::from_index(k + 1) * s / q;
        w[k + 1] = cur;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_integers() {
        // Gamma(n) = (n-1)!
        let mut fact = 1.0f64;
        for n in 1..=20 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12, "n={n}");
            fact *= n as f64;
        }
        // large argument: ln Gamma(401) computed with mpmath
        assert!((ln_gamma(401.0) - 2000.5006979832414).abs() < 1e-9);
    }

    #[test]
    fn weights_sum_to_one() {
        for &(n, s) in &[(1usize, 0.3f64), (5, 0.5), (50, 0.01), (200, 0.9), (400, 0.999)] {
            let w = binomial_weights(n, s);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "n={n} s={s} sum={sum}");
        }
    }

    #[test]
    fn endpoint_point_masses() {
        let w0 = binomial_weights::<f64>(7, 0.0);
        assert_eq!(w0[0], 1.0);
        assert!(w0[1..].iter().all(|&v| v == 0.0));
        let w1 = binomial_weights::<f64>(7, 1.0);
        assert_eq!(w1[7], 1.0);
    }

    #[test]
    fn small_n_matches_direct_formula() {
        let s: f64 = 0.37;
        let w = binomial_weights(4, s);
        let direct = [
            (1.0 - s).powi(4),
            4.0 * s * (1.0 - s).powi(3),
            6.0 * s * s * (1.0 - s).powi(2),
            4.0 * s.powi(3) * (1.0 - s),
            s.powi(4),
        ];
        for (a, b) in w.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn extreme_s_does_not_underflow_to_zero_everywhere() {
        // (1-s)^n underflows here; the mode anchor keeps the vector alive.
        let w = binomial_weights::<f64>(400, 0.9);
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-11);
        assert!(w[360] > 0.0);
    }
}
