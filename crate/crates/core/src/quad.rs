//! Gaussian quadrature rules via Golub-Welsch (eigenvalues of the Jacobi
//! matrix). Rules are computed in `f64` and cached; callers convert nodes and
//! weights into their scalar type.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};


#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Nodes = eigenvalues of the symmetric tridiagonal Jacobi matrix,
/// weights = `mu0 * (first eigenvector component)^2`.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> QuadRule {
    let m = diag.len();
    debug_assert_eq!(offdiag.len(), m - 1);
    let mut j = DMatrix::<f64>::zeros(m, m);
    for (i, &d) in diag.iter().enumerate() {
        j[(i, i)] = d;
    }
    for (i, &b) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = b;
        j[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let q0 = eig.eigenvectors[(0, i)];
            (node, mu0 * q0 * q0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    QuadRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

type Cache = Mutex<HashMap<(usize, u64), Arc<QuadRule>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: u64, m: usize, build: impl FnOnce() -> QuadRule) -> Arc<QuadRule> {
    let mut map = cache().lock().unwrap();
    map.entry((m, kind)).or_insert_with(|| Arc::new(build())).clone()
}

/// Gauss-Legendre on `[-1, 1]`; weights sum to 2.
pub fn gauss_legendre(m: usize) -> Arc<QuadRule> {
    assert!(m >= 1);
    cached(0, m, || {
        let diag = vec![0.0; m];
        let offdiag: Vec<f64> = (1..m)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        golub_welsch(&diag, &offdiag, 2.0)
    })
}

/// Gauss-Hermite with weight `exp(-x^2)`; weights sum to `sqrt(pi)`.
pub fn gauss_hermite(m: usize) -> Arc<QuadRule> {
    assert!(m >= 1);
    cached(1, m, || {
        let diag = vec![0.0; m];
        let offdiag: Vec<f64> = (1..m).map(|k| (k as f64 / 2.0).sqrt()).collect();
        golub_welsch(&diag, &offdiag, std::f64::consts::PI.sqrt())
    })
}

/// Generalized Gauss-Laguerre with weight `x^alpha exp(-x)`, normalized so
/// the weights sum to 1 (i.e. divided by `Gamma(alpha + 1)`), which is the
/// form needed for probability-kernel integrals.
pub fn gauss_laguerre_normalized(m: usize, alpha: f64) -> Arc<QuadRule> {
    assert!(m >= 1 && alpha > -1.0);
    cached(2 + alpha.to_bits(), m, || {
        let diag: Vec<f64> = (0..m).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let offdiag: Vec<f64> = (1..m)
            .map(|k| {
                let k = k as f64;
                (k * (k + alpha)).sqrt()
            })
            .collect();
        golub_welsch(&diag, &offdiag, 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::ln_gamma;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(8);
        // int_{-1}^{1} x^k dx
        for k in 0..=15usize {
            let got: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-13, "k={k} got={got}");
        }
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(16);
        let pi = std::f64::consts::PI;
        let m0: f64 = r.weights.iter().sum();
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        assert!((m0 - pi.sqrt()).abs() < 1e-12);
        assert!((m2 - pi.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_gamma_moments() {
        // With weight x^alpha e^{-x}/Gamma(alpha+1): mean = alpha+1,
        // E[x^2] = (alpha+1)(alpha+2). Large alpha exercises the Post-Widder path.
        for &alpha in &[0.0f64, 3.0, 99.0, 399.0] {
            let r = gauss_laguerre_normalized(64, alpha);
            let m0: f64 = r.weights.iter().sum();
            let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x).sum();
            let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
            assert!((m0 - 1.0).abs() < 1e-12, "alpha={alpha}");
            assert!((m1 - (alpha + 1.0)).abs() / (alpha + 1.0) < 1e-12, "alpha={alpha}");
            let want = (alpha + 1.0) * (alpha + 2.0);
            assert!((m2 - want).abs() / want < 1e-11, "alpha={alpha}");
        }
    }

    #[test]
    fn ln_gamma_is_available_for_weights() {
        // smoke check that the binomial helper and quadrature agree on scale
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
    }
}
