//! One-dimensional Gauss rules (Golub–Welsch) and small special-function
//! helpers shared by the quadrature grids.

use nalgebra::{DMatrix, SymmetricEigen};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Jacobi rule on [0, 1] for the weight (1−t)^a t^b, a, b > −1.
pub fn gauss_jacobi01(m: usize, a: f64, b: f64) -> Rule {
    assert!(m >= 1 && a > -1.0 && b > -1.0, "bad Gauss-Jacobi parameters");
    // Jacobi matrix on [-1,1] for (1-x)^a (1+x)^b; then t = (1+x)/2.
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jm[(k, k)] = if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if k + 1 < m {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let off2 = if j == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            jm[(k, k + 1)] = off2.sqrt();
            jm[(k + 1, k)] = off2.sqrt();
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, mu0 * v0 * v0 * 2f64.powf(-ab - 1.0))
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Gauss–Legendre rule on [lo, hi].
pub fn gauss_legendre(m: usize, lo: f64, hi: f64) -> Rule {
    let r = gauss_jacobi01(m, 0.0, 0.0);
    let len = hi - lo;
    Rule {
        nodes: r.nodes.iter().map(|t| lo + len * t).collect(),
        weights: r.weights.iter().map(|w| w * len).collect(),
    }
}

/// Gauss–Jacobi rule on [lo, hi] for the weight (hi − t)^a, rescaled so the
/// weights integrate (hi − t)^a exactly.
pub fn gauss_jacobi_right(m: usize, a: f64, lo: f64, hi: f64) -> Rule {
    let r = gauss_jacobi01(m, a, 0.0);
    let len = hi - lo;
    Rule {
        nodes: r.nodes.iter().map(|t| lo + len * t).collect(),
        weights: r.weights.iter().map(|w| w * len.powf(a + 1.0)).collect(),
    }
}

/// Equispaced nodes on the circle, normalized so the weights sum to 1.
/// Exact for trigonometric polynomials of degree < m.
pub fn trapezoid_circle(m: usize, offset: f64) -> Rule {
    let h = 2.0 * std::f64::consts::PI / m as f64;
    Rule {
        nodes: (0..m).map(|k| offset + h * k as f64).collect(),
        weights: vec![1.0 / m as f64; m],
    }
}

/// log of the Pochhammer-free ratio Γ(x+k)/Γ(x).
pub fn ln_rising(x: f64, k: f64) -> f64 {
    ln_gamma(x + k) - ln_gamma(x)
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
