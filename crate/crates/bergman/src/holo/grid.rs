use num_complex::Complex64;
use rayon::prelude::*;

use super::{basis, monomial, norm_table, CoeffFunction, Evaluator};
use crate::quad::{gauss_jacobi01, trapezoid_circle};
use crate::{Error, Result};

/// Product rule for ∫_D f dμ_α on the disc or ball.
///
/// Radius: s = ‖z‖² with Gauss–Jacobi weight (1−s)^{α−g} s^{n−1}, so the
/// boundary behaviour of h^{α−g} is integrated exactly. Directions on the
/// simplex by collapsed Gauss–Jacobi rules, angles by trapezoid rules.
/// Weights include c_α, which is fixed by requiring ∫ 1 dμ_α = 1.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub n: usize,
    pub alpha: f64,
    pub radial_order: usize,
    pub angular_order: usize,
    /// node coordinates, n per node
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub c_alpha: f64,
}

/// Unit vectors u with weights for the normalized surface measure of the
/// sphere in ℂⁿ: |u_j|² = τ_j on the simplex (collapsed Gauss–Jacobi of
/// order `simplex_order`), arg u_j on a trapezoid of order `angular_order`.
pub(crate) fn sphere_rule(n: usize, simplex_order: usize, angular_order: usize) -> Vec<(Vec<Complex64>, f64)> {
    let mut dirs: Vec<(Vec<f64>, f64)> = vec![(vec![], 1.0)];
    for k in 1..n {
        let rule = gauss_jacobi01(simplex_order, (n - 1 - k) as f64, 0.0);
        let mut next = Vec::new();
        for (tau, w) in &dirs {
            let used: f64 = tau.iter().sum();
            for (v, wv) in rule.nodes.iter().zip(&rule.weights) {
                let mut t = tau.clone();
                t.push((1.0 - used) * v);
                next.push((t, w * wv));
            }
        }
        dirs = next;
    }
    // the simplex has volume 1/(n−1)!
    let simplex_norm: f64 = (1..n).map(|k| k as f64).product();
    let ang = trapezoid_circle(angular_order, 0.0);
    let n_ang = angular_order.pow(n as u32);
    let mut out = Vec::with_capacity(dirs.len() * n_ang);
    for (mut tau, w) in dirs {
        let used: f64 = tau.iter().sum();
        tau.push((1.0 - used).max(0.0));
        for a in 0..n_ang {
            let mut rest = a;
            let u = tau
                .iter()
                .map(|tj| {
                    let phi = ang.nodes[rest % angular_order];
                    rest /= angular_order;
                    Complex64::from_polar(tj.sqrt(), phi)
                })
                .collect();
            out.push((u, w * simplex_norm / n_ang as f64));
        }
    }
    out
}

impl QuadratureGrid {
    pub fn new(n: usize, alpha: f64, radial_order: usize, angular_order: usize) -> Result<QuadratureGrid> {
        let g = n as f64 + 1.0;
        if !(alpha > g - 1.0) {
            return Err(Error::Precondition(format!("alpha = {alpha} must exceed g - 1 = {}", g - 1.0)));
        }
        let rad = gauss_jacobi01(radial_order, alpha - g, n as f64 - 1.0);
        let dirs = sphere_rule(n, radial_order, angular_order);
        let mut points = Vec::with_capacity(rad.len() * dirs.len() * n);
        let mut weights = Vec::with_capacity(rad.len() * dirs.len());
        for (s, ws) in rad.nodes.iter().zip(&rad.weights) {
            let r = s.sqrt();
            for (u, wu) in &dirs {
                points.extend(u.iter().map(|c| c * r));
                // dz = n·s^{n−1} ds dσ(u)
                weights.push(ws * wu * n as f64);
            }
        }
        let total: f64 = weights.iter().sum();
        let c_alpha = 1.0 / total;
        weights.iter_mut().for_each(|w| *w *= c_alpha);
        Ok(QuadratureGrid { n, alpha, radial_order, angular_order, points, weights, c_alpha })
    }

    /// Default grid for functions of degree ≤ N: radial order N + 8 and
    /// angular order 2N + 8.
    pub fn for_degree(n: usize, alpha: f64, degree: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(n, alpha, degree + 8, 2 * degree + 8)
    }

    /// Smallest grid exact for all products z^m·conj(z^m') with |m|, |m'| ≤ N,
    /// plus a margin: N/2 + 5 Gauss nodes and N + 4 angles.
    pub fn certification(n: usize, alpha: f64, degree: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(n, alpha, degree / 2 + 5, degree + 4)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn integrate(&self, f: impl Fn(&[Complex64]) -> Complex64 + Sync) -> Complex64 {
        let parts: Vec<Complex64> =
            (0..self.len()).into_par_iter().map(|i| f(self.point(i)) * self.weights[i]).collect();
        parts.iter().sum()
    }

    pub fn integrate_real(&self, f: impl Fn(&[Complex64]) -> f64 + Sync) -> f64 {
        let parts: Vec<f64> = (0..self.len()).into_par_iter().map(|i| f(self.point(i)) * self.weights[i]).collect();
        parts.iter().sum()
    }

    /// Max deviation of ∫ ψ_m conj(ψ_m') dμ_γ from δ_{mm'} for a grid with
    /// α = γ. All diagonal entries plus every pair up to degree `full_pairs`
    /// and the pairs (m, m') with m' the successor of m in basis order.
    pub fn certify_monomials(&self, degree: usize, full_pairs: usize) -> f64 {
        let b = basis(self.n, degree);
        let norms = norm_table(self.n, degree, self.alpha);
        let vals: Vec<Vec<Complex64>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let z = self.point(i);
                b.indices.iter().zip(&norms).map(|(m, nm)| monomial(z, m) / nm).collect()
            })
            .collect();
        let small = b.offsets[full_pairs.min(degree) + 1];
        let mut pairs: Vec<(usize, usize)> = (0..small).flat_map(|i| (0..small).map(move |j| (i, j))).collect();
        pairs.extend((0..b.len()).map(|i| (i, i)));
        pairs.extend((0..b.len() - 1).map(|i| (i, i + 1)));
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let s: Complex64 = vals.iter().zip(&self.weights).map(|(v, w)| v[i] * v[j].conj() * w).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                (s - target).norm()
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// (∫ |f|^p dμ_α)^{1/p} on a grid.
#[derive(Debug, Clone, Copy)]
pub struct LpNorm {
    pub value: f64,
    /// top-degree coefficients carry more than 1e-8 of the total mass
    pub tail_warning: bool,
}

pub fn lp_alpha_norm(f: &CoeffFunction, p: f64, grid: &QuadratureGrid) -> Result<LpNorm> {
    if f.n != grid.n {
        return Err(Error::Dimension("function and grid dimensions differ".into()));
    }
    let ev = Evaluator::new(f);
    let s = grid.integrate_real(|z| ev.eval(z).norm().powf(p));
    let slices = f.slice_norms();
    let total: f64 = slices.iter().map(|s| s * s).sum();
    let top = slices.last().map_or(0.0, |s| s * s);
    Ok(LpNorm { value: s.powf(1.0 / p), tail_warning: f.degree > 0 && top > 1e-8 * total })
}

impl QuadratureGrid {
    pub fn lp_alpha_norm(&self, f: &CoeffFunction, p: f64) -> Result<LpNorm> {
        lp_alpha_norm(f, p, self)
    }
}
