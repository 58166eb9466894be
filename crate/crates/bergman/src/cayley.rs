//! Transfer between the disc D and the upper half-plane U.
//!
//! c : U → D is c(z) = (z − i)/(z + i), with inverse c⁻¹(w) = i(1 + w)/(1 − w),
//! the Möbius map of [[i, i], [−1, 1]]. Kernels, measures and the
//! representation on U are all defined by transfer:
//!
//! - K_U(z,w) = J(c,z)^{γ/g}·conj(J(c,w)^{γ/g})·K_γ(cz, cw),
//! - dμ_{U,α} = c_α h_U^{α−g} dA/π with h_U(z) = |J(c,z)|^{−2/g} h(cz) = 2 Im z,
//! - C_{α,p} f(z) = J(c,z)^{2α/(pg)} f(cz),
//! - τ_γ(x) = C_{γ,2} π_γ(x) C_{γ,2}⁻¹.
//!
//! Powers of J use the logarithms ln 2 + iπ/2 − 2 Log(z + i) and
//! ln 2 + iπ/2 − 2 Log(1 − w). They are holomorphic on U and D
//! respectively, and they add to exactly zero along w = cz, so C⁻¹C = id.
//! The principal logarithm of J(c,z) itself jumps inside U.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::Su11;
use crate::holo::{CoeffFunction, QuadratureGrid};
use crate::quad::{gauss_legendre, ln_gamma, trapezoid_circle};
use crate::{Error, Result};

const G: f64 = 2.0;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn ln2_ipi2() -> Complex64 {
    Complex64::new(std::f64::consts::LN_2, std::f64::consts::FRAC_PI_2)
}

/// c(z) = (z − i)/(z + i).
pub fn cayley(z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) || !z.re.is_finite() {
        return Err(Error::Precondition(format!("{z} is not in the upper half-plane")));
    }
    Ok((z - i()) / (z + i()))
}

/// c⁻¹(w) = i(1 + w)/(1 − w).
pub fn cayley_inv(w: Complex64) -> Result<Complex64> {
    if !(w.norm() < 1.0) {
        return Err(Error::NotInterior(w.norm()));
    }
    Ok(i() * (one() + w) / (one() - w))
}

/// log J(c, z) for z ∈ U.
pub fn log_j_c(z: Complex64) -> Complex64 {
    ln2_ipi2() - 2.0 * (z + i()).ln()
}

/// log J(c⁻¹, w) for w ∈ D.
pub fn log_j_c_inv(w: Complex64) -> Complex64 {
    ln2_ipi2() - 2.0 * (one() - w).ln()
}

pub fn j_c(z: Complex64) -> Complex64 {
    log_j_c(z).exp()
}

pub fn j_c_inv(w: Complex64) -> Complex64 {
    log_j_c_inv(w).exp()
}

/// h_U(z) = |J(c,z)|^{−2/g}·h(cz).
pub fn h_u(z: Complex64) -> Result<f64> {
    let w = cayley(z)?;
    Ok(j_c(z).norm().powf(-2.0 / G) * (1.0 - w.norm_sqr()))
}

/// K_U(z, w) for weight γ, through the transformation rule.
pub fn kernel_u(z: Complex64, w: Complex64, gamma: f64) -> Result<Complex64> {
    let (cz, cw) = (cayley(z)?, cayley(w)?);
    let s = gamma / G;
    let jj = (s * log_j_c(z)).exp() * (s * log_j_c(w)).exp().conj();
    Ok(jj * (-gamma * (one() - cz * cw.conj()).ln()).exp())
}

/// C_{α,p} f at a point of U.
pub fn transfer_at(f: &CoeffFunction, alpha: f64, p: f64, z: Complex64) -> Result<Complex64> {
    let w = cayley(z)?;
    Ok((2.0 * alpha / (p * G) * log_j_c(z)).exp() * f.eval(&[w]))
}

/// C_{α,p} f as a function on U.
pub fn transfer(f: &CoeffFunction, alpha: f64, p: f64) -> Result<impl Fn(Complex64) -> Result<Complex64> + Sync + '_> {
    if f.n != 1 {
        return Err(Error::Dimension("the half-plane transfer is for the disc".into()));
    }
    if !(alpha > G - 1.0) {
        return Err(Error::Precondition(format!("alpha = {alpha} must exceed g - 1")));
    }
    Ok(move |z| transfer_at(f, alpha, p, z))
}

/// C⁻¹_{α,p} F(w) = J(c⁻¹,w)^{2α/(pg)}·F(c⁻¹w).
pub fn transfer_inv_at(big_f: impl Fn(Complex64) -> Result<Complex64>, alpha: f64, p: f64, w: Complex64) -> Result<Complex64> {
    let z = cayley_inv(w)?;
    Ok((2.0 * alpha / (p * G) * log_j_c_inv(w)).exp() * big_f(z)?)
}

/// τ_γ(x)F = C_{γ,2} π_γ(x) C_{γ,2}⁻¹ F, composed pointwise.
pub fn tau_at(x: &Su11, big_f: impl Fn(Complex64) -> Result<Complex64>, gamma: f64, z: Complex64) -> Result<Complex64> {
    let w = cayley(z)?;
    let xi = x.inv();
    let u = xi.act(w);
    // π(x)h(w) = j(x⁻¹, w)·h(x⁻¹w) with h = C⁻¹F
    let pih = xi.j_gamma(w, gamma) * transfer_inv_at(&big_f, gamma, 2.0, u)?;
    Ok((gamma / G * log_j_c(z)).exp() * pih)
}

/// The ψ = 1 atom on U: conj(J(c⁻¹x, o)^{γ/g})·K_U(z, c⁻¹x·o).
pub fn unbounded_cr_atom(x: &Su11, gamma: f64, z: Complex64) -> Result<Complex64> {
    let w0 = x.origin_image();
    let zi = cayley_inv(w0)?;
    let lj = log_j_c_inv(w0) + x.log_jacobian(Complex64::new(0.0, 0.0));
    Ok((gamma / G * lj).exp().conj() * kernel_u(z, zi, gamma)?)
}

/// Quadrature for dμ_{U,α}: the image under c⁻¹ of a disc rule for dμ_α,
/// with weights carrying |J(c⁻¹,w)|²·(h_U/h)^{α−g}.
#[derive(Debug, Clone)]
pub struct UGrid {
    pub alpha: f64,
    pub nodes: Vec<Complex64>,
    pub disc_nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub disc_weights: Vec<f64>,
    /// disc radius of the region covered; 1 for the full grid
    pub radius: f64,
}

impl UGrid {
    fn from_disc(alpha: f64, disc_nodes: Vec<Complex64>, disc_weights: Vec<f64>, radius: f64) -> Result<UGrid> {
        let mut nodes = Vec::with_capacity(disc_nodes.len());
        let mut weights = Vec::with_capacity(disc_nodes.len());
        for (w, om) in disc_nodes.iter().zip(&disc_weights) {
            let z = cayley_inv(*w)?;
            let jac = j_c_inv(*w).norm_sqr();
            let ratio = j_c(z).norm().powf(-2.0 * (alpha - G) / G);
            nodes.push(z);
            weights.push(om * jac * ratio);
        }
        Ok(UGrid { alpha, nodes, disc_nodes, weights, disc_weights, radius })
    }

    /// Image of the full disc grid.
    pub fn full(alpha: f64, radial_order: usize, angular_order: usize) -> Result<UGrid> {
        let g = QuadratureGrid::new(1, alpha, radial_order, angular_order)?;
        UGrid::from_disc(alpha, g.points.clone(), g.weights.clone(), 1.0)
    }

    /// Image of a Gauss–Legendre rule in |w|² ∈ [0, R²]: the truncated
    /// region c⁻¹{|w| ≤ R}, a hyperbolic disc around i.
    pub fn truncated(alpha: f64, radius: f64, radial_order: usize, angular_order: usize) -> Result<UGrid> {
        if !(alpha > G - 1.0) || !(0.0..1.0).contains(&radius) {
            return Err(Error::Precondition("need alpha > g - 1 and 0 <= radius < 1".into()));
        }
        let c_alpha = (ln_gamma(alpha) - ln_gamma(alpha - 1.0)).exp();
        let rad = gauss_legendre(radial_order, 0.0, radius * radius);
        let ang = trapezoid_circle(angular_order, 0.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (s, ws) in rad.nodes.iter().zip(&rad.weights) {
            for (phi, wa) in ang.nodes.iter().zip(&ang.weights) {
                nodes.push(Complex64::from_polar(s.sqrt(), *phi));
                // dA/π = ds dφ/(2π); the angular rule integrates dφ/2π
                weights.push(c_alpha * (1.0 - s).powf(alpha - G) * ws * wa);
            }
        }
        UGrid::from_disc(alpha, nodes, weights, radius)
    }

    /// A rule on U itself for the same region: c⁻¹{|w| ≤ R} is the Euclidean
    /// disc with center i(1+R²)/(1−R²) and radius 2R/(1−R²). Gauss–Legendre
    /// in log y, then in u with x = (y+1)·tan u, which flattens the
    /// |z+i|^{−2α} decay of transferred functions. No map to the disc is
    /// involved, so it cross-checks `truncated`.
    pub fn half_plane(alpha: f64, radius: f64, radial_order: usize, angular_order: usize) -> Result<UGrid> {
        if !(alpha > G - 1.0) || !(0.0..1.0).contains(&radius) {
            return Err(Error::Precondition("need alpha > g - 1 and 0 <= radius < 1".into()));
        }
        let c_alpha = (ln_gamma(alpha) - ln_gamma(alpha - 1.0)).exp();
        let r2 = radius * radius;
        let yc = (1.0 + r2) / (1.0 - r2);
        let rho = 2.0 * radius / (1.0 - r2);
        let (y_lo, y_hi) = ((yc - rho).max(1e-300), yc + rho);
        let rule_t = gauss_legendre(radial_order, y_lo.ln(), y_hi.ln());
        let unit = gauss_legendre(angular_order, -1.0, 1.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (t, wt) in rule_t.nodes.iter().zip(&rule_t.weights) {
            let y = t.exp();
            let half = (rho * rho - (y - yc).powi(2)).max(0.0).sqrt();
            let s = y + 1.0;
            let umax = (half / s).atan();
            for (v, wv) in unit.nodes.iter().zip(&unit.weights) {
                let (u, wu) = (v * umax, wv * umax);
                let x = s * u.tan();
                nodes.push(Complex64::new(x, y));
                let dxdy = y * wt * s / u.cos().powi(2) * wu;
                weights.push(c_alpha * (2.0 * y).powf(alpha - G) * dxdy / std::f64::consts::PI);
            }
        }
        let disc_nodes = nodes.iter().map(|z| cayley(*z)).collect::<Result<Vec<_>>>()?;
        let disc_weights = nodes
            .iter()
            .zip(&weights)
            .map(|(z, w)| w * j_c(*z).norm().powf(2.0 + 2.0 * (alpha - G) / G))
            .collect();
        Ok(UGrid { alpha, nodes, disc_nodes, weights, disc_weights, radius })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ |F|^p dμ_{U,α} over the grid region.
    pub fn lp_integral(&self, big_f: impl Fn(Complex64) -> Result<Complex64> + Sync, p: f64) -> Result<f64> {
        let parts: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(&self.weights)
            .map(|(z, w)| Ok(big_f(*z)?.norm().powf(p) * w))
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum())
    }

    /// ∫ |f|^p dμ_α over the disc nodes.
    pub fn disc_lp_integral(&self, f: &CoeffFunction, p: f64) -> f64 {
        self.disc_nodes.iter().zip(&self.disc_weights).map(|(w, om)| f.eval(&[*w]).norm().powf(p) * om).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub alpha: f64,
    pub p: f64,
    pub radius: f64,
    /// ∫_{c⁻¹(|w|≤R)} |C_{α,p}f|^p dμ_{U,α}
    pub u_integral: f64,
    /// ∫_{|w|≤R} |f|^p dμ_α
    pub disc_region: f64,
    /// ‖f‖^p_{A^p_α(D)}
    pub disc_full: f64,
    /// 1 − disc_region/disc_full
    pub truncation_mass: f64,
    /// |u_integral − disc_region|/disc_full
    pub residual: f64,
    pub truncation_warning: bool,
}

/// Compares the U-side integral of C_{α,p}f over the truncated region with
/// the disc integral over the corresponding region.
pub fn isometry_check(f: &CoeffFunction, alpha: f64, p: f64, radius: f64, radial_order: usize, angular_order: usize) -> Result<IsometryReport> {
    let cf = transfer(f, alpha, p)?;
    let u_integral = UGrid::half_plane(alpha, radius, 4 * radial_order, 2 * angular_order)?.lp_integral(&cf, p)?;
    let disc_region = UGrid::truncated(alpha, radius, radial_order, angular_order)?.disc_lp_integral(f, p);
    let full = QuadratureGrid::new(1, alpha, f.degree * (1 + p.ceil() as usize) / 2 + 16, (p.ceil() as usize + 1) * f.degree + 16)?;
    let disc_full = full.lp_alpha_norm(f, p)?.value.powf(p);
    let truncation_mass = 1.0 - disc_region / disc_full;
    Ok(IsometryReport {
        alpha,
        p,
        radius,
        u_integral,
        disc_region,
        disc_full,
        truncation_mass,
        residual: (u_integral - disc_region).abs() / disc_full,
        truncation_warning: truncation_mass > 0.01,
    })
}

/// ‖C f − C f̂‖/‖C f‖ in L^p(U, μ_{U,α}), computed on the half-plane rule
/// of radius R. Compare with the disc-side error of f̂.
pub fn transferred_rel_error(f: &CoeffFunction, f_hat: &CoeffFunction, alpha: f64, p: f64, radius: f64, radial_order: usize, angular_order: usize) -> Result<f64> {
    let ug = UGrid::half_plane(alpha, radius, radial_order, angular_order)?;
    let diff = f.sub(f_hat);
    let cf = transfer(f, alpha, p)?;
    let cd = transfer(&diff, alpha, p)?;
    let base = ug.lp_integral(&cf, p)?;
    if base == 0.0 {
        return Ok(0.0);
    }
    Ok((ug.lp_integral(&cd, p)? / base).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn base_points_and_round_trip() {
        assert!(cayley(i()).unwrap().norm() < 1e-16);
        assert!((cayley_inv(c(0.0, 0.0)).unwrap() - i()).norm() < 1e-16);
        let mut rng = crate::rng(5);
        for _ in 0..100 {
            let w = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(-3.2..3.2));
            let z = cayley_inv(w).unwrap();
            assert!(z.im > 0.0);
            assert!((cayley(z).unwrap() - w).norm() < 1e-12 * (1.0 + z.norm()));
        }
        for t in [1e-6, 1e6] {
            assert!(cayley(c(0.0, t)).unwrap().norm() > 1.0 - 1e-5);
        }
        assert!(cayley(c(1.0, 0.0)).is_err());
        assert!(cayley_inv(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn jacobians() {
        let mut rng = crate::rng(6);
        for _ in 0..100 {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.01..5.0));
            // J(c,z) = 2i/(z+i)² and the logs cancel exactly along w = cz
            let exact = 2.0 * i() / ((z + i()) * (z + i()));
            assert!((j_c(z) - exact).norm() < 1e-12 * exact.norm());
            let w = cayley(z).unwrap();
            assert!((log_j_c(z) + log_j_c_inv(w)).norm() < 1e-13);
            assert_relative_eq!(h_u(z).unwrap(), 2.0 * z.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn kernel_identities() {
        let z = c(0.3, 0.7);
        let w = c(-1.2, 2.0);
        for gamma in [2.0, 3.0, 3.7] {
            let a = kernel_u(z, w, gamma).unwrap();
            let b = kernel_u(w, z, gamma).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm());
            assert_relative_eq!(kernel_u(i(), i(), gamma).unwrap().norm(), 0.5f64.powf(gamma), max_relative = 1e-12);
        }
    }

    #[test]
    fn truncated_mass_of_one() {
        let one_f = CoeffFunction::constant(1, 0, 2.0, one());
        let r = isometry_check(&one_f, 2.0, 2.0, 0.995, 48, 64).unwrap();
        assert_relative_eq!(r.disc_region, 0.995f64.powi(2), max_relative = 1e-12);
        assert!(r.disc_region >= 0.99 && r.residual < 1e-5, "{r:?}");
        let r = isometry_check(&one_f, 3.0, 1.0, 0.9, 48, 64).unwrap();
        assert_relative_eq!(r.disc_region, 1.0 - 0.19f64.powi(2), max_relative = 1e-12);
        assert!(r.truncation_warning);
    }
}
