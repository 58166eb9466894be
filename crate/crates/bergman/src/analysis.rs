//! Forelli–Rudin integrals J_{b,c}, the operator T, convolution with
//! h^{γ/2} on the group, and decay of wavelet coefficients.
//!
//! Rotation invariance reduces every J_{b,c} on the ball of ℂⁿ to a disc
//! integral: with s = c − g,
//!
//! ```text
//! J_{b,c}(t e₁) = n!Γ(s+1)/Γ(s+n) ∫_D (1−|u|²)^{s+n−1} |1 − t u|^{−(b+c)} dA(u)/π
//! ```
//!
//! evaluated in polar coordinates: a radial rule in |u|² graded toward 1
//! (Gauss–Jacobi on the last interval) and an angular rule graded toward
//! the peak at arg u = 0.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{schur_window, DomainParams, rational};
use crate::geometry::{h_group, h_point, norm2, GroupElement};
use crate::holo::{CoeffFunction, QuadratureGrid};
use crate::quad::{gauss_jacobi_right, gauss_legendre, linear_fit, ln_gamma, Rule};
use crate::rep::{formal_dimension, wavelet, GroupFunctionSampled};
use crate::{Error, Result};

/// Rule orders of the Forelli–Rudin quadrature.
#[derive(Debug, Clone, Copy)]
pub struct FrQuadrature {
    pub radial_order: usize,
    pub angular_order: usize,
}

impl Default for FrQuadrature {
    fn default() -> Self {
        FrQuadrature { radial_order: 16, angular_order: 12 }
    }
}

impl FrQuadrature {
    fn doubled(&self) -> FrQuadrature {
        FrQuadrature { radial_order: 2 * self.radial_order, angular_order: 2 * self.angular_order }
    }
}

/// A(a) = (1/2π) ∫ |1 − a e^{iφ}|^{−2λ} dφ for 0 ≤ a < 1, by Gauss–Legendre
/// on [0, π] with intervals doubling away from the peak width 1 − a.
fn angular_mean(a: f64, lam: f64, rules: &[Rule]) -> f64 {
    let pi = std::f64::consts::PI;
    let mut s = 0.0;
    for r in rules {
        for (phi, w) in r.nodes.iter().zip(&r.weights) {
            let m = 1.0 + a * a - 2.0 * a * phi.cos();
            s += w * m.powf(-lam);
        }
    }
    s / pi
}

fn angular_rules(a: f64, order: usize) -> Vec<Rule> {
    let pi = std::f64::consts::PI;
    let delta = ((1.0 - a) / 2.0).max(1e-14);
    let mut rules = Vec::new();
    let mut lo = 0.0;
    let mut hi = delta.min(pi);
    loop {
        rules.push(gauss_legendre(order, lo, hi));
        if hi >= pi {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(pi);
    }
    rules
}

/// I(t) = ∫_D (1−|u|²)^e |1 − t u|^{−2λ} dA(u)/π = ∫_0^1 (1−s)^e A(t√s) ds.
fn disc_profile_integral(t: f64, e: f64, lam: f64, q: FrQuadrature) -> f64 {
    // singular point s = 1/t² sits at distance 1/t² − 1 beyond the end
    let gap = if t > 0.0 { (1.0 / (t * t) - 1.0).max(1e-15) } else { 1.0 };
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut lo = 0.0;
    let mut width = 0.5;
    while width > gap / 4.0 && width > 1e-13 {
        pieces.push((lo, 1.0 - width));
        lo = 1.0 - width;
        width /= 2.0;
    }
    let mut total = 0.0;
    let eval = |s: f64| {
        let a = t * s.sqrt();
        angular_mean(a, lam, &angular_rules(a, q.angular_order))
    };
    for (a, b) in pieces {
        let r = gauss_legendre(q.radial_order, a, b);
        total += r.nodes.iter().zip(&r.weights).map(|(s, w)| w * (1.0 - s).powf(e) * eval(*s)).sum::<f64>();
    }
    let r = gauss_jacobi_right(q.radial_order, e, lo, 1.0);
    total += r.nodes.iter().zip(&r.weights).map(|(s, w)| w * eval(*s)).sum::<f64>();
    total
}

/// J_{b,c}(t e₁) on the ball of ℂⁿ (n = 1: the disc), normalized dz.
pub fn forelli_rudin_value(n: usize, b: f64, c: f64, t: f64, q: FrQuadrature) -> Result<f64> {
    let g = n as f64 + 1.0;
    if !(c > g - 1.0) {
        return Err(Error::Precondition(format!("c = {c} must exceed g - 1 = {}", g - 1.0)));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::NotInterior(t));
    }
    let s = c - g;
    let nf = n as f64;
    let pre = (ln_gamma(nf + 1.0) + ln_gamma(s + 1.0) - ln_gamma(s + nf)).exp();
    Ok(pre * disc_profile_integral(t, s + nf - 1.0, (b + c) / 2.0, q))
}

/// Fit of J = A + C·h^{−s} through the boundary samples, relative residuals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticFit {
    pub a: f64,
    pub c: f64,
    pub s: f64,
    pub residual: f64,
}

pub fn fit_power_model(h: &[f64], j: &[f64]) -> AsymptoticFit {
    let solve = |s: f64| -> AsymptoticFit {
        // weighted least squares in (A, C) with weights 1/J
        let (mut saa, mut sac, mut scc, mut sa, mut sc) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (hi, ji) in h.iter().zip(j) {
            let w = 1.0 / (ji * ji);
            let x = hi.powf(-s);
            saa += w;
            sac += w * x;
            scc += w * x * x;
            sa += w * ji;
            sc += w * ji * x;
        }
        let det = saa * scc - sac * sac;
        let (a, c) = if det.abs() > 1e-300 { ((sa * scc - sc * sac) / det, (saa * sc - sac * sa) / det) } else { (sa / saa, 0.0) };
        let residual = h.iter().zip(j).map(|(hi, ji)| ((a + c * hi.powf(-s) - ji) / ji).powi(2)).sum::<f64>().sqrt();
        AsymptoticFit { a, c, s, residual }
    };
    let mut best = solve(0.0);
    let mut s = -3.0;
    while s <= 6.0 {
        let f = solve(s);
        if f.residual < best.residual {
            best = f;
        }
        s += 0.01;
    }
    // golden-section refinement around the grid minimum
    let (mut lo, mut hi) = (best.s - 0.01, best.s + 0.01);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if solve(m1).residual < solve(m2).residual {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let refined = solve(0.5 * (lo + hi));
    if refined.residual <= best.residual {
        refined
    } else {
        best
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ForelliRudinReport {
    pub n: usize,
    pub b: f64,
    pub c: f64,
    /// (t, J_{b,c}(t e₁))
    pub samples: Vec<(f64, f64)>,
    /// least-squares slope of log J against log h over samples with t ≥ 0.9
    pub fitted_slope: f64,
    /// max/min of J over samples with t ≥ 0.9
    pub max_min_ratio: f64,
    /// J ≈ A + C h^{−s} through the same samples
    pub model: AsymptoticFit,
    /// −s of the model: the exponent of h in the growth of J
    pub asymptotic_slope: f64,
    /// the model exponent is negative, i.e. J tends to a finite limit
    pub bounded_verdict: bool,
    /// the value at the largest t moved by more than 1e-8 (relative) when the
    /// rule orders were doubled
    pub saturated: bool,
    /// the theorem's threshold −(r−1)a/2
    pub threshold: f64,
}

pub const FR_BOUNDARY_RADII: [f64; 4] = [0.9, 0.99, 0.995, 0.999];

/// J_{b,c} along t·e₁ for the given radii, with the boundedness verdict.
pub fn forelli_rudin(b: f64, c: f64, t_list: &[f64], d: &DomainParams) -> Result<ForelliRudinReport> {
    if !d.is_rank_one() {
        return Err(Error::Precondition("Forelli-Rudin quadrature is implemented on the disc and balls".into()));
    }
    let n = d.n as usize;
    let q = FrQuadrature::default();
    let vals: Vec<f64> =
        t_list.par_iter().map(|&t| forelli_rudin_value(n, b, c, t, q)).collect::<Result<Vec<f64>>>()?;
    let samples: Vec<(f64, f64)> = t_list.iter().copied().zip(vals).collect();
    let tail: Vec<(f64, f64)> = samples.iter().copied().filter(|(t, _)| *t >= 0.9 - 1e-12).collect();
    let (fitted_slope, max_min_ratio, model) = if tail.len() >= 3 {
        let lh: Vec<f64> = tail.iter().map(|(t, _)| (1.0 - t * t).ln()).collect();
        let lj: Vec<f64> = tail.iter().map(|(_, j)| j.ln()).collect();
        let hs: Vec<f64> = tail.iter().map(|(t, _)| 1.0 - t * t).collect();
        let js: Vec<f64> = tail.iter().map(|(_, j)| *j).collect();
        let mx = js.iter().cloned().fold(f64::MIN, f64::max);
        let mn = js.iter().cloned().fold(f64::MAX, f64::min);
        (linear_fit(&lh, &lj).0, mx / mn, fit_power_model(&hs, &js))
    } else {
        (f64::NAN, f64::NAN, AsymptoticFit { a: f64::NAN, c: f64::NAN, s: f64::NAN, residual: f64::NAN })
    };
    let saturated = match t_list.iter().cloned().fold(None::<f64>, |m, t| Some(m.map_or(t, |m| m.max(t)))) {
        Some(tmax) => {
            let a = forelli_rudin_value(n, b, c, tmax, q)?;
            let b2 = forelli_rudin_value(n, b, c, tmax, q.doubled())?;
            (a - b2).abs() > 1e-8 * b2.abs()
        }
        None => false,
    };
    Ok(ForelliRudinReport {
        n,
        b,
        c,
        samples,
        fitted_slope,
        max_min_ratio,
        model,
        asymptotic_slope: -model.s,
        bounded_verdict: model.s < 0.0,
        saturated,
        threshold: -num_traits::ToPrimitive::to_f64(&d.half_ra()).unwrap(),
    })
}

/// Closed form on the disc and balls, used as an oracle:
/// J_{b,c}(t e₁) = ₂F₁(λ, λ; c; t²)/c_c with λ = (b+c)/2 and
/// c_c = Γ(c)/(n!Γ(c−n)).
pub fn forelli_rudin_closed_form(n: usize, b: f64, c: f64, t: f64) -> f64 {
    let lam = (b + c) / 2.0;
    let x = t * t;
    // the series converges slowly near x = 1; fine for the oracle range
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 0.0f64;
    while term.abs() > 1e-17 * sum.abs() && k < 2e6 {
        term *= (lam + k) * (lam + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        k += 1.0;
    }
    sum / formal_dimension(n, c)
}

/// Tf(z) = ∫ f(w)|h(z,w)|^{−γ} h(w)^{γ−g} dw with f given at the nodes of a
/// grid with α = γ (so the grid weight carries h^{γ−g}·c_γ).
pub fn apply_t(f_values: &[f64], grid: &QuadratureGrid, gamma: f64, at: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    if (grid.alpha - gamma).abs() > 1e-12 {
        return Err(Error::Precondition("apply_t needs a grid with alpha = gamma".into()));
    }
    if f_values.len() != grid.len() {
        return Err(Error::Dimension("one value per grid node".into()));
    }
    let inv_c = 1.0 / grid.c_alpha;
    Ok(at
        .par_iter()
        .map(|z| {
            (0..grid.len())
                .map(|i| grid.weights[i] * f_values[i] * h_point(z, grid.point(i)).norm().powf(-gamma))
                .sum::<f64>()
                * inv_c
        })
        .collect())
}

/// Operator-norm probe of T on L^p_α over the bank h^{−s_k},
/// s_k = s_max(1 − 2^{−k}), k = 1..=10, where s_max = min((α−g+1)/p, γ−g+1)
/// is the smaller of the two integrability limits. T h^{−s} = J_{s,γ−s}.
#[derive(Debug, Clone, Serialize)]
pub struct SchurReport {
    pub p: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub in_window: bool,
    pub exponents: Vec<f64>,
    /// ‖T f_s‖_{L^p_α} / ‖f_s‖_{L^p_α}
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// last ratio over first ratio
    pub growth: f64,
}

pub fn schur_probe(p: f64, alpha: f64, gamma: f64, d: &DomainParams) -> Result<SchurReport> {
    if !d.is_rank_one() {
        return Err(Error::Precondition("Schur probe is implemented on the disc and balls".into()));
    }
    let n = d.n as usize;
    let g = n as f64 + 1.0;
    if !(alpha > g - 1.0) || !(gamma > g - 1.0) {
        return Err(Error::Precondition("need alpha, gamma > g - 1".into()));
    }
    let in_window = schur_window(rational(p)?, rational(gamma)?, d)?.contains(rational(alpha)?);
    let s_max = ((alpha - g + 1.0) / p).min(gamma - g + 1.0);
    let exponents: Vec<f64> = (1..=10).map(|k| s_max * (1.0 - 0.5f64.powi(k))).collect();
    let q = FrQuadrature::default();
    let ratios: Vec<f64> = exponents
        .par_iter()
        .map(|&s| -> Result<f64> {
            // ‖f_s‖^p = c_α/c_{α−sp}; ‖T f_s‖^p = c_α ∫ (J h^s)^p h^{α−g−sp} dz
            let e = alpha - g - s * p;
            let f_norm_p = formal_dimension(n, alpha) / formal_dimension(n, alpha - s * p);
            let rule = crate::quad::gauss_jacobi01(24, e, n as f64 - 1.0);
            let mut acc = 0.0;
            for (t2, w) in rule.nodes.iter().zip(&rule.weights) {
                let jv = forelli_rudin_value(n, s, gamma - s, t2.sqrt(), q)?;
                acc += w * (jv * (1.0 - t2).powf(s)).powf(p);
            }
            let tf_norm_p = formal_dimension(n, alpha) * n as f64 * acc;
            Ok((tf_norm_p / f_norm_p).powf(1.0 / p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let growth = ratios.last().unwrap() / ratios[0];
    Ok(SchurReport { p, alpha, gamma, in_window, exponents, ratios, max_ratio, growth })
}

/// T(h^{−ε})/h^{−ε} = J_{ε,γ−ε}·h^ε along t·e₁: the test function of the
/// Schur argument is reproduced up to a bounded factor.
#[derive(Debug, Clone, Serialize)]
pub struct SchurArtifact {
    pub epsilon: f64,
    pub samples: Vec<(f64, f64)>,
    pub max_min_ratio: f64,
}

pub fn schur_artifact(epsilon: f64, gamma: f64, radii: &[f64], n: usize) -> Result<SchurArtifact> {
    let q = FrQuadrature::default();
    let samples = radii
        .par_iter()
        .map(|&t| Ok((t, forelli_rudin_value(n, epsilon, gamma - epsilon, t, q)? * (1.0 - t * t).powf(epsilon))))
        .collect::<Result<Vec<_>>>()?;
    let mx = samples.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    let mn = samples.iter().map(|s| s.1).fold(f64::MAX, f64::min);
    Ok(SchurArtifact { epsilon, samples, max_min_ratio: mx / mn })
}

/// F ∗ h^{γ/2} at the probes for right-K-invariant F sampled on a section
/// grid, computed twice: directly with h(y⁻¹x) from group products, and
/// through h(y⁻¹x) = h(z)h(w)/|h(z,w)|², i.e.
/// h(x)^{γ/2}·∫ F̃(w) h(w)^{−γ/2} |h(x·o,w)|^{−γ} h(w)^{γ−g} dw.
#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionReport {
    pub direct: Vec<f64>,
    pub reduced: Vec<f64>,
    pub max_rel_diff: f64,
}

pub fn convolution_cgamma(f: &GroupFunctionSampled, gamma: f64, probes: &[GroupElement]) -> Result<ConvolutionReport> {
    if f.points.iter().any(|p| p.theta != 0.0) {
        return Err(Error::Precondition("convolution_cgamma expects a section grid".into()));
    }
    let ys: Vec<GroupElement> = f.points.iter().map(|p| p.element()).collect();
    let direct: Vec<f64> = probes
        .par_iter()
        .map(|x| {
            ys.iter()
                .zip(&f.weights)
                .zip(&f.values)
                .map(|((y, w), v)| w * v.re * h_group(x, y).powf(gamma / 2.0))
                .sum()
        })
        .collect();
    let reduced: Vec<f64> = probes
        .par_iter()
        .map(|x| {
            let z = x.origin_image();
            let hz = 1.0 - norm2(&z);
            let s: f64 = f
                .points
                .iter()
                .zip(&f.weights)
                .zip(&f.values)
                .map(|((pt, w), v)| {
                    // Haar weight = dz-weight·h^{−g}; the h^{±g} cancel here
                    let hw = pt.h();
                    w * v.re * hw.powf(gamma / 2.0) * h_point(&z, &pt.w).norm().powf(-gamma)
                })
                .sum();
            hz.powf(gamma / 2.0) * s
        })
        .collect();
    let max_rel_diff = direct
        .iter()
        .zip(&reduced)
        .map(|(a, b)| if a.abs() + b.abs() > 0.0 { (a - b).abs() / a.abs().max(b.abs()) } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(ConvolutionReport { direct, reduced, max_rel_diff })
}

/// |W_u(v)(x)| against h(x)^{γ/2} and against (h^{γ/2} ∗ h^{γ/2})(x) =
/// h(x)^{γ/2}·J_{0,γ}(x·o).
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub ratio_polynomial: Vec<f64>,
    pub ratio_general: Vec<f64>,
    pub max_over_median: f64,
    /// slope of log|W| against log h over the probes with |x·o| ≥ 0.9
    pub empirical_exponent: f64,
}

pub fn decay_check(u: &CoeffFunction, v: &CoeffFunction, probes: &[GroupElement]) -> Result<DecayReport> {
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(Error::Precondition("decay_check needs nonzero vectors".into()));
    }
    let gamma = u.gamma;
    let n = u.n;
    let rows: Vec<(f64, f64, f64, f64)> = probes
        .par_iter()
        .map(|x| -> Result<(f64, f64, f64, f64)> {
            let w = wavelet(v, u, x)?.norm();
            let z = x.origin_image();
            let r = norm2(&z).sqrt();
            let h = 1.0 - r * r;
            let hp = h.powf(gamma / 2.0);
            let conv = hp * forelli_rudin_value(n, 0.0, gamma, r, FrQuadrature::default())?;
            Ok((r, w / hp, w / conv, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratio_polynomial: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let mut sorted = ratio_polynomial.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let max_over_median = sorted.last().unwrap() / median;
    let tail: Vec<&(f64, f64, f64, f64)> = rows.iter().filter(|r| r.0 >= 0.9 && r.3 > 0.0).collect();
    let empirical_exponent = if tail.len() >= 2 {
        let lh: Vec<f64> = tail.iter().map(|r| (1.0 - r.0 * r.0).ln()).collect();
        let lw: Vec<f64> = tail.iter().map(|r| r.3.ln()).collect();
        linear_fit(&lh, &lw).0
    } else {
        f64::NAN
    };
    Ok(DecayReport {
        radii: rows.iter().map(|r| r.0).collect(),
        ratio_polynomial,
        ratio_general: rows.iter().map(|r| r.2).collect(),
        max_over_median,
        empirical_exponent,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainKind};
    use approx::assert_relative_eq;

    // mpmath, disc, c = 3
    const ORACLE: [(f64, [f64; 5]); 3] = [
        (-0.5, [0.57764262577901941, 0.99489394712821606, 1.5992094187902007, 1.7250575365270971, 1.9178298278997522]),
        (0.5, [0.66700425097783823, 2.2824432500379959, 11.336494998526774, 17.272179099929561, 42.894703661315705]),
        (2.0, [0.90886541002062994, 15.130531524045576, 1422.3331241676109, 5673.6387533717575, 141542.69096927648]),
    ];

    #[test]
    fn disc_values_match_oracle() {
        let q = FrQuadrature::default();
        for (b, vals) in ORACLE {
            assert_relative_eq!(forelli_rudin_value(1, b, 3.0, 0.0, q).unwrap(), 0.5, max_relative = 1e-13);
            for (t, v) in [0.5, 0.9, 0.99, 0.995, 0.999].iter().zip(vals) {
                assert_relative_eq!(forelli_rudin_value(1, b, 3.0, *t, q).unwrap(), v, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn ball_values_match_oracle() {
        let q = FrQuadrature::default();
        assert_relative_eq!(forelli_rudin_value(2, 1.0, 4.0, 0.5, q).unwrap(), 0.51874270601207452, max_relative = 1e-10);
        assert_relative_eq!(forelli_rudin_value(2, 1.0, 4.0, 0.9, q).unwrap(), 3.5480510242605463, max_relative = 1e-10);
        // at the origin J = 1/c_c
        assert_relative_eq!(forelli_rudin_value(2, 0.3, 4.0, 0.0, q).unwrap(), 1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn closed_form_agrees() {
        let q = FrQuadrature::default();
        for (n, b, c, t) in [(1, 0.25, 3.0, 0.7), (2, -0.5, 3.5, 0.6), (3, 1.5, 5.0, 0.8)] {
            let a = forelli_rudin_value(n, b, c, t, q).unwrap();
            assert_relative_eq!(a, forelli_rudin_closed_form(n, b, c, t), max_relative = 1e-11);
        }
    }

    #[test]
    fn power_model_recovers_exponent() {
        let h: Vec<f64> = FR_BOUNDARY_RADII.iter().map(|t| 1.0 - t * t).collect();
        let j: Vec<f64> = h.iter().map(|x| 2.0 + 0.7 * x.powf(-1.3)).collect();
        let fit = fit_power_model(&h, &j);
        assert!((fit.s - 1.3).abs() < 1e-6, "{fit:?}");
        let j: Vec<f64> = h.iter().map(|x| 3.0 - 1.5 * x.powf(0.4)).collect();
        assert!((fit_power_model(&h, &j).s + 0.4).abs() < 1e-6);
    }

    #[test]
    fn verdicts_on_the_disc() {
        let d = make_domain(DomainKind::Disc).unwrap();
        let r = forelli_rudin(-0.5, 3.0, &FR_BOUNDARY_RADII, &d).unwrap();
        assert!(r.bounded_verdict && !r.saturated);
        let r = forelli_rudin(1.0, 3.0, &FR_BOUNDARY_RADII, &d).unwrap();
        assert!(!r.bounded_verdict);
        assert!((r.asymptotic_slope + 1.0).abs() < 0.1, "{}", r.asymptotic_slope);
    }

    #[test]
    fn t_is_positive_and_matches_j() {
        let grid = QuadratureGrid::for_degree(1, 4.0, 24).unwrap();
        let ones = vec![1.0; grid.len()];
        let at = vec![vec![Complex64::new(0.3, 0.1)], vec![Complex64::new(0.0, -0.5)]];
        let tf = apply_t(&ones, &grid, 4.0, &at).unwrap();
        for (z, v) in at.iter().zip(&tf) {
            let exact = forelli_rudin_value(1, 0.0, 4.0, z[0].norm(), FrQuadrature::default()).unwrap();
            assert_relative_eq!(*v, exact, max_relative = 1e-8);
        }
        let nonneg: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[0].re.abs()).collect();
        assert!(apply_t(&nonneg, &grid, 4.0, &at).unwrap().iter().all(|v| *v >= 0.0));
    }
}
