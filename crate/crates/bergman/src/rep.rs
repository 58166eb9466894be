//! The discrete series π_γ(x)f(z) = j_γ(x⁻¹, z)·f(x⁻¹·z), wavelet
//! coefficients W_ψ(f)(x) = ⟨f, π_γ(x)ψ⟩, sampled functions on the group and
//! twisted convolution.
//!
//! With the branch of `geometry`, π(x)π(y) = conj σ(x,y)·π(xy). Twisted
//! convolution and left translation carry the matching factor, so that
//! W_ψ(f) # W_ψ(ψ) = W_ψ(f) for ‖ψ‖² = d_γ.
//!
//! Haar measure on G is pinned by ∫_G f = ∫_D f̃ h^{−g} dz for right-K-invariant
//! f, with dz the normalized volume. In polar coordinates x = x_w·k this is
//! dx = h(w)^{−g} dz(w) dk with dk the probability measure on K. On the disc
//! k_θ = diag(e^{iθ}, e^{−iθ}), θ ∈ (−π, π].

use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{cocycle_sigma, norm2, sigma_su11, GroupElement, Su11};
use crate::holo::{norm_table, reexpand, sphere_rule, CoeffFunction, Reexpansion};
use crate::quad::{gauss_jacobi01, linear_fit, ln_gamma, Rule};
use crate::{Error, Result};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// How `apply_rep` computes the coefficients of π(x)f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepMethod {
    /// Sample on tori and re-expand by FFT (disc and ball).
    Fft,
    /// Exact power-series composition, disc only.
    Series,
}

/// π_γ(x)f truncated at the degree of f, by sampled re-expansion.
pub fn apply_rep(x: &GroupElement, f: &CoeffFunction) -> Result<Reexpansion> {
    apply_rep_to(x, f, f.degree)
}

pub fn apply_rep_to(x: &GroupElement, f: &CoeffFunction, degree: usize) -> Result<Reexpansion> {
    if x.dim() != f.n {
        return Err(Error::Dimension(format!("group of dim {} acting on functions of dim {}", x.dim(), f.n)));
    }
    let xi = x.inverse();
    let ev = crate::holo::Evaluator::new(f);
    let gamma = f.gamma;
    Ok(reexpand(f.n, degree, gamma, |z| {
        // sample radii stay inside the ball, so the action is defined
        let y = xi.act(z).expect("interior sample point");
        xi.j_gamma(z, gamma) * ev.eval(&y)
    }))
}

/// Which path `apply_rep_with` took and whether re-expansion flagged a
/// truncation failure (never for the series path).
pub fn apply_rep_with(x: &GroupElement, f: &CoeffFunction, degree: usize, method: RepMethod) -> Result<Reexpansion> {
    match method {
        RepMethod::Fft => apply_rep_to(x, f, degree),
        RepMethod::Series => {
            let s = Su11::from_group(x)?;
            let g = apply_rep_series(&s, f, degree)?;
            Ok(Reexpansion { f: g, mismatch: 0.0, tail_fraction: 0.0, truncation_failed: false })
        }
    }
}

/// π_γ(x)f on the disc, exact modulo z^{N+1}.
///
/// With y = x⁻¹ = [[a, b], [b̄, ā]], u = b̄/ā and r(z) = (b/ā + (a/ā)z)/(1 + uz),
/// π(x)f(z) = exp(−γ Log ā)·(1 + uz)^{−γ}·f(r(z)). f∘r is built by Horner
/// in truncated power series, then multiplied by the binomial series.
pub fn apply_rep_series(x: &Su11, f: &CoeffFunction, degree: usize) -> Result<CoeffFunction> {
    if f.n != 1 {
        return Err(Error::Dimension("series path is for the disc".into()));
    }
    let gamma = f.gamma;
    let y = x.inv();
    let d = y.a.conj();
    let u = y.b.conj() / d;
    let p0 = y.b / d;
    let p1 = y.a / d;
    let plain = f.to_plain();
    let len = degree + 1;
    let mut s = vec![zero(); len];
    let mut t = vec![zero(); len];
    for a in plain.iter().rev() {
        // s ← s·(p0 + p1 z)/(1 + uz) + a
        t[0] = p0 * s[0];
        for j in 1..len {
            t[j] = p0 * s[j] + p1 * s[j - 1];
        }
        s[0] = t[0];
        for j in 1..len {
            s[j] = t[j] - u * s[j - 1];
        }
        s[0] += a;
    }
    let mut e = vec![zero(); len];
    e[0] = Complex64::new(1.0, 0.0);
    for k in 1..len {
        e[k] = e[k - 1] * (-u) * ((gamma + k as f64 - 1.0) / k as f64);
    }
    let pre = (-gamma * d.ln()).exp();
    let norms = norm_table(1, degree, gamma);
    let coeffs = (0..len)
        .map(|k| {
            let mut c = zero();
            for j in 0..=k {
                c += e[j] * s[k - j];
            }
            c * pre * norms[k]
        })
        .collect();
    Ok(CoeffFunction { gamma, n: 1, degree, coeffs })
}

/// W_ψ(f)(x) = ⟨f, π_γ(x)ψ⟩. Only coefficients up to the degree of f enter,
/// so on the disc this is exact for polynomial f.
pub fn wavelet(f: &CoeffFunction, psi: &CoeffFunction, x: &GroupElement) -> Result<Complex64> {
    let pxpsi = if f.n == 1 {
        apply_rep_series(&Su11::from_group(x)?, psi, f.degree)?
    } else {
        apply_rep_to(x, psi, f.degree)?.f
    };
    crate::holo::pairing(f, &pxpsi)
}

/// Disc fast path of `wavelet`.
pub fn wavelet_su11(f: &CoeffFunction, psi: &CoeffFunction, x: &Su11) -> Result<Complex64> {
    let pxpsi = apply_rep_series(x, psi, f.degree)?;
    crate::holo::pairing(f, &pxpsi)
}

/// ψ = 1: π(x)1 = j_γ(x⁻¹, 0)·K_γ(·, x·0), hence
/// W_1(f)(x) = conj(j_γ(x⁻¹, 0))·f(x·0).
pub fn wavelet_const(f: &CoeffFunction, x: &GroupElement) -> Complex64 {
    let n = x.dim();
    let j = x.inverse().j_gamma(&vec![zero(); n], f.gamma);
    j.conj() * f.eval(&x.origin_image())
}

/// ∫_G |W_1(1)|² dx = 1/d_γ, and |W_1(1)| = h^{γ/2}, so d_γ = 1/∫ h^{γ−g} dz
/// = Γ(γ)/(n!Γ(γ−n)). On the disc this is γ − 1.
pub fn formal_dimension(n: usize, gamma: f64) -> f64 {
    (ln_gamma(gamma) - ln_gamma(n as f64 + 1.0) - ln_gamma(gamma - n as f64)).exp()
}

/// Rescales ψ to ‖ψ‖² = d_γ, the normalization of the reproducing identity.
pub fn normalize_psi(psi: &CoeffFunction) -> Result<CoeffFunction> {
    let nrm = psi.norm();
    if !(nrm > 0.0) {
        return Err(Error::Precondition("analyzing vector must be nonzero".into()));
    }
    Ok(psi.scale(Complex64::new(formal_dimension(psi.n, psi.gamma).sqrt() / nrm, 0.0)))
}

/// Polar coordinates x = x_w·k_θ of a group point. Off the disc θ is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupPoint {
    pub w: Vec<Complex64>,
    pub theta: f64,
}

impl GroupPoint {
    pub fn element(&self) -> GroupElement {
        let xw = GroupElement::transvection(&self.w).expect("interior point");
        if self.theta == 0.0 {
            xw
        } else {
            xw.mul(&GroupElement::disc_rotation(self.theta))
        }
    }

    pub fn su11(&self) -> Su11 {
        Su11::polar(self.w[0], self.theta)
    }

    pub fn h(&self) -> f64 {
        1.0 - norm2(&self.w)
    }
}

/// Product rule for ∫_G over D × K. Radius t = ‖w‖² by Gauss–Jacobi with
/// weight (1−t)^β t^{n−1}, directions by `sphere_rule`, K-fibers (disc only)
/// by a trapezoid in θ. One θ-node at 0 gives the section grid, exact for
/// right-K-invariant integrands.
#[derive(Debug, Clone)]
pub struct GroupGrid {
    pub n: usize,
    pub beta: f64,
    pub radial: Rule,
    pub directions: Vec<(Vec<Complex64>, f64)>,
    pub thetas: Vec<f64>,
    pub points: Vec<GroupPoint>,
    pub weights: Vec<f64>,
}

impl GroupGrid {
    pub fn new(n: usize, beta: f64, radial_order: usize, angular_order: usize, theta_order: usize) -> Result<GroupGrid> {
        if !(beta > -1.0) {
            return Err(Error::Precondition(format!("radial exponent {beta} must exceed -1")));
        }
        if theta_order == 0 || (n > 1 && theta_order > 1) {
            return Err(Error::Precondition("K-fibers are sampled on the disc only".into()));
        }
        let g = n as f64 + 1.0;
        let radial = gauss_jacobi01(radial_order, beta, n as f64 - 1.0);
        let directions = sphere_rule(n, radial_order, angular_order);
        let thetas: Vec<f64> = if theta_order == 1 {
            vec![0.0]
        } else {
            let pi = std::f64::consts::PI;
            (0..theta_order).map(|k| -pi + 2.0 * pi * (k as f64 + 0.5) / theta_order as f64).collect()
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (t, wt) in radial.nodes.iter().zip(&radial.weights) {
            let r = t.sqrt();
            for (u, wu) in &directions {
                let w: Vec<Complex64> = u.iter().map(|c| c * r).collect();
                let haar = wt * wu * n as f64 * (1.0 - t).powf(-g - beta) / thetas.len() as f64;
                for &theta in &thetas {
                    points.push(GroupPoint { w: w.clone(), theta });
                    weights.push(haar);
                }
            }
        }
        Ok(GroupGrid { n, beta, radial, directions, thetas, points, weights })
    }

    pub fn section(n: usize, beta: f64, radial_order: usize, angular_order: usize) -> Result<GroupGrid> {
        GroupGrid::new(n, beta, radial_order, angular_order, 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Relative error of Σ w h^s against ∫_G h^s dx = 1/c_s for s > n.
    pub fn haar_residual(&self, s: f64) -> f64 {
        haar_residual(&self.points, &self.weights, self.n, s)
    }

    pub fn sample(&self, f: impl Fn(&GroupPoint) -> Complex64 + Sync) -> GroupFunctionSampled {
        let values = self.points.par_iter().map(&f).collect();
        GroupFunctionSampled { n: self.n, points: self.points.clone(), weights: self.weights.clone(), values }
    }
}

fn haar_residual(points: &[GroupPoint], weights: &[f64], n: usize, s: f64) -> f64 {
    let got: f64 = points.iter().zip(weights).map(|(p, w)| w * p.h().powf(s)).sum();
    let exact = 1.0 / formal_dimension(n, s);
    (got - exact).abs() / exact
}

/// Values of a function on G at weighted sample points.
#[derive(Debug, Clone, Serialize)]
pub struct GroupFunctionSampled {
    pub n: usize,
    pub points: Vec<GroupPoint>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// One output row: (w_re, w_im, θ, value_re, value_im, haar_weight). The
/// first coordinate of w on the ball.
pub type SampleRow = (f64, f64, f64, f64, f64, f64);

impl GroupFunctionSampled {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// (Σ w |F|^p h^e)^{1/p}.
    pub fn lp_norm(&self, p: f64, weight_exp: f64) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((pt, w), v)| w * v.norm().powf(p) * pt.h().powf(weight_exp))
            .sum();
        s.powf(1.0 / p)
    }

    pub fn rows(&self) -> Vec<SampleRow> {
        self.points
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((pt, w), v)| (pt.w[0].re, pt.w[0].im, pt.theta, v.re, v.im, *w))
            .collect()
    }

    pub fn haar_residual(&self, s: f64) -> f64 {
        haar_residual(&self.points, &self.weights, self.n, s)
    }
}

/// ‖W‖_{L^p_e(G)} with a tail diagnostic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroupNorm {
    pub value: f64,
    /// log-log slope of the radial density at t = 1 − 10^{−k}, k = 2..5
    pub tail_slope: f64,
    /// the radial density decays no faster than (1−t)^{−1}
    pub divergent: bool,
}

/// (∫_G |W(x)|^p h(x)^e dx)^{1/p} on a group grid, and the radial tail check.
pub fn group_lp_norm(
    w: impl Fn(&GroupPoint) -> Complex64 + Sync,
    p: f64,
    weight_exp: f64,
    grid: &GroupGrid,
) -> GroupNorm {
    let parts: Vec<f64> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(pt, wt)| wt * w(pt).norm().powf(p) * pt.h().powf(weight_exp))
        .collect();
    let value = parts.iter().sum::<f64>().powf(1.0 / p);
    let g = grid.n as f64 + 1.0;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for k in 2..=5 {
        let eps = 10f64.powi(-k);
        let r = (1.0 - eps).sqrt();
        let mut dens = 0.0;
        for (u, wu) in &grid.directions {
            let pw: Vec<Complex64> = u.iter().map(|c| c * r).collect();
            for &theta in &grid.thetas {
                let pt = GroupPoint { w: pw.clone(), theta };
                dens += wu * w(&pt).norm().powf(p) / grid.thetas.len() as f64;
            }
        }
        dens *= eps.powf(weight_exp - g);
        if dens > 0.0 && dens.is_finite() {
            lx.push(eps.ln());
            ly.push(dens.ln());
        }
    }
    let tail_slope = if lx.len() >= 2 { linear_fit(&lx, &ly).0 } else { f64::INFINITY };
    GroupNorm { value, tail_slope, divergent: tail_slope <= -1.0 }
}

/// F #_γ G at the probe points:
/// Σ_y w_y F(y)·G(y⁻¹x)·conj σ_γ(y, y⁻¹x).
///
/// Fails when the weights of F do not integrate h^s correctly for the
/// certification exponents s = γ and s = g + 1.5.
pub fn twisted_convolution(
    f: &GroupFunctionSampled,
    kernel: impl Fn(&GroupElement) -> Complex64 + Sync,
    gamma: f64,
    probes: &[GroupElement],
) -> Result<Vec<Complex64>> {
    let g = f.n as f64 + 1.0;
    for s in [gamma, g + 1.5] {
        let res = f.haar_residual(s);
        if !(res < 1e-6) {
            return Err(Error::Precondition(format!("Haar certification failed: residual {res:.3e} at s = {s}")));
        }
    }
    let ys: Vec<GroupElement> = f.points.par_iter().map(|p| p.element()).collect();
    let disc = f.n == 1;
    let ys11: Vec<Su11> = if disc { f.points.iter().map(|p| p.su11()).collect() } else { vec![] };
    Ok(probes
        .par_iter()
        .map(|x| {
            let mut acc = zero();
            if disc {
                let x11 = Su11::from_group(x).expect("disc probe in SU(1,1)");
                for ((y, fw), v) in ys11.iter().zip(&f.weights).zip(&f.values) {
                    if *v == zero() {
                        continue;
                    }
                    let yx = y.inv().mul(&x11);
                    acc += v * fw * kernel(&yx.to_group()) * sigma_su11(y, &yx, gamma).conj();
                }
            } else {
                for ((y, fw), v) in ys.iter().zip(&f.weights).zip(&f.values) {
                    if *v == zero() {
                        continue;
                    }
                    let yx = y.inverse().mul(x);
                    acc += v * fw * kernel(&yx) * cocycle_sigma(y, &yx, gamma).conj();
                }
            }
            acc
        })
        .collect())
}

/// Twisted left translate ℓ_x F(y) = conj σ(x, x⁻¹y)·F(x⁻¹y), so that
/// ℓ_x W_ψ(φ) = W_ψ(π(x)φ).
pub fn left_translate(
    x: &GroupElement,
    f: impl Fn(&GroupElement) -> Complex64,
    gamma: f64,
    y: &GroupElement,
) -> Complex64 {
    let xy = x.inverse().mul(y);
    cocycle_sigma(x, &xy, gamma).conj() * f(&xy)
}

/// Max over probes of |W_ψf # W_ψψ − W_ψf|, relative to max |W_ψf|, with
/// W_ψf sampled on `grid`. ψ must be normalized.
pub fn reproducing_residual(f: &CoeffFunction, psi: &CoeffFunction, grid: &GroupGrid, probes: &[GroupElement]) -> Result<f64> {
    let (conv, direct) = swap_parts(f, psi, psi, psi, grid, probes)?;
    let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(conv.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale)
}

/// (W_ψf # W_φη)(x) and W_φf(x) at the probes.
fn swap_parts(
    f: &CoeffFunction,
    psi: &CoeffFunction,
    phi: &CoeffFunction,
    eta: &CoeffFunction,
    grid: &GroupGrid,
    probes: &[GroupElement],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let gamma = f.gamma;
    let degree = f.degree.max(eta.degree);
    let wf = grid.sample(|pt| if f.n == 1 { wavelet_su11(f, psi, &pt.su11()).unwrap() } else { wavelet(f, psi, &pt.element()).unwrap() });
    let eta_d = eta.with_degree(degree);
    let conv = twisted_convolution(&wf, |y| wavelet(&eta_d, phi, y).unwrap(), gamma, probes)?;
    let direct = probes.iter().map(|x| wavelet(f, phi, x)).collect::<Result<Vec<_>>>()?;
    Ok((conv, direct))
}

/// W_ψf # W_φη = d_γ⁻¹⟨η, ψ⟩·W_φf, checked through the probe ratios.
#[derive(Debug, Clone, Serialize)]
pub struct SwapReport {
    pub expected: Complex64,
    pub mean_ratio: Complex64,
    /// max |ratio − expected| / |expected|
    pub max_rel_spread: f64,
    pub probes: usize,
}

pub fn vector_swap(
    f: &CoeffFunction,
    psi: &CoeffFunction,
    phi: &CoeffFunction,
    eta: &CoeffFunction,
    grid: &GroupGrid,
    probes: &[GroupElement],
) -> Result<SwapReport> {
    let (conv, direct) = swap_parts(f, psi, phi, eta, grid, probes)?;
    let d = formal_dimension(f.n, f.gamma);
    let eta_d = eta.with_degree(psi.degree.max(eta.degree));
    let expected = crate::holo::pairing(&eta_d, &psi.with_degree(eta_d.degree))? / d;
    let ratios: Vec<Complex64> = conv.iter().zip(&direct).map(|(a, b)| a / b).collect();
    let mean_ratio = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let max_rel_spread = ratios.iter().map(|r| (r - expected).norm()).fold(0.0, f64::max) / expected.norm();
    Ok(SwapReport { expected, mean_ratio, max_rel_spread, probes: probes.len() })
}

/// Analyzing vector: `const`, `poly:c0,c1,...` (plain coefficients in z₁,
/// complex entries like `1`, `-0.5+2i`, `i`), or `file:PATH` with a
/// `CoeffFunction` JSON document.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSpec {
    Const,
    Poly(Vec<Complex64>),
    File(PathBuf),
}

impl FromStr for PsiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "const" {
            return Ok(PsiSpec::Const);
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let c = rest.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            if c.is_empty() {
                return Err(Error::Parse("empty polynomial".into()));
            }
            return Ok(PsiSpec::Poly(c));
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(PsiSpec::File(PathBuf::from(rest)));
        }
        Err(Error::Parse(format!("unknown psi spec '{s}'")))
    }
}

impl std::fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiSpec::Const => write!(f, "const"),
            PsiSpec::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            PsiSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl PsiSpec {
    /// The analyzing vector in the γ-basis of dimension n, not normalized.
    pub fn build(&self, n: usize, degree: usize, gamma: f64) -> Result<CoeffFunction> {
        match self {
            PsiSpec::Const => Ok(CoeffFunction::constant(n, degree, gamma, Complex64::new(1.0, 0.0))),
            PsiSpec::Poly(c) => {
                if c.len() > degree + 1 {
                    return Err(Error::Precondition(format!("psi of degree {} exceeds N = {degree}", c.len() - 1)));
                }
                let terms: Vec<(Vec<u32>, Complex64)> = c
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let mut m = vec![0u32; n];
                        m[0] = k as u32;
                        (m, *a)
                    })
                    .collect();
                CoeffFunction::from_plain(n, degree, gamma, &terms)
            }
            PsiSpec::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                let f = CoeffFunction::from_json(&text)?;
                if f.n != n || (f.gamma - gamma).abs() > 1e-12 {
                    return Err(Error::Precondition("psi file has a different domain or weight".into()));
                }
                Ok(f.with_degree(degree))
            }
        }
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = 0;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = k;
            break;
        }
    }
    let (re, im) = body.split_at(split);
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_acts_trivially() {
        let f = CoeffFunction::disc_poly(8, 3.0, &[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5)]).unwrap();
        let e = GroupElement::identity(1);
        let g = apply_rep(&e, &f).unwrap().f;
        assert!(g.sub(&f).norm() < 1e-13);
        let g = apply_rep_series(&Su11::IDENTITY, &f, 8).unwrap();
        assert!(g.sub(&f).norm() < 1e-15);
    }

    #[test]
    fn series_matches_fft() {
        let f = CoeffFunction::disc_poly(24, 2.5, &[c(0.3, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(2.0, 1.0)]).unwrap();
        let x = Su11::polar(c(0.35, -0.2), 0.7);
        let a = apply_rep_series(&x, &f, 24).unwrap();
        let b = apply_rep(&x.to_group(), &f).unwrap();
        assert!(a.sub(&b.f).norm() < 1e-10, "{}", a.sub(&b.f).norm());
    }

    #[test]
    fn const_wavelet_closed_form() {
        let x = GroupElement::transvection(&[c(0.6, 0.0)]).unwrap();
        let one = CoeffFunction::constant(1, 4, 2.0, c(1.0, 0.0));
        assert_relative_eq!(wavelet(&one, &one, &x).unwrap().norm(), 0.64, max_relative = 1e-13);
        assert_relative_eq!(wavelet_const(&one, &x).norm(), 0.64, max_relative = 1e-13);
        let f = CoeffFunction::disc_poly(6, 3.0, &[c(1.0, 0.0), c(0.5, -0.5), c(0.0, 0.0), c(0.2, 0.0)]).unwrap();
        let one = CoeffFunction::constant(1, 6, 3.0, c(1.0, 0.0));
        let x = GroupElement::disc_polar(c(-0.3, 0.45), 1.1).unwrap();
        let a = wavelet(&f, &one, &x).unwrap();
        let b = wavelet_const(&f, &x);
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn disc_formal_dimension() {
        assert_relative_eq!(formal_dimension(1, 3.0), 2.0, max_relative = 1e-13);
        assert_relative_eq!(formal_dimension(1, 2.5), 1.5, max_relative = 1e-13);
        // ball(2): Γ(γ)/(2Γ(γ−2)) = (γ−1)(γ−2)/2
        assert_relative_eq!(formal_dimension(2, 4.0), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn haar_weights() {
        for (n, beta) in [(1, 1.0), (1, -0.5), (2, 0.5)] {
            let g = GroupGrid::section(n, beta, 24, 16).unwrap();
            assert!(g.haar_residual(n as f64 + 1.0 + beta) < 1e-12);
            assert!(g.haar_residual(n as f64 + 2.7) < 1e-7, "{n} {beta} {}", g.haar_residual(n as f64 + 2.7));
        }
        let g = GroupGrid::new(1, 1.0, 12, 16, 8).unwrap();
        assert_eq!(g.len(), 12 * 16 * 8);
        assert!(g.haar_residual(3.0) < 1e-12);
        assert!(GroupGrid::new(2, 1.0, 4, 4, 3).is_err());
    }

    #[test]
    fn divergence_flag_flips() {
        let grid = GroupGrid::section(1, 0.0, 30, 8).unwrap();
        let gamma = 3.0;
        let w = |pt: &GroupPoint| c(pt.h().powf(gamma / 2.0), 0.0);
        for (alpha, div) in [(1.2, false), (0.8, true)] {
            let r = group_lp_norm(w, 1.0, alpha - gamma / 2.0, &grid);
            assert_eq!(r.divergent, div, "alpha {alpha}: slope {}", r.tail_slope);
        }
        let zero_norm = group_lp_norm(|_| c(0.0, 0.0), 2.0, 1.0, &grid);
        assert_eq!(zero_norm.value, 0.0);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-0.5+2i").unwrap(), c(-0.5, 2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3-i").unwrap(), c(3.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5e2i").unwrap(), c(1e-3, -250.0));
        assert!(parse_complex("x").is_err());
        let p: PsiSpec = "poly:1,0,1".parse().unwrap();
        assert_eq!(p, PsiSpec::Poly(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        assert_eq!(p.to_string().parse::<PsiSpec>().unwrap(), p);
        assert_eq!("const".parse::<PsiSpec>().unwrap(), PsiSpec::Const);
    }
}
