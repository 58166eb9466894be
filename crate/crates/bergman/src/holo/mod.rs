//! Holomorphic functions on the disc/ball as truncated coefficient vectors
//! in the normalized monomial basis ψ_m = z^m/‖z^m‖ of A²_γ, together with
//! kernels, quadrature grids and re-expansion of sampled functions.
//!
//! The measure is dμ_γ = c_γ h(z,z)^{γ−g} dz with dz normalized Lebesgue
//! measure, so μ_γ is a probability measure and ‖z^m‖²_γ = m!·Γ(γ)/Γ(γ+|m|).

mod grid;
mod reexpand;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use grid::{lp_alpha_norm, LpNorm, QuadratureGrid};
pub(crate) use grid::sphere_rule;
pub use reexpand::{reexpand, reexpand_with, Reexpansion, ReexpandOptions};

/// Monomial exponents |m| ≤ N, degree-major, lexicographically descending
/// inside a degree.
#[derive(Debug)]
pub struct Basis {
    pub n: usize,
    pub degree: usize,
    pub indices: Vec<Vec<u32>>,
    /// `offsets[k]..offsets[k+1]` is the slice of degree k.
    pub offsets: Vec<usize>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl Basis {
    fn build(n: usize, degree: usize) -> Basis {
        let mut indices = Vec::new();
        let mut offsets = vec![0];
        for k in 0..=degree {
            let mut cur = vec![0u32; n];
            push_compositions(k as u32, 0, &mut cur, &mut indices);
            offsets.push(indices.len());
        }
        let lookup = indices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Basis { n, degree, indices, offsets, lookup }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.indices[i].iter().sum::<u32>() as usize
    }
}

fn push_compositions(rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = rest;
        out.push(cur.clone());
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        push_compositions(rest - v, pos + 1, cur, out);
    }
}

/// Shared basis for (n, N).
pub fn basis(n: usize, degree: usize) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry((n, degree)).or_insert_with(|| Arc::new(Basis::build(n, degree))).clone()
}

/// dim of the space of polynomials of degree ≤ N in n variables.
pub fn basis_len(n: usize, degree: usize) -> usize {
    let mut c = 1usize;
    for i in 1..=n {
        c = c * (degree + i) / i;
    }
    c
}

fn check_gamma(gamma: f64, n: usize) -> Result<()> {
    if !(gamma > n as f64) {
        return Err(Error::Precondition(format!("gamma = {gamma} must exceed g - 1 = {n}")));
    }
    Ok(())
}

/// log ‖z^m‖²_γ = Σ log m_j! − Σ_{k<|m|} log(γ+k).
fn ln_monomial_norm2(m: &[u32], gamma: f64) -> f64 {
    let mut s = 0.0;
    for &mj in m {
        for k in 2..=mj {
            s += (k as f64).ln();
        }
    }
    let total: u32 = m.iter().sum();
    for k in 0..total {
        s -= (gamma + k as f64).ln();
    }
    s
}

/// Closed form ‖z^m‖_{A²_γ} on the ball of dimension m.len(). It is
/// certified against quadrature by `QuadratureGrid::certify_monomials`.
pub fn monomial_norm(m: &[u32], gamma: f64) -> Result<f64> {
    check_gamma(gamma, m.len().max(1))?;
    Ok((0.5 * ln_monomial_norm2(m, gamma)).exp())
}

/// Per-basis-element norms ‖z^m‖_γ for (n, N).
pub fn norm_table(n: usize, degree: usize, gamma: f64) -> Vec<f64> {
    basis(n, degree).indices.iter().map(|m| (0.5 * ln_monomial_norm2(m, gamma)).exp()).collect()
}

/// Principal power h(z,w)^{−γ}. Re h > 0 on the domain, so this is
/// continuous there.
pub fn kernel(z: &[Complex64], w: &[Complex64], gamma: f64) -> Complex64 {
    (-gamma * crate::geometry::h_point(z, w).ln()).exp()
}

/// A holomorphic function truncated at degree N, stored in the normalized
/// basis of A²_γ.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffFunction {
    pub gamma: f64,
    pub n: usize,
    pub degree: usize,
    pub coeffs: Vec<Complex64>,
}

impl CoeffFunction {
    pub fn zeros(n: usize, degree: usize, gamma: f64) -> CoeffFunction {
        CoeffFunction { gamma, n, degree, coeffs: vec![Complex64::new(0.0, 0.0); basis_len(n, degree)] }
    }

    pub fn constant(n: usize, degree: usize, gamma: f64, value: Complex64) -> CoeffFunction {
        let mut f = CoeffFunction::zeros(n, degree, gamma);
        f.coeffs[0] = value;
        f
    }

    /// From plain Taylor coefficients a_m, f = Σ a_m z^m.
    pub fn from_plain(n: usize, degree: usize, gamma: f64, terms: &[(Vec<u32>, Complex64)]) -> Result<CoeffFunction> {
        check_gamma(gamma, n)?;
        let b = basis(n, degree);
        let mut f = CoeffFunction::zeros(n, degree, gamma);
        for (m, a) in terms {
            let i = b
                .index_of(m)
                .ok_or_else(|| Error::Dimension(format!("monomial {m:?} not in degree-{degree} basis")))?;
            f.coeffs[i] += a * (0.5 * ln_monomial_norm2(m, gamma)).exp();
        }
        Ok(f)
    }

    /// Disc polynomial Σ a_k z^k.
    pub fn disc_poly(degree: usize, gamma: f64, plain: &[Complex64]) -> Result<CoeffFunction> {
        let terms: Vec<(Vec<u32>, Complex64)> =
            plain.iter().enumerate().map(|(k, a)| (vec![k as u32], *a)).collect();
        CoeffFunction::from_plain(1, degree, gamma, &terms)
    }

    /// Random polynomial of degree ≤ `active` stored at degree N, with
    /// normalized-basis coefficients uniform in the unit square.
    pub fn random(n: usize, degree: usize, active: usize, gamma: f64, rng: &mut impl rand::Rng) -> CoeffFunction {
        let mut f = CoeffFunction::zeros(n, degree, gamma);
        let keep = basis_len(n, active.min(degree));
        for c in &mut f.coeffs[..keep] {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        f
    }

    /// The coefficient vector of K_γ(·, w) = Σ ψ_m(·) conj(ψ_m(w)).
    pub fn kernel_section(w: &[Complex64], degree: usize, gamma: f64) -> CoeffFunction {
        let n = w.len();
        let b = basis(n, degree);
        let norms = norm_table(n, degree, gamma);
        let coeffs = b
            .indices
            .iter()
            .zip(&norms)
            .map(|(m, nm)| (monomial(w, m) / nm).conj())
            .collect();
        CoeffFunction { gamma, n, degree, coeffs }
    }

    pub fn basis(&self) -> Arc<Basis> {
        basis(self.n, self.degree)
    }

    /// Plain Taylor coefficients a_m = c_m/‖z^m‖_γ in basis order.
    pub fn to_plain(&self) -> Vec<Complex64> {
        let norms = norm_table(self.n, self.degree, self.gamma);
        self.coeffs.iter().zip(&norms).map(|(c, nm)| c / nm).collect()
    }

    /// Σ_m c_m ψ_m(z), summed degree by degree.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        Evaluator::new(self).eval(z)
    }

    /// ‖f‖_{A²_γ} by Parseval.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖f‖_{A²_α} for another weight α, from the monomial norm ratios.
    pub fn norm_in(&self, alpha: f64) -> f64 {
        let b = self.basis();
        let mut s = 0.0;
        for (m, c) in b.indices.iter().zip(&self.coeffs) {
            s += c.norm_sqr() * (ln_monomial_norm2(m, alpha) - ln_monomial_norm2(m, self.gamma)).exp();
        }
        s.sqrt()
    }

    /// Per-degree norms ‖f_k‖_{A²_γ}.
    pub fn slice_norms(&self) -> Vec<f64> {
        let b = self.basis();
        (0..=self.degree)
            .map(|k| self.coeffs[b.offsets[k]..b.offsets[k + 1]].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Zero-pads or truncates to a new degree.
    pub fn with_degree(&self, degree: usize) -> CoeffFunction {
        let mut out = CoeffFunction::zeros(self.n, degree, self.gamma);
        let keep = basis_len(self.n, degree.min(self.degree));
        out.coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        out
    }

    pub fn scale(&self, s: Complex64) -> CoeffFunction {
        CoeffFunction { coeffs: self.coeffs.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &CoeffFunction) -> CoeffFunction {
        let d = self.degree.max(o.degree);
        let (a, b) = (self.with_degree(d), o.with_degree(d));
        CoeffFunction { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(), ..a }
    }

    pub fn add(&self, o: &CoeffFunction) -> CoeffFunction {
        self.sub(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CoeffJson::from(self)).unwrap()
    }

    pub fn from_json(s: &str) -> Result<CoeffFunction> {
        let j: CoeffJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }
}

/// z^m.
pub fn monomial(z: &[Complex64], m: &[u32]) -> Complex64 {
    z.iter().zip(m).map(|(zi, &k)| zi.powu(k)).product()
}

/// Reusable evaluator: plain coefficients computed once.
pub struct Evaluator {
    n: usize,
    degree: usize,
    plain: Vec<Complex64>,
    basis: Arc<Basis>,
}

impl Evaluator {
    pub fn new(f: &CoeffFunction) -> Evaluator {
        Evaluator { n: f.n, degree: f.degree, plain: f.to_plain(), basis: f.basis() }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        if self.n == 1 {
            // Horner from the top degree.
            let mut s = Complex64::new(0.0, 0.0);
            for a in self.plain.iter().rev() {
                s = s * z[0] + a;
            }
            return s;
        }
        let pows: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zi| {
                let mut p = Vec::with_capacity(self.degree + 1);
                let mut cur = Complex64::new(1.0, 0.0);
                for _ in 0..=self.degree {
                    p.push(cur);
                    cur *= zi;
                }
                p
            })
            .collect();
        let mut s = Complex64::new(0.0, 0.0);
        for (m, a) in self.basis.indices.iter().zip(&self.plain) {
            let mut t = *a;
            for (j, &k) in m.iter().enumerate() {
                t *= pows[j][k as usize];
            }
            s += t;
        }
        s
    }
}

/// ⟨f, g⟩_γ = Σ f_m conj(g_m), zero-padding the shorter vector.
pub fn pairing(f: &CoeffFunction, g: &CoeffFunction) -> Result<Complex64> {
    if f.n != g.n {
        return Err(Error::Dimension(format!("pairing of dim {} with dim {}", f.n, g.n)));
    }
    if (f.gamma - g.gamma).abs() > 1e-12 {
        return Err(Error::Precondition(format!("pairing across weights {} and {}", f.gamma, g.gamma)));
    }
    Ok(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum())
}

/// Per-degree decay of a coefficient function.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    pub slices: Vec<(usize, f64)>,
    /// Slope of log‖f_k‖ against log(1+k): polynomial growth order N̂.
    pub fitted_exponent: f64,
    /// exp of the slope of log‖f_k‖ against k: geometric ratio per degree.
    pub geometric_ratio: f64,
}

pub fn decay_profile(f: &CoeffFunction) -> DecayProfile {
    let slices: Vec<(usize, f64)> = f.slice_norms().into_iter().enumerate().collect();
    let pts: Vec<(f64, f64)> = slices
        .iter()
        .filter(|(k, v)| *k > 0 && *v > 1e-300)
        .map(|&(k, v)| (k as f64, v.ln()))
        .collect();
    let (fitted_exponent, geometric_ratio) = if pts.len() >= 2 {
        let lk: Vec<f64> = pts.iter().map(|p| (1.0 + p.0).ln()).collect();
        let k: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        (crate::quad::linear_fit(&lk, &y).0, crate::quad::linear_fit(&k, &y).0.exp())
    } else {
        (f64::NAN, f64::NAN)
    };
    DecayProfile { slices, fitted_exponent, geometric_ratio }
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    gamma: f64,
    domain: String,
    #[serde(rename = "N")]
    degree: usize,
    entries: Vec<(Vec<u32>, f64, f64)>,
}

impl From<&CoeffFunction> for CoeffJson {
    fn from(f: &CoeffFunction) -> Self {
        let b = f.basis();
        CoeffJson {
            gamma: f.gamma,
            domain: if f.n == 1 { "disc".into() } else { format!("ball:{}", f.n) },
            degree: f.degree,
            entries: b.indices.iter().zip(&f.coeffs).map(|(m, c)| (m.clone(), c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<CoeffJson> for CoeffFunction {
    type Error = Error;

    fn try_from(j: CoeffJson) -> Result<CoeffFunction> {
        let n = match j.domain.as_str() {
            "disc" => 1,
            s => s
                .strip_prefix("ball:")
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| Error::Parse(format!("unknown domain '{s}'")))?,
        };
        let b = basis(n, j.degree);
        let mut f = CoeffFunction::zeros(n, j.degree, j.gamma);
        for (m, re, im) in j.entries {
            let i = b.index_of(&m).ok_or_else(|| Error::Parse(format!("bad multi-index {m:?}")))?;
            f.coeffs[i] = Complex64::new(re, im);
        }
        Ok(f)
    }
}
