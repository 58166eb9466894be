use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{basis, norm_table, CoeffFunction};

/// Sampling radii and per-coordinate sample count for `reexpand`.
#[derive(Debug, Clone, Copy)]
pub struct ReexpandOptions {
    /// radius used for the returned coefficients
    pub primary: f64,
    /// radius of the cross-check expansion
    pub secondary: f64,
    /// samples per complex coordinate; 0 picks max(64, 4(N+1))
    pub samples: usize,
    /// coefficient disagreement between the radii that flags failure
    pub mismatch_tol: f64,
    /// relative energy just beyond degree N that flags failure
    pub tail_tol: f64,
}

impl Default for ReexpandOptions {
    fn default() -> Self {
        ReexpandOptions { primary: 0.75, secondary: 0.55, samples: 0, mismatch_tol: 1e-6, tail_tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct Reexpansion {
    pub f: CoeffFunction,
    /// max coefficient difference between the two radii, relative to ‖f‖
    pub mismatch: f64,
    /// A²_γ energy in degrees N < k ≤ 2N relative to the total
    pub tail_fraction: f64,
    pub truncation_failed: bool,
}

/// Coefficients in the normalized A²_γ basis of a holomorphic function
/// given by samples, via FFT on the torus ‖z_j‖ = ρ/√n.
pub fn reexpand(
    n: usize,
    degree: usize,
    gamma: f64,
    f: impl Fn(&[Complex64]) -> Complex64,
) -> Reexpansion {
    reexpand_with(n, degree, gamma, f, ReexpandOptions::default())
}

pub fn reexpand_with(
    n: usize,
    degree: usize,
    gamma: f64,
    f: impl Fn(&[Complex64]) -> Complex64,
    opts: ReexpandOptions,
) -> Reexpansion {
    let m = if opts.samples == 0 { (4 * (degree + 1)).max(64) } else { opts.samples };
    let (c1, tail1) = torus_coefficients(n, degree, gamma, &f, opts.primary, m);
    let (c2, _) = torus_coefficients(n, degree, gamma, &f, opts.secondary, m);
    let scale = c1.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let mismatch = c1.iter().zip(&c2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    let total = scale * scale + tail1;
    let tail_fraction = tail1 / total;
    let truncation_failed = mismatch > opts.mismatch_tol || tail_fraction > opts.tail_tol;
    Reexpansion { f: CoeffFunction { gamma, n, degree, coeffs: c1 }, mismatch, tail_fraction, truncation_failed }
}

/// Returns the normalized coefficients up to N and the energy of degrees
/// N+1..=min(2N, m/2−1).
fn torus_coefficients(
    n: usize,
    degree: usize,
    gamma: f64,
    f: &impl Fn(&[Complex64]) -> Complex64,
    rho: f64,
    m: usize,
) -> (Vec<Complex64>, f64) {
    let r = rho / (n as f64).sqrt();
    let total = m.pow(n as u32);
    let roots: Vec<Complex64> =
        (0..m).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / m as f64)).collect();
    let mut data: Vec<Complex64> = Vec::with_capacity(total);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for idx in 0..total {
        // first coordinate varies slowest
        let mut rest = idx;
        for j in (0..n).rev() {
            z[j] = roots[rest % m];
            rest /= m;
        }
        data.push(f(&z));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    // FFT along each axis in turn.
    let mut scratch = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        for base in 0..total {
            if !(base / stride).is_multiple_of(m) {
                continue;
            }
            for k in 0..m {
                scratch[k] = data[base + k * stride];
            }
            fft.process(&mut scratch);
            for k in 0..m {
                data[base + k * stride] = scratch[k];
            }
        }
    }
    let norm = 1.0 / total as f64;
    let at = |mi: &[u32]| -> usize {
        let mut idx = 0;
        for &k in mi {
            idx = idx * m + k as usize;
        }
        idx
    };
    let b = basis(n, degree);
    let norms = norm_table(n, degree, gamma);
    let coeffs = b
        .indices
        .iter()
        .zip(&norms)
        .map(|(mi, nm)| {
            let k: u32 = mi.iter().sum();
            data[at(mi)] * norm / r.powi(k as i32) * nm
        })
        .collect();
    let top = (2 * degree).min(m / 2 - 1);
    let mut tail = 0.0;
    if top > degree {
        let tb = basis(n, top);
        let tn = norm_table(n, top, gamma);
        for (i, mi) in tb.indices.iter().enumerate().skip(b.len()) {
            let k: u32 = mi.iter().sum();
            tail += (data[at(mi)] * norm / r.powi(k as i32) * tn[i]).norm_sqr();
        }
    }
    (coeffs, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::kernel;

    #[test]
    fn recovers_polynomial_exactly() {
        let f = CoeffFunction::from_plain(
            2,
            5,
            3.5,
            &[(vec![0, 0], Complex64::new(1.0, 0.0)), (vec![2, 3], Complex64::new(0.0, -2.0)), (vec![1, 0], Complex64::new(0.5, 0.5))],
        )
        .unwrap();
        let r = reexpand(2, 5, 3.5, |z| f.eval(z));
        let err: f64 = r.f.coeffs.iter().zip(&f.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err}");
        assert!(!r.truncation_failed);
    }

    #[test]
    fn kernel_section_from_samples() {
        let w = [Complex64::new(0.3, -0.2)];
        let r = reexpand(1, 32, 3.0, |z| kernel(z, &w, 3.0));
        let exact = CoeffFunction::kernel_section(&w, 32, 3.0);
        let err: f64 = r.f.coeffs.iter().zip(&exact.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err}");
        assert!(r.mismatch < 1e-8, "mismatch {}", r.mismatch);
        // a kernel peaked near the boundary does not fit in degree 8
        let w = [Complex64::new(0.9, 0.0)];
        let r = reexpand(1, 8, 3.0, |z| kernel(z, &w, 3.0));
        assert!(r.truncation_failed && r.tail_fraction > 1e-3);
    }
}
