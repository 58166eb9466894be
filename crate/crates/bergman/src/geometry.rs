//! The automorphism group of the disc and ball: matrices preserving
//! Q = diag(I_n, −1), the fractional-linear action, the complex Jacobian,
//! the functions h(z,w) and h(x), and the cocycle of j_γ.
//!
//! Branch convention. `J(x,z) = det(x)·q(z)^{−(n+1)}` with
//! `q(z) = ⟨z,c⟩ + d`. Its logarithm is taken as
//!
//! ```text
//! log J(x,z) = Log det x − (n+1)·[Log d + Log(1 + ⟨z,c⟩/d)]
//! ```
//!
//! with principal logs. Since |⟨z,c⟩/d| < 1 on the domain this is
//! holomorphic in z, which a principal power of J itself is not. It also
//! satisfies log J(x⁻¹, x·0) = −log J(x, 0).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::{Error, Result};

pub const GROUP_TOL: f64 = 1e-10;

/// ⟨z, w⟩ = Σ z_i conj(w_i).
pub fn inner(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm2(z: &[Complex64]) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum()
}

pub fn is_interior(z: &[Complex64]) -> bool {
    norm2(z) < 1.0
}

/// h(z, w) = 1 − ⟨z, w⟩.
pub fn h_point(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    Complex64::new(1.0, 0.0) - inner(z, w)
}

/// Hyperbolic distance artanh|φ_z(w)| on the disc.
pub fn disc_distance(z: Complex64, w: Complex64) -> f64 {
    ((z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)).norm().min(1.0 - 1e-16).atanh()
}

fn q_form(n: usize) -> DMatrix<Complex64> {
    let mut q = DMatrix::identity(n + 1, n + 1);
    q[(n, n)] = Complex64::new(-1.0, 0.0);
    q
}

/// An element of U(n,1), acting on the unit ball of ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    mat: DMatrix<Complex64>,
}

impl GroupElement {
    /// Validates `mat* Q mat = Q` to `tol`.
    pub fn new(mat: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() < 2 {
            return Err(Error::Dimension(format!("{}x{} group matrix", mat.nrows(), mat.ncols())));
        }
        let x = GroupElement { mat };
        let res = x.form_residual();
        if !(res <= tol) {
            return Err(Error::NotInGroup(res));
        }
        Ok(x)
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { mat: DMatrix::identity(n + 1, n + 1) }
    }

    /// The hermitian positive transvection x_w with x_w·0 = w.
    pub fn transvection(w: &[Complex64]) -> Result<Self> {
        let n = w.len();
        let r2 = norm2(w);
        if !(r2 < 1.0) {
            return Err(Error::NotInterior(r2.sqrt()));
        }
        let s = 1.0 / (1.0 - r2).sqrt();
        let mut m = DMatrix::identity(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                if r2 > 0.0 {
                    m[(i, j)] += (s - 1.0) * w[i] * w[j].conj() / r2;
                }
            }
            m[(i, n)] = w[i] * s;
            m[(n, i)] = w[i].conj() * s;
        }
        m[(n, n)] = Complex64::new(s, 0.0);
        Ok(GroupElement { mat: m })
    }

    /// Stabilizer element diag(U, e^{iφ}) with e^{iφ} = 1/det U, so that the
    /// result lies in SU(n,1). Acts by z ↦ det(U)·U z.
    pub fn rotation(u: &DMatrix<Complex64>) -> Result<Self> {
        let n = u.nrows();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(u);
        m[(n, n)] = Complex64::new(1.0, 0.0) / u.determinant();
        GroupElement::new(m, GROUP_TOL)
    }

    /// k_θ = diag(e^{iθ}, e^{−iθ}) on the disc; acts by z ↦ e^{2iθ} z.
    pub fn disc_rotation(theta: f64) -> Self {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::from_polar(1.0, theta);
        m[(1, 1)] = Complex64::from_polar(1.0, -theta);
        GroupElement { mat: m }
    }

    /// x_w k_θ on the disc.
    pub fn disc_polar(w: Complex64, theta: f64) -> Result<Self> {
        Ok(GroupElement::transvection(&[w])?.mul(&GroupElement::disc_rotation(theta)))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// ‖mat* Q mat − Q‖_max.
    pub fn form_residual(&self) -> f64 {
        let q = q_form(self.dim());
        let r = self.mat.adjoint() * &q * &self.mat - q;
        r.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement { mat: &self.mat * &other.mat }
    }

    /// x⁻¹ = Q x* Q.
    pub fn inverse(&self) -> GroupElement {
        let q = q_form(self.dim());
        GroupElement { mat: &q * self.mat.adjoint() * &q }
    }

    pub fn det(&self) -> Complex64 {
        self.mat.determinant()
    }

    /// Pulls a long product back onto the group: a Newton step for
    /// X = Q M* Q M → I, M ← M(3I − X)/2.
    pub fn renormalize(&mut self) {
        let n = self.dim();
        let q = q_form(n);
        for _ in 0..3 {
            let x = &q * self.mat.adjoint() * &q * &self.mat;
            let corr: DMatrix<Complex64> =
                (DMatrix::<Complex64>::identity(n + 1, n + 1) * Complex64::new(3.0, 0.0) - x)
                    * Complex64::new(0.5, 0.0);
            self.mat = &self.mat * corr;
        }
    }

    fn denom(&self, z: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let mut q = self.mat[(n, n)];
        for j in 0..n {
            q += self.mat[(n, j)] * z[j];
        }
        q
    }

    /// x·z = (Az + b)/(⟨z,c⟩ + d).
    pub fn act(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if z.len() != n {
            return Err(Error::Dimension(format!("point of dim {} for group of dim {n}", z.len())));
        }
        if !is_interior(z) {
            return Err(Error::NotInterior(norm2(z).sqrt()));
        }
        let q = self.denom(z);
        if q.norm() < 1e-12 {
            return Err(Error::Denominator(q.norm()));
        }
        Ok((0..n)
            .map(|i| {
                let mut s = self.mat[(i, n)];
                for j in 0..n {
                    s += self.mat[(i, j)] * z[j];
                }
                s / q
            })
            .collect())
    }

    /// x·0.
    pub fn origin_image(&self) -> Vec<Complex64> {
        let n = self.dim();
        let d = self.mat[(n, n)];
        (0..n).map(|i| self.mat[(i, n)] / d).collect()
    }

    /// J(x, z) = det(x)·q(z)^{−(n+1)}.
    pub fn jacobian(&self, z: &[Complex64]) -> Result<Complex64> {
        let q = self.denom(z);
        if q.norm() < 1e-12 {
            return Err(Error::Denominator(q.norm()));
        }
        Ok(self.det() * q.powi(-(self.dim() as i32 + 1)))
    }

    /// The holomorphic logarithm of J described in the module docs.
    pub fn log_jacobian(&self, z: &[Complex64]) -> Complex64 {
        let n = self.dim();
        let d = self.mat[(n, n)];
        let mut u = Complex64::new(0.0, 0.0);
        for j in 0..n {
            u += self.mat[(n, j)] * z[j];
        }
        self.det().ln() - (n as f64 + 1.0) * (d.ln() + (Complex64::new(1.0, 0.0) + u / d).ln())
    }

    /// j_γ(x, z) = exp((γ/g)·log J(x, z)) with g = n + 1.
    pub fn j_gamma(&self, z: &[Complex64], gamma: f64) -> Complex64 {
        (self.log_jacobian(z) * (gamma / (self.dim() as f64 + 1.0))).exp()
    }

    /// h(x) = 1 − ‖x·0‖².
    pub fn h(&self) -> f64 {
        1.0 - norm2(&self.origin_image())
    }

    /// Random element x_w·k with ‖w‖ ≤ rmax, k uniform in the stabilizer.
    pub fn random(n: usize, rmax: f64, rng: &mut impl Rng) -> GroupElement {
        let w = random_point(n, rmax, rng);
        let xw = GroupElement::transvection(&w).unwrap();
        xw.mul(&GroupElement::rotation(&random_unitary(n, rng)).unwrap())
    }

    /// Branch-cut proximity of the logarithms used in `log_jacobian`: true
    /// when d or det sits within `tol` (in angle) of the negative axis.
    pub fn near_branch_cut(&self, tol: f64) -> bool {
        let n = self.dim();
        let near = |c: Complex64| std::f64::consts::PI - c.arg().abs() < tol;
        near(self.mat[(n, n)]) || near(self.det())
    }
}

/// Uniform random point of the ball of radius rmax in ℂⁿ.
pub fn random_point(n: usize, rmax: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if norm2(&z) < 1.0 {
            return z.into_iter().map(|c| c * rmax).collect();
        }
    }
}

/// Haar-random unitary n×n via QR of a complex Gaussian-ish matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        Complex64::new(a, b)
    });
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// h(y⁻¹x), computed as 1 − ‖(y⁻¹x)·0‖².
pub fn h_group(x: &GroupElement, y: &GroupElement) -> f64 {
    y.inverse().mul(x).h()
}

/// σ_γ(x,y) = j_γ(x, y·0) j_γ(y, 0) / j_γ(xy, 0), with the warning flag of
/// `near_branch_cut` for any of the three elements.
pub fn cocycle_sigma_checked(x: &GroupElement, y: &GroupElement, gamma: f64) -> (Complex64, bool) {
    let n = x.dim();
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let xy = x.mul(y);
    let s = gamma / (n as f64 + 1.0);
    let l = x.log_jacobian(&y.origin_image()) + y.log_jacobian(&zero) - xy.log_jacobian(&zero);
    let warn = [x, y, &xy].iter().any(|g| g.near_branch_cut(1e-6));
    ((l * s).exp(), warn)
}

pub fn cocycle_sigma(x: &GroupElement, y: &GroupElement, gamma: f64) -> Complex64 {
    cocycle_sigma_checked(x, y, gamma).0
}

/// SU(1,1) element [[a, b], [b̄, ā]], |a|² − |b|² = 1. The disc workhorse;
/// same formulas and branches as `GroupElement`, without allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Su11 {
    pub const IDENTITY: Su11 = Su11 { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) };

    /// x_w k_θ.
    pub fn polar(w: Complex64, theta: f64) -> Su11 {
        let s = 1.0 / (1.0 - w.norm_sqr()).sqrt();
        Su11 { a: Complex64::from_polar(s, theta), b: w * Complex64::from_polar(s, -theta) }
    }

    pub fn transvection(w: Complex64) -> Su11 {
        Su11::polar(w, 0.0)
    }

    /// Inverse of `polar`: (w, θ) with θ = arg a ∈ (−π, π].
    pub fn to_polar(&self) -> (Complex64, f64) {
        (self.b / self.a.conj(), self.a.arg())
    }

    pub fn mul(&self, o: &Su11) -> Su11 {
        Su11 { a: self.a * o.a + self.b * o.b.conj(), b: self.a * o.b + self.b * o.a.conj() }
    }

    pub fn inv(&self) -> Su11 {
        Su11 { a: self.a.conj(), b: -self.b }
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn origin_image(&self) -> Complex64 {
        self.b / self.a.conj()
    }

    pub fn jacobian(&self, z: Complex64) -> Complex64 {
        (self.b.conj() * z + self.a.conj()).powi(-2)
    }

    pub fn log_jacobian(&self, z: Complex64) -> Complex64 {
        let d = self.a.conj();
        -2.0 * (d.ln() + (Complex64::new(1.0, 0.0) + z * self.b.conj() / d).ln())
    }

    /// j_γ = exp((γ/2)·log J).
    pub fn j_gamma(&self, z: Complex64, gamma: f64) -> Complex64 {
        (self.log_jacobian(z) * (gamma / 2.0)).exp()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.a.norm_sqr()
    }

    pub fn to_group(&self) -> GroupElement {
        let m = DMatrix::from_row_slice(2, 2, &[self.a, self.b, self.b.conj(), self.a.conj()]);
        GroupElement { mat: m }
    }

    /// Reads an SU(1,1) matrix; fails on determinant ≠ 1 or wrong shape.
    pub fn from_group(x: &GroupElement) -> Result<Su11> {
        let m = x.matrix();
        if m.nrows() != 2 {
            return Err(Error::Dimension("Su11 needs a disc element".into()));
        }
        let s = Su11 { a: m[(0, 0)], b: m[(0, 1)] };
        let res = (m[(1, 0)] - s.b.conj()).norm() + (m[(1, 1)] - s.a.conj()).norm();
        if res > GROUP_TOL {
            return Err(Error::NotInGroup(res));
        }
        Ok(s)
    }
}

/// σ_γ for SU(1,1).
pub fn sigma_su11(x: &Su11, y: &Su11, gamma: f64) -> Complex64 {
    let xy = x.mul(y);
    let zero = Complex64::new(0.0, 0.0);
    let l = x.log_jacobian(y.origin_image()) + y.log_jacobian(zero) - xy.log_jacobian(zero);
    (l * (gamma / 2.0)).exp()
}

/// Max residuals of the group identities over random samples.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub samples: usize,
    /// |J(x⁻¹, x·z)·J(x,z) − 1|
    pub reciprocity: f64,
    /// relative residual of J(x,z)·conj J(x,w)·K(x·z, x·w) = K(z,w), K = h^{−g}
    pub kernel_transform: f64,
    /// |h(x⁻¹) − h(x)|
    pub h_inverse: f64,
    /// relative residual of J(xy,z) = J(x, y·z)·J(y,z)
    pub chain_rule: f64,
    /// |h(y⁻¹x) − h(z)h(w)/|h(z,w)|²| with z = x·0, w = y·0
    pub h_two_point: f64,
    /// |h(k x k') − h(x)| for k, k' in the stabilizer of 0
    pub h_biinvariance: f64,
    /// |x·(y·z) − (xy)·z|
    pub composition: f64,
    /// range of h(xu)/h(x) over u in a 32-point net of U_ε (ε = 0.3)
    pub h_ratio_range: (f64, f64),
}

/// Net of U_ε: transvections to 16 points at hyperbolic radius ε/2 and ε,
/// each composed with a rotation.
fn u_eps_net(n: usize, eps: f64, rng: &mut impl Rng) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(32);
    for k in 0..32 {
        let r = if k % 2 == 0 { eps / 2.0 } else { eps }.tanh();
        let mut v = random_point(n, 1.0, rng);
        let s = norm2(&v).sqrt();
        v.iter_mut().for_each(|c| *c *= r / s);
        let xv = GroupElement::transvection(&v).unwrap();
        out.push(xv.mul(&GroupElement::rotation(&random_unitary(n, rng)).unwrap()));
    }
    out
}

pub fn identity_residuals(n: usize, samples: usize, seed: u64) -> IdentityReport {
    let mut rng = crate::rng(seed);
    let g = n as f64 + 1.0;
    let one = Complex64::new(1.0, 0.0);
    let mut r = IdentityReport {
        n,
        samples,
        reciprocity: 0.0,
        kernel_transform: 0.0,
        h_inverse: 0.0,
        chain_rule: 0.0,
        h_two_point: 0.0,
        h_biinvariance: 0.0,
        composition: 0.0,
        h_ratio_range: (f64::INFINITY, 0.0),
    };
    let kern = |z: &[Complex64], w: &[Complex64]| h_point(z, w).powf(-g);
    for _ in 0..samples {
        let x = GroupElement::random(n, 0.9, &mut rng);
        let y = GroupElement::random(n, 0.9, &mut rng);
        let z = random_point(n, 0.9, &mut rng);
        let w = random_point(n, 0.9, &mut rng);
        let xz = x.act(&z).unwrap();
        let xw = x.act(&w).unwrap();
        let jxz = x.jacobian(&z).unwrap();
        r.reciprocity = r.reciprocity.max((x.inverse().jacobian(&xz).unwrap() * jxz - one).norm());
        let lhs = jxz * x.jacobian(&w).unwrap().conj() * kern(&xz, &xw);
        let rhs = kern(&z, &w);
        r.kernel_transform = r.kernel_transform.max((lhs - rhs).norm() / rhs.norm());
        r.h_inverse = r.h_inverse.max((x.inverse().h() - x.h()).abs());
        let xy = x.mul(&y);
        let yz = y.act(&z).unwrap();
        let chain = x.jacobian(&yz).unwrap() * y.jacobian(&z).unwrap();
        let jxy = xy.jacobian(&z).unwrap();
        r.chain_rule = r.chain_rule.max((jxy - chain).norm() / jxy.norm());
        let (zx, wy) = (x.origin_image(), y.origin_image());
        let two = (1.0 - norm2(&zx)) * (1.0 - norm2(&wy)) / h_point(&zx, &wy).norm_sqr();
        r.h_two_point = r.h_two_point.max((h_group(&x, &y) - two).abs());
        let k1 = GroupElement::rotation(&random_unitary(n, &mut rng)).unwrap();
        let k2 = GroupElement::rotation(&random_unitary(n, &mut rng)).unwrap();
        r.h_biinvariance = r.h_biinvariance.max((k1.mul(&x).mul(&k2).h() - x.h()).abs());
        let comp: f64 = x.act(&yz).unwrap().iter().zip(xy.act(&z).unwrap().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        r.composition = r.composition.max(comp);
    }
    let net = u_eps_net(n, 0.3, &mut rng);
    for _ in 0..100 {
        let x = GroupElement::random(n, 0.99, &mut rng);
        let hx = x.h();
        for u in &net {
            let q = x.mul(u).h() / hx;
            r.h_ratio_range.0 = r.h_ratio_range.0.min(q);
            r.h_ratio_range.1 = r.h_ratio_range.1.max(q);
        }
    }
    r
}
