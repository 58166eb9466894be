//! Atomic decomposition on the disc from a hyperbolic lattice in G.
//!
//! Lattice points x_i = x_{w_i}·k_{θ_i} sit on rings of hyperbolic radius
//! kε (distance artanh|w|), with ⌈π sinh(2kε)/ε⌉ points per ring. The
//! partition of unity is the family of indicator functions of the polar
//! cells [r_k ± ε/2] × arc × θ-arc. Haar measure in these coordinates is
//! sinh(2r) dr dφ/2π · dθ/2π, so each cell carries Gauss–Legendre nodes
//! in u = cosh(2r)/2, φ and θ with exact masses.
//!
//! Everything acting on functions happens on the coefficient space P_N of
//! degree ≤ N in the normalized basis of A²_γ. With a_i = P_N π(x_i)ψ and
//! v_i = Σ_{y ∈ cell i} w_y σ(y, y⁻¹x_i) P_N π(y)ψ,
//!
//! - λ̃_i(W_ψ f) = ⟨f, v_i⟩,
//! - S W_ψ(f) = W_ψ(T f) with T = Σ_i a_i v_i*,
//!
//! and S⁻¹ becomes a Neumann series in I − T on P_N.
//!
//! A section lattice (one θ-node at 0) is enough when π(k)ψ is a multiple of
//! ψ, as for ψ = 1: then y ↦ W_ψ f(y)·π(y)ψ is right-K-invariant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{atom_window, rational, DomainParams};
use crate::geometry::{disc_distance, sigma_su11, Su11};
use crate::holo::{norm_table, CoeffFunction, QuadratureGrid};
use crate::quad::gauss_legendre;
use crate::rep::{apply_rep_series, formal_dimension};
use crate::{Error, Result};

pub const MAX_LATTICE: usize = 1_000_000;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Polar cell in hyperbolic radius r, angle φ of w, and θ of k_θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub r: (f64, f64),
    pub phi: (f64, f64),
    pub theta: (f64, f64),
}

impl Cell {
    pub fn contains(&self, r: f64, phi: f64, theta: f64) -> bool {
        let tau = 2.0 * std::f64::consts::PI;
        let in_arc = |x: f64, (lo, hi): (f64, f64)| {
            if hi - lo >= tau - 1e-12 {
                return true;
            }
            (x - lo).rem_euclid(tau) < hi - lo
        };
        r >= self.r.0 && r < self.r.1 && in_arc(phi, self.phi) && in_arc(theta, self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePoint {
    pub w: Complex64,
    pub theta: f64,
    pub ring: usize,
    pub cell: Cell,
    pub cell_mass: f64,
}

impl LatticePoint {
    pub fn element(&self) -> Su11 {
        Su11::polar(self.w, self.theta)
    }

    pub fn h(&self) -> f64 {
        1.0 - self.w.norm_sqr()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lattice {
    pub epsilon: f64,
    pub boundary_radius: f64,
    /// θ-nodes per K-fiber; 1 is the section lattice
    pub fibers: usize,
    /// hyperbolic radius of the covered region
    pub outer_radius: f64,
    pub points: Vec<LatticePoint>,
}

/// Rings at r_k = kε with tanh r_k ≤ boundary_radius. `fibers` = 1 gives
/// the section lattice θ = 0. Otherwise each K-fiber has `fibers` cells on
/// θ ∈ (−π/2, π/2]: the center −I = k_π acts on A²_γ by a scalar, so
/// x_i and x_i·(−I) carry the same atom up to phase and the integrand of
/// S is invariant under y ↦ y·(−I). Integrals over G reduce to this half
/// range with dθ/π.
pub fn build_lattice(epsilon: f64, boundary_radius: f64, fibers: usize, d: &DomainParams) -> Result<Lattice> {
    if d.n != 1 {
        return Err(Error::Precondition("lattices are built on the disc only".into()));
    }
    if !(epsilon > 0.0) || !(0.0..1.0).contains(&boundary_radius) || fibers == 0 {
        return Err(Error::Precondition(format!(
            "need epsilon > 0, 0 <= boundary_radius < 1, fibers >= 1; got {epsilon}, {boundary_radius}, {fibers}"
        )));
    }
    let pi = std::f64::consts::PI;
    let rmax = boundary_radius.atanh();
    let rings = (rmax / epsilon + 1e-12).floor() as usize;
    let mut count = 1usize;
    for k in 1..=rings {
        count += ((pi * (2.0 * k as f64 * epsilon).sinh()) / epsilon).ceil() as usize;
        if count * fibers > MAX_LATTICE {
            return Err(Error::LatticeTooLarge(count * fibers));
        }
    }
    let thetas: Vec<(f64, (f64, f64))> = if fibers == 1 {
        vec![(0.0, (-pi, pi))]
    } else {
        let step = pi / fibers as f64;
        (0..fibers).map(|j| {
            let c = -pi / 2.0 + step * (j as f64 + 0.5);
            (c, (c - step / 2.0, c + step / 2.0))
        }).collect()
    };
    let fiber_mass = 1.0 / fibers as f64;
    let mut points = Vec::with_capacity(count * fibers);
    let cmass = |lo: f64, hi: f64, dphi: f64| ((2.0 * hi).cosh() - (2.0 * lo).cosh()) / 2.0 * dphi / (2.0 * pi);
    for &(theta, trange) in &thetas {
        let r = (0.0, epsilon / 2.0);
        let cell = Cell { r, phi: (-pi, pi), theta: trange };
        points.push(LatticePoint { w: zero(), theta, ring: 0, cell, cell_mass: cmass(r.0, r.1, 2.0 * pi) * fiber_mass });
    }
    for k in 1..=rings {
        let rk = k as f64 * epsilon;
        let nk = ((pi * (2.0 * rk).sinh()) / epsilon).ceil() as usize;
        let dphi = 2.0 * pi / nk as f64;
        let shift = if k % 2 == 1 { 0.5 } else { 0.0 };
        let r = (rk - epsilon / 2.0, rk + epsilon / 2.0);
        for j in 0..nk {
            let phi = dphi * (j as f64 + shift);
            let w = Complex64::from_polar(rk.tanh(), phi);
            for &(theta, trange) in &thetas {
                let cell = Cell { r, phi: (phi - dphi / 2.0, phi + dphi / 2.0), theta: trange };
                points.push(LatticePoint { w, theta, ring: k, cell, cell_mass: cmass(r.0, r.1, dphi) * fiber_mass });
            }
        }
    }
    Ok(Lattice { epsilon, boundary_radius, fibers, outer_radius: rings as f64 * epsilon + epsilon / 2.0, points })
}

/// θ-cells per K-fiber for spacing ε: the ⌈2π/ε⌉ angles of a full circle
/// in θ, of which the half range keeps one per center orbit.
pub fn default_fibers(epsilon: f64) -> usize {
    ((2.0 * std::f64::consts::PI / epsilon).ceil() as usize).div_ceil(2)
}

/// |U_ε| for U_ε = {x_w k_θ : artanh|w| ≤ ε, |θ| ≤ ε}: sinh²(ε)·ε/π.
pub fn u_eps_mass(epsilon: f64) -> f64 {
    epsilon.sinh().powi(2) * epsilon.min(std::f64::consts::PI) / std::f64::consts::PI
}

/// max(artanh|w|, |θ|) for u = x_w k_θ; u ∈ U_ε iff this is ≤ ε.
pub fn u_radius(u: &Su11) -> f64 {
    let (w, theta) = u.to_polar();
    disc_distance(zero(), w).max(theta.abs())
}

/// Weighted quadrature nodes inside the cells.
#[derive(Debug, Clone)]
pub struct CellNodes {
    pub points: Vec<Su11>,
    pub weights: Vec<f64>,
    pub cell: Vec<usize>,
}

/// Per-cell product Gauss–Legendre nodes, `order` per coordinate (θ only for
/// fibered lattices).
pub fn cell_nodes(l: &Lattice, order: usize) -> CellNodes {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut cell = Vec::new();
    let pi = std::f64::consts::PI;
    for (i, p) in l.points.iter().enumerate() {
        let c = p.cell;
        let ur = gauss_legendre(order, (2.0 * c.r.0).cosh() / 2.0, (2.0 * c.r.1).cosh() / 2.0);
        let pr = gauss_legendre(order, c.phi.0, c.phi.1);
        // fibers span θ ∈ (−π/2, π/2] with dθ/π, see `build_lattice`
        let tr = if l.fibers == 1 {
            crate::quad::Rule { nodes: vec![0.0], weights: vec![pi] }
        } else {
            gauss_legendre(order, c.theta.0, c.theta.1)
        };
        for (u, wu) in ur.nodes.iter().zip(&ur.weights) {
            let r = (2.0 * u).acosh() / 2.0;
            for (phi, wp) in pr.nodes.iter().zip(&pr.weights) {
                let w = Complex64::from_polar(r.tanh(), *phi);
                for (th, wt) in tr.nodes.iter().zip(&tr.weights) {
                    points.push(Su11::polar(w, *th));
                    weights.push(wu * wp / (2.0 * pi) * wt / pi);
                    cell.push(i);
                }
            }
        }
    }
    CellNodes { points, weights, cell }
}

/// Certificates of the lattice: partition, covering and masses.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeCertificate {
    /// every test point lies in exactly one cell
    pub partition_ok: bool,
    /// max over cell nodes of u_radius(x_i⁻¹ y) for y in cell i, to compare with ε
    pub cell_radius: f64,
    /// max over test points of the distance to the nearest x_i U_ε
    pub cover_radius: f64,
    pub min_mass: f64,
    pub max_mass: f64,
    pub u_mass: f64,
    /// Σ cell masses against the Haar mass of the covered region
    pub mass_residual: f64,
}

pub fn certify_lattice(l: &Lattice, tests: usize, seed: u64) -> LatticeCertificate {
    use rand::Rng;
    let pi = std::f64::consts::PI;
    let mut rng = crate::rng(seed);
    let rout = l.outer_radius;
    let test_pts: Vec<(f64, f64, f64)> = (0..tests)
        .map(|_| {
            // uniform in Haar measure of the covered hyperbolic disc
            let u: f64 = rng.gen_range(0.5..(2.0 * rout).cosh() / 2.0);
            let r = ((2.0 * u).acosh() / 2.0).min(rout - 1e-12);
            let theta = if l.fibers == 1 { 0.0 } else { rng.gen_range(-pi / 2.0..pi / 2.0) };
            (r, rng.gen_range(-pi..pi), theta)
        })
        .collect();
    let partition_ok = test_pts.par_iter().all(|&(r, phi, th)| {
        l.points.iter().filter(|p| p.cell.contains(r, phi, th)).count() == 1
    });
    let elems: Vec<Su11> = l.points.iter().map(|p| p.element()).collect();
    let cover_radius = test_pts
        .par_iter()
        .map(|&(r, phi, th)| {
            let y = Su11::polar(Complex64::from_polar(r.tanh(), phi), th);
            elems.iter().map(|x| u_radius(&x.inv().mul(&y))).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    let nodes = cell_nodes(l, 3);
    let mut corner = nodes.clone();
    // include cell corners so the whole cell is probed, not just interior nodes
    for (i, p) in l.points.iter().enumerate() {
        for r in [p.cell.r.0, p.cell.r.1 - 1e-12] {
            for phi in [p.cell.phi.0, p.cell.phi.1] {
                for th in [p.cell.theta.0, p.cell.theta.1] {
                    let th = if l.fibers == 1 { 0.0 } else { th };
                    corner.points.push(Su11::polar(Complex64::from_polar(r.tanh(), phi), th));
                    corner.cell.push(i);
                }
            }
        }
    }
    let cell_radius = corner
        .points
        .par_iter()
        .zip(&corner.cell)
        .map(|(y, &i)| u_radius(&elems[i].inv().mul(y)))
        .reduce(|| 0.0, f64::max);
    let masses: Vec<f64> = l.points.iter().map(|p| p.cell_mass).collect();
    let total: f64 = masses.iter().sum();
    let region = (rout.sinh()).powi(2);
    LatticeCertificate {
        partition_ok,
        cell_radius,
        cover_radius,
        min_mass: masses.iter().cloned().fold(f64::INFINITY, f64::min),
        max_mass: masses.iter().cloned().fold(0.0, f64::max),
        u_mass: u_eps_mass(l.epsilon),
        mass_residual: (total - region).abs() / region,
    }
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// JSON list of (w_re, w_im, θ, cell_mass).
    pub fn to_json(&self) -> String {
        let rows: Vec<(f64, f64, f64, f64)> =
            self.points.iter().map(|p| (p.w.re, p.w.im, p.theta, p.cell_mass)).collect();
        serde_json::to_string(&rows).unwrap()
    }
}

/// λ̃_i = Σ_{y ∈ cell i} F(y)·conj σ(y, y⁻¹x_i)·w_y for F sampled at the
/// nodes. Fails when a cell holds no node.
pub fn analysis_functionals(values: &[Complex64], nodes: &CellNodes, l: &Lattice, gamma: f64) -> Result<Vec<Complex64>> {
    if values.len() != nodes.points.len() {
        return Err(Error::Dimension("one value per node".into()));
    }
    let mut out = vec![zero(); l.len()];
    let mut seen = vec![false; l.len()];
    let elems: Vec<Su11> = l.points.iter().map(|p| p.element()).collect();
    for ((y, w), (&i, v)) in nodes.points.iter().zip(&nodes.weights).zip(nodes.cell.iter().zip(values)) {
        let yx = y.inv().mul(&elems[i]);
        out[i] += v * sigma_su11(y, &yx, gamma).conj() * w;
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::EmptyCell(i));
    }
    Ok(out)
}

/// SF(y) = Σ_i λ̃_i(F)·conj σ(x_i, x_i⁻¹y)·W_ψ(ψ)(x_i⁻¹y), evaluated directly
/// at the given points. Quadratic cost; used to cross-check `FrameModel`.
pub fn s_apply(lambda: &[Complex64], l: &Lattice, psi: &CoeffFunction, at: &[Su11]) -> Result<Vec<Complex64>> {
    let gamma = psi.gamma;
    let elems: Vec<Su11> = l.points.iter().map(|p| p.element()).collect();
    at.par_iter()
        .map(|y| {
            let mut acc = zero();
            for (x, c) in elems.iter().zip(lambda) {
                if *c == zero() {
                    continue;
                }
                let xy = x.inv().mul(y);
                let k = crate::rep::wavelet_su11(psi, psi, &xy)?;
                acc += c * sigma_su11(x, &xy, gamma).conj() * k;
            }
            Ok(acc)
        })
        .collect()
}

/// (Σ |c_i|^p h(x_i)^e)^{1/p} with e = α − γp/2.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceNorm {
    pub p: f64,
    pub weight_exp: f64,
    pub weights: Vec<f64>,
}

impl SequenceNorm {
    pub fn new(l: &Lattice, p: f64, alpha: f64, gamma: f64) -> SequenceNorm {
        let weight_exp = alpha - gamma * p / 2.0;
        SequenceNorm { p, weight_exp, weights: l.points.iter().map(|x| x.h().powf(weight_exp)).collect() }
    }

    pub fn norm(&self, c: &[Complex64]) -> f64 {
        c.iter().zip(&self.weights).map(|(c, w)| c.norm().powf(self.p) * w).sum::<f64>().powf(1.0 / self.p)
    }
}

/// The Galerkin form of the lattice operators on P_N.
#[derive(Debug, Clone)]
pub struct FrameModel {
    pub gamma: f64,
    pub degree: usize,
    pub psi: CoeffFunction,
    /// columns P_N π(x_i)ψ
    pub atoms: DMatrix<Complex64>,
    /// columns v_i
    pub rows: DMatrix<Complex64>,
    /// T = A V*
    pub t: DMatrix<Complex64>,
    pub nodes: CellNodes,
    /// columns P_N π(y)ψ for the nodes
    pub node_vectors: DMatrix<Complex64>,
}

fn to_vec(f: &CoeffFunction) -> DVector<Complex64> {
    DVector::from_column_slice(&f.coeffs)
}

fn from_vec(v: &DVector<Complex64>, degree: usize, gamma: f64) -> CoeffFunction {
    CoeffFunction { gamma, n: 1, degree, coeffs: v.iter().copied().collect() }
}

impl FrameModel {
    /// `psi` is used as given; normalize it with `rep::normalize_psi`.
    pub fn new(l: &Lattice, psi: &CoeffFunction, degree: usize, node_order: usize) -> Result<FrameModel> {
        if psi.n != 1 {
            return Err(Error::Dimension("frame model is for the disc".into()));
        }
        if l.fibers == 1 {
            let nz = psi.coeffs.iter().filter(|c| c.norm() > 0.0).count();
            if nz > 1 {
                return Err(Error::Precondition("a section lattice needs psi = c·z^m; use K-fibers".into()));
            }
        }
        let gamma = psi.gamma;
        let dim = degree + 1;
        let nodes = cell_nodes(l, node_order);
        let elems: Vec<Su11> = l.points.iter().map(|p| p.element()).collect();
        let atom_cols: Vec<Vec<Complex64>> = elems
            .par_iter()
            .map(|x| apply_rep_series(x, psi, degree).map(|f| f.coeffs))
            .collect::<Result<_>>()?;
        let node_cols: Vec<Vec<Complex64>> = nodes
            .points
            .par_iter()
            .map(|y| apply_rep_series(y, psi, degree).map(|f| f.coeffs))
            .collect::<Result<_>>()?;
        let mut rows = DMatrix::from_element(dim, l.len(), zero());
        let mut seen = vec![false; l.len()];
        for (k, (y, &i)) in nodes.points.iter().zip(&nodes.cell).enumerate() {
            let yx = y.inv().mul(&elems[i]);
            let s = sigma_su11(y, &yx, gamma) * nodes.weights[k];
            for m in 0..dim {
                rows[(m, i)] += s * node_cols[k][m];
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyCell(i));
        }
        let atoms = DMatrix::from_fn(dim, l.len(), |m, i| atom_cols[i][m]);
        let node_vectors = DMatrix::from_fn(dim, nodes.points.len(), |m, k| node_cols[k][m]);
        let t = &atoms * rows.adjoint();
        Ok(FrameModel { gamma, degree, psi: psi.clone(), atoms, rows, t, nodes, node_vectors })
    }

    fn check(&self, f: &CoeffFunction) -> Result<DVector<Complex64>> {
        if f.n != 1 || (f.gamma - self.gamma).abs() > 1e-12 {
            return Err(Error::Precondition("function must be in the disc basis of the model's gamma".into()));
        }
        Ok(to_vec(&f.with_degree(self.degree)))
    }

    /// λ̃(W_ψ f).
    pub fn analysis(&self, f: &CoeffFunction) -> Result<Vec<Complex64>> {
        let v = self.check(f)?;
        Ok((self.rows.adjoint() * v).iter().copied().collect())
    }

    /// Σ c_i π(x_i)ψ.
    pub fn synthesis(&self, c: &[Complex64]) -> CoeffFunction {
        from_vec(&(&self.atoms * DVector::from_column_slice(c)), self.degree, self.gamma)
    }

    pub fn t_apply(&self, f: &CoeffFunction) -> Result<CoeffFunction> {
        Ok(from_vec(&(&self.t * self.check(f)?), self.degree, self.gamma))
    }

    /// W_ψ(g) at the cell nodes, for g in P_N.
    pub fn sample_wavelet(&self, g: &CoeffFunction) -> Result<Vec<Complex64>> {
        let v = self.check(g)?;
        Ok((self.node_vectors.adjoint() * v).iter().copied().collect())
    }

    /// ‖F‖ on the lattice region in L^p_e(G).
    fn node_norm(&self, values: &[Complex64], p: f64, weight_exp: f64) -> f64 {
        values
            .iter()
            .zip(&self.nodes.weights)
            .zip(&self.nodes.points)
            .map(|((v, w), y)| w * v.norm().powf(p) * y.h().powf(weight_exp))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// ρ̂ = ‖F − SF‖/‖F‖ for F = W_ψ(f) in L^p_{α−γp/2}(G) over the lattice nodes.
    pub fn rho_hat(&self, f: &CoeffFunction, p: f64, alpha: f64) -> Result<f64> {
        let e = alpha - self.gamma * p / 2.0;
        let ff = self.sample_wavelet(f)?;
        let diff = f.with_degree(self.degree).sub(&self.t_apply(f)?);
        let dd = self.sample_wavelet(&diff)?;
        let base = self.node_norm(&ff, p, e);
        Ok(if base > 0.0 { self.node_norm(&dd, p, e) / base } else { 0.0 })
    }

    /// Fraction of ∫_G |W_ψ f|² = d_γ⁻¹‖ψ‖²‖f‖² outside the lattice region.
    pub fn dropped_mass(&self, f: &CoeffFunction) -> Result<f64> {
        let ff = self.sample_wavelet(f)?;
        let inside: f64 = ff.iter().zip(&self.nodes.weights).map(|(v, w)| w * v.norm_sqr()).sum();
        let total = self.psi.norm().powi(2) / formal_dimension(1, self.gamma) * f.norm().powi(2);
        Ok(if total > 0.0 { 1.0 - inside / total } else { 0.0 })
    }

    /// Ridge least squares of f onto span{a_i} in the A²_α metric,
    /// λ = A*D(DAA*D + μI)⁻¹Df with μ = ridge·tr(DAA*D)/(N+1).
    pub fn least_squares(&self, f: &CoeffFunction, alpha: f64, ridge: f64) -> Result<(Vec<Complex64>, CoeffFunction)> {
        let v = self.check(f)?;
        let dscale = metric_scale(self.degree, self.gamma, alpha);
        let da = DMatrix::from_fn(self.atoms.nrows(), self.atoms.ncols(), |m, i| self.atoms[(m, i)] * dscale[m]);
        let gram = &da * da.adjoint();
        let mu = ridge * gram.diagonal().iter().map(|c| c.re).sum::<f64>() / gram.nrows() as f64;
        let mut reg = gram.clone();
        for k in 0..reg.nrows() {
            reg[(k, k)] += Complex64::new(mu, 0.0);
        }
        let df = DVector::from_fn(v.len(), |m, _| v[m] * dscale[m]);
        let y = reg.lu().solve(&df).ok_or_else(|| Error::Precondition("singular least-squares system".into()))?;
        let lambda = da.adjoint() * y;
        let lambda: Vec<Complex64> = lambda.iter().copied().collect();
        let fit = self.synthesis(&lambda);
        Ok((lambda, fit))
    }
}

/// ‖z^m‖_α/‖z^m‖_γ per basis element: the A²_α metric in γ-coordinates.
fn metric_scale(degree: usize, gamma: f64, alpha: f64) -> Vec<f64> {
    let na = norm_table(1, degree, alpha);
    let ng = norm_table(1, degree, gamma);
    na.iter().zip(&ng).map(|(a, g)| a / g).collect()
}

/// ‖f‖_{A^p_α} on the disc: exact for p = 2, quadrature otherwise.
pub fn disc_norm(f: &CoeffFunction, p: f64, alpha: f64) -> Result<f64> {
    if (p - 2.0).abs() < 1e-15 {
        return Ok(f.norm_in(alpha));
    }
    let grid = QuadratureGrid::for_degree(1, alpha, f.degree)?;
    Ok(grid.lp_alpha_norm(f, p)?.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub lambda: Vec<Complex64>,
    #[serde(skip)]
    pub f_hat: CoeffFunction,
    pub rel_error: f64,
    /// rel_error after K = 0, 1, ..., neumann_terms
    pub errors_by_terms: Vec<f64>,
    pub rho_hat: f64,
    pub oracle_error: f64,
    pub lambda_norm: f64,
    pub f_norm: f64,
    pub dropped_mass: f64,
    pub in_window: bool,
}

/// λ = λ̃(S⁻¹W_ψ f) with S⁻¹ ≈ Σ_{k ≤ K}(I − S)^k, and f̂ = Σ λ_i π(x_i)ψ.
pub fn reconstruct(
    model: &FrameModel,
    l: &Lattice,
    f: &CoeffFunction,
    p: f64,
    alpha: f64,
    neumann_terms: usize,
    d: &DomainParams,
) -> Result<Reconstruction> {
    let gamma = model.gamma;
    let in_window = atom_window(rational(p)?, rational(gamma)?, d)?.contains(rational(alpha)?);
    let f = f.with_degree(model.degree);
    let f_norm = disc_norm(&f, p, alpha)?;
    let seq = SequenceNorm::new(l, p, alpha, gamma);
    if f_norm == 0.0 {
        return Ok(Reconstruction {
            lambda: vec![zero(); l.len()],
            f_hat: f.clone(),
            rel_error: 0.0,
            errors_by_terms: vec![0.0; neumann_terms + 1],
            rho_hat: 0.0,
            oracle_error: 0.0,
            lambda_norm: 0.0,
            f_norm: 0.0,
            dropped_mass: 0.0,
            in_window,
        });
    }
    let rho_hat = model.rho_hat(&f, p, alpha)?;
    if rho_hat >= 1.0 {
        return Err(Error::NonContraction(rho_hat));
    }
    let fv = to_vec(&f);
    let mut term = fv.clone();
    let mut acc = fv.clone();
    let mut errors_by_terms = Vec::with_capacity(neumann_terms + 1);
    let err_of = |acc: &DVector<Complex64>| -> Result<(Vec<Complex64>, CoeffFunction, f64)> {
        let lambda: Vec<Complex64> = (model.rows.adjoint() * acc).iter().copied().collect();
        let fh = model.synthesis(&lambda);
        let e = disc_norm(&f.sub(&fh), p, alpha)? / f_norm;
        Ok((lambda, fh, e))
    };
    let mut last = err_of(&acc)?;
    errors_by_terms.push(last.2);
    for _ in 0..neumann_terms {
        term = &term - &model.t * &term;
        acc += &term;
        last = err_of(&acc)?;
        errors_by_terms.push(last.2);
    }
    let (lambda, f_hat, rel_error) = last;
    let (_, fit) = model.least_squares(&f, alpha, 1e-8)?;
    let oracle_error = disc_norm(&f.sub(&fit), p, alpha)? / f_norm;
    Ok(Reconstruction {
        lambda_norm: seq.norm(&lambda),
        lambda,
        f_hat,
        rel_error,
        errors_by_terms,
        rho_hat,
        oracle_error,
        f_norm,
        dropped_mass: model.dropped_mass(&f)?,
        in_window,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub g_norm: f64,
    pub c_norm: f64,
    pub ratio: f64,
}

/// g = Σ c_i π(x_i)ψ with ‖g‖_{A^p_α}/‖c‖_{ℓ^p_{α−γp/2}}.
pub fn synthesize(c: &[Complex64], model: &FrameModel, l: &Lattice, p: f64, alpha: f64) -> Result<(CoeffFunction, SynthesisReport)> {
    if c.len() != l.len() {
        return Err(Error::Dimension("one coefficient per lattice point".into()));
    }
    let g = model.synthesis(c);
    let g_norm = disc_norm(&g, p, alpha)?;
    let c_norm = SequenceNorm::new(l, p, alpha, model.gamma).norm(c);
    Ok((g, SynthesisReport { g_norm, c_norm, ratio: if c_norm > 0.0 { g_norm / c_norm } else { 0.0 } }))
}

/// Integral form (∫_G |Σ |c_i| 1_{x_iU_ε}|^p h^e dx)^{1/p} against the
/// sequence norm, with the bounds implied by h(xu)/h(x) ∈ [C₁, C₂] on U_ε
/// and the overlap number M:
/// (|U|·min C^e)^{1/p} ≤ integral/sequence ≤ (M^{p−1}|U|·max C^e)^{1/p}.
#[derive(Debug, Clone, Serialize)]
pub struct SolidNormCheck {
    pub sequence: f64,
    pub integral: f64,
    pub lower: f64,
    pub upper: f64,
    pub overlap: usize,
    pub c1: f64,
    pub c2: f64,
    pub within: bool,
}

/// The h-ratio constants of U_ε: [C₁, C₂] ⊇ {h(xu)/h(x)}. On the disc the
/// extreme values are e^{∓2ε} (attained in the limit |x·0| → 1).
pub fn u_eps_h_constants(epsilon: f64) -> (f64, f64) {
    ((-2.0 * epsilon).exp(), (2.0 * epsilon).exp())
}

pub fn solid_norm_check(
    c: &[Complex64],
    l: &Lattice,
    p: f64,
    alpha: f64,
    gamma: f64,
    radial_order: usize,
    angular_order: usize,
) -> Result<SolidNormCheck> {
    if c.len() != l.len() {
        return Err(Error::Dimension("one coefficient per lattice point".into()));
    }
    if l.fibers != 1 {
        return Err(Error::Precondition("the integral form is evaluated on section lattices".into()));
    }
    let eps = l.epsilon;
    let e = alpha - gamma * p / 2.0;
    let pi = std::f64::consts::PI;
    let seq = SequenceNorm::new(l, p, alpha, gamma).norm(c);
    let elems: Vec<Su11> = l.points.iter().map(|x| x.element()).collect();
    // the sets x_iU_ε reach hyperbolic radius outer + ε
    let rmax = l.outer_radius + eps;
    let ur = gauss_legendre(radial_order, 0.5, (2.0 * rmax).cosh() / 2.0);
    let nodes: Vec<(f64, f64)> = ur.nodes.iter().copied().zip(ur.weights.iter().copied()).collect();
    let parts: Vec<(f64, usize)> = nodes
        .par_iter()
        .map(|&(u, wu)| {
            let r = (2.0 * u).acosh() / 2.0;
            let mut acc = 0.0;
            let mut overlap = 0;
            for a in 0..angular_order {
                let phi = 2.0 * pi * (a as f64 + 0.5) / angular_order as f64;
                let w = Complex64::from_polar(r.tanh(), phi);
                let y = Su11::polar(w, 0.0);
                // θ-intervals [−θ' − ε, −θ' + ε] of the sets containing y·k_θ
                let mut ivs: Vec<(f64, f64, f64)> = Vec::new();
                for (x, ci) in elems.iter().zip(c) {
                    let u = x.inv().mul(&y);
                    let (wu_, th) = u.to_polar();
                    if disc_distance(zero(), wu_) <= eps {
                        ivs.push((-th - eps, -th + eps, ci.norm()));
                    }
                }
                let (val, m) = theta_integral(&ivs, p);
                overlap = overlap.max(m);
                acc += val / angular_order as f64;
            }
            let h = 1.0 / r.cosh().powi(2);
            (wu * acc * h.powf(e), overlap)
        })
        .collect();
    let integral = parts.iter().map(|x| x.0).sum::<f64>().powf(1.0 / p);
    let overlap = parts.iter().map(|x| x.1).max().unwrap_or(0).max(1);
    let (c1, c2) = u_eps_h_constants(eps);
    let (lo_c, hi_c) = if e >= 0.0 { (c1.powf(e), c2.powf(e)) } else { (c2.powf(e), c1.powf(e)) };
    let um = u_eps_mass(eps);
    let lower = (um * lo_c).powf(1.0 / p) * seq;
    let upper = ((overlap as f64).powf(p - 1.0) * um * hi_c).powf(1.0 / p) * seq;
    Ok(SolidNormCheck {
        sequence: seq,
        integral,
        lower,
        upper,
        overlap,
        c1,
        c2,
        within: lower <= integral * (1.0 + 1e-9) && integral <= upper * (1.0 + 1e-9),
    })
}

/// ∫_{−π}^{π} |Σ a_i 1_{I_i}(θ)|^p dθ/2π for intervals of length < 2π, taken
/// mod 2π; also returns the max overlap.
fn theta_integral(ivs: &[(f64, f64, f64)], p: f64) -> (f64, usize) {
    if ivs.is_empty() {
        return (0.0, 0);
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut events: Vec<(f64, f64, i64)> = Vec::new();
    for &(lo, hi, a) in ivs {
        let start = lo.rem_euclid(tau);
        let end = start + (hi - lo).min(tau);
        events.push((start, a, 1));
        if end <= tau {
            events.push((end, -a, -1));
        } else {
            events.push((tau, -a, -1));
            events.push((0.0, a, 1));
            events.push((end - tau, -a, -1));
        }
    }
    events.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut s = 0.0f64;
    let mut level = 0.0f64;
    let mut count = 0i64;
    let mut max_count = 0i64;
    let mut prev = 0.0;
    for (x, da, dc) in events {
        s += level.max(0.0f64).powf(p) * (x - prev);
        level += da;
        count += dc;
        max_count = max_count.max(count);
        prev = x;
    }
    (s / tau, max_count as usize)
}

/// The atom (K²(z,w)/K(w,w))^{α/(gp)}·(K(z,w)/K(w,w))^{θ/p} with K = h^{−g},
/// i.e. h(z,w)^{−(2α+gθ)/p}·h(w)^{(α+gθ)/p} with principal powers.
pub fn coifman_rochberg_atom(z: &[Complex64], w: &[Complex64], p: f64, alpha: f64, theta: f64, d: &DomainParams) -> Complex64 {
    let g = d.g_f64();
    let hzw = crate::geometry::h_point(z, w);
    let hw = 1.0 - crate::geometry::norm2(w);
    (-(2.0 * alpha + g * theta) / p * hzw.ln()).exp() * hw.powf((alpha + g * theta) / p)
}
