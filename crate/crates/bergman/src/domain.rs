//! Structural constants of bounded symmetric domains and the parameter
//! windows of the wavelet characterization and the atomic decomposition.
//!
//! Everything here is exact rational arithmetic; floats appear only in the
//! `*_f64` conveniences at the boundary.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Catalog entries. Type I(p,q) is the domain of p×q matrices with
/// operator norm < 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    Disc,
    Ball(u32),
    TypeI(u32, u32),
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::Parse(format!("unknown domain kind '{s}'"));
        if s == "disc" {
            return Ok(DomainKind::Disc);
        }
        if let Some(rest) = s.strip_prefix("ball:") {
            let n = rest.parse().map_err(|_| bad())?;
            return Ok(DomainKind::Ball(n));
        }
        let rest = s.strip_prefix("type1:").or_else(|| s.strip_prefix("typei:"));
        if let Some(rest) = rest {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let p = a.trim().parse().map_err(|_| bad())?;
            let q = b.trim().parse().map_err(|_| bad())?;
            return Ok(DomainKind::TypeI(p, q));
        }
        Err(bad())
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Disc => write!(f, "disc"),
            DomainKind::Ball(n) => write!(f, "ball:{n}"),
            DomainKind::TypeI(p, q) => write!(f, "type1:{p},{q}"),
        }
    }
}

/// Numerical invariants (n, n₁, r, a, g) of a bounded symmetric domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainParams {
    /// complex dimension
    pub n: i64,
    /// dimension of the maximal tube-type subdomain
    pub n1: i64,
    /// rank
    pub r: i64,
    /// structure constant
    pub a: Q,
    /// genus
    pub g: Q,
}

impl DomainParams {
    /// Hand entry. Checks g = (n+n₁)/r, r(r−1)a/2 = n₁−r and n ≥ n₁ ≥ r ≥ 1.
    /// At rank one the second relation is vacuous and `a` must be 0.
    pub fn from_constants(n: i64, n1: i64, r: i64, a: Q, g: Q) -> Result<Self> {
        let bad = |m: String| Err(Error::InconsistentDomain(m));
        if !(n >= n1 && n1 >= r && r >= 1) {
            return bad(format!("need n >= n1 >= r >= 1, got ({n}, {n1}, {r})"));
        }
        if g != Q::new(n + n1, r) {
            return bad(format!("g = {g} but (n+n1)/r = {}", Q::new(n + n1, r)));
        }
        if a < Q::zero() {
            return bad(format!("a = {a} is negative"));
        }
        if r == 1 {
            if !a.is_zero() {
                return bad("rank one domains store a = 0".into());
            }
        } else if q(r * (r - 1)) * a / q(2) != q(n1 - r) {
            return bad(format!("r(r-1)a/2 = {} but n1 - r = {}", q(r * (r - 1)) * a / q(2), n1 - r));
        }
        Ok(DomainParams { n, n1, r, a, g })
    }

    /// (r−1)a/2, the correction that vanishes at rank one.
    pub fn half_ra(&self) -> Q {
        q(self.r - 1) * self.a / q(2)
    }

    pub fn g_f64(&self) -> f64 {
        self.g.to_f64().unwrap()
    }

    /// Rank-one domains (disc and balls) are the ones with numerics.
    pub fn is_rank_one(&self) -> bool {
        self.r == 1
    }
}

pub fn make_domain(kind: DomainKind) -> Result<DomainParams> {
    match kind {
        DomainKind::Disc => DomainParams::from_constants(1, 1, 1, Q::zero(), q(2)),
        DomainKind::Ball(n) => {
            if n == 0 {
                return Err(Error::Precondition("ball dimension must be positive".into()));
            }
            let n = n as i64;
            DomainParams::from_constants(n, 1, 1, Q::zero(), q(n + 1))
        }
        DomainKind::TypeI(p, qq) => {
            if p == 0 || qq == 0 {
                return Err(Error::Precondition("type I dimensions must be positive".into()));
            }
            let (p, qq) = (p as i64, qq as i64);
            let r = p.min(qq);
            let n1 = r * r;
            // r(r−1)a/2 = r² − r gives a = 2 for r ≥ 2.
            let a = if r == 1 { Q::zero() } else { q(2) };
            DomainParams::from_constants(p * qq, n1, r, a, Q::new(p * qq + n1, r))
        }
    }
}

/// An interval of admissible α, with exact endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterWindow {
    pub lo: Q,
    pub hi: Q,
}

impl ParameterWindow {
    pub fn nonempty(&self) -> bool {
        self.lo < self.hi
    }

    pub fn contains(&self, alpha: Q) -> bool {
        self.lo < alpha && alpha < self.hi
    }

    pub fn contains_f64(&self, alpha: f64) -> bool {
        let (lo, hi) = self.as_f64();
        lo < alpha && alpha < hi
    }

    pub fn as_f64(&self) -> (f64, f64) {
        (self.lo.to_f64().unwrap(), self.hi.to_f64().unwrap())
    }
}

fn check_gamma(p: Q, gamma: Q, d: &DomainParams) -> Result<()> {
    if p < q(1) {
        return Err(Error::Precondition(format!("p = {p} < 1")));
    }
    let min = d.g - q(1) + d.half_ra();
    if gamma <= min {
        return Err(Error::Precondition(format!("gamma = {gamma} must exceed {min}")));
    }
    Ok(())
}

/// Range of α for which the wavelet transform characterizes A^p_α.
pub fn wavelet_window(p: Q, gamma: Q, d: &DomainParams) -> Result<ParameterWindow> {
    check_gamma(p, gamma, d)?;
    let base = d.g - q(1) - d.half_ra();
    Ok(ParameterWindow { lo: base + p * d.half_ra(), hi: base + p * (gamma - d.g + q(1)) })
}

/// Range of α for which the atomic decomposition holds.
pub fn atom_window(p: Q, gamma: Q, d: &DomainParams) -> Result<ParameterWindow> {
    check_gamma(p, gamma, d)?;
    Ok(ParameterWindow {
        lo: d.g - q(1) + (p - q(1)) * d.half_ra(),
        hi: d.g - q(1) + p * (gamma - d.g + q(1)) - d.half_ra(),
    })
}

/// Window in which the Schur-test operator T is bounded on L^p_α. Same
/// endpoints as the wavelet window.
pub fn schur_window(p: Q, gamma: Q, d: &DomainParams) -> Result<ParameterWindow> {
    wavelet_window(p, gamma, d)
}

/// Upper end of the p-range in which the Coifman–Rochberg atoms are
/// recovered, `None` meaning +∞ (rank one).
pub fn coifman_rochberg_p_range(d: &DomainParams) -> Option<Q> {
    let ra = q(d.r - 1) * d.a;
    if ra.is_zero() {
        return None;
    }
    let first = q(2) / ra;
    let second = (d.g - d.half_ra()) / (d.g - q(1));
    Some(q(1) + first.max(second))
}

pub fn coifman_rochberg_p_range_f64(d: &DomainParams) -> f64 {
    coifman_rochberg_p_range(d).map_or(f64::INFINITY, |v| v.to_f64().unwrap())
}

/// Best rational approximation of a float parameter; exact for the dyadic
/// and short decimal values used in configs.
pub fn rational(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::Precondition(format!("non-finite parameter {x}")));
    }
    // Try small denominators first so 2.5 -> 5/2 and 0.3 -> 3/10.
    for den in [1i64, 2, 4, 8, 10, 16, 100, 1000, 10_000, 1_000_000] {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return Ok(Q::new(num as i64, den));
        }
    }
    Q::approximate_float(x).ok_or_else(|| Error::Precondition(format!("cannot represent {x}")))
}

pub fn wavelet_window_f64(p: f64, gamma: f64, d: &DomainParams) -> Result<ParameterWindow> {
    wavelet_window(rational(p)?, rational(gamma)?, d)
}

pub fn atom_window_f64(p: f64, gamma: f64, d: &DomainParams) -> Result<ParameterWindow> {
    atom_window(rational(p)?, rational(gamma)?, d)
}
