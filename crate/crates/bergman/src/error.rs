use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent domain constants: {0}")]
    InconsistentDomain(String),
    #[error("point is not strictly inside the domain (|z| = {0})")]
    NotInterior(f64),
    #[error("denominator underflow in Moebius action (|q| = {0:e})")]
    Denominator(f64),
    #[error("matrix does not preserve the indefinite form (residual {0:e})")]
    NotInGroup(f64),
    #[error("lattice cell {0} received no samples")]
    EmptyCell(usize),
    #[error("lattice would have {0} points")]
    LatticeTooLarge(usize),
    #[error("frame operator is not a contraction (rho_hat = {0})")]
    NonContraction(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
