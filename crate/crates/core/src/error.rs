use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("covariance matrix is not physical: smallest symplectic eigenvalue {min_symplectic_eigenvalue} < 1 - {tolerance}")]
    NotPhysical {
        min_symplectic_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("matrix is not symplectic: |S Ω Sᵀ - Ω|∞ = {residual:e}")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not symmetric: max |V - Vᵀ| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("covariance matrix is singular")]
    Singular,

    #[error("Fock cutoff {cutoff} too small: discarded tail mass {tail_mass:e} exceeds {limit:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        limit: f64,
    },

    #[error("series did not reach tolerance {tolerance:e} within {max_terms} terms")]
    NotConverged { tolerance: f64, max_terms: usize },

    #[error("degenerate threshold: {0}")]
    Degenerate(String),

    #[error("standard form (a={a}, b={b}, c={c}) has no pure-loss + amplifier preimage: {reason}")]
    NoTmstPreimage {
        a: f64,
        b: f64,
        c: f64,
        reason: &'static str,
    },

    #[error("Taylor oracle supports total degree up to {max}, got {degree}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("infeasible scan: {0}")]
    InfeasibleScan(String),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    check_range(name, value, 0.0, f64::INFINITY, "[0, ∞)")
}
