use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("moments do not saturate the SR-UR: relative violation {violation:.3e} exceeds {tol:.1e}")]
    NotSaturated { violation: f64, tol: f64 },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("Fock dimension {0} is too small (need at least 2)")]
    BadDim(usize),
    #[error("truncation tail mass {tail_mass:.3e} exceeds {bound:.1e}; increase the Fock dimension")]
    Truncation { tail_mass: f64, bound: f64 },
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("quadrature did not converge: est. error {est_error:.3e} > {rel_tol:.1e} after {nodes} nodes")]
    NotConverged { est_error: f64, rel_tol: f64, nodes: usize },
    #[error("measure self-normalisation failed: integral = {0}")]
    BadMeasure(f64),
    #[error("polynomial degree {degree} exceeds the maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("invalid constants: {0}")]
    BadConstants(String),
}
