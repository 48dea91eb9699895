use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("boundary matrix (C D) has rank below 2")]
    InvalidBoundary,
    #[error("boundary conditions are not reducible (J14 = 0)")]
    NotReducible,
    #[error("invalid strip: {0}")]
    InvalidStrip(String),
    #[error("|Im lambda| * max|b| = {0:.3} exceeds the overflow guard")]
    StripTooTall(f64),
    #[error("Picard iteration did not converge: last update {last_update:.3e} after {sweeps} sweeps")]
    KernelDivergence { last_update: f64, sweeps: usize },
    #[error("zero of the determinant too close to the contour near {0}")]
    BoundaryNearZero(Complex64),
    #[error("could not localize zeros in box [{re0}, {re1}] x [{im0}, {im1}]")]
    LocalizationFailure { re0: f64, re1: f64, im0: f64, im1: f64 },
    #[error("pairing failed: {0}")]
    Pairing(String),
    #[error("{0} is not an eigenvalue (smallest singular value {1:.3e})")]
    NotAnEigenvalue(Complex64, f64),
    #[error("need at least {needed} non-degenerate pairs, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("no strictifying weight among {tried} candidates")]
    WeightNotFound { tried: usize },
    #[error("exact rational ratio tag required")]
    RationalTagRequired,
    #[error("reduction hypothesis violated: {0}")]
    ReductionHypothesis(String),
    #[error("invalid beam profile: {0}")]
    InvalidProfile(String),
    #[error("coupling parameters beta are nonzero; the problem does not decouple")]
    NotDecoupled,
    #[error("sub-problem {0} has non-regular separated boundary conditions")]
    NonRegularSubproblem(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
