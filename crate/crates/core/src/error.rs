use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid dimension {n}: need at least {min}")]
    InvalidDimension { n: usize, min: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {point:?} is not inside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("coincident points: the Green function is singular on the diagonal")]
    Singular,

    #[error("MFS fit failed: held-out boundary residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    FitFailure { residual: f64, tolerance: f64 },

    #[error("point is {distance:.3e} from a peak, closer than the far-field radius {radius:.3e}")]
    NearPeak { distance: f64, radius: f64 },

    #[error("quadrature sphere is not admissible: {0}")]
    Geometry(String),

    #[error("base points are not x-critical for any solved scale vector (best x-gradient norm {x_gradient:.3e})")]
    InconsistentBasePoints { x_gradient: f64 },

    #[error("the concentration exponent 1/(N-4) is undefined for N = {n}")]
    ExponentSingularity { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
