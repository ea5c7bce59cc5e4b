use thiserror::Error;

/// Errors raised by the symbolic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("dimension must be between 1 and {max}, got {got}")]
    BadDimension { got: usize, max: usize },
    #[error("variable t{} out of range for dimension {n}", .var + 1)]
    VarOutOfRange { var: usize, n: usize },
    #[error("context mismatch: dimension {left} vs {right}")]
    ContextMismatch { left: usize, right: usize },
    #[error("power must be >= 1 for t{}", .var + 1)]
    ZeroPower { var: usize },
    #[error(
        "t{} carries both a principal value and a residue factor; \
         use pvdiv or solvediv to choose the product",
        .var + 1
    )]
    MixedFactor { var: usize },
    #[error("t{} carries two residue factors", .var + 1)]
    DuplicateResidue { var: usize },
    #[error("vector field component {} is not holomorphic", .index + 1)]
    NotHolomorphic { index: usize },
    #[error("variety generators must be non-constant monomials")]
    ConstantGenerator,
    #[error("variety needs at least one generator")]
    EmptyVariety,
    #[error("support of the current is not contained in the variety")]
    SupportNotContained,
    #[error("current is not homogeneous of anti-degree {expected}")]
    NotHomogeneous { expected: usize },
    #[error("not a monomial: {0}")]
    NotMonomial(String),
    #[error("expected a smooth form, found principal value or residue factors")]
    NotSmooth,
}

pub type Result<T> = std::result::Result<T, CalcError>;

/// Errors raised by the numerical oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error("analytic continuation has a pole at lambda = {lambda}")]
    Pole { lambda: f64 },
    #[error("integrand is not compactly supported in t{}", .var + 1)]
    SupportLeakage { var: usize },
    #[error("weight |h|^-2p is singular on a residue variable")]
    SingularWeight,
    #[error("calibration of c_{m} failed: relative spread {spread:e}")]
    Calibration { m: u32, spread: f64 },
    #[error("epsilon sequence must be positive and strictly decreasing")]
    BadSequence,
    #[error("residue power {m} exceeds the calibrated range")]
    Uncalibrated { m: u32 },
    #[error("{0}")]
    Unsupported(String),
}
