use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("parameter {name} = {value} is out of range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("coefficients sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("normalizer {trace:e} vanishes; choose another map or unitary")]
    ZeroNormalizer { trace: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("parameter vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("moment order {got} too low, need at least {needed}")]
    OrderTooLow { needed: usize, got: usize },
    #[error("state is {dim_a}x{dim_b}, expected a qubit on the first factor")]
    NotTwoByD { dim_a: usize, dim_b: usize },
    #[error("verdict does not change sign on [0, 1]")]
    NoSignChange,
    #[error("map is not positive (min eigenvalue {min_eigenvalue:e} on a probe)")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace-annihilating map vanishes identically")]
    DegenerateMap,
    #[error("the PPT question needs a decomposable map")]
    NotDecomposable,
    #[error("channel is not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },
    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
}
