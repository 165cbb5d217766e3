//! Numeric slack shared by every module.

/// One record of all thresholds. Strict inequalities are decided against
/// `strict` so that rounding noise never flips a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub psd_floor: f64,
    pub reconstruction: f64,
    pub trace: f64,
    pub unitarity: f64,
    pub zero_normalizer: f64,
    pub strict: f64,
    pub max_jacobi_sweeps: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        psd_floor: -1e-10,
        reconstruction: 1e-10,
        trace: 1e-12,
        unitarity: 1e-10,
        zero_normalizer: 1e-12,
        strict: 1e-9,
        max_jacobi_sweeps: 100,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
