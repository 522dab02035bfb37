use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("{op}: argument {z} lies on the branch cut (negative real axis)")]
    BranchCut { op: &'static str, z: Complex64 },

    #[error("{op}: logarithmic divergence at {at}")]
    Divergence { op: &'static str, at: f64 },

    #[error("{op}: overflow for argument {z} ({reason})")]
    Overflow {
        op: &'static str,
        z: Complex64,
        reason: String,
    },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         best estimate {best}, error bound {bound:e}"
    )]
    NonConvergence {
        best: Complex64,
        bound: f64,
        subdivisions: usize,
    },

    #[error("mode sum hit the truncation cap at N = {modes}: partial sum {partial:e}, tail bound {tail_bound:e}")]
    TruncationCap {
        partial: f64,
        tail_bound: f64,
        modes: usize,
    },

    #[error("imaginary residual {residual:e} exceeds the bound for value {value:e}")]
    ImaginaryResidual { value: f64, residual: f64 },

    #[error("negative temperature regime: fitted slope {slope} > 0 (rms residual {rms_residual:e})")]
    NegativeTemperature { slope: f64, rms_residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
