use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H†| = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time-dependent propagation did not converge after {halvings} halvings (residual {residual:.3e}, tolerance {tolerance:.1e})")]
    NotConverged {
        halvings: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("no sign change of the phase error in the calibration bracket [{lo}, {hi}] ({} scan points)", scan.len())]
    NoBracket {
        lo: f64,
        hi: f64,
        /// Scanned `(kappa, wrapped phi_c)` pairs.
        scan: Vec<(f64, f64)>,
    },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
