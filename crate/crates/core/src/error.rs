use thiserror::Error;

/// Errors surfaced by the exact kernels and the analysis layers.
///
/// Every failure is a value; nothing in this crate panics on malformed
/// mathematical input. `is_input_error` separates "the request itself was
/// ill-formed" from "the computation is not supported for this ring",
/// which front ends map to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar orders differ: {left} vs {right}; embed explicitly before mixing")]
    OrderMismatch { left: u64, right: u64 },

    #[error("division by zero scalar")]
    DivisionByZero,

    #[error("elements belong to different rings")]
    RingMismatch,

    #[error("generic parameters present: {0}")]
    FreeParameter(String),

    #[error("invalid presentation: {0}")]
    Presentation(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("center is not rectangular; no monomial module basis is available")]
    NonRectangular,

    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("trace pairing is degenerate: determinant is zero")]
    DegenerateDiscriminant,

    #[error("invalid derivation witness: {0}")]
    InvalidWitness(String),

    #[error("unsupported for this ring: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the failure is a malformed request (bad file, bad indices,
    /// inconsistent dimensions) rather than a computation the tool declines.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Presentation(_) | Error::Input(_) | Error::RingMismatch
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
