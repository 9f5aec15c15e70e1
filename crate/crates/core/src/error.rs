use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two classes: input validation failures, and
/// assertion failures where a computed quantity violated a proven property
/// (Weil bound overshoot, non-real Kloosterman output, ambiguous sign). The
/// CLI maps the first class to exit code 1 and the second to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p = {p} must be an odd prime >= 3")]
    PrimeTooSmall { p: u64 },

    #[error("p = {p} exceeds the size cap {cap} (hard limit 2^31)")]
    PrimeTooLarge { p: u64, cap: u64 },

    #[error("p = {p} exceeds the naive oracle cap {cap}; pass force to override")]
    OracleCapExceeded { p: u64, cap: u64 },

    #[error("transform length {len} for p = {p} exceeds the maximum {max}")]
    TransformTooLarge { p: u64, len: usize, max: usize },

    #[error("residue {value} must be nonzero modulo {p}")]
    ZeroResidue { value: u64, p: u64 },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: String,
        lo: String,
        hi: String,
    },

    #[error("invalid window [{alpha}, {beta}]: need 0 <= alpha < beta <= pi")]
    InvalidWindow { alpha: f64, beta: f64 },

    #[error("character index {k} is principal (k = 0 mod {order})")]
    PrincipalCharacter { k: u64, order: u64 },

    #[error("discrete-log table not built for this context")]
    MissingDlogTable,

    #[error("window [{alpha}, {beta}] contains no angles")]
    EmptyWindow { alpha: f64, beta: f64 },

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("set contains 0, which is not in F_p*")]
    SetContainsZero,

    #[error("empty point list")]
    EmptyPoints,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("table for p = {found} does not match requested p = {expected}")]
    PrimeMismatch { expected: u64, found: u64 },

    #[error("table format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("Weil bound violated at a = {a}: |K|/(2 sqrt p) = {ratio}")]
    WeilViolation { a: u64, ratio: f64 },

    #[error("imaginary residue {residue:e} at a = {a} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue {
        a: u64,
        residue: f64,
        tolerance: f64,
    },

    #[error("sign of K_p({a}) is numerically ambiguous: |K| = {value:e}")]
    AmbiguousSign { a: u64, value: f64 },

    #[error("integer rounding failed in convolution at c = {c}: {value}")]
    InexactConvolution { c: u64, value: f64 },

    #[error("recomputed table differs by {diff:e}, tolerance {tolerance:e}")]
    VerificationFailed { diff: f64, tolerance: f64 },

    #[error("one or more checks failed")]
    ChecksFailed,
}

impl Error {
    /// True for failures of a proven property rather than bad input.
    pub fn is_assertion(&self) -> bool {
        matches!(
            self,
            Error::WeilViolation { .. }
                | Error::ImaginaryResidue { .. }
                | Error::AmbiguousSign { .. }
                | Error::InexactConvolution { .. }
                | Error::VerificationFailed { .. }
                | Error::ChecksFailed
        )
    }

    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        lo: impl ToString,
        hi: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            lo: lo.to_string(),
            hi: hi.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
