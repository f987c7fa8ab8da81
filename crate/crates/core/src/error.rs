use thiserror::Error;

/// Errors raised across the library.
///
/// The variants map one-to-one onto the CLI exit-code classes: `Domain` and
/// `FitDegenerate` are input problems, `NoConvergence`/`RootCount` are
/// numerical failures and `Capacity` is an enumeration cap being hit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} would need {required} entries (cap {cap})")]
    Capacity {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("QR iteration failed to converge after {sweeps} sweeps (n = {n})")]
    NoConvergence { n: usize, sweeps: usize },

    #[error("root certification failed: {0}")]
    RootCount(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
