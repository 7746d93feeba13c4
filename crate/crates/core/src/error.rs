use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("promise violated: f = {f} is {f_kind} but g = {g} is {g_kind}")]
    PromiseViolation {
        f: String,
        f_kind: &'static str,
        g: String,
        g_kind: &'static str,
    },

    /// A result failed one of its own consistency checks.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
