use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frequency or wavelength that falls in no configured band.
    #[error("range error: {0}")]
    Range(String),

    #[error("invalid fabric configuration: {0}")]
    InvalidConfig(String),

    #[error("{what} {value} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        value: u32,
        max: u32,
    },

    #[error("transponder port P{0} is already connected")]
    PortBusy(u32),

    #[error("channel of P{trx} overlaps P{other} on degree D{degree}")]
    Contention { trx: u32, other: u32, degree: u32 },

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("no active connection on transponder port P{0}")]
    Inactive(u32),

    #[error("fabric invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Parse(String),

    #[error("{field}: {message}")]
    Semantic { field: String, message: String },
}

impl Error {
    pub(crate) fn semantic(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Semantic {
            field: field.into(),
            message: message.into(),
        }
    }
}
