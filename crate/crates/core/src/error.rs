use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dipole field does not satisfy `q B0 = kappa p0`.
    #[error("dipole field is not matched to the design orbit (q*B0 = {q_b0}, kappa*p0 = {kappa_p0}); {hint}")]
    Unmatched {
        q_b0: f64,
        kappa_p0: f64,
        hint: &'static str,
    },

    /// The wavefunction carries non-negligible amplitude at the grid edge.
    #[error(
        "wavepacket reached the grid boundary at s = {s} (edge/peak amplitude ratio {ratio:e}); enlarge the grid extent"
    )]
    BoundaryGuard { s: f64, ratio: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Scenario file problem, with the 1-based line number when known.
    #[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
    Config { line: Option<usize>, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
