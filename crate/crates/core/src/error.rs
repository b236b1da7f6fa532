use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm} nm is outside the tabulated range [{min_nm}, {max_nm}] nm")]
    WavelengthOutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("position ({x_nm:.1}, {y_nm:.1}) nm lies outside the sampled field grid")]
    OutsideGrid { x_nm: f64, y_nm: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("invalid permittivity table: {0}")]
    Table(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Consistency(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
