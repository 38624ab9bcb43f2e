use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A formula was evaluated outside its domain (zero distance, zero denominator).
    #[error("domain error: {0}")]
    Domain(String),

    /// Scenario or sweep parameters violate their invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// No hover height (or no grid point) satisfies both covertness and security.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The secrecy rate was observed to increase with height while bracketing.
    #[error("secrecy rate is not monotone in hover height: C_s({h_lo} m) = {c_lo}, C_s({h_hi} m) = {c_hi}")]
    NonMonotone {
        h_lo: f64,
        h_hi: f64,
        c_lo: f64,
        c_hi: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("scenario file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Infeasible(_) => 3,
            Error::Domain(_) | Error::NonMonotone { .. } | Error::Numerical(_) | Error::Csv(_) => 4,
        }
    }
}
