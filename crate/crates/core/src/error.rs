use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("path must be defined through t = {needed}, but ends at t = {available}")]
    PathTooShort { needed: usize, available: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error(
        "no consumption in the decision set of t = {t} reaches next capital {target} from k = {k}"
    )]
    NoRoot { t: usize, k: f64, target: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no feasible decision at grid node {node} (k = {k}) for t = {t}")]
    InfeasibleGrid { t: usize, node: usize, k: f64 },

    #[error(
        "finite solutions did not converge: Cauchy gap {gap} above {tol} at horizon cap {cap}"
    )]
    NoConvergence { gap: f64, tol: f64, cap: usize },

    #[error("series has {len} values; at least {needed} are required")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("gain {value} at t = {t} contradicts the declared {sign:?} utility sign")]
    SignMismatch {
        t: usize,
        value: f64,
        sign: crate::model::UtilitySign,
    },

    #[error("zero denominator at horizon {0}")]
    ZeroDenominator(usize),

    #[error("challenger strategy leaves the feasible set at t = {t}: {reason}")]
    InfeasibleStrategy { t: usize, reason: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
