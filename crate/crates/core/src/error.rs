use thiserror::Error;

/// Errors raised by the aperiodica library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate lattice: basis is singular (|det| = {0:e})")]
    DegenerateLattice(f64),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate autocorrelation: eta(0) = 0")]
    DegenerateAutocorrelation,
    #[error("operation requires a dimension-{expected} comb, got dimension {found}")]
    UnsupportedDimension { expected: usize, found: usize },
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("seed {left}|{right} is not fixed at the seam")]
    SeedNotFixed { left: char, right: char },
    #[error("substitution is not of constant length")]
    NonConstantLength,
    #[error("not a lattice substitution system: {0}")]
    NotLatticeSubstitution(String),
    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),
    #[error("window is empty")]
    EmptyWindow,
    #[error("internal profile not supported here: {0}")]
    UnsupportedProfile(&'static str),
    #[error("cut and project scheme has non-orthogonal projections")]
    NonOrthogonal,
    #[error("k grid is incommensurate with the period {0}")]
    GridMismatch(f64),
    #[error("set is not contained in the lattice: {0}")]
    NotSubset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
