use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("input is not upper Hessenberg: entry ({row}, {col}) is nonzero")]
    NotHessenberg { row: usize, col: usize },

    /// QR iteration exhausted its budget. `partial` holds the eigenvalues
    /// deflated before the failure as `(re, im)` pairs.
    #[error(
        "QR iteration did not converge after {iterations} iterations \
         ({} of {dim} eigenvalues deflated)",
        partial.len()
    )]
    NoConvergence {
        iterations: usize,
        dim: usize,
        partial: Vec<(f64, f64)>,
    },

    #[error("eigensolver failed at gamma = {gamma}: {source}")]
    AtGamma {
        gamma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("threshold search failed inside bracket [{lo}, {hi}]: {source}")]
    Bisection {
        lo: f64,
        hi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("grid cell (row {row}, col {col}) at (x = {x}, y = {y}) failed: {source}")]
    GridCell {
        row: usize,
        col: usize,
        x: f64,
        y: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("field-response sample h_z = {hz} failed: {source}")]
    FieldSample {
        hz: f64,
        #[source]
        source: Box<Error>,
    },
}
