use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the domain")]
    PointOutsideDomain { x: f64, y: f64 },

    #[error("degenerate parametrization at theta = {theta}: |X'(theta)| = {jacobian:e}")]
    DegenerateParametrization { theta: f64, jacobian: f64 },

    #[error(
        "immersed boundary too close to the domain boundary: min distance {min_distance} \
         does not exceed kernel support radius {required}"
    )]
    BoundaryTooClose { min_distance: f64, required: f64 },

    #[error("linear solver breakdown after {iterations} iterations (relative residual {residual:e})")]
    SolverBreakdown { iterations: usize, residual: f64 },

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("mesh sizes do not halve between levels {coarse} and {fine}")]
    NonHalvingLevels { coarse: f64, fine: f64 },

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("boundary data line {line}: {message}")]
    BoundaryData { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::BoundaryData { .. } | Error::InvalidArgument(_)
        )
    }
}
