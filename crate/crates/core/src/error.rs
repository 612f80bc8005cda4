use thiserror::Error;

/// Problems found while parsing a scene file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneError {
    #[error("missing `resolution <float>` header on line 1")]
    MissingHeader,
    #[error("invalid resolution {0:?}: must be a positive finite number")]
    BadResolution(String),
    #[error("scene has no grid rows")]
    EmptyGrid,
    #[error("row {row} has {found} columns, expected {expected} (non-rectangular grid)")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {col}: unexpected character {ch:?}")]
    BadChar { row: usize, col: usize, ch: char },
    #[error("no start cell 'S' in grid")]
    NoStart,
    #[error("multiple start cells (second at row {row}, column {col})")]
    MultipleStarts { row: usize, col: usize },
    #[error("unsealed boundary: row {row}, column {col} is not '#'")]
    Unsealed { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("position ({x:.3}, {y:.3}) lies outside the grid")]
    OutsideGrid { x: f64, y: f64 },
    #[error("cell index {0} is out of bounds")]
    IndexOutOfBounds(usize),
    #[error("degenerate normal: neighborhood collapses to a single point")]
    DegenerateNormal,
    #[error("not enough points for normal estimation: have {have}, need {need}")]
    TooFewPoints { have: usize, need: usize },
    #[error("unreachable")]
    Unreachable,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
