use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point index {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("geodesic chords require an embedded space")]
    UnsupportedGeodesic,
    #[error("operation requires point coordinates, but the space is a bare metric")]
    NotEmbedded,
    #[error("degenerate request: {0}")]
    Degenerate(String),
    #[error("currents or measures live on different spaces")]
    MismatchedSpaces,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("current is not acyclic; directed cycle through vertices {cycle:?}")]
    NotAcyclic { cycle: Vec<usize> },
    #[error("unbalanced masses: positive part {plus}, negative part {minus}")]
    Unbalanced { plus: f64, minus: f64 },
    #[error("measure has empty support")]
    EmptySupport,
    #[error("measure must be nonnegative; atom {index} has weight {weight}")]
    NegativeMeasure { index: usize, weight: f64 },
    #[error("potential is not 1-Lipschitz between points {a} and {b}: |f(a)-f(b)| = {diff}, d(a,b) = {dist}")]
    NotLipschitz {
        a: usize,
        b: usize,
        diff: f64,
        dist: f64,
    },
    #[error("refinement too fine: spacing {spacing:e} below 1e-9")]
    TooFine { spacing: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("min-cost flow: {0}")]
    Flow(String),
    #[error("invalid document: {0}")]
    Document(String),
}
