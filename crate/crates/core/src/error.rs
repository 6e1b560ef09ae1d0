//! Crate-wide error type.
//!
//! Geometry, path, planner, and verification operations all report failures
//! through [`Error`]; variants carry enough context (space names, offending
//! coordinates, deviation magnitudes) to diagnose a failure from the message
//! alone.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "point does not lie on `{space}`: coords {coords:?} violate membership by {violation:.3e}"
    )]
    OutsideSpace {
        space: String,
        coords: Vec<f64>,
        violation: f64,
    },

    #[error("space mismatch: expected `{expected}`, got `{actual}`")]
    SpaceMismatch { expected: String, actual: String },

    #[error("dimension mismatch for `{space}`: expected {expected} coords, got {actual}")]
    DimensionMismatch {
        space: String,
        expected: usize,
        actual: usize,
    },

    #[error("`{claimed}` is not the declared quotient of `{total}`")]
    NotAQuotient { total: String, claimed: String },

    #[error("path parameter {t} outside [0, 1]")]
    ParamOutOfRange { t: f64 },

    #[error("glue gap {gap:.3e} between consecutive paths exceeds tolerance {tol:.3e}")]
    GlueGap { gap: f64, tol: f64 },

    #[error("path endpoint contract violated at t={t}: deviation {dev:.3e} exceeds {tol:.3e}")]
    EndpointContract { t: f64, dev: f64, tol: f64 },

    #[error("loop path must share start and end; they differ by {dev:.3e}")]
    OpenLoop { dev: f64 },

    #[error("geodesic between antipodal points is ambiguous without an orientation hint")]
    AntipodalAmbiguity,

    #[error("orientation hint is degenerate (no tangential component at the start point)")]
    DegenerateHint,

    #[error("pair ({x:?}, {y:?}) is not covered by any piece")]
    CoverageGap { x: Vec<f64>, y: Vec<f64> },

    #[error("pair ({x:?}, {y:?}) lies in {count} pieces {labels:?}; partitions admit exactly one")]
    PartitionViolation {
        count: usize,
        labels: Vec<String>,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error(
        "pair ({x:?}, {y:?}) lies in {count} subparts of piece `{piece}`; expected exactly one"
    )]
    SubpartViolation {
        count: usize,
        piece: String,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error(
        "maps `{fwd}` and `{inv}` are not mutually inverse: worst round-trip deviation {dev:.3e}"
    )]
    NotAnIsomorphism { fwd: String, inv: String, dev: f64 },

    #[error("homotopy `{label}` does not match its declared {end} endpoint map: worst deviation {dev:.3e}")]
    InvalidHomotopy {
        label: String,
        end: String,
        dev: f64,
    },

    #[error("domination homotopy exits the target domain at ({x:?}, {y:?})")]
    DominationEscape { x: Vec<f64>, y: Vec<f64> },

    #[error("sampling domain `{domain}` exhausted its rejection budget of {budget} attempts")]
    SamplingExhausted { domain: String, budget: usize },

    #[error("operation requires a planner in {expected} mode, found {actual}")]
    ModeMismatch { expected: String, actual: String },

    #[error("sampled pair ({x:?}, {y:?}) lies in none of the covering domains")]
    CoverDomainGap { x: Vec<f64>, y: Vec<f64> },

    #[error("pair ({x:?}, {y:?}) is outside the planner domain")]
    OutsideDomain { x: Vec<f64>, y: Vec<f64> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
