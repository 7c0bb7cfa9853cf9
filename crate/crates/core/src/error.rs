use thiserror::Error;

use crate::degree::DegreeEstimate;
use crate::lines::GeneralPositionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not unit length (|v| = {norm})")]
    NotUnit { norm: f64 },

    #[error("unknown chart id {0}")]
    UnknownChart(usize),

    #[error("coordinate {coord} = {value} outside chart {chart} domain [{lo}, {hi}]")]
    OutsideDomain {
        chart: usize,
        coord: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),

    #[error("immersion condition violated in chart {chart} at u = {u:?}")]
    ImmersionViolation { chart: usize, u: Vec<f64> },

    #[error("base point lies on the hypersurface (distance {distance:e} <= tolerance {tolerance:e})")]
    OffSurface { distance: f64, tolerance: f64 },

    #[error("general position violated: {0}")]
    GeneralPosition(Box<GeneralPositionReport>),

    #[error("no regular value found after {attempts} attempts")]
    RegularValueNotFound { attempts: usize },

    #[error("quadrature resolution insufficient: raw value {raw} is {residual} away from an integer")]
    QuadratureResolution { raw: f64, residual: f64 },

    #[error("degree methods disagree: {0:?}")]
    MethodDisagreement(Vec<DegreeEstimate>),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Unsupported(String),
}
