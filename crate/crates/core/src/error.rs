use crate::geom::PointId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter {name} = {value} is outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("unknown point id {0}")]
    UnknownPoint(PointId),

    #[error("coordinate index {dim} out of range for dimension {d}")]
    DimOutOfRange { dim: usize, d: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("generator: {0}")]
    Generation(String),

    #[error("instance json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Checks `lo < value < hi` (open) and returns a parameter error otherwise.
pub(crate) fn check_open(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, range })
    }
}
