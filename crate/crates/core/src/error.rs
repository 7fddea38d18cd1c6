use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the benchmarking engine.
///
/// Variants are split into data problems (bad input files, unknown names,
/// violated preconditions) and solver problems (an LP that should have been
/// solvable was not). [`Error::is_data_error`] tells them apart for callers
/// that map errors onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("no data rows")]
    NoDataRows,

    #[error("header: {0}")]
    Header(String),

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column '{column}': value {value} must be strictly positive")]
    NonPositive {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("row {row}: duplicate DMU name '{name}'")]
    DuplicateName { row: usize, name: String },

    #[error("row {row}: empty DMU name")]
    EmptyName { row: usize },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("unknown DMU '{0}'")]
    UnknownDmu(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite coefficient in {0}")]
    NonFinite(String),

    #[error("no facets: robust points undefined")]
    NoFacets,

    #[error("empty reference group")]
    EmptyGroup,

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("point is not on any facet")]
    NotOnFacet,

    #[error("inputs are not attainable on facet {0}")]
    FacetInfeasible(usize),

    #[error("solver: {0}")]
    Solver(String),
}

impl Error {
    /// True for errors caused by the input data or arguments rather than by
    /// the numerical engine.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Solver(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
