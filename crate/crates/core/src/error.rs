use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),

    #[error("observation has {found} variables, model expects {expected}")]
    SignatureMismatch { expected: usize, found: usize },

    #[error("variable {variable}: value {value} outside alphabet of size {alphabet}")]
    OutOfAlphabet {
        variable: usize,
        value: u32,
        alphabet: usize,
    },

    #[error("observation impossible under model at position {position}")]
    ImpossibleObservation { position: usize },

    #[error("observation impossible under model at vertex {vertex}")]
    ImpossibleVertex { vertex: usize },

    #[error("all state configurations are impossible")]
    AllPathsImpossible,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid oracle query: {0}")]
    InvalidQuery(String),

    #[error(
        "children-conditioned profile needs {required} terms at vertex {vertex} \
         ({branching} children), budget is {budget}"
    )]
    ChildrenBudgetExceeded {
        vertex: usize,
        branching: usize,
        required: u128,
        budget: u128,
    },

    #[error("enumeration needs {required} configurations, budget is {budget}")]
    ConfigBudgetExceeded { required: u128, budget: u128 },

    #[error("{quantity} routes disagree at index {index}: {first} vs {second}")]
    RouteMismatch {
        quantity: &'static str,
        index: usize,
        first: f64,
        second: f64,
    },

    #[error("criterion undefined: {0}")]
    Criterion(String),
}
