use thiserror::Error;

/// Errors raised anywhere in the analysis and design pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcqError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain violation: {0}")]
    Domain(String),

    /// Coupler frequency sits on (or within the guard band of) a pole of the coupling formula.
    #[error("degenerate operating point: {0}")]
    Degenerate(String),

    #[error("no zero crossing: {0}")]
    NoZeroCrossing(String),

    #[error("infeasible design: {reason} (best residual {best_residual:.3e})")]
    Infeasible { reason: String, best_residual: f64 },

    #[error("unresolved modes: {0}")]
    UnresolvedModes(String),

    #[error("dimension {dimension} exceeds cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<QcqError>,
    },
}

impl QcqError {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(QcqError) -> QcqError {
        move |source| QcqError::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &QcqError {
        match self {
            QcqError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, QcqError>;
