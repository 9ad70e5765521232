use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error("unsupported snapshot version {0:?}")]
    UnsupportedVersion(String),

    #[error(
        "power iteration did not converge after {max_iter} iterations (residual {residual:e})"
    )]
    NonConvergence { max_iter: usize, residual: f64 },

    #[error("label propagation did not settle after {max_iter} sweeps")]
    PartitionNonConvergence {
        max_iter: usize,
        partial: Box<crate::communities::Partition>,
    },

    #[error("unknown ranking metric {0:?}")]
    UnknownMetric(String),

    #[error("singular design matrix: columns {columns:?} are collinear")]
    SingularDesign { columns: Vec<String> },

    #[error("person ids {first:?} and {second:?} both map to address {address:?}")]
    IdentityConflict {
        first: String,
        second: String,
        address: String,
    },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown company id {0:?}")]
    UnknownCompanyId(String),

    #[error("unknown topic id {0:?}")]
    UnknownTopicId(String),

    #[error("unknown industry tag {0:?}")]
    UnknownIndustry(String),

    #[error("invalid timeline for {founder}: last update precedes first wishlist add")]
    InvalidTimeline { founder: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable kind, used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CorruptSnapshot(_) => "corrupt_snapshot",
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::NonConvergence { .. } => "non_convergence",
            Error::PartitionNonConvergence { .. } => "non_convergence",
            Error::UnknownMetric(_) => "unknown_metric",
            Error::SingularDesign { .. } => "singular_design",
            Error::IdentityConflict { .. } => "identity_conflict",
            Error::UnknownNode(_) => "unknown_node",
            Error::UnknownCompanyId(_) => "unknown_company_id",
            Error::UnknownTopicId(_) => "unknown_topic_id",
            Error::UnknownIndustry(_) => "unknown_industry",
            Error::InvalidTimeline { .. } => "invalid_timeline",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
