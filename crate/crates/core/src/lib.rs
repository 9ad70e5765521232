//! Fundraising communication graphs, FounderRank founder scoring, ranking
//! evaluation and the investor discovery engine.

pub mod analytics;
pub mod catalog;
pub mod centrality;
pub mod cli;
pub mod communities;
pub mod error;
pub mod founder_rank;
pub mod graph;
pub mod ingest;
pub mod intro_paths;
pub mod rank_eval;
pub mod ranking;
pub mod regression;
pub mod search;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{CommGraph, GraphDelta, Label, LabelClaims, NodeId};
pub use ranking::Ranking;
