//! Measurements over bit streams and games: autocorrelation, the AIS trace,
//! complexity bounds and exhaustive tree counts.

mod ais;
mod autocorr;
mod complexity;
mod tree;

use thiserror::Error;

pub use ais::{ais_trace, AisRow, AisTrace};
pub use autocorr::{autocorrelation, confidence_bound, AcfForm, Correlogram};
pub use complexity::{ais_bounds, complexity_report, max_ais_exponent, quantum_branching, ComplexityReport};
pub use tree::{enumerate_game_tree, projected_nodes, ClassicalBoard, TreeCounts, Variant, TREE_GUARD};

use crate::kifu::KifuError;
use crate::rules::RulesError;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("the series is empty")]
    EmptySeries,
    #[error("max lag {max_lag} must be below the series length {n}")]
    LagRange { max_lag: usize, n: usize },
    #[error("the series has zero variance")]
    ConstantSeries,
    #[error("board size {0} is below 2")]
    BoardSize(usize),
    #[error("about {projected:.3e} nodes projected, above the enumeration guard")]
    TreeGuard { projected: f64 },
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Kifu(#[from] KifuError),
}
