//! Quantum Go rules.
//!
//! A move places one quantum stone on two empty points, `p1` and `p2`. The
//! stone stays in superposition until another stone enters its detectable
//! area (orthogonal neighbours by default), at which point every involved
//! stone is measured in a fixed order and settles on one point. Quantum
//! candidates never take liberties away, so only classical stones capture.

mod audit;
mod collapse;
mod coord;
mod score;
mod state;
mod stone;

#[cfg(test)]
mod tests;

use thiserror::Error;

pub use audit::Violation;
pub use collapse::{apply_move, MoveOutcome, MoveReport};
pub use coord::{Color, CoordError, Intersection, PerColor, COLUMN_LETTERS, MAX_BOARD_SIZE};
pub use score::{AreaCount, ScoreReport, Winner};
pub use state::GameState;
pub use stone::{
    BoardConfig, Bit, Capture, Cell, CollapseRecord, ConfigError, Move, Phase, QuantumStone, StoneAngles, StoneId,
};

use crate::source::SourceError;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("{0} is off the board")]
    OffBoard(Intersection),
    #[error("both candidates are {0}")]
    SamePoint(Intersection),
    #[error("{0} is occupied")]
    Occupied(Intersection),
    #[error("placement would repeat an earlier position")]
    Superko,
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("invalid board config: {0}")]
    Config(#[from] ConfigError),
    #[error("the game is over")]
    Terminal,
    #[error("the game is not over yet")]
    NotTerminal,
    #[error("illegal move: {0}")]
    Illegal(IllegalMove),
    #[error("collapse bits: {0}")]
    Bits(SourceError),
    #[error("{0} does not hold a classical stone")]
    NotClassical(Intersection),
    #[error("stone {0} is not on the board")]
    UnknownStone(StoneId),
}

impl RulesError {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, RulesError::Bits(SourceError::Exhausted))
    }
}
