//! Game records: a line-oriented text format, replay verification and
//! board rendering.

mod format;
mod model;
mod render;
mod replay;

use std::fmt;

use thiserror::Error;

pub use format::{parse, serialize, VERSION_LINE};
pub use model::{GameResult, Kifu, KifuHeader, MoveRecord};
pub use render::render_board;
pub use replay::{replay, Replay};

use crate::rules::{Color, ConfigError, CoordError, RulesError, StoneId};

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    Version(String),
    Expected(String),
    Unexpected(String),
    DuplicateHeader(String),
    Coordinate(CoordError),
    Config(ConfigError),
    Source(String),
    MoveNumber { expected: u32, found: u32 },
    Alternation { index: u32, found: Color },
    UnknownStone(StoneId),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Version(v) => write!(f, "expected `{VERSION_LINE}`, found `{v}`"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::Unexpected(tok) => write!(f, "unexpected `{tok}`"),
            ParseErrorKind::DuplicateHeader(key) => write!(f, "duplicate `{key}` header"),
            ParseErrorKind::Coordinate(e) => write!(f, "{e}"),
            ParseErrorKind::Config(e) => write!(f, "{e}"),
            ParseErrorKind::Source(e) => write!(f, "{e}"),
            ParseErrorKind::MoveNumber { expected, found } => write!(f, "expected move {expected}, found {found}"),
            ParseErrorKind::Alternation { index, found } => {
                write!(f, "move {index} is played by {found}; colors must alternate starting with black")
            }
            ParseErrorKind::UnknownStone(id) => write!(f, "no stone {id} has been placed"),
        }
    }
}

#[derive(Debug, Error)]
pub enum KifuError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// Move 0 stands for the end-of-game measurement and result.
    #[error("replay diverges at move {index}: {detail}")]
    Divergence { index: u32, detail: String },
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl KifuError {
    pub fn divergent_move(&self) -> Option<u32> {
        match self {
            KifuError::Divergence { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// Reads and parses a kifu file.
pub fn load(path: &std::path::Path) -> Result<Kifu, KifuError> {
    Ok(parse(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests;
