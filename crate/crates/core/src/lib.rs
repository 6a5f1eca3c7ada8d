//! Quantum Go: rules engine, collapse-bit sources, analytics, game records
//! and self-play.
//!
//! ```
//! use qgo_core::rules::{BoardConfig, GameState, Move};
//! use qgo_core::source::BitSource;
//!
//! let state = GameState::new(BoardConfig::new(7)).unwrap();
//! let mut bits = BitSource::scripted(vec![]);
//! let mv = Move::place("F2".parse().unwrap(), "F5".parse().unwrap());
//! let out = qgo_core::rules::apply_move(&state, mv, &mut bits).unwrap();
//! assert!(out.report.collapses.is_empty());
//! ```

pub mod rules;
pub mod source;
pub mod analytics;
pub mod kifu;
pub mod selfplay;
