//! Random bots and the batch self-play harness.

mod bot;
mod harness;
mod report;

pub use bot::random_bot_move;
pub use harness::{game_seed, play_game, run_selfplay, splitmix64, PlayedGame, SelfPlayConfig};
pub use report::{GameSummary, MoveStat, SelfPlayReport, WinCounts, KOMI_TABLE};
