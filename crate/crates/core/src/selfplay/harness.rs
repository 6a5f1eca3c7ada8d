use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bot::random_bot_move;
use super::report::{GameSummary, SelfPlayReport};
use crate::analytics::AisTrace;
use crate::kifu::{Kifu, KifuHeader};
use crate::rules::{BoardConfig, GameState, Move, RulesError};
use crate::source::{SourceSpec, StateParams};

#[derive(Clone, Debug, PartialEq)]
pub struct SelfPlayConfig {
    pub board: BoardConfig,
    pub games: usize,
    pub seed: u64,
    /// Parameters of the simulated source each game draws its bits from.
    pub source: StateParams,
    /// Placements after which both bots pass. Games stopped this way are
    /// flagged in the report.
    pub max_moves: u32,
}

impl SelfPlayConfig {
    pub fn new(board: BoardConfig, games: usize, seed: u64) -> Self {
        let theta = board.angles.black.theta;
        let cells = (board.size * board.size) as u32;
        SelfPlayConfig {
            board,
            games,
            seed,
            source: StateParams::with_theta(theta),
            max_moves: 20 * cells.max(10),
        }
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of game `index`: `splitmix64(master + index)`. The bot's RNG uses it
/// directly and the bit source uses `splitmix64` of it.
pub fn game_seed(master: u64, index: usize) -> u64 {
    splitmix64(master.wrapping_add(index as u64))
}

#[derive(Clone, Debug)]
pub struct PlayedGame {
    pub kifu: Kifu,
    pub summary: GameSummary,
    pub trace: AisTrace,
}

/// Plays game `index` of a batch on its own.
pub fn play_game(config: &SelfPlayConfig, index: usize) -> Result<PlayedGame, RulesError> {
    let seed = game_seed(config.seed, index);
    let spec = SourceSpec::Simulated {
        params: config.source,
        seed: splitmix64(seed),
    };
    let mut bits = crate::source::open_bitsource(&spec).map_err(RulesError::Bits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::new(config.board.clone())?;
    let mut kifu = Kifu::new(KifuHeader::new(&config.board, spec));
    let mut q = vec![0u32];
    let mut truncated = false;
    while !state.is_terminal() {
        let mv = if state.move_count() >= config.max_moves {
            truncated = true;
            Move::Pass
        } else {
            random_bot_move(&state, &mut rng)?
        };
        let report = state.play(mv, &mut bits)?;
        q.push(state.quantum_count(report.color) as u32);
        kifu.record(&report);
    }
    let score = state.score(&mut bits)?;
    kifu.finish(&score);
    let trace = AisTrace::from_counts(q);
    let summary = GameSummary::new(index, seed, &kifu, &score, &trace, truncated);
    Ok(PlayedGame { kifu, summary, trace })
}

/// Plays `config.games` games in parallel. Results are ordered by game
/// index, so the output does not depend on scheduling.
pub fn run_selfplay(config: &SelfPlayConfig) -> Result<(SelfPlayReport, Vec<Kifu>), RulesError> {
    config.board.validate()?;
    let games: Vec<PlayedGame> = (0..config.games)
        .into_par_iter()
        .map(|i| play_game(config, i))
        .collect::<Result<_, _>>()?;
    let report = SelfPlayReport::new(config, &games);
    Ok((report, games.into_iter().map(|g| g.kifu).collect()))
}
