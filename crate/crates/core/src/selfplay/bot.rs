use rand::Rng;

use crate::rules::{GameState, Move, RulesError};

/// Ordered pairs tried before falling back to a full enumeration.
const REJECTION_TRIES: usize = 64;

/// A uniformly random legal placement, or `Pass` when there is none.
///
/// An ordered pair of distinct empty cells `(p1, p2)` is drawn uniformly and
/// kept if legal, so every legal unordered pair is equally likely and each
/// of its two designations has probability one half.
pub fn random_bot_move<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Result<Move, RulesError> {
    if state.is_terminal() {
        return Err(RulesError::Terminal);
    }
    let empty = state.empty_cells();
    let n = empty.len();
    if n < 2 {
        return Ok(Move::Pass);
    }
    for _ in 0..REJECTION_TRIES {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        if state.passes_superko(empty[i], empty[j]) {
            return Ok(Move::place(empty[i], empty[j]));
        }
    }
    let pairs = state.legal_placements()?;
    if pairs.is_empty() {
        return Ok(Move::Pass);
    }
    let (a, b) = pairs[rng.random_range(0..pairs.len())];
    Ok(if rng.random_bool(0.5) {
        Move::place(a, b)
    } else {
        Move::place(b, a)
    })
}
