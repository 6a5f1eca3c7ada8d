use super::model::Kifu;
use super::KifuError;
use crate::rules::{Capture, CollapseRecord, GameState, MoveReport, RulesError, ScoreReport};
use crate::source::BitSource;

#[derive(Clone, Debug)]
pub struct Replay {
    pub state: GameState,
    pub reports: Vec<MoveReport>,
    /// Present when the game is over and the record covers the end of it.
    pub score: Option<ScoreReport>,
}

fn diverge(index: u32, detail: impl Into<String>) -> KifuError {
    KifuError::Divergence {
        index,
        detail: detail.into(),
    }
}

fn describe(collapses: &[CollapseRecord], captures: &[Capture]) -> String {
    let mut parts: Vec<String> = collapses
        .iter()
        .map(|c| format!("collapse {} bit={} -> {}", c.stone, c.bit, c.result))
        .collect();
    parts.extend(captures.iter().map(|c| format!("capture {} at {}", c.stone, c.at)));
    if parts.is_empty() {
        "nothing".into()
    } else {
        parts.join(", ")
    }
}

fn compare(
    index: u32,
    recorded: (&[CollapseRecord], &[Capture]),
    engine: (&[CollapseRecord], &[Capture]),
) -> Result<(), KifuError> {
    if recorded != engine {
        return Err(diverge(
            index,
            format!(
                "recorded {}, engine produced {}",
                describe(recorded.0, recorded.1),
                describe(engine.0, engine.1)
            ),
        ));
    }
    Ok(())
}

/// Re-plays every move, feeding each one the bits of its own collapse
/// lines, and checks that the engine reproduces the record.
pub fn replay(kifu: &Kifu) -> Result<Replay, KifuError> {
    let mut state = GameState::new(kifu.header.board_config())?;
    let mut reports = Vec::with_capacity(kifu.moves.len());
    for m in &kifu.moves {
        let mut bits = BitSource::scripted(m.collapses.iter().map(|c| c.bit).collect());
        let report = match state.play(m.mv, &mut bits) {
            Ok(r) => r,
            Err(RulesError::Bits(_)) => {
                return Err(diverge(m.index, "the engine measures more stones than recorded"));
            }
            Err(e) => return Err(diverge(m.index, e.to_string())),
        };
        compare(
            m.index,
            (&m.collapses, &m.captures),
            (&report.collapses, &report.captures),
        )?;
        reports.push(report);
    }

    let has_ending = !kifu.final_measurement.is_empty() || !kifu.final_captures.is_empty() || kifu.result.is_some();
    let mut score = None;
    if state.is_terminal() {
        let mut bits = BitSource::scripted(kifu.final_measurement.iter().map(|c| c.bit).collect());
        match state.score(&mut bits) {
            Ok(s) => {
                compare(
                    0,
                    (&kifu.final_measurement, &kifu.final_captures),
                    (&s.collapses, &s.captures),
                )?;
                if let Some(r) = kifu.result {
                    if r.margin != s.margin {
                        return Err(diverge(0, format!("recorded margin {}, engine scored {}", r.margin, s.margin)));
                    }
                }
                score = Some(s);
            }
            Err(RulesError::Bits(_)) if has_ending => {
                return Err(diverge(0, "the end-of-game measurement needs more bits than recorded"));
            }
            Err(RulesError::Bits(_)) => {}
            Err(e) => return Err(e.into()),
        }
    } else if has_ending {
        return Err(diverge(0, "the record has a result but the game is not over"));
    }
    Ok(Replay { state, reports, score })
}
