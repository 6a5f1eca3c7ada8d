use serde::{Deserialize, Serialize};

use qgo_core::analytics::AisTrace;
use qgo_core::kifu::GameResult;
use qgo_core::rules::{Cell, Color, GameState, Phase};

use crate::session::Snapshot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Black,
    White,
    Spectator,
}

impl Role {
    pub fn color(self) -> Option<Color> {
        match self {
            Role::Black => Some(Color::Black),
            Role::White => Some(Color::White),
            Role::Spectator => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoneView {
    pub id: u32,
    pub color: String,
    /// Candidate cells of a quantum stone, sorted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    /// Designations, present only for the owner of a quantum stone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultView {
    pub winner: String,
    pub margin: f64,
}

/// What one viewer may see of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session: String,
    pub role: Role,
    pub revision: u64,
    pub size: usize,
    pub komi: f64,
    pub to_move: String,
    pub move_count: u32,
    pub passes: u8,
    pub terminal: bool,
    pub your_turn: bool,
    /// Whether the side to move has any legal placement.
    pub can_place: bool,
    pub deterministic: bool,
    /// Rows from the top, `X`/`O` quantum candidates, `x`/`o` classical.
    pub board: Vec<String>,
    pub stones: Vec<StoneView>,
    /// `S^1..S^n` for the moves played, then the value for the next move.
    pub ais: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultView>,
}

fn board_rows(state: &GameState) -> Vec<String> {
    let n = state.size();
    let mut rows = vec![String::with_capacity(n); n];
    for (p, cell) in state.cells() {
        let color = |id| state.stone(id).map(|s| s.color);
        let ch = match cell {
            Cell::Empty => '.',
            Cell::Quantum(id) => match color(id) {
                Some(Color::Black) => 'X',
                _ => 'O',
            },
            Cell::Classical(id) => match color(id) {
                Some(Color::Black) => 'x',
                _ => 'o',
            },
        };
        rows[n - 1 - p.row as usize].push(ch);
    }
    rows
}

fn result_view(r: &GameResult) -> ResultView {
    ResultView {
        winner: r.winner().to_string(),
        margin: r.margin,
    }
}

impl SessionView {
    pub fn redact(snap: &Snapshot, role: Role) -> SessionView {
        let state = &snap.state;
        let viewer = role.color();
        let stones = state
            .stones()
            .map(|s| {
                let color = s.color.letter().to_string();
                match s.phase {
                    Phase::Classical(at) => StoneView {
                        id: s.id.0,
                        color,
                        candidates: None,
                        at: Some(at.to_string()),
                        p1: None,
                        p2: None,
                    },
                    Phase::Quantum => {
                        let (a, b) = s.candidates();
                        let own = viewer == Some(s.color);
                        StoneView {
                            id: s.id.0,
                            color,
                            candidates: Some([a.min(b).to_string(), a.max(b).to_string()]),
                            at: None,
                            p1: own.then(|| s.p1.to_string()),
                            p2: own.then(|| s.p2.to_string()),
                        }
                    }
                }
            })
            .collect();
        let trace = AisTrace::from_counts(snap.q.clone());
        let mut ais: Vec<f64> = trace.s[1..].to_vec();
        if !state.is_terminal() {
            ais.push(trace.q_avg.last().copied().unwrap_or(0.0).exp2());
        }
        SessionView {
            session: snap.session.to_string(),
            role,
            revision: snap.revision,
            size: state.size(),
            komi: state.config().komi,
            to_move: state.to_move().letter().to_string(),
            move_count: state.move_count(),
            passes: state.consecutive_passes(),
            terminal: state.is_terminal(),
            your_turn: !state.is_terminal() && viewer == Some(state.to_move()),
            can_place: snap.can_place,
            deterministic: snap.deterministic,
            board: board_rows(state),
            stones,
            ais,
            result: snap.result.as_ref().map(result_view),
        }
    }
}
