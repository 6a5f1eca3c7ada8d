//! JSON messages exchanged over the game socket. Every message is one text
//! frame carrying an object with a `type` field.

use serde::{Deserialize, Serialize};

use crate::view::SessionView;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Create(CreateRequest),
    Join {
        token: String,
    },
    /// `"pass"` or `"place <p1> <p2>"`, as in a kifu move line.
    Move {
        #[serde(rename = "move")]
        mv: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateRequest {
    pub size: usize,
    pub komi: f64,
    /// Source angle; the server default applies when absent.
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub detect_range: Option<usize>,
    /// Fixing the seed makes every collapse predictable to whoever knows it.
    pub seed: Option<u64>,
}

impl Default for CreateRequest {
    fn default() -> Self {
        CreateRequest {
            size: 19,
            komi: 0.0,
            theta: None,
            phi: None,
            detect_range: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub session: String,
    pub black: String,
    pub white: String,
    pub spectator: String,
    /// θ = 0: every stone settles on its p1, so the owner knows the outcome.
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Created(Created),
    State {
        revision: u64,
        view: SessionView,
    },
    Collapse {
        revision: u64,
        stone: u32,
        pos: String,
    },
    Result {
        revision: u64,
        winner: String,
        margin: f64,
    },
    Error {
        code: String,
        message: String,
    },
}

impl ServerMessage {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }
}
