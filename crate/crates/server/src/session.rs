use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::broadcast;
use uuid::Uuid;

use qgo_core::analytics::AisTrace;
use qgo_core::kifu::{serialize, GameResult, Kifu, KifuHeader};
use qgo_core::rules::{BoardConfig, CollapseRecord, GameState, Intersection, Move, RulesError, StoneAngles};
use qgo_core::source::{open_bitsource, BitSource, SourceSpec, StateParams};

use crate::protocol::{CreateRequest, Created};
use crate::view::{Role, SessionView};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown token")]
    UnknownToken,
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("join a session first")]
    NotJoined,
    #[error("spectators cannot move")]
    Spectator,
    #[error("it is not your turn")]
    NotYourTurn,
    #[error("the game is over")]
    GameOver,
    #[error("the game is still in progress")]
    InProgress,
    #[error("illegal move: {0}")]
    Illegal(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownToken => "unknown_token",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::NotJoined => "not_joined",
            ServiceError::Spectator => "spectator",
            ServiceError::NotYourTurn => "not_your_turn",
            ServiceError::GameOver => "game_over",
            ServiceError::InProgress => "in_progress",
            ServiceError::Illegal(_) => "illegal_move",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Config(_) => "invalid_config",
            ServiceError::Internal(_) => "internal",
        }
    }
}

/// Service-wide settings.
#[derive(Clone, Debug)]
pub struct ServerConfig {
    /// Finished games are written here as `<session>.kifu`; live games as
    /// `<session>.partial.kifu` every `snapshot_every` moves.
    pub data_dir: Option<PathBuf>,
    pub source: StateParams,
    pub snapshot_every: u32,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            data_dir: None,
            source: StateParams::default(),
            snapshot_every: 10,
        }
    }
}

/// An immutable picture of a session after some revision, shared by every
/// viewer and redacted per connection.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub session: Uuid,
    pub revision: u64,
    pub state: GameState,
    pub q: Vec<u32>,
    pub can_place: bool,
    pub deterministic: bool,
    pub result: Option<GameResult>,
    /// Collapses resolved by the move that produced this revision, including
    /// the final measurement when the game ended.
    pub collapses: Vec<CollapseRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AisPoint {
    #[serde(rename = "move")]
    pub index: u32,
    pub color: String,
    pub q: u32,
    pub q_avg: f64,
    pub s: f64,
}

/// Public summary of a session: nothing in it depends on a designation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub session: String,
    pub revision: u64,
    pub size: usize,
    pub moves: u32,
    pub terminal: bool,
    pub deterministic: bool,
    pub collapses: usize,
    pub ais: Vec<AisPoint>,
    pub result: Option<crate::view::ResultView>,
}

fn has_placement(state: &GameState) -> bool {
    if state.is_terminal() {
        return false;
    }
    let empty = state.empty_cells();
    empty
        .iter()
        .enumerate()
        .any(|(i, &a)| empty[i + 1..].iter().any(|&b| state.check_placement(a, b).is_ok()))
}

pub(crate) fn parse_move(text: &str, size: usize) -> Result<Move, ServiceError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let coord = |s: &str| Intersection::parse_on(s, size).map_err(|e| ServiceError::BadRequest(e.to_string()));
    match parts.as_slice() {
        ["pass"] => Ok(Move::Pass),
        ["place", a, b] => Ok(Move::place(coord(a)?, coord(b)?)),
        _ => Err(ServiceError::BadRequest(format!("cannot read move {text:?}"))),
    }
}

pub struct Session {
    id: Uuid,
    state: GameState,
    bits: BitSource,
    kifu: Kifu,
    q: Vec<u32>,
    revision: u64,
    deterministic: bool,
    current: Arc<Snapshot>,
    tx: broadcast::Sender<Arc<Snapshot>>,
}

impl Session {
    fn new(id: Uuid, config: BoardConfig, spec: SourceSpec) -> Result<Self, ServiceError> {
        let state = GameState::new(config.clone()).map_err(|e| ServiceError::Config(e.to_string()))?;
        let bits = open_bitsource(&spec).map_err(|e| ServiceError::Config(e.to_string()))?;
        let deterministic = spec.is_deterministic();
        let kifu = Kifu::new(KifuHeader::new(&config, spec));
        let (tx, _) = broadcast::channel(64);
        Ok(Session {
            id,
            current: Arc::new(Snapshot {
                session: id,
                revision: 0,
                can_place: has_placement(&state),
                state: state.clone(),
                q: vec![0],
                deterministic,
                result: None,
                collapses: Vec::new(),
            }),
            state,
            bits,
            kifu,
            q: vec![0],
            revision: 0,
            deterministic,
            tx,
        })
    }

    fn snapshot(&self, collapses: Vec<CollapseRecord>) -> Arc<Snapshot> {
        Arc::new(Snapshot {
            session: self.id,
            revision: self.revision,
            state: self.state.clone(),
            q: self.q.clone(),
            can_place: has_placement(&self.state),
            deterministic: self.deterministic,
            result: self.kifu.result,
            collapses,
        })
    }

    pub fn current(&self) -> Arc<Snapshot> {
        self.current.clone()
    }

    pub fn kifu(&self) -> &Kifu {
        &self.kifu
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    fn apply(&mut self, role: Role, mv: Move) -> Result<Arc<Snapshot>, ServiceError> {
        let color = role.color().ok_or(ServiceError::Spectator)?;
        if self.state.is_terminal() {
            return Err(ServiceError::GameOver);
        }
        if color != self.state.to_move() {
            return Err(ServiceError::NotYourTurn);
        }
        self.state.check_move(mv).map_err(|e| ServiceError::Illegal(e.to_string()))?;
        let report = self.state.play(mv, &mut self.bits).map_err(internal)?;
        self.q.push(self.state.quantum_count(report.color) as u32);
        self.kifu.record(&report);
        let mut collapses = report.collapses;
        if self.state.is_terminal() {
            let score = self.state.score(&mut self.bits).map_err(internal)?;
            self.kifu.finish(&score);
            collapses.extend(score.collapses.iter().copied());
            self.state = score.final_state;
        }
        self.revision += 1;
        self.current = self.snapshot(collapses);
        // no receivers is fine
        let _ = self.tx.send(self.current.clone());
        Ok(self.current.clone())
    }

    fn report(&self) -> SessionReport {
        let trace = AisTrace::from_counts(self.q.clone());
        SessionReport {
            session: self.id.to_string(),
            revision: self.revision,
            size: self.state.size(),
            moves: self.state.move_count(),
            terminal: self.state.is_terminal(),
            deterministic: self.deterministic,
            collapses: self.kifu.bits().len(),
            ais: trace
                .rows()
                .map(|r| AisPoint {
                    index: r.index,
                    color: r.color.letter().to_string(),
                    q: r.q,
                    q_avg: r.q_avg,
                    s: r.s,
                })
                .collect(),
            result: self.kifu.result.map(|r| crate::view::ResultView {
                winner: r.winner().to_string(),
                margin: r.margin,
            }),
        }
    }
}

fn internal(e: RulesError) -> ServiceError {
    ServiceError::Internal(e.to_string())
}

type Shared = Arc<Mutex<Session>>;

/// All live sessions. Each session sits behind its own lock, so moves in one
/// session are applied one at a time while sessions proceed independently.
pub struct SessionManager {
    config: ServerConfig,
    sessions: RwLock<HashMap<Uuid, Shared>>,
    tokens: RwLock<HashMap<String, (Uuid, Role)>>,
}

impl SessionManager {
    pub fn new(config: ServerConfig) -> Self {
        SessionManager {
            config,
            sessions: RwLock::default(),
            tokens: RwLock::default(),
        }
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn create(&self, req: &CreateRequest) -> Result<Created, ServiceError> {
        let mut params = self.config.source;
        if let Some(t) = req.theta {
            params.theta = t;
        }
        if let Some(p) = req.phi {
            params.phi = p;
        }
        let mut board = BoardConfig::new(req.size).with_komi(req.komi);
        board.angles.black = StoneAngles {
            theta: params.theta,
            phi: params.phi,
        };
        board.angles.white = board.angles.black;
        if let Some(r) = req.detect_range {
            board.detect_range = r;
        }
        board.validate().map_err(|e| ServiceError::Config(e.to_string()))?;
        params.validate().map_err(|e| ServiceError::Config(e.to_string()))?;
        let seed = req.seed.unwrap_or_else(rand::random);
        let id = Uuid::new_v4();
        let session = Session::new(id, board, SourceSpec::Simulated { params, seed })?;
        let created = Created {
            session: id.to_string(),
            black: Uuid::new_v4().simple().to_string(),
            white: Uuid::new_v4().simple().to_string(),
            spectator: Uuid::new_v4().simple().to_string(),
            deterministic: session.deterministic,
        };
        {
            let mut tokens = self.tokens.write().unwrap();
            tokens.insert(created.black.clone(), (id, Role::Black));
            tokens.insert(created.white.clone(), (id, Role::White));
            tokens.insert(created.spectator.clone(), (id, Role::Spectator));
        }
        self.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(session)));
        log::info!("created session {id}");
        Ok(created)
    }

    fn by_token(&self, token: &str) -> Result<(Shared, Role), ServiceError> {
        let (id, role) = *self.tokens.read().unwrap().get(token).ok_or(ServiceError::UnknownToken)?;
        Ok((self.by_id(id)?, role))
    }

    fn by_id(&self, id: Uuid) -> Result<Shared, ServiceError> {
        self.sessions
            .read()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn by_name(&self, id: &str) -> Result<Shared, ServiceError> {
        let id = Uuid::parse_str(id).map_err(|_| ServiceError::UnknownSession(id.to_string()))?;
        self.by_id(id)
    }

    pub fn role(&self, token: &str) -> Result<Role, ServiceError> {
        self.by_token(token).map(|(_, r)| r)
    }

    /// The current view for `token`, plus a subscription to later revisions.
    pub fn join(&self, token: &str) -> Result<(Role, SessionView, broadcast::Receiver<Arc<Snapshot>>), ServiceError> {
        let (session, role) = self.by_token(token)?;
        let s = session.lock().unwrap();
        let rx = s.tx.subscribe();
        Ok((role, SessionView::redact(&s.current, role), rx))
    }

    pub fn view(&self, token: &str) -> Result<SessionView, ServiceError> {
        let (session, role) = self.by_token(token)?;
        let snap = session.lock().unwrap().current();
        Ok(SessionView::redact(&snap, role))
    }

    pub fn submit(&self, token: &str, mv: &str) -> Result<Arc<Snapshot>, ServiceError> {
        let (session, role) = self.by_token(token)?;
        let mut s = session.lock().unwrap();
        let mv = parse_move(mv, s.state.size())?;
        let snap = s.apply(role, mv)?;
        self.persist(&s, &snap);
        Ok(snap)
    }

    fn persist(&self, s: &Session, snap: &Snapshot) {
        let Some(dir) = &self.config.data_dir else {
            return;
        };
        let partial = dir.join(format!("{}.partial.kifu", s.id));
        let result = if snap.result.is_some() {
            std::fs::write(dir.join(format!("{}.kifu", s.id)), serialize(&s.kifu))
                .and_then(|_| match std::fs::remove_file(&partial) {
                    Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e),
                    _ => Ok(()),
                })
        } else if self.config.snapshot_every > 0 && s.state.move_count() % self.config.snapshot_every == 0 {
            std::fs::write(&partial, serialize(&s.kifu))
        } else {
            Ok(())
        };
        if let Err(e) = result {
            log::error!("could not persist session {}: {e}", s.id);
        }
    }

    /// The record of a finished game. Live games are withheld: their move
    /// lines carry designations and the header carries the source seed.
    pub fn kifu(&self, id: &str) -> Result<String, ServiceError> {
        let session = self.by_name(id)?;
        let s = session.lock().unwrap();
        if s.kifu.result.is_none() {
            return Err(ServiceError::InProgress);
        }
        Ok(serialize(&s.kifu))
    }

    pub fn report(&self, id: &str) -> Result<SessionReport, ServiceError> {
        Ok(self.by_name(id)?.lock().unwrap().report())
    }

    /// Runs `f` on the session behind `id`. Intended for inspection.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T, ServiceError> {
        Ok(f(&self.by_name(id)?.lock().unwrap()))
    }
}
