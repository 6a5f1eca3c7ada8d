//! A turn-based quantum Go service. Players join with bearer tokens over a
//! WebSocket and each connection receives views redacted for its role.
//!
//! Routes:
//!
//! | method | path                    | body                                   |
//! |--------|-------------------------|----------------------------------------|
//! | POST   | `/sessions`             | [`CreateRequest`] JSON in, [`Created`] out |
//! | GET    | `/sessions/{id}/kifu`   | finished game record, `409` while live |
//! | GET    | `/sessions/{id}/report` | [`SessionReport`] JSON                 |
//! | GET    | `/ws`                   | socket speaking [`ClientMessage`] / [`ServerMessage`] |

mod protocol;
mod session;
mod view;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::broadcast::error::RecvError;

pub use protocol::{ClientMessage, CreateRequest, Created, ServerMessage};
pub use session::{AisPoint, ServerConfig, ServiceError, Session, SessionManager, SessionReport, Snapshot};
pub use view::{ResultView, Role, SessionView, StoneView};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownSession(_) | ServiceError::UnknownToken => StatusCode::NOT_FOUND,
            ServiceError::InProgress => StatusCode::CONFLICT,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(error_message(&self))).into_response()
    }
}

fn error_message(e: &ServiceError) -> ServerMessage {
    ServerMessage::Error {
        code: e.code().to_string(),
        message: e.to_string(),
    }
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/kifu", get(download_kifu))
        .route("/sessions/{id}/report", get(session_report))
        .route("/ws", get(upgrade))
        .with_state(manager)
}

async fn create_session(
    State(m): State<Arc<SessionManager>>,
    body: Option<Json<CreateRequest>>,
) -> Result<(StatusCode, Json<Created>), ServiceError> {
    let req = body.map(|Json(r)| r).unwrap_or_default();
    Ok((StatusCode::CREATED, Json(m.create(&req)?)))
}

async fn download_kifu(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let text = m.kifu(&id)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn session_report(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
) -> Result<Json<SessionReport>, ServiceError> {
    Ok(Json(m.report(&id)?))
}

async fn upgrade(State(m): State<Arc<SessionManager>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| connection(socket, m))
}

struct Joined {
    token: String,
    role: Role,
    rx: tokio::sync::broadcast::Receiver<Arc<Snapshot>>,
    last_sent: u64,
}

async fn send(socket: &mut WebSocket, msg: &ServerMessage) -> bool {
    socket.send(Message::Text(msg.to_json().into())).await.is_ok()
}

/// Messages describing one revision, as seen by `role`.
fn revision_messages(snap: &Snapshot, role: Role) -> Vec<ServerMessage> {
    let mut out: Vec<ServerMessage> = snap
        .collapses
        .iter()
        .map(|c| ServerMessage::Collapse {
            revision: snap.revision,
            stone: c.stone.0,
            pos: c.result.to_string(),
        })
        .collect();
    out.push(ServerMessage::State {
        revision: snap.revision,
        view: SessionView::redact(snap, role),
    });
    if let Some(r) = snap.result {
        out.push(ServerMessage::Result {
            revision: snap.revision,
            winner: r.winner().to_string(),
            margin: r.margin,
        });
    }
    out
}

async fn connection(mut socket: WebSocket, m: Arc<SessionManager>) {
    let mut joined: Option<Joined> = None;
    loop {
        let update = async {
            match joined.as_mut() {
                Some(j) => j.rx.recv().await,
                None => std::future::pending().await,
            }
        };
        tokio::select! {
            incoming = socket.recv() => {
                let text = match incoming {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let reply = handle(&m, &text, &mut joined);
                for msg in reply {
                    if !send(&mut socket, &msg).await {
                        return;
                    }
                }
            }
            snap = update => {
                let Some(j) = joined.as_mut() else { continue };
                let msgs = match snap {
                    Ok(snap) if snap.revision > j.last_sent => {
                        j.last_sent = snap.revision;
                        revision_messages(&snap, j.role)
                    }
                    Ok(_) => continue,
                    Err(RecvError::Lagged(_)) => match m.view(&j.token) {
                        Ok(view) => {
                            j.last_sent = view.revision;
                            vec![ServerMessage::State { revision: view.revision, view }]
                        }
                        Err(e) => vec![error_message(&e)],
                    },
                    Err(RecvError::Closed) => break,
                };
                for msg in msgs {
                    if !send(&mut socket, &msg).await {
                        return;
                    }
                }
            }
        }
    }
}

fn handle(m: &SessionManager, text: &str, joined: &mut Option<Joined>) -> Vec<ServerMessage> {
    let msg: ClientMessage = match serde_json::from_str(text) {
        Ok(msg) => msg,
        Err(e) => return vec![error_message(&ServiceError::BadRequest(e.to_string()))],
    };
    let result = match msg {
        ClientMessage::Create(req) => m.create(&req).map(|c| vec![ServerMessage::Created(c)]),
        ClientMessage::Join { token } => m.join(&token).map(|(role, view, rx)| {
            *joined = Some(Joined {
                token,
                role,
                rx,
                last_sent: view.revision,
            });
            vec![ServerMessage::State {
                revision: view.revision,
                view,
            }]
        }),
        // the mover hears about its move through the broadcast like everyone else
        ClientMessage::Move { mv } => match joined.as_ref() {
            None => Err(ServiceError::NotJoined),
            Some(j) => m.submit(&j.token, &mv).map(|_| Vec::new()),
        },
    };
    result.unwrap_or_else(|e| vec![error_message(&e)])
}

/// Binds `addr` and serves until the process stops.
pub async fn serve(addr: SocketAddr, config: ServerConfig) -> std::io::Result<()> {
    if let Some(dir) = &config.data_dir {
        std::fs::create_dir_all(dir)?;
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(SessionManager::new(config)))).await
}
