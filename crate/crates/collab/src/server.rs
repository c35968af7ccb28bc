use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use igp_core::geom::Vec2;
use igp_core::learned::LearnedModels;
use igp_core::policy::PolicyConfig;
use serde::Deserialize;
use tokio::sync::{broadcast, mpsc, oneshot};
use tokio::task::JoinHandle;
use tower_http::services::ServeDir;
use uuid::Uuid;

use crate::session::{RobotMove, Session, SessionConfig, DEFAULT_TIMEOUT_MS};
use crate::wire::WireMessage;

const TICK: Duration = Duration::from_millis(50);

/// Query parameters of `/session`. `join` attaches to a running session;
/// otherwise a new one is created from the remaining fields.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct SessionQuery {
    pub seed: Option<u64>,
    pub timeout_ms: Option<u64>,
    pub scene_index: Option<usize>,
    pub join: Option<Uuid>,
}

enum Command {
    Snapshot(oneshot::Sender<WireMessage>),
    Human { grasp: Vec2, pull: Vec2, reply: oneshot::Sender<Option<WireMessage>> },
}

struct Handle {
    commands: mpsc::WeakSender<Command>,
    events: broadcast::Sender<WireMessage>,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<Uuid, Handle>>>,
    models: Option<Arc<LearnedModels>>,
    policy: PolicyConfig,
}

impl AppState {
    pub fn new(policy: PolicyConfig, models: Option<LearnedModels>) -> Self {
        Self {
            sessions: Arc::default(),
            models: models.map(Arc::new),
            policy,
        }
    }

    /// Sessions with at least one connected client.
    pub fn live_sessions(&self) -> usize {
        let mut map = self.sessions.lock().unwrap();
        map.retain(|_, h| h.commands.upgrade().is_some());
        map.len()
    }

    fn attach(&self, id: Uuid) -> Option<(mpsc::Sender<Command>, broadcast::Receiver<WireMessage>)> {
        let map = self.sessions.lock().unwrap();
        let h = map.get(&id)?;
        Some((h.commands.upgrade()?, h.events.subscribe()))
    }

    fn create(&self, q: &SessionQuery) -> Result<(Uuid, mpsc::Sender<Command>, broadcast::Receiver<WireMessage>), WireMessage> {
        let cfg = SessionConfig {
            seed: q.seed.unwrap_or_else(rand::random),
            scene_index: q.scene_index.unwrap_or(0),
            timeout_ms: q.timeout_ms.unwrap_or(DEFAULT_TIMEOUT_MS),
            policy: self.policy.clone(),
            ..SessionConfig::default()
        };
        let session = Session::new(cfg, self.models.clone()).map_err(|e| e.to_wire())?;
        let id = session.id();
        let (tx, rx) = mpsc::channel(16);
        let (events, sub) = broadcast::channel(64);
        self.sessions.lock().unwrap().insert(
            id,
            Handle {
                commands: tx.downgrade(),
                events: events.clone(),
            },
        );
        let sessions = self.sessions.clone();
        tokio::spawn(async move {
            run_actor(session, rx, events).await;
            sessions.lock().unwrap().remove(&id);
        });
        log::info!("session {id} created");
        Ok((id, tx, sub))
    }
}

/// Owns one session. Ends when every client has disconnected.
async fn run_actor(mut session: Session, mut rx: mpsc::Receiver<Command>, events: broadcast::Sender<WireMessage>) {
    let start = Instant::now();
    let now = || start.elapsed().as_millis() as u64;
    let mut ticker = tokio::time::interval(TICK);
    let mut robot: Option<JoinHandle<igp_core::Result<RobotMove>>> = None;
    let publish = |msgs: Vec<WireMessage>| {
        for m in msgs {
            // no subscribers is fine
            let _ = events.send(m);
        }
    };
    loop {
        tokio::select! {
            cmd = rx.recv() => match cmd {
                None => break,
                Some(Command::Snapshot(reply)) => {
                    let _ = reply.send(session.state_update(now()));
                }
                Some(Command::Human { grasp, pull, reply }) => match session.submit_human_action(grasp, pull, now()) {
                    Ok(msgs) => {
                        let _ = reply.send(None);
                        publish(msgs);
                    }
                    Err(e) => {
                        let _ = reply.send(Some(e.to_wire()));
                    }
                },
            },
            _ = ticker.tick(), if robot.is_none() => {
                if let Some(job) = session.begin_robot_turn(now()) {
                    publish(vec![session.state_update(now())]);
                    robot = Some(tokio::task::spawn_blocking(move || job.run()));
                }
            }
            done = async { robot.as_mut().expect("guarded").await }, if robot.is_some() => {
                robot = None;
                let result = done.unwrap_or_else(|e| Err(igp_core::Error::Precondition(format!("robot task failed: {e}"))));
                publish(session.finish_robot_turn(result, now()));
            }
        }
    }
    if let Some(r) = robot {
        r.abort();
    }
    log::info!("session {} closed after {} steps", session.id(), session.steps().len());
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/healthz", get(healthz))
        .route("/session", get(session_ws))
        .with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

pub async fn serve(addr: SocketAddr, state: AppState, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state, static_dir)).await
}

async fn healthz(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok", "sessions": state.live_sessions()}))
}

async fn session_ws(ws: WebSocketUpgrade, Query(q): Query<SessionQuery>, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| client(socket, q, state)).into_response()
}

async fn send(socket: &mut futures::stream::SplitSink<WebSocket, Message>, msg: &WireMessage) -> bool {
    socket.send(Message::Text(msg.to_json().into())).await.is_ok()
}

async fn client(socket: WebSocket, q: SessionQuery, state: AppState) {
    let (mut tx, mut rx) = socket.split();
    let attached = match q.join {
        Some(id) => state.attach(id).ok_or_else(|| WireMessage::error("unknown_session", format!("no live session {id}"))),
        None => state.create(&q).map(|(_, c, e)| (c, e)),
    };
    let (commands, mut events) = match attached {
        Ok(a) => a,
        Err(msg) => {
            send(&mut tx, &msg).await;
            let _ = tx.close().await;
            return;
        }
    };
    let (reply, snapshot) = oneshot::channel();
    if commands.send(Command::Snapshot(reply)).await.is_err() {
        return;
    }
    match snapshot.await {
        Ok(msg) if send(&mut tx, &msg).await => {}
        _ => return,
    }
    loop {
        tokio::select! {
            event = events.recv() => match event {
                Ok(msg) => {
                    if !send(&mut tx, &msg).await {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => log::warn!("client lagged by {n} messages"),
                Err(broadcast::error::RecvError::Closed) => break,
            },
            incoming = rx.next() => {
                let text = match incoming {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let reply = match serde_json::from_str::<WireMessage>(&text) {
                    Ok(WireMessage::HumanAction { grasp, pull }) => {
                        let (reply, answer) = oneshot::channel();
                        let cmd = Command::Human { grasp: grasp.into(), pull: pull.into(), reply };
                        if commands.send(cmd).await.is_err() {
                            break;
                        }
                        answer.await.ok().flatten()
                    }
                    Ok(_) => Some(WireMessage::error("unexpected_message", "clients may only send human_action")),
                    Err(e) => Some(WireMessage::error("bad_json", e.to_string())),
                };
                if let Some(msg) = reply {
                    if !send(&mut tx, &msg).await {
                        break;
                    }
                }
            }
        }
    }
}
