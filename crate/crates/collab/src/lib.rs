//! Human-robot collaboration sessions over WebSocket.
//!
//! A human drives one agent's rope; whenever the human stays idle past the
//! timeout the robot agents take one full planning step. Each session is owned
//! by a single actor task, so actions never interleave.

mod server;
mod session;
mod wire;

pub use server::{router, serve, AppState, SessionQuery};
pub use session::{DEFAULT_TIMEOUT_MS, Phase, RobotJob, RobotMove, Session, SessionConfig, SessionError};
pub use wire::WireMessage;
