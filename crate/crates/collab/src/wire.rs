use igp_core::harness::TerminalStatus;
use igp_core::sim::WorldSnapshot;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::session::Phase;

/// JSON messages exchanged on `/session`, tagged by `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireMessage {
    StateUpdate {
        session_id: Uuid,
        phase: Phase,
        world: WorldSnapshot,
        target: [f64; 2],
        /// Current object-target distance.
        l: f64,
        steps: usize,
        human_agent: usize,
        timeout_ms: u64,
        /// Time left before the robot acts (0 unless waiting for the human).
        robot_in_ms: u64,
        success_radius: f64,
    },
    /// Client request: grasp and pull points in world coordinates.
    HumanAction { grasp: [f64; 2], pull: [f64; 2] },
    RobotActionNotice {
        agent_id: usize,
        grasp: [f64; 3],
        pull: [f64; 3],
        predicted_l: Option<f64>,
        candidates: usize,
    },
    Terminal {
        status: TerminalStatus,
        success: bool,
        /// Final offset.
        fo: f64,
        /// Shortest offset.
        so: f64,
        /// Steps taken.
        sc: usize,
    },
    Error { code: String, message: String },
}

impl WireMessage {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        WireMessage::Error {
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("wire messages serialise")
    }
}
