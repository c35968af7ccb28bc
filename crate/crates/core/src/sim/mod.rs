//! Planar quasi-static physics: agents, particle-chain ropes and one rigid box.
//!
//! Ropes are inextensible chains lying on the ground plane. A rope held by a
//! gripper is relaxed between its two pins (box attachment and gripper); the
//! box is dragged only when the held section is pulled taut past the static
//! friction threshold, and only along the pull direction.

mod action;
mod config;
mod execute;
mod snapshot;
mod solver;
mod world;

pub use action::{IgpAction, PullCommand};
pub use config::{BoxDims, WorldConfig, GRAVITY};
pub use execute::{execute_command, execute_command_observed, execute_igp, ExecOptions, Trajectory, TrajectoryPoint};
pub use snapshot::{GripperSnapshot, WorldSnapshot};
pub use solver::{settle, SettleReport};
pub use world::{create_world, rope_arclength, RigidBody, RopeState, WorldState};
