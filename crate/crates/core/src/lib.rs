//! Planar rope-and-box manipulation with the iterative grasp-pull primitive.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: quasi-static physics for agents, ropes (particle chains) and one rigid box.
//! - [`perception`]: agent-centric top-down observation maps rendered from a world.
//! - [`subgoal`]: linear greedy and geometric intersection subgoal planners.
//! - [`learned`]: small multilayer perceptrons and their trainer.
//! - [`policy`]: grasp/pull proposal, action sampling, outcome prediction and selection.
//! - [`baselines`]: tension-driven and fixed-grasp comparison policies.
//! - [`harness`]: tasks, termination, metrics, dataset generation and suites.

pub mod baselines;
pub mod error;
pub mod geom;
pub mod harness;
pub mod learned;
pub mod perception;
pub mod policy;
pub mod sim;
pub mod subgoal;

pub use error::{Error, Result};
pub use geom::{Pose2, Vec2, Vec3};
