//! One grasp-pull on a two-agent scene: grasps agent 0's rope at the free end
//! and drags it straight back, then reports what the box did.
//!
//! `cargo run --release -p igp-core --example physics_pull -- 0.4`

use igp_core::geom::{lift, xy};
use igp_core::harness::{TaskKind, TaskSpec};
use igp_core::sim::{execute_command, rope_arclength, ExecOptions, PullCommand};

fn main() -> igp_core::Result<()> {
    let pull: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.4);
    let scene = TaskSpec::new(TaskKind::GoalReach).sample_scene(3, 0)?;
    let world = scene.world;
    let rope = &world.ropes[0];
    let end = rope.particles[rope.free_end_index()];
    let base = world.agent_position(0);
    let away = (base - world.object_position()).normalize();
    let command = PullCommand {
        agent_id: 0,
        grasp: end,
        waypoints: vec![lift(xy(&end) + away * pull, end.z)],
    };
    // the free end may lie past the arm's reach
    let (next, traj) = execute_command(&world, &command, ExecOptions { enforce_reach: false })?;

    println!("rope {:.3} m (arclength {:.3} -> {:.3})", rope.rest_length(), rope_arclength(rope), rope_arclength(&next.ropes[0]));
    println!("gripper increments: {}", traj.waypoints.len() - 1);
    println!(
        "box moved {:.3} m for a {pull:.3} m pull, heading {:.1} -> {:.1} deg",
        traj.displacement.norm(),
        world.body.pose.theta.to_degrees(),
        next.body.pose.theta.to_degrees()
    );
    println!("{}", serde_json::to_string(&next.to_snapshot())?.len());
    Ok(())
}
