//! Draws the feasible subgoal region for each agent of a scene and compares the
//! chosen point with the straight-line alternative.
//!
//! `cargo run --release -p igp-core --example gip_region -- 12 /tmp/igp_region`

use std::path::PathBuf;

use igp_core::harness::{TaskKind, TaskSpec};
use igp_core::policy::PolicyConfig;
use igp_core::subgoal::{dump_gip_region, lgp_subgoal, planning_window};

fn main() -> igp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(12);
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("igp_region"));
    std::fs::create_dir_all(&dir)?;

    let scene = TaskSpec::new(TaskKind::GoalReach).sample_scene(seed, 0)?;
    let world = &scene.world;
    let policy = PolicyConfig::default();
    let object = world.object_position();
    let window = planning_window(object, &policy.obs);
    let line = lgp_subgoal(object, scene.target, &window);
    println!("object {:.2?} target {:.2?}", object.as_slice(), scene.target.as_slice());
    println!("line subgoal {:.3?}", line.position.as_slice());
    for agent in 0..world.n_agents() {
        let path = dir.join(format!("agent{agent}.pgm"));
        let sub = dump_gip_region(&path, world.agent_position(agent), object, scene.target, world.config.max_reach, &window, policy.grid_step)?;
        println!("agent {agent}: {:?} subgoal {:.3?} -> {}", sub.source, sub.position.as_slice(), path.display());
    }
    Ok(())
}
