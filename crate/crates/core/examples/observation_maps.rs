//! Renders every agent's observation maps (depth, segmentation, reach,
//! relative-position and spatial relative-position) as PGM files.
//!
//! `cargo run --release -p igp-core --example observation_maps -- /tmp/igp_maps`

use std::path::PathBuf;

use igp_core::harness::{TaskKind, TaskSpec};
use igp_core::perception::{dump_observation, render_observation, ObservationConfig};

fn main() -> igp_core::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("igp_maps"));
    let scene = TaskSpec::new(TaskKind::GoalReach).sample_scene(5, 0)?;
    let cfg = ObservationConfig::default();
    for agent in 0..scene.world.n_agents() {
        let obs = render_observation(&scene.world, agent, scene.target, &cfg);
        let side = dump_observation(&obs, &dir, &format!("agent{agent}"))?;
        println!("agent {agent}: {}x{} cells at {} m, origin {:?}", side.w, side.w, side.resolution, side.origin);
    }
    println!("maps in {}", dir.display());
    Ok(())
}
