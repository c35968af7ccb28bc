//! Plans one step and prints every candidate with its predicted distance to
//! the reference point; `*` marks the chosen one.
//!
//! `cargo run --release -p igp-core --example plan_step -- 21`

use igp_core::harness::{TaskKind, TaskSpec};
use igp_core::policy::{plan_step, PolicyConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> igp_core::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(21);
    let scene = TaskSpec::new(TaskKind::GoalReach).sample_scene(seed, 0)?;
    let cfg = PolicyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = plan_step(&scene.world, scene.target, &cfg, None, &mut rng)?;

    println!("reference {:.3?}, {} sampled, {} kept", plan.reference.as_slice(), plan.sampled, plan.candidates.len());
    for (a, s) in plan.subgoals.iter().enumerate() {
        println!("agent {a} subgoal {:.3?} ({:?})", s.position.as_slice(), s.source);
    }
    for skip in &plan.skipped {
        println!("agent {} skipped: {}", skip.agent_id, skip.reason);
    }
    for (i, c) in plan.candidates.iter().enumerate() {
        let mark = if i == plan.chosen { '*' } else { ' ' };
        println!(
            "{mark} agent {} #{:2}  grasp {:.2?}  pull {:.2?}  l {:.4}",
            c.agent_id, c.index, c.action.grasp.as_slice(), c.action.pull.as_slice(), c.predicted_l
        );
    }
    Ok(())
}
