//! Runs one episode, writing the candidate log and the per-step records as
//! JSON lines.
//!
//! `cargo run --release -p igp-core --example episode_log -- GIP 8 /tmp/igp_episode`

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use igp_core::harness::{run_episode_on, EpisodeOptions, Method, TaskKind, TaskSpec};

fn main() -> igp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let method: Method = args.next().as_deref().unwrap_or("GIP").parse()?;
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(8);
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("igp_episode"));
    std::fs::create_dir_all(&dir)?;

    let task = TaskSpec::new(TaskKind::GoalReach);
    let scene = task.sample_scene(seed, 0)?;
    let mut candidates = BufWriter::new(File::create(dir.join("candidates.jsonl"))?);
    let record = run_episode_on(&task, scene, method, seed, &EpisodeOptions::default(), Some(&mut candidates));
    candidates.flush()?;

    let mut steps = BufWriter::new(File::create(dir.join("steps.jsonl"))?);
    for s in &record.steps {
        writeln!(steps, "{}", serde_json::to_string(s)?)?;
        println!("step {:2} agent {} {:?}  l {:.3} -> {:.3}", s.step, s.agent_id, s.outcome, s.l_before, s.l_after);
    }
    steps.flush()?;
    println!("{:?} after {} steps, final offset {:.3}, logs in {}", record.status, record.steps.len(), record.final_offset(), dir.display());
    Ok(())
}
