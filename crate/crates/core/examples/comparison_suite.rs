//! Runs a seeded method comparison and prints the metrics table.
//!
//! `cargo run --release -p igp-core --example comparison_suite -- goal_reach 10 GIP NS RG`

use std::time::Instant;

use igp_core::harness::{run_suite, to_table, SuiteConfig, TaskKind};

fn main() -> igp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let task: TaskKind = args.next().as_deref().unwrap_or("goal_reach").parse()?;
    let episodes = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let mut methods: Vec<String> = args.collect();
    if methods.is_empty() {
        methods = vec!["GIP".into(), "NS".into()];
    }
    let cfg = SuiteConfig {
        task,
        methods,
        episodes,
        seed: 1,
        policy: Default::default(),
        task_spec: None,
        models_dir: None,
        include_failures: false,
    };
    let t = Instant::now();
    let result = run_suite(&cfg)?;
    print!("{}", to_table(&result.rows));
    for recs in &result.records {
        let statuses: Vec<String> = recs.iter().map(|r| format!("{:?}", r.status)).collect();
        println!("{}: {}", recs[0].method, statuses.join(" "));
    }
    println!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
