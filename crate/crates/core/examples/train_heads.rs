//! Generates an action-outcome dataset and trains the three learned heads.
//!
//! `cargo run --release -p igp-core --example train_heads -- 2000 /tmp/igp_data`

use std::path::PathBuf;
use std::time::Instant;

use igp_core::harness::{generate_dataset, DatasetConfig};
use igp_core::learned::{train_head, Head, TrainConfig};

fn main() -> igp_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(500);
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("igp_dataset"));

    let t = Instant::now();
    let data = generate_dataset(n, 7, &dir, &DatasetConfig::default())?;
    println!("{n} instances in {:.1}s -> {}", t.elapsed().as_secs_f64(), dir.display());

    let cfg = TrainConfig::default();
    for head in [Head::Pull, Head::Outcome, Head::GraspScore] {
        let t = Instant::now();
        let trained = train_head(&data, head, &cfg)?;
        let r = &trained.report;
        println!(
            "{head:?}: {} train samples, test loss {:.4} vs mean predictor {:.4} (ratio {:.3}), {:.1}s",
            r.n_train,
            r.test_loss,
            r.baseline_test_loss,
            r.test_loss / r.baseline_test_loss,
            t.elapsed().as_secs_f64()
        );
        trained.params.save(&dir.join(head.file_name()))?;
    }
    Ok(())
}
