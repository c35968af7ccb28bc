mod common;

use common::gradient_check;
use igp_core::geom::Vec2;
use igp_core::harness::{generate_dataset, load_dataset, DatasetConfig};
use igp_core::learned::{head_samples, train, train_head, Activation, Head, LearnedModels, Loss, MlpParams, Sample, TrainConfig, FEATURE_DIM};
use igp_core::policy::{plan_step, PolicyConfig, PredictorKind, Proposer, Scorer};
use igp_core::sim::{create_world, WorldConfig};
use igp_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (act, loss, out) in [
        (Activation::Tanh, Loss::Mse, 2),
        (Activation::Tanh, Loss::Bce, 1),
        (Activation::Relu, Loss::Mse, 3),
    ] {
        for seed in 0..5 {
            let p = MlpParams::init(&[5, 7, 6, out], act, seed);
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t: Vec<f64> = (0..out)
                .map(|_| if loss == Loss::Bce { rng.random_range(0..2) as f64 } else { rng.random_range(-1.0..1.0) })
                .collect();
            let err = gradient_check(&p, &x, &t, loss);
            assert!(err <= 1e-4, "{act:?} {loss:?} seed {seed}: {err}");
        }
    }
}

#[test]
fn params_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = MlpParams::init(&[3, 4, 2], Activation::Tanh, 1);
    let path = dir.path().join("m.json");
    p.save(&path).unwrap();
    let q = MlpParams::load(&path).unwrap();
    let x = [0.1, -0.2, 0.3];
    assert_eq!(p.forward(&x).unwrap(), q.forward(&x).unwrap());
}

#[test]
fn fits_a_smooth_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<Sample> = (0..600)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            Sample {
                x: vec![a, b],
                y: vec![a.sin() + 0.5 * b, a * b],
            }
        })
        .collect();
    let cfg = TrainConfig { epochs: 60, ..TrainConfig::default() };
    let t = train(&samples, &cfg, Loss::Mse).unwrap();
    assert!(t.report.test_loss < 0.1 * t.report.baseline_test_loss);
    assert_eq!(t.report.curve.len(), 61);
    assert!(t.report.curve.last().unwrap().train < t.report.curve[0].train);
}

#[test]
fn tiny_training_set_is_rejected() {
    let s: Vec<Sample> = (0..20).map(|i| Sample { x: vec![i as f64], y: vec![0.0] }).collect();
    assert!(matches!(train(&s, &TrainConfig::default(), Loss::Mse), Err(Error::NotEnoughSamples { .. })));
}

#[test]
fn dataset_heads_train_and_drive_the_policy() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_dataset(400, 3, dir.path(), &DatasetConfig::default()).unwrap();
    assert_eq!(data.manifest.splits.train.len(), 320);
    let reloaded = load_dataset(dir.path()).unwrap();
    assert_eq!(reloaded, data);

    let [train_set, _, _] = head_samples(&data, Head::Outcome).unwrap();
    assert_eq!(train_set[0].x.len(), FEATURE_DIM + 2);

    let cfg = TrainConfig { epochs: 40, ..TrainConfig::default() };
    let mut models = LearnedModels::default();
    for head in [Head::Pull, Head::Outcome, Head::GraspScore] {
        let t = train_head(&data, head, &cfg).unwrap();
        assert!(t.report.test_loss.is_finite());
        t.params.save(&dir.path().join(head.file_name())).unwrap();
        models.set(head, t.params);
    }
    let loaded = LearnedModels::load_dir(dir.path()).unwrap();
    assert_eq!(loaded, models);

    let world = create_world(WorldConfig::default()).unwrap();
    let policy = PolicyConfig {
        scorer: Scorer::Learned,
        proposer: Proposer::Learned,
        predictor: PredictorKind::Learned,
        ..PolicyConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let plan = plan_step(&world, Vec2::new(0.5, 0.0), &policy, Some(&loaded), &mut rng).unwrap();
    assert_eq!(plan.candidates.len(), 22);
    assert!(plan.candidates.iter().all(|c| c.predicted_l.is_finite()));
}

#[test]
fn corrupted_dataset_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(10, 1, dir.path(), &DatasetConfig::default()).unwrap();
    let path = dir.path().join("instances.jsonl");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push('\n');
    std::fs::write(&path, text).unwrap();
    assert!(load_dataset(dir.path()).is_err());
}
