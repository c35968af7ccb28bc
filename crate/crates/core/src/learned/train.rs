use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mlp::{Activation, Loss, MlpGrad, MlpParams};
use crate::error::{Error, Result};

pub const MIN_TRAIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Train / validation / test fractions.
    pub split: [f64; 3],
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.9,
            epochs: 200,
            batch_size: 32,
            seed: 0,
            split: [0.8, 0.1, 0.1],
            hidden: vec![32, 32],
            activation: Activation::Tanh,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.split.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.split.iter().any(|r| *r < 0.0) {
            return Err(Error::Config(format!("split ratios {:?} must be non-negative and sum to 1", self.split)));
        }
        if self.batch_size == 0 || self.epochs == 0 || !(self.learning_rate > 0.0) {
            return Err(Error::Config("epochs, batch size and learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Index sets of a seeded shuffle cut into train / validation / test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_indices(n: usize, ratios: [f64; 3], seed: u64) -> Split {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ratios[0] * n as f64).round() as usize;
    let n_val = ((ratios[1] * n as f64).round() as usize).min(n - n_train);
    let test = idx.split_off(n_train + n_val);
    let val = idx.split_off(n_train);
    Split { train: idx, val, test }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train: f64,
    pub val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Epoch 0 is the untrained network.
    pub curve: Vec<EpochLoss>,
    pub test_loss: f64,
    /// Test loss of a constant predictor equal to the training-target mean.
    pub baseline_test_loss: f64,
    /// Epoch whose weights are returned (lowest validation loss).
    pub best_epoch: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

pub struct Trained {
    pub params: MlpParams,
    pub report: TrainReport,
}

/// Per-dimension affine map to zero mean / unit variance.
#[derive(Debug, Clone)]
struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    fn fit<'a>(rows: impl Iterator<Item = &'a Vec<f64>> + Clone, dim: usize) -> Self {
        let n = rows.clone().count().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for r in rows.clone() {
            mean.iter_mut().zip(r).for_each(|(m, v)| *m += v / n);
        }
        let mut var = vec![0.0; dim];
        for r in rows {
            var.iter_mut().zip(r).zip(&mean).for_each(|((s, v), m)| *s += (v - m).powi(2) / n);
        }
        let std = var.into_iter().map(|v| if v.sqrt() > 1e-9 { v.sqrt() } else { 1.0 }).collect();
        Self { mean, std }
    }

    fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }
}

/// Rewrites the first and last layers so the network consumes raw inputs and
/// emits raw outputs.
fn fold(params: &mut MlpParams, input: &Standardizer, output: &Standardizer) {
    let n_in = params.input_dim();
    let (w, b) = (&mut params.weights[0], &mut params.biases[0]);
    for (o, bias) in b.iter_mut().enumerate() {
        for i in 0..n_in {
            let k = &mut w[o * n_in + i];
            *k /= input.std[i];
            *bias -= *k * input.mean[i];
        }
    }
    let last = params.n_layers() - 1;
    let n_hidden = params.layer_sizes[last];
    let (w, b) = (&mut params.weights[last], &mut params.biases[last]);
    for (o, bias) in b.iter_mut().enumerate() {
        for i in 0..n_hidden {
            w[o * n_hidden + i] *= output.std[o];
        }
        *bias = *bias * output.std[o] + output.mean[o];
    }
}

pub fn mean_loss(params: &MlpParams, samples: &[&Sample], loss: Loss) -> Result<f64> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for s in samples {
        total += loss.value(&params.forward(&s.x)?, &s.y);
    }
    Ok(total / samples.len() as f64)
}

/// Trains on a seeded `cfg.split` partition of `samples`.
pub fn train(samples: &[Sample], cfg: &TrainConfig, loss: Loss) -> Result<Trained> {
    cfg.validate()?;
    let split = split_indices(samples.len(), cfg.split, cfg.seed);
    let pick = |idx: &[usize]| idx.iter().map(|&i| samples[i].clone()).collect::<Vec<_>>();
    train_sets(&pick(&split.train), &pick(&split.val), &pick(&split.test), cfg, loss)
}

/// Minibatch SGD with momentum on standardized inputs (and, for regression,
/// standardized targets). The returned parameters work on raw values.
pub fn train_sets(
    train_set: &[Sample],
    val_set: &[Sample],
    test_set: &[Sample],
    cfg: &TrainConfig,
    loss: Loss,
) -> Result<Trained> {
    cfg.validate()?;
    if train_set.len() < MIN_TRAIN_SAMPLES {
        return Err(Error::NotEnoughSamples {
            needed: MIN_TRAIN_SAMPLES,
            got: train_set.len(),
        });
    }
    let (dim_in, dim_out) = (train_set[0].x.len(), train_set[0].y.len());
    for s in train_set.iter().chain(val_set).chain(test_set) {
        if s.x.len() != dim_in {
            return Err(Error::Dimension { expected: dim_in, got: s.x.len() });
        }
        if s.y.len() != dim_out {
            return Err(Error::Dimension { expected: dim_out, got: s.y.len() });
        }
    }
    fn as_refs(set: &[Sample]) -> Vec<&Sample> {
        set.iter().collect()
    }
    let (train_set, val_set, test_set) = (as_refs(train_set), as_refs(val_set), as_refs(test_set));

    let in_std = Standardizer::fit(train_set.iter().map(|s| &s.x), dim_in);
    let out_std = match loss {
        Loss::Mse => Standardizer::fit(train_set.iter().map(|s| &s.y), dim_out),
        Loss::Bce => Standardizer::identity(dim_out),
    };
    let norm: Vec<Sample> = train_set
        .iter()
        .map(|s| Sample {
            x: in_std.apply(&s.x),
            y: out_std.apply(&s.y),
        })
        .collect();

    let mut sizes = vec![dim_in];
    sizes.extend(&cfg.hidden);
    sizes.push(dim_out);
    let mut params = MlpParams::init(&sizes, cfg.activation, cfg.seed);
    let mut velocity = MlpGrad::zeros_like(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..norm.len()).collect();

    let folded = |p: &MlpParams| {
        let mut p = p.clone();
        fold(&mut p, &in_std, &out_std);
        p
    };
    let mut curve = Vec::with_capacity(cfg.epochs + 1);
    let p0 = folded(&params);
    curve.push(EpochLoss {
        epoch: 0,
        train: mean_loss(&p0, &train_set, loss)?,
        val: mean_loss(&p0, &val_set, loss)?,
    });
    // checkpoint with the lowest validation loss (the last epoch when there is no validation set)
    let mut best = (curve[0].val, 0, p0);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let mut grad = MlpGrad::zeros_like(&params);
            for &i in batch {
                let (_, g) = params.gradient(&norm[i].x, &norm[i].y, loss)?;
                grad.add_scaled(&g, 1.0 / batch.len() as f64);
            }
            // v <- momentum * v - lr * g ; theta <- theta + v
            let scale = cfg.momentum;
            for (v, g) in velocity.weights.iter_mut().zip(&grad.weights).chain(velocity.biases.iter_mut().zip(&grad.biases)) {
                v.iter_mut().zip(g).for_each(|(v, g)| *v = scale * *v - cfg.learning_rate * g);
            }
            for (p, v) in params.weights.iter_mut().zip(&velocity.weights).chain(params.biases.iter_mut().zip(&velocity.biases)) {
                p.iter_mut().zip(v).for_each(|(p, v)| *p += v);
            }
        }
        let p = folded(&params);
        let train_loss = mean_loss(&p, &train_set, loss)?;
        if !train_loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        let val = mean_loss(&p, &val_set, loss)?;
        curve.push(EpochLoss {
            epoch,
            train: train_loss,
            val,
        });
        log::debug!("epoch {epoch}: train {train_loss:.5} val {val:.5}");
        if val_set.is_empty() || val < best.0 {
            best = (val, epoch, p);
        }
    }

    let (_, best_epoch, params) = best;
    let test_loss = mean_loss(&params, &test_set, loss)?;
    let mut baseline = MlpParams::zeros(&[dim_in, dim_out], cfg.activation);
    let train_mean = Standardizer::fit(train_set.iter().map(|s| &s.y), dim_out).mean;
    baseline.biases[0] = match loss {
        Loss::Mse => train_mean,
        // logit of the base rate
        Loss::Bce => train_mean.iter().map(|p| (p.clamp(1e-6, 1.0 - 1e-6) / (1.0 - p.clamp(1e-6, 1.0 - 1e-6))).ln()).collect(),
    };
    let baseline_test_loss = mean_loss(&baseline, &test_set, loss)?;
    Ok(Trained {
        params,
        report: TrainReport {
            curve,
            test_loss,
            baseline_test_loss,
            best_epoch,
            n_train: train_set.len(),
            n_val: val_set.len(),
            n_test: test_set.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn split_sizes_follow_ratios() {
        let s = split_indices(2000, [0.8, 0.1, 0.1], 3);
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (1600, 200, 200));
        let mut all: Vec<_> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
        all.sort();
        assert_eq!(all, (0..2000).collect::<Vec<_>>());
    }

    fn toy(n: usize) -> Vec<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        (0..n)
            .map(|_| {
                let a: f64 = rng.random_range(-1.0..1.0);
                let b: f64 = rng.random_range(-1.0..1.0);
                Sample {
                    x: vec![a, b],
                    y: vec![3.0 * a - b + 0.5 * a * b + 10.0],
                }
            })
            .collect()
    }

    #[test]
    fn training_reduces_loss_and_beats_mean() {
        let cfg = TrainConfig {
            epochs: 30,
            ..TrainConfig::default()
        };
        let t = train(&toy(500), &cfg, Loss::Mse).unwrap();
        let c = &t.report.curve;
        assert!(c.last().unwrap().train < c[1].train);
        assert!(t.report.test_loss < 0.1 * t.report.baseline_test_loss);
    }

    #[test]
    fn seeded_training_is_bitwise_reproducible() {
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let a = train(&toy(200), &cfg, Loss::Mse).unwrap().params;
        let b = train(&toy(200), &cfg, Loss::Mse).unwrap().params;
        assert_eq!(a.flat(), b.flat());
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let err = train(&toy(50), &TrainConfig::default(), Loss::Mse).err().unwrap();
        assert!(matches!(err, Error::NotEnoughSamples { .. }));
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let cfg = TrainConfig {
            learning_rate: 1e6,
            epochs: 50,
            activation: Activation::Relu,
            ..TrainConfig::default()
        };
        let err = train(&toy(300), &cfg, Loss::Mse).err().unwrap();
        assert!(matches!(err, Error::TrainingDiverged { .. }), "{err}");
    }
}
