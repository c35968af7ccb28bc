use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the activation output `a` and pre-activation `z`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Loss {
    /// Mean over outputs of the squared error.
    Mse,
    /// Mean over outputs of binary cross-entropy on logits.
    Bce,
}

impl Loss {
    pub fn value(self, y: &[f64], t: &[f64]) -> f64 {
        let n = y.len() as f64;
        match self {
            Loss::Mse => y.iter().zip(t).map(|(y, t)| (y - t).powi(2)).sum::<f64>() / n,
            Loss::Bce => y.iter().zip(t).map(|(&z, &t)| softplus(z) - t * z).sum::<f64>() / n,
        }
    }

    fn output_gradient(self, y: &[f64], t: &[f64]) -> Vec<f64> {
        let n = y.len() as f64;
        match self {
            Loss::Mse => y.iter().zip(t).map(|(y, t)| 2.0 * (y - t) / n).collect(),
            Loss::Bce => y.iter().zip(t).map(|(&z, &t)| (sigmoid(z) - t) / n).collect(),
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Fully connected network: hidden layers use `activation`, the output layer is linear.
/// `weights[l]` is row-major `[out][in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_meta: Option<serde_json::Value>,
}

/// Gradient with the same layout as [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrad {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpGrad {
    pub fn zeros_like(p: &MlpParams) -> Self {
        Self {
            weights: p.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: p.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &MlpGrad, k: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.iter_mut().zip(b).for_each(|(a, b)| *a += k * b);
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            a.iter_mut().zip(b).for_each(|(a, b)| *a += k * b);
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b).copied())
            .collect()
    }
}

impl MlpParams {
    pub fn zeros(layer_sizes: &[usize], activation: Activation) -> Self {
        let pairs = layer_sizes.windows(2);
        Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            weights: pairs.clone().map(|p| vec![0.0; p[0] * p[1]]).collect(),
            biases: pairs.map(|p| vec![0.0; p[1]]).collect(),
            train_meta: None,
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(layer_sizes: &[usize], activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(layer_sizes, activation);
        for (l, w) in p.weights.iter_mut().enumerate() {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            w.iter_mut().for_each(|v| *v = rng.random_range(-limit..limit));
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("at least one layer")
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(Error::Config("a network needs at least two layer sizes".into()));
        }
        for (l, pair) in self.layer_sizes.windows(2).enumerate() {
            let w = self.weights.get(l).map_or(0, Vec::len);
            let b = self.biases.get(l).map_or(0, Vec::len);
            if w != pair[0] * pair[1] {
                return Err(Error::Dimension { expected: pair[0] * pair[1], got: w });
            }
            if b != pair[1] {
                return Err(Error::Dimension { expected: pair[1], got: b });
            }
        }
        if self.weights.len() != self.layer_sizes.len() - 1 {
            return Err(Error::Dimension {
                expected: self.layer_sizes.len() - 1,
                got: self.weights.len(),
            });
        }
        let finite = self.weights.iter().chain(&self.biases).flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("network parameters are not finite".into()));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut a = x.to_vec();
        let last = self.n_layers() - 1;
        for l in 0..self.n_layers() {
            let mut z = affine(&self.weights[l], &self.biases[l], &a);
            if l != last {
                z.iter_mut().for_each(|v| *v = self.activation.apply(*v));
            }
            a = z;
        }
        Ok(a)
    }

    /// Loss at `(x, target)` and its exact gradient with respect to every parameter.
    pub fn gradient(&self, x: &[f64], target: &[f64], loss: Loss) -> Result<(f64, MlpGrad)> {
        self.check_input(x)?;
        if target.len() != self.output_dim() {
            return Err(Error::Dimension {
                expected: self.output_dim(),
                got: target.len(),
            });
        }
        let last = self.n_layers() - 1;
        // activations[l] feeds layer l; pre[l] is layer l's pre-activation
        let mut activations = vec![x.to_vec()];
        let mut pre = Vec::with_capacity(self.n_layers());
        for l in 0..self.n_layers() {
            let z = affine(&self.weights[l], &self.biases[l], &activations[l]);
            let a = if l == last {
                z.clone()
            } else {
                z.iter().map(|&v| self.activation.apply(v)).collect()
            };
            pre.push(z);
            activations.push(a);
        }
        let y = &activations[self.n_layers()];
        let value = loss.value(y, target);

        let mut grad = MlpGrad::zeros_like(self);
        let mut delta = loss.output_gradient(y, target);
        for l in (0..self.n_layers()).rev() {
            let input = &activations[l];
            let n_in = input.len();
            for (o, d) in delta.iter().enumerate() {
                grad.biases[l][o] = *d;
                let row = &mut grad.weights[l][o * n_in..(o + 1) * n_in];
                row.iter_mut().zip(input).for_each(|(g, a)| *g = d * a);
            }
            if l > 0 {
                let w = &self.weights[l];
                let mut back = vec![0.0; n_in];
                for (o, d) in delta.iter().enumerate() {
                    let row = &w[o * n_in..(o + 1) * n_in];
                    back.iter_mut().zip(row).for_each(|(b, w)| *b += d * w);
                }
                for (i, b) in back.iter_mut().enumerate() {
                    *b *= self.activation.derivative(pre[l - 1][i], input[i]);
                }
                delta = back;
            }
        }
        Ok((value, grad))
    }

    pub fn flat(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b).copied())
            .collect()
    }

    pub fn set_flat(&mut self, values: &[f64]) {
        let mut it = values.iter().copied();
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            w.iter_mut().chain(b.iter_mut()).for_each(|v| *v = it.next().expect("enough values"));
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let p: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        p.validate()?;
        Ok(p)
    }
}

fn affine(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let n_in = x.len();
    b.iter()
        .enumerate()
        .map(|(o, bias)| {
            let row = &w[o * n_in..(o + 1) * n_in];
            bias + row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let p = MlpParams::zeros(&[4, 8, 3], Activation::Tanh);
        assert_eq!(p.forward(&[1.0, -2.0, 3.0, 0.5]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn identity_layer_passes_input() {
        let mut p = MlpParams::zeros(&[3, 3], Activation::Relu);
        for i in 0..3 {
            p.weights[0][i * 3 + i] = 1.0;
        }
        let x = [0.25, -1.5, 2.0];
        assert_eq!(p.forward(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = MlpParams::init(&[4, 5, 2], Activation::Tanh, 1);
        assert!(matches!(p.forward(&[1.0]), Err(Error::Dimension { expected: 4, got: 1 })));
    }

    #[test]
    fn zero_gradient_at_exact_fit() {
        let p = MlpParams::init(&[3, 6, 2], Activation::Tanh, 5);
        let x = [0.1, 0.2, -0.3];
        let y = p.forward(&x).unwrap();
        let (loss, g) = p.gradient(&x, &y, Loss::Mse).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.flat().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn params_json_round_trip() {
        let p = MlpParams::init(&[9, 32, 32, 2], Activation::Tanh, 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        p.save(&path).unwrap();
        assert_eq!(MlpParams::load(&path).unwrap(), p);
    }
}
