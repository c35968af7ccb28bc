//! Small multilayer perceptrons standing in for the grasp, pull and outcome networks.

mod features;
mod heads;
mod mlp;
mod train;

pub use features::{FeatureVector, FEATURE_DIM};
pub use heads::{head_sample, head_samples, train_head, Head, LearnedModels, GOOD_GRASP_GAIN, MIN_PULL_DISPLACEMENT};
pub use mlp::{sigmoid, Activation, Loss, MlpGrad, MlpParams};
pub use train::{mean_loss, split_indices, train, train_sets, EpochLoss, Sample, Split, TrainConfig, TrainReport, Trained, MIN_TRAIN_SAMPLES};
