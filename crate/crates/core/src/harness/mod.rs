//! Tasks, episodes, metrics, suites and the action-outcome dataset.

mod dataset;
mod episode;
mod metrics;
mod suite;
mod task;
mod termination;

pub use dataset::{generate_dataset, generate_instance, load_dataset, Dataset, DatasetConfig, DatasetInstance, Manifest, MIN_INSTANCES};
pub use episode::{config_hash, run_episode, run_episode_on, EpisodeOptions, EpisodeRecord, Method, StepOutcome, StepRecord};
pub use metrics::{compute_metrics, MeanStd, MetricsSummary};
pub use suite::{episode_seed, run_method, run_suite, to_csv, to_table, SuiteConfig, SuiteResult, SuiteRow};
pub use task::{Scene, TaskKind, TaskRanges, TaskSpec};
pub use termination::{check_termination, rope_lost, rope_visible, stalled, TerminalStatus, STALL_WINDOW};
