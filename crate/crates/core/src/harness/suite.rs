use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{run_episode_on, EpisodeOptions, EpisodeRecord, Method};
use super::metrics::{compute_metrics, MeanStd, MetricsSummary};
use super::task::{TaskKind, TaskSpec};
use crate::error::{Error, Result};
use crate::learned::LearnedModels;
use crate::policy::PolicyConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub task: TaskKind,
    /// Method names, e.g. `["GIP", "NS"]`.
    pub methods: Vec<String>,
    pub episodes: usize,
    pub seed: u64,
    #[serde(default)]
    pub policy: PolicyConfig,
    /// Overrides of the task defaults (radii, max steps, ranges).
    #[serde(default)]
    pub task_spec: Option<TaskSpec>,
    /// Directory with trained heads for learned scorers / predictors.
    #[serde(default)]
    pub models_dir: Option<PathBuf>,
    #[serde(default)]
    pub include_failures: bool,
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn task(&self) -> TaskSpec {
        self.task_spec.clone().unwrap_or_else(|| TaskSpec::new(self.task))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub method: Method,
    pub summary: MetricsSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub rows: Vec<SuiteRow>,
    pub records: Vec<Vec<EpisodeRecord>>,
}

/// Seed of episode `i`; the scene of an episode is shared by every method.
pub fn episode_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Episode index passed to the task sampler (1-based for distant acquisition).
fn scene_index(task: &TaskSpec, i: usize) -> usize {
    match task.kind {
        TaskKind::DistantAcq => i + 1,
        _ => i,
    }
}

/// Runs `episodes` paired episodes of one method. Results are ordered by
/// episode index whatever the thread count.
pub fn run_method(task: &TaskSpec, method: Method, episodes: usize, seed: u64, opts: &EpisodeOptions) -> Result<Vec<EpisodeRecord>> {
    (0..episodes)
        .into_par_iter()
        .map(|i| {
            let s = episode_seed(seed, i);
            let scene = task.sample_scene(s, scene_index(task, i))?;
            Ok(run_episode_on(task, scene, method, s, opts, None))
        })
        .collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let methods = cfg.methods()?;
    if methods.is_empty() {
        return Err(Error::Config("suite lists no methods".into()));
    }
    let task = cfg.task();
    let models = cfg.models_dir.as_deref().map(LearnedModels::load_dir).transpose()?;
    let opts = EpisodeOptions {
        policy: cfg.policy.clone(),
        models,
    };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for method in methods {
        let recs = run_method(&task, method, cfg.episodes, cfg.seed, &opts)?;
        log::info!("{method}: {}/{} successful", recs.iter().filter(|r| r.success).count(), recs.len());
        rows.push(SuiteRow {
            method,
            summary: compute_metrics(&recs, cfg.include_failures),
        });
        records.push(recs);
    }
    Ok(SuiteResult { rows, records })
}

fn cell(m: Option<MeanStd>) -> (String, String) {
    m.map_or((String::new(), String::new()), |m| (format!("{:.4}", m.mean), format!("{:.4}", m.std)))
}

pub fn to_csv(rows: &[SuiteRow]) -> String {
    let mut out = String::from("method,episodes,successes,sr,so_mean,so_std,fo_mean,fo_std,sc_mean,sc_std\n");
    for r in rows {
        let s = &r.summary;
        let (so_m, so_s) = cell(s.so);
        let (fo_m, fo_s) = cell(s.fo);
        let (sc_m, sc_s) = cell(s.sc);
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{so_m},{so_s},{fo_m},{fo_s},{sc_m},{sc_s}",
            r.method, s.episodes, s.successes, s.sr
        );
    }
    out
}

pub fn to_table(rows: &[SuiteRow]) -> String {
    let fmt = |m: Option<MeanStd>| m.map_or("-".to_string(), |m| format!("{:.3} ± {:.3}", m.mean, m.std));
    let mut out = format!("{:<12} {:>7} {:>15} {:>15} {:>15}\n", "method", "SR", "SO (m)", "FO (m)", "SC");
    for r in rows {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{:<12} {:>6.1}% {:>15} {:>15} {:>15}",
            r.method.name(),
            100.0 * s.sr,
            fmt(s.so),
            fmt(s.fo),
            fmt(s.sc)
        );
    }
    out
}
