use serde::{Deserialize, Serialize};

use super::episode::EpisodeRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub episodes: usize,
    pub successes: usize,
    /// Success rate over all episodes.
    pub sr: f64,
    /// Shortest distance reached.
    pub so: Option<MeanStd>,
    /// Final distance.
    pub fo: Option<MeanStd>,
    /// Steps taken.
    pub sc: Option<MeanStd>,
    /// Whether failed episodes contribute to SO / FO / SC.
    pub include_failures: bool,
}

/// SR over all records; SO, FO and SC over successful records unless
/// `include_failures` is set.
pub fn compute_metrics(records: &[EpisodeRecord], include_failures: bool) -> MetricsSummary {
    let episodes = records.len();
    let successes = records.iter().filter(|r| r.success).count();
    let used: Vec<&EpisodeRecord> = records.iter().filter(|r| include_failures || r.success).collect();
    let so: Vec<f64> = used.iter().map(|r| r.shortest_offset()).collect();
    let fo: Vec<f64> = used.iter().map(|r| r.final_offset()).collect();
    let sc: Vec<f64> = used.iter().map(|r| r.steps.len() as f64).collect();
    MetricsSummary {
        episodes,
        successes,
        sr: if episodes == 0 { 0.0 } else { successes as f64 / episodes as f64 },
        so: MeanStd::of(&so),
        fo: MeanStd::of(&fo),
        sc: MeanStd::of(&sc),
        include_failures,
    }
}
