use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use super::mlp::{Loss, MlpParams};
use super::train::{train_sets, Sample, TrainConfig, Trained};
use crate::error::{Error, Result};
use crate::geom::{rotate, Vec2};
use crate::harness::{Dataset, DatasetInstance};

/// Object motion below which a pull is not used to fit the pull head.
pub const MIN_PULL_DISPLACEMENT: f64 = 0.02;
/// Distance gain toward the target that labels a grasp as good.
pub const GOOD_GRASP_GAIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Head {
    /// Features -> agent-frame pull vector.
    Pull,
    /// Features + pull point -> agent-frame object offset.
    Outcome,
    /// Features -> logit of a good grasp.
    GraspScore,
}

impl Head {
    pub fn loss(self) -> Loss {
        match self {
            Head::Pull | Head::Outcome => Loss::Mse,
            Head::GraspScore => Loss::Bce,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Head::Pull => "pull.json",
            Head::Outcome => "outcome.json",
            Head::GraspScore => "grasp.json",
        }
    }
}

impl FromStr for Head {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "PULL" => Ok(Head::Pull),
            "OUTCOME" => Ok(Head::Outcome),
            "GRASP" | "GRASP_SCORE" => Ok(Head::GraspScore),
            _ => Err(Error::Unknown {
                kind: "head",
                name: s.to_string(),
            }),
        }
    }
}

/// Trained heads available to the policy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearnedModels {
    pub grasp: Option<MlpParams>,
    pub pull: Option<MlpParams>,
    pub outcome: Option<MlpParams>,
}

impl LearnedModels {
    pub fn set(&mut self, head: Head, params: MlpParams) {
        match head {
            Head::Pull => self.pull = Some(params),
            Head::Outcome => self.outcome = Some(params),
            Head::GraspScore => self.grasp = Some(params),
        }
    }

    /// Loads whichever of `grasp.json`, `pull.json`, `outcome.json` exist in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut m = Self::default();
        for head in [Head::Pull, Head::Outcome, Head::GraspScore] {
            let path = dir.join(head.file_name());
            if path.exists() {
                m.set(head, MlpParams::load(&path)?);
            }
        }
        Ok(m)
    }
}

fn local(inst: &DatasetInstance, world: &crate::sim::WorldState, v: Vec2) -> Vec2 {
    rotate(v, -world.agents[inst.agent_id].theta)
}

/// Training sample of `head` built from one instance, if the instance qualifies.
pub fn head_sample(inst: &DatasetInstance, head: Head) -> Result<Option<Sample>> {
    let world = inst.world_state()?;
    let agent = inst.agent_id;
    let disp = inst.displacement();
    let object = world.object_position();
    Ok(match head {
        Head::Pull => {
            if disp.norm() < MIN_PULL_DISPLACEMENT {
                None
            } else {
                // hindsight: the realised object position is the subgoal this pull achieves
                let f = FeatureVector::compute(&world, agent, object + disp, inst.action.grasp);
                let y = local(inst, &world, inst.action.pull_vector());
                Some(Sample {
                    x: f.0.to_vec(),
                    y: vec![y.x, y.y],
                })
            }
        }
        Head::Outcome => {
            let f = FeatureVector::compute(&world, agent, inst.target(), inst.action.grasp);
            let y = local(inst, &world, disp);
            Some(Sample {
                x: f.with_pull(&world, agent, inst.action.pull),
                y: vec![y.x, y.y],
            })
        }
        Head::GraspScore => {
            let f = FeatureVector::compute(&world, agent, inst.target(), inst.action.grasp);
            let gain = (object - inst.target()).norm() - (object + disp - inst.target()).norm();
            Some(Sample {
                x: f.0.to_vec(),
                y: vec![if gain > GOOD_GRASP_GAIN { 1.0 } else { 0.0 }],
            })
        }
    })
}

/// Train / validation / test samples of `head` following the manifest split.
pub fn head_samples(data: &Dataset, head: Head) -> Result<[Vec<Sample>; 3]> {
    let build = |ids: &[usize]| -> Result<Vec<Sample>> {
        let mut out = Vec::with_capacity(ids.len());
        for &i in ids {
            if let Some(s) = head_sample(&data.instances[i], head)? {
                out.push(s);
            }
        }
        Ok(out)
    };
    let s = &data.manifest.splits;
    Ok([build(&s.train)?, build(&s.val)?, build(&s.test)?])
}

pub fn train_head(data: &Dataset, head: Head, cfg: &TrainConfig) -> Result<Trained> {
    let [train, val, test] = head_samples(data, head)?;
    let mut trained = train_sets(&train, &val, &test, cfg, head.loss())?;
    trained.params.train_meta = Some(serde_json::json!({
        "head": head,
        "config": cfg,
        "dataset_sha256": data.manifest.instances_sha256,
        "report": trained.report,
    }));
    Ok(trained)
}
