//! Single-robot action-outcome dataset.
//!
//! Each instance stores the world before the action (so every observation map
//! can be re-rendered exactly), the random target used for the relative-position
//! maps, the executed action and the realised object motion. Files:
//! `instances.jsonl` (one instance per line) and `manifest.json`.

use std::f64::consts::PI;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::{lift, rotate, Pose2, Vec2};
use crate::learned::{split_indices, Split};
use crate::perception::{render_observation, ObservationConfig, ObservationSet};
use crate::policy::graspable_cells;
use crate::sim::{create_world, execute_igp, BoxDims, IgpAction, WorldConfig, WorldSnapshot, WorldState};

pub const MIN_INSTANCES: usize = 10;
const MAX_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInstance {
    pub id: usize,
    pub world: WorldSnapshot,
    pub agent_id: usize,
    pub target: [f64; 2],
    pub action: IgpAction,
    pub displacement: [f64; 2],
    pub object_before: Pose2,
    pub object_after: Pose2,
}

impl DatasetInstance {
    pub fn world_state(&self) -> Result<WorldState> {
        WorldState::from_snapshot(self.world.clone())
    }

    pub fn target(&self) -> Vec2 {
        Vec2::from(self.target)
    }

    pub fn displacement(&self) -> Vec2 {
        Vec2::from(self.displacement)
    }

    /// The (d, s, r, v, p) maps of this instance.
    pub fn observation(&self, cfg: &ObservationConfig) -> Result<ObservationSet> {
        Ok(render_observation(&self.world_state()?, self.agent_id, self.target(), cfg))
    }
}

/// Scene ranges of the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub rope_length: [f64; 2],
    pub agent_distance: [f64; 2],
    pub target_distance: [f64; 2],
    pub box_width: [f64; 2],
    pub box_depth: [f64; 2],
    pub box_height: [f64; 2],
    pub obs: ObservationConfig,
    pub split: [f64; 3],
    #[serde(default)]
    pub world: WorldConfig,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            rope_length: [2.5, 4.0],
            agent_distance: [1.0, 2.3],
            target_distance: [0.3, 1.5],
            box_width: [0.10, 0.20],
            box_depth: [0.10, 0.15],
            box_height: [0.05, 0.10],
            obs: ObservationConfig::default(),
            split: [0.8, 0.1, 0.1],
            world: WorldConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub seed: u64,
    pub config: DatasetConfig,
    pub splits: Split,
    /// SHA-256 of `instances.jsonl`.
    pub instances_sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<DatasetInstance>,
    pub manifest: Manifest,
}

fn uniform<R: Rng>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.random_range(r[0]..r[1])
    } else {
        r[0]
    }
}

/// One random single-robot scene and one random valid action on it.
pub fn generate_instance(id: usize, seed: u64, cfg: &DatasetConfig) -> Result<DatasetInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id as u64));
    let mut last = Error::Config("no attempt made".into());
    for _ in 0..MAX_ATTEMPTS {
        let heading = rng.random_range(-PI..PI);
        let agent = Pose2::new(0.0, 0.0, heading);
        let gap = uniform(&mut rng, cfg.agent_distance);
        let object = rotate(Vec2::x(), heading + rng.random_range(-0.2..0.2)) * gap;
        let world = create_world(WorldConfig {
            agent_poses: vec![agent],
            rope_lengths: vec![uniform(&mut rng, cfg.rope_length)],
            box_dims: BoxDims::new(
                uniform(&mut rng, cfg.box_width),
                uniform(&mut rng, cfg.box_depth),
                uniform(&mut rng, cfg.box_height),
            ),
            box_init_pose: Pose2::new(object.x, object.y, rng.random_range(-PI..PI)),
            rng_seed: rng.random(),
            ..cfg.world.clone()
        });
        let world = match world {
            Ok(w) => w,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let target = world.object_position()
            + rotate(Vec2::x(), rng.random_range(-PI..PI)) * uniform(&mut rng, cfg.target_distance);
        let obs = render_observation(&world, 0, target, &cfg.obs);
        let cells = graspable_cells(&obs, &world);
        if cells.is_empty() {
            last = Error::NoGraspableRope(0);
            continue;
        }
        let grasp = cells[rng.random_range(0..cells.len())].point;
        let reach = world.config.max_reach;
        let pull = loop {
            let p = Vec2::new(rng.random_range(-reach..reach), rng.random_range(-reach..reach));
            if p.norm() <= reach {
                break lift(agent.position() + p, world.config.grasp_height);
            }
        };
        let action = IgpAction::new(0, grasp, pull);
        match execute_igp(&world, &action) {
            Ok((next, traj)) => {
                return Ok(DatasetInstance {
                    id,
                    world: world.to_snapshot(),
                    agent_id: 0,
                    target: target.into(),
                    action,
                    displacement: traj.displacement.into(),
                    object_before: world.body.pose,
                    object_after: next.body.pose,
                })
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Generates `n` instances, writes them to `out_dir` and returns the dataset.
pub fn generate_dataset(n: usize, seed: u64, out_dir: &Path, cfg: &DatasetConfig) -> Result<Dataset> {
    if n < MIN_INSTANCES {
        return Err(Error::NotEnoughSamples {
            needed: MIN_INSTANCES,
            got: n,
        });
    }
    let instances = (0..n)
        .into_par_iter()
        .map(|i| generate_instance(i, seed, cfg))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("instances.jsonl");
    {
        let mut out = BufWriter::new(fs::File::create(&path)?);
        for inst in &instances {
            serde_json::to_writer(&mut out, inst)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }
    let manifest = Manifest {
        n,
        seed,
        config: cfg.clone(),
        splits: split_indices(n, cfg.split, seed),
        instances_sha256: file_sha256(&path)?,
    };
    fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(Dataset { instances, manifest })
}

fn file_sha256(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let path = dir.join("instances.jsonl");
    let hash = file_sha256(&path)?;
    if hash != manifest.instances_sha256 {
        return Err(Error::Config(format!(
            "instances.jsonl hash {hash} does not match manifest {}",
            manifest.instances_sha256
        )));
    }
    let mut instances = Vec::with_capacity(manifest.n);
    for line in BufReader::new(fs::File::open(&path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            instances.push(serde_json::from_str(&line)?);
        }
    }
    if instances.len() != manifest.n {
        return Err(Error::Config(format!("manifest lists {} instances, file holds {}", manifest.n, instances.len())));
    }
    Ok(Dataset { instances, manifest })
}
