use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use igp_collab::AppState;
use igp_core::baselines::pregrasp_free_ends;
use igp_core::harness::{
    generate_dataset, load_dataset, run_episode_on, run_suite, to_csv, DatasetConfig, EpisodeOptions, EpisodeRecord, Method,
    StepOutcome, SuiteConfig, TaskKind, TaskSpec,
};
use igp_core::learned::{train_head, Head, LearnedModels, TrainConfig};
use igp_core::perception::{dump_observation, render_observation};
use igp_core::policy::PolicyConfig;
use igp_core::sim::{ExecOptions, WorldState};

/// Caps the worker pool used by suites and dataset generation.
const THREADS_ENV: &str = "IGP_THREADS";

#[derive(Parser)]
#[command(name = "igp", version, about = "Grasp-pull rope manipulation: episodes, suites, datasets, training, collaboration server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and print a JSON line per step, then a summary line.
    Run {
        #[arg(long, default_value = "goal_reach")]
        task: TaskKind,
        #[arg(long, default_value = "GIP")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scene index (distance step for distant acquisition).
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Write every agent's observation maps before each step into this directory.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Policy configuration (JSON).
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Directory holding trained heads.
        #[arg(long)]
        models: Option<PathBuf>,
        /// Candidate log (JSON lines).
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Run a method comparison from a JSON config and print the CSV table.
    Suite {
        #[arg(long)]
        config: PathBuf,
        /// Also write every episode record as JSON lines.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Generate a training dataset.
    Dataset {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Generator ranges (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train one learned head on a dataset.
    Train {
        #[arg(long)]
        head: Head,
        #[arg(long)]
        data: PathBuf,
        /// Output file, or a directory to receive the head's default file name.
        #[arg(long)]
        out: PathBuf,
        /// Training hyper-parameters (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve the collaboration WebSocket and optional static assets.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        models: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_policy(path: Option<&Path>) -> Result<PolicyConfig> {
    path.map(read_json).transpose().map(Option::unwrap_or_default)
}

fn load_models(dir: Option<&Path>) -> Result<Option<LearnedModels>> {
    dir.map(|d| LearnedModels::load_dir(d).with_context(|| format!("loading models from {}", d.display())))
        .transpose()
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.parse().with_context(|| format!("{THREADS_ENV}={raw} is not a count"))?;
    if n == 0 {
        bail!("{THREADS_ENV} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    init_threads()?;
    match Cli::parse().command {
        Command::Run {
            task,
            method,
            seed,
            index,
            render,
            policy,
            models,
            candidates,
        } => {
            let opts = EpisodeOptions {
                policy: load_policy(policy.as_deref())?,
                models: load_models(models.as_deref())?,
            };
            run(task, method, seed, index, &opts, render.as_deref(), candidates.as_deref())
        }
        Command::Suite { config, records } => {
            let cfg = SuiteConfig::load(&config)?;
            let result = run_suite(&cfg)?;
            print!("{}", to_csv(&result.rows));
            if let Some(path) = records {
                let mut out = BufWriter::new(File::create(&path)?);
                for rec in result.records.iter().flatten() {
                    writeln!(out, "{}", serde_json::to_string(rec)?)?;
                }
                out.flush()?;
            }
            Ok(())
        }
        Command::Dataset { n, seed, out, config } => {
            let cfg: DatasetConfig = config.as_deref().map(read_json).transpose()?.unwrap_or_default();
            let data = generate_dataset(n, seed, &out, &cfg)?;
            let m = &data.manifest;
            log::info!("wrote {} instances to {} (sha256 {})", m.n, out.display(), m.instances_sha256);
            Ok(())
        }
        Command::Train { head, data, out, config } => {
            let cfg: TrainConfig = config.as_deref().map(read_json).transpose()?.unwrap_or_default();
            let data = load_dataset(&data)?;
            let trained = train_head(&data, head, &cfg)?;
            let path = if out.is_dir() { out.join(head.file_name()) } else { out };
            trained.params.save(&path)?;
            println!("{}", serde_json::to_string(&trained.report)?);
            log::info!("saved {head:?} head to {}", path.display());
            Ok(())
        }
        Command::Serve {
            addr,
            static_dir,
            policy,
            models,
        } => {
            let state = AppState::new(load_policy(policy.as_deref())?, load_models(models.as_deref())?);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(igp_collab::serve(addr, state, static_dir))?;
            Ok(())
        }
    }
}

fn run(
    task: TaskKind,
    method: Method,
    seed: u64,
    index: usize,
    opts: &EpisodeOptions,
    render: Option<&Path>,
    candidates: Option<&Path>,
) -> Result<()> {
    let task_def = TaskSpec::new(task);
    let scene = task_def.sample_scene(seed, index)?;
    let start = scene.world.clone();
    let mut log = candidates.map(File::create).transpose()?.map(BufWriter::new);
    let record = run_episode_on(&task_def, scene, method, seed, opts, log.as_mut().map(|w| w as &mut dyn Write));
    if let Some(mut w) = log {
        w.flush()?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for step in &record.steps {
        writeln!(out, "{}", serde_json::to_string(step)?)?;
    }
    writeln!(
        out,
        "{}",
        serde_json::json!({
            "method": record.method,
            "seed": record.seed,
            "config_hash": record.config_hash,
            "status": record.status,
            "success": record.success,
            "fo": record.final_offset(),
            "so": record.shortest_offset(),
            "sc": record.steps.len(),
            "diagnostic": record.diagnostic,
        })
    )?;
    if let Some(dir) = render {
        render_episode(start, &record, method, &opts.policy, dir)?;
    }
    Ok(())
}

/// Replays the recorded commands and dumps each agent's maps before every step.
fn render_episode(mut world: WorldState, record: &EpisodeRecord, method: Method, policy: &PolicyConfig, dir: &Path) -> Result<()> {
    if method == Method::FixedGrasp {
        pregrasp_free_ends(&mut world)?;
    }
    let target = record.target.into();
    let dump = |world: &WorldState, k: usize, goals: &[igp_core::geom::Vec2]| -> Result<()> {
        for a in 0..world.n_agents() {
            let goal = goals.get(a).copied().unwrap_or(target);
            let obs = render_observation(world, a, goal, &policy.obs);
            dump_observation(&obs, dir, &format!("step{k:03}_agent{a}"))?;
        }
        Ok(())
    };
    for (k, step) in record.steps.iter().enumerate() {
        let goals: Vec<_> = step.subgoals.iter().map(|s| s.position).collect();
        dump(&world, k, &goals)?;
        if step.outcome == StepOutcome::Executed {
            world.apply_command(&step.command, ExecOptions::default())?;
        }
    }
    dump(&world, record.steps.len(), &[])?;
    log::info!("observation maps written to {}", dir.display());
    Ok(())
}
