use std::fs;
use std::path::{Path, PathBuf};

use oto_core::planner::{run_exploration, PlannerConfig, PlannerKind, RunOutput, Termination};
use oto_core::world::{load_scene, render_map, Scene};

use crate::error::CliError;
use crate::overrides;

/// Planner selection and parameter overrides shared by `run` and `bench`.
#[derive(Clone, Debug, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` file applied first.
    pub config: Option<PathBuf>,
    /// `key=value` pairs applied after the file.
    pub set: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<PlannerConfig, CliError> {
        let mut pairs = Vec::new();
        if let Some(path) = &self.config {
            pairs = overrides::parse_kv_file(&read(path)?)?;
        }
        for s in &self.set {
            pairs.push(overrides::parse_kv_arg(s)?);
        }
        let cfg: PlannerConfig = overrides::apply(&PlannerConfig::default(), &pairs)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug)]
pub struct RunArgs {
    pub scene: PathBuf,
    pub planner: String,
    /// Falls back to `OTO_SEED`, then to the config value.
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub params: ConfigArgs,
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_scene(path: &Path) -> Result<Scene, CliError> {
    load_scene(&read(path)?).map_err(|source| CliError::Scene {
        path: path.to_path_buf(),
        source,
    })
}

pub fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("OTO_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("OTO_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

pub fn metrics_json(output: &RunOutput) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(&output.metrics)? + "\n")
}

pub fn trajectory_csv(output: &RunOutput) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &output.trajectory {
        w.serialize(s)?;
    }
    w.into_inner().map_err(|e| CliError::io("trajectory.csv", e.into_error()))
}

/// Runs one exploration and writes `metrics.json`, `trajectory.csv`,
/// `map.txt` and `timing.json` into `out`. Returns the exit code: 0 when the
/// run finished, 2 when it hit the step cap.
pub fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    let planner: PlannerKind = args.planner.parse()?;
    let mut config = args.params.resolve()?;
    config.planner = planner;
    if let Some(seed) = args.seed.or(env_seed()?) {
        config.seed = seed;
    }
    let scene = read_scene(&args.scene)?;
    let output = run_exploration(&scene, &config)?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    write(&args.out.join("metrics.json"), metrics_json(&output)?.as_bytes())?;
    write(&args.out.join("trajectory.csv"), &trajectory_csv(&output)?)?;
    write(&args.out.join("map.txt"), render_map(&output.map).as_bytes())?;
    write(&args.out.join("timing.json"), serde_json::to_string_pretty(&output.timings)?.as_bytes())?;

    let m = &output.metrics;
    println!(
        "{} seed {}: {:?} after {} cycles, distance {:.2} m, sim time {:.1} s, coverage {:.4}",
        m.planner, m.seed, m.termination, m.cycles, m.distance, m.sim_time, m.final_coverage
    );
    Ok(if m.termination == Termination::Cap { 2 } else { 0 })
}
