use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oto_cli::{cmd_bench, cmd_detect, cmd_run, BenchSpec, CliError, ConfigArgs, DetectArgs, RunArgs};
use oto_core::planner::PlannerKind;
use oto_core::world::generate::{maze, open_room, random_scene, rooms, RoomsLayout};

#[derive(Parser)]
#[command(name = "oto", version, about = "Frontier exploration with enclosed sub-region detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Params {
    /// Flat `key = value` parameter file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter override, e.g. `--set weights.w_r=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl From<Params> for ConfigArgs {
    fn from(p: Params) -> Self {
        ConfigArgs { config: p.config, set: p.set }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Explore one scene and write metrics.json, trajectory.csv and map.txt.
    Run {
        #[arg(long)]
        scene: PathBuf,
        /// oto, greedy, oto-noenclosed or oto-norefine.
        #[arg(long, default_value = "oto")]
        planner: String,
        /// Defaults to $OTO_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Run scenes × planners × seeds and write runs.csv, summary.csv and timing.csv.
    Bench {
        #[arg(long, num_args = 1.., required = true)]
        scenes: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "oto,greedy")]
        planners: Vec<PlannerKind>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Parallel runs.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[command(flatten)]
        params: Params,
    },
    /// Run enclosed sub-region detection on an `x y z` point file.
    Detect {
        #[arg(long)]
        cloud: PathBuf,
        /// Local origin `x,y,z`; the cloud centroid by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        origin: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Detection parameter override, e.g. `--set vote_threshold=6`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Write a generated scene file.
    Generate {
        #[command(subcommand)]
        kind: SceneKind,
        #[arg(long, global = true, default_value_t = 0.25)]
        resolution: f64,
        #[arg(long, global = true, default_value_t = 0)]
        seed: u64,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SceneKind {
    /// Grid of walled rooms joined by doors.
    Rooms {
        #[arg(long, default_value_t = 3)]
        rooms_x: usize,
        #[arg(long, default_value_t = 3)]
        rooms_y: usize,
        #[arg(long, default_value_t = 56)]
        room_w: usize,
        #[arg(long, default_value_t = 48)]
        room_h: usize,
        #[arg(long, default_value_t = 6)]
        door: usize,
        #[arg(long, default_value_t = 0.3)]
        extra_doors: f64,
        #[arg(long, default_value_t = 1.0)]
        alcoves: f64,
        #[arg(long, default_value_t = 8)]
        pillars: usize,
    },
    /// Perfect maze of corridors.
    Maze {
        #[arg(long, default_value_t = 8)]
        cols: usize,
        #[arg(long, default_value_t = 8)]
        rows: usize,
        #[arg(long, default_value_t = 8)]
        corridor: usize,
    },
    /// Open floor with random clutter.
    Random {
        #[arg(long, default_value_t = 80)]
        width: usize,
        #[arg(long, default_value_t = 80)]
        height: usize,
    },
    /// Empty walled room.
    Open {
        #[arg(long, default_value_t = 40)]
        width: usize,
        #[arg(long, default_value_t = 40)]
        height: usize,
    },
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            scene,
            planner,
            seed,
            out,
            params,
        } => cmd_run(&RunArgs {
            scene,
            planner,
            seed,
            out,
            params: params.into(),
        }),
        Command::Bench {
            scenes,
            planners,
            seeds,
            out,
            jobs,
            params,
        } => cmd_bench(&BenchSpec { scenes, planners, seeds, out }, &params.into(), jobs),
        Command::Detect { cloud, origin, seed, set } => {
            let origin = match origin.as_deref() {
                None => None,
                Some(&[x, y, z]) => Some([x, y, z]),
                Some(_) => return Err(CliError::Usage("--origin takes x,y,z".into())),
            };
            let (code, text) = cmd_detect(&DetectArgs { cloud, origin, seed, set })?;
            print!("{text}");
            Ok(code)
        }
        Command::Generate { kind, resolution, seed, out } => {
            if !(resolution > 0.0 && resolution.is_finite()) {
                return Err(CliError::Usage("resolution must be positive".into()));
            }
            let scene = match kind {
                SceneKind::Rooms {
                    rooms_x,
                    rooms_y,
                    room_w,
                    room_h,
                    door,
                    extra_doors,
                    alcoves,
                    pillars,
                } => rooms(
                    &RoomsLayout {
                        rooms_x,
                        rooms_y,
                        room_w,
                        room_h,
                        door,
                        extra_doors,
                        alcoves,
                        pillars,
                    },
                    resolution,
                    seed,
                ),
                SceneKind::Maze { cols, rows, corridor } => maze(cols, rows, corridor, resolution, seed),
                SceneKind::Random { width, height } => random_scene(width, height, resolution, seed),
                SceneKind::Open { width, height } => open_room(width, height, resolution),
            };
            match out {
                Some(path) => std::fs::write(&path, scene.to_text()).map_err(|e| CliError::io(path, e))?,
                None => print!("{}", scene.to_text()),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
