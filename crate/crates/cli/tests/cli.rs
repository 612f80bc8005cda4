use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::Vector3;
use oto_core::planner::ExplorationMetrics;
use oto_core::world::generate::{enclosure, maze, open_room, Enclosure};
use oto_core::world::synthesize_point_cloud;

fn oto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oto"))
        .args(args)
        .env_remove("OTO_SEED")
        .output()
        .expect("binary runs")
}

fn write_scene(dir: &Path, name: &str, text: String) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn write_cloud(dir: &Path, kind: Enclosure) -> String {
    let f = enclosure(kind, 0.25);
    let cloud = synthesize_point_cloud(&f.map, f.robot, Vector3::new(20.0, 20.0, 5.0), 1);
    let text: String = cloud.points.iter().map(|p| format!("{} {} {}\n", p.x, p.y, p.z)).collect();
    let p = dir.join("cloud.txt");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn run_writes_artifacts_with_full_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "room.txt", open_room(5, 5, 0.5).to_text());
    let out = dir.path().join("out");
    let o = oto(&["run", "--scene", &scene, "--planner", "greedy", "--seed", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("metrics.json")).unwrap();
    let m: ExplorationMetrics = serde_json::from_str(&text).unwrap();
    assert_eq!(m.final_coverage, 1.0);
    assert_eq!(serde_json::to_string_pretty(&m).unwrap() + "\n", text);
    assert!(fs::read_to_string(out.join("trajectory.csv")).unwrap().starts_with("t,x,y\n"));
    assert!(fs::read_to_string(out.join("map.txt")).unwrap().starts_with("# 5 5 0.5\n"));
}

#[test]
fn bad_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "room.txt", open_room(5, 5, 0.5).to_text());
    let out = dir.path().join("out");
    let o = oto(&["run", "--scene", &scene, "--planner", "nearest", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown planner"));
    let o = oto(&["run", "--scene", "/nonexistent/scene.txt", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = oto(&["run", "--scene", &scene, "--set", "no_such_key=1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(oto(&["run"]).status.code(), Some(1));
}

#[test]
fn step_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "maze.txt", maze(4, 4, 4, 0.5, 1).to_text());
    let out = dir.path().join("out");
    let o = oto(&["run", "--scene", &scene, "--set", "max_steps=5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(fs::read_to_string(out.join("metrics.json")).unwrap().contains("\"cap\""));
}

#[test]
fn seed_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "maze.txt", maze(4, 4, 4, 0.5, 1).to_text());
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_oto"))
        .args(["run", "--scene", &scene, "--out", out.to_str().unwrap()])
        .env("OTO_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let m: ExplorationMetrics = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m.seed, 17);
}

#[test]
fn config_file_then_set_flags() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "maze.txt", maze(4, 4, 4, 0.5, 1).to_text());
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "max_steps = 5\nweights.w_l = 0.2\n").unwrap();
    let out = dir.path().join("out");
    let base = ["run", "--scene", &scene, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(oto(&base).status.code(), Some(2));
    let mut lifted = base.to_vec();
    lifted.extend(["--set", "max_steps=100000"]);
    assert_eq!(oto(&lifted).status.code(), Some(0));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn bench_aggregates_in_spec_order() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "maze.txt", maze(5, 5, 4, 0.5, 3).to_text());
    let run = |out: &str| {
        let out = dir.path().join(out);
        let o = oto(&[
            "bench",
            "--scenes",
            &scene,
            "--planners",
            "greedy,oto",
            "--seeds",
            "4,2,9",
            "--jobs",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a");
    let summary = read_csv(&a.join("summary.csv"));
    assert_eq!(summary.len(), 2);
    assert_eq!((summary[0][1].as_str(), summary[1][1].as_str()), ("greedy", "oto"));
    assert_eq!(summary[0][2], "3");

    let runs = read_csv(&a.join("runs.csv"));
    let order: Vec<(&str, &str)> = runs.iter().map(|r| (r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(
        order,
        [("greedy", "4"), ("greedy", "2"), ("greedy", "9"), ("oto", "4"), ("oto", "2"), ("oto", "9")]
    );
    for (row, group) in summary.iter().zip(runs.chunks(3)) {
        let d: Vec<f64> = group.iter().map(|r| r[5].parse().unwrap()).collect();
        let mean = d.iter().sum::<f64>() / 3.0;
        let max = d.iter().copied().fold(f64::MIN, f64::max);
        let min = d.iter().copied().fold(f64::MAX, f64::min);
        let col = |i: usize| row[i].parse::<f64>().unwrap();
        assert!((col(4) - mean).abs() < 1e-9);
        assert_eq!((col(5), col(6)), (max, min));
    }

    let b = run("b");
    for f in ["summary.csv", "runs.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(read_csv(&a.join("timing.csv")).len(), 2);
}

#[test]
fn bench_rejects_duplicate_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "room.txt", open_room(5, 5, 0.5).to_text());
    let out = dir.path().join("out");
    let o = oto(&["bench", "--scenes", &scene, "--seeds", "1,1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn detect_reports_room_box() {
    let dir = tempfile::tempdir().unwrap();
    let kind = Enclosure::Room {
        w: 10.0,
        h: 8.0,
        dx: 0.0,
        dy: 0.0,
    };
    let cloud = write_cloud(dir.path(), kind);
    let o = oto(&["detect", "--cloud", &cloud, "--origin", "20,20,0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("box ")).unwrap_or_else(|| panic!("{text}"));
    let nums: Vec<f64> = line
        .split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
        .filter_map(|t| t.parse().ok())
        .collect();
    let b = enclosure(kind, 0.25).expected.unwrap();
    for (got, want) in nums.iter().zip([b.x_min, b.x_max, b.y_min, b.y_max]) {
        assert!((got - want).abs() <= 0.3, "{line} vs {b:?}");
    }
}

#[test]
fn detect_corridor_has_no_enclosure() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = write_cloud(
        dir.path(),
        Enclosure::Corridor {
            width: 3.0,
            along_x: true,
            dy: 0.0,
        },
    );
    let o = oto(&["detect", "--cloud", &cloud, "--origin", "20,20,0"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.ends_with("no enclosure\n"), "{text}");
    assert_eq!(text.matches(" occupied").count(), 2, "{text}");
}

#[test]
fn detect_empty_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let o = oto(&["detect", "--cloud", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().ends_with("no enclosure\n"));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 0 0\n1 1 one\n").unwrap();
    let o = oto(&["detect", "--cloud", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2"));
}
