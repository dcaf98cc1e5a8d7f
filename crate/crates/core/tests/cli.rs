mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::REFERENCE_CONFIG;
use magnetic_lqr::cli::schedule::{schedule_from_str, schedule_to_string};
use magnetic_lqr::cli::{self, read_schedule, Overrides, RunConfig};
use magnetic_lqr::riccati::{GainSchedule, SolverTag};
use magnetic_lqr::sim::{simulate_closed_loop, SimulationConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnetic-lqr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn variant(dir: &Path, name: &str, from: &str, to: &str) -> PathBuf {
    let text = std::fs::read_to_string(REFERENCE_CONFIG).unwrap();
    assert!(text.contains(from), "{from}");
    let path = dir.join(name);
    std::fs::write(&path, text.replace(from, to)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_reports_and_writes_schedule() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(out.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("samples per orbit p  100"), "{text}");
    assert!(text.contains("sample time ts       58.635"), "{text}");
    assert!(text.contains("2n x 2n inversions   1"), "{text}");
    let file = read_schedule(&out.path().join(cli::SCHEDULE_FILE)).unwrap();
    assert_eq!(file.schedule.period(), 100);
    assert!((file.schedule.ts() - 58.6352).abs() < 0.01);
}

#[test]
fn gamma_and_pi_schedule_files_agree() {
    let g = tempfile::tempdir().unwrap();
    let p = tempfile::tempdir().unwrap();
    let og = run(&[
        "solve",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(g.path()),
        "--solver",
        "gamma",
    ]);
    let op = run(&[
        "solve",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(p.path()),
        "--solver",
        "pi",
    ]);
    assert!(stdout(&og).contains("2n x 2n inversions   1"));
    assert!(stdout(&op).contains("2n x 2n inversions   100"));
    let a = read_schedule(&g.path().join(cli::SCHEDULE_FILE)).unwrap();
    let b = read_schedule(&p.path().join(cli::SCHEDULE_FILE)).unwrap();
    assert_eq!(b.schedule.solver(), SolverTag::PiSchur);
    assert_eq!(a.config_hash, b.config_hash);
    assert!(a.schedule.max_relative_difference(&b.schedule) < 1e-6);
}

#[test]
fn persisted_schedule_reproduces_the_in_memory_run() {
    let out = tempfile::tempdir().unwrap();
    let overrides = Overrides {
        out: Some(out.path().to_path_buf()),
        ..Overrides::default()
    };
    cli::cmd_solve(Path::new(REFERENCE_CONFIG), &overrides).unwrap();
    let schedule_path = out.path().join(cli::SCHEDULE_FILE);
    let report =
        cli::cmd_simulate(Path::new(REFERENCE_CONFIG), &schedule_path, &overrides).unwrap();

    let loaded = cli::load_config(Path::new(REFERENCE_CONFIG)).unwrap();
    let d = cli::design(&loaded.scenario, SolverTag::GammaSchur).unwrap();
    let x0 = loaded.scenario.simulation.unwrap().x0;
    let traj = simulate_closed_loop(
        &d.model,
        &d.schedule,
        &SimulationConfig::new(x0, 1000).unwrap(),
    )
    .unwrap();
    assert_eq!(report.final_norm.to_bits(), traj.final_norm().to_bits());
    assert_eq!(report.num_steps, 1000);

    let csv_text = std::fs::read_to_string(&report.trajectory_path).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        cli::output::TRAJECTORY_COLUMNS
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1001);
    for (row, x) in rows.iter().zip(&traj.states) {
        for i in 0..6 {
            assert_eq!(row[1 + i].parse::<f64>().unwrap().to_bits(), x[i].to_bits());
        }
    }
    // All six state columns end far below where they start.
    for i in 1..=6 {
        let first: f64 = rows[0][i].parse().unwrap();
        let last: f64 = rows[1000][i].parse().unwrap();
        assert!(
            last.abs() < 0.1 * first.abs(),
            "column {i}: {first} -> {last}"
        );
    }
}

#[test]
fn zero_initial_state_gives_zero_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = variant(
        dir.path(),
        "zero.toml",
        "x0 = [0.01, 0.01, 0.01, 1e-5, 1e-5, 1e-5]",
        "x0 = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]",
    );
    let o = run(&["solve", "--config", s(&config), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let schedule = dir.path().join(cli::SCHEDULE_FILE);
    let o = run(&[
        "simulate",
        "--config",
        s(&config),
        "--schedule",
        s(&schedule),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join(cli::TRAJECTORY_FILE)).unwrap();
    for line in text.lines().skip(1) {
        for cell in line.split(',').skip(1).filter(|c| !c.is_empty()) {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{line}");
        }
    }
}

#[test]
fn field_csv_shape() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "field",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(out.path()),
        "--samples",
        "400",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(out.path().join(cli::FIELD_FILE)).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        cli::output::FIELD_COLUMNS
    );
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 400);
    let orbit = common::reference_orbit();
    let b2 = -orbit.field_scale() * orbit.magnetic_inclination_rad.cos();
    assert!(rows.iter().all(|r| r[2] == b2));
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][3], 0.0);
    let max1 = rows.iter().map(|r| r[1].abs()).fold(0.0, f64::max);
    let max3 = rows.iter().map(|r| r[3].abs()).fold(0.0, f64::max);
    assert!((max3 / max1 - 2.0).abs() < 1e-3, "{}", max3 / max1);

    let o = run(&[
        "field",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(out.path()),
        "--samples",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plots_flag_writes_svgs() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "field",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(out.path()),
        "--plots",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["b1_T", "b2_T", "b3_T"] {
        assert!(out.path().join(format!("{name}.svg")).exists());
    }
}

#[test]
fn check_passes_on_the_example_and_on_one_sample() {
    let o = run(&["check", "--config", REFERENCE_CONFIG]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let dir = tempfile::tempdir().unwrap();
    let config = variant(
        dir.path(),
        "p1.toml",
        "samples_per_orbit = 100",
        "samples_per_orbit = 1",
    );
    let o = run(&["check", "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("LTI DARE agreement"));
}

#[test]
fn check_failure_exits_three() {
    // An oracle stopped after a loose convergence test disagrees with the
    // Schur solvers, which only the check suite measures.
    let dir = tempfile::tempdir().unwrap();
    let config = variant(
        dir.path(),
        "loose.toml",
        "method = \"gamma\"",
        "method = \"gamma\"\noracle_tol = 1e-3",
    );
    let o = run(&["check", "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL pairwise solver agreement"));
}

#[test]
fn equal_moments_exit_with_singular_a() {
    let dir = tempfile::tempdir().unwrap();
    let config = variant(
        dir.path(),
        "eq.toml",
        "[250.0, 150.0, 100.0]",
        "[150.0, 150.0, 100.0]",
    );
    let o = run(&["solve", "--config", s(&config), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("SingularA"), "{}", stderr(&o));
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(
        run(&["solve", "--config", REFERENCE_CONFIG, "--solver", "newton"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["solve", "--config", "/nonexistent/config.toml"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let config = variant(
        dir.path(),
        "bad.toml",
        "altitude_m = 657000.0",
        "altitude_m = \"low\"",
    );
    let o = run(&["solve", "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("orbit.altitude_m"), "{}", stderr(&o));
}

#[test]
fn mismatched_schedule_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--config",
        REFERENCE_CONFIG,
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let config = variant(
        dir.path(),
        "p50.toml",
        "samples_per_orbit = 100",
        "samples_per_orbit = 50",
    );
    let schedule = dir.path().join(cli::SCHEDULE_FILE);
    let o = run(&[
        "simulate",
        "--config",
        s(&config),
        "--schedule",
        s(&schedule),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not match"), "{}", stderr(&o));

    std::fs::write(&schedule, "not a schedule").unwrap();
    let o = run(&[
        "simulate",
        "--config",
        REFERENCE_CONFIG,
        "--schedule",
        s(&schedule),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn commands_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run(&[
            "solve",
            "--config",
            REFERENCE_CONFIG,
            "--out",
            s(dir.path()),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let fa = std::fs::read(a.path().join(cli::SCHEDULE_FILE)).unwrap();
    let fb = std::fs::read(b.path().join(cli::SCHEDULE_FILE)).unwrap();
    assert_eq!(fa, fb);
}

#[test]
fn shipped_config_round_trips() {
    let text = std::fs::read_to_string(REFERENCE_CONFIG).unwrap();
    let raw = RunConfig::from_toml_str(&text, "reference").unwrap();
    let again = RunConfig::from_toml_str(&raw.to_toml_string().unwrap(), "again").unwrap();
    assert_eq!(raw.resolve().unwrap(), again.resolve().unwrap());
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #[test]
    fn schedule_text_round_trip_is_exact(
        n in 1usize..4,
        m in 1usize..3,
        p in 1usize..4,
        values in proptest::collection::vec(finite(), 64),
        ts in 1e-3..1e4f64,
    ) {
        let mut it = values.iter().cycle();
        let mut take = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| *it.next().unwrap());
        let p_list: Vec<_> = (0..p).map(|_| take(n, n)).collect();
        let k_list: Vec<_> = (0..p).map(|_| take(m, n)).collect();
        let schedule = GainSchedule::new(p_list, k_list, ts, SolverTag::Eigen).unwrap();
        let back = schedule_from_str(&schedule_to_string(&schedule, "deadbeef")).unwrap();
        prop_assert_eq!(back.schedule, schedule);
    }
}
