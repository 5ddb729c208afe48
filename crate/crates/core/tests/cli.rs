//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn weakdens(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakdens"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_is_deterministic_and_csv_shaped() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&weakdens(
        &["--seed", "9", "simulate", "--process", "doubling", "-n", "50"],
        dir.path(),
    ));
    let b = stdout(&weakdens(
        &["--seed", "9", "simulate", "--process", "doubling", "-n", "50"],
        dir.path(),
    ));
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("index,value"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn estimate_emits_density_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&weakdens(
        &[
            "estimate",
            "--process",
            "doubling",
            "-n",
            "5000",
            "--estimator",
            "compact2",
            "-m",
            "8",
            "--grid",
            "0.2:0.8:13",
        ],
        dir.path(),
    ));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,density"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 13);
    for row in rows {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - 1.0).abs() < 0.5, "density {value} far from uniform");
    }
}

#[test]
fn rates_subcommand_reports_schedule_and_admissibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&weakdens(
        &["rates", "--theorem", "t1", "--rho", "2", "--decay", "geometric(1,1)", "-n", "1024"],
        dir.path(),
    ));
    assert!(out.contains("admissible"));
    assert!(out.contains("n^-0.400000"));
    assert!(out.contains("m*(1024) = 4"));
}

#[test]
fn verify_moment_reports_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&weakdens(
        &[
            "verify-moment",
            "--process",
            "iid-uniform",
            "-q",
            "2",
            "-n",
            "16",
            "-m",
            "2",
            "--replicates",
            "2000",
        ],
        dir.path(),
    ));
    assert!(out.contains("holds at slack 0.25: YES"), "output:\n{out}");
}

#[test]
fn experiment_writes_csv_with_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    std::fs::write(
        &config,
        "[process]\n\
         preset = iid-uniform\n\
         \n\
         [experiment]\n\
         n_grid = 64, 128, 256, 512\n\
         replicates = 50\n\
         metric = pointwise_lq\n\
         x = 0.5\n\
         q = 2\n\
         seed = 4\n",
    )
    .unwrap();
    let csv_path = dir.path().join("rows.csv");
    let out = weakdens(
        &["--out", csv_path.to_str().unwrap(), "experiment", "--config", config.to_str().unwrap()],
        dir.path(),
    );
    let summary = stdout(&out);
    assert!(summary.contains("fitted slope"));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("process,estimator,n,m,replicates,metric,value,stderr,seed\n"));
    assert_eq!(csv.lines().count(), 5);

    // Global --seed overrides the config seed.
    let csv_path2 = dir.path().join("rows2.csv");
    let out = weakdens(
        &[
            "--seed",
            "5",
            "--out",
            csv_path2.to_str().unwrap(),
            "experiment",
            "--config",
            config.to_str().unwrap(),
        ],
        dir.path(),
    );
    stdout(&out);
    let csv2 = std::fs::read_to_string(&csv_path2).unwrap();
    assert_ne!(csv, csv2);
    assert!(csv2.lines().nth(1).unwrap().ends_with(",5"));
}

#[test]
fn malformed_config_fails_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "[process]\npreset = doubling\nwat\n").unwrap();
    let out = weakdens(&["experiment", "--config", config.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}
