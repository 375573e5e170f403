use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cellse_cli::table::{Format, Table};

fn cellse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellse")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = cellse(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// Every table re-read and re-emitted must reproduce the file byte for byte.
fn assert_round_trip(dir: &Path) -> usize {
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") if path.file_name().unwrap() == "settings.json" => continue,
            Some("json") => Format::Json,
            _ => continue,
        };
        let table = Table::parse(&text, format).unwrap();
        assert_eq!(table.render(format).unwrap(), text, "{}", path.display());
        n += 1;
    }
    n
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

const SMALL_SWEEP: [&str; 8] = ["--grid-tau", "-4:4:5", "--grid-beta", "-4:4:5", "--resolution", "201", "--m", "20"];

#[test]
fn every_subcommand_round_trips_in_both_formats() {
    let tmp = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let dir = tmp.path().join(format);
        let d = |s: &str| dir.join(s).to_string_lossy().into_owned();
        let mut sweep = vec!["sweep", "--out"];
        let sweep_dir = d("sweep");
        sweep.push(&sweep_dir);
        sweep.extend(SMALL_SWEEP);
        sweep.extend(["--m", "50", "--format", format]);
        run_ok(&sweep);
        let part = d("partition");
        run_ok(&["partition", "--preset", "quincunx", "--resolution", "21", "--out", &part, "--format", format]);
        let mc = d("mc");
        run_ok(&["mc", "--trials", "50", "--m", "5", "--resolution", "401", "--out", &mc, "--format", format]);
        let occ = d("occ");
        run_ok(&["occupancy", "--m-max", "40", "--p", "0.5", "--out", &occ, "--format", format]);
        for sub in [&sweep_dir, &part, &mc, &occ] {
            assert!(assert_round_trip(Path::new(sub)) > 0);
        }
    }
    // JSON carries the same cells as CSV.
    let csv = Table::from_csv(&fs::read_to_string(tmp.path().join("csv/sweep/bullet_joint_M_total_m20.csv")).unwrap());
    let json = Table::from_json(&fs::read_to_string(tmp.path().join("json/sweep/bullet_joint_M_total_m20.json")).unwrap());
    assert_eq!(csv.unwrap(), json.unwrap());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a").to_string_lossy().into_owned();
    let b = tmp.path().join("b").to_string_lossy().into_owned();
    for out in [&a, &b] {
        run_ok(&["mc", "--trials", "300", "--m", "10", "--seed", "11", "--out", out]);
    }
    assert_eq!(read_dir_sorted(Path::new(&a)), read_dir_sorted(Path::new(&b)));
}

#[test]
fn sweep_reports_dominance_on_shared_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_string_lossy().into_owned();
    let mut args = vec!["sweep", "--out", &out];
    args.extend(SMALL_SWEEP);
    run_ok(&args);
    let t = Table::from_csv(&fs::read_to_string(tmp.path().join("dominance.csv")).unwrap()).unwrap();
    let ok = t.columns.iter().position(|c| c == "all_weakly_dominated").unwrap();
    assert_eq!(t.rows.len(), 6);
    assert!(t.rows.iter().all(|r| r[ok] == cellse_cli::table::Cell::Bool(true)));
    let labels = Table::from_csv(&fs::read_to_string(tmp.path().join("bullet_joint_F.csv")).unwrap()).unwrap();
    let li = labels.columns.iter().position(|c| c == "label").unwrap();
    assert_eq!(labels.rows.iter().filter(|r| r[li] != cellse_cli::table::Cell::Null).count(), 9);
}

#[test]
fn two_station_partition_writes_boundary_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_string_lossy().into_owned();
    run_ok(&["partition", "--grid-tau", "0:0:1", "--grid-beta", "0:0:1", "--out", &out]);
    let t = Table::from_csv(&fs::read_to_string(tmp.path().join("boundary.csv")).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert!(tmp.path().join("partition_0000.csv").exists());
    assert!(!tmp.path().join("partition_0001.csv").exists());
}

#[test]
fn validation_failures_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_string_lossy().into_owned();
    assert!(!cellse(&["sweep", "--preset", "nope", "--out", &out]).status.success());
    assert!(!cellse(&["sweep", "--grid-tau", "3:1:4", "--out", &out]).status.success());
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"deadzone": 1.5}"#).unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let r = cellse(&["partition", "--config", &cfg, "--out", &out]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("error"));
}

#[test]
fn mc_tolerance_failure_exits_nonzero() {
    // Three quadrature points cannot resolve the cells, so the closed form is far off.
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_string_lossy().into_owned();
    let r = cellse(&["mc", "--resolution", "3", "--trials", "2000", "--m", "5", "--out", &out]);
    assert_eq!(r.status.code(), Some(1));
    let t = Table::from_csv(&fs::read_to_string(tmp.path().join("mc_report.csv")).unwrap()).unwrap();
    assert!(t.rows.iter().any(|r| r.last() == Some(&cellse_cli::table::Cell::Bool(false))));
}
