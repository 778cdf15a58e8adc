use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wavc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavc")).args(args).output().unwrap()
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn capacity_of_the_bitflip_example() {
    let o = wavc(&["capacity", "--config", &example("bitflip.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let c: f64 = row[0].parse().unwrap();
    assert!((c - 0.3578).abs() < 1e-3);
    assert_eq!(row[4], "equals_Clist_thm1");
    let table = stdout(&wavc(&["capacity", "--config", &example("channel_table.json")]));
    assert_eq!(table.lines().nth(1).unwrap().split(',').next(), row.first().copied());
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cap.json");
    let o = wavc(&["capacity", "--config", &example("bitflip.json"), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!((v["c_list"].as_f64().unwrap() - 0.3578).abs() < 1e-3);
    assert_eq!(v["all_symmetrizable"], false);
}

#[test]
fn config_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wavc(&["capacity", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(wavc(&["capacity", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let zero = write(dir.path(), "zero.json", r#"{"bitflip": {"w": 0.2, "p": 0.1}, "windows": {"w_x": 8, "w_s": 8}, "trials": 0}"#);
    let o = wavc(&["capacity", "--config", zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
    assert_eq!(wavc(&["simulate", "--config", &example("bitflip.json")]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(wavc(&[]).status.code(), Some(1));
    assert_eq!(wavc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(wavc(&["capacity"]).status.code(), Some(1));
    assert_eq!(wavc(&["capacity", "--config", "x", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(wavc(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // A 0.5 i.i.d. jammer never satisfies a 0.05 cap.
    let cfg = write(
        dir.path(),
        "jam.json",
        r#"{"bitflip": {"w": 0.4, "p": 0.05}, "windows": {"w_x": 32, "w_s": 32},
            "code": {"layout": "thm1", "n": 96, "data_bits": 4, "p_x": [0.75, 0.25], "guard": [0.8, 0.2], "key_len": 96},
            "jammer": {"kind": "iid", "p_s": [0.5, 0.5]}, "trials": 5, "rejection_cap": 3}"#,
    );
    assert_eq!(wavc(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn selftest_passes() {
    let o = wavc(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.contains(",pass,")));
}

#[test]
fn symmetrize_reports_witness() {
    let o = wavc(&["symmetrize", "--config", &example("bitflip.json"), "--p-x", "0.9,0.1"]);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains(",true,"));
    let o = wavc(&["symmetrize", "--config", &example("bitflip.json"), "--p-x", "0.7,0.3"]);
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",false,"));
    let grid = stdout(&wavc(&["symmetrize", "--config", &example("bitflip.json"), "--resolution", "10"]));
    assert!(grid.lines().count() > 2);
}

#[test]
fn check_windows_reads_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"bitflip": {"w": 0.25, "p": 0.25}, "windows": {"w_x": 4, "w_s": 4}}"#);
    let good = write(dir.path(), "good.txt", "1000 1000 1000");
    let bad = write(dir.path(), "bad.txt", "1, 0, 0, 0, 1, 1, 0, 0");
    let run = |seq: &Path, kind: &str| stdout(&wavc(&["check-windows", "--config", cfg.to_str().unwrap(), "--input", seq.to_str().unwrap(), "--sequence", kind]));
    assert_eq!(run(&good, "input").lines().nth(1).unwrap(), "true,12,4,9,0,");
    assert_eq!(run(&bad, "state").lines().nth(1).unwrap(), "false,8,4,5,3,2");
    let junk = write(dir.path(), "junk.txt", "0 1 2");
    assert_eq!(wavc(&["check-windows", "--config", cfg.to_str().unwrap(), "--input", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn simulate_and_sweep_examples() {
    let o = wavc(&["simulate", "--config", &example("simulate_thm2.json"), "--threads", "2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().last().unwrap().starts_with("max over strategies"));
    let a = stdout(&wavc(&["sweep", "--config", &example("sweep_capacity.json")]));
    let b = stdout(&wavc(&["sweep", "--config", &example("sweep_capacity.json"), "--threads", "1"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 10);
}
