use std::path::Path;
use std::process::{Command, Output};

fn olb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olb"))
        .args(args)
        .env_remove("OLB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn orbit_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, svg) = (path(dir.path(), "orbit.csv"), path(dir.path(), "orbit.svg"));
    let out = olb(&["orbit", "--table", "square", "--seed", "100,0", "--iters", "2000", "--out", &format!("{csv},{svg}")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,x,y,l,r,s,steady"));
    // the seed plus one row per step
    assert_eq!(lines.count(), 2001);
    let drawing = std::fs::read_to_string(&svg).unwrap();
    assert!(drawing.starts_with("<svg") && drawing.contains("<polygon") && drawing.contains("<circle"));
    assert!(stdout(&out).contains("steps: 2000"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let p = path(dir.path(), name);
        let out = olb(&["--threads", threads, "singularity", "--table", "regular:5", "--res", "64", "--depth", "6", "--out", &p]);
        assert_eq!(code(&out), 0);
        std::fs::read(&p).unwrap()
    };
    assert_eq!(run("a.pgm", "1"), run("b.pgm", "3"));
}

#[test]
fn extouch_of_the_unit_equilateral() {
    let out = olb(&["--json", "extouch", "--sides", "1,1,1"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for s in v["parent_sides"].as_array().unwrap() {
        assert!((s.as_f64().unwrap() - 2.0).abs() < 1e-9);
    }
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(code(&olb(&["orbit", "--table", "square"])), 1);
    assert_eq!(code(&olb(&["orbit", "--seed", "1"])), 1);
    assert_eq!(code(&olb(&["orbit", "--seed", "5,5", "--out", "x.txt"])), 1);
    assert_eq!(code(&olb(&["nonsense"])), 1);
    assert_eq!(code(&olb(&["--threads", "0", "dual-curve"])), 1);
    // table
    assert_eq!(code(&olb(&["orbit", "--table", "regular:2", "--seed", "5,5"])), 2);
    assert_eq!(code(&olb(&["extouch", "--sides", "1,1,5"])), 2);
    assert_eq!(code(&olb(&["dual-curve", "--table", "no/such/file.json"])), 2);
    // numeric: the seed lies on a side extension
    assert_eq!(code(&olb(&["orbit", "--table", "square", "--seed", "5,1"])), 3);
    assert_eq!(code(&olb(&["--help"])), 0);
}

#[test]
fn table_files_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "tri.toml");
    std::fs::write(&table, "vertices = [[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]]\n").unwrap();
    let cfg = path(dir.path(), "run.toml");
    std::fs::write(&cfg, format!("table = \"{table}\"\nseed = [10.0, -4.0]\niters = 25\n")).unwrap();
    let out = olb(&["--json", "--config", &cfg, "orbit"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["steps"], 25);
    assert_eq!(v["table"]["vertices"].as_array().unwrap().len(), 3);

    let bad = path(dir.path(), "bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&olb(&["--config", &bad, "orbit"])), 1);
}

#[test]
fn dual_curve_and_once_around_reports() {
    let out = olb(&["dual-curve", "--table", "square", "--samples", "64"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    // widths of the square of side 2 range over [2, 2√2]
    assert!(text.contains("min_width: 2"), "{text}");

    let out = olb(&["--json", "once-around", "--table", "square", "--starts", "2"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in v["starts"].as_array().unwrap() {
        assert_eq!(row["satisfied"], true);
    }
}
