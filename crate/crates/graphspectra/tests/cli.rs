use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use graphspectra::io::read_signals;
use graphspectra::output::read_table;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_graphspectra"));
    cmd.env_remove("GRAPHSPECTRA_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const SQUARE: &str = "# four-cycle with a chord\n1 2 1\n2 3 1\n3 4 1\n4 1 1\n1 3 0.5\n";

#[test]
fn load_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let good = write(tmp.path(), "g.txt", SQUARE);
    assert_eq!(code(&run(&["load", "--graph", &good])), 0);
    assert_eq!(code(&run(&["validate", "--graph", &good])), 0);

    let mtx = write(
        tmp.path(),
        "g.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 1.0\n3 2 2.0\n",
    );
    assert_eq!(code(&run(&["load", "--graph", &mtx])), 0);

    let missing = tmp.path().join("nope.txt");
    assert_eq!(
        code(&run(&["load", "--graph", missing.to_str().unwrap()])),
        2
    );

    let asym = write(tmp.path(), "a.txt", "1 2 1\n2 1 3\n");
    assert_eq!(code(&run(&["load", "--graph", &asym])), 3);
    let junk = write(tmp.path(), "j.txt", "1 two 1\n");
    assert_eq!(code(&run(&["load", "--graph", &junk])), 3);

    assert_eq!(code(&run(&["load", "--bogus"])), 2);
}

#[test]
fn design_is_deterministic_and_tight() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = run(&[
            "design",
            "--system",
            "umt",
            "--bands",
            "7",
            "--lambda-max",
            "2",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = fs::read(a.join("design.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("design.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("design.json")).unwrap(),
        fs::read(b.join("design.json")).unwrap()
    );

    let (header, rows) = read_table(&a.join("design.csv")).unwrap();
    assert_eq!(header.len(), 9);
    assert_eq!(header.last().unwrap(), "G");
    assert_eq!(rows.len(), 2001);
    for row in &rows {
        let g = row[8];
        let sum: f64 = row[1..8].iter().map(|k| k * k).sum();
        assert!((g - 1.0).abs() <= 1e-9);
        assert!((sum - g).abs() <= 1e-12);
    }
}

#[test]
fn design_rejects_bad_parameters() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "design",
            "--bands",
            "1",
            "--lambda-max",
            "2",
            "--out",
            out
        ])),
        2
    );
    assert_eq!(
        code(&run(&["design", "--lambda-max", "-1", "--out", out])),
        2
    );
}

#[test]
fn sosks_column_count() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "design",
        "--system",
        "sosks",
        "--bands",
        "57",
        "--lower",
        "10",
        "--pivot",
        "1",
        "--lambda-max",
        "4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, _) = read_table(&tmp.path().join("design.csv")).unwrap();
    assert_eq!(header.len(), 59);
}

#[test]
fn synth_labels_round_trip() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = run(&[
        "synth",
        "--graph",
        "rgg:120:0.2:3",
        "--realizations",
        "3",
        "--out",
        dir,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let set = read_signals(&tmp.path().join("signals.csv")).unwrap();
    assert_eq!(set.len(), 6);
    assert_eq!(set.n_vertices(), 120);
    assert_eq!(set.labels()[0], "eta=0.2,n=2,i=0");
    assert_eq!(set.labels()[5], "eta=0.5,n=2,i=2");

    let graph = tmp.path().join("graph.txt");
    let signals = tmp.path().join("signals.csv");
    let dec = tmp.path().join("dec");
    let out = run(&[
        "decompose",
        "--graph",
        graph.to_str().unwrap(),
        "--signals",
        signals.to_str().unwrap(),
        "--out",
        dec.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(dec.join("decompose.json")).unwrap()).unwrap();
    assert!(meta["reconstruction_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn experiment_outputs() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "experiment",
        "minnesota",
        "--graph",
        "rgg:200:0.12:2",
        "--realizations",
        "3",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["graph.txt", "esd.csv", "warps.csv", "summary.json"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let (header, rows) = read_table(&tmp.path().join("warps.csv")).unwrap();
    assert_eq!(header[0], "lambda");
    assert!(header.iter().any(|h| h == "T_F1"));
    let first = &rows[0];
    let last = rows.last().unwrap();
    assert!(first[1..].iter().all(|&v| v.abs() < 1e-9));
    assert!(last[1..].iter().all(|&v| (v - last[0]).abs() < 1e-9));
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    let args = |dir: &Path| {
        vec![
            "experiment".to_owned(),
            "noise-sweep".into(),
            "--graph".into(),
            "rgg:150:0.15:4".into(),
            "--realizations".into(),
            "2".into(),
            "--runs".into(),
            "3".into(),
            "--snr-list=-10,10".into(),
            "--out".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let one = bin()
        .env("GRAPHSPECTRA_THREADS", "1")
        .args(args(&a))
        .output()
        .unwrap();
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(code(&bin().args(args(&b)).output().unwrap()), 0);
    assert_eq!(
        fs::read(a.join("noise.csv")).unwrap(),
        fs::read(b.join("noise.csv")).unwrap()
    );

    let bad = bin()
        .env("GRAPHSPECTRA_THREADS", "0")
        .args(args(&a))
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
