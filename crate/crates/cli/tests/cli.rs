use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sarfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarfc"))
        .args(args)
        .env("SARFC_DATA_DIR", "/nonexistent-sarfc-data")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_generated_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let out = sarfc(&["run", "--generate", "blobs", "--k", "2", "--n", "200", "--seed", "7", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.split_whitespace().eq(["k", "2"])), "{text}");
    let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(
        results,
        "dataset,k_true,k_pred,acc,f1,ari,nmi\nblobs-s7,2,2,100.0,100.0,100.0,100.0\n"
    );
    let labels = fs::read_to_string(dir.path().join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 201);
    assert_eq!(labels.lines().next(), Some("index,label,dense"));
}

#[test]
fn outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = sarfc(&[
            "run", "--generate", "ring_s", "--n", "400", "--seed", "3", "--out", path(d.path()), "--diagnostics", "--trace",
        ]);
        assert!(out.status.success());
    }
    let files = ["results.csv", "labels.csv", "rho_sorted.csv", "smoothed.csv", "tan_alpha.csv", "soar.csv", "split.csv", "trace.jsonl"];
    for f in files {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty(), "{f} is empty");
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn run_a_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("two.csv");
    let mut body = String::from("x,y,class\n");
    for i in 0..30 {
        let t = f64::from(i) * 0.1;
        body.push_str(&format!("{t},{},a\n", t * 0.5));
        body.push_str(&format!("{},{},b\n", t + 40.0, t * 0.5));
    }
    fs::write(&file, body).unwrap();
    let out = sarfc(&["run", "--dataset", path(&file), "--no-noise-id"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("dataset   two"), "{text}");
    assert!(text.lines().any(|l| l.split_whitespace().eq(["k", "2"])), "{text}");
}

#[test]
fn missing_dataset_exits_2() {
    let out = sarfc(&["run", "--dataset", "no-such-dataset"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    // A manifest name whose file is absent fails the same way.
    assert_eq!(sarfc(&["run", "--dataset", "iris"]).status.code(), Some(2));
}

#[test]
fn flag_conflicts_are_rejected() {
    assert!(!sarfc(&["run"]).status.success());
    assert!(!sarfc(&["run", "--generate", "blobs", "--dataset", "iris"]).status.success());
    assert!(!sarfc(&["run", "--generate", "blobs", "--trace"]).status.success());
    assert_eq!(sarfc(&["run", "--generate", "nonsense"]).status.code(), Some(2));
}

#[test]
fn bench_with_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.toml");
    fs::write(&manifest, "").unwrap();
    let out = sarfc(&["bench", "--manifest", path(&manifest), "--out", path(dir.path())]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("bench.csv")).unwrap(),
        "dataset,k_true,k_pred,acc,f1,ari,nmi\n"
    );
}

#[test]
fn bench_reports_broken_entries() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    let mut body = String::new();
    for i in 0..20 {
        body.push_str(&format!("{},0,0\n{},0,1\n", f64::from(i) * 0.1, 50.0 + f64::from(i) * 0.1));
    }
    fs::write(&good, body).unwrap();
    let manifest = dir.path().join("m.toml");
    fs::write(
        &manifest,
        format!(
            "[[dataset]]\nname = \"good\"\nfile = \"{}\"\nlabel_column = \"last\"\n\n\
             [[dataset]]\nname = \"gone\"\nfile = \"{}\"\nlabel_column = \"last\"\n",
            path(&good),
            path(&dir.path().join("gone.csv"))
        ),
    )
    .unwrap();
    let out = sarfc(&["bench", "--manifest", path(&manifest), "--out", path(dir.path()), "--no-noise-id"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1], "good,2,2,100.0,100.0,100.0,100.0");
    assert_eq!(rows[2], "gone,ERROR,,,,,");
    assert!(String::from_utf8_lossy(&out.stderr).contains("gone"));
}

#[test]
fn check_passes() {
    let out = sarfc(&["check", "--chains", "60"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
