use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use surf_core::polynomial::PiecewiseEstimate;

fn surf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surf"))
        .args(args)
        .current_dir(dir)
        .env_remove("SURF_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_one_line_failure(o: &Output) {
    assert!(!o.status.success());
    let err = stderr(o);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

fn write_uniform(path: &Path, count: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..count)
        .map(|i| ((i * 37 + 11) % 127) as f64 / 127.0 + 0.003)
        .collect();
    let text: String = xs.iter().map(|x| format!("{x}\n")).collect();
    fs::write(path, text).unwrap();
    xs
}

#[test]
fn fit_writes_estimate_over_the_hull() {
    let dir = tempfile::tempdir().unwrap();
    let xs = write_uniform(&dir.path().join("s.txt"), 127);
    let o = surf(
        &["fit", "s.txt", "--degree", "0", "--out", "est.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(stdout.contains("pieces"), "{stdout}");
    assert!(stdout.contains("\"degree\":0"), "{stdout}");
    let est =
        PiecewiseEstimate::from_json(&fs::read_to_string(dir.path().join("est.json")).unwrap())
            .unwrap();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(est.hull(), (lo, hi));
    assert_eq!(est.degree(), 0);
}

#[test]
fn fit_to_stdout_keeps_stdout_pure_json() {
    let dir = tempfile::tempdir().unwrap();
    write_uniform(&dir.path().join("s.txt"), 200);
    let o = surf(&["fit", "s.txt"], dir.path());
    assert!(o.status.success());
    let est = PiecewiseEstimate::from_json(&String::from_utf8(o.stdout.clone()).unwrap()).unwrap();
    assert_eq!(est.degree(), 1);
    assert!(stderr(&o).contains("pieces"));
}

#[test]
fn malformed_line_is_named() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("s.txt"),
        "0.1\n0.2\n0.3\n0.4\nzero\n0.6\n0.7\n0.8\n",
    )
    .unwrap();
    let o = surf(&["fit", "s.txt", "--out", "est.json"], dir.path());
    assert_one_line_failure(&o);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
    assert!(!dir.path().join("est.json").exists());
}

#[test]
fn degree_nine_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_uniform(&dir.path().join("s.txt"), 127);
    let o = surf(
        &["fit", "s.txt", "--degree", "9", "--out", "est.json"],
        dir.path(),
    );
    assert_one_line_failure(&o);
    assert!(stderr(&o).contains("degree must be ≤ 8"), "{}", stderr(&o));
    assert!(!dir.path().join("est.json").exists());
}

#[test]
fn too_few_samples() {
    let dir = tempfile::tempdir().unwrap();
    write_uniform(&dir.path().join("s.txt"), 6);
    let o = surf(&["fit", "s.txt"], dir.path());
    assert_one_line_failure(&o);
    assert!(stderr(&o).contains("at least 7"), "{}", stderr(&o));
    write_uniform(&dir.path().join("s.txt"), 7);
    assert!(surf(&["fit", "s.txt"], dir.path()).status.success());
}

#[test]
fn missing_file_and_bad_flags_fail_on_one_line() {
    let dir = tempfile::tempdir().unwrap();
    assert_one_line_failure(&surf(&["fit", "nope.txt"], dir.path()));
    assert_one_line_failure(&surf(&["fit"], dir.path()));
    assert_one_line_failure(&surf(
        &["bench", "--spec", "beta-f1", "-n", "100"],
        dir.path(),
    ));
    assert_one_line_failure(&surf(
        &["fit", "s", "--alpha", "1", "--theory-alpha"],
        dir.path(),
    ));
}

#[test]
fn bench_is_bit_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let args = [
            "bench",
            "--spec",
            "gauss-f1,beta-f2",
            "--degree",
            "0,1",
            "-n",
            "128,512",
            "--trials",
            "1",
            "--seed",
            "17",
            "--no-timing",
            "--out",
            out,
        ];
        let o = surf(&args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "spec,degree,n,trials,mean_l1,std_l1,wall_time_s");
    assert_eq!(lines.len(), 9);
    assert!(lines[1].starts_with("beta-f2,0,128,1,"));
    assert!(lines[8].starts_with("gauss-f1,1,512,1,"));
}

#[test]
fn seed_env_fallback_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "bench",
        "--spec",
        "gamma-f1",
        "-n",
        "256",
        "--trials",
        "4",
        "--no-timing",
    ];
    let flag = surf(
        &[&base[..], &["--seed", "5", "--jobs", "1"]].concat(),
        dir.path(),
    );
    let env = Command::new(env!("CARGO_BIN_EXE_surf"))
        .args(base)
        .args(["--jobs", "3"])
        .env("SURF_SEED", "5")
        .output()
        .unwrap();
    let other = surf(&[&base[..], &["--seed", "6"]].concat(), dir.path());
    assert!(flag.status.success() && env.status.success());
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn bench_failure_leaves_no_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = surf(
        &[
            "bench", "--spec", "beta-f1", "-d", "1,9", "-n", "64", "--trials", "1", "-o", "r.csv",
        ],
        dir.path(),
    );
    assert_one_line_failure(&o);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bench_accepts_a_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("mine.json"),
        r#"[{"weight": 0.5, "family": "beta", "a": 2, "b": 5}, {"weight": 0.5, "family": "gaussian", "mean": 0.6, "sd": 0.1}]"#,
    )
    .unwrap();
    let o = surf(
        &["bench", "--spec", "mine.json", "-n", "256", "--trials", "2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("mine,1,256,2,"));
}

#[test]
fn verify_nodes_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = surf(&["verify-nodes", "--out", "nodes.csv"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("nodes.csv")).unwrap();
    assert_eq!(text.lines().count(), 10);
    let o = surf(
        &[
            "verify-nodes",
            "--min-degree",
            "1",
            "--max-degree",
            "3",
            "--optimize",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_one_line_failure(&surf(&["verify-nodes", "--max-degree", "9"], dir.path()));
}

#[test]
fn synth_binary_round_trip_then_fit_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let o = surf(
        &[
            "synth", "beta-f1", "--count", "1000", "--seed", "2", "--out", "s.f64",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::metadata(dir.path().join("s.f64")).unwrap().len(), 8000);
    let text = surf(
        &["synth", "beta-f1", "--count", "1000", "--seed", "2"],
        dir.path(),
    )
    .stdout;
    let from_text: Vec<f64> = String::from_utf8(text)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let bytes = fs::read(dir.path().join("s.f64")).unwrap();
    let from_bin: Vec<f64> = bytes
        .chunks(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(from_text, from_bin);

    let o = surf(&["fit", "s.f64", "-d", "2", "-o", "e.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    // 1000 samples: n = 512 keeps 511 of them
    assert!(String::from_utf8(o.stdout.clone())
        .unwrap()
        .contains("511 of 1000"));
    let o = surf(
        &["eval", "e.json", "--spec", "beta-f1", "--points", "11"],
        dir.path(),
    );
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,estimate,true_pdf");
    assert_eq!(csv.lines().count(), 12);
    let l1: f64 = stderr(&o)
        .rsplit(' ')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(l1 > 0.0 && l1 < 0.5, "{l1}");
}

#[test]
fn parallel_fit_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    assert!(surf(
        &["synth", "gauss-comp", "-n", "4095", "-o", "s.txt"],
        dir.path()
    )
    .status
    .success());
    let one = surf(&["fit", "s.txt", "-d", "3", "--jobs", "1"], dir.path());
    let four = surf(&["fit", "s.txt", "-d", "3", "--jobs", "4"], dir.path());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn config_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    write_uniform(&dir.path().join("s.txt"), 127);
    fs::write(
        dir.path().join("c.json"),
        r#"{"degree": 2, "mass_rule": "raw"}"#,
    )
    .unwrap();
    let o = surf(
        &["fit", "s.txt", "--config", "c.json", "-o", "e.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(
        out.contains("\"degree\":2") && out.contains("\"mass_rule\":\"raw\""),
        "{out}"
    );
    fs::write(dir.path().join("c.json"), "{not json").unwrap();
    assert_one_line_failure(&surf(&["fit", "s.txt", "--config", "c.json"], dir.path()));
}
