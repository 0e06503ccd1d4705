use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigid-hc")).args(args).output().expect("run rigid-hc")
}

fn quadric() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/quadric.polysys")
}

fn scratch(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("rigid-hc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn bundled_quadric_certifies() {
    let out = run(&["solve", "--system", quadric(), "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("certified true"));
    let res: f64 = text.lines().find_map(|l| l.strip_prefix("residuals ")).unwrap().trim().parse().unwrap();
    assert!(res <= 1e-10);
    let zero: Vec<(f64, f64)> = text
        .lines()
        .skip_while(|l| *l != "zero")
        .skip(1)
        .take(2)
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    // [a : b] with b = ±a
    let (a, b) = (num_complex::Complex64::new(zero[0].0, zero[0].1), num_complex::Complex64::new(zero[1].0, zero[1].1));
    assert!((b - a).norm().min((b + a).norm()) <= 1e-10);
}

#[test]
fn identical_flags_give_identical_reports() {
    let a = run(&["solve", "--system", quadric(), "--seed", "7", "--json"]);
    let b = run(&["solve", "--system", quadric(), "--seed", "7", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["outcome"], "success");
}

#[test]
fn malformed_files_exit_with_line_number() {
    let path = scratch("bad.polysys", "polysys 1\nn 1\ndegrees 2\npoly 1\n2 1 1.0 0.0\nend\n");
    let out = run(&["solve", "--system", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 5"));
    let out = run(&["solve", "--system", "/nonexistent/system.polysys"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_step_budget_is_a_tracking_failure() {
    let out = run(&["solve", "--system", quadric(), "--seed", "42", "--max-steps", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("outcome max_steps_exceeded"));
}

#[test]
fn experiments_write_csv_files() {
    let path = std::env::temp_dir().join(format!("rigid-hc-kappa-{}.csv", std::process::id()));
    let out = run(&["kappa-moment", "--n", "1", "--trials", "100", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,trials,mean_kappa_sq,stderr,bound_6n2"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[..3], ["1", "100", "1.0000000000000000e0"]);
    assert_eq!(row[4], "6.0000000000000000e0");
    let out = run(&["step-scaling", "--n-range", "3:1"]);
    assert_eq!(out.status.code(), Some(2));
}
