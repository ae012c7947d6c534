use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tentqmc"))
        .args(args)
        .current_dir(dir)
        .env_remove("TENTQMC_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(text: &str) -> Vec<f64> {
    text.lines().map(|l| l.parse().unwrap()).collect()
}

fn workdir() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("ex.spec"), "b=2\nm=2\nn=2\np=1,1,1\nq1=1\n").unwrap();
    d
}

#[test]
fn gen_example_rule() {
    let d = workdir();
    let out = stdout(&run(&["gen", "--spec", "ex.spec"], d.path()));
    assert_eq!(column(&out), vec![0.0, 0.25, 0.75, 0.5]);
    let flags = stdout(&run(&["gen", "--base", "2", "--m", "2", "--n", "2", "--p", "1,1,1", "--q", "1"], d.path()));
    assert_eq!(flags, out);
}

#[test]
fn gen_fold() {
    let d = workdir();
    let out = stdout(&run(&["gen", "--spec", "ex.spec", "--fold"], d.path()));
    // Rows 0, 1/4, 3/4, 1/2 fold to 0, 1/2, 1/2, 1.
    assert_eq!(column(&out), vec![0.0, 0.5, 0.5, 1.0]);
    let digits = stdout(&run(&["gen", "--spec", "ex.spec", "--fold", "--digits"], d.path()));
    assert_eq!(digits.lines().count(), 4);
    assert!(digits.lines().all(|l| l.ends_with(')')));
}

#[test]
fn gen_shift_reproducible_and_in_range() {
    let d = workdir();
    let spec = "b=3\nm=3\nn=3\np=1,2,0,1\nq1=1\nq2=1,2\nq3=2,0,1\n";
    fs::write(d.path().join("s3.spec"), spec).unwrap();
    let args = ["gen", "--spec", "s3.spec", "--shift", "11", "--fold"];
    let a = stdout(&run(&args, d.path()));
    assert_eq!(a, stdout(&run(&args, d.path())));
    assert_ne!(a, stdout(&run(&["gen", "--spec", "s3.spec", "--shift", "12", "--fold"], d.path())));
    assert_eq!(a.lines().count(), 27);
    for l in a.lines() {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn gen_from_matrices_file() {
    let d = workdir();
    fs::write(d.path().join("m.net"), "2 2 2 1\n1 0\n1 1\n").unwrap();
    let out = stdout(&run(&["gen", "--net", "m.net"], d.path()));
    assert_eq!(column(&out), vec![0.0, 0.75, 0.25, 0.5]);
}

#[test]
fn bound_ranks_two_candidates() {
    let d = workdir();
    let out = stdout(&run(
        &["bound", "--base", "2", "--m", "1", "--n", "1", "--p", "1,1", "--q", "0", "--q", "1"],
        d.path(),
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "q,p,T,C_walsh,bound_value,existence_bound,lambda_opt");
    assert!(lines[1].starts_with("1,"));
    assert!(lines[2].starts_with("0,"));
    let value = |l: &str| -> f64 { l.rsplit(',').nth(2).unwrap().parse().unwrap() };
    assert!(value(lines[1]) < value(lines[2]));
}

#[test]
fn search_reproducible() {
    let d = workdir();
    let args = ["search", "--base", "2", "--m", "3", "--n", "3", "--s", "2", "--mode", "random", "--k", "64", "--seed", "7"];
    let a = stdout(&run(&args, d.path()));
    assert_eq!(a, stdout(&run(&args, d.path())));
    assert_eq!(a.lines().count(), 65);
    assert!(a.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn wce_single_point() {
    let d = workdir();
    fs::write(d.path().join("p.csv"), "0.3,0.7\n").unwrap();
    fs::write(d.path().join("w.txt"), "s=2\nproduct: 1,0.5\n").unwrap();
    let out = stdout(&run(&["wce", "--points", "p.csv", "--weights", "w.txt"], d.path()));
    let v: f64 = out.trim().parse().unwrap();
    // K(x,x) - 1 with K = prod_j (1 + gamma_j k(x_j, x_j)) and
    // k(x,x) = B1(x)^2 + B2(x)^2/4 - B4(0)/24 for alpha = 2.
    let k = |x: f64| {
        let b1 = x - 0.5;
        let b2 = x * x - x + 1.0 / 6.0;
        b1 * b1 + b2 * b2 / 4.0 + 1.0 / 30.0 / 24.0
    };
    let expected = (1.0 + k(0.3)) * (1.0 + 0.5 * k(0.7)) - 1.0;
    assert!((v - expected).abs() < 1e-14, "{v} vs {expected}");
}

#[test]
fn experiment_rows() {
    let d = workdir();
    fs::write(
        d.path().join("plan.txt"),
        "base=2\nalpha=2\nm_min=2\nm_max=4\nweights=1,1\nreplicates=8\ncandidates=4\n",
    )
    .unwrap();
    let a = stdout(&run(&["experiment", "--plan", "plan.txt"], d.path()));
    assert_eq!(a, stdout(&run(&["experiment", "--plan", "plan.txt"], d.path())));
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("m,N,rmse_estimate,stderr,theorem51_bound,slope_so_far,clamped"));
    assert_eq!(lines.len(), 4);
    let classic = stdout(&run(&["experiment", "--plan", "plan.txt", "--classic"], d.path()));
    // Column 8 is n: 2m with alpha = 2.
    let n: Vec<&str> = classic.lines().skip(1).map(|l| l.split(',').nth(7).unwrap()).collect();
    assert_eq!(n, vec!["4", "6", "8"]);
}

#[test]
fn exit_codes() {
    let d = workdir();
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(run(&["gen", "--base", "2", "--m", "2", "--q", "1,1,1"], d.path())), 2);
    fs::write(d.path().join("bad.spec"), "b=2\nm=2\nn=two\n").unwrap();
    let bad = run(&["gen", "--spec", "bad.spec"], d.path());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
    assert_eq!(code(bad), 2);
    assert_eq!(code(run(&["gen", "--spec", "missing.spec"], d.path())), 4);
    assert_eq!(code(run(&["frobnicate"], d.path())), 2);
    let capped = Command::new(env!("CARGO_BIN_EXE_tentqmc"))
        .args(["gen", "--spec", "ex.spec"])
        .current_dir(d.path())
        .env("TENTQMC_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(code(capped), 3);
}
