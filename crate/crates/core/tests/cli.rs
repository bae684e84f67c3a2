use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn commeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commeq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(commeq(&["--help"]).status.code(), Some(0));
    assert_eq!(commeq(&["--version"]).status.code(), Some(0));
    assert_eq!(commeq(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(commeq(&["verify"]).status.code(), Some(1));
}

#[test]
fn verify_exit_code_follows_epsilon() {
    let ok = commeq(&[
        "verify",
        "--game",
        &fixture("comm_not_sfce.game.json"),
        "--dist",
        &fixture("comm_not_sfce.dist.json"),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(cert["class"], "comm");
    assert_eq!(cert["epsilon"], 0.0);

    let bad = commeq(&[
        "verify",
        "--game",
        &fixture("coarse_split.game.json"),
        "--dist",
        &fixture("coarse_split.sigma.json"),
        "--class",
        "anfcce",
    ]);
    assert_eq!(bad.status.code(), Some(4));
    let cert: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert!((cert["epsilon"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn representability_verdicts() {
    let no = commeq(&[
        "representable",
        "--game",
        &fixture("unrepresentable.game.json"),
        "--dist",
        &fixture("unrepresentable.dist.json"),
    ]);
    assert_ne!(no.status.code(), Some(0));
    assert!(stdout(&no).contains("infeasible"));

    let yes = commeq(&[
        "verify",
        "--class",
        "representable",
        "--game",
        &fixture("comm_not_sfce.game.json"),
        "--dist",
        &fixture("comm_not_sfce.dist.json"),
    ]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).contains("feasible"));
}

#[test]
fn missing_file_is_input_error() {
    let o = commeq(&[
        "verify",
        "--game",
        "/nonexistent/g.json",
        "--dist",
        &fixture("comm_not_sfce.dist.json"),
    ]);
    let code = o.status.code().unwrap();
    assert!(code != 0 && code != 4, "exit {code}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn adversary_reports_floor() {
    let o = commeq(&[
        "adversary",
        "-B",
        "2",
        "-T",
        "200",
        "--learner",
        "untruthful",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("floor_holds true"), "{s}");
    assert!(s.contains("regret_within_bound true"), "{s}");
    assert!(commeq(&["adversary", "-B", "3", "-T", "100"]).status.code() != Some(0));
}

fn simulate_into(dir: &Path, extra: &[&str]) -> Vec<(PathBuf, Vec<u8>)> {
    let game = fixture("first_price.game.json");
    let out = dir.display().to_string();
    let mut args = vec![
        "simulate",
        "--game",
        &game,
        "-T",
        "300",
        "--out-dir",
        &out,
        "--curve-every",
        "50",
        "--seed",
        "9",
    ];
    args.extend_from_slice(extra);
    let o = commeq(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    ["regret.csv", "equilibrium.json", "certificate.txt"]
        .iter()
        .map(|f| (PathBuf::from(f), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}

#[test]
fn simulate_writes_consistent_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let files = simulate_into(dir.path(), &[]);
    let csv = String::from_utf8(files[0].1.clone()).unwrap();
    assert!(csv.starts_with("t,player,external,typewise,untruthful,bound\n"));
    assert_eq!(csv.lines().count(), 1 + 6 * 2);
    let eq: serde_json::Value = serde_json::from_slice(&files[1].1).unwrap();
    let cert = eq["certificate"].as_f64().unwrap();
    let verified = eq["verified"]["epsilon"].as_f64().unwrap();
    assert!((cert - verified).abs() <= 1e-6, "{cert} vs {verified}");

    let o = commeq(&[
        "verify",
        "--game",
        &fixture("first_price.game.json"),
        "--dist",
        &dir.path().join("equilibrium.json").display().to_string(),
        "--tol",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn threads_do_not_change_bytes() {
    for extra in [&[][..], &["--reward", "sampled", "--eps", "0.2"][..]] {
        let (a, b, c) = (
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
        );
        let one = simulate_into(a.path(), extra);
        let again = simulate_into(b.path(), extra);
        let mut threaded = vec!["--threads", "4"];
        threaded.extend_from_slice(extra);
        let four = simulate_into(c.path(), &threaded);
        assert_eq!(one, again);
        assert_eq!(one, four);
    }
}

#[test]
fn poa_on_shipped_auction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = commeq(&[
        "simulate",
        "--game",
        &fixture("first_price.game.json"),
        "-T",
        "400",
        "--out-dir",
        &out,
        "--curve-every",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = commeq(&[
        "poa",
        "--game",
        &fixture("first_price.game.json"),
        "--dist",
        &dir.path().join("equilibrium.json").display().to_string(),
        "--spec",
        &fixture("first_price.spec.json"),
        "--tol",
        "0.5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["bound"], 0.5);
    assert_eq!(rep["bound_satisfied"], true);
}
