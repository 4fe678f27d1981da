use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bondsym(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bondsym"));
    cmd.args(args).env_remove("BONDSYM_SEED");
    if let Some(s) = env_seed {
        cmd.env("BONDSYM_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

const BSM: &str = "\
# Black-Scholes-Merton discounting
[params]
alpha = 0
beta = 0.05
gamma = 1
delta = 0.5
lambda = 0
rho = 0.3
source = beta*u

[terminal]
T = 1
payoff = 1

[grid]
nx = 101
nt = 101
x_min = 0.5
x_max = 2
";

#[test]
fn cases_lists_the_catalogue() {
    let out = bondsym(&["cases"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("T-GammaHalf") && text.contains("beta = 2/T"));
}

#[test]
fn catalog_suite_has_eight_passing_records() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(dir.path(), "report.jsonl");
    let out = bondsym(&["verify", "--suite", "catalog-residuals", "--out", &report], None);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = fs::read_to_string(&report)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 8);
    for v in &lines {
        for key in ["check", "case", "n", "max", "tol", "pass"] {
            assert!(v.get(key).is_some(), "{v}");
        }
        assert_eq!(v["pass"], true);
    }
    assert!(String::from_utf8(out.stdout).unwrap().contains("8 checks, 8 passed"));
}

#[test]
fn bsm_price_matches_discount_factor() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bsm.cfg");
    fs::write(&cfg, BSM).unwrap();
    let csv = path(dir.path(), "bsm.csv");
    let out = bondsym(&["price", "--config", &cfg, "--out", &csv], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert_eq!(rows.len(), 101 * 101);
    let start: Vec<&[f64; 3]> = rows.iter().filter(|r| r[1] == 0.0).collect();
    assert_eq!(start.len(), 101);
    for r in start {
        assert!((r[2] - (-0.05f64).exp()).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bsm.cfg");
    fs::write(&cfg, BSM).unwrap();
    let csv = path(dir.path(), "small.csv");
    let out = bondsym(&["price", "--config", &cfg, "--grid", "11,6", "--out", &csv], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 11 * 6);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bsm.cfg");
    fs::write(&cfg, BSM).unwrap();
    let run = |name: &str, args: &[&str]| {
        let p = path(dir.path(), name);
        let mut full = args.to_vec();
        full.extend(["--out", &p]);
        bondsym(&full, None);
        fs::read(&p).unwrap()
    };
    let verify = ["verify", "--suite", "derivatives,barrier", "--seed", "17"];
    assert_eq!(run("a.jsonl", &verify), run("b.jsonl", &verify));
    let price = ["price", "--config", &cfg];
    assert_eq!(run("a.csv", &price), run("b.csv", &price));
    let oracle = ["oracle", "--case", "T-GammaHalf", "--grid", "5,4"];
    let a = run("a-oracle.csv", &oracle);
    assert_eq!(a, run("b-oracle.csv", &oracle));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 20);
}

#[test]
fn seed_falls_back_to_environment() {
    let a = bondsym(&["verify", "--suite", "derivatives"], Some("5"));
    let b = bondsym(&["verify", "--suite", "derivatives", "--seed", "5"], None);
    let c = bondsym(&["verify", "--suite", "derivatives"], None);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    // failing checks
    let out = bondsym(&["verify", "--suite", "terminal", "--tol", "1e-300"], None);
    assert_eq!(out.status.code(), Some(1));
    // numerical failure: barrier leaves the grid
    let out = bondsym(&["price", "--case", "B-Generic", "--xrange", "0.7,2.5"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    // usage errors
    assert_eq!(bondsym(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(bondsym(&["verify", "--suite", "nope"], None).status.code(), Some(2));
    assert_eq!(bondsym(&["price", "--set", "grid.ny=3"], None).status.code(), Some(2));
    assert_eq!(bondsym(&["oracle"], None).status.code(), Some(2));
}

#[test]
fn transform_and_flow() {
    let out = bondsym(&["transform", "--case", "T-GammaOne"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("log map") && text.contains("image source:"));

    let out = bondsym(
        &[
            "flow",
            "--case",
            "T-GammaOne",
            "--set",
            "flow.frame=heat",
            "--set",
            "flow.generator=1",
            "--set",
            "flow.reconstruction=pullback",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(record["pass"], true);
}
