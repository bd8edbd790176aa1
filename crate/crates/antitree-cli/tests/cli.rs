use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_antitree"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("antitree-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const STAR3: &str = "4 3\n0 1\n0 2\n0 3\n";
const PATH2: &str = "3 2\n0 1\n2 1\n";

#[test]
fn gen_then_embed_exit_codes() {
    let dir = Scratch::new("embed");
    let burr = dir.path("burr.txt");
    let o = run(&["gen", "burr", "--k", "3", "--out", s(&burr)]);
    assert_eq!(code(&o), 0);
    let star = dir.file("star.txt", STAR3);
    // Exactly (k-1)n arcs: certified refusal.
    let o = run(&["embed", "--tree", s(&star), "--host", s(&burr)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let o = run(&["--json", "embed", "--tree", s(&star), "--host", s(&burr), "--force-oracle"]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failure"]["kind"], "refusal");
    assert_eq!(v["oracle"]["verdict"], "NotContained");

    let host = dir.path("host.txt");
    assert_eq!(code(&run(&["--seed", "5", "gen", "random", "--n", "8", "--k", "3", "--out", s(&host)])), 0);
    let trace = dir.path("trace.json");
    let o = run(&["embed", "--tree", s(&star), "--host", s(&host), "--trace", s(&trace)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["case"]["branch"], "Caterpillar");
}

#[test]
fn embed_cat_and_good_arcs() {
    let dir = Scratch::new("cat");
    let host = dir.file("c4.txt", "4 5\n0 1\n0 3\n2 1\n2 3\n1 0\n");
    let tree = dir.file("p.txt", PATH2);
    let o = run(&["--json", "embed-cat", "--tree", s(&tree), "--host", s(&host)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["embedding"].as_array().unwrap().len(), 3);
    let o = run(&["--json", "good-arcs", "--tree", s(&tree), "--host", s(&host), "--order", "random:3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let good = v["good"].as_array().unwrap();
    // At least a(D) - (k-1)n = 1 good arc.
    let a = &good[0];
    let arc = format!("{},{}", a[0], a[1]);
    let o = run(&["--json", "good-arcs", "--tree", s(&tree), "--host", s(&host), "--order", "random:3", "--witness", &arc]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"].as_array().unwrap().len(), 3);
    let o = run(&["good-arcs", "--tree", s(&tree), "--host", s(&host), "--order", "sideways"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn check_free_and_select() {
    let dir = Scratch::new("free");
    let fano = dir.path("fano.txt");
    assert_eq!(code(&run(&["gen", "incidence", "--q", "2", "--out", s(&fano)])), 0);
    assert_eq!(code(&run(&["check-free", "--host", s(&fano), "--s", "2"])), 0);
    let o = run(&["check-free", "--host", s(&fano), "--s", "1"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free"], false);
    assert_eq!(v["witness"]["common"].as_array().unwrap().len(), 1);

    let host = dir.path("dense.txt");
    assert_eq!(code(&run(&["gen", "random", "--n", "10", "--k", "4", "--out", s(&host)])), 0);
    let o = run(&["--json", "select", "--host", s(&host), "--k", "4", "--r", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["case"].is_string());
    assert!(v["subdigraph"]["arcs"].as_array().unwrap().len() > 0);
}

#[test]
fn oracle_verdicts() {
    let dir = Scratch::new("oracle");
    let burr = dir.path("burr.txt");
    run(&["gen", "burr", "--k", "3", "--out", s(&burr)]);
    let star = dir.file("star.txt", STAR3);
    let path = dir.file("path.txt", PATH2);
    assert_eq!(code(&run(&["oracle", "--tree", s(&star), "--host", s(&burr)])), 1);
    assert_eq!(code(&run(&["oracle", "--tree", s(&path), "--host", s(&burr)])), 0);
    assert_eq!(code(&run(&["oracle", "--tree", s(&path), "--host", s(&burr), "--budget", "0"])), 3);
}

#[test]
fn gen_outputs_arc_lists() {
    let o = run(&["gen", "burr", "--k", "2"]);
    assert!(stdout(&o).starts_with("4 4\n"));
    let o = run(&["--json", "gen", "incidence", "--q", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 14);
    assert_eq!(v["arcs"].as_array().unwrap().len(), 21);
    assert_ne!(code(&run(&["gen", "incidence", "--q", "6"])), 0);
    let o = run(&["--seed", "9", "gen", "tree", "--k", "5"]);
    assert!(stdout(&o).starts_with("6 5\n"));
}

#[test]
fn sweep_writes_a_replayable_report() {
    let dir = Scratch::new("sweep");
    let report = dir.path("burr.json");
    let o = run(&["sweep", "--suite", "burr-tightness", "--k-max", "4", "--output", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("[PASS] criterion 5 burr-tightness"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["verdicts"].as_str().unwrap().len(), v["instances"].as_u64().unwrap() as usize);

    let o = run(&["--jobs", "2", "sweep", "--suite", "prop3-exhaustive", "--n-max", "3", "--k-max", "2"]);
    assert_eq!(code(&o), 0);

    let cfg = dir.file("cfg.json", r#"{"suite": "reversal", "samples": 20, "n_max": 8}"#);
    let o = run(&["--json", "sweep", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["instances"], 20);
}

#[test]
fn malformed_sweeps_are_rejected() {
    let o = run(&["sweep", "--suite", "no-such-suite"]);
    assert_ne!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
    let o = run(&["sweep", "--suite", "prop3-exhaustive", "--n-max", "9"]);
    assert_ne!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let o = run(&["sweep", "--suite", "theorem2-pg25", "--q", "23"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn sweep_failures_exit_nonzero() {
    // The k ≤ 3 DP-versus-brute-force comparison finds incomplete DP sets.
    let dir = Scratch::new("ga");
    let report = dir.path("ga.json");
    let o = run(&["sweep", "--suite", "good-arcs", "--samples", "2000", "--output", s(&report)]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(code(&o) == 0, v["passed"] == true);
    for row in v["rows"].as_array().unwrap() {
        assert!(row["host"]["arcs"].is_array());
        assert!(row["tree"]["arcs"].is_array());
    }
}

#[test]
fn bad_input_files() {
    let dir = Scratch::new("bad");
    let bad = dir.file("bad.txt", "3 2\n0 1\n");
    let tree = dir.file("p.txt", PATH2);
    let o = run(&["embed", "--tree", s(&tree), "--host", s(&bad)]);
    assert_eq!(code(&o), 64);
    let dipath = dir.file("dipath.txt", "3 2\n0 1\n1 2\n");
    let o = run(&["embed", "--tree", s(&dipath), "--host", s(&tree)]);
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not an antidirected tree"));
}
