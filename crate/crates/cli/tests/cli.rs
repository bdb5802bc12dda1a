use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn splitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitlab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_normal_forms_and_zero_checks() {
    let o = splitlab(&["eval", "Comm(K[1],K[2]) + i*J[3]", "--check-zero"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
    let o = splitlab(&["eval", "H*H - Dot(P,P)", "--mode", "massless"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "0"));
    let o = splitlab(&["eval", "Dot(P,K) - Dot(K,P) + 3*i*H", "--check-zero"]);
    assert_eq!(code(&o), 0);
    let o = splitlab(&["eval", "Comm(K[1],K[2])", "--check-zero"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).lines().next(), Some("-i*J[3]"));
    let o = splitlab(&["eval", "J - i*Cross(P, Q)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("1:16") && stderr(&o).contains("unknown identifier"), "{}", stderr(&o));
}

#[test]
fn symbolic_run_is_exact_and_fast() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json").display().to_string();
    let t = Instant::now();
    let o = splitlab(&["run", "--suite", "symbolic", "--json", &json]);
    assert!(t.elapsed().as_secs_f64() < 10.0);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(&json);
    assert_eq!(r["schema_version"], 1);
    assert!(r["timings"]["symbolic"].is_number());
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() > 40);
    for c in checks {
        assert_eq!(c["measured"], 0.0);
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        assert_eq!(c["pass"], true);
    }
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn chern_subcommand_reports_minus_two() {
    let o = splitlab(&["chern", "--helicity", "1", "--json", "-"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for c in checks {
        assert!((c["measured"].as_f64().unwrap() + 2.0).abs() < 0.05);
        assert_eq!(c["bound"]["target"], -2.0);
        assert_eq!(c["pass"], true);
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "suites = []\n");
    let o = splitlab(&["run", "--config", &empty]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("empty"), "{}", stderr(&o));
    let typo = write(dir.path(), "typo.toml", "seed = 1\n\n[grid]\nladdr = [[8, 24, 48]]\n");
    let o = splitlab(&["run", "--config", &typo]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 4") && stderr(&o).contains("laddr"), "{}", stderr(&o));
    let o = splitlab(&["run", "--suite", "nonsense"]);
    assert_eq!(code(&o), 2);
    let o = splitlab(&["run", "--suite", "algebra", "--grid", "8,24"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failures_and_runtime_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write(dir.path(), "strict.toml", "suites = [\"holonomy\"]\n[[rep]]\nkind = \"massive\"\nspin = 1\nmass = 1.0\n[tolerances]\nholonomy = 1e-9\n");
    let o = splitlab(&["run", "--config", &strict]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL holonomy/massive-s1-m1/loop-1/wigner"));
    let o = splitlab(&["holonomy", "--spin", "1", "--solid-angle", "20.0"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("error:"));
}

#[test]
fn normalized_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let json = dir.path().join(name).display().to_string();
        let o = splitlab(&["run", "--suite", "parser", "fplus", "--spin", "1", "--grid", "8,48,96", "--seed", "3", "--normalize", "--json", &json]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        std::fs::read(json).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    assert!(!String::from_utf8(a).unwrap().contains("timings"));
}

#[test]
fn convergence_csv_has_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "suites = [\"curvature\"]\n[[rep]]\nkind = \"massive\"\nspin = 0\nmass = 1.0\n[grid]\nladder = [[6, 16, 32], [8, 32, 64]]\n",
    );
    let o = splitlab(&["convergence", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,nr,nt,np,residual,order"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][0], pair[1][0]);
        assert_eq!(pair[0][1..4], ["6", "16", "32"]);
        assert_eq!(pair[0][5], "");
        assert!(pair[1][4].parse::<f64>().is_ok());
        assert!(pair[1][5].parse::<f64>().unwrap() >= 2.0, "{pair:?}");
    }
}
