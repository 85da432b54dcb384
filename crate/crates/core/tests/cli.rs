use std::path::Path;
use std::process::{Command, Output};

use affmin::states::{bell_diagonal, random_state, werner, BipartiteState, CorrelationVector};
use serde_json::Value;

fn affmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affmin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn measure(state: &BipartiteState, dir: &Path, extra: &[&str]) -> Value {
    let path = dir.join("state.json");
    state.save(&path).unwrap();
    let mut args = vec!["measure", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = affmin(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn measure_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let bell = bell_diagonal(CorrelationVector::new(1.0, 1.0, -1.0).unwrap()).unwrap();
    let r = measure(&bell, dir.path(), &[]);
    assert!((r["n_affinity"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    // pure states go through the Schmidt formula first
    assert_eq!(r["n_affinity"]["method"], "pure-formula");
    assert!((r["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!((r["upper_bound"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((r["purity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn measure_mixed_two_qubit_uses_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let r = measure(&werner(2, -0.6).unwrap(), dir.path(), &["--alpha", "0.3"]);
    assert_eq!(r["n_affinity"]["method"], "closed-2xn");
    assert!(r["n_affinity"]["bloch_vector"].is_array());
    assert_eq!(r["alpha"].as_f64(), Some(0.3));
    let a = r["alpha_affinity"].as_f64().unwrap();
    assert!(a > 0.0 && a <= 1.0);
}

#[test]
fn measure_product_state_measures_vanish() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_state(1, 2, 2, 1).unwrap();
    let b = random_state(1, 3, 3, 2).unwrap();
    let prod = BipartiteState::product(a.matrix(), b.matrix()).unwrap();
    let r = measure(&prod, dir.path(), &[]);
    // the bound is only an upper bound; it need not vanish on product states
    assert!(r["upper_bound"].as_f64().unwrap() >= 0.0);
    assert!(r["n_affinity"]["value"].as_f64().unwrap() < 1e-9);
    assert!(r["n_hs"]["value"].as_f64().unwrap() < 1e-9);
    assert!(r["concurrence"].is_null());
}

#[test]
fn measure_random_2x3_respects_bound_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let rho = random_state(2, 3, 4, 5).unwrap();
    let r = measure(&rho, dir.path(), &["--seed", "3", "--starts", "8"]);
    let n = r["n_affinity"]["value"].as_f64().unwrap();
    assert!(n <= r["upper_bound"].as_f64().unwrap() + 1e-9);
    assert_eq!(r["spectrum_a"].as_array().unwrap().len(), 2);
    assert_eq!(r["spectrum_b"].as_array().unwrap().len(), 3);
    let again = measure(&rho, dir.path(), &["--seed", "3", "--starts", "8"]);
    assert_eq!(r, again);
}

#[test]
fn measure_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&affmin(&["measure", garbage.to_str().unwrap()])), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dimA":1,"dimB":2,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#,
    )
    .unwrap();
    let out = affmin(&["measure", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    let neg = dir.path().join("neg.json");
    std::fs::write(
        &neg,
        r#"{"dimA":1,"dimB":2,"matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#,
    )
    .unwrap();
    let out = affmin(&["measure", neg.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));

    let ok = dir.path().join("ok.json");
    werner(2, 0.0).unwrap().save(&ok).unwrap();
    assert_eq!(
        code(&affmin(&[
            "measure",
            ok.to_str().unwrap(),
            "--alpha",
            "1.5"
        ])),
        4
    );
    assert_eq!(code(&affmin(&["measure"])), 4);
}

#[test]
fn sweep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iso.csv");
    let run = |args: &[&str]| {
        let o = affmin(args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&[
        "sweep",
        "--family",
        "isotropic",
        "--m",
        "2",
        "--start",
        "0",
        "--end",
        "1",
        "--points",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("param,n_affinity,n_hs\n"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[2], "0.25,0,0");
    assert_eq!(lines[5], "1,0.5,0.5");

    let werner_csv = affmin(&[
        "sweep", "--family", "werner", "--m", "2", "--start", "-1", "--end", "1", "--points", "5",
    ]);
    let text = String::from_utf8(werner_csv.stdout).unwrap();
    assert!(text.lines().any(|l| l == "0.5,0,0"), "{text}");

    let line = affmin(&["sweep", "--family", "bell-diagonal-line", "--points", "4"]);
    let rows = csv_rows(&String::from_utf8(line.stdout).unwrap());
    assert_eq!(rows.len(), 4);
    assert!((rows[0][0] + 1.0 / 3.0).abs() < 1e-11);
    assert_eq!(rows[3], vec![1.0, 0.5, 0.5]);
}

#[test]
fn sweep_is_byte_deterministic_and_validates() {
    let args = ["sweep", "--family", "werner", "--m", "5", "--points", "37"];
    let a = affmin(&args);
    let b = affmin(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    for line in String::from_utf8(a.stdout).unwrap().lines().skip(1) {
        for field in line.split(',') {
            let digits = field
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 12, "{field}");
        }
    }
    assert_eq!(
        code(&affmin(&[
            "sweep",
            "--family",
            "isotropic",
            "--start",
            "-0.5"
        ])),
        4
    );
    assert_eq!(
        code(&affmin(&["sweep", "--family", "werner", "--points", "1"])),
        4
    );
    assert_eq!(code(&affmin(&["sweep", "--family", "nonsense"])), 4);
}

#[test]
fn dynamics_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gad.csv");
    let o = affmin(&[
        "dynamics",
        "--c0=1,1,-1",
        "--points",
        "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("gamma,n_affinity,n_hs,concurrence\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    let first_zero = rows.iter().find(|r| r[3] == 0.0).unwrap();
    assert!(
        first_zero[0] <= 0.59 && first_zero[0] >= 0.58,
        "{first_zero:?}"
    );
    assert!(first_zero[1] > 0.0);

    let zero = affmin(&["dynamics", "--c0", "0,0,0", "--points", "11"]);
    let rows = csv_rows(&String::from_utf8(zero.stdout).unwrap());
    assert!(rows.iter().all(|r| r[1..] == [0.0, 0.0, 0.0]));

    let half = affmin(&["dynamics", "--c0=0.5,0.5,-0.5"]);
    let rows = csv_rows(&String::from_utf8(half.stdout).unwrap());
    let death = rows.iter().position(|r| r[3] == 0.0).unwrap();
    assert!(rows[death..rows.len() - 1].iter().all(|r| r[1] > 0.0));

    assert_eq!(code(&affmin(&["dynamics", "--c0=1,1,1"])), 3);
    assert_eq!(code(&affmin(&["dynamics", "--c0=1,1"])), 4);
}

#[test]
fn verify_suites() {
    for suite in ["min-equivalences", "ancilla"] {
        let o = affmin(&["verify", suite, "--seed", "1"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    }
    assert_eq!(code(&affmin(&["verify", "no-such-suite"])), 4);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&affmin(&["--help"])), 0);
    assert_eq!(code(&affmin(&["--version"])), 0);
    assert_eq!(code(&affmin(&[])), 4);
}
