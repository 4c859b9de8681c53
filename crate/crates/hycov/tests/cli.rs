use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hycov::commands::{constants_of, cumulants_of, read_path_csv, ENGINE_TOLERANCE};
use hycov::Scenario;
use hycov_core::asymptotics::compute_c;
use hycov_core::CumulantReport;
use serde_json::{json, Value};
use tempfile::TempDir;

fn hycov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hycov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn constant_model(rho: f64) -> Value {
    json!({
        "horizon": 1.0,
        "sigma1": { "kind": "constant", "value": 1.0 },
        "sigma2": { "kind": "constant", "value": 1.0 },
        "rho": { "kind": "constant", "value": rho }
    })
}

fn poisson_scenario(n: u64, replicates: usize) -> Value {
    json!({
        "model": constant_model(0.5),
        "sampling": { "kind": "poisson", "n": n, "p1": 1.0, "p2": 2.0 },
        "seed": 11,
        "experiment": { "replicates": replicates, "densities": ["unconditional_star", "unconditional_plus"] }
    })
}

#[test]
fn simulate_writes_every_observation() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "s.json", &poisson_scenario(50, 10));
    let a = stdout(&hycov(&["simulate", "--scenario", s(&sc)]));
    let b = stdout(&hycov(&["simulate", "--scenario", s(&sc)]));
    assert_eq!(a, b);
    assert!(a.starts_with("time,series,value\n"));
    let scheme = Scenario::load(&sc)
        .unwrap()
        .experiment(None)
        .unwrap()
        .scheme(0)
        .unwrap();
    let rows = a.lines().count() - 1;
    assert_eq!(rows, scheme.pi1().len() + scheme.pi2().len() + 2);
    let path = read_path_csv(&a).unwrap();
    assert_eq!(path.times1, scheme.pi1().points());
    assert_eq!((path.values1[0], path.values2[0]), (0.0, 0.0));
    let c = stdout(&hycov(&["simulate", "--scenario", s(&sc), "--seed", "12"]));
    assert_ne!(a, c);
}

#[test]
fn estimate_on_a_written_path_matches_the_simulated_one() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "s.json", &poisson_scenario(80, 10));
    let csv = dir.path().join("path.csv");
    stdout(&hycov(&[
        "simulate",
        "--scenario",
        s(&sc),
        "--out",
        s(&csv),
    ]));
    let direct: Value =
        serde_json::from_str(&stdout(&hycov(&["estimate", "--scenario", s(&sc)]))).unwrap();
    let from_file: Value = serde_json::from_str(&stdout(&hycov(&[
        "estimate",
        "--scenario",
        s(&sc),
        "--input",
        s(&csv),
    ])))
    .unwrap();
    assert_eq!(direct, from_file);
    assert_eq!(direct["theta"], json!(0.5));
}

#[test]
fn cumulants_of_a_synchronous_perfectly_correlated_scheme() {
    let dir = TempDir::new().unwrap();
    let v = json!({
        "model": constant_model(1.0),
        "sampling": { "kind": "uniform", "n1": 4, "n2": 4 },
        "seed": 1,
        "experiment": { "b_n": 0.5 }
    });
    let sc = write(&dir, "s.json", &v);
    let out = stdout(&hycov(&["cumulants", "--scenario", s(&sc)]));
    let r: CumulantReport = serde_json::from_str(&out).unwrap();
    for mu2 in [r.mu2.trace.unwrap(), r.mu2.intervals, r.mu2.chains] {
        assert!((mu2 - 0.25).abs() < 1e-12, "{mu2}");
    }
    assert!((r.lambda_bar2 - 1.0).abs() < 1e-12);
    assert_eq!(r.b_n, 0.5);
    assert!(r.eigen_bound.unwrap().slack >= 0.0);
    assert!(r.max_engine_gap() <= ENGINE_TOLERANCE);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again, out);
    assert_eq!(
        r,
        cumulants_of(&Scenario::load(&sc).unwrap(), None).unwrap()
    );
}

#[test]
fn density_grids() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "s.json", &poisson_scenario(100, 10));
    let empty = stdout(&hycov(&[
        "density",
        "--scenario",
        s(&sc),
        "--grid",
        "-3:3:0",
    ]));
    assert_eq!(empty, "z,density,cdf\n");
    let out = stdout(&hycov(&[
        "density",
        "--scenario",
        s(&sc),
        "--variant",
        "unconditional_star",
        "--grid",
        "-3:3:7",
    ]));
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[3][0], 0.0);
    assert!(rows.windows(2).all(|w| w[1][2] >= w[0][2]));
    for bad in [
        vec!["--grid", "3:-3:5"],
        vec!["--grid", "a:b:c"],
        vec!["--variant", "nope"],
    ] {
        let mut args = vec!["density", "--scenario", s(&sc)];
        args.extend(bad);
        assert_eq!(hycov(&args).status.code(), Some(2));
    }
}

#[test]
fn constants_agree_with_the_direct_formula() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "s.json", &poisson_scenario(100, 10));
    let out: Value =
        serde_json::from_str(&stdout(&hycov(&["constants", "--scenario", s(&sc)]))).unwrap();
    let scenario = Scenario::load(&sc).unwrap();
    let c = compute_c(&scenario.model, 1.0, 2.0).unwrap();
    assert_eq!(out["constants"]["c"].as_f64().unwrap(), c);
    assert!((out["c_from_measures"].as_f64().unwrap() - c).abs() < 1e-10);
    assert_eq!(constants_of(&scenario).unwrap().constants.c, c);
}

#[test]
fn experiment_with_one_replicate() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "s.json", &poisson_scenario(50, 1));
    let out: Value =
        serde_json::from_str(&stdout(&hycov(&["experiment", "--scenario", s(&sc)]))).unwrap();
    assert_eq!(out["replicates"], json!(1));
    assert!(out["moments"]["se_mean"].is_null());
    let c = compute_c(&Scenario::load(&sc).unwrap().model, 1.0, 2.0).unwrap();
    assert_eq!(out["constants"]["c"].as_f64().unwrap(), c);
    assert_eq!(out["expected_variance"].as_f64().unwrap(), c);
}

#[test]
fn experiment_output_does_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let mut v = poisson_scenario(60, 400);
    v["output"] = json!({ "ecdf_csv": s(&dir.path().join("ecdf.csv")) });
    let sc = write(&dir, "s.json", &v);
    let one = stdout(&hycov(&[
        "experiment",
        "--scenario",
        s(&sc),
        "--threads",
        "1",
    ]));
    let ecdf = std::fs::read_to_string(dir.path().join("ecdf.csv")).unwrap();
    let four = stdout(&hycov(&[
        "experiment",
        "--scenario",
        s(&sc),
        "--threads",
        "4",
    ]));
    assert_eq!(one, four);
    assert_eq!(
        ecdf,
        std::fs::read_to_string(dir.path().join("ecdf.csv")).unwrap()
    );
    assert!(ecdf.starts_with("x,ecdf,gaussian_cdf,unconditional_star_cdf,unconditional_plus_cdf\n"));
    assert_eq!(ecdf.lines().count(), 401);
    let out_file = dir.path().join("report.json");
    stdout(&hycov(&[
        "experiment",
        "--scenario",
        s(&sc),
        "--out",
        s(&out_file),
    ]));
    assert_eq!(std::fs::read_to_string(out_file).unwrap(), one);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let mut v = poisson_scenario(50, 10);
    v["experiment"]["replicats"] = json!(5);
    let unknown = write(&dir, "unknown.json", &v);
    let o = hycov(&["experiment", "--scenario", s(&unknown)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("replicats"));

    let mut v = poisson_scenario(50, 10);
    v["model"]["rho"]["value"] = json!(1.5);
    assert_eq!(
        hycov(&["simulate", "--scenario", s(&write(&dir, "rho.json", &v))])
            .status
            .code(),
        Some(2)
    );

    let ok = write(&dir, "ok.json", &poisson_scenario(50, 10));
    assert_eq!(
        hycov(&["experiment", "--scenario", s(&ok), "--threads", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hycov(&[
            "simulate",
            "--scenario",
            s(&dir.path().join("missing.json"))
        ])
        .status
        .code(),
        Some(2)
    );

    let mut v = poisson_scenario(50, 10);
    v["sampling"] = json!({ "kind": "uniform", "n1": 5, "n2": 7 });
    assert_eq!(
        hycov(&["constants", "--scenario", s(&write(&dir, "u.json", &v))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn a_failed_lemma_check_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let mut v = poisson_scenario(50, 10);
    // the target is the large-rate limit; at rate 2 the mean is far from it
    v["lemmas"] = json!({
        "replicates": 20000,
        "experiments": [{ "lemma": "A5", "lambda": 2.0, "horizon": 1.0 }]
    });
    let sc = write(&dir, "s.json", &v);
    let o = hycov(&["validate-lemmas", "--scenario", s(&sc)]);
    assert_eq!(o.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report[0]["passed"], json!(false));
}
