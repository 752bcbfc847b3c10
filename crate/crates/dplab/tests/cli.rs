use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dplab(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dplab"));
    cmd.args(args).env_remove("DPLAB_SEED").env_remove("DPLAB_MUTATE_THETA");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

struct Run {
    _tmp: tempfile::TempDir,
    out: PathBuf,
    output: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exit code")
    }

    fn report(&self) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out.join("report.json")).unwrap()).unwrap()
    }

    fn file(&self, name: &str) -> String {
        fs::read_to_string(self.out.join(name)).unwrap()
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }
}

fn run_with(command: &str, config: &str, extra: &[&str], env: &[(&str, &str)]) -> Run {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = tmp.path().join("out");
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = dplab(&args, env);
    Run { _tmp: tmp, out, output }
}

fn run(command: &str, config: &str) -> Run {
    run_with(command, config, &[], &[])
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn interval_threshold() {
    let r = run("threshold", r#"{"curve": {"kind": "interval", "length": 1}}"#);
    assert_eq!(r.code(), 0, "{:?}", r.output);
    let rep = r.report();
    let star = f(&rep["results"]["omega_star"]["value"]);
    assert!((star - 0.159_154_943_091_895_34).abs() < 1e-15, "{star}");
    assert!(rep["results"]["omega_star"]["tolerance"].is_null());
    assert_eq!(rep["results"]["omega_star"]["module"], "thresholds");
    assert!((f(&rep["results"]["bound_state_threshold"]["value"]) - PI / 2.0).abs() < 1e-15);
    for name in ["report.json", "pointwise_bound.csv", "timing.json"] {
        assert!(r.out.join(name).is_file(), "{name}");
    }
}

#[test]
fn arc_threshold_is_transported() {
    let r = run("threshold", r#"{"curve": {"kind": "arc", "radius": 1, "epsilon": 1.5707963267948966}}"#);
    assert_eq!(r.code(), 0, "{:?}", r.output);
    let rep = r.report();
    let star = f(&rep["results"]["omega_star"]["value"]);
    assert!((star - 0.039_788_735_772_973_836).abs() < 1e-10, "{star}");
    assert_eq!(rep["results"]["provenance"], "via_lft");
    assert!((f(&rep["results"]["sup_sqrt_jacobian"]["value"]) - 4.0).abs() < 1e-6);
}

#[test]
fn negative_length_is_a_config_error_and_writes_nothing() {
    let r = run("threshold", r#"{"curve": {"kind": "interval", "length": -1}}"#);
    assert_eq!(r.code(), 2);
    assert!(!r.out.exists());
    assert!(String::from_utf8_lossy(&r.output.stderr).contains("curve.length"));
}

#[test]
fn malformed_config_points_at_the_line() {
    let r = run("loop1d", "{\n  \"d\": 1,\n  \"omega\": 2,\n  \"colour\": 3\n}");
    assert_eq!(r.code(), 2);
    let err = String::from_utf8_lossy(&r.output.stderr).into_owned();
    assert!(err.contains("line 4"), "{err}");
    assert!(!r.out.exists());
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = dplab(&["threshold", "--config", "/nonexistent/dplab.json", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, r#"{"curve": {"kind": "interval", "length": 1}}"#).unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("out");
    let o = dplab(&["threshold", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn supercritical_loop() {
    let r = run_with("loop1d", r#"{"d": 1, "omega": 2}"#, &["--svg"], &[]);
    assert_eq!(r.code(), 0, "{:?}", r.output);
    let rep = r.report();
    let exact = rep["results"]["transcendental"].as_array().unwrap();
    assert_eq!(exact.len(), 1);
    assert!(f(&rep["results"]["fe_relative_error"]) < 1e-3);
    let kappa = f(&rep["results"]["kappa"]["value"]);
    // Θ(κ) = 1 with Θ(κ) = (2ω/κ) tanh(κd/2)
    assert!((4.0 / kappa * (kappa / 2.0).tanh() - 1.0).abs() < 1e-10);
    let svg = r.file("theta.svg");
    assert!(svg.starts_with("<svg") && svg.contains("version=\"1.1\"") && svg.contains("<circle"));
    let csv = r.file("eigenvalues.csv");
    assert!(csv.starts_with("method,index,eigenvalue\r\n"), "{csv}");
}

#[test]
fn marginal_loop_has_no_negative_eigenvalue() {
    let r = run("loop1d", r#"{"d": 6.283185307179586, "omega": 0.15915494309189535}"#);
    assert_eq!(r.code(), 0);
    let rep = r.report();
    assert!(rep["results"]["transcendental"].as_array().unwrap().is_empty());
    assert!(f(&rep["results"]["finite_element"][0]["value"]) >= -1e-8);
    assert!(r.stdout().contains("marginal"));
}

#[test]
fn decoupled_loop_reports_neumann_spectrum() {
    let r = run("loop1d", r#"{"d": 2, "omega": 0, "fe_count": 3}"#);
    assert_eq!(r.code(), 0);
    let rep = r.report();
    let fe: Vec<f64> = rep["results"]["finite_element"].as_array().unwrap().iter().map(|q| f(&q["value"])).collect();
    assert!(fe[0].abs() < 1e-8);
    assert!(((fe[1] - (PI / 2.0).powi(2)) / (PI / 2.0).powi(2)).abs() < 1e-3);
    assert!(r.stdout().contains("Neumann"));
}

const SMALL_BOX: &str = r#""box": [-1, 2, -1.5, 1.5], "h": 0.0625"#;

#[test]
fn solve2d_dichotomy_on_a_small_box() {
    let strong = run_with(
        "solve2d",
        &format!(r#"{{"curve": {{"kind": "interval", "length": 1}}, "omega": 2, {SMALL_BOX}}}"#),
        &["--svg"],
        &[],
    );
    assert_eq!(strong.code(), 0, "{:?}", strong.output);
    let rep = strong.report();
    assert_eq!(rep["results"]["verdict"], "negative_eigenvalue");
    assert_eq!(rep["results"]["closed_form_verdict"]["verdict"], "bound_state_exists");
    assert!(f(&rep["results"]["lambda1"]) < 0.0);
    assert_eq!(rep["results"]["eigenvalues"].as_array().unwrap().len(), 3);
    assert!(strong.file("ground_state.svg").contains("stroke-width=\"3\""));

    let weak = run("solve2d", &format!(r#"{{"curve": {{"kind": "interval", "length": 1}}, "omega": 0.1, {SMALL_BOX}}}"#));
    assert_eq!(weak.code(), 0);
    let rep = weak.report();
    assert_eq!(rep["results"]["verdict"], "no_negative_found");
    assert_eq!(rep["results"]["closed_form_verdict"]["verdict"], "provably_nonnegative");
}

#[test]
fn solve2d_on_an_arc_is_labelled() {
    let r = run(
        "solve2d",
        r#"{"curve": {"kind": "arc", "radius": 1, "epsilon": 1.5707963267948966, "samples": 257},
            "omega": 0.0397, "box": [-2.5, 2.5, -3, 2], "h": 0.125}"#,
    );
    assert_eq!(r.code(), 0, "{:?}", r.output);
    assert_eq!(r.report()["results"]["label"], "via LFT transport, eigenvalues not physical");
    assert!(r.stdout().contains("not physical"));
}

#[test]
fn solve2d_rejects_a_tilted_crack() {
    let r = run("solve2d", &format!(r#"{{"curve": {{"kind": "interval", "length": 1, "angle": 0.5}}, "omega": 1, {SMALL_BOX}}}"#));
    assert_eq!(r.code(), 2);
}

#[test]
fn lft_transport_report() {
    let r = run("lft", r#"{"curve": {"kind": "arc", "radius": 2, "epsilon": 1.0471975511965976}, "omega": 0.01}"#);
    assert_eq!(r.code(), 0, "{:?}", r.output);
    let rep = r.report();
    assert_eq!(rep["results"]["preimage_monotone"], true);
    let (g, l) = (f(&rep["results"]["interface_gamma"]), f(&rep["results"]["interface_lambda"]));
    assert!(((g - l) / l).abs() < 1e-4);
    let star = f(&rep["results"]["omega_star"]["value"]);
    assert!((star - (PI / 6.0).tan() / (16.0 * PI)).abs() < 1e-9);
    assert!(r.file("strength.csv").starts_with("s,x,y,omega_tilde\r\n"));
}

#[test]
fn critical_bracket_on_a_coarse_mesh() {
    let r = run("critical", r#"{"length": 1, "box": [-0.5, 1.5, -1, 1], "h": 0.0625, "tol_omega": 0.1}"#);
    assert_eq!(r.code(), 0, "{:?}", r.output);
    let rep = r.report();
    let (lo, hi) = (f(&rep["results"]["omega_lo"]["value"]), f(&rep["results"]["omega_hi"]["value"]));
    assert!(1.0 / (2.0 * PI) < lo && lo < hi && hi < PI / 2.0, "{lo} {hi}");
    assert!(hi - lo <= 0.1);
    assert!(r.file("samples.csv").lines().count() >= 3);
}

#[test]
fn reports_are_byte_stable() {
    let cases = [
        ("threshold", r#"{"curve": {"kind": "spiral", "slope": 1, "extent": 2}, "omega": 0.05}"#.to_string()),
        ("solve2d", format!(r#"{{"curve": {{"kind": "interval", "length": 1}}, "omega": 2, {SMALL_BOX}}}"#)),
    ];
    for (cmd, cfg) in cases {
        let a = run(cmd, &cfg);
        let b = run(cmd, &cfg);
        assert_eq!(a.code(), 0);
        assert_eq!(fs::read(a.out.join("report.json")).unwrap(), fs::read(b.out.join("report.json")).unwrap(), "{cmd}");
    }
}

#[test]
fn report_echoes_resolved_config() {
    let r = run("loop1d", r#"{"d": 1, "omega": 0.5}"#);
    let cfg = &r.report()["config"];
    assert_eq!(cfg["fe_cells"], 2048);
    assert_eq!(cfg["fe_count"], 2);
    assert_eq!(cfg["theta_points"], 400);
    assert!(cfg["seed"].is_u64());
}

#[test]
fn seed_environment_override() {
    let r = run_with("threshold", r#"{"curve": {"kind": "interval", "length": 1}, "seed": 7}"#, &[], &[("DPLAB_SEED", "42")]);
    assert_eq!(r.code(), 0);
    let rep = r.report();
    assert_eq!(rep["config"]["seed"], 42);
    assert_eq!(rep["provenance"]["seed"], 42);
    let bad = run_with("threshold", r#"{"curve": {"kind": "interval", "length": 1}}"#, &[], &[("DPLAB_SEED", "abc")]);
    assert_eq!(bad.code(), 2);
}

#[test]
fn verify_catches_a_perturbed_secular_function() {
    let cfg = r#"{"criteria": [2, 3]}"#;
    let clean = run("verify", cfg);
    assert_eq!(clean.code(), 0, "{}", clean.stdout());
    assert_eq!(clean.stdout().matches("[PASS]").count(), 2);
    let mutated = run_with("verify", cfg, &[], &[("DPLAB_MUTATE_THETA", "0.01")]);
    assert_ne!(mutated.code(), 0);
    assert_eq!(mutated.stdout().matches("[FAIL]").count(), 2);
    let rep = mutated.report();
    assert_eq!(rep["results"]["passed"], 0);
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/config.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn schema_matches_resolved_configs() {
    let s = schema();
    let cases = [
        ("threshold", "threshold", r#"{"curve": {"kind": "interval", "length": 1}}"#),
        ("loop1d", "loop1d", r#"{"d": 1, "omega": 0.5}"#),
        ("lft", "lft_command", r#"{"curve": {"kind": "arc", "radius": 1, "epsilon": 1}, "omega": 0.01}"#),
        ("verify", "verify", r#"{"criteria": [1]}"#),
    ];
    for (cmd, def, cfg) in cases {
        let r = run(cmd, cfg);
        assert_eq!(r.code(), 0, "{cmd}");
        let echoed = r.report()["config"].as_object().unwrap().clone();
        let props = s["$defs"][def]["properties"].as_object().unwrap();
        let mut a: Vec<&String> = echoed.keys().collect();
        let mut b: Vec<&String> = props.keys().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "{cmd}");
        for req in s["$defs"][def]["required"].as_array().map(Vec::as_slice).unwrap_or(&[]) {
            assert!(echoed.contains_key(req.as_str().unwrap()));
        }
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let text = fs::read_to_string(&path).unwrap();
        let ok = match name.split('_').next().unwrap() {
            "threshold" => dplab::config::parse::<dplab::config::ThresholdConfig>(&text, None).is_ok(),
            "loop1d" => dplab::config::parse::<dplab::config::Loop1dConfig>(&text, None).is_ok(),
            "lft" => dplab::config::parse::<dplab::config::LftConfig>(&text, None).is_ok(),
            "solve2d" => dplab::config::parse::<dplab::config::Solve2dConfig>(&text, None).is_ok(),
            "critical" => dplab::config::parse::<dplab::config::CriticalConfig>(&text, None).is_ok(),
            "verify" => dplab::config::parse::<dplab::config::VerifyConfig>(&text, None).is_ok(),
            other => panic!("unexpected config {other}"),
        };
        assert!(ok, "{name}");
        seen += 1;
    }
    assert!(seen >= 6);
}
