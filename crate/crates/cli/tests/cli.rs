use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn ftlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftlocal"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ftlocal(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = ftlocal(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn footer(csv: &str) -> BTreeMap<String, String> {
    csv.lines()
        .skip(1)
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let body: String = csv.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn csv_starts_with_version_stamp() {
    let out = ok(&["catalog"]);
    let first = out.lines().next().unwrap();
    assert_eq!(first, format!("# ftlocal {} schema 1 command catalog", env!("CARGO_PKG_VERSION")));
    assert_eq!(out.lines().nth(1).unwrap(), "routine,1,2,w1,w2,1m,p,total,time_steps");
    let f = footer(&out);
    assert_eq!(f["all checks passed"], "true");
    assert_eq!(f["elementary rectangle locations"], "514");
}

#[test]
fn runs_are_byte_identical() {
    let args = ["flow", "--preset", "fig3", "--fixed-point"];
    assert_eq!(ok(&args), ok(&args));
    let args = ["threshold", "--format", "json"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn fig3_starts_split_two_and_two() {
    let f = footer(&ok(&["flow", "--preset", "fig3"]));
    let classes: Vec<&str> = (0..4).map(|i| f[&format!("start {i} classification")].as_str()).collect();
    assert_eq!(classes, ["below", "below", "above", "above"]);
}

#[test]
fn fig4_and_fig5_reach_the_same_fixed_point() {
    let a = footer(&ok(&["flow", "--preset", "fig4"]));
    let b = footer(&ok(&["flow", "--preset", "fig5"]));
    let parse = |f: &BTreeMap<String, String>| -> Vec<f64> {
        f["fixed point"]
            .split_whitespace()
            .map(|kv| num(kv.split_once('=').unwrap().1))
            .collect()
    };
    let (pa, pb) = (parse(&a), parse(&b));
    for (x, y) in pa.iter().zip(&pb) {
        assert!((x / y - 1.0).abs() < 1e-4, "{pa:?} vs {pb:?}");
    }
    assert_eq!(a["fixed point unstable directions"], "1");
    let ratio = num(&a["fixed point gamma_2/gamma_1"]);
    assert!((ratio - 2.0).abs() < 0.3);
}

#[test]
fn zero_start_is_a_single_row_below() {
    let out = ok(&["flow", "--scale", "0"]);
    assert_eq!(rows(&out).len(), 1);
    let f = footer(&out);
    assert_eq!(f["start 0 classification"], "below");
    assert_eq!(f["start 0 levels"], "0");
}

#[test]
fn json_output_carries_schema() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["threshold", "--format", "json"])).unwrap();
    assert_eq!(v["tool"], "ftlocal");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "threshold");
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let t = v["rows"][0][cols.iter().position(|c| *c == "threshold").unwrap()].as_f64().unwrap();
    assert!(t > 3e-4 && t < 4e-4, "{t}");
}

#[test]
fn threshold_line_flags_out_of_bracket_cells() {
    let out = ok(&["threshold-line", "--gamma-w", "0,4e-5,9e-5"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 3);
    // gamma_w pseudothreshold does not exist on the gamma_w = 0 axis.
    assert!(rows[0][6].is_empty());
    assert!(rows[0][7].contains("pseudo_gamma_w"));
    assert!(rows[1][7].is_empty(), "{:?}", rows[1]);
    let t: Vec<f64> = rows.iter().filter(|r| !r[1].is_empty()).map(|r| num(&r[1])).collect();
    assert!(t.windows(2).all(|w| w[1] < w[0]));
    let f = footer(&out);
    assert!(num(&f["line fit slope"]) < 0.0);
}

#[test]
fn r_sweep_reports_a_negative_slope() {
    let out = ok(&["sweep", "--model", "local", "--variable", "r", "--grid", "10,20", "--tau", "2"]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    let (a, b) = (num(&rows[0][3]), num(&rows[1][3]));
    assert!(b < a);
    let slope = num(&footer(&out)["log-log slope"]);
    assert!((slope - (b / a).log2()).abs() < 1e-3);
}

#[test]
fn doubling_r_halves_gamma_crit() {
    let a = num(&footer(&ok(&["analytic", "--r", "20"]))["gamma_crit"]);
    let b = num(&footer(&ok(&["analytic", "--r", "40"]))["gamma_crit"]);
    assert!((a / b - 2.0).abs() < 1e-5);
}

#[test]
fn analytic_start_above_threshold_exits_2() {
    let (c, err) = code(&["analytic", "--r", "20", "--gamma0", "1e-5"]);
    assert_eq!(c, 2);
    assert!(err.contains("above analytic threshold"), "{err}");
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["threshold", "--seedless"][..],
        &["flow", "--preset", "nope"],
        &["flow", "--scale", "2"],
        &["threshold", "--bracket", "1e-2", "1e-7"],
        &["sweep", "--variable", "r", "--grid", "10,20"],
        &["threshold", "--workers", "0"],
    ] {
        let (c, err) = code(args);
        assert_eq!(c, 2, "{args:?}: {err}");
        assert!(err.starts_with("error: "));
    }
}

#[test]
fn numerical_failure_exits_3() {
    let (c, err) = code(&["fixed-point", "--guess", "0.01,0.01,0.01,0.01,0.01"]);
    assert_eq!(c, 3, "{err}");
}

#[test]
fn config_file_overrides_preset_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"scales": [1e-4, 2e-4], "geometry": {"r": 30}}"#).unwrap();
    let p = path.to_str().unwrap();
    let dumped = ok(&["flow", "--preset", "fig4", "--config", p, "--r", "40", "--dump-config"]);
    let v: serde_json::Value = serde_json::from_str(&dumped).unwrap();
    assert_eq!(v["scales"], serde_json::json!([1e-4, 2e-4]));
    assert_eq!(v["geometry"]["r"], 40);
    assert_eq!(v["ray"]["direction"], serde_json::json!([1.0, 4.0, 0.1, 2.0, 1.0]));
    // The dump is itself a valid config.
    std::fs::write(&path, &dumped).unwrap();
    assert_eq!(ok(&["flow", "--config", p, "--dump-config"]), dumped);

    std::fs::write(&path, r#"{"scales": [1e-4], "bogus": 1}"#).unwrap();
    assert_eq!(code(&["flow", "--config", p]).0, 2);
}

#[test]
fn plot_writes_script_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub").join("fig3.csv");
    ok(&["flow", "--preset", "fig3", "--out", out.to_str().unwrap(), "--plot"]);
    let script = std::fs::read_to_string(out.with_extension("gp")).unwrap();
    assert!(script.contains("fig3.dat"));
    let data = std::fs::read_to_string(out.with_extension("dat")).unwrap();
    assert_eq!(data.matches("\n\n\n").count(), 3);
    assert!(Path::new(&out).exists());
    assert_eq!(code(&["flow", "--plot"]).0, 2);
}
