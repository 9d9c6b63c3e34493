use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sturm-res"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let output = bin().arg(cmd).arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap();
    output.status.code().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| if c.is_empty() { f64::NAN } else { c.parse().unwrap() }).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn free_jost_grid_is_boundary_factor() {
    let tmp = TempDir::new().unwrap();
    let alpha = 0.6f64;
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{ "potential": {{ "family": "inverse_power", "c": 0.0, "a": 1.0, "gamma": 2.0 }}, "alpha": {alpha},
                 "jost": {{ "grid": {{ "re": [0.5, 2.0], "im": [-1.0, 1.0], "n_re": 3, "n_im": 3 }} }} }}"#
        ),
    );
    let out = tmp.path().join("out");
    assert_eq!(run("jost", &cfg, &out, &[]), 0);
    let rows = csv_rows(&out.join("jost.csv"));
    assert_eq!(rows.len(), 9);
    for r in rows {
        // cos a + i z sin a
        let (re, im) = (alpha.cos() - r[1] * alpha.sin(), r[0] * alpha.sin());
        assert!((r[2] - re).abs() < 1e-10 && (r[3] - im).abs() < 1e-10);
    }
}

#[test]
fn empty_jost_grid_writes_header_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{ "potential": { "family": "exp_sine", "a": 1.0 }, "jost": { "points": [] } }"#,
    );
    assert_eq!(run("jost", &cfg, tmp.path(), &[]), 0);
    assert_eq!(fs::read_to_string(tmp.path().join("jost.csv")).unwrap(), "re_z,im_z,re_Psi,im_Psi,tail_bound\n");
}

#[test]
fn failing_jost_point_keeps_partial_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{ "potential": { "family": "inverse_power", "c": 1.0, "a": 1.0, "gamma": 2.0 },
             "jost": { "points": [ { "re": 1.0, "im": -0.5 }, { "re": 0.0, "im": 0.0 } ] } }"#,
    );
    assert_eq!(run("jost", &cfg, tmp.path(), &[]), 3);
    assert_eq!(csv_rows(&tmp.path().join("jost.csv")).len(), 1);
    let meta = read_json(&tmp.path().join("metadata.json"));
    assert_eq!(meta["exit_code"], 3);
    assert_eq!(meta["issues"].as_array().unwrap().len(), 1);
}

#[test]
fn region_first_radius_and_certificate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{ "potential": { "family": "rational_product", "c": 1.0,
               "numerator": [ { "root": 1.0, "power": 1 } ],
               "denominator": [ { "kind": "linear", "a": 1.0, "power": 4 } ] },
             "region": { "thetas": [1e-6, 0.5, 1.0] } }"#,
    );
    assert_eq!(run("region", &cfg, tmp.path(), &[]), 0);
    let rows = csv_rows(&tmp.path().join("boundary.csv"));
    assert!((rows[0][1] - 0.25 / std::f64::consts::LN_2).abs() < 1e-4);
    let sector = read_json(&tmp.path().join("sector.json"));
    assert!(sector["sector"]["R1"].as_f64().unwrap() > 0.36);
    assert_eq!(sector["degenerate"], false);
}

#[test]
fn free_region_is_flagged_degenerate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{ "potential": { "family": "inverse_power", "c": 0.0, "a": 1.0, "gamma": 2.0 } }"#);
    assert_eq!(run("region", &cfg, tmp.path(), &[]), 0);
    assert!(csv_rows(&tmp.path().join("boundary.csv")).iter().all(|r| r[1] == 0.0));
    let sector = read_json(&tmp.path().join("sector.json"));
    assert_eq!(sector["degenerate"], true);
    assert_eq!(sector["sector"]["R1"], 0.0);
}

#[test]
fn table_resonance_and_scaled_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs_dir().join("rational_product.json");
    assert_eq!(run("resonance", &cfg, tmp.path(), &["--normalize-c"]), 0);
    let rows = csv_rows(&tmp.path().join("resonances.csv"));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 0.50).abs() < 0.01 && (rows[0][2] + 0.06).abs() < 0.01);
    let scaled = csv_rows(&tmp.path().join("resonances_scaled.csv"));
    assert!((scaled[0][1] * 35.0 - rows[0][1]).abs() < 1e-10);
    assert!(!csv_rows(&tmp.path().join("boundary_scaled.csv")).is_empty());
    let meta = read_json(&tmp.path().join("metadata.json"));
    assert_eq!(meta["phi"], 3.0);
    assert_eq!(meta["R"], 60.0);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn polished_seed_is_unchanged() {
    let tmp = TempDir::new().unwrap();
    let body = |re: f64, im: f64| {
        format!(
            r#"{{ "potential": {{ "family": "rational_product", "c": 10.0,
                   "numerator": [ {{ "root": 1.0, "power": 1 }} ],
                   "denominator": [ {{ "kind": "linear", "a": 1.0, "power": 4 }} ] }},
                 "scaling": {{ "phi": 3.0 }},
                 "resonance": {{ "seeds": [ {{ "re": {re:e}, "im": {im:e} }} ] }} }}"#
        )
    };
    let cfg = write_config(tmp.path(), &body(0.42, -0.55));
    assert_eq!(run("resonance", &cfg, tmp.path(), &[]), 0);
    let first = csv_rows(&tmp.path().join("resonances.csv"))[0].clone();
    let cfg = write_config(tmp.path(), &body(first[1], first[2]));
    assert_eq!(run("resonance", &cfg, tmp.path(), &[]), 0);
    let second = csv_rows(&tmp.path().join("resonances.csv"))[0].clone();
    assert!((first[1] - second[1]).abs() < 1e-9 && (first[2] - second[2]).abs() < 1e-9);
}

#[test]
fn empty_search_region() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{ "potential": { "family": "inverse_power_n", "c": -10.0, "a": 1.0, "n": 2, "gamma": 2.0 },
             "scaling": { "phi": 1.5 },
             "resonance": { "regions": [ { "shape": "annular_sector", "radius_range": [0.05, 10.0], "theta_range": [0.0, 1.48] } ] } }"#,
    );
    assert_eq!(run("resonance", &cfg, tmp.path(), &[]), 0);
    assert!(csv_rows(&tmp.path().join("resonances.csv")).is_empty());
}

#[test]
fn phi_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs_dir().join("rational_product.json");
    // the search box reaches theta = 1.19, beyond this scaling angle
    assert_eq!(run("resonance", &cfg, tmp.path(), &["--phi", "1.0"]), 2);
}

#[test]
fn track_reproduces_table_and_is_deterministic() {
    let cfg = configs_dir().join("rational_product.json");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(run("track", &cfg, a.path(), &[]), 0);
    assert_eq!(run("track", &cfg, b.path(), &[]), 0);
    let ta = fs::read(a.path().join("track.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("track.csv")).unwrap());
    let rows = csv_rows(&a.path().join("track.csv"));
    assert_eq!(rows.len(), 6);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 10.0);
    assert!((last[1] - 0.42).abs() < 0.02 && (last[2] + 0.55).abs() < 0.02);
}

#[test]
fn track_stopping_early_exits_with_partial_results() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs_dir().join("rational_product.json");
    let body = fs::read_to_string(cfg).unwrap().replace("[35.0, 30.0, 25.0, 20.0, 15.0, 10.0]", "[10.0, 6.0, 4.0, 2.0]");
    let body = body.replace(r#""seed": { "re": 0.5, "im": -0.06 }"#, r#""seed": { "re": 0.433, "im": -0.562 }"#);
    let cfg = write_config(tmp.path(), &body);
    assert_eq!(run("track", &cfg, tmp.path(), &["--phi", "1.2"]), 3);
    let rows = csv_rows(&tmp.path().join("track.csv"));
    assert!(!rows.is_empty() && rows.len() < 4);
}

#[test]
fn spectral_concentration() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs_dir().join("rational_product.json");
    assert_eq!(run("spectral", &cfg, tmp.path(), &[]), 0);
    let rows = csv_rows(&tmp.path().join("spectral.csv"));
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[1] > 0.0));
    let conc = read_json(&tmp.path().join("concentration.json"));
    let pts = conc["concentration"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert!((pts[0]["mu"].as_f64().unwrap() - 0.26).abs() < 0.05);
}

#[test]
fn free_spectral_has_no_concentration() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{ "potential": { "family": "inverse_power", "c": 0.0, "a": 1.0, "gamma": 2.0 },
             "spectral": { "mu_range": [0.01, 3.0], "grid_n": 30 } }"#,
    );
    assert_eq!(run("spectral", &cfg, tmp.path(), &["--alpha", "1.5707963267948966"]), 0);
    let conc = read_json(&tmp.path().join("concentration.json"));
    assert!(conc["concentration"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let bad = write_config(tmp.path(), r#"{ "potential": { "family": "nope" } }"#);
    assert_eq!(run("region", &bad, tmp.path(), &[]), 2);
    let no_section = configs_dir().join("conjugate_pair.json");
    assert_eq!(run("spectral", &no_section, tmp.path(), &[]), 2);
    assert_eq!(run("region", &tmp.path().join("missing.json"), tmp.path(), &[]), 2);
    assert_eq!(run("region", &no_section, tmp.path(), &["--alpha", "4.0"]), 2);
}

#[test]
fn unwritable_output_exits_four() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = configs_dir().join("conjugate_pair.json");
    assert_eq!(run("region", &cfg, &blocker.join("out"), &[]), 4);
}

#[test]
fn example_configs_parse() {
    let tmp = TempDir::new().unwrap();
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let out = tmp.path().join(path.file_stem().unwrap());
        assert_eq!(run("region", &path, &out, &["--tol", "1e-8"]), 0, "{}", path.display());
    }
}
