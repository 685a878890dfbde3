use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn weyllab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyllab"))
        .args(args)
        .env_remove("WEYLLAB_OUT")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, cmd: &str, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    weyllab(&args)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text
        .lines()
        .rev()
        .find(|l| l.starts_with('{'))
        .expect("JSON error line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn manifest_lists_every_output_with_digest() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "winding", &["--set", "n=4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "winding");
    assert_eq!(m["parameters"]["n"], "4");
    assert!(m["parameters"].get("threads").is_none());
    assert!(m["artifact_version"].as_str().unwrap().starts_with("weyllab "));
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 5);
    let mut on_disk: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = outputs
        .iter()
        .map(|o| o["path"].as_str().unwrap().to_string())
        .collect();
    listed.sort();
    assert_eq!(listed, on_disk);
    for o in outputs {
        let bytes = fs::read(dir.path().join(o["path"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let out = run_in(
            dir.path(),
            "fermi-arc",
            &["--threads", threads, "--set", "arc_sizes=4,6"],
        );
        assert!(out.status.success());
    }
    for name in ["fermi_arc.json", "fermi_arc_spectra.csv", "manifest.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn table_matches_known_arc_ends() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "table1", &[]);
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("table1.csv"));
    let expected = [(4, 0.2), (6, 0.3), (8, 0.35), (12, 0.4), (20, 0.45), (36, 0.48)];
    assert_eq!(rows.len(), expected.len());
    for (row, (n, t)) in rows.iter().zip(expected) {
        assert_eq!(row[0], n.to_string());
        let got: f64 = row[1].parse().unwrap();
        assert!((got / PI - t).abs() <= 0.02 + 1e-9, "N={n}: {}", got / PI);
    }
}

#[test]
fn table_size_overrides() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), "table1", &["--set", "table_sizes=8"])
        .status
        .success());
    let rows = read_csv(&dir.path().join("table1.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "8");

    assert!(run_in(dir.path(), "table1", &["--set", "table_sizes=1"])
        .status
        .success());
    assert_eq!(
        read_csv(&dir.path().join("table1.csv")),
        vec![vec!["1".to_string(), String::new()]]
    );
}

#[test]
fn fermi_arc_defaults() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), "fermi-arc", &[]).status.success());
    let arcs = read_json(&dir.path().join("fermi_arc.json"))["arcs"].clone();
    let ends: Vec<f64> = arcs
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["theta1c"][1].as_f64().unwrap() / PI)
        .collect();
    assert!(
        (ends[0] - 0.2).abs() <= 0.02 + 1e-9 && (ends[1] - 0.4).abs() <= 0.02 + 1e-9,
        "{ends:?}"
    );
    for a in arcs.as_array().unwrap() {
        assert_eq!(a["theta1c"][0].as_f64().unwrap(), -a["theta1c"][1].as_f64().unwrap());
    }
}

#[test]
fn bulk_bands_touch_only_at_the_nodes() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), "bulk-bands", &[]).status.success());
    let rows = read_csv(&dir.path().join("bulk_bands.csv"));
    assert_eq!(rows.len(), 101 * 101);
    let mut touching = Vec::new();
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        if v[3] - v[2] < 1e-12 {
            touching.push(((v[0] / PI * 2.0).round() as i32, (v[1] / PI * 2.0).round() as i32));
        }
    }
    touching.sort();
    assert_eq!(touching, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);

    assert!(run_in(dir.path(), "bulk-bands", &["--set", "kx=0", "--set", "grid=21"])
        .status
        .success());
    for r in read_csv(&dir.path().join("bulk_bands.csv")) {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        // hx = 2J at kx = 0, so the splitting never drops below 4J.
        assert!(v[3] - v[2] >= 4.0 - 1e-12);
    }
}

#[test]
fn chern_charges_and_radius_override() {
    let dir = TempDir::new().unwrap();
    let charges = |extra: &[&str]| {
        assert!(run_in(dir.path(), "chern", extra).status.success());
        let v = read_json(&dir.path().join("chern.json"));
        assert_eq!(v["sum"], 0);
        assert_eq!(v["methods_agree"], true);
        v["charges"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["sphere"]["value"].as_i64().unwrap())
            .collect::<Vec<_>>()
    };
    let base = charges(&[]);
    assert_eq!(base, vec![-1, 1, -1, 1]);
    assert_eq!(charges(&["--set", "radius=0.4"]), base);
}

#[test]
fn degenerate_model_is_a_structured_numerical_error() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "chern", &["--set", "je=0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "degenerate_model");
    assert_eq!(err["exit_code"], 3);
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for extra in [
        &["--set", "nonsense=1"][..],
        &["--set", "n"],
        &["--set", "kappa=-1"],
        &["--set", "grid=0"],
    ] {
        let out = run_in(dir.path(), "bulk-bands", extra);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
        assert_eq!(stderr_json(&out)["exit_code"], 2);
    }
    assert_eq!(weyllab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        run_in(dir.path(), "bulk-bands", &["--config", "/does/not/exist"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn method_disagreement_exits_with_four_and_keeps_outputs() {
    // Strong damping broadens the edge peak past the arc end.
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "table1", &["--set", "kappa=0.7", "--set", "table_sizes=4"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "oracle_inconsistency");
    assert!(dir.path().join("table1.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn config_file_then_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# chain\nn = 6\nkappa = 0.2\ntheta2 = -0.5pi\n").unwrap();
    let out = weyllab(&["show-config", "--config", cfg.to_str().unwrap(), "--set", "n=8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\nn = 8\n") && text.contains("\nkappa = 0.2\n") && text.contains("\ntheta2 = -0.5pi\n"));

    fs::write(&cfg, "n 6\n").unwrap();
    assert_eq!(
        weyllab(&["show-config", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_weyllab"))
        .args(["weyl-points"])
        .env("WEYLLAB_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = read_json(&target.join("weyl_points.json"));
    let chir: Vec<i64> = v["weyl_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["chirality"].as_i64().unwrap())
        .collect();
    assert_eq!(chir, vec![-1, 1, -1, 1]);
}

#[test]
fn edge_and_density_commands() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        "edge-spectrum",
        &["--set", "edge_points=5", "--set", "edge_densities=true"],
    );
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("edge_spectrum.csv"));
    assert_eq!(rows.len(), 5 * 5 * 20);
    assert!(rows.iter().all(|r| ["L", "R", "B"].contains(&r[4].as_str())));
    assert_eq!(read_csv(&dir.path().join("edge_density.csv")).len(), 5 * 5 * 20 * 20);

    assert!(run_in(dir.path(), "density", &[]).status.success());
    let rows = read_csv(&dir.path().join("density.csv"));
    let zero: Vec<&Vec<String>> = rows
        .iter()
        .filter(|r| r[3] == "1" && r[1].parse::<f64>().unwrap().abs() < 0.02)
        .collect();
    let mut labels: Vec<&str> = zero.iter().map(|r| r[2].as_str()).collect();
    labels.sort();
    assert_eq!(labels, vec!["L", "R"]);
}

#[test]
fn reflection_and_berry_field_files() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), "reflection", &["--set", "n=1", "--set", "je=0"])
        .status
        .success());
    let rows = read_csv(&dir.path().join("reflection.csv"));
    assert_eq!(rows.len(), 201);
    for r in rows {
        let refl: f64 = r[3].parse().unwrap();
        assert!((refl - 1.0).abs() < 1e-12);
    }

    let out = run_in(
        dir.path(),
        "berry-field",
        &["--set", "weyl=W2", "--set", "field_points=3"],
    );
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("berry_field.csv"));
    assert_eq!(rows.len(), 26);
    assert!(rows.iter().all(|r| r[0] == "W2"));
}
