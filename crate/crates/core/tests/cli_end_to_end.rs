use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use boussinesq::bench::{frontier_from_rows, read_runs_csv, RUNS_HEADER};
use serde_json::Value;

fn boussinesq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boussinesq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn run_converges_and_writes_manifest_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = boussinesq(&[
        "run", "--case", "cavity", "--method", "picard-newton", "--ra", "10000", "--n", "8",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(listing(&out), ["manifest.json", "runs.csv"]);
    let rows = read_runs_csv(&out.join("runs.csv")).unwrap();
    assert_eq!(rows.last().unwrap().status, "converged");
    assert!(rows.last().unwrap().bnorm_residual < 1e-8);
    let m = manifest(&out);
    assert_eq!(m["command"], "run");
    assert_eq!(m["config"]["ra"], 10000.0);
    assert_eq!(m["config"]["max_iters"], 200);
    assert_eq!(m["case"]["mesh"]["triangles"], 384);
    assert!(m["case"]["boundary_conditions"].as_str().unwrap().contains("zero heat flux"));
    assert!(m["results"]["divergence_norm"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn newton_far_beyond_its_frontier_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let o = boussinesq(&[
        "run", "--method", "newton", "--ra", "1e12", "--n", "8",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rows = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    assert_eq!(rows.last().unwrap().status, "diverged");
    assert!(rows[..rows.len() - 1].iter().all(|r| r.status == "running"));
}

#[test]
fn usage_errors_exit_2() {
    let o = boussinesq(&["run", "--ra", "-5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--ra"));

    let o = boussinesq(&["run", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = boussinesq(&["run", "--method", "secant"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("picard-newton"));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("sub");
    let o = boussinesq(&["run", "--ra", "1000", "--n", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

/// CSV text with the `wall_ms` column blanked. Text comparison also treats
/// NaN rows of diverged runs as equal.
fn without_timing(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .map(|line| {
            let mut fields: Vec<&str> = line.split(',').collect();
            fields[8] = "";
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn sweep_is_reproducible_and_frontier_matches_rows() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_into = |name: &str| {
        let out = dir.path().join(name);
        let o = boussinesq(&[
            "sweep", "--method", "picard,newton,aa-picard-newton", "--depth", "1",
            "--ra-list", "1000,1e12", "--n", "4", "--max-iters", "30", "--jobs", "2",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = sweep_into("a");
    let b = sweep_into("b");
    assert_eq!(listing(&a), ["frontier.csv", "manifest.json", "runs.csv"]);
    assert_eq!(RUNS_HEADER[8], "wall_ms");
    let rows_a = read_runs_csv(&a.join("runs.csv")).unwrap();
    assert_eq!(without_timing(&a.join("runs.csv")), without_timing(&b.join("runs.csv")));
    assert_eq!(fs::read(a.join("frontier.csv")).unwrap(), fs::read(b.join("frontier.csv")).unwrap());

    let frontier = frontier_from_rows(&rows_a).unwrap();
    assert_eq!(frontier.len(), 3);
    for f in &frontier {
        assert_eq!(f.max_ra_converged, Some(1000.0), "{f:?}");
    }
    // depth is meaningful for Anderson only
    assert!(rows_a.iter().all(|r| (r.method == "aa-picard-newton") == (r.depth == 1)));
}

#[test]
fn mesh_info_reports_both_meshes() {
    let o = boussinesq(&["mesh-info", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["coarse_mesh"]["triangles"], 8);
    assert_eq!(v["coarse_mesh"]["vertices"], 9);
    assert_eq!(v["mesh"]["triangles"], 24);
    assert_eq!(v["mesh"]["vertices"], 17);
    assert_eq!(v["dofs"]["pressure"], 72);
}

#[test]
fn complex_case_from_a_mesh_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("long.txt");
    boussinesq::mesh::write_mesh(&boussinesq::mesh::generate_rectangle_mesh(7.0, 1.0, 14, 2).unwrap(), &path)
        .unwrap();
    let case = format!("complex:{}", path.display());
    let o = boussinesq(&["mesh-info", "--case", &case]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["coarse_mesh"]["triangles"], 56);
    assert!((v["mesh"]["area"].as_f64().unwrap() - 7.0).abs() < 1e-13);

    let o = boussinesq(&["mesh-info", "--case", "complex:/nonexistent/mesh.txt"]);
    assert_ne!(o.status.code(), Some(0));
}
