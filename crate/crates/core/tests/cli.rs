use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gallery(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("gallery").join(name)
}

fn dsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsurf")).args(args).output().expect("spawn dsurf")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn check_reports_general_type() {
    let o = dsurf(&["check", path(&gallery("s1.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = text(&o.stdout);
    assert!(out.contains("accepted: yes"), "{out}");
    assert!(out.contains("general type: yes"), "{out}");
    assert!(text(&o.stderr).contains("warning"), "uv boxes warn");

    let o = dsurf(&["check", path(&gallery("s3.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(text(&o.stdout).contains("general type: no (degenerate everywhere)"));
}

#[test]
fn check_rejects_non_entire_function() {
    let o = dsurf(&["check", path(&gallery("bad_tan.json"))]);
    assert_eq!(o.status.code(), Some(3));
    let err = text(&o.stderr);
    assert!(err.contains("tan") && err.contains("offset"), "{err}");
}

#[test]
fn check_missing_file_is_io_error() {
    let o = dsurf(&["check", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_rejects_non_minimal_spec() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("bad.json");
    // t^2 in every component is holomorphic but not isothermal
    std::fs::write(
        &spec,
        r#"{"name":"bad","n":3,"psi":["t^2","t^2","t"],"domain":{"a":[0.1,1],"b":[0.1,1]}}"#,
    )
    .unwrap();
    let o = dsurf(&["check", path(&spec)]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let s = std::fs::read_to_string(p).unwrap();
    assert!(!s.contains('\r'));
    let mut lines = s.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn invariants_s1_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s1.csv");
    let o = dsurf(&["invariants", path(&gallery("s1.json")), "--grid", "64x64", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("max |K_lap - K_biv|"));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header.join(","),
        "u,v,E,K_proj,K_biv,K_lap,class,nu,mu,kappa,gauss_residual"
    );
    assert_eq!(rows.len(), 64 * 64);
    for r in &rows {
        let v: f64 = r[1].parse().unwrap();
        let want = 1.0 / v.sin().powi(4);
        for col in [3, 4] {
            let k: f64 = r[col].parse().unwrap();
            assert!((k - want).abs() <= 1e-9 * want, "{k} vs {want}");
        }
    }
}

#[test]
fn invariants_s3_is_degenerate_and_flat() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s3.csv");
    let o = dsurf(&["invariants", path(&gallery("s3.json")), "--grid", "8x8", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&out);
    for r in rows {
        assert_eq!(r[6], "degenerate");
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
        assert!(r[7].is_empty(), "no hyperbola at degenerate points");
    }
}

#[test]
fn invariants_s2_positive_curvature() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s2.csv");
    let o = dsurf(&["invariants", path(&gallery("s2.json")), "--grid", "16x16", "--out", path(&out), "--exec", "sequential"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&out);
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn exec_modes_write_identical_csv() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (exec, p) in [("sequential", &a), ("parallel", &b)] {
        let o = dsurf(&["invariants", path(&gallery("s5.json")), "--grid", "20x12", "--out", path(p), "--exec", exec]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn canonize_s2_writes_report_and_grid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = dsurf(&["canonize", path(&gallery("s2.json")), "--base", "0,0.8", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let k = 2f64.powf(0.25);
    let bounds = &v["chart"]["derivative_bounds"]["minus"];
    for i in 0..2 {
        assert!((bounds[i].as_f64().unwrap() - k).abs() <= 1e-8);
    }
    assert!(v["chart"]["residual"].as_f64().unwrap() <= 1e-8);
    let (header, rows) = read_csv(&dir.path().join("c.grid.csv"));
    assert_eq!(header[..4], ["s_u", "s_v", "u", "v"]);
    assert!(header.ends_with(&["K".into(), "nu".into(), "mu".into(), "kappa".into()]));
    assert!(!rows.is_empty());
}

#[test]
fn canonize_s1_is_identity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = dsurf(&["canonize", path(&gallery("s1.json")), "--base", "0,1.5707963267948966", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for axis in ["minus", "plus"] {
        for i in 0..2 {
            let d = v["chart"]["derivative_bounds"][axis][i].as_f64().unwrap();
            assert!((d - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn canonize_s3_fails_with_degeneracy() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = dsurf(&["canonize", path(&gallery("s3.json")), "--base", "0,0", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(text(&o.stderr).contains("degenerate at all sampled points"));
    assert!(!out.exists());
}

fn family(spec: &str, op: &[&str], out: &Path) -> Output {
    let mut args = vec!["family", spec, "--op"];
    args.extend_from_slice(op);
    args.extend_from_slice(&["--out", path(out)]);
    dsurf(&args)
}

fn psi_of(p: &Path) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    v["psi"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn family_associated_zero_is_identity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.json");
    let o = family(path(&gallery("s1.json")), &["associated", "--theta", "0"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(psi_of(&out), ["t", "sin(t)", "-cos(t)"]);
}

#[test]
fn family_homothety_folds_scalar() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.json");
    let o = family(path(&gallery("s1.json")), &["homothety", "--k", "4"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(psi_of(&out), ["4*t", "4*sin(t)", "-4*cos(t)"]);
}

#[test]
fn family_conjugate_verifies_anti_isometry() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.json");
    let o = family(path(&gallery("s1.json")), &["conjugate"], &out);
    assert_eq!(o.status.code(), Some(0));
    let line = text(&o.stdout);
    assert!(line.contains("max|E_conj + E|") && line.contains("ok"), "{line}");
}

#[test]
fn family_outputs_round_trip_through_check() {
    let dir = TempDir::new().unwrap();
    let boost = gallery("boost.json");
    let ops: [&[&str]; 4] = [
        &["conjugate"],
        &["associated", "--theta", "-0.5"],
        &["homothety", "--k", "2.5"],
        &["motion", "--motion", path(&boost)],
    ];
    for (i, op) in ops.iter().enumerate() {
        let out = dir.path().join(format!("f{i}.json"));
        let o = family(path(&gallery("s1.json")), op, &out);
        assert_eq!(o.status.code(), Some(0), "{op:?}: {}", text(&o.stderr));
        let c = dsurf(&["check", path(&out)]);
        assert_eq!(c.status.code(), Some(0), "{op:?}");
        assert!(text(&c.stdout).contains("general type: yes"));
    }
}

#[test]
fn family_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.json");
    let o = family(path(&gallery("s1.json")), &["homothety", "--k", "-1"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = family(path(&gallery("s1.json")), &["associated"], &out);
    assert_eq!(o.status.code(), Some(2));
    // 4x4 motion on a 3-dimensional surface
    let o = family(path(&gallery("s1.json")), &["motion", "--motion", path(&gallery("boost4.json"))], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mesh_counts_and_planarity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.obj");
    let o = dsurf(&["mesh", path(&gallery("s1.json")), "--grid", "2x2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let s = std::fs::read_to_string(&out).unwrap();
    assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 4);
    assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 2);

    let o = dsurf(&["mesh", path(&gallery("s3.json")), "--grid", "5x4", "--project", "0,1,2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let s = std::fs::read_to_string(&out).unwrap();
    let verts: Vec<Vec<f64>> = s
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(verts.len(), 20);
    for v in verts {
        // vertices are (5u, 4u, 3v)
        assert!((4.0 * v[0] - 5.0 * v[1]).abs() <= 1e-12, "{v:?}");
    }
    let faces = s.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(faces, 2 * 4 * 3);
}

#[test]
fn mesh_rejects_degenerate_grid_and_bad_projection() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.obj");
    let o = dsurf(&["mesh", path(&gallery("s1.json")), "--grid", "1x5", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = dsurf(&["mesh", path(&gallery("s1.json")), "--grid", "3x3", "--project", "0,1,3", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
}
