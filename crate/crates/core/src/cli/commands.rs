use std::path::{Path, PathBuf};

use serde::Serialize;

use super::output::{canonical_json, csv_row, fmt_f64, fmt_opt, obj, write_file};
use super::spec::{DomainSpec, SurfaceSpec};
use super::{CliError, Report};
use crate::canon::{self, CanonReport, CanonicalChart};
use crate::dnum::DNum;
use crate::exec::Exec;
use crate::family::{self, Construction, Motion};
use crate::geom::{FdConfig, Validation};

const SWEEP_HEADER: &str = "u,v,E,K_proj,K_biv,K_lap,class,nu,mu,kappa,gauss_residual";

fn general_type_line(v: &Validation) -> String {
    if v.general_type() {
        "general type: yes".to_string()
    } else if v.degenerate == v.points() {
        "general type: no (degenerate everywhere)".to_string()
    } else {
        format!("general type: no ({} of {} sampled points degenerate)", v.degenerate, v.points())
    }
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    surface: &'a str,
    accepted: bool,
    general_type: bool,
    validation: &'a Validation,
}

/// Validates a spec and summarizes the classification.
pub fn cmd_check(spec: &Path, json_out: Option<&Path>) -> Result<Report, CliError> {
    let loaded = SurfaceSpec::read(spec)?.load()?;
    let v = loaded.surface.validation();
    let mut r = Report { stderr: loaded.warnings.clone(), ..Report::default() };
    r.stdout = vec![
        format!("surface: {}", loaded.spec.name),
        "accepted: yes".to_string(),
        format!("isothermal residual: {}", fmt_f64(v.isothermal_residual)),
        format!("max ||Psi'||^2: {}", fmt_f64(v.max_normsq)),
        format!("holomorphy residual: {}", fmt_f64(v.cr_residual)),
        format!(
            "classes: degenerate={} superconformal={} generic={}",
            v.degenerate, v.superconformal, v.generic
        ),
        general_type_line(v),
    ];
    if let Some(path) = json_out {
        let out = CheckOutput {
            surface: &loaded.spec.name,
            accepted: true,
            general_type: v.general_type(),
            validation: v,
        };
        write_file(path, &canonical_json(&out)?)?;
    }
    Ok(r)
}

pub struct InvariantsArgs {
    pub spec: PathBuf,
    pub grid: (usize, usize),
    pub out: PathBuf,
    pub exec: Exec,
    pub fd: FdConfig,
}

/// Writes the invariant sweep as CSV.
pub fn cmd_invariants(args: &InvariantsArgs) -> Result<Report, CliError> {
    let loaded = SurfaceSpec::read(&args.spec)?.load()?;
    let (w, h) = args.grid;
    let rows = loaded.surface.sweep(w, h, args.exec, args.fd)?;
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    let (mut d_proj, mut d_lap, mut gauss): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for row in &rows {
        d_proj = d_proj.max((row.k_proj - row.k_biv).abs());
        d_lap = d_lap.max((row.k_lap - row.k_biv).abs());
        gauss = gauss.max(row.gauss_residual.abs());
        text.push_str(&csv_row(&[
            fmt_f64(row.u),
            fmt_f64(row.v),
            fmt_f64(row.e),
            fmt_f64(row.k_proj),
            fmt_f64(row.k_biv),
            fmt_f64(row.k_lap),
            row.class.to_string(),
            fmt_opt(row.nu),
            fmt_opt(row.mu),
            fmt_opt(row.kappa),
            fmt_f64(row.gauss_residual),
        ]));
    }
    write_file(&args.out, &text)?;
    Ok(Report {
        stdout: vec![format!(
            "rows: {}; max |K_proj - K_biv| = {}; max |K_lap - K_biv| = {}; max |gauss residual| = {}",
            rows.len(),
            fmt_f64(d_proj),
            fmt_f64(d_lap),
            fmt_f64(gauss)
        )],
        stderr: loaded.warnings,
        exit_code: 0,
    })
}

pub struct CanonizeArgs {
    pub spec: PathBuf,
    pub base: DNum,
    pub out: PathBuf,
    pub reference_base: Option<DNum>,
    pub grid: usize,
}

#[derive(Serialize)]
struct CanonOutput<'a> {
    surface: &'a str,
    chart: &'a CanonReport,
    grid_csv: String,
}

fn sibling_csv(out: &Path) -> PathBuf {
    out.with_extension("grid.csv")
}

fn canonical_grid_csv(
    s: &crate::geom::SurfacePatch,
    chart: &CanonicalChart,
    g: usize,
) -> Result<String, CliError> {
    let ts = canon::chart_grid(s, chart, g, g);
    let ss = ts.iter().map(|&t| chart.forward(t)).collect::<Result<Vec<_>, _>>()?;
    let (mut u0, mut u1, mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in &ss {
        u0 = u0.min(s.re);
        u1 = u1.max(s.re);
        v0 = v0.min(s.im);
        v1 = v1.max(s.im);
    }
    let n = s.dim();
    let mut header = vec!["s_u".to_string(), "s_v".to_string(), "u".to_string(), "v".to_string()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.extend(["K", "nu", "mu", "kappa"].map(String::from));
    let mut text = csv_row(&header);
    for k in 0..g {
        for i in 0..g {
            let sv = DNum::new(
                u0 + (u1 - u0) * (i as f64 + 0.5) / g as f64,
                v0 + (v1 - v0) * (k as f64 + 0.5) / g as f64,
            );
            let Ok(t) = chart.inverse(sv) else { continue };
            if !s.domain().contains(t) || !chart.range().contains(t) {
                continue;
            }
            let p = s.point_data(t)?;
            let hyp = s.hyperbola_at(sv, chart)?;
            let mut row = vec![fmt_f64(sv.re), fmt_f64(sv.im), fmt_f64(t.re), fmt_f64(t.im)];
            row.extend(p.x.iter().map(|&x| fmt_f64(x)));
            row.extend([fmt_f64(p.k), fmt_f64(hyp.nu), fmt_f64(hyp.mu), fmt_f64(hyp.kappa)]);
            text.push_str(&csv_row(&row));
        }
    }
    Ok(text)
}

/// Builds canonical coordinates and writes the report plus a canonical-grid CSV.
pub fn cmd_canonize(args: &CanonizeArgs) -> Result<Report, CliError> {
    let loaded = SurfaceSpec::read(&args.spec)?.load()?;
    let s = &loaded.surface;
    let chart = canon::canonize(s, args.base)?;
    let reference = match args.reference_base {
        Some(b) => Some(canon::canonize(s, b)?),
        None => None,
    };
    let report = canon::report(s, &chart, args.grid, reference.as_ref())?;
    let csv_path = sibling_csv(&args.out);
    let out = CanonOutput {
        surface: &loaded.spec.name,
        chart: &report,
        grid_csv: csv_path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    write_file(&args.out, &canonical_json(&out)?)?;
    write_file(&csv_path, &canonical_grid_csv(s, &chart, args.grid)?)?;
    let mut stdout = vec![
        format!("surface: {}", loaded.spec.name),
        format!("verify residual: {}", fmt_f64(report.residual)),
        format!(
            "derivative bounds: minus [{}, {}], plus [{}, {}]",
            fmt_f64(report.derivative_bounds.minus.0),
            fmt_f64(report.derivative_bounds.minus.1),
            fmt_f64(report.derivative_bounds.plus.0),
            fmt_f64(report.derivative_bounds.plus.1)
        ),
    ];
    if let Some(rel) = &report.relation {
        stdout.push(format!(
            "relation: sign={} conjugated={} c={} residual={}",
            rel.sign,
            rel.conjugated,
            rel.c,
            fmt_f64(rel.residual)
        ));
    }
    Ok(Report { stdout, stderr: loaded.warnings, exit_code: 0 })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyOp {
    Conjugate,
    Associated { theta: f64 },
    Homothety { k: f64 },
    Motion { path: PathBuf },
}

pub struct FamilyArgs {
    pub spec: PathBuf,
    pub op: FamilyOp,
    pub out: PathBuf,
    pub grid: usize,
}

/// Writes the derived spec and checks the metric law of the construction.
pub fn cmd_family(args: &FamilyArgs) -> Result<Report, CliError> {
    let loaded = SurfaceSpec::read(&args.spec)?.load()?;
    let (construction, suffix) = match &args.op {
        FamilyOp::Conjugate => (Construction::Conjugate, "conjugate"),
        FamilyOp::Associated { theta } => (Construction::Associated(*theta), "associated"),
        FamilyOp::Homothety { k } => (Construction::Homothety(*k), "homothety"),
        FamilyOp::Motion { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let m: Motion = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("motion: {e}")))?;
            m.validate()?;
            (Construction::Motion(m), "motion")
        }
    };
    let exprs = family::construct_exprs(&loaded.exprs, &construction)?;
    let derived = family::apply(&loaded.surface, &construction)?;
    let psi = exprs
        .iter()
        .zip(&loaded.exprs)
        .zip(&loaded.spec.psi)
        .map(|((new, old), text)| if new == old { text.clone() } else { new.to_string() })
        .collect();
    let spec = SurfaceSpec {
        name: format!("{}-{}", loaded.spec.name, suffix),
        n: exprs.len(),
        psi,
        domain: DomainSpec::from_domain(derived.domain()),
    };
    write_file(&args.out, &canonical_json(&spec)?)?;
    let check = family::verify(&loaded.surface, &derived, &construction, args.grid)?;
    let verdict = if check.passed { "ok" } else { "FAILED" };
    Ok(Report {
        stdout: vec![
            format!("surface: {}", spec.name),
            format!("{} = {} (tolerance {:e}): {}", check.quantity, fmt_f64(check.value), check.tolerance, verdict),
        ],
        stderr: loaded.warnings,
        exit_code: if check.passed { 0 } else { 2 },
    })
}

pub struct MeshArgs {
    pub spec: PathBuf,
    pub grid: (usize, usize),
    pub project: [usize; 3],
    pub out: PathBuf,
}

/// Writes `x = Re Ψ` on the node grid as a triangulated OBJ.
pub fn cmd_mesh(args: &MeshArgs) -> Result<Report, CliError> {
    let loaded = SurfaceSpec::read(&args.spec)?.load()?;
    let (w, h) = args.grid;
    if w < 2 || h < 2 {
        return Err(CliError::Validation(format!("mesh grid must be at least 2x2, got {w}x{h}")));
    }
    let n = loaded.surface.dim();
    let [i, j, k] = args.project;
    if i == j || j == k || i == k || i >= n || j >= n || k >= n {
        return Err(CliError::Validation(format!(
            "projection indices {i},{j},{k} must be distinct and below {n}"
        )));
    }
    let psi = loaded.surface.psi();
    let vertices = loaded
        .surface
        .domain()
        .nodes(w, h)
        .iter()
        .map(|&t| {
            let x = psi.eval(t)?.re();
            Ok([x[i], x[j], x[k]])
        })
        .collect::<Result<Vec<_>, crate::holo::HoloError>>()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut faces = Vec::with_capacity(2 * (w - 1) * (h - 1));
    for r in 0..h - 1 {
        for c in 0..w - 1 {
            let v00 = r * w + c + 1;
            let (v10, v01, v11) = (v00 + 1, v00 + w, v00 + w + 1);
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    write_file(&args.out, &obj(&vertices, &faces))?;
    Ok(Report {
        stdout: vec![format!("vertices: {}; triangles: {}", vertices.len(), faces.len())],
        stderr: loaded.warnings,
        exit_code: 0,
    })
}
