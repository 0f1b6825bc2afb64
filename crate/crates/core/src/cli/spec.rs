//! JSON surface specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::geom::{make_surface, Domain, SurfacePatch, UvBox};
use crate::holo::{HoloCurve, NullBox};
use crate::sexpr::{parse, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "RawDomain")]
pub enum DomainSpec {
    Null { a: [f64; 2], b: [f64; 2] },
    Uv { u: [f64; 2], v: [f64; 2] },
}

// Untagged enums lose float values under arbitrary-precision numbers, so
// deserialization goes through plain optional fields.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    a: Option<[f64; 2]>,
    b: Option<[f64; 2]>,
    u: Option<[f64; 2]>,
    v: Option<[f64; 2]>,
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = String;

    fn try_from(r: RawDomain) -> Result<Self, String> {
        match r {
            RawDomain { a: Some(a), b: Some(b), u: None, v: None } => Ok(DomainSpec::Null { a, b }),
            RawDomain { a: None, b: None, u: Some(u), v: Some(v) } => Ok(DomainSpec::Uv { u, v }),
            _ => Err("domain needs either {a, b} or {u, v}".into()),
        }
    }
}

impl DomainSpec {
    pub fn to_domain(self) -> Result<Domain, CliError> {
        let d = match self {
            DomainSpec::Null { a, b } => Domain::from_null(NullBox::new((a[0], a[1]), (b[0], b[1]))),
            DomainSpec::Uv { u, v } => Domain::from_uv(UvBox { u: (u[0], u[1]), v: (v[0], v[1]) }),
        };
        d.map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn from_domain(d: &Domain) -> Self {
        match d.uv {
            Some(b) => DomainSpec::Uv { u: [b.u.0, b.u.1], v: [b.v.0, b.v.1] },
            None => DomainSpec::Null { a: [d.null.a.0, d.null.a.1], b: [d.null.b.0, d.null.b.1] },
        }
    }

    pub fn is_uv(&self) -> bool {
        matches!(self, DomainSpec::Uv { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub name: String,
    pub n: usize,
    pub psi: Vec<String>,
    pub domain: DomainSpec,
}

/// A parsed and validated spec.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub spec: SurfaceSpec,
    pub exprs: Vec<Expr>,
    pub surface: SurfacePatch,
    pub warnings: Vec<String>,
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("spec: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn exprs(&self) -> Result<Vec<Expr>, CliError> {
        if self.psi.len() != self.n {
            return Err(CliError::Validation(format!(
                "n = {} but {} expressions given",
                self.n,
                self.psi.len()
            )));
        }
        self.psi
            .iter()
            .enumerate()
            .map(|(i, s)| parse(s).map_err(|e| CliError::Parse(format!("psi[{i}] {s:?}: {e}"))))
            .collect()
    }

    pub fn load(self) -> Result<Loaded, CliError> {
        let exprs = self.exprs()?;
        let domain = self.domain.to_domain()?;
        let mut warnings = Vec::new();
        if self.domain.is_uv() {
            let n = domain.null;
            warnings.push(format!(
                "warning: (u,v) box is not aligned with the null axes; evaluating on the enclosing null box a=[{}, {}], b=[{}, {}]",
                n.a.0, n.a.1, n.b.0, n.b.1
            ));
        }
        let psi = HoloCurve::from_exprs(&exprs, domain.null).map_err(|e| CliError::Validation(e.to_string()))?;
        let surface = make_surface(psi, domain)?;
        Ok(Loaded { spec: self, exprs, surface, warnings })
    }
}
