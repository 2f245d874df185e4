//! Checking degeneration and non-degeneration certificates.

mod closed_set;
mod degeneration;
mod invariant;
mod necessary;
pub mod schema;

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebras::AlgebraError;
use crate::catalog::{default_grid, CanonicalType, CatalogError};
use crate::scalars::{GaussRational, ScalarError};

pub use closed_set::{
    falsify_membership, verify_borel_stability, verify_borel_stability_in, verify_closed_set_cert,
    verify_membership, ClosedSetPattern, Orientation,
};
pub use degeneration::{degeneration_instances, verify_degeneration, DegenerationInstance};
pub use invariant::verify_invariant_cert;
pub use necessary::check_necessary;
pub use schema::{grid_pairs, ClosedSetCert, DegenerationCert, Excluded, InvariantCert, InvariantKind, RelationTerm, TypeSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Schema(String),
    #[error("JSON error: {0}")]
    Json(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Inconclusive,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Inconclusive => "inconclusive",
            Status::Failed => "failed",
        })
    }
}

/// Per-entry detail attached to a verdict. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    LimitDiverges { point: String, entry: [usize; 3], value: String },
    LimitMismatch { point: String, entry: [usize; 3], expected: String, found: String },
    SingularBasis { point: String },
    ExceptionalValues { values: Vec<String> },
    GridSummary { checked: usize, skipped: Vec<String> },
    Necessary { check: String, source: String, target: String, holds: bool, detail: String },
    PatternViolation { point: String, equation: String, residual: String },
    Orientation { orientation: Orientation },
    BorelResidual { orientation: Orientation, equation: String, residual: String },
    FalsifierWitness { source: String, target: String, trial: usize, basis: Vec<Vec<String>> },
    FalsifierSummary { source: String, target: String, trials: usize, digest: String },
    Invariant { source: String, target: String, claim: String, source_value: String, target_value: String, holds: bool },
    Note { message: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |x: &[usize; 3]| format!("c_{{{},{}}}^{}", x[0], x[1], x[2]);
        match self {
            Diagnostic::LimitDiverges { point, entry, value } => {
                write!(f, "[{point}] {} diverges as t→0: {value}", e(entry))
            }
            Diagnostic::LimitMismatch { point, entry, expected, found } => {
                write!(f, "[{point}] {} has limit {found}, expected {expected}", e(entry))
            }
            Diagnostic::SingularBasis { point } => write!(f, "[{point}] basis is singular"),
            Diagnostic::ExceptionalValues { values } => write!(f, "basis degenerates at t ∈ {{{}}}", values.join(", ")),
            Diagnostic::GridSummary { checked, skipped } => {
                write!(f, "{checked} grid points checked")?;
                if !skipped.is_empty() {
                    write!(f, "; skipped {}", skipped.join("; "))?;
                }
                Ok(())
            }
            Diagnostic::Necessary { check, source, target, holds, detail } => {
                write!(f, "{check} for {source} → {target}: {detail}{}", if *holds { "" } else { " (violated)" })
            }
            Diagnostic::PatternViolation { point, equation, residual } => {
                write!(f, "[{point}] {equation} = {residual} ≠ 0")
            }
            Diagnostic::Orientation { orientation } => write!(f, "stable under {orientation} triangular changes"),
            Diagnostic::BorelResidual { orientation, equation, residual } => {
                write!(f, "{orientation} triangular: {equation} leaves residual {residual}")
            }
            Diagnostic::FalsifierWitness { source, target, trial, basis } => {
                let rows: Vec<String> = basis.iter().map(|r| format!("[{}]", r.join(", "))).collect();
                write!(f, "{target} lies in the closed set of {source} (trial {trial}): basis {}", rows.join(" "))
            }
            Diagnostic::FalsifierSummary { source, target, trials, digest } => {
                write!(f, "{source} ⇸ {target}: no witness in {trials} trials (transcript {digest})")
            }
            Diagnostic::Invariant { source, target, claim, source_value, target_value, holds } => write!(
                f,
                "{claim}: {source} has {source_value}, {target} has {target_value}{}",
                if *holds { "" } else { " (claim fails)" }
            ),
            Diagnostic::Note { message } => f.write_str(message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub subject: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl Verdict {
    pub fn new(subject: impl Into<String>, status: Status, diagnostics: Vec<Diagnostic>) -> Self {
        Verdict { status, subject: subject.into(), diagnostics }
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

/// Worst status wins: failed over inconclusive over verified.
pub fn aggregate(statuses: impl IntoIterator<Item = Status>) -> Status {
    statuses.into_iter().max().unwrap_or(Status::Verified)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Degeneration(DegenerationCert),
    ClosedSet(ClosedSetCert),
    Invariant(InvariantCert),
}

impl Certificate {
    pub fn from_json(text: &str) -> Result<Self, CertError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CertError::Json(e.to_string()))?;
        let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("degeneration").to_string();
        let json = |e: serde_json::Error| CertError::Json(e.to_string());
        match kind.as_str() {
            "degeneration" => Ok(Certificate::Degeneration(serde_json::from_value(value).map_err(json)?)),
            "closed_set" => Ok(Certificate::ClosedSet(serde_json::from_value(value).map_err(json)?)),
            "invariant" => Ok(Certificate::Invariant(serde_json::from_value(value).map_err(json)?)),
            other => Err(CertError::Schema(format!("unknown certificate kind `{other}`"))),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CertError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CertError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn id(&self) -> &str {
        match self {
            Certificate::Degeneration(c) => &c.id,
            Certificate::ClosedSet(c) => &c.id,
            Certificate::Invariant(c) => &c.id,
        }
    }

    pub fn provenance(&self) -> &str {
        match self {
            Certificate::Degeneration(c) => &c.provenance,
            Certificate::ClosedSet(c) => &c.provenance,
            Certificate::Invariant(c) => &c.provenance,
        }
    }

    pub fn is_degeneration(&self) -> bool {
        matches!(self, Certificate::Degeneration(_))
    }

    /// Concrete `(source, target)` pairs a non-degeneration certificate rules out on the grid.
    pub fn blocked_pairs(&self, grid: &[GaussRational]) -> Result<Vec<(CanonicalType, CanonicalType)>, CertError> {
        let pairs = match self {
            Certificate::Degeneration(_) => return Ok(Vec::new()),
            Certificate::ClosedSet(c) => grid_pairs(&c.parameters, &c.sources, &c.blocked, grid)?,
            Certificate::Invariant(c) => grid_pairs(&c.symbols, &c.sources, &c.blocked, grid)?,
        };
        Ok(pairs.into_iter().map(|(_, s, t)| (s, t)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub grid: Vec<GaussRational>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { grid: default_grid(), trials: 1000, seed: 0 }
    }
}

/// All verdicts for one certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub provenance: String,
    pub status: Status,
    pub verdicts: Vec<Verdict>,
}

pub fn verify_certificate(cert: &Certificate, opts: &RunOptions) -> Report {
    let verdicts = match cert {
        Certificate::Degeneration(c) => vec![verify_degeneration(c, &opts.grid)],
        Certificate::ClosedSet(c) => verify_closed_set_cert(c, opts),
        Certificate::Invariant(c) => vec![verify_invariant_cert(c, &opts.grid)],
    };
    Report {
        id: cert.id().to_string(),
        provenance: cert.provenance().to_string(),
        status: aggregate(verdicts.iter().map(|v| v.status)),
        verdicts,
    }
}

/// Verifies certificates in parallel; reports come back in input order.
pub fn verify_all(certs: &[Certificate], opts: &RunOptions) -> Vec<Report> {
    certs.par_iter().map(|c| verify_certificate(c, opts)).collect()
}

/// Loads every `*.json` under `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Certificate>, CertError> {
    let io = |e: std::io::Error| CertError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Certificate::load(p)).collect()
}

/// The shipped corpus under `root`: `deg/`, then `supplementary/` (if present), then `nondeg/`.
pub fn load_corpus(root: &Path) -> Result<Vec<Certificate>, CertError> {
    let mut out = load_dir(&root.join("deg"))?;
    let extra = root.join("supplementary");
    if extra.is_dir() {
        out.extend(load_dir(&extra)?);
    }
    out.extend(load_dir(&root.join("nondeg"))?);
    Ok(out)
}
