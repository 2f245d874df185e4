//! JSON shapes of the certificate corpus and the parameter domains they quantify over.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::CertError;
use crate::catalog::{CanonicalType, Family};
use crate::scalars::{canonical_name, parse_scalar, GaussRational, Matrix, RationalFunction, Var};

/// Excluded parameter values: a bare list when one symbol is in play, else keyed by symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Excluded {
    Values(Vec<String>),
    ByName(BTreeMap<String, Vec<String>>),
}

/// A catalog type whose parameters are expressions in the certificate's symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSpec {
    #[serde(rename = "type")]
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    /// Symbols local to this spec (ranging over the grid independently).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded: Option<Excluded>,
    /// Pairs of expressions that must differ.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<[String; 2]>,
}

impl TypeSpec {
    pub fn family(&self) -> Result<Family, CertError> {
        Ok(self.family.parse()?)
    }

    /// The type with parameters as rational functions; unnamed parameters default to the
    /// symbol of the same name.
    pub fn resolve(&self, symbols: &[String]) -> Result<CanonicalType, CertError> {
        let mut allowed = symbols.to_vec();
        allowed.extend(self.free.iter().cloned());
        let bindings: Vec<(String, String)> = self.params.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        Ok(CanonicalType::parse(&self.family, &bindings, &allowed)?)
    }

    /// The local domain of this spec's free symbols.
    pub fn domain(&self) -> Result<Domain, CertError> {
        Domain::new(&self.free, self.excluded.as_ref(), &self.conditions)
    }

    pub fn from_type(t: &CanonicalType) -> Self {
        TypeSpec {
            family: t.family.label().to_string(),
            params: t.param_map(),
            free: Vec::new(),
            excluded: None,
            conditions: Vec::new(),
        }
    }
}

/// Symbols ranging over a grid, minus excluded values and subject to inequalities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Domain {
    pub symbols: Vec<String>,
    pub excluded: BTreeMap<String, Vec<GaussRational>>,
    pub conditions: Vec<[String; 2]>,
}

/// A partial assignment of symbols to constants; absent symbols stay indeterminate.
pub type Assignment = BTreeMap<String, GaussRational>;

impl Domain {
    pub fn new(symbols: &[String], excluded: Option<&Excluded>, conditions: &[[String; 2]]) -> Result<Self, CertError> {
        let symbols: Vec<String> = symbols.iter().map(|s| canonical_name(s).to_string()).collect();
        let mut map = BTreeMap::new();
        match excluded {
            None => {}
            Some(Excluded::Values(vs)) => {
                let [only] = symbols.as_slice() else {
                    return Err(CertError::Schema(format!(
                        "a bare excluded list needs exactly one symbol, found {}",
                        symbols.len()
                    )));
                };
                map.insert(only.clone(), parse_constants(vs)?);
            }
            Some(Excluded::ByName(m)) => {
                for (k, vs) in m {
                    map.insert(canonical_name(k).to_string(), parse_constants(vs)?);
                }
            }
        }
        Ok(Domain { symbols, excluded: map, conditions: conditions.to_vec() })
    }

    /// Whether `a` (extended by `outer`) avoids exclusions and satisfies every condition that
    /// can be decided; conditions involving unassigned symbols hold generically.
    pub fn admits(&self, a: &Assignment, outer: &Assignment) -> bool {
        for (s, vs) in &self.excluded {
            if let Some(v) = a.get(s) {
                if vs.contains(v) {
                    return false;
                }
            }
        }
        let mut all = outer.clone();
        all.extend(a.iter().map(|(k, v)| (k.clone(), v.clone())));
        let names: Vec<String> = self.symbols.iter().chain(outer.keys()).cloned().chain(["λ", "μ", "τ"].map(String::from)).collect();
        self.conditions.iter().all(|[x, y]| {
            let (Ok(x), Ok(y)) = (parse_scalar(x, &names), parse_scalar(y, &names)) else { return false };
            let (Ok(x), Ok(y)) = (x.substitute(&bindings(&all)), y.substitute(&bindings(&all))) else {
                return true;
            };
            x != y
        })
    }

    /// Every admissible grid assignment of all symbols, in grid order.
    pub fn grid_points(&self, grid: &[GaussRational], outer: &Assignment) -> Vec<Assignment> {
        let mut points: Vec<Assignment> = vec![Assignment::new()];
        for s in &self.symbols {
            points = points
                .into_iter()
                .flat_map(|p| {
                    grid.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(s.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        points.into_iter().filter(|p| self.admits(p, outer)).collect()
    }
}

fn parse_constants(vs: &[String]) -> Result<Vec<GaussRational>, CertError> {
    vs.iter()
        .map(|v| parse_scalar::<&str>(v, &[]).map(|f| f.as_constant().expect("constant")).map_err(CertError::from))
        .collect()
}

pub fn bindings(a: &Assignment) -> BTreeMap<Var, RationalFunction> {
    a.iter().map(|(k, v)| (Var::new(k), RationalFunction::constant(v.clone()))).collect()
}

pub fn format_assignment(a: &Assignment) -> String {
    if a.is_empty() {
        return "generic".to_string();
    }
    a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

/// Substitutes into every parameter; `None` if a denominator vanishes or an exclusion is hit.
pub fn specialize(t: &CanonicalType, a: &Assignment) -> Option<CanonicalType> {
    if a.is_empty() {
        return Some(t.clone());
    }
    let b = bindings(a);
    let params = t.params.iter().map(|p| p.substitute(&b)).collect::<Result<Vec<_>, _>>().ok()?;
    CanonicalType::new(t.family, params).ok()
}

pub fn parse_matrix(rows: &[Vec<String>], symbols: &[String]) -> Result<Matrix<RationalFunction>, CertError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CertError::Schema(format!("basis must be square, got {n} rows of uneven length")));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_scalar(s, symbols)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(parsed))
}

pub fn specialize_matrix(m: &Matrix<RationalFunction>, a: &Assignment) -> Option<Matrix<RationalFunction>> {
    if a.is_empty() {
        return Some(m.clone());
    }
    let b = bindings(a);
    m.try_map(|x| x.substitute(&b)).ok()
}

/// Names of every indeterminate in the parameters of `t`.
pub fn symbols_of(t: &CanonicalType) -> BTreeSet<String> {
    t.params.iter().flat_map(|p| p.vars()).map(|v| v.name().to_string()).collect()
}

/// `{"type": …, "params": …}` of a specialized type, for reports.
pub fn describe(t: &CanonicalType) -> String {
    t.to_string()
}

/// Degeneration certificate as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationCert {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub source: TypeSpec,
    pub target: TypeSpec,
    /// Target parameters as expressions in the certificate symbols.
    #[serde(default)]
    pub param_map: BTreeMap<String, String>,
    #[serde(default)]
    pub symbols: Vec<String>,
    pub basis: Vec<Vec<String>>,
    pub provenance: String,
}

/// One term `a · c_{i,j}^k` of a linear relation, indices 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub c: [usize; 3],
    pub a: String,
}

/// Closed-set non-degeneration certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSetCert {
    pub id: String,
    pub kind: String,
    /// Pattern parameters; shared with the source's symbols.
    #[serde(default)]
    pub parameters: Vec<String>,
    /// Adds `c_{i,j}^k = 0` whenever `i = n`, `j = n` or `k ≠ n`.
    #[serde(default)]
    pub heisenberg_frame: bool,
    #[serde(default)]
    pub zeros: Vec<[usize; 3]>,
    #[serde(default)]
    pub relations: Vec<Vec<RelationTerm>>,
    pub witness_basis: Vec<Vec<String>>,
    pub sources: Vec<TypeSpec>,
    pub blocked: Vec<TypeSpec>,
    pub provenance: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    ZXi,
    Symmetric,
    Antisymmetric,
    DerivationDim,
}

/// Invariant-based non-degeneration certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCert {
    pub id: String,
    pub kind: String,
    pub invariant: InvariantKind,
    /// `ξ` for `z_xi`, an expression in the source symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<String>,
    #[serde(default)]
    pub symbols: Vec<String>,
    pub sources: Vec<TypeSpec>,
    pub blocked: Vec<TypeSpec>,
    pub provenance: String,
}

/// Concrete `(source, blocked target)` pairs of a non-degeneration certificate on the grid,
/// with the source assignment. Source symbols are those of `symbols` the source mentions.
pub fn grid_pairs(
    symbols: &[String],
    sources: &[TypeSpec],
    blocked: &[TypeSpec],
    grid: &[GaussRational],
) -> Result<Vec<(Assignment, CanonicalType, CanonicalType)>, CertError> {
    let symbols: Vec<String> = symbols.iter().map(|s| canonical_name(s).to_string()).collect();
    let known: BTreeSet<&String> = symbols.iter().collect();
    let targets = blocked
        .iter()
        .map(|b| Ok((b.resolve(&symbols)?, b.domain()?)))
        .collect::<Result<Vec<_>, CertError>>()?;
    let mut out = Vec::new();
    for spec in sources {
        let source = spec.resolve(&symbols)?;
        let used: Vec<String> = symbols_of(&source).into_iter().filter(|s| known.contains(s)).collect();
        let domain = Domain::new(&used, spec.excluded.as_ref(), &spec.conditions)?;
        for a in domain.grid_points(grid, &Assignment::new()) {
            let Some(src) = specialize(&source, &a).filter(|s| s.is_concrete()) else { continue };
            for (target, tdomain) in &targets {
                for b in tdomain.grid_points(grid, &a) {
                    let mut all = a.clone();
                    all.extend(b);
                    let Some(t) = specialize(target, &all).filter(|t| t.is_concrete()) else { continue };
                    if !out.iter().any(|(_, s, u)| *s == src && *u == t) {
                        out.push((a.clone(), src.clone(), t));
                    }
                }
            }
        }
    }
    Ok(out)
}
