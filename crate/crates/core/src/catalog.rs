//! The sixteen canonical 4×4 matrices, the Heisenberg families they define, and the
//! matrix ↔ Heisenberg ↔ 3-ary correspondences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebras::{is_heisenberg, square_dim, Algebra, AlgebraError, BasisChange};
use crate::scalars::{parse_scalar, GaussRational, Matrix, RationalFunction, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),
    #[error("{family} takes {expected} parameter(s), got {found}")]
    Arity { family: Family, expected: usize, found: usize },
    #[error("unknown parameter `{name}` for {family}")]
    UnknownParameter { family: Family, name: String },
    #[error("{family} excludes {name} = {value}")]
    Excluded { family: Family, name: String, value: String },
    #[error("parameters must be concrete for this operation")]
    Symbolic,
    #[error("scalar error: {0}")]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "ZERO")]
    Zero,
    H01,
    H02,
    H03,
    H04,
    H05,
    H06,
    H07,
    H08,
    H09,
    H10,
    H11,
    H12,
    H13,
    H14,
    H15,
}

impl Family {
    pub const ALL: [Family; 16] = [
        Family::Zero,
        Family::H01,
        Family::H02,
        Family::H03,
        Family::H04,
        Family::H05,
        Family::H06,
        Family::H07,
        Family::H08,
        Family::H09,
        Family::H10,
        Family::H11,
        Family::H12,
        Family::H13,
        Family::H14,
        Family::H15,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Family::Zero => "ZERO",
            Family::H01 => "H01",
            Family::H02 => "H02",
            Family::H03 => "H03",
            Family::H04 => "H04",
            Family::H05 => "H05",
            Family::H06 => "H06",
            Family::H07 => "H07",
            Family::H08 => "H08",
            Family::H09 => "H09",
            Family::H10 => "H10",
            Family::H11 => "H11",
            Family::H12 => "H12",
            Family::H13 => "H13",
            Family::H14 => "H14",
            Family::H15 => "H15",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::H03 | Family::H05 | Family::H09 | Family::H14 => &["λ"],
            Family::H13 => &["λ", "μ"],
            _ => &[],
        }
    }

    pub fn arity(self) -> usize {
        self.param_names().len()
    }

    /// Values each parameter may not take.
    pub fn excluded_values(self) -> Vec<(&'static str, GaussRational)> {
        match self {
            Family::H09 => vec![("λ", GaussRational::zero()), ("λ", GaussRational::from_int(-1))],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, CatalogError> {
        let up = s.trim().to_ascii_uppercase();
        let up = match up.as_str() {
            "ZERO" | "C5" | "0" => "ZERO".to_string(),
            u if u.starts_with('H') && u.len() == 2 => format!("H0{}", &u[1..]),
            u => u.to_string(),
        };
        Family::ALL
            .into_iter()
            .find(|f| f.label() == up)
            .ok_or_else(|| CatalogError::UnknownLabel(s.to_string()))
    }
}

/// A catalog label with its parameter values (concrete or symbolic, in the order of
/// [`Family::param_names`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalType {
    pub family: Family,
    pub params: Vec<RationalFunction>,
    pub normalized: bool,
}

impl CanonicalType {
    pub fn new(family: Family, params: Vec<RationalFunction>) -> Result<Self, CatalogError> {
        if params.len() != family.arity() {
            return Err(CatalogError::Arity { family, expected: family.arity(), found: params.len() });
        }
        let t = CanonicalType { family, params, normalized: false };
        t.check_excluded()?;
        Ok(t)
    }

    pub fn plain(family: Family) -> Self {
        CanonicalType { family, params: Vec::new(), normalized: true }
    }

    /// The family with its parameters as the indeterminates `λ`, `μ`.
    pub fn symbolic(family: Family) -> Self {
        CanonicalType {
            family,
            params: family.param_names().iter().map(|n| RationalFunction::var(n)).collect(),
            normalized: false,
        }
    }

    pub fn with_constants(family: Family, params: &[GaussRational]) -> Result<Self, CatalogError> {
        Self::new(family, params.iter().cloned().map(RationalFunction::constant).collect())
    }

    /// Parses `label` with `name=value` bindings in the scalar grammar.
    pub fn parse(label: &str, bindings: &[(String, String)], symbols: &[String]) -> Result<Self, CatalogError> {
        let family: Family = label.parse()?;
        let names = family.param_names();
        let mut params: Vec<Option<RationalFunction>> = vec![None; names.len()];
        for (name, value) in bindings {
            let canon = crate::scalars::canonical_name(name);
            let idx = names
                .iter()
                .position(|n| *n == canon)
                .ok_or_else(|| CatalogError::UnknownParameter { family, name: name.clone() })?;
            params[idx] = Some(parse_scalar(value, symbols)?);
        }
        let params = params
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.unwrap_or_else(|| RationalFunction::var(names[i])))
            .collect();
        Self::new(family, params)
    }

    pub fn is_concrete(&self) -> bool {
        self.params.iter().all(|p| p.as_constant().is_some())
    }

    pub fn constants(&self) -> Option<Vec<GaussRational>> {
        self.params.iter().map(|p| p.as_constant()).collect()
    }

    fn check_excluded(&self) -> Result<(), CatalogError> {
        for (name, v) in self.family.excluded_values() {
            let idx = self.family.param_names().iter().position(|n| *n == name).expect("known");
            if self.params[idx].as_constant().as_ref() == Some(&v) {
                return Err(CatalogError::Excluded { family: self.family, name: name.into(), value: v.to_string() });
            }
        }
        Ok(())
    }

    pub fn param_map(&self) -> BTreeMap<String, String> {
        self.family
            .param_names()
            .iter()
            .zip(&self.params)
            .map(|(n, p)| (n.to_string(), p.to_string()))
            .collect()
    }

    pub fn to_json(&self) -> TypeJson {
        TypeJson { r#type: self.family.label().to_string(), params: self.param_map() }
    }

    /// Stable ordering key for reports.
    pub fn sort_key(&self) -> (Family, Vec<String>) {
        (self.family, self.params.iter().map(|p| p.to_string()).collect())
    }
}

impl fmt::Display for CanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            return f.write_str(self.family.label());
        }
        let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}({})", self.family.label(), ps.join(";"))
    }
}

/// Serialized form `{"type": "H13", "params": {"λ": "1/2", "μ": "-1"}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeJson {
    pub r#type: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

/// The canonical 4×4 matrix of a type.
pub fn canonical_matrix(t: &CanonicalType) -> Matrix<RationalFunction> {
    let one = || RationalFunction::one();
    let neg = || RationalFunction::from_int(-1);
    let l = || t.params.first().cloned().unwrap_or_default();
    let mu = || t.params.get(1).cloned().unwrap_or_default();
    let entries: Vec<(usize, usize, RationalFunction)> = match t.family {
        Family::Zero => vec![],
        Family::H01 => vec![(1, 1, one())],
        Family::H02 => vec![(1, 2, neg()), (2, 1, one()), (2, 2, one())],
        Family::H03 => vec![(1, 2, one()), (2, 1, l())],
        Family::H04 => vec![(1, 1, one()), (2, 3, neg()), (3, 2, one()), (3, 3, one())],
        Family::H05 => vec![(1, 1, one()), (2, 3, one()), (3, 2, l())],
        Family::H06 => vec![(1, 2, one()), (2, 3, one())],
        Family::H07 => vec![(1, 3, one()), (2, 2, neg()), (2, 3, neg()), (3, 1, one()), (3, 2, one())],
        Family::H08 => vec![
            (1, 4, neg()),
            (2, 3, one()),
            (2, 4, one()),
            (3, 2, neg()),
            (3, 3, neg()),
            (4, 1, one()),
            (4, 2, one()),
        ],
        Family::H09 => vec![(1, 3, one()), (2, 4, one()), (3, 1, l()), (3, 2, one()), (4, 2, l())],
        Family::H10 => vec![(1, 1, one()), (2, 3, one()), (3, 4, one())],
        Family::H11 => vec![(1, 1, one()), (2, 4, one()), (3, 3, neg()), (3, 4, neg()), (4, 2, one()), (4, 3, one())],
        Family::H12 => vec![(1, 2, neg()), (2, 1, one()), (2, 2, one()), (3, 4, neg()), (4, 3, one()), (4, 4, one())],
        Family::H13 => vec![(1, 2, one()), (2, 1, mu()), (3, 4, one()), (4, 3, l())],
        Family::H14 => vec![(1, 2, one()), (2, 1, l()), (3, 4, neg()), (4, 3, one()), (4, 4, one())],
        Family::H15 => vec![(1, 2, one()), (2, 3, one()), (3, 4, one())],
    };
    let mut m = Matrix::zeros(4, 4);
    for (i, j, v) in entries {
        m.set(i - 1, j - 1, v);
    }
    m
}

/// The multiplication table of a type (dim 5).
pub fn instantiate(t: &CanonicalType) -> Result<Algebra, CatalogError> {
    if t.params.len() != t.family.arity() {
        return Err(CatalogError::Arity { family: t.family, expected: t.family.arity(), found: t.params.len() });
    }
    t.check_excluded()?;
    let mut a = matrix_to_heisenberg(&canonical_matrix(t));
    let mut names = BTreeSet::new();
    for p in &t.params {
        for v in p.vars() {
            names.insert(v.name().to_string());
        }
    }
    a.parameters = names.into_iter().collect();
    for (name, v) in t.family.excluded_values() {
        if let Some(RationalFunction { .. }) = t.params.first().filter(|p| p.as_constant().is_none()) {
            a.excluded.push((name.to_string(), v));
        }
    }
    Ok(a)
}

fn delta(a: &RationalFunction, b: i64) -> usize {
    (*a == RationalFunction::from_int(b)) as usize
}

/// Closed-form derivation dimension of each family.
pub fn expected_der_dim(t: &CanonicalType) -> usize {
    let l = t.params.first();
    let m = t.params.get(1);
    match t.family {
        Family::Zero => 25,
        Family::H01 => 17,
        Family::H02 => 14,
        Family::H03 => 14 + 2 * delta(l.unwrap(), -1),
        Family::H04 => 10,
        Family::H05 => 10 + 2 * delta(l.unwrap(), 1) + 2 * delta(l.unwrap(), -1),
        Family::H06 => 11,
        Family::H07 => 10,
        Family::H08 => 7,
        Family::H09 => 7 + 2 * delta(l.unwrap(), 1),
        Family::H10 => 8,
        Family::H11 => 7,
        Family::H12 => 9,
        Family::H13 => {
            let (l, m) = (l.unwrap(), m.unwrap());
            7 + theta(l, m)
        }
        Family::H14 => 7 + 4 * delta(l.unwrap(), -1),
        Family::H15 => 7,
    }
}

/// `θ = 2δ(λ,μ) + 2δ(λ,−1)δ(μ,−1) + 2δ(λ,1)δ(μ,1) + 2δ(λ,−1) + 2δ(μ,−1)`.
pub fn theta(l: &RationalFunction, m: &RationalFunction) -> usize {
    2 * ((l == m) as usize)
        + 2 * delta(l, -1) * delta(m, -1)
        + 2 * delta(l, 1) * delta(m, 1)
        + 2 * delta(l, -1)
        + 2 * delta(m, -1)
}

fn normalize_one(x: &GaussRational) -> GaussRational {
    if x.in_unit_region() {
        x.clone()
    } else {
        x.inv().expect("outside the unit region implies nonzero")
    }
}

/// Moves parameters into the normalization regions: each into the unit region by
/// inversion, and for H13 a swap so that `λ − μ` lies in the right half plane.
pub fn normalize_parameters(t: &CanonicalType) -> Result<CanonicalType, CatalogError> {
    let cs = t.constants().ok_or(CatalogError::Symbolic)?;
    let mut cs: Vec<GaussRational> = cs.iter().map(normalize_one).collect();
    if t.family == Family::H13 && !(&cs[0] - &cs[1]).in_right_half() {
        cs.swap(0, 1);
    }
    let mut out = CanonicalType::with_constants(t.family, &cs)?;
    out.normalized = true;
    Ok(out)
}

/// The 5-dimensional algebra with `e_ie_j = M_{i,j} e_5`.
pub fn matrix_to_heisenberg(m: &Matrix<RationalFunction>) -> Algebra {
    let n = m.rows();
    let mut a = Algebra::zero(n + 1);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, n, m.get(i, j).clone());
        }
    }
    a
}

/// Reads off the matrix of a Heisenberg algebra in an adapted basis: the first
/// coordinate directions independent modulo the square, then a spanning vector of the square.
pub fn heisenberg_to_matrix(a: &Algebra) -> Result<(Matrix<RationalFunction>, BasisChange), AlgebraError> {
    let n = a.dim();
    if n != 5 {
        return Err(AlgebraError::WrongDimension { expected: 5, found: n });
    }
    if !is_heisenberg(a) {
        return Err(AlgebraError::NotHeisenberg);
    }
    if square_dim(a) == 0 {
        return Ok((Matrix::zeros(4, 4), BasisChange::identity(5)));
    }
    let raw = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.product(i, j))
        .find(|p| p.iter().any(|c| !c.is_zero()))
        .expect("nonzero square");
    // leading coordinate scaled to 1, so that `e5` is kept when it spans the square
    let pivot = raw.iter().position(|c| !c.is_zero()).expect("nonzero");
    let v: Vec<RationalFunction> = raw.iter().map(|c| c / &raw[pivot]).collect();
    let mut chosen: Vec<Vec<RationalFunction>> = vec![v.clone()];
    let mut complement = Vec::new();
    for k in 0..n {
        let mut e = vec![RationalFunction::zero(); n];
        e[k] = RationalFunction::one();
        let mut trial = chosen.clone();
        trial.push(e.clone());
        if Matrix::from_rows(trial.clone()).rank() == trial.len() {
            chosen = trial;
            complement.push(e);
        }
        if complement.len() == n - 1 {
            break;
        }
    }
    let mut rows = complement.clone();
    rows.push(v.clone());
    let g = BasisChange::new(Matrix::from_rows(rows))?;
    // coefficient of E_5 = v in E_i E_j; every product is a multiple of v
    let mut m = Matrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let prod = a.multiply(&complement[i], &complement[j]);
            m.set(i, j, prod[pivot].clone());
        }
    }
    Ok((m, g))
}

/// An anticommutative 3-ary bracket on a 4-dimensional space; only sorted triples stored
/// (0-based), each with its coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryAlgebra {
    pub brackets: BTreeMap<[usize; 3], Vec<RationalFunction>>,
}

impl TernaryAlgebra {
    pub fn is_zero(&self) -> bool {
        self.brackets.is_empty()
    }

    /// Lines `[e1,e2,e3] = …`, 1-based.
    pub fn table(&self) -> Vec<String> {
        self.brackets
            .iter()
            .map(|(t, v)| {
                let terms: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| crate::algebras::format_term(c, k))
                    .collect();
                format!(
                    "[e{},e{},e{}] = {}",
                    t[0] + 1,
                    t[1] + 1,
                    t[2] + 1,
                    crate::algebras::join_terms(&terms)
                )
            })
            .collect()
    }
}

/// `c_{i₁,i₂,i₃}^j = (−1)^{i−1} M_{i,j}` with `(i₁,i₂,i₃)` the sorted complement of `i`.
pub fn matrix_to_ternary(m: &Matrix<RationalFunction>) -> TernaryAlgebra {
    let mut brackets = BTreeMap::new();
    for i in 0..4 {
        let triple: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let sign = if i % 2 == 0 { RationalFunction::one() } else { RationalFunction::from_int(-1) };
        let v: Vec<RationalFunction> = (0..4).map(|j| &sign * m.get(i, j)).collect();
        if v.iter().any(|c| !c.is_zero()) {
            brackets.insert([triple[0], triple[1], triple[2]], v);
        }
    }
    TernaryAlgebra { brackets }
}

/// Every type on the grid: each parameter ranging over `grid`, normalized and deduplicated,
/// excluded values skipped.
pub fn grid_types(grid: &[GaussRational]) -> Vec<CanonicalType> {
    let mut out: Vec<CanonicalType> = Vec::new();
    for family in Family::ALL {
        let combos: Vec<Vec<GaussRational>> = match family.arity() {
            0 => vec![vec![]],
            1 => grid.iter().map(|x| vec![x.clone()]).collect(),
            _ => grid
                .iter()
                .flat_map(|x| grid.iter().map(move |y| vec![x.clone(), y.clone()]))
                .collect(),
        };
        for c in combos {
            let Ok(t) = CanonicalType::with_constants(family, &c) else { continue };
            let t = normalize_parameters(&t).expect("concrete");
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// The default parameter grid `{0, 1/2, i, −1, 1}`.
pub fn default_grid() -> Vec<GaussRational> {
    vec![
        GaussRational::zero(),
        GaussRational::from_ratio(1, 2),
        GaussRational::i(),
        GaussRational::from_int(-1),
        GaussRational::one(),
    ]
}
