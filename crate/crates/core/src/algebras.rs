//! Structure-constant algebras, base change, and isomorphism invariants.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{
    parse_constant, parse_scalar, GaussRational, Matrix, RationalFunction, ScalarError, Var,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("basis change is singular")]
    Singular,
    #[error("dimension mismatch: algebra has dimension {algebra}, basis change has size {basis}")]
    DimensionMismatch { algebra: usize, basis: usize },
    #[error("index ({0}, {1}, {2}) out of range")]
    IndexOutOfRange(usize, usize, usize),
    #[error("algebra is not a Heisenberg algebra")]
    NotHeisenberg,
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("scalar error: {0}")]
    Scalar(#[from] ScalarError),
    #[error("malformed algebra JSON: {0}")]
    Json(String),
}

/// Multiplication `e_i · e_j = Σ_k c_{i,j}^k e_k`, stored sparsely with 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    dim: usize,
    constants: BTreeMap<(usize, usize, usize), RationalFunction>,
    pub parameters: Vec<String>,
    pub excluded: Vec<(String, GaussRational)>,
}

impl Algebra {
    pub fn zero(dim: usize) -> Self {
        Algebra { dim, constants: BTreeMap::new(), parameters: Vec::new(), excluded: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c_{i,j}^k` with 0-based indices.
    pub fn get(&self, i: usize, j: usize, k: usize) -> RationalFunction {
        self.constants.get(&(i, j, k)).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, i: usize, j: usize, k: usize) -> Option<&RationalFunction> {
        self.constants.get(&(i, j, k))
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: RationalFunction) {
        assert!(i < self.dim && j < self.dim && k < self.dim, "index out of range");
        if v.is_zero() {
            self.constants.remove(&(i, j, k));
        } else {
            self.constants.insert((i, j, k), v);
        }
    }

    /// Nonzero structure constants.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &RationalFunction)> {
        self.constants.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    /// Coordinates of `e_i · e_j`.
    pub fn product(&self, i: usize, j: usize) -> Vec<RationalFunction> {
        (0..self.dim).map(|k| self.get(i, j, k)).collect()
    }

    /// Coordinates of `x · y`.
    pub fn multiply(&self, x: &[RationalFunction], y: &[RationalFunction]) -> Vec<RationalFunction> {
        let mut out = vec![RationalFunction::zero(); self.dim];
        for (&(i, j, k), c) in self.constants.iter() {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            out[k] = &out[k] + &(&(&x[i] * &y[j]) * c);
        }
        out
    }

    pub fn substitute(&self, b: &BTreeMap<Var, RationalFunction>) -> Result<Algebra, ScalarError> {
        let mut out = Algebra { constants: BTreeMap::new(), ..self.clone() };
        for (&(i, j, k), c) in self.constants.iter() {
            out.set(i, j, k, c.substitute(b)?);
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Algebra, AlgebraError> {
        let j: AlgebraJson = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        j.to_algebra()
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            dim: self.dim,
            parameters: self.parameters.clone(),
            excluded: self.excluded.iter().map(|(n, v)| (n.clone(), v.to_string())).collect(),
            constants: self
                .constants
                .iter()
                .map(|(&(i, j, k), v)| ConstantJson { i: i + 1, j: j + 1, k: k + 1, value: v.to_string() })
                .collect(),
        }
    }

    /// The multiplication table as `e_ie_j = …` lines, 1-based.
    pub fn table(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let terms: Vec<String> = (0..self.dim)
                    .filter_map(|k| self.get_ref(i, j, k).map(|c| format_term(c, k)))
                    .collect();
                if !terms.is_empty() {
                    out.push(format!("e{}e{} = {}", i + 1, j + 1, join_terms(&terms)));
                }
            }
        }
        out
    }
}

pub(crate) fn format_term(c: &RationalFunction, k: usize) -> String {
    if c.is_one() {
        format!("e{}", k + 1)
    } else if (-c).is_one() {
        format!("-e{}", k + 1)
    } else if c.numer().num_terms() == 1 && c.denom().is_one() && c.numer().leading_coeff().is_real() {
        format!("{c}*e{}", k + 1)
    } else {
        format!("({c})*e{}", k + 1)
    }
}

pub(crate) fn join_terms(terms: &[String]) -> String {
    let mut s = String::new();
    for (n, t) in terms.iter().enumerate() {
        if n == 0 {
            s.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(t);
        }
    }
    s
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.table();
        if t.is_empty() {
            return write!(f, "(zero multiplication, dim {})", self.dim);
        }
        write!(f, "{}", t.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: String,
}

/// Serialized algebra; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub excluded: Vec<(String, String)>,
    pub constants: Vec<ConstantJson>,
}

impl AlgebraJson {
    pub fn to_algebra(&self) -> Result<Algebra, AlgebraError> {
        let mut names: Vec<String> = self.parameters.clone();
        names.push("t".into());
        let mut a = Algebra::zero(self.dim);
        a.parameters = self.parameters.clone();
        for (n, v) in &self.excluded {
            a.excluded.push((n.clone(), parse_constant(v)?));
        }
        for c in &self.constants {
            if c.i == 0 || c.j == 0 || c.k == 0 || c.i > self.dim || c.j > self.dim || c.k > self.dim {
                return Err(AlgebraError::IndexOutOfRange(c.i, c.j, c.k));
            }
            let v = parse_scalar(&c.value, &names)?;
            let old = a.get(c.i - 1, c.j - 1, c.k - 1);
            a.set(c.i - 1, c.j - 1, c.k - 1, &old + &v);
        }
        Ok(a)
    }
}

/// An invertible change of basis; row `i` holds the coordinates of the new `E_i` in the old basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisChange {
    matrix: Matrix<RationalFunction>,
    det: RationalFunction,
}

impl BasisChange {
    pub fn new(matrix: Matrix<RationalFunction>) -> Result<Self, AlgebraError> {
        if !matrix.is_square() {
            return Err(AlgebraError::Singular);
        }
        let det = matrix.det();
        if det.is_zero() {
            return Err(AlgebraError::Singular);
        }
        Ok(BasisChange { matrix, det })
    }

    pub fn identity(n: usize) -> Self {
        BasisChange { matrix: Matrix::identity(n), det: RationalFunction::one() }
    }

    pub fn matrix(&self) -> &Matrix<RationalFunction> {
        &self.matrix
    }

    pub fn det(&self) -> &RationalFunction {
        &self.det
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// `self` applied after `first`: the rows of the product `self · first`.
    pub fn compose(&self, first: &BasisChange) -> BasisChange {
        BasisChange {
            matrix: self.matrix.mul(&first.matrix),
            det: &self.det * &first.det,
        }
    }
}

/// Structure constants of the same multiplication in the basis given by `g`:
/// `c'_{i,j}^m = Σ G_{i,p} G_{j,q} c_{p,q}^k (G⁻¹)_{k,m}`.
pub fn change_basis(a: &Algebra, g: &BasisChange) -> Result<Algebra, AlgebraError> {
    let n = a.dim;
    if g.size() != n {
        return Err(AlgebraError::DimensionMismatch { algebra: n, basis: g.size() });
    }
    let gm = &g.matrix;
    let ginv = gm.inverse().ok_or(AlgebraError::Singular)?;
    let mut out = Algebra { constants: BTreeMap::new(), ..a.clone() };
    for i in 0..n {
        for j in 0..n {
            let mut v = vec![RationalFunction::zero(); n];
            let mut any = false;
            for (&(p, q, k), c) in a.constants.iter() {
                let gip = gm.get(i, p);
                let gjq = gm.get(j, q);
                if gip.is_zero() || gjq.is_zero() {
                    continue;
                }
                v[k] = &v[k] + &(&(gip * gjq) * c);
                any = true;
            }
            if !any {
                continue;
            }
            for m in 0..n {
                let mut s = RationalFunction::zero();
                for (k, vk) in v.iter().enumerate() {
                    let gi = ginv.get(k, m);
                    if vk.is_zero() || gi.is_zero() {
                        continue;
                    }
                    s = &s + &(vk * gi);
                }
                out.set(i, j, m, s);
            }
        }
    }
    Ok(out)
}

/// Coefficient matrix of the derivation equations in the unknowns `D_{a,b}` (index `a·n + b`),
/// where `D(e_a) = Σ_b D_{a,b} e_b`.
pub fn derivation_system(a: &Algebra) -> Matrix<RationalFunction> {
    let n = a.dim;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                let mut row = vec![RationalFunction::zero(); n * n];
                let mut any = false;
                // D(e_i e_j) = Σ_k c_ij^k D(e_k)
                for k in 0..n {
                    if let Some(c) = a.get_ref(i, j, k) {
                        let idx = k * n + m;
                        row[idx] = &row[idx] + c;
                        any = true;
                    }
                }
                // D(e_i) e_j + e_i D(e_j)
                for b in 0..n {
                    if let Some(c) = a.get_ref(b, j, m) {
                        let idx = i * n + b;
                        row[idx] = &row[idx] - c;
                        any = true;
                    }
                    if let Some(c) = a.get_ref(i, b, m) {
                        let idx = j * n + b;
                        row[idx] = &row[idx] - c;
                        any = true;
                    }
                }
                if any && row.iter().any(|x| !x.is_zero()) && !rows.contains(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Matrix::zeros(0, n * n);
    }
    Matrix::from_rows(rows)
}

pub fn derivation_dim(a: &Algebra) -> usize {
    let n = a.dim;
    n * n - derivation_system(a).rank()
}

/// A basis of the derivation algebra, each derivation as the matrix `D_{a,b}`.
pub fn derivations(a: &Algebra) -> Vec<Matrix<RationalFunction>> {
    let n = a.dim;
    let sys = derivation_system(a);
    let basis = if sys.rows() == 0 {
        (0..n * n)
            .map(|k| (0..n * n).map(|j| RationalFunction::from_int((j == k) as i64)).collect())
            .collect()
    } else {
        sys.nullspace()
    };
    basis
        .into_iter()
        .map(|v: Vec<RationalFunction>| Matrix::from_rows(v.chunks(n).map(|c| c.to_vec()).collect()))
        .collect()
}

/// Whether the matrix `D_{a,b}` satisfies the derivation equations.
pub fn is_derivation(a: &Algebra, d: &Matrix<RationalFunction>) -> bool {
    let sys = derivation_system(a);
    let v: Vec<RationalFunction> = d.to_rows().into_iter().flatten().collect();
    sys.rows() == 0 || sys.mul_vec(&v).iter().all(|x| x.is_zero())
}

/// Dimension of `Z_ξ(A) = {x : x·y = ξ·y·x for all y}`.
pub fn z_xi_dim(a: &Algebra, xi: &RationalFunction) -> usize {
    let n = a.dim;
    let mut rows = Vec::new();
    for b in 0..n {
        for k in 0..n {
            let row: Vec<RationalFunction> = (0..n)
                .map(|x| &a.get(x, b, k) - &(xi * &a.get(b, x, k)))
                .collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return n;
    }
    n - Matrix::from_rows(rows).rank()
}

/// Dimension of the span of all products `e_i · e_j`.
pub fn square_dim(a: &Algebra) -> usize {
    let n = a.dim;
    let rows: Vec<Vec<RationalFunction>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.product(i, j))
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .collect();
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows).rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryType {
    Symmetric,
    Antisymmetric,
    Both,
    Neither,
}

impl fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryType::Symmetric => "symmetric",
            SymmetryType::Antisymmetric => "antisymmetric",
            SymmetryType::Both => "both",
            SymmetryType::Neither => "neither",
        })
    }
}

impl SymmetryType {
    pub fn is_symmetric(self) -> bool {
        matches!(self, SymmetryType::Symmetric | SymmetryType::Both)
    }

    pub fn is_antisymmetric(self) -> bool {
        matches!(self, SymmetryType::Antisymmetric | SymmetryType::Both)
    }
}

pub fn symmetry_type(a: &Algebra) -> SymmetryType {
    let n = a.dim;
    let mut sym = true;
    let mut anti = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = a.get(i, j, k);
                let y = a.get(j, i, k);
                if x != y {
                    sym = false;
                }
                if x != -&y {
                    anti = false;
                }
            }
        }
    }
    match (sym, anti) {
        (true, true) => SymmetryType::Both,
        (true, false) => SymmetryType::Symmetric,
        (false, true) => SymmetryType::Antisymmetric,
        (false, false) => SymmetryType::Neither,
    }
}

/// `dim A² ≤ 1` and `A²A = AA² = 0`.
pub fn is_heisenberg(a: &Algebra) -> bool {
    if square_dim(a) > 1 {
        return false;
    }
    let n = a.dim;
    let unit = |l: usize| -> Vec<RationalFunction> {
        (0..n).map(|k| RationalFunction::from_int((k == l) as i64)).collect()
    };
    for i in 0..n {
        for j in 0..n {
            let v = a.product(i, j);
            if v.iter().all(|c| c.is_zero()) {
                continue;
            }
            for l in 0..n {
                let e = unit(l);
                if a.multiply(&v, &e).iter().any(|c| !c.is_zero())
                    || a.multiply(&e, &v).iter().any(|c| !c.is_zero())
                {
                    return false;
                }
            }
        }
    }
    true
}

/// The invariant battery for one algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub derivation_dim: usize,
    pub z_plus_one: usize,
    pub z_minus_one: usize,
    pub square_dim: usize,
    pub symmetry: SymmetryType,
    pub heisenberg: bool,
}

pub fn invariant_summary(a: &Algebra) -> InvariantSummary {
    InvariantSummary {
        derivation_dim: derivation_dim(a),
        z_plus_one: z_xi_dim(a, &RationalFunction::one()),
        z_minus_one: z_xi_dim(a, &RationalFunction::from_int(-1)),
        square_dim: square_dim(a),
        symmetry: symmetry_type(a),
        heisenberg: is_heisenberg(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RationalFunction {
        parse_scalar(s, &["t", "λ", "μ"]).unwrap()
    }

    fn alg(dim: usize, entries: &[(usize, usize, usize, &str)]) -> Algebra {
        let mut a = Algebra::zero(dim);
        for &(i, j, k, v) in entries {
            a.set(i - 1, j - 1, k - 1, p(v));
        }
        a
    }

    fn basis(rows: &[[&str; 5]]) -> BasisChange {
        BasisChange::new(Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect())).unwrap()
    }

    #[test]
    fn h02_to_h01_worked_example() {
        let h02 = alg(5, &[(1, 2, 5, "-1"), (2, 1, 5, "1"), (2, 2, 5, "1")]);
        let g = basis(&[
            ["0", "1", "0", "0", "0"],
            ["t", "0", "0", "0", "0"],
            ["0", "0", "1", "0", "0"],
            ["0", "0", "0", "1", "0"],
            ["0", "0", "0", "0", "1"],
        ]);
        let b = change_basis(&h02, &g).unwrap();
        assert_eq!(b, alg(5, &[(1, 1, 5, "1"), (1, 2, 5, "t"), (2, 1, 5, "-t")]));
    }

    #[test]
    fn h06_to_h03_worked_example() {
        let h06 = alg(5, &[(1, 2, 5, "1"), (2, 3, 5, "1")]);
        let g = basis(&[
            ["1", "0", "λ", "0", "0"],
            ["0", "1", "0", "0", "0"],
            ["0", "0", "t", "0", "0"],
            ["0", "0", "0", "1", "0"],
            ["0", "0", "0", "0", "1"],
        ]);
        let b = change_basis(&h06, &g).unwrap();
        assert_eq!(b, alg(5, &[(1, 2, 5, "1"), (2, 1, 5, "λ"), (2, 3, 5, "t")]));
    }

    #[test]
    fn singular_basis_rejected() {
        let m = Matrix::from_rows(vec![vec![p("1"), p("λ")], vec![p("λ"), p("λ^2")]]);
        assert_eq!(BasisChange::new(m), Err(AlgebraError::Singular));
    }

    #[test]
    fn derivation_dims() {
        assert_eq!(derivation_dim(&Algebra::zero(5)), 25);
        assert_eq!(derivation_dim(&alg(5, &[(1, 1, 5, "1")])), 17);
        let h13 = alg(5, &[(1, 2, 5, "1"), (2, 1, 5, "1"), (3, 4, 5, "1"), (4, 3, 5, "1")]);
        assert_eq!(derivation_dim(&h13), 11);
    }

    #[test]
    fn z_xi_examples() {
        assert_eq!(z_xi_dim(&Algebra::zero(5), &p("λ")), 5);
        let h12 = alg(5, &[(1, 2, 5, "-1"), (2, 1, 5, "1"), (2, 2, 5, "1"), (3, 4, 5, "-1"), (4, 3, 5, "1"), (4, 4, 5, "1")]);
        assert_eq!(z_xi_dim(&h12, &p("-1")), 3);
        let h05_0 = alg(5, &[(1, 1, 5, "1"), (2, 3, 5, "1")]);
        assert_eq!(z_xi_dim(&h05_0, &p("-1")), 2);
    }

    #[test]
    fn square_and_symmetry() {
        assert_eq!(square_dim(&Algebra::zero(5)), 0);
        assert_eq!(square_dim(&alg(5, &[(1, 1, 5, "1")])), 1);
        assert_eq!(square_dim(&alg(3, &[(1, 1, 2, "1"), (1, 2, 3, "1")])), 2);
        let anti = alg(5, &[(1, 2, 5, "1"), (2, 1, 5, "-1"), (3, 4, 5, "1"), (4, 3, 5, "-1")]);
        assert_eq!(symmetry_type(&anti), SymmetryType::Antisymmetric);
        let h02 = alg(5, &[(1, 2, 5, "-1"), (2, 1, 5, "1"), (2, 2, 5, "1")]);
        assert_eq!(symmetry_type(&h02), SymmetryType::Neither);
        assert_eq!(symmetry_type(&Algebra::zero(3)), SymmetryType::Both);
    }

    #[test]
    fn heisenberg_predicate() {
        assert!(is_heisenberg(&Algebra::zero(5)));
        assert!(is_heisenberg(&alg(5, &[(1, 1, 5, "1")])));
        assert!(!is_heisenberg(&alg(2, &[(1, 1, 2, "1"), (2, 1, 1, "1")])));
    }

    #[test]
    fn json_roundtrip() {
        let a = alg(5, &[(1, 2, 5, "1"), (2, 1, 5, "λ")]);
        let mut a = a;
        a.parameters = vec!["λ".into()];
        a.excluded = vec![("λ".into(), GaussRational::from_int(-1))];
        let text = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(Algebra::from_json(&text).unwrap(), a);
    }
}
