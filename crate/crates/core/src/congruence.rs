//! Congruence of square matrices over ℂ with entries in ℚ(i): regularization into a
//! nonsingular core plus nilpotent Jordan summands, cosquare similarity data, and
//! classification of 4×4 matrices against the catalog.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{canonical_matrix, normalize_parameters, CanonicalType, Family};
use crate::scalars::{parse_constant, GaussRational, Matrix, RationalFunction, ScalarError, UniPoly};

pub type QMatrix = Matrix<GaussRational>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CongruenceError {
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected a {expected}×{expected} matrix, got {found}×{found}")]
    WrongSize { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix entries must be constants")]
    NotConstant,
    #[error("parameter of {family} is a root of {minimal_polynomial}, which has no root in ℚ(i)")]
    ParameterNotInBaseField { family: String, minimal_polynomial: String },
    #[error("no catalog type matches")]
    Unmatched,
    #[error("scalar error: {0}")]
    Scalar(#[from] ScalarError),
}

/// Nonsingular core plus the sizes of the nilpotent Jordan summands, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularDecomposition {
    pub regular: QMatrix,
    pub singular_blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimilarityInvariant {
    /// Monic, each dividing the next; the trivial factors `1` are dropped.
    pub invariant_factors: Vec<UniPoly>,
}

/// Complete congruence invariant: singular data and the cosquare's Frobenius data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceInvariant {
    pub size: usize,
    pub singular_blocks: Vec<usize>,
    pub core: SimilarityInvariant,
}

/// `{"rows": [["0","1"],["2","0"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<QMatrix, CongruenceError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|s| parse_constant(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(CongruenceError::NotSquare { rows: n, cols: rows.first().map_or(0, |r| r.len()) });
        }
        Ok(Matrix::from_rows(rows))
    }

    pub fn from_matrix(m: &QMatrix) -> Self {
        MatrixJson { rows: m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect() }
    }
}

/// Converts a matrix of constant rational functions.
pub fn constant_matrix(m: &Matrix<RationalFunction>) -> Result<QMatrix, CongruenceError> {
    m.try_map(|x| x.as_constant().ok_or(CongruenceError::NotConstant))
}

fn check_square(m: &QMatrix) -> Result<(), CongruenceError> {
    if m.is_square() {
        Ok(())
    } else {
        Err(CongruenceError::NotSquare { rows: m.rows(), cols: m.cols() })
    }
}

fn form(a: &QMatrix, x: &[GaussRational], y: &[GaussRational]) -> GaussRational {
    let ay = a.mul_vec(y);
    x.iter().zip(&ay).fold(GaussRational::zero(), |acc, (p, q)| &acc + &(p * q))
}

/// Splits `f(x, y) = xᵀMy` into a nonsingular core and nilpotent Jordan summands.
///
/// `R` is the right radical and `V₁ = {y : f(R, y) = 0}`. The form induced on `V₁/R`
/// keeps the core and turns each `J_m(0)` with `m ≥ 3` into `J_{m−2}(0)`; the rest of the
/// chains vanish. `rank f(R, ·)` counts chains of length ≥ 2, `dim R` counts all of them.
pub fn regular_decomposition(m: &QMatrix) -> RegularDecomposition {
    assert!(m.is_square(), "regular_decomposition needs a square matrix");
    let n = m.rows();
    let radical = m.nullspace();
    let r = radical.len();
    if n == 0 || r == 0 {
        return RegularDecomposition { regular: m.clone(), singular_blocks: Vec::new() };
    }
    let mt = m.transpose();
    let left = Matrix::from_rows(radical.iter().map(|k| mt.mul_vec(k)).collect());
    let long_chains = left.rank();
    // basis of V₁ modulo R
    let mut span = radical.clone();
    let mut w = Vec::new();
    for v in left.nullspace() {
        span.push(v.clone());
        if Matrix::from_rows(span.clone()).rank() == span.len() {
            w.push(v);
        } else {
            span.pop();
        }
    }
    let derived: QMatrix =
        Matrix::from_rows(w.iter().map(|x| w.iter().map(|y| form(m, x, y)).collect()).collect());
    let inner = regular_decomposition(&derived);
    let mut blocks: Vec<usize> = inner.singular_blocks.iter().map(|k| k + 2).collect();
    blocks.extend(std::iter::repeat(2).take(long_chains - inner.singular_blocks.len()));
    blocks.extend(std::iter::repeat(1).take(r - long_chains));
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    RegularDecomposition { regular: inner.regular, singular_blocks: blocks }
}

/// `M⁻ᵀM`.
pub fn cosquare(m: &QMatrix) -> Result<QMatrix, CongruenceError> {
    check_square(m)?;
    let inv = m.inverse().ok_or(CongruenceError::Singular)?;
    Ok(inv.transpose().mul(m))
}

fn poly_det(m: &[Vec<UniPoly>]) -> UniPoly {
    match m.len() {
        0 => UniPoly::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = UniPoly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<UniPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = m[0][j].mul(&poly_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors of `xI − C` through determinantal divisors.
pub fn invariant_factors(c: &QMatrix) -> Result<SimilarityInvariant, CongruenceError> {
    check_square(c)?;
    let n = c.rows();
    let char_matrix: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let off = UniPoly::constant(-c.get(i, j));
                    if i == j {
                        off.add(&UniPoly::x())
                    } else {
                        off
                    }
                })
                .collect()
        })
        .collect();
    let mut divisors = vec![UniPoly::one()];
    for k in 1..=n {
        let mut g = UniPoly::zero();
        'outer: for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let minor: Vec<Vec<UniPoly>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| char_matrix[i][j].clone()).collect()).collect();
                g = g.gcd(&poly_det(&minor));
                if g.is_one() {
                    break 'outer;
                }
            }
        }
        divisors.push(g);
    }
    let factors = divisors
        .windows(2)
        .map(|w| w[1].div_rem(&w[0]).0)
        .filter(|f| !f.is_one())
        .collect();
    Ok(SimilarityInvariant { invariant_factors: factors })
}

/// Characteristic polynomial `det(xI − C)` by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(c: &QMatrix) -> UniPoly {
    let n = c.rows();
    let mut coeffs = vec![GaussRational::zero(); n + 1];
    coeffs[n] = GaussRational::one();
    let mut mk: QMatrix = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = c.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        mk = next;
        let am = c.mul(&mk);
        let tr = (0..n).fold(GaussRational::zero(), |acc, i| &acc + am.get(i, i));
        coeffs[n - k] = -(&tr / &GaussRational::from_int(k as i64));
    }
    UniPoly::new(coeffs)
}

pub fn congruence_invariant(m: &QMatrix) -> Result<CongruenceInvariant, CongruenceError> {
    check_square(m)?;
    let dec = regular_decomposition(m);
    let core = if dec.regular.rows() == 0 {
        SimilarityInvariant { invariant_factors: Vec::new() }
    } else {
        invariant_factors(&cosquare(&dec.regular)?)?
    };
    Ok(CongruenceInvariant { size: m.rows(), singular_blocks: dec.singular_blocks, core })
}

pub fn are_congruent(a: &QMatrix, b: &QMatrix) -> Result<bool, CongruenceError> {
    if a.rows() != b.rows() {
        return Ok(false);
    }
    Ok(congruence_invariant(a)? == congruence_invariant(b)?)
}

fn rank_profile(m: &QMatrix) -> (usize, usize, usize) {
    let t = m.transpose();
    let sum = Matrix::from_rows((0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) + t.get(i, j)).collect()).collect());
    let diff = Matrix::from_rows((0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) - t.get(i, j)).collect()).collect());
    (m.rank(), sum.rank(), diff.rank())
}

/// Roots of `x² − s·x + 1` in ℚ(i), or the polynomial itself when it has none.
fn reciprocal_pair(s: &GaussRational) -> Result<[GaussRational; 2], UniPoly> {
    let disc = &(s * s) - &GaussRational::from_int(4);
    let two = GaussRational::from_int(2);
    match disc.sqrt() {
        Some(d) => Ok([&(s + &d) / &two, &(s - &d) / &two]),
        None => Err(UniPoly::new(vec![GaussRational::one(), -s, GaussRational::one()])),
    }
}

/// Candidate parameter values read off the cosquare of the core: the roots of its
/// characteristic polynomial away from `±1`.
fn parameter_candidates(inv: &CongruenceInvariant) -> Result<BTreeSet<String>, UniPoly> {
    let mut roots: Vec<GaussRational> = Vec::new();
    let mut rest = inv.core.invariant_factors.iter().fold(UniPoly::one(), |acc, f| acc.mul(f));
    for a in [GaussRational::one(), GaussRational::from_int(-1)] {
        let lin = UniPoly::linear(&a);
        while !rest.is_zero() && rest.degree() > Some(0) && lin.divides(&rest) {
            rest = rest.div_rem(&lin).0;
        }
    }
    match rest.degree() {
        Some(2) => roots.extend(reciprocal_pair(&-rest.coeff(1))?),
        Some(4) => {
            // x⁻²R(x) = y² + a₃y + (a₂ − 2) with y = x + 1/x
            let (a3, a2) = (rest.coeff(3), rest.coeff(2));
            let disc = &(&a3 * &a3) - &(&GaussRational::from_int(4) * &(&a2 - &GaussRational::from_int(2)));
            let d = disc.sqrt().ok_or_else(|| rest.clone())?;
            let two = GaussRational::from_int(2);
            for s in [&(&-&a3 + &d) / &two, &(&-&a3 - &d) / &two] {
                roots.extend(reciprocal_pair(&s)?);
            }
        }
        Some(0) | None => {}
        Some(_) => return Err(rest),
    }
    let mut out: BTreeSet<String> = roots.iter().map(|r| r.to_string()).collect();
    for v in ["0", "1", "-1"] {
        out.insert(v.to_string());
    }
    Ok(out)
}

/// Classifies a 4×4 matrix to its normalized catalog type.
pub fn classify_matrix(m: &QMatrix) -> Result<CanonicalType, CongruenceError> {
    check_square(m)?;
    if m.rows() != 4 {
        return Err(CongruenceError::WrongSize { expected: 4, found: m.rows() });
    }
    let inv = congruence_invariant(m)?;
    let profile = rank_profile(m);
    let cands: Vec<GaussRational> = match parameter_candidates(&inv) {
        Ok(c) => c.iter().map(|s| parse_constant(s).expect("printed constant")).collect(),
        Err(p) => {
            return Err(CongruenceError::ParameterNotInBaseField {
                family: family_for_irrational(&inv),
                minimal_polynomial: p.to_string(),
            })
        }
    };
    for family in Family::ALL {
        let combos: Vec<Vec<GaussRational>> = match family.arity() {
            0 => vec![vec![]],
            1 => cands.iter().map(|x| vec![x.clone()]).collect(),
            _ => cands.iter().flat_map(|x| cands.iter().map(move |y| vec![x.clone(), y.clone()])).collect(),
        };
        for c in combos {
            let Ok(t) = CanonicalType::with_constants(family, &c) else { continue };
            let t = normalize_parameters(&t).expect("constant parameters");
            let cm = constant_matrix(&canonical_matrix(&t))?;
            if rank_profile(&cm) != profile {
                continue;
            }
            if congruence_invariant(&cm)? == inv {
                return Ok(t);
            }
        }
    }
    Err(CongruenceError::Unmatched)
}

/// Best-effort family name for an irrational parameter, from the singular data.
fn family_for_irrational(inv: &CongruenceInvariant) -> String {
    let core = inv.core.invariant_factors.iter().filter_map(|f| f.degree()).sum::<usize>();
    match (inv.singular_blocks.as_slice(), core) {
        ([1, 1], 2) => "H03".into(),
        ([1], 3) => "H05".into(),
        ([], 4) if inv.core.invariant_factors.len() == 1 => "H13".into(),
        ([], 4) => "H09 or H13".into(),
        _ => "H13 or H14".into(),
    }
}
