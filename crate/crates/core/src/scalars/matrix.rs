use std::fmt;

use thiserror::Error;

use super::{GaussRational, RationalFunction};

/// The field operations needed by the dense linear algebra below.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `o` must be nonzero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Pivot preference: smaller is simpler.
    fn weight(&self) -> u64;
}

impl Field for GaussRational {
    fn zero() -> Self {
        GaussRational::zero()
    }
    fn one() -> Self {
        GaussRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussRational::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn weight(&self) -> u64 {
        GaussRational::weight(self)
    }
}

impl Field for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn weight(&self) -> u64 {
        RationalFunction::weight(self)
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent linear system")]
    Inconsistent,
}

/// Solution set of `M x = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<F> {
    pub rank: usize,
    pub nullity: usize,
    /// One solution (free variables set to zero).
    pub particular: Vec<F>,
    /// Basis of the solution space of the homogeneous system.
    pub basis: Vec<Vec<F>>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<G: Field, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<Matrix<G>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).add(&a.mul(b));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut m = Self::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn pick_pivot(&self, col: usize, from: usize) -> Option<usize> {
        (from..self.rows)
            .filter(|&i| !self.get(i, col).is_zero())
            .min_by_key(|&i| self.get(i, col).weight())
    }

    /// `row[target] -= factor * row[src]`, touching only columns from `from_col`.
    fn eliminate(&mut self, target: usize, src: usize, factor: &F, from_col: usize) {
        for j in from_col..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, j).sub(&factor.mul(s));
            self.set(target, j, v);
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pick_pivot(c, r) else { continue };
            m.swap_rows(r, p);
            let inv = F::one().div(m.get(r, c));
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    m.eliminate(i, r, &f, c);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pick_pivot(c, r) else { continue };
            m.swap_rows(r, p);
            let piv = m.get(r, c).clone();
            for i in r + 1..m.rows {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c).div(&piv);
                    m.eliminate(i, r, &f, c);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = m.get(r, f).neg();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.submatrix(&rows, &cols))
    }

    pub fn det(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = m.pick_pivot(c, c) else { return F::zero() };
            if p != c {
                m.swap_rows(c, p);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            for i in c + 1..n {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c).div(&piv);
                    m.eliminate(i, c, &f, c);
                }
            }
        }
        det
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Solves `M x = rhs` exactly over the field, dropping zero and duplicate rows first.
pub fn solve_linear_system<F: Field>(m: &Matrix<F>, rhs: &[F]) -> Result<LinearSolution<F>, LinearError> {
    if rhs.len() != m.rows() {
        return Err(LinearError::Dimension(format!(
            "{} rows but right-hand side of length {}",
            m.rows(),
            rhs.len()
        )));
    }
    let n = m.cols();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for i in 0..m.rows() {
        let mut r = m.row(i).to_vec();
        r.push(rhs[i].clone());
        if r.iter().all(|x| x.is_zero()) || rows.contains(&r) {
            continue;
        }
        rows.push(r);
    }
    if rows.is_empty() {
        let basis = (0..n)
            .map(|k| (0..n).map(|j| if j == k { F::one() } else { F::zero() }).collect())
            .collect();
        return Ok(LinearSolution { rank: 0, nullity: n, particular: vec![F::zero(); n], basis });
    }
    let aug = Matrix::from_rows(rows);
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Err(LinearError::Inconsistent);
    }
    let mut particular = vec![F::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = r.get(i, n).clone();
    }
    let coeffs = r.submatrix(&(0..r.rows()).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
    let basis = {
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); n];
                v[f] = F::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = coeffs.get(row, f).neg();
                }
                v
            })
            .collect::<Vec<_>>()
    };
    Ok(LinearSolution { rank: pivots.len(), nullity: basis.len(), particular, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_scalar;

    fn p(s: &str) -> RationalFunction {
        parse_scalar(s, &["t", "λ", "μ"]).unwrap()
    }

    #[test]
    fn identity_system() {
        let m = Matrix::<RationalFunction>::identity(3);
        let s = solve_linear_system(&m, &vec![RationalFunction::zero(); 3]).unwrap();
        assert_eq!((s.rank, s.nullity), (3, 0));
    }

    #[test]
    fn rank_one_outer_product() {
        let m = Matrix::from_rows(vec![vec![p("1"), p("λ")], vec![p("λ"), p("λ^2")]]);
        let s = solve_linear_system(&m, &[p("0"), p("0")]).unwrap();
        assert_eq!((s.rank, s.nullity), (1, 1));
        assert_eq!(s.basis, vec![vec![p("-λ"), p("1")]]);
    }

    #[test]
    fn inconsistent_is_an_outcome() {
        let m = Matrix::from_rows(vec![vec![p("1"), p("1")], vec![p("2"), p("2")]]);
        assert_eq!(solve_linear_system(&m, &[p("1"), p("3")]), Err(LinearError::Inconsistent));
    }

    #[test]
    fn affine_solution() {
        let m = Matrix::from_rows(vec![vec![p("t"), p("1")]]);
        let s = solve_linear_system(&m, &[p("λ")]).unwrap();
        assert_eq!(m.mul_vec(&s.particular), vec![p("λ")]);
        for b in &s.basis {
            assert!(m.mul_vec(b).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_rows(vec![vec![p("t"), p("1")], vec![p("0"), p("λ")]]);
        assert_eq!(m.det(), p("t*λ"));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let s = Matrix::from_rows(vec![vec![p("1"), p("λ")], vec![p("λ"), p("λ^2")]]);
        assert!(s.inverse().is_none());
        assert!(s.det().is_zero());
    }
}
