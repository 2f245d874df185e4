use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use smallvec::SmallVec;

use super::GaussRational;

/// A named indeterminate. Ordered so that `t` is the most significant, then `λ`, `μ`,
/// then everything else alphabetically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn t() -> Self {
        Var::new("t")
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    fn rank(&self) -> u8 {
        match &*self.0 {
            "t" => 0,
            "λ" => 1,
            "μ" => 2,
            _ => 3,
        }
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A power product, stored as `(var, exponent)` pairs sorted by [`Var`] order with
/// positive exponents. Ordered lexicographically with the most significant variable first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 3]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut s = SmallVec::new();
        s.push((v, e));
        Monomial(s)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for (v, e) in self.0.iter() {
            let mut d = 0;
            if j < o.0.len() && o.0[j].0 == *v {
                d = o.0[j].1;
                j += 1;
            } else if j < o.0.len() && o.0[j].0 < *v {
                return None;
            }
            match e.cmp(&d) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((v.clone(), e - d)),
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (v, e) in self.0.iter() {
            let d = o.degree_in(v);
            if d > 0 {
                out.push((v.clone(), (*e).min(d)));
            }
        }
        Monomial(out)
    }

    /// Removes `v` from the monomial, returning its exponent and the rest.
    pub fn split(&self, v: &Var) -> (u32, Monomial) {
        let mut rest = SmallVec::new();
        let mut e = 0;
        for (w, k) in self.0.iter() {
            if w == v {
                e = *k;
            } else {
                rest.push((w.clone(), *k));
            }
        }
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (i < a.len(), j < b.len()) {
                (false, false) => return Ordering::Equal,
                (true, false) => return Ordering::Greater,
                (false, true) => return Ordering::Less,
                (true, true) => match a[i].0.cmp(&b[j].0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        let c = a[i].1.cmp(&b[j].1);
                        if c != Ordering::Equal {
                            return c;
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Sparse multivariate polynomial over ℚ(i). No zero coefficients are stored, so equal
/// polynomials have identical term maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: GaussRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(GaussRational::one(), Monomial::var(v, 1))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }

    pub fn constant_value(&self) -> Option<GaussRational> {
        if self.terms.is_empty() {
            return Some(GaussRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> GaussRational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &GaussRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> GaussRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.factors() {
                out.insert(v.clone());
            }
        }
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Lowest power of `v` occurring; 0 for the zero polynomial.
    pub fn low_degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).min().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &GaussRational, m: &Monomial) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Dense coefficient list in `v`: entry `k` is the coefficient of `v^k`.
    pub fn coeffs_in(&self, v: &Var) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in self.terms.iter() {
            let (e, rest) = m.split(v);
            out[e as usize].terms.insert(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: &Var, coeffs: &[Polynomial]) -> Self {
        let mut terms = BTreeMap::new();
        for (k, p) in coeffs.iter().enumerate() {
            let vk = Monomial::var(v.clone(), k as u32);
            for (m, c) in p.terms.iter() {
                terms.insert(m.mul(&vk), c.clone());
            }
        }
        Polynomial { terms }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        if d.terms.len() == 1 {
            let inv = dc.inv()?;
            let mut terms = BTreeMap::new();
            for (m, c) in self.terms.iter() {
                terms.insert(m.div(dm)?, c * &inv);
            }
            return Some(Polynomial { terms });
        }
        let dinv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc * &dinv;
            rem = &rem - &d.mul_term(&qc, &qm);
            quot.insert(qm, qc);
        }
        Some(Polynomial { terms: quot })
    }

    /// Evaluates the variables in `vals`, leaving the others symbolic.
    pub fn eval_partial(&self, vals: &BTreeMap<Var, GaussRational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms.iter() {
            let mut coeff = c.clone();
            let mut rest = Monomial::one();
            for (v, e) in m.factors() {
                match vals.get(v) {
                    Some(x) => coeff = &coeff * &x.pow(*e),
                    None => rest = rest.mul(&Monomial::var(v.clone(), *e)),
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Size measure used to prefer simple pivots.
    pub fn weight(&self) -> u64 {
        self.terms
            .iter()
            .map(|(m, c)| 1 + m.total_degree() as u64 + c.weight())
            .sum()
    }
}

impl<'a> std::ops::Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (m, c) in small.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in o.terms.iter() {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let mut out = Polynomial::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in o.terms.iter() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

fn coeff_needs_parens(c: &GaussRational) -> bool {
    !c.re().is_zero() && !c.im().is_zero()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let negative = c.is_real() && c.re().is_negative();
            let mag = if negative { -c } else { c.clone() };
            let body = if m.is_one() {
                if coeff_needs_parens(&mag) && !first {
                    format!("({mag})")
                } else {
                    mag.to_string()
                }
            } else if mag.is_one() {
                m.to_string()
            } else if coeff_needs_parens(&mag) {
                format!("({mag})*{m}")
            } else {
                format!("{mag}*{m}")
            };
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Polynomial {
        Polynomial::var(Var::new(n))
    }

    fn c(n: i64) -> Polynomial {
        Polynomial::constant(GaussRational::from_int(n))
    }

    #[test]
    fn variable_order_puts_t_first() {
        let mut vars = vec![Var::new("g"), Var::new("μ"), Var::new("t"), Var::new("λ")];
        vars.sort();
        let names: Vec<_> = vars.iter().map(|v| v.name().to_string()).collect();
        assert_eq!(names, ["t", "λ", "μ", "g"]);
    }

    #[test]
    fn lex_order_t_dominates() {
        let t = Monomial::var(Var::t(), 1);
        let l3 = Monomial::var(Var::new("λ"), 3);
        assert!(t > l3);
        assert!(l3 > Monomial::one());
        let tl = t.mul(&l3);
        assert!(tl > t);
    }

    #[test]
    fn exact_division() {
        let t = v("t");
        let l = v("λ");
        let a = &(&t + &l) * &(&t - &c(1));
        assert_eq!(a.div_exact(&(&t + &l)), Some(&t - &c(1)));
        assert_eq!(a.div_exact(&(&t + &c(2))), None);
    }

    #[test]
    fn display_is_readable() {
        let t = v("t");
        let l = v("λ");
        let p = &(&(&t * &t) - &(&c(3) * &l)) + &c(1);
        assert_eq!(p.to_string(), "t^2 - 3*λ + 1");
    }

    #[test]
    fn coefficient_split() {
        let t = v("t");
        let l = v("λ");
        let p = &(&(&t * &t) * &l) + &l;
        let cs = p.coeffs_in(&Var::t());
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], l);
        assert!(cs[1].is_zero());
        assert_eq!(Polynomial::from_coeffs_in(&Var::t(), &cs), p);
    }
}
