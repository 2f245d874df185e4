use std::fmt;

use super::GaussRational;

/// Dense polynomial in `x` over ℚ(i), coefficients from the constant term up, with no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(Vec<GaussRational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        UniPoly(vec![GaussRational::zero(), GaussRational::one()])
    }

    /// `x - a`.
    pub fn linear(a: &GaussRational) -> Self {
        UniPoly(vec![-a, GaussRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> GaussRational {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> GaussRational {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; `d` must be nonzero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.leading().inv().expect("nonzero");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![GaussRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    let v = &r[k + j] - &(&c * b);
                    r[k + j] = v;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn divides(&self, o: &Self) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.rem(self).is_zero()
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &GaussRational) -> GaussRational {
        self.0.iter().rev().fold(GaussRational::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `x^deg · p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.0.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussRational::from_int(k as i64))
                .collect(),
        )
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_real() && num_traits::Signed::is_negative(c.re());
            let mag = if neg { -c } else { c.clone() };
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            let coeff = if mag.is_real() { mag.to_string() } else { format!("({mag})") };
            let body = if k == 0 {
                coeff
            } else if mag.is_one() {
                mono
            } else {
                format!("{coeff}*{mono}")
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussRational {
        GaussRational::from_int(n)
    }

    #[test]
    fn division_and_gcd() {
        let a = UniPoly::linear(&q(1)).mul(&UniPoly::linear(&q(2)));
        let b = UniPoly::linear(&q(1)).mul(&UniPoly::linear(&q(-3)));
        assert_eq!(a.gcd(&b), UniPoly::linear(&q(1)));
        let (qq, r) = a.div_rem(&UniPoly::linear(&q(2)));
        assert_eq!(qq, UniPoly::linear(&q(1)));
        assert!(r.is_zero());
    }

    #[test]
    fn display() {
        let p = UniPoly::new(vec![q(1), q(-1), q(1)]);
        assert_eq!(p.to_string(), "x^2 - x + 1");
    }
}
