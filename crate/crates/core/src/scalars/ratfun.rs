use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gcd::gcd;
use super::{GaussRational, Polynomial, ScalarError, Var};

/// A quotient of polynomials in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Result of [`limit_at_zero`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(RationalFunction),
    Diverges,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    /// Builds `num / den` and normalizes it.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        Self::with_monic_den(num, den)
    }

    fn with_monic_den(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            return RationalFunction { num, den };
        }
        let inv = lc.inv().expect("nonzero denominator");
        RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        RationalFunction {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussRational::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(Polynomial::var(Var::new(name)))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<GaussRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::with_monic_den(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Size measure used to prefer simple pivots; 0 for nonzero constants.
    pub fn weight(&self) -> u64 {
        if self.is_constant() {
            return 0;
        }
        self.num.weight() + self.den.weight()
    }

    /// Homomorphic substitution of the bound variables.
    pub fn substitute(&self, bindings: &BTreeMap<Var, RationalFunction>) -> Result<Self, ScalarError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let consts: Option<BTreeMap<Var, GaussRational>> = bindings
            .iter()
            .map(|(v, f)| f.as_constant().map(|c| (v.clone(), c)))
            .collect();
        if let Some(consts) = consts {
            let num = self.num.eval_partial(&consts);
            let den = self.den.eval_partial(&consts);
            if den.is_zero() {
                return Err(ScalarError::DenominatorVanishes);
            }
            return Ok(Self::normalized(num, den));
        }
        let num = substitute_poly(&self.num, bindings);
        let den = substitute_poly(&self.den, bindings);
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        Ok(&num / &den)
    }

    /// Evaluates at a constant point, if the denominator survives.
    pub fn eval(&self, vals: &BTreeMap<Var, GaussRational>) -> Result<Self, ScalarError> {
        let b = vals
            .iter()
            .map(|(v, c)| (v.clone(), RationalFunction::constant(c.clone())))
            .collect();
        self.substitute(&b)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        if o.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(self * &o.inv().expect("nonzero"))
    }
}

fn substitute_poly(p: &Polynomial, b: &BTreeMap<Var, RationalFunction>) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for (m, c) in p.terms() {
        let mut term = RationalFunction::constant(c.clone());
        for (v, e) in m.factors() {
            let f = match b.get(v) {
                Some(f) => f.pow(*e),
                None => RationalFunction::from_poly(Polynomial::term(
                    GaussRational::one(),
                    super::Monomial::var(v.clone(), *e),
                )),
            };
            term = &term * &f;
        }
        acc = &acc + &term;
    }
    acc
}

/// Limit as `var → 0`: zero for positive valuation, the ratio of lowest coefficients at
/// valuation zero, and `Diverges` for negative valuation.
pub fn limit_at_zero(f: &RationalFunction, var: &Var) -> Limit {
    if f.num.is_zero() {
        return Limit::Finite(RationalFunction::zero());
    }
    let vn = f.num.low_degree_in(var);
    let vd = f.den.low_degree_in(var);
    if vn > vd {
        return Limit::Finite(RationalFunction::zero());
    }
    if vn < vd {
        return Limit::Diverges;
    }
    let n0 = f.num.coeffs_in(var).swap_remove(vn as usize);
    let d0 = f.den.coeffs_in(var).swap_remove(vd as usize);
    Limit::Finite(&RationalFunction::from_poly(n0) / &RationalFunction::from_poly(d0))
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RationalFunction::from_poly(&self.num + &o.num);
            }
            return RationalFunction::normalized(&self.num + &o.num, self.den.clone());
        }
        if self.den.is_one() {
            let num = &(&self.num * &o.den) + &o.num;
            return RationalFunction::with_monic_den(num, o.den.clone());
        }
        if o.den.is_one() {
            let num = &self.num + &(&o.num * &self.den);
            return RationalFunction::with_monic_den(num, self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return RationalFunction::with_monic_den(num, &self.den * &o.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = o.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let den = &b1 * &o.den;
        let h = gcd(&num, &g);
        if h.is_one() {
            RationalFunction::with_monic_den(num, den)
        } else {
            RationalFunction::with_monic_den(
                num.div_exact(&h).expect("gcd divides"),
                den.div_exact(&h).expect("gcd divides"),
            )
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        if let Some(c) = self.as_constant() {
            return RationalFunction { num: o.num.scale(&c), den: o.den.clone() };
        }
        if let Some(c) = o.as_constant() {
            return RationalFunction { num: self.num.scale(&c), den: self.den.clone() };
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let split = |p: &Polynomial, g: &Polynomial| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = &split(&self.num, &g1) * &split(&o.num, &g2);
        let den = &split(&self.den, &g2) * &split(&o.den, &g1);
        RationalFunction::with_monic_den(num, den)
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; use [`RationalFunction::checked_div`] otherwise.
    fn div(self, o: &RationalFunction) -> RationalFunction {
        self * &o.inv().expect("division by zero")
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl From<GaussRational> for RationalFunction {
    fn from(c: GaussRational) -> Self {
        Self::constant(c)
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn wrap(p: &Polynomial) -> String {
    if p.num_terms() > 1 || (p.num_terms() == 1 && {
        let (m, c) = p.as_monomial().unwrap();
        !m.is_one() && !c.is_one() || !c.is_real()
    }) {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_scalar;

    fn p(s: &str) -> RationalFunction {
        parse_scalar(s, &["t", "λ", "μ"]).unwrap()
    }

    #[test]
    fn limits() {
        let t = Var::t();
        assert_eq!(limit_at_zero(&p("(t^2+t)/t"), &t), Limit::Finite(p("1")));
        assert_eq!(limit_at_zero(&p("(3*t+λ)/(1+t)"), &t), Limit::Finite(p("λ")));
        assert_eq!(limit_at_zero(&p("1/t"), &t), Limit::Diverges);
        assert_eq!(limit_at_zero(&p("λ*t/(λ+t)"), &t), Limit::Finite(p("0")));
        assert_eq!(limit_at_zero(&p("(λ*t+t^2)/(μ*t+t^3)"), &t), Limit::Finite(p("λ/μ")));
    }

    #[test]
    fn substitution_examples() {
        let l = Var::new("λ");
        let m = Var::new("μ");
        let f = p("(1-λ)/(1+λ)");
        let b = BTreeMap::from([(l.clone(), p("0"))]);
        assert_eq!(f.substitute(&b).unwrap(), p("1"));
        let b = BTreeMap::from([(l.clone(), p("-1"))]);
        assert_eq!(p("1/(1+λ)").substitute(&b), Err(ScalarError::DenominatorVanishes));
        let b = BTreeMap::from([(l.clone(), p("i")), (m, p("2"))]);
        assert_eq!(p("λ*t+μ").substitute(&b).unwrap(), parse_scalar("i*t+2", &["t"]).unwrap());
        let b = BTreeMap::from([(l, p("t^2"))]);
        assert_eq!(p("1/(1+λ)").substitute(&b).unwrap(), p("1/(t^2+1)"));
    }

    #[test]
    fn normalization_cancels() {
        let f = p("(t^2-λ^2)/(t-λ)");
        assert_eq!(f, p("t+λ"));
        let g = p("(2*t)/(4*t*λ)");
        assert_eq!(g, p("1/(2*λ)"));
        assert!(g.denom().leading_coeff().is_one());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["-(1)/((1-λ)*(1+λ)*t^2)", "(1+i)*t/(λ-μ)", "3/2+1/2*i", "t^3-λ"] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s} -> {f}");
        }
    }
}
