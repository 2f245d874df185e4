//! Multivariate gcd over ℚ(i): recursive content extraction plus a primitive
//! pseudo-remainder sequence in the most significant variable.

use super::{Monomial, Polynomial, Var};

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() || a == b {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    if let Some((m, _)) = a.as_monomial() {
        return monomial_gcd(m, b);
    }
    if let Some((m, _)) = b.as_monomial() {
        return monomial_gcd(m, a);
    }
    let x = a
        .vars()
        .into_iter()
        .chain(b.vars())
        .min()
        .expect("nonconstant polynomials have variables");
    if !a.contains_var(&x) {
        return gcd(a, &content(b, &x));
    }
    if !b.contains_var(&x) {
        return gcd(&content(a, &x), b);
    }
    let ca = content(a, &x);
    let cb = content(b, &x);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = if pa.degree_in(&x) >= pb.degree_in(&x) {
        primitive_prs(pa, pb, &x)
    } else {
        primitive_prs(pb, pa, &x)
    };
    (&c * &g).monic()
}

fn monomial_gcd(m: &Monomial, p: &Polynomial) -> Polynomial {
    let mut g = m.clone();
    for (n, _) in p.terms() {
        g = g.gcd(n);
        if g.is_one() {
            break;
        }
    }
    Polynomial::term(super::GaussRational::one(), g)
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub fn content(p: &Polynomial, x: &Var) -> Polynomial {
    let mut g = Polynomial::zero();
    for c in p.coeffs_in(x).into_iter().rev() {
        if c.is_zero() {
            continue;
        }
        if c.is_constant() {
            return Polynomial::one();
        }
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Polynomial, x: &Var) -> Polynomial {
    let c = content(p, x);
    p.div_exact(&c).expect("content divides")
}

fn leading_coeff_in(p: &Polynomial, x: &Var) -> Polynomial {
    p.coeffs_in(x).pop().unwrap_or_default()
}

/// Pseudo-remainder of `f` by `g` in `x`.
pub fn pseudo_remainder(f: &Polynomial, g: &Polynomial, x: &Var) -> Polynomial {
    let dg = g.degree_in(x);
    let lg = leading_coeff_in(g, x);
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(x) >= dg {
        let dr = r.degree_in(x);
        let lr = leading_coeff_in(&r, x);
        let shift = Polynomial::term(super::GaussRational::one(), Monomial::var(x.clone(), dr - dg));
        r = &(&lg * &r) - &(&(&lr * &shift) * g);
    }
    r
}

fn primitive_prs(mut f: Polynomial, mut g: Polynomial, x: &Var) -> Polynomial {
    loop {
        let r = pseudo_remainder(&f, &g, x);
        if r.is_zero() {
            return g;
        }
        if r.degree_in(x) == 0 {
            return Polynomial::one();
        }
        f = g;
        g = primitive_part(&r, x);
    }
}
