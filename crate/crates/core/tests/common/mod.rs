//! Randomized law checks shared by the `properties` and `acceptance` targets.
//! Every runner uses a fixed seed, so failures replay.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};

use degen_core::algebras::{change_basis, derivations, invariant_summary, is_derivation, Algebra, BasisChange};
use degen_core::catalog::{
    canonical_matrix, default_grid, grid_types, heisenberg_to_matrix, instantiate, matrix_to_heisenberg, CanonicalType,
};
use degen_core::congruence::{classify_matrix, constant_matrix, QMatrix};
use degen_core::grapher::{transitive_reduction, DegenGraph};
use degen_core::scalars::{GaussRational, Matrix, RationalFunction};

pub const CASES: u32 = 128;

pub fn runner(seed: u64, cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        max_global_rejects: 4096,
        ..Config::default()
    })
}

/// Entry pool for random matrices.
pub fn sample(k: usize) -> GaussRational {
    let i = GaussRational::i();
    match k {
        0 => GaussRational::zero(),
        1 => GaussRational::one(),
        2 => GaussRational::from_int(-1),
        3 => GaussRational::from_int(2),
        4 => i,
        5 => -i,
        6 => &GaussRational::one() + &i,
        _ => GaussRational::from_ratio(1, 2),
    }
}

pub fn gauss() -> impl Strategy<Value = GaussRational> {
    (-6i64..=6, 1i64..=5, -6i64..=6, 1i64..=5).prop_map(|(a, b, c, d)| {
        &GaussRational::from_ratio(a, b) + &(&GaussRational::from_ratio(c, d) * &GaussRational::i())
    })
}

fn poly() -> impl Strategy<Value = RationalFunction> {
    prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2), 1..=3).prop_map(|terms| {
        let (l, m) = (RationalFunction::var("λ"), RationalFunction::var("μ"));
        terms.iter().fold(RationalFunction::zero(), |acc, &(c, a, b)| {
            &acc + &(&RationalFunction::from_int(c) * &(&l.pow(a) * &m.pow(b)))
        })
    })
}

/// Rational functions in `λ, μ` with small coefficients.
pub fn ratfun() -> impl Strategy<Value = RationalFunction> {
    (poly(), poly()).prop_filter_map("zero denominator", |(n, d)| n.checked_div(&d).ok())
}

pub fn matrix(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(0usize..8, n * n)
        .prop_map(move |v| Matrix::from_rows(v.chunks(n).map(|c| c.iter().map(|&k| sample(k)).collect()).collect()))
}

pub fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
    matrix(n).prop_filter("singular", |m| !m.det().is_zero())
}

pub fn lift(m: &QMatrix) -> Matrix<RationalFunction> {
    m.map(|x| RationalFunction::constant(x.clone()))
}

fn grid_algebras() -> Vec<(CanonicalType, Algebra)> {
    grid_types(&default_grid())
        .into_iter()
        .map(|t| {
            let a = instantiate(&t).expect("grid type");
            (t, a)
        })
        .collect()
}

fn run<S: Strategy>(
    seed: u64,
    cases: u32,
    s: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(seed, cases).run(&s, f).map_err(|e| e.to_string())
}

pub fn gauss_field_axioms(seed: u64, cases: u32) -> Result<(), String> {
    run(seed, cases, (gauss(), gauss(), gauss()), |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        match a.inv() {
            Some(x) => prop_assert!((&a * &x).is_one()),
            None => prop_assert!(a.is_zero()),
        }
        Ok(())
    })
}

pub fn ratfun_field_axioms(seed: u64, cases: u32) -> Result<(), String> {
    run(seed, cases, (ratfun(), ratfun(), ratfun()), |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        match a.inv() {
            Some(x) => prop_assert!((&a * &x).is_one()),
            None => prop_assert!(a.is_zero()),
        }
        Ok(())
    })
}

/// Identity acts trivially; applying `G` then `H` equals applying `H·G`.
pub fn action_laws(seed: u64, cases: u32) -> Result<(), String> {
    let algs = grid_algebras();
    run(seed, cases, (0..algs.len(), invertible(5), invertible(5)), |(k, g, h)| {
        let a = &algs[k].1;
        prop_assert_eq!(&change_basis(a, &BasisChange::identity(5)).unwrap(), a);
        let (g, h) = (BasisChange::new(lift(&g)).unwrap(), BasisChange::new(lift(&h)).unwrap());
        let stepwise = change_basis(&change_basis(a, &g).unwrap(), &h).unwrap();
        prop_assert_eq!(stepwise, change_basis(a, &h.compose(&g)).unwrap());
        Ok(())
    })
}

/// dim Der, Z_{±1}, square dimension and symmetry type survive a random basis change.
pub fn invariant_basis_invariance(seed: u64, cases: u32) -> Result<(), String> {
    let algs = grid_algebras();
    run(seed, cases, (0..algs.len(), invertible(5)), |(k, g)| {
        let a = &algs[k].1;
        let b = change_basis(a, &BasisChange::new(lift(&g)).unwrap()).unwrap();
        prop_assert_eq!(invariant_summary(a), invariant_summary(&b), "{}", algs[k].0);
        Ok(())
    })
}

/// The commutator of two derivations is a derivation.
pub fn derivation_bracket_closure(seed: u64, cases: u32) -> Result<(), String> {
    let algs: Vec<(Algebra, Vec<Matrix<RationalFunction>>)> =
        grid_algebras().into_iter().map(|(_, a)| { let d = derivations(&a); (a, d) }).collect();
    let coeffs = prop::collection::vec(-2i64..=2, 25);
    run(seed, cases, (0..algs.len(), coeffs.clone(), coeffs), |(k, x, y)| {
        let (a, basis) = &algs[k];
        let combo = |c: &[i64]| {
            basis.iter().zip(c).fold(Matrix::zeros(5, 5), |acc: Matrix<RationalFunction>, (d, &t)| {
                let s = d.scale(&RationalFunction::from_int(t));
                Matrix::from_rows(
                    acc.to_rows().iter().zip(s.to_rows()).map(|(r, q)| r.iter().zip(&q).map(|(u, v)| u + v).collect()).collect(),
                )
            })
        };
        let (d1, d2) = (combo(&x), combo(&y));
        prop_assert!(is_derivation(a, &d1) && is_derivation(a, &d2));
        let (p, q) = (d1.mul(&d2), d2.mul(&d1));
        let bracket = Matrix::from_rows(
            p.to_rows().iter().zip(q.to_rows()).map(|(r, s)| r.iter().zip(&s).map(|(u, v)| u - v).collect()).collect(),
        );
        prop_assert!(is_derivation(a, &bracket));
        Ok(())
    })
}

/// Reduction is idempotent and keeps the closure; closure is idempotent.
pub fn reduction_closure_idempotence(seed: u64, cases: u32) -> Result<(), String> {
    let types: Vec<CanonicalType> = grid_types(&default_grid()).into_iter().take(8).collect();
    let n = types.len();
    run(seed, cases, prop::collection::vec(any::<bool>(), n * (n - 1) / 2), |bits| {
        let mut g = DegenGraph::new();
        for t in &types {
            g.add_node(t).unwrap();
        }
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        for ((i, j), on) in pairs.zip(bits) {
            if on {
                g.add_edge(&types[i], &types[j], "random", "").unwrap();
            }
        }
        let edge_set = |x: &DegenGraph| x.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect::<BTreeSet<_>>();
        let r = transitive_reduction(&g).unwrap();
        prop_assert_eq!(&transitive_reduction(&r).unwrap(), &r);
        prop_assert_eq!(edge_set(&r.closure()), edge_set(&g.closure()));
        prop_assert_eq!(edge_set(&g.closure().closure()), edge_set(&g.closure()));
        prop_assert!(edge_set(&r).is_subset(&edge_set(&g)));
        Ok(())
    })
}

/// `S M Sᵀ` reclassifies to the type of `M`.
pub fn congruence_transport(seed: u64, cases: u32) -> Result<(), String> {
    let types = grid_types(&default_grid());
    run(seed, cases, (0..types.len(), invertible(4)), |(k, s)| {
        let m = constant_matrix(&canonical_matrix(&types[k])).unwrap();
        let moved = s.mul(&m).mul(&s.transpose());
        prop_assert_eq!(classify_matrix(&moved).unwrap(), types[k].clone());
        Ok(())
    })
}

/// Basis change by `S ⊕ 1` on the Heisenberg algebra of `M` gives the algebra of `S M Sᵀ`.
pub fn heisenberg_equivariance(seed: u64, cases: u32) -> Result<(), String> {
    run(seed, cases, (matrix(4), invertible(4)), |(m, s)| {
        let g = BasisChange::new(lift(&s.direct_sum(&Matrix::identity(1)))).unwrap();
        let moved = change_basis(&matrix_to_heisenberg(&lift(&m)), &g).unwrap();
        prop_assert_eq!(moved, matrix_to_heisenberg(&lift(&s.mul(&m).mul(&s.transpose()))));
        Ok(())
    })
}

/// Matrix to algebra and back is the identity; from a transported algebra the returned
/// basis carries it onto the algebra of the returned matrix.
pub fn heisenberg_roundtrip(seed: u64, cases: u32) -> Result<(), String> {
    run(seed, cases, (matrix(4), invertible(5)), |(m, g)| {
        let m = lift(&m);
        let a = matrix_to_heisenberg(&m);
        prop_assert_eq!(&heisenberg_to_matrix(&a).unwrap().0, &m);
        let moved = change_basis(&a, &BasisChange::new(lift(&g)).unwrap()).unwrap();
        let (back, basis) = heisenberg_to_matrix(&moved).unwrap();
        prop_assert_eq!(change_basis(&moved, &basis).unwrap(), matrix_to_heisenberg(&back));
        Ok(())
    })
}
