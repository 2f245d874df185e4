//! The seven acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use degen_core::algebras::derivation_dim;
use degen_core::catalog::{
    canonical_matrix, default_grid, expected_der_dim, grid_types, heisenberg_to_matrix, instantiate,
    matrix_to_heisenberg, matrix_to_ternary, CanonicalType, Family,
};
use degen_core::certificates::{load_corpus, load_dir, verify_all, Certificate, Diagnostic, RunOptions, Status};
use degen_core::congruence::{are_congruent, classify_matrix, congruence_invariant, constant_matrix};
use degen_core::grapher::{assemble_graph, blocked_pairs, consistency_check, transitive_reduction, LEVEL_AXIS};

type Outcome = Result<String, String>;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn certs(sub: &str) -> PathBuf {
    root().join("../../certs").join(sub)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Derivation dimensions against hand-computed values and the closed form.
fn derivation_table() -> Outcome {
    let pinned = [
        ("H01", vec![], 17),
        ("H03", vec!["-1"], 16),
        ("H05", vec!["1"], 12),
        ("H13", vec!["1", "1"], 11),
        ("H13", vec!["-1", "-1"], 15),
        ("ZERO", vec![], 25),
    ];
    for (label, vals, want) in pinned {
        let family = Family::ALL.into_iter().find(|f| f.label() == label).unwrap();
        let names = family.param_names();
        let bindings: Vec<(String, String)> =
            names.iter().zip(&vals).map(|(n, v)| (n.to_string(), v.to_string())).collect();
        let t = CanonicalType::parse(label, &bindings, &[]).map_err(|e| e.to_string())?;
        let got = derivation_dim(&instantiate(&t).map_err(|e| e.to_string())?);
        ensure(got == want, || format!("{t}: dim Der = {got}, expected {want}"))?;
    }
    let mut points: Vec<CanonicalType> = Family::ALL.into_iter().map(CanonicalType::symbolic).collect();
    points.extend(grid_types(&default_grid()));
    for t in &points {
        let got = derivation_dim(&instantiate(t).map_err(|e| e.to_string())?);
        let want = expected_der_dim(t);
        ensure(got == want, || format!("{t}: dim Der = {got}, closed form {want}"))?;
    }
    Ok(format!("{} rank computations agree", points.len() + 6))
}

fn degeneration_corpus() -> Outcome {
    let all = load_dir(&certs("deg")).map_err(|e| e.to_string())?;
    ensure(all.len() == 32, || format!("{} degeneration certificates, expected 32", all.len()))?;
    let reports = verify_all(&all, &RunOptions { trials: 0, ..RunOptions::default() });
    for r in &reports {
        ensure(r.status == Status::Verified, || format!("{} is {:?}", r.id, r.status))?;
    }
    Ok("32/32 verified symbolically and on the grid".into())
}

fn non_degeneration_corpus() -> Outcome {
    let all = load_dir(&certs("nondeg")).map_err(|e| e.to_string())?;
    ensure(all.len() == 12, || format!("{} non-degeneration certificates, expected 12", all.len()))?;
    let reports = verify_all(&all, &RunOptions::default());
    let mut blocked = 0;
    for (c, r) in all.iter().zip(&reports) {
        match c {
            Certificate::ClosedSet(_) => {
                let (last, rest) = r.verdicts.split_last().unwrap();
                for v in rest {
                    ensure(v.status == Status::Verified, || format!("{}: {} is {:?}", r.id, v.subject, v.status))?;
                }
                ensure(last.status == Status::Inconclusive, || format!("{}: falsifier {:?}", r.id, last.status))?;
                for d in &last.diagnostics {
                    match d {
                        Diagnostic::FalsifierSummary { trials: 1000, .. } => blocked += 1,
                        other => return Err(format!("{}: {other:?}", r.id)),
                    }
                }
            }
            _ => ensure(r.status == Status::Verified, || format!("{} is {:?}", r.id, r.status))?,
        }
    }
    Ok(format!("12/12 hold; 0 falsifier witnesses over {blocked} blocked pairs at 1000 trials, seed 0"))
}

fn graph() -> Outcome {
    let all = load_corpus(&certs("")).map_err(|e| e.to_string())?;
    let reports = verify_all(&all, &RunOptions { trials: 0, ..RunOptions::default() });
    let grid = default_grid();
    let g = assemble_graph(&all, &reports, &grid).map_err(|e| e.to_string())?;
    let r = transitive_reduction(&g).map_err(|e| e.to_string())?;
    let got: BTreeSet<(String, String)> = r.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
    let text = std::fs::read_to_string(root().join("tests/golden/hasse_edges.txt")).map_err(|e| e.to_string())?;
    let want: BTreeSet<(String, String)> = text
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once(" -> ").map(|(a, b)| (a.to_string(), b.to_string())))
        .collect();
    ensure(got == want, || {
        format!(
            "extra {:?}, missing {:?}",
            got.difference(&want).collect::<Vec<_>>(),
            want.difference(&got).collect::<Vec<_>>()
        )
    })?;
    let report = consistency_check(&g, &blocked_pairs(&all, &grid).map_err(|e| e.to_string())?);
    ensure(report.is_clean(), || format!("{:?}", report.violations))?;
    let levels: BTreeSet<usize> = g.nodes().iter().map(|n| n.level).collect();
    ensure(levels == LEVEL_AXIS.into_iter().collect(), || format!("levels {levels:?}"))?;
    Ok(format!("{} reduced edges match the golden list; consistency clean over {} nodes", got.len(), g.nodes().len()))
}

fn classification() -> Outcome {
    let types = grid_types(&default_grid());
    let mats = types
        .iter()
        .map(|t| constant_matrix(&canonical_matrix(t)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    for (t, m) in types.iter().zip(&mats) {
        let got = classify_matrix(m).map_err(|e| format!("{t}: {e}"))?;
        ensure(&got == t, || format!("{t} classified as {got}"))?;
    }
    let invariants = mats.iter().map(congruence_invariant).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let same = are_congruent(&mats[i], &mats[j]).map_err(|e| e.to_string())?;
            ensure(!same && invariants[i] != invariants[j], || format!("{} ≅ {}", types[i], types[j]))?;
            pairs += 1;
        }
    }
    for (k, m) in mats.iter().enumerate() {
        let t = &types[k];
        common::runner(5000 + k as u64, 100)
            .run(&common::invertible(4), |s| {
                let got = classify_matrix(&s.mul(m).mul(&s.transpose()))
                    .map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
                proptest::prop_assert_eq!(&got, t);
                Ok(())
            })
            .map_err(|e| format!("{t}: {e}"))?;
    }
    Ok(format!("{} fixed points, {pairs} pairs non-congruent, 100 transports per type", types.len()))
}

/// The printed 3-ary tables, transcribed term for term.
const TERNARY: &[(&str, &[&str])] = &[
    ("H01", &["[e2,e3,e4] = e1"]),
    ("H02", &["[e1,e3,e4] = -e1 - e2", "[e2,e3,e4] = -e2"]),
    ("H03(λ)", &["[e1,e3,e4] = -λ*e1", "[e2,e3,e4] = e2"]),
    ("H04", &["[e1,e2,e4] = e2 + e3", "[e1,e3,e4] = e3", "[e2,e3,e4] = e1"]),
    ("H05(λ)", &["[e1,e2,e4] = λ*e2", "[e1,e3,e4] = -e3", "[e2,e3,e4] = e1"]),
    ("H06", &["[e1,e3,e4] = -e3", "[e2,e3,e4] = e2"]),
    ("H07", &["[e1,e2,e4] = -e1 - e2", "[e1,e3,e4] = e2 + e3", "[e2,e3,e4] = e3"]),
    ("H08", &["[e1,e2,e3] = -e1 - e2", "[e1,e2,e4] = -e2 - e3", "[e1,e3,e4] = -e3 - e4", "[e2,e3,e4] = -e4"]),
    ("H09(λ)", &["[e1,e2,e3] = -λ*e2", "[e1,e2,e4] = λ*e1 + e2", "[e1,e3,e4] = -e4", "[e2,e3,e4] = e3"]),
    ("H10", &["[e1,e2,e4] = e4", "[e1,e3,e4] = -e3", "[e2,e3,e4] = e1"]),
    ("H11", &["[e1,e2,e3] = -e2 - e3", "[e1,e2,e4] = -e3 - e4", "[e1,e3,e4] = -e4", "[e2,e3,e4] = e1"]),
    ("H12", &["[e1,e2,e3] = -e3 - e4", "[e1,e2,e4] = -e4", "[e1,e3,e4] = -e1 - e2", "[e2,e3,e4] = -e2"]),
    ("H13(λ;μ)", &["[e1,e2,e3] = -λ*e3", "[e1,e2,e4] = e4", "[e1,e3,e4] = -μ*e1", "[e2,e3,e4] = e2"]),
    ("H14(λ)", &["[e1,e2,e3] = -e3 - e4", "[e1,e2,e4] = -e4", "[e1,e3,e4] = -λ*e1", "[e2,e3,e4] = e2"]),
    ("H15", &["[e1,e2,e4] = e4", "[e1,e3,e4] = -e3", "[e2,e3,e4] = e2"]),
];

fn correspondence() -> Outcome {
    let mut mismatched = Vec::new();
    for family in Family::ALL.into_iter().filter(|f| *f != Family::Zero) {
        let t = CanonicalType::symbolic(family);
        let label = t.to_string();
        let (_, want) = TERNARY.iter().find(|(l, _)| *l == label).ok_or_else(|| format!("no printed table for {label}"))?;
        let got = matrix_to_ternary(&canonical_matrix(&t)).table();
        if got != *want {
            mismatched.push(format!("{label}: printed {want:?}, computed {got:?}"));
        }
    }
    for t in grid_types(&default_grid()) {
        let m = canonical_matrix(&t);
        let (back, _) = heisenberg_to_matrix(&matrix_to_heisenberg(&m)).map_err(|e| e.to_string())?;
        let (q, qb) = (constant_matrix(&m).unwrap(), constant_matrix(&back).unwrap());
        ensure(are_congruent(&q, &qb).map_err(|e| e.to_string())?, || format!("{t}: roundtrip left its class"))?;
    }
    common::heisenberg_roundtrip(6001, 100)?;
    common::heisenberg_equivariance(6002, 100)?;
    ensure(mismatched.is_empty(), || format!("{} of 15 tables differ: {}", mismatched.len(), mismatched.join("; ")))?;
    Ok("15/15 tables sign-exact; roundtrip and equivariance hold on 100 samples".into())
}

fn property_suites() -> Outcome {
    let suites: [(&str, fn(u64, u32) -> Result<(), String>); 7] = [
        ("ℚ(i) field axioms", common::gauss_field_axioms),
        ("ℚ(i)(λ,μ) field axioms", common::ratfun_field_axioms),
        ("action laws", common::action_laws),
        ("basis invariance", common::invariant_basis_invariance),
        ("derivation bracket", common::derivation_bracket_closure),
        ("reduction/closure", common::reduction_closure_idempotence),
        ("congruence transport", common::congruence_transport),
    ];
    for (k, (name, run)) in suites.iter().enumerate() {
        run(7000 + k as u64, common::CASES).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites × {} cases, no failures", suites.len(), common::CASES))
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, Duration); 7] = [
        (derivation_table, Duration::from_secs(10)),
        (degeneration_corpus, Duration::from_secs(60)),
        (non_degeneration_corpus, Duration::from_secs(120)),
        (graph, Duration::from_secs(30)),
        (classification, Duration::from_secs(60)),
        (correspondence, Duration::from_secs(30)),
        (property_suites, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let over = if start.elapsed() > *budget { format!(", over the {}s estimate", budget.as_secs()) } else { String::new() };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {msg} ({secs:.1}s{over})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {msg} ({secs:.1}s{over})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
