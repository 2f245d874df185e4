use std::collections::BTreeSet;
use std::path::Path;

use degen_core::catalog::{default_grid, CanonicalType, Family};
use degen_core::certificates::{load_corpus, verify_all, RunOptions};
use degen_core::grapher::{
    assemble_graph, blocked_pairs, consistency_check, emit_dot, maximal_nodes, to_json, transitive_reduction, DegenGraph,
    GraphJson, LEVEL_AXIS,
};

/// Arrows of the degeneration figure at grid instantiations, read from `tests/golden/hasse_edges.txt`.
fn golden() -> BTreeSet<(String, String)> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hasse_edges.txt");
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (a, b) = l.split_once(" -> ").unwrap();
            (a.to_string(), b.to_string())
        })
        .collect()
}

fn assembled() -> (DegenGraph, DegenGraph, Vec<degen_core::certificates::Certificate>) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../certs");
    let certs = load_corpus(&root).unwrap();
    let reports = verify_all(&certs, &RunOptions { trials: 0, ..RunOptions::default() });
    let g = assemble_graph(&certs, &reports, &default_grid()).unwrap();
    let r = transitive_reduction(&g).unwrap();
    (g, r, certs)
}

#[test]
fn hasse_diagram_matches_golden() {
    let (g, r, certs) = assembled();
    let got: BTreeSet<(String, String)> = r.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
    let want = golden();
    assert_eq!(got.difference(&want).collect::<Vec<_>>(), Vec::<&(String, String)>::new(), "unexpected edges");
    assert_eq!(want.difference(&got).collect::<Vec<_>>(), Vec::<&(String, String)>::new(), "missing edges");

    let report = consistency_check(&g, &blocked_pairs(&certs, &default_grid()).unwrap());
    assert!(report.is_clean(), "{report:#?}");
    let levels: BTreeSet<usize> = g.nodes().iter().map(|n| n.level).collect();
    assert_eq!(levels, LEVEL_AXIS.into_iter().collect());
    let h05_1 = g.nodes().iter().find(|n| n.ty.to_string() == "H05(1)").unwrap();
    assert_eq!(h05_1.level, 12);

    let zero = CanonicalType::plain(Family::Zero);
    assert!(g.nodes().iter().filter(|n| n.ty != zero).all(|n| g.has_edge(&n.ty, &zero)));
    assert!(g.has_edge(&CanonicalType::plain(Family::H02), &CanonicalType::plain(Family::H01)));
}

#[test]
fn maximal_candidates() {
    let (_, r, _) = assembled();
    let got: Vec<String> = maximal_nodes(&r).iter().map(|t| t.to_string()).collect();
    let want = [
        "H08", "H09(1/2)", "H09(i)", "H11", "H13(1;0)", "H13(1;1/2)", "H13(1;i)", "H13(1/2;0)", "H13(1/2;i)", "H13(i;0)",
        "H14(0)", "H14(1)", "H14(1/2)", "H14(i)", "H15",
    ];
    assert_eq!(got, want);
}

#[test]
fn reduction_laws_and_outputs() {
    let (g, r, _) = assembled();
    assert_eq!(transitive_reduction(&r).unwrap(), r);
    let pairs = |x: &DegenGraph| x.edges().map(|(a, b, _)| (a.to_string(), b.to_string())).collect::<BTreeSet<_>>();
    assert_eq!(pairs(&r.closure()), pairs(&g.closure()));
    let dot = emit_dot(&r);
    assert_eq!(dot, emit_dot(&transitive_reduction(&g).unwrap()));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hasse.dot");
    if std::env::var_os("DEGEN_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &dot).unwrap();
    }
    assert_eq!(dot, std::fs::read_to_string(&path).unwrap());
    let json = serde_json::to_string(&to_json(&r)).unwrap();
    let back: GraphJson = serde_json::from_str(&json).unwrap();
    assert_eq!(back, to_json(&r));
    assert_eq!(back.edges.len(), golden().len());
}
