use std::path::{Path, PathBuf};

use degen_core::certificates::{load_dir, verify_certificate, Certificate, Diagnostic, RunOptions, Status};

fn certs(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../certs").join(sub)
}

fn errata(name: &str) -> Certificate {
    Certificate::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/errata").join(name)).unwrap()
}

#[test]
fn every_degeneration_verifies() {
    let all = load_dir(&certs("deg")).unwrap();
    assert_eq!(all.len(), 32);
    let opts = RunOptions::default();
    for c in &all {
        let r = verify_certificate(c, &opts);
        assert_eq!(r.status, Status::Verified, "{}: {:#?}", r.id, r.verdicts);
    }
}

#[test]
fn printed_bases_fail() {
    let opts = RunOptions::default();
    for name in ["printed_row27.json", "printed_row29.json"] {
        let r = verify_certificate(&errata(name), &opts);
        assert_eq!(r.status, Status::Failed, "{name}");
        assert!(r.verdicts[0].diagnostics.iter().any(|d| matches!(
            d,
            Diagnostic::LimitMismatch { .. } | Diagnostic::LimitDiverges { .. }
        )));
    }
    let r = verify_certificate(&errata("printed_nondeg04.json"), &opts);
    assert_eq!(r.verdicts[0].status, Status::Failed);
    assert!(r.verdicts[0]
        .diagnostics
        .iter()
        .any(|d| matches!(d, Diagnostic::PatternViolation { equation, residual, .. } if equation == "c^5_{3,3}" && residual == "2")));
}

#[test]
fn every_non_degeneration_holds() {
    let all = load_dir(&certs("nondeg")).unwrap();
    assert_eq!(all.len(), 12);
    let opts = RunOptions::default();
    for c in &all {
        let r = verify_certificate(c, &opts);
        match c {
            Certificate::ClosedSet(_) => {
                let (last, rest) = r.verdicts.split_last().unwrap();
                for v in rest {
                    assert_eq!(v.status, Status::Verified, "{}: {v:#?}", r.id);
                }
                assert_eq!(last.status, Status::Inconclusive, "{}: {last:#?}", r.id);
                assert!(last.diagnostics.iter().all(|d| matches!(d, Diagnostic::FalsifierSummary { trials: 1000, .. })));
            }
            _ => assert_eq!(r.status, Status::Verified, "{}: {:#?}", r.id, r.verdicts),
        }
    }
}
