use super::{Diagnostic, Status, Verdict};
use crate::algebras::{derivation_dim, square_dim, symmetry_type, z_xi_dim};
use crate::catalog::{instantiate, CanonicalType};
use crate::scalars::RationalFunction;

/// Semicontinuity battery for a hypothetical proper degeneration `a → b`. Failed means some
/// invariant rules the degeneration out.
pub fn check_necessary(a: &CanonicalType, b: &CanonicalType) -> Verdict {
    let subject = format!("{a} → {b}");
    let (alg_a, alg_b) = match (instantiate(a), instantiate(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            return Verdict::new(subject, Status::Failed, vec![Diagnostic::Note { message: e.to_string() }])
        }
    };
    let (sa, sb) = (a.to_string(), b.to_string());
    let mut diags = Vec::new();
    let mut push = |check: String, holds: bool, detail: String| {
        diags.push(Diagnostic::Necessary { check, source: sa.clone(), target: sb.clone(), holds, detail });
    };

    let (da, db) = (derivation_dim(&alg_a), derivation_dim(&alg_b));
    push("dim Der".into(), da < db, format!("{da} < {db}"));

    let mut xis = vec![RationalFunction::one(), RationalFunction::from_int(-1)];
    for p in a.params.iter().chain(&b.params) {
        if !xis.contains(p) {
            xis.push(p.clone());
        }
    }
    for xi in &xis {
        let (za, zb) = (z_xi_dim(&alg_a, xi), z_xi_dim(&alg_b, xi));
        push(format!("dim Z_{xi}"), za <= zb, format!("{za} ≤ {zb}"));
    }

    let (qa, qb) = (square_dim(&alg_a), square_dim(&alg_b));
    push("dim A²".into(), qa >= qb, format!("{qa} ≥ {qb}"));

    let (ya, yb) = (symmetry_type(&alg_a), symmetry_type(&alg_b));
    push("symmetry".into(), !ya.is_symmetric() || yb.is_symmetric(), format!("{ya} then {yb}"));
    push("antisymmetry".into(), !ya.is_antisymmetric() || yb.is_antisymmetric(), format!("{ya} then {yb}"));

    let ok = diags.iter().all(|d| matches!(d, Diagnostic::Necessary { holds: true, .. }));
    Verdict::new(subject, if ok { Status::Verified } else { Status::Failed }, diags)
}
