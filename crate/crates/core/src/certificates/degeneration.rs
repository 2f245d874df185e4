use rayon::prelude::*;

use super::necessary::check_necessary;
use super::schema::{
    format_assignment, parse_matrix, specialize, specialize_matrix, Assignment, DegenerationCert, Domain, TypeSpec,
};
use super::{CertError, Diagnostic, Status, Verdict};
use crate::algebras::{change_basis, BasisChange};
use crate::catalog::{instantiate, CanonicalType};
use crate::scalars::{canonical_name, limit_at_zero, Limit, Matrix, RationalFunction, Var};

struct Prepared {
    source: CanonicalType,
    target: CanonicalType,
    basis: Matrix<RationalFunction>,
    domain: Domain,
}

fn prepare(cert: &DegenerationCert) -> Result<Prepared, CertError> {
    let symbols: Vec<String> = cert.symbols.iter().map(|s| canonical_name(s).to_string()).collect();
    let source = cert.source.resolve(&symbols)?;
    let mut target_spec: TypeSpec = cert.target.clone();
    target_spec.params.extend(cert.param_map.iter().map(|(k, v)| (k.clone(), v.clone())));
    let target = target_spec.resolve(&symbols)?;
    let mut with_t = symbols.clone();
    with_t.push("t".into());
    let basis = parse_matrix(&cert.basis, &with_t)?;
    if basis.rows() != 5 {
        return Err(CertError::Schema(format!("basis must be 5×5, got {}×{}", basis.rows(), basis.cols())));
    }
    let domain = Domain::new(&symbols, cert.source.excluded.as_ref(), &cert.source.conditions)?;
    Ok(Prepared { source, target, basis, domain })
}

enum PointOutcome {
    Checked(Vec<Diagnostic>),
    Skipped(String),
}

/// Limit table of `source` in `basis` against `target`, at one assignment of the symbols.
fn check_point(p: &Prepared, a: &Assignment, necessary: bool) -> PointOutcome {
    let label = format_assignment(a);
    let Some(src) = specialize(&p.source, a) else {
        return PointOutcome::Skipped(format!("{label}: source undefined or excluded"));
    };
    let Some(tgt) = specialize(&p.target, a) else {
        return PointOutcome::Skipped(format!("{label}: target undefined or excluded"));
    };
    let Some(basis) = specialize_matrix(&p.basis, a) else {
        return PointOutcome::Skipped(format!("{label}: basis has a pole"));
    };
    let Ok(g) = BasisChange::new(basis) else {
        return PointOutcome::Checked(vec![Diagnostic::SingularBasis { point: label }]);
    };
    let (Ok(a_src), Ok(a_tgt)) = (instantiate(&src), instantiate(&tgt)) else {
        return PointOutcome::Skipped(format!("{label}: not instantiable"));
    };
    let moved = change_basis(&a_src, &g).expect("sizes checked");
    let t = Var::t();
    let mut out = Vec::new();
    let n = moved.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let expected = a_tgt.get(i, j, k);
                let entry = [i + 1, j + 1, k + 1];
                match moved.get_ref(i, j, k).map(|v| limit_at_zero(v, &t)) {
                    None if expected.is_zero() => {}
                    None => out.push(Diagnostic::LimitMismatch {
                        point: label.clone(),
                        entry,
                        expected: expected.to_string(),
                        found: "0".into(),
                    }),
                    Some(Limit::Diverges) => out.push(Diagnostic::LimitDiverges {
                        point: label.clone(),
                        entry,
                        value: moved.get(i, j, k).to_string(),
                    }),
                    Some(Limit::Finite(v)) if v == expected => {}
                    Some(Limit::Finite(v)) => out.push(Diagnostic::LimitMismatch {
                        point: label.clone(),
                        entry,
                        expected: expected.to_string(),
                        found: v.to_string(),
                    }),
                }
            }
        }
    }
    if necessary && out.is_empty() {
        let nec = check_necessary(&src, &tgt);
        if nec.status != Status::Verified {
            out.extend(nec.diagnostics.into_iter().filter(|d| matches!(d, Diagnostic::Necessary { holds: false, .. })));
        }
    }
    PointOutcome::Checked(out)
}

/// Values of `t ≠ 0` where the basis determinant vanishes.
fn exceptional_values(basis: &Matrix<RationalFunction>) -> Vec<String> {
    let det = basis.det();
    let t = Var::t();
    let coeffs = det.numer().coeffs_in(&t);
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let rest = &coeffs[low..];
    match rest.len() {
        0 | 1 => Vec::new(),
        2 => {
            let root = -&(&RationalFunction::from_poly(rest[0].clone()) / &RationalFunction::from_poly(rest[1].clone()));
            vec![root.to_string()]
        }
        _ => {
            let p = crate::scalars::Polynomial::from_coeffs_in(&t, rest);
            vec![format!("roots of {p}")]
        }
    }
}

/// Checks the parametric basis: symbolically in the certificate's symbols, then at every
/// admissible grid point, where the invariant battery must also agree.
pub fn verify_degeneration(cert: &DegenerationCert, grid: &[crate::scalars::GaussRational]) -> Verdict {
    let p = match prepare(cert) {
        Ok(p) => p,
        Err(e) => {
            return Verdict::new(cert.id.clone(), Status::Failed, vec![Diagnostic::Note { message: e.to_string() }])
        }
    };
    let subject = format!("{}: {} → {}", cert.id, p.source, p.target);
    let mut diags = Vec::new();
    let mut failed = false;
    match check_point(&p, &Assignment::new(), false) {
        PointOutcome::Checked(d) => {
            failed |= !d.is_empty();
            diags.extend(d);
        }
        PointOutcome::Skipped(why) => {
            failed = true;
            diags.push(Diagnostic::Note { message: why });
        }
    }
    let exceptional = exceptional_values(&p.basis);
    if !exceptional.is_empty() {
        diags.push(Diagnostic::ExceptionalValues { values: exceptional });
    }
    let points = p.domain.grid_points(grid, &Assignment::new());
    let outcomes: Vec<PointOutcome> = points.par_iter().map(|a| check_point(&p, a, true)).collect();
    let mut checked = 0;
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            PointOutcome::Checked(d) => {
                checked += 1;
                failed |= !d.is_empty();
                diags.extend(d);
            }
            PointOutcome::Skipped(why) => skipped.push(why),
        }
    }
    diags.push(Diagnostic::GridSummary { checked, skipped });
    Verdict::new(subject, if failed { Status::Failed } else { Status::Verified }, diags)
}

/// A grid specialization of a degeneration certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationInstance {
    pub point: Assignment,
    pub source: CanonicalType,
    pub target: CanonicalType,
    /// Target parameters in terms of the source's, e.g. `λ'=λ, μ'=λ`.
    pub label: String,
}

/// Source and target at every admissible grid point (the generic point when there are no
/// symbols); points where either side is undefined are dropped.
pub fn degeneration_instances(
    cert: &DegenerationCert,
    grid: &[crate::scalars::GaussRational],
) -> Result<Vec<DegenerationInstance>, CertError> {
    let p = prepare(cert)?;
    let label = cert.param_map.iter().map(|(k, v)| format!("{}'={}", canonical_name(k), v)).collect::<Vec<_>>().join(", ");
    Ok(p.domain
        .grid_points(grid, &Assignment::new())
        .into_iter()
        .filter_map(|a| {
            let source = specialize(&p.source, &a)?;
            let target = specialize(&p.target, &a)?;
            specialize_matrix(&p.basis, &a).and_then(|b| BasisChange::new(b).ok())?;
            Some(DegenerationInstance { point: a, source, target, label: label.clone() })
        })
        .collect())
}
