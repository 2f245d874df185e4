use std::collections::BTreeSet;

use super::schema::{bindings, format_assignment, specialize, symbols_of, Assignment, Domain, InvariantCert, InvariantKind};
use super::{CertError, Diagnostic, Status, Verdict};
use crate::algebras::{derivation_dim, symmetry_type, z_xi_dim, Algebra};
use crate::catalog::instantiate;
use crate::scalars::{canonical_name, parse_scalar, GaussRational, RationalFunction};

/// Value of the certificate's invariant on one algebra, as something comparable.
#[derive(Clone, Debug, PartialEq)]
enum Value {
    Dim(usize),
    Flag(bool),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Dim(d) => write!(f, "{d}"),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

fn evaluate(kind: InvariantKind, xi: Option<&RationalFunction>, a: &Algebra) -> Value {
    match kind {
        InvariantKind::ZXi => Value::Dim(z_xi_dim(a, xi.expect("checked on load"))),
        InvariantKind::Symmetric => Value::Flag(symmetry_type(a).is_symmetric()),
        InvariantKind::Antisymmetric => Value::Flag(symmetry_type(a).is_antisymmetric()),
        InvariantKind::DerivationDim => Value::Dim(derivation_dim(a)),
    }
}

/// Whether the pair `(source, target)` is separated by the invariant.
fn separates(kind: InvariantKind, s: &Value, t: &Value) -> bool {
    match (kind, s, t) {
        (InvariantKind::ZXi, Value::Dim(a), Value::Dim(b)) => a > b,
        (InvariantKind::DerivationDim, Value::Dim(a), Value::Dim(b)) => a >= b,
        (_, Value::Flag(a), Value::Flag(b)) => *a && !*b,
        _ => false,
    }
}

fn claim(kind: InvariantKind, xi: Option<&RationalFunction>) -> String {
    match kind {
        InvariantKind::ZXi => format!("dim Z_{} drops", xi.map(|x| x.to_string()).unwrap_or_default()),
        InvariantKind::Symmetric => "symmetry is lost".into(),
        InvariantKind::Antisymmetric => "antisymmetry is lost".into(),
        InvariantKind::DerivationDim => "dim Der does not grow".into(),
    }
}

/// Every source against every blocked target, generically and on the grid.
pub fn verify_invariant_cert(cert: &InvariantCert, grid: &[GaussRational]) -> Verdict {
    match run(cert, grid) {
        Ok(v) => v,
        Err(e) => Verdict::new(cert.id.clone(), Status::Failed, vec![Diagnostic::Note { message: e.to_string() }]),
    }
}

fn run(cert: &InvariantCert, grid: &[GaussRational]) -> Result<Verdict, CertError> {
    let symbols: Vec<String> = cert.symbols.iter().map(|s| canonical_name(s).to_string()).collect();
    let xi = match (&cert.invariant, &cert.xi) {
        (InvariantKind::ZXi, Some(x)) => Some(parse_scalar(x, &symbols)?),
        (InvariantKind::ZXi, None) => return Err(CertError::Schema("z_xi needs `xi`".into())),
        _ => None,
    };
    let known: BTreeSet<&String> = symbols.iter().collect();
    let mut sources = Vec::new();
    for spec in &cert.sources {
        let t = spec.resolve(&symbols)?;
        let used: Vec<String> = symbols_of(&t).into_iter().filter(|s| known.contains(s)).collect();
        sources.push((t, Domain::new(&used, spec.excluded.as_ref(), &spec.conditions)?));
    }
    let mut blocked = Vec::new();
    for spec in &cert.blocked {
        blocked.push((spec.resolve(&symbols)?, spec.domain()?));
    }

    let mut diags = Vec::new();
    let mut ok = true;
    let mut pairs = 0;
    for (source, sdomain) in &sources {
        let mut points = vec![Assignment::new()];
        points.extend(sdomain.grid_points(grid, &Assignment::new()));
        for a in points {
            let Some(src) = specialize(source, &a) else { continue };
            let xi_here = match &xi {
                Some(x) => match x.substitute(&bindings(&a)) {
                    Ok(v) => Some(v),
                    Err(_) => continue,
                },
                None => None,
            };
            let s_alg = instantiate(&src)?;
            let s_val = evaluate(cert.invariant, xi_here.as_ref(), &s_alg);
            for (target, tdomain) in &blocked {
                let mut tpoints = vec![Assignment::new()];
                tpoints.extend(tdomain.grid_points(grid, &a));
                for b in tpoints {
                    let mut all = a.clone();
                    all.extend(b.clone());
                    let Some(tgt) = specialize(target, &all) else { continue };
                    let t_val = evaluate(cert.invariant, xi_here.as_ref(), &instantiate(&tgt)?);
                    let holds = separates(cert.invariant, &s_val, &t_val);
                    pairs += 1;
                    if !holds {
                        ok = false;
                    }
                    if !holds || (a.is_empty() && b.is_empty()) {
                        diags.push(Diagnostic::Invariant {
                            source: format!("{src} [{}]", format_assignment(&a)),
                            target: tgt.to_string(),
                            claim: claim(cert.invariant, xi_here.as_ref()),
                            source_value: s_val.to_string(),
                            target_value: t_val.to_string(),
                            holds,
                        });
                    }
                }
            }
        }
    }
    diags.push(Diagnostic::Note { message: format!("{pairs} source/target pairs compared") });
    Ok(Verdict::new(cert.id.clone(), if ok { Status::Verified } else { Status::Failed }, diags))
}
