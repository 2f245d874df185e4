//! Closed-set (Borel-stable pattern) non-degeneration: membership of the source via its
//! witness basis, symbolic stability of the pattern, and a seeded search for the target.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schema::{
    bindings, format_assignment, grid_pairs, parse_matrix, specialize, specialize_matrix, symbols_of, Assignment, ClosedSetCert,
    Domain,
};
use super::{aggregate, CertError, Diagnostic, RunOptions, Status, Verdict};
use crate::algebras::{change_basis, Algebra, BasisChange};
use crate::catalog::{canonical_matrix, instantiate, CanonicalType};
use crate::congruence::constant_matrix;
use crate::scalars::{canonical_name, parse_constant, parse_scalar, GaussRational, Matrix, RationalFunction};

type Entry = (usize, usize, usize);

/// Linear conditions on structure constants (0-based entries) with coefficients in the
/// pattern parameters, plus the basis placing the source inside.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSetPattern {
    pub id: String,
    pub dim: usize,
    pub parameters: Vec<String>,
    pub zeros: BTreeSet<Entry>,
    pub relations: Vec<Vec<(Entry, RationalFunction)>>,
    pub witness: Matrix<RationalFunction>,
}

fn entry_name(e: &Entry) -> String {
    format!("c^{}_{{{},{}}}", e.2 + 1, e.0 + 1, e.1 + 1)
}

/// The frame of a Heisenberg pattern: everything with `i = n`, `j = n` or `k ≠ n` vanishes.
fn frame(dim: usize) -> BTreeSet<Entry> {
    let last = dim - 1;
    let mut out = BTreeSet::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if i == last || j == last || k != last {
                    out.insert((i, j, k));
                }
            }
        }
    }
    out
}

impl ClosedSetPattern {
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        parameters: Vec<String>,
        heisenberg_frame: bool,
        zeros: impl IntoIterator<Item = Entry>,
        relations: Vec<Vec<(Entry, RationalFunction)>>,
        witness: Matrix<RationalFunction>,
    ) -> Self {
        let mut z: BTreeSet<Entry> = zeros.into_iter().collect();
        if heisenberg_frame {
            z.extend(frame(dim));
        }
        ClosedSetPattern { id: id.into(), dim, parameters, zeros: z, relations, witness }
    }

    pub fn from_cert(cert: &ClosedSetCert) -> Result<Self, CertError> {
        let params: Vec<String> = cert.parameters.iter().map(|s| canonical_name(s).to_string()).collect();
        let witness = parse_matrix(&cert.witness_basis, &params)?;
        let dim = witness.rows();
        let idx = |c: &[usize; 3]| -> Result<Entry, CertError> {
            if c.iter().any(|&x| x == 0 || x > dim) {
                return Err(CertError::Schema(format!("entry {c:?} out of range for dimension {dim}")));
            }
            Ok((c[0] - 1, c[1] - 1, c[2] - 1))
        };
        let zeros = cert.zeros.iter().map(idx).collect::<Result<Vec<_>, _>>()?;
        let relations = cert
            .relations
            .iter()
            .map(|r| r.iter().map(|t| Ok((idx(&t.c)?, parse_scalar(&t.a, &params)?))).collect::<Result<Vec<_>, CertError>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(cert.id.clone(), dim, params, cert.heisenberg_frame, zeros, relations, witness))
    }

    fn relation_name(rel: &[(Entry, RationalFunction)]) -> String {
        rel.iter().map(|(e, a)| format!("({a})·{}", entry_name(e))).collect::<Vec<_>>().join(" + ")
    }

    /// Parameters (and the witness basis) at a point; `None` on a pole.
    pub fn specialize(&self, a: &Assignment) -> Option<Self> {
        if a.is_empty() {
            return Some(self.clone());
        }
        let b = bindings(a);
        let relations = self
            .relations
            .iter()
            .map(|r| r.iter().map(|(e, c)| c.substitute(&b).ok().map(|c| (*e, c))).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        let witness = specialize_matrix(&self.witness, a)?;
        Some(ClosedSetPattern { relations, witness, ..self.clone() })
    }

    /// The equations `alg` violates, each with its residual.
    pub fn violations(&self, alg: &Algebra) -> Vec<(String, RationalFunction)> {
        let mut out = Vec::new();
        for e in &self.zeros {
            if let Some(v) = alg.get_ref(e.0, e.1, e.2) {
                out.push((entry_name(e), v.clone()));
            }
        }
        for rel in &self.relations {
            let s = rel.iter().fold(RationalFunction::zero(), |acc, (e, a)| &acc + &(a * &alg.get(e.0, e.1, e.2)));
            if !s.is_zero() {
                out.push((Self::relation_name(rel), s));
            }
        }
        out
    }
}

/// Re-expresses `source` in the pattern's witness basis and checks every equation
/// identically in the remaining indeterminates.
pub fn verify_membership(pattern: &ClosedSetPattern, source: &CanonicalType) -> Verdict {
    membership_at(pattern, source, "generic")
}

fn membership_at(pattern: &ClosedSetPattern, source: &CanonicalType, point: &str) -> Verdict {
    let subject = format!("{source} ∈ {}", pattern.id);
    let note = |m: String| Verdict::new(subject.clone(), Status::Failed, vec![Diagnostic::Note { message: m }]);
    let alg = match instantiate(source) {
        Ok(a) => a,
        Err(e) => return note(e.to_string()),
    };
    let g = match BasisChange::new(pattern.witness.clone()) {
        Ok(g) => g,
        Err(_) => return note(format!("[{point}] witness basis is singular")),
    };
    let moved = match change_basis(&alg, &g) {
        Ok(m) => m,
        Err(e) => return note(e.to_string()),
    };
    let diags: Vec<Diagnostic> = pattern
        .violations(&moved)
        .into_iter()
        .map(|(equation, r)| Diagnostic::PatternViolation { point: point.to_string(), equation, residual: r.to_string() })
        .collect();
    let status = if diags.is_empty() { Status::Verified } else { Status::Failed };
    Verdict::new(subject, status, diags)
}

/// Which triangular group acts. Basis vectors are written as columns: `Lower` means each
/// new `E_q` lies in `span(e_q, …, e_n)`, `Upper` means `span(e_1, …, e_q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Lower,
    Upper,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Lower => "lower",
            Orientation::Upper => "upper",
        })
    }
}

/// Generic point of the pattern: the solution space of its linear equations spanned with
/// fresh symbols `u1, u2, …`.
fn generic_element(pattern: &ClosedSetPattern) -> Algebra {
    let n = pattern.dim;
    let unknowns: Vec<Entry> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .filter(|e| !pattern.zeros.contains(e))
        .collect();
    let pos: BTreeMap<Entry, usize> = unknowns.iter().enumerate().map(|(p, e)| (*e, p)).collect();
    let rows: Vec<Vec<RationalFunction>> = pattern
        .relations
        .iter()
        .map(|rel| {
            let mut row = vec![RationalFunction::zero(); unknowns.len()];
            for (e, a) in rel {
                if let Some(&p) = pos.get(e) {
                    row[p] = &row[p] + a;
                }
            }
            row
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let basis: Vec<Vec<RationalFunction>> = if rows.is_empty() {
        (0..unknowns.len())
            .map(|p| (0..unknowns.len()).map(|q| RationalFunction::from_int((p == q) as i64)).collect())
            .collect()
    } else {
        Matrix::from_rows(rows).nullspace()
    };
    let mut alg = Algebra::zero(n);
    for (p, e) in unknowns.iter().enumerate() {
        let v = basis
            .iter()
            .enumerate()
            .fold(RationalFunction::zero(), |acc, (r, b)| &acc + &(&b[p] * &RationalFunction::var(&format!("u{}", r + 1))));
        alg.set(e.0, e.1, e.2, v);
    }
    alg
}

/// Generic triangular change with symbols `g_p_q`, the coefficient of `e_p` in `E_q`.
fn generic_triangular(n: usize, o: Orientation) -> BasisChange {
    let mut m = Matrix::zeros(n, n);
    for q in 0..n {
        for p in 0..n {
            let inside = match o {
                Orientation::Lower => p >= q,
                Orientation::Upper => p <= q,
            };
            if inside {
                m.set(q, p, RationalFunction::var(&format!("g_{}_{}", p + 1, q + 1)));
            }
        }
    }
    BasisChange::new(m).expect("diagonal symbols are nonzero")
}

/// Symbolic stability under one triangular group: the generic point of the pattern, moved
/// by a generic group element, must satisfy every equation identically.
pub fn verify_borel_stability_in(pattern: &ClosedSetPattern, o: Orientation) -> Verdict {
    let subject = format!("{} is {o}-triangular stable", pattern.id);
    let alg = generic_element(pattern);
    let moved = change_basis(&alg, &generic_triangular(pattern.dim, o)).expect("sizes match");
    match pattern.violations(&moved).into_iter().next() {
        None => Verdict::new(subject, Status::Verified, vec![Diagnostic::Orientation { orientation: o }]),
        Some((equation, r)) => Verdict::new(
            subject,
            Status::Failed,
            vec![Diagnostic::BorelResidual { orientation: o, equation, residual: r.to_string() }],
        ),
    }
}

/// Tries the lower group first, then the upper one, and reports which holds.
pub fn verify_borel_stability(pattern: &ClosedSetPattern) -> Verdict {
    let subject = format!("{} is Borel stable", pattern.id);
    let lower = verify_borel_stability_in(pattern, Orientation::Lower);
    if lower.is_verified() {
        return Verdict { subject, ..lower };
    }
    let upper = verify_borel_stability_in(pattern, Orientation::Upper);
    if upper.is_verified() {
        let mut diags = lower.diagnostics;
        diags.extend(upper.diagnostics);
        return Verdict::new(subject, Status::Verified, diags);
    }
    let mut diags = lower.diagnostics;
    diags.extend(upper.diagnostics);
    Verdict::new(subject, Status::Failed, diags)
}

fn fnv1a(bytes: &[u8], mut h: u64) -> u64 {
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

/// Entries random bases are drawn from.
fn sample_values() -> Vec<GaussRational> {
    ["0", "1", "-1", "2", "i", "-i", "1+i", "1/2"].iter().map(|s| parse_constant(s).expect("literal")).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// Conditions on the `(n−1)×(n−1)` form after the Heisenberg reduction.
type Constraint = Vec<((usize, usize), GaussRational)>;

fn reduced_constraints(pattern: &ClosedSetPattern) -> Result<Vec<Constraint>, String> {
    let last = pattern.dim - 1;
    let keep = |e: &Entry| e.2 == last && e.0 < last && e.1 < last;
    let mut out: Vec<Constraint> = pattern
        .zeros
        .iter()
        .filter(|e| keep(e))
        .map(|e| vec![((e.0, e.1), GaussRational::one())])
        .collect();
    for rel in &pattern.relations {
        let mut c = Vec::new();
        for (e, a) in rel {
            if keep(e) {
                let a = a.as_constant().ok_or_else(|| format!("coefficient {a} is not a constant"))?;
                c.push(((e.0, e.1), a));
            }
        }
        if !c.is_empty() {
            out.push(c);
        }
    }
    Ok(out)
}

struct Transformed<'a> {
    s: &'a Matrix<GaussRational>,
    m: &'a Matrix<GaussRational>,
    cache: Vec<Option<GaussRational>>,
}

impl Transformed<'_> {
    /// `(S M Sᵀ)_{i,j}`, computed on first use.
    fn get(&mut self, i: usize, j: usize) -> GaussRational {
        let n = self.m.rows();
        if let Some(v) = &self.cache[i * n + j] {
            return v.clone();
        }
        let mut acc = GaussRational::zero();
        for p in 0..n {
            let sip = self.s.get(i, p);
            if sip.is_zero() {
                continue;
            }
            for q in 0..n {
                let mpq = self.m.get(p, q);
                let sjq = self.s.get(j, q);
                if mpq.is_zero() || sjq.is_zero() {
                    continue;
                }
                acc += &(&(sip * mpq) * sjq);
            }
        }
        self.cache[i * n + j] = Some(acc.clone());
        acc
    }
}

/// Seeded search for a basis placing `target` inside the (parameter-free) pattern. Only
/// bases adapted to the square are sampled, so the search runs over congruences of the
/// target's 4×4 form: the identity and all permutations first, then random invertible
/// matrices with entries from a fixed small set.
pub fn falsify_membership(pattern: &ClosedSetPattern, target: &CanonicalType, trials: usize, seed: u64) -> Verdict {
    let subject = format!("{target} ∉ {}", pattern.id);
    let fail = |m: String| Verdict::new(subject.clone(), Status::Failed, vec![Diagnostic::Note { message: m }]);
    let constraints = match reduced_constraints(pattern) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let m = match constant_matrix(&canonical_matrix(target)) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let n = m.rows();
    let stream = format!("{}|{}", pattern.id, target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(stream.as_bytes(), FNV_OFFSET));
    let values = sample_values();
    let perms = permutations(n);
    let mut digest = FNV_OFFSET;
    for trial in 0..trials {
        let s: Matrix<GaussRational> = if let Some(p) = perms.get(trial) {
            let mut s = Matrix::zeros(n, n);
            for (i, &j) in p.iter().enumerate() {
                s.set(i, j, GaussRational::one());
            }
            s
        } else {
            loop {
                let rows = (0..n).map(|_| (0..n).map(|_| values[rng.gen_range(0..values.len())].clone()).collect()).collect();
                let s = Matrix::from_rows(rows);
                if !s.det().is_zero() {
                    break s;
                }
            }
        };
        for row in s.to_rows() {
            for x in row {
                digest = fnv1a(x.to_string().as_bytes(), digest);
                digest = fnv1a(b",", digest);
            }
        }
        let mut tr = Transformed { s: &s, m: &m, cache: vec![None; n * n] };
        let witness = constraints.iter().all(|c| {
            c.iter().fold(GaussRational::zero(), |acc, ((i, j), a)| &acc + &(a * &tr.get(*i, *j))).is_zero()
        });
        if witness {
            let mut basis: Vec<Vec<String>> = s
                .to_rows()
                .into_iter()
                .map(|r| {
                    let mut r: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                    r.push("0".into());
                    r
                })
                .collect();
            let mut last = vec!["0".to_string(); n];
            last.push("1".into());
            basis.push(last);
            return Verdict::new(
                subject,
                Status::Failed,
                vec![Diagnostic::FalsifierWitness { source: pattern.id.clone(), target: target.to_string(), trial, basis }],
            );
        }
    }
    Verdict::new(
        subject,
        Status::Inconclusive,
        vec![Diagnostic::FalsifierSummary {
            source: pattern.id.clone(),
            target: target.to_string(),
            trials,
            digest: format!("{digest:016x}"),
        }],
    )
}

fn source_domain(cert: &ClosedSetCert, spec: &super::TypeSpec, source: &CanonicalType) -> Result<Domain, CertError> {
    let params: BTreeSet<String> = cert.parameters.iter().map(|s| canonical_name(s).to_string()).collect();
    let used: Vec<String> = symbols_of(source).into_iter().filter(|s| params.contains(s)).collect();
    Domain::new(&used, spec.excluded.as_ref(), &spec.conditions)
}

/// Membership (generic and on the grid), Borel stability, and the falsifier over every
/// blocked target on the grid.
pub fn verify_closed_set_cert(cert: &ClosedSetCert, opts: &RunOptions) -> Vec<Verdict> {
    let bad = |m: String| vec![Verdict::new(cert.id.clone(), Status::Failed, vec![Diagnostic::Note { message: m }])];
    let pattern = match ClosedSetPattern::from_cert(cert) {
        Ok(p) => p,
        Err(e) => return bad(e.to_string()),
    };
    let params = pattern.parameters.clone();
    let mut sources = Vec::new();
    for spec in &cert.sources {
        match spec.resolve(&params).and_then(|s| Ok((source_domain(cert, spec, &s)?, s))) {
            Ok((d, s)) => sources.push((s, d)),
            Err(e) => return bad(e.to_string()),
        }
    }
    let mut verdicts = Vec::new();
    for (source, domain) in &sources {
        let mut diags = Vec::new();
        let generic = verify_membership(&pattern, source);
        diags.extend(generic.diagnostics);
        let mut checked = 0;
        let mut skipped = Vec::new();
        for a in domain.grid_points(&opts.grid, &Assignment::new()) {
            let label = format_assignment(&a);
            match (specialize(source, &a), pattern.specialize(&a)) {
                (Some(s), Some(p)) => {
                    checked += 1;
                    diags.extend(membership_at(&p, &s, &label).diagnostics);
                }
                _ => skipped.push(label),
            }
        }
        let failed = !diags.is_empty();
        diags.push(Diagnostic::GridSummary { checked, skipped });
        verdicts.push(Verdict::new(
            format!("{source} ∈ {}", pattern.id),
            if failed { Status::Failed } else { Status::Verified },
            diags,
        ));
    }

    verdicts.push(verify_borel_stability(&pattern));

    let pairs = match grid_pairs(&params, &cert.sources, &cert.blocked, &opts.grid) {
        Ok(p) => p,
        Err(e) => return bad(e.to_string()),
    };
    let jobs: Vec<(ClosedSetPattern, CanonicalType)> = pairs
        .into_iter()
        .filter_map(|(a, _, t)| {
            let p = pattern.specialize(&a)?;
            Some((ClosedSetPattern { id: format!("{}[{}]", pattern.id, format_assignment(&a)), ..p }, t))
        })
        .collect();
    let results: Vec<Verdict> = jobs.par_iter().map(|(p, t)| falsify_membership(p, t, opts.trials, opts.seed)).collect();
    let status = aggregate(results.iter().map(|v| v.status));
    let mut diags: Vec<Diagnostic> = results.into_iter().flat_map(|v| v.diagnostics).collect();
    if diags.is_empty() {
        diags.push(Diagnostic::Note { message: "no blocked target instantiates on the grid".into() });
    }
    let status = if jobs.is_empty() { Status::Inconclusive } else { status };
    verdicts.push(Verdict::new(format!("blocked targets ∉ {}", pattern.id), status, diags));
    verdicts
}
