//! `degen`: command-line front end for the verifier, classifier and graph builder.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use degen_core::algebras::{invariant_summary, z_xi_dim};
use degen_core::catalog::{
    default_grid, expected_der_dim, grid_types, instantiate, matrix_to_heisenberg, matrix_to_ternary, CanonicalType,
    Family,
};
use degen_core::certificates::{load_corpus, verify_all, Certificate, Report, RunOptions, Status};
use degen_core::congruence::{classify_matrix, MatrixJson};
use degen_core::grapher::{assemble_graph, blocked_pairs, consistency_check, emit_dot, to_json, transitive_reduction};
use degen_core::scalars::{parse_constant, GaussRational, RationalFunction};

#[derive(Debug, Error)]
enum CliError {
    /// Bad input: exit code 2.
    #[error("{0}")]
    Input(String),
    /// A computed negative outcome: exit code 1.
    #[error("{0}")]
    Failed(String),
}

fn input<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "degen", version, about = "Exact checks of degenerations of 5-dimensional Heisenberg algebras")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical types of the catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Invariant battery of a catalog type.
    Invariants {
        #[arg(long = "catalog")]
        label: String,
        /// Parameter binding such as `λ=-1` (ASCII `l`, `m` accepted).
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Check certificate files.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Canonical type of a 4×4 matrix up to congruence.
    Classify { matrix: PathBuf },
    /// The algebra a matrix corresponds to.
    Correspond {
        #[arg(long, value_enum)]
        to: Target,
        matrix: PathBuf,
    },
    /// The degeneration graph.
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Debug, Subcommand)]
enum CatalogCmd {
    List,
    Show {
        label: String,
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON array of grid values, e.g. `["0","1/2","i","-1","1"]`.
    #[arg(long)]
    grid: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Degeneration {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    Nondegeneration {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Heisenberg,
    Ternary,
}

#[derive(Debug, Subcommand)]
enum GraphCmd {
    Build {
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Corpus root with `deg/`, `nondeg/` and optionally `supplementary/`.
        #[arg(long, default_value = "certs")]
        certs: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_grid(path: Option<&PathBuf>) -> Result<Vec<GaussRational>, CliError> {
    let Some(path) = path else { return Ok(default_grid()) };
    let text = read(path)?;
    let ctx = path.display().to_string();
    let values: Vec<String> = serde_json::from_str(&text).map_err(input(&ctx))?;
    values.iter().map(|v| parse_constant(v).map_err(input(&ctx))).collect()
}

fn bindings(params: &[String]) -> Result<Vec<(String, String)>, CliError> {
    params
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Input(format!("expected name=value, got `{p}`")))
        })
        .collect()
}

fn catalog_type(label: &str, params: &[String]) -> Result<CanonicalType, CliError> {
    CanonicalType::parse(label, &bindings(params)?, &[]).map_err(input(label))
}

struct Output {
    text: String,
    status: Status,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: Status::Verified }
    }
}

fn render_reports(reports: &[Report], format: Format) -> Result<String, CliError> {
    if format == Format::Json {
        return serde_json::to_string_pretty(reports).map_err(|e| CliError::Input(e.to_string()));
    }
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!("{}  {}  ({})\n", r.id, r.status, r.provenance));
        for v in &r.verdicts {
            s.push_str(&format!("  {}: {}\n", v.subject, v.status));
            for d in &v.diagnostics {
                s.push_str(&format!("    {d}\n"));
            }
        }
    }
    let count = |st: Status| reports.iter().filter(|r| r.status == st).count();
    s.push_str(&format!(
        "{} verified, {} failed, {} inconclusive\n",
        count(Status::Verified),
        count(Status::Failed),
        count(Status::Inconclusive)
    ));
    Ok(s)
}

const BANNER: &str = "*** EVIDENCE, NOT PROOF: inconclusive verdicts mean a seeded search found no witness ***";

fn verify(files: &[PathBuf], run: &RunArgs, want_degeneration: bool, format: Format) -> Result<Output, CliError> {
    let certs = files
        .iter()
        .map(|f| {
            let c = Certificate::from_json(&read(f)?).map_err(input(&f.display().to_string()))?;
            if c.is_degeneration() != want_degeneration {
                return Err(CliError::Input(format!("{}: wrong certificate kind for this command", f.display())));
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = RunOptions { grid: load_grid(run.grid.as_ref())?, trials: run.trials, seed: run.seed };
    let reports = verify_all(&certs, &opts);
    let status = reports.iter().map(|r| r.status).max().unwrap_or(Status::Verified);
    Ok(Output { text: render_reports(&reports, format)?, status })
}

fn invariants(label: &str, params: &[String], format: Format) -> Result<Output, CliError> {
    let t = catalog_type(label, params)?;
    let alg = instantiate(&t).map_err(input(label))?;
    let inv = invariant_summary(&alg);
    let expected = t.is_concrete().then(|| expected_der_dim(&t));
    let extra: Vec<(String, usize)> = t
        .params
        .iter()
        .filter(|p| **p != RationalFunction::one() && **p != RationalFunction::from_int(-1))
        .map(|p| (p.to_string(), z_xi_dim(&alg, p)))
        .collect();
    if format == Format::Json {
        let z: serde_json::Map<String, serde_json::Value> = extra.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let v = json!({"type": t.to_json(), "invariants": inv, "z_xi": z, "expected_derivation_dim": expected});
        return Ok(Output::ok(serde_json::to_string_pretty(&v).expect("serializable")));
    }
    let mut s = format!("{t}\n  dim𝔇er={}", inv.derivation_dim);
    if let Some(e) = expected {
        s.push_str(&format!(" (closed form {e})"));
    }
    s.push_str(&format!("\n  Z₁={}\n  Z₋₁={}\n", inv.z_plus_one, inv.z_minus_one));
    for (xi, d) in extra {
        s.push_str(&format!("  Z_{xi}={d}\n"));
    }
    s.push_str(&format!("  dim A²={}\n  {}\n  heisenberg={}\n", inv.square_dim, inv.symmetry, inv.heisenberg));
    Ok(Output::ok(s))
}

fn read_matrix(path: &Path) -> Result<degen_core::congruence::QMatrix, CliError> {
    let ctx = path.display().to_string();
    let m: MatrixJson = serde_json::from_str(&read(path)?).map_err(input(&ctx))?;
    m.to_matrix().map_err(input(&ctx))
}

fn classify(path: &Path, format: Format) -> Result<Output, CliError> {
    let m = read_matrix(path)?;
    let t = classify_matrix(&m).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    Ok(Output::ok(match format {
        Format::Json => serde_json::to_string_pretty(&t.to_json()).expect("serializable"),
        _ => format!("{t}\n"),
    }))
}

fn correspond(path: &Path, to: Target, format: Format) -> Result<Output, CliError> {
    let m = read_matrix(path)?.map(|x| RationalFunction::constant(x.clone()));
    if m.rows() != 4 {
        return Err(CliError::Input(format!("{}: expected a 4×4 matrix", path.display())));
    }
    let text = match (to, format) {
        (Target::Heisenberg, Format::Json) => {
            serde_json::to_string_pretty(&matrix_to_heisenberg(&m).to_json()).expect("serializable")
        }
        (Target::Heisenberg, _) => matrix_to_heisenberg(&m).table().join("\n") + "\n",
        (Target::Ternary, Format::Json) => serde_json::to_string_pretty(&matrix_to_ternary(&m).table()).expect("serializable"),
        (Target::Ternary, _) => matrix_to_ternary(&m).table().join("\n") + "\n",
    };
    Ok(Output::ok(text))
}

fn graph(grid: Option<&PathBuf>, certs: &Path, format: Format) -> Result<Output, CliError> {
    let grid = load_grid(grid)?;
    let corpus = load_corpus(certs).map_err(input(&certs.display().to_string()))?;
    let opts = RunOptions { grid: grid.clone(), trials: 0, seed: 0 };
    let reports = verify_all(&corpus, &opts);
    let g = assemble_graph(&corpus, &reports, &grid).map_err(|e| CliError::Failed(e.to_string()))?;
    let check = consistency_check(&g, &blocked_pairs(&corpus, &grid).map_err(|e| CliError::Input(e.to_string()))?);
    let r = transitive_reduction(&g).map_err(|e| CliError::Failed(e.to_string()))?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&json!({"graph": to_json(&r), "consistency": check})).expect("serializable"),
        _ => emit_dot(&r),
    };
    if check.is_clean() {
        Ok(Output::ok(text))
    } else {
        for v in &check.violations {
            eprintln!("consistency violation: {v:?}");
        }
        Ok(Output { text, status: Status::Failed })
    }
}

fn catalog(cmd: &CatalogCmd, format: Format) -> Result<Output, CliError> {
    match cmd {
        CatalogCmd::List => {
            let types: Vec<CanonicalType> = Family::ALL.iter().map(|f| CanonicalType::symbolic(*f)).collect();
            if format == Format::Json {
                let v: Vec<_> = types.iter().map(|t| t.to_json()).collect();
                return Ok(Output::ok(serde_json::to_string_pretty(&v).expect("serializable")));
            }
            let mut s = String::new();
            for t in &types {
                s.push_str(&format!("{t}\n"));
            }
            s.push_str(&format!("{} grid instantiations\n", grid_types(&default_grid()).len()));
            Ok(Output::ok(s))
        }
        CatalogCmd::Show { label, params } => {
            let t = catalog_type(label, params)?;
            let alg = instantiate(&t).map_err(input(label))?;
            Ok(Output::ok(match format {
                Format::Json => serde_json::to_string_pretty(&alg.to_json()).expect("serializable"),
                _ => format!("{t}\n{}\n", alg.table().join("\n")),
            }))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Catalog(c) => catalog(c, cli.format),
        Command::Invariants { label, params } => invariants(label, params, cli.format),
        Command::Verify(VerifyCmd::Degeneration { files, run }) => verify(files, run, true, cli.format),
        Command::Verify(VerifyCmd::Nondegeneration { files, run }) => verify(files, run, false, cli.format),
        Command::Classify { matrix } => classify(matrix, cli.format),
        Command::Correspond { to, matrix } => correspond(matrix, *to, cli.format),
        Command::Graph(GraphCmd::Build { grid, certs }) => graph(grid.as_ref(), certs, cli.format),
    }
}

fn configure_threads() {
    let n = std::env::var("DEGEN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match dispatch(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &out.text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            match out.status {
                Status::Failed => ExitCode::from(1),
                Status::Inconclusive => {
                    if cli.out.is_none() && cli.format == Format::Text {
                        println!("{BANNER}");
                    } else {
                        eprintln!("{BANNER}");
                    }
                    ExitCode::SUCCESS
                }
                Status::Verified => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("failed: {m}");
            ExitCode::from(1)
        }
    }
}
