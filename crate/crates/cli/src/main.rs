//! Command-line front end.
//!
//! Exit codes: 0 = every check passed, 1 = a check failed (the first failing
//! check is named on stderr), 2 = input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kodaira::models::{self, BoundaryMode, GeneratorSpec, GridSpec};
use kodaira::sandwich::{self, DualityData, SandwichPair};
use kodaira::{CheckRecord, InstanceFile, Tolerance, ValidationReport};

mod suite;

#[derive(Parser)]
#[command(name = "kodaira", version, about = "Verify finite-dimensional Hilbert-complex identities")]
struct Cli {
    /// Seed for anything random; absent means 0.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative rank tolerance, overrides instance files and KODAIRA_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Emit the machine-readable report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report (or generated instance) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural validation: domain inclusions, images in domains, D∘D = 0.
    Validate { path: PathBuf },
    /// Betti numbers of the top, sub and intermediate complexes.
    Betti { path: PathBuf },
    /// Build the intermediate complex and print its certificates.
    Sandwich { path: PathBuf },
    /// Complementarity, mirror-degree dimensions, dual-intermediate identities.
    Duality { path: PathBuf },
    /// ψ, Euler characteristics, index differences, the cohomological formula.
    Indices { path: PathBuf },
    /// Middle-degree signature of a length-4l pair with duality data.
    Signature { path: PathBuf },
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run the full property suite on a file or on generated seeds.
    VerifyAll {
        path: Option<PathBuf>,
        /// Verify this many generated instances instead of a file.
        #[arg(long)]
        seeds: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Random nested pair.
    Random(RandomArgs),
    /// φ-self-dual pair with duality data (palindromic dims).
    Complementary(ComplementaryArgs),
    /// Weighted interval cochain pair.
    Grid(GridArgs),
    /// Weighted cone-over-a-polygon cochain pair.
    Cone(ConeArgs),
}

#[derive(Args)]
struct RandomArgs {
    /// Comma-separated dimensions, e.g. 3,4,3.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    codim_min: usize,
    #[arg(long, default_value_t = 2)]
    codim_max: usize,
}

#[derive(Args)]
struct ComplementaryArgs {
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Intertwining constants, one per differential.
    #[arg(long, value_delimiter = ',')]
    constants: Option<Vec<f64>>,
    /// Signs of φ_i⁻¹ = s_i φ_{n−i}, one per degree.
    #[arg(long, value_delimiter = ',')]
    signs: Option<Vec<f64>>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    cells: usize,
    #[arg(long, default_value_t = 0.0)]
    exponent: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::TwoEnds)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(alias = "one_end")]
    OneEnd,
    #[value(alias = "two_ends")]
    TwoEnds,
}

#[derive(Args)]
struct ConeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
}

/// Usage/input problems exit 2; failed checks exit 1.
enum CliError {
    Usage(String),
}

impl From<kodaira::Error> for CliError {
    fn from(e: kodaira::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn effective_tolerance(cli_tol: Option<f64>, file: &InstanceFile) -> CliResult<Tolerance> {
    let base = file.effective_tolerance()?;
    let rel = if let Some(t) = cli_tol {
        Some(t)
    } else if let Ok(env) = std::env::var("KODAIRA_TOL") {
        Some(env.parse::<f64>().map_err(|_| {
            CliError::Usage(format!("KODAIRA_TOL is not a number: {env}"))
        })?)
    } else {
        None
    };
    match rel {
        Some(r) => Ok(Tolerance::new(r, base.abs_floor)?),
        None => Ok(base),
    }
}

fn load(path: &Path, cli_tol: Option<f64>) -> CliResult<(SandwichPair, Option<DualityData>, Tolerance)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut file = InstanceFile::from_json(&text)?;
    let tol = effective_tolerance(cli_tol, &file)?;
    file.tolerance = Some(tol);
    let (pair, duality) = file.build()?;
    Ok((pair, duality, tol))
}

fn emit(
    json_mode: bool,
    out: Option<&Path>,
    report: &ValidationReport,
    extra: serde_json::Value,
) -> CliResult<ExitCode> {
    let doc = {
        let mut doc = json!({
            "pass": report.pass,
            "tolerance": report.tolerance,
            "checks": report.checks,
        });
        if let serde_json::Value::Object(extra_map) = extra {
            let obj = doc.as_object_mut().expect("doc is an object");
            for (k, v) in extra_map {
                obj.insert(k, v);
            }
        }
        doc
    };
    let rendered = serde_json::to_string_pretty(&doc).expect("reports are plain data");
    if let Some(path) = out {
        std::fs::write(path, &rendered)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if json_mode {
        println!("{rendered}");
    } else {
        for c in &report.checks {
            println!(
                "{} {:<48} residual {: >10.3e}",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.residual
            );
        }
    }
    if report.pass {
        if !json_mode {
            println!("checks passed: all");
        }
        Ok(ExitCode::SUCCESS)
    } else {
        let first = report.first_failure().expect("failing report names a check");
        eprintln!("check failed: {} (residual {:.3e})", first.name, first.residual);
        Ok(ExitCode::from(1))
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Validate { path } => {
            let (pair, _, _) = load(&path, cli.tol)?;
            let report = sandwich::check_extension(&pair);
            emit(cli.json, cli.out.as_deref(), &report, json!({}))
        }
        Command::Betti { path } => {
            let (pair, duality, _) = load(&path, cli.tol)?;
            let idx = sandwich::psi(&pair, duality.as_ref())?;
            if !cli.json {
                println!("degree   top   sub    M");
                for i in 0..idx.betti_top.len() {
                    println!(
                        "{:>6} {:>5} {:>5} {:>4}",
                        i, idx.betti_top[i], idx.betti_sub[i], idx.betti_m[i]
                    );
                }
                println!(
                    "chi_top = {}, chi_sub = {}, chi_M = {}, psi = {}",
                    idx.chi_top, idx.chi_sub, idx.chi_m, idx.psi
                );
            }
            let extra = json!({
                "betti_top": idx.betti_top, "betti_sub": idx.betti_sub, "betti_M": idx.betti_m,
                "chi_top": idx.chi_top, "chi_sub": idx.chi_sub, "chi_M": idx.chi_m,
                "psi": idx.psi, "quotient_dims": idx.quotient_dims,
            });
            let report = idx.checks.clone();
            emit(cli.json, cli.out.as_deref(), &report, extra)
        }
        Command::Sandwich { path } => {
            let (pair, _, tol) = load(&path, cli.tol)?;
            let mut report = ValidationReport::new(tol);
            report.merge(sandwich::check_extension(&pair));
            match sandwich::build_intermediate(&pair) {
                Ok(inter) => report.merge(inter.certificates),
                Err(e) => report.push(CheckRecord::new("intermediate.construction", false, f64::NAN, e.to_string())),
            }
            emit(cli.json, cli.out.as_deref(), &report, json!({}))
        }
        Command::Duality { path } => {
            let (pair, duality, tol) = load(&path, cli.tol)?;
            let duality = duality
                .ok_or_else(|| CliError::Usage("instance carries no duality block".into()))?;
            let mut report = ValidationReport::new(tol);
            report.merge(sandwich::check_complementary(&pair, &duality)?);
            let complementary = report.pass;
            let pairs = sandwich::mirror_quotient_dims(&pair);
            for (j, (a, b)) in pairs.iter().enumerate() {
                report.push(CheckRecord::new(
                    format!("duality.mirror_quotient[{j}]"),
                    !complementary || a == b,
                    (a - b).abs() as f64,
                    format!("{a} vs {b}"),
                ));
            }
            report.merge(sandwich::harmonic_transport_check(&pair, &duality)?);
            let (_, dual_report) = sandwich::dual_intermediate(&pair, Some(&duality))?;
            report.merge(dual_report);
            let extra = json!({ "mirror_dims": pairs });
            emit(cli.json, cli.out.as_deref(), &report, extra)
        }
        Command::Indices { path } => {
            let (pair, duality, tol) = load(&path, cli.tol)?;
            let mut report = ValidationReport::new(tol);
            let idx = sandwich::psi(&pair, duality.as_ref())?;
            report.merge(idx.checks.clone());
            let (ind_top, ind_sub, diff, diff_checks) = sandwich::index_difference(&pair)?;
            report.merge(diff_checks);
            let residuals = sandwich::cohomological_formula_check(&pair)?;
            for (j, r) in residuals.iter().enumerate() {
                report.push(CheckRecord::new(
                    format!("indices.cohomological_formula[{j}]"),
                    *r == 0,
                    r.abs() as f64,
                    String::new(),
                ));
            }
            let inter = sandwich::build_intermediate(&pair)?;
            let (chi_m, euler_triple, euler_checks) = sandwich::intermediate_euler(&pair, &inter, duality.as_ref())?;
            report.merge(euler_checks);
            if !cli.json {
                println!(
                    "psi = {}, chi_top = {}, chi_sub = {}, chi_M = {}",
                    idx.psi, idx.chi_top, idx.chi_sub, chi_m
                );
                println!(
                    "ind(top) = {}, ind(sub) = {}, difference = {diff}",
                    ind_top.index, ind_sub.index
                );
            }
            let extra = json!({
                "psi": idx.psi, "chi_top": idx.chi_top, "chi_sub": idx.chi_sub, "chi_M": chi_m,
                "ind_top": ind_top, "ind_sub": ind_sub, "index_difference": diff,
                "euler_index": euler_triple,
            });
            emit(cli.json, cli.out.as_deref(), &report, extra)
        }
        Command::Signature { path } => {
            let (pair, duality, _) = load(&path, cli.tol)?;
            let duality = duality
                .ok_or_else(|| CliError::Usage("signature needs a duality block".into()))?;
            let inter = sandwich::build_intermediate(&pair)?;
            let sig = sandwich::signature(&pair, &duality, &inter)?;
            if !cli.json {
                println!(
                    "sigma = {} (+1 eigenspace {}, −1 eigenspace {})",
                    sig.sigma, sig.eps_plus_dim, sig.eps_minus_dim
                );
            }
            let extra = json!({
                "sigma": sig.sigma,
                "eps_plus_dim": sig.eps_plus_dim,
                "eps_minus_dim": sig.eps_minus_dim,
                "gram": sig.gram,
                "sign_choice": sig.sign_choice,
            });
            let report = sig.checks.clone();
            emit(cli.json, cli.out.as_deref(), &report, extra)
        }
        Command::Gen { kind } => {
            let file = match kind {
                GenKind::Random(args) => {
                    let spec = GeneratorSpec::new(cli.seed, args.dims, (args.codim_min, args.codim_max));
                    models::gen_random_pair(&spec)?
                }
                GenKind::Complementary(args) => {
                    let spec = GeneratorSpec::new(cli.seed, args.dims, (0, 0));
                    models::gen_complementary(&spec, args.constants.as_deref(), args.signs.as_deref())?
                }
                GenKind::Grid(args) => models::gen_grid_interval(&GridSpec {
                    cells: args.cells,
                    weight_exponent: args.exponent,
                    boundary_mode: match args.mode {
                        ModeArg::OneEnd => BoundaryMode::OneEnd,
                        ModeArg::TwoEnds => BoundaryMode::TwoEnds,
                    },
                })?,
                GenKind::Cone(args) => models::gen_cone_2d(args.k, args.exponent)?,
            };
            let rendered = file.to_json();
            match cli.out {
                Some(path) => std::fs::write(&path, rendered)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
                None => println!("{rendered}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyAll { path, seeds } => {
            let report = match (path, seeds) {
                (Some(p), None) => {
                    let (pair, duality, _) = load(&p, cli.tol)?;
                    suite::run_suite(&pair, duality.as_ref())?
                }
                (None, Some(n)) => suite::run_seed_sweep(cli.seed, n)?,
                _ => {
                    return Err(CliError::Usage(
                        "verify-all needs either an instance file or --seeds N".into(),
                    ))
                }
            };
            emit(cli.json, cli.out.as_deref(), &report, json!({}))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
