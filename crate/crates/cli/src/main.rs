//! `locdiv`: first cohomology and local conditions for 2x2 matrix groups over `Z/p^n`.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when a size cap is hit.

mod render;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use locdiv::families::{
    build_family_with_cap, isogeny_report, search_counterexamples, vanishing_grid, Family, FamilyCase, FamilyError,
    FamilySpec, GridConfig, IsogenyLevel, SearchConstraints, Shape,
};
use locdiv::matgroup::{GroupError, MatrixGroup, RawMat2, DEFAULT_CAP};
use locdiv::modring::Modulus;
use locdiv::report::{
    analyze, close_input, AnalysisError, AnalysisInputError, AnalysisReport, Backend, CertificateJson,
    CohomologyJson, FamilyJson, GroupInput, SearchReportJson,
};

#[derive(Parser)]
#[command(name = "locdiv", version, about = "Cohomology and local conditions of 2x2 matrix groups over Z/p^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Largest group closed, and largest set enumerated by the oracle or the search.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Sampling order for `grid` when the budget is smaller than the grid.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Preconditions, parameter profile, criterion and cohomology of a group.
    Analyze(GroupArgs),
    /// Structures of Z^1, B^1, H^1, Z^1_loc, H^1_loc with a certificate for a nonzero class.
    H1loc(GroupArgs),
    /// Build one explicit family member and certify its witness.
    Family(FamilyArgs),
    /// Check the vanishing criterion over synthesized groups.
    Grid(GridArgs),
    /// Search small groups of a fixed shape for nonzero H^1_loc.
    Search(SearchArgs),
    /// Triangularity of the reductions mod p^l for l = 1..n.
    Isogeny(GroupArgs),
}

#[derive(Args, Default)]
struct FamilyFlags {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    alpha: Option<u64>,
    #[arg(long)]
    theta: Option<u64>,
    /// Valuation offset of theta in lambda = omega(alpha) + p^(h+s) theta, omega the Teichmuller lift.
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    lambda: Option<u64>,
}

#[derive(Args)]
struct GroupArgs {
    /// Generators as JSON, e.g. '[[[1,0],[5,1]]]'; needs --p and --n.
    #[arg(long)]
    gens: Option<String>,
    /// JSON file {"p":..,"n":..,"generators":[..]}.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Family name: j-lt-m, j-ge-m-eq, j-ge-m-gt, n3-j-eq-m, n3-j-gt-m.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    flags: FamilyFlags,
    /// Use the full-enumeration backend (small groups only).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family name: j-lt-m, j-ge-m-eq, j-ge-m-gt, n3-j-eq-m, n3-j-gt-m.
    case: String,
    #[command(flatten)]
    flags: FamilyFlags,
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7])]
    primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3])]
    exponents: Vec<u32>,
    /// Maximum number of synthesized tuples.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Skip the explicit families.
    #[arg(long)]
    no_families: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_shape)]
    shape: Shape,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    s.parse()
}

enum Failure {
    Invalid(String),
    Cap(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::Cap(m) => f.write_str(m),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Group(g) => g.into(),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<AnalysisInputError> for Failure {
    fn from(e: AnalysisInputError) -> Self {
        match e {
            AnalysisInputError::Input(i) => Failure::Invalid(i.to_string()),
            AnalysisInputError::Analysis(a) => a.into(),
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Invalid(msg.into()))
}

fn family_spec(case: &str, f: &FamilyFlags) -> Result<FamilySpec, Failure> {
    let case: FamilyCase = case.parse()?;
    let (Some(p), Some(n)) = (f.p, f.n) else {
        return invalid("a family needs --p and --n");
    };
    let mut spec = FamilySpec::new(p, n, case);
    spec.i = f.i;
    spec.alpha = f.alpha;
    spec.s = f.s;
    spec.lambda_override = f.lambda;
    if let Some(t) = f.theta {
        spec.theta = t;
    }
    Ok(spec)
}

struct Resolved {
    group: Arc<MatrixGroup>,
    family: Option<Family>,
}

fn resolve(a: &GroupArgs, cap: usize) -> Result<Resolved, Failure> {
    let given = [a.gens.is_some(), a.file.is_some(), a.family.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return invalid("give exactly one of --gens, --file, --family");
    }
    let f = &a.flags;
    let family_only = f.i.is_some() || f.alpha.is_some() || f.theta.is_some() || f.s.is_some() || f.lambda.is_some();
    if let Some(name) = &a.family {
        let family = build_family_with_cap(&family_spec(name, f)?, cap)?;
        return Ok(Resolved { group: family.group.clone(), family: Some(family) });
    }
    if family_only {
        return invalid("--i, --alpha, --theta, --s and --lambda only apply to --family");
    }
    let input = if let Some(gens) = &a.gens {
        let (Some(p), Some(n)) = (f.p, f.n) else {
            return invalid("--gens needs --p and --n");
        };
        let generators: Vec<RawMat2> =
            serde_json::from_str(gens).map_err(|e| Failure::Invalid(format!("malformed --gens: {e}")))?;
        GroupInput { p, n, generators }
    } else {
        if f.p.is_some() || f.n.is_some() {
            return invalid("--p and --n are read from the file");
        }
        let path = a.file.as_ref().expect("one source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
        GroupInput::from_json(&text).map_err(|e| Failure::Invalid(e.to_string()))?
    };
    Ok(Resolved { group: close_input(&input, cap)?, family: None })
}

fn backend(oracle: bool) -> Backend {
    if oracle {
        Backend::Oracle
    } else {
        Backend::Generators
    }
}

#[derive(Serialize)]
struct H1locReport {
    p: u64,
    n: u32,
    generators: Vec<RawMat2>,
    group_order: usize,
    cohomology: CohomologyJson,
    certificate: Option<CertificateJson>,
    family: Option<FamilyJson>,
}

#[derive(Serialize)]
struct FamilyReport {
    spec: FamilySpec,
    #[serde(flatten)]
    analysis: AnalysisReport,
    isogeny: Vec<IsogenyLevel>,
}

#[derive(Serialize)]
struct IsogenyReport {
    p: u64,
    n: u32,
    generators: Vec<RawMat2>,
    group_order: usize,
    levels: Vec<IsogenyLevel>,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<serde_json::Value, Failure> {
    let cap = cli.cap;
    match &cli.command {
        Command::Analyze(a) => {
            let r = resolve(a, cap)?;
            Ok(to_value(&analyze(&r.group, backend(a.oracle), cap, r.family.as_ref())?))
        }
        Command::H1loc(a) => {
            let r = resolve(a, cap)?;
            let full = analyze(&r.group, backend(a.oracle), cap, r.family.as_ref())?;
            Ok(to_value(&H1locReport {
                p: full.p,
                n: full.n,
                generators: full.generators,
                group_order: full.group_order,
                cohomology: full.cohomology,
                certificate: full.certificate,
                family: full.family,
            }))
        }
        Command::Family(a) => {
            let spec = family_spec(&a.case, &a.flags)?;
            let family = build_family_with_cap(&spec, cap)?;
            let analysis = analyze(&family.group, backend(a.oracle), cap, Some(&family))?;
            Ok(to_value(&FamilyReport { spec, analysis, isogeny: family.isogeny_report() }))
        }
        Command::Isogeny(a) => {
            let r = resolve(a, cap)?;
            let m = r.group.modulus();
            Ok(to_value(&IsogenyReport {
                p: m.p(),
                n: m.n(),
                generators: r.group.generators().iter().map(RawMat2::from).collect(),
                group_order: r.group.order(),
                levels: isogeny_report(&r.group),
            }))
        }
        Command::Grid(a) => {
            if a.budget == 0 {
                return invalid("--budget must be positive");
            }
            for &p in &a.primes {
                for &n in &a.exponents {
                    let m = Modulus::new(p, n).map_err(|e| Failure::Invalid(e.to_string()))?;
                    if m.value() as usize > cap {
                        return Err(Failure::Cap(format!("p^n = {p}^{n} exceeds the cap of {cap}")));
                    }
                }
            }
            let cfg = GridConfig {
                primes: a.primes.clone(),
                exponents: a.exponents.clone(),
                group_cap: cap,
                budget: a.budget,
                seed: cli.seed,
                include_families: !a.no_families,
            };
            Ok(to_value(&vanishing_grid(&cfg)))
        }
        Command::Search(a) => {
            let c = SearchConstraints { i: a.i, j: a.j, m: a.m };
            let r = search_counterexamples(a.p, a.n, a.shape, &c, cap)?;
            Ok(to_value(&SearchReportJson::from(&r)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(v) => {
            let body = match cli.output {
                Output::Json => serde_json::to_string_pretty(&v).expect("json") + "\n",
                Output::Text => render::text(&v),
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f @ Failure::Invalid(_)) => {
            eprintln!("error: {f}");
            ExitCode::from(1)
        }
        Err(f @ Failure::Cap(_)) => {
            eprintln!("cap exceeded: {f}");
            ExitCode::from(2)
        }
    }
}
