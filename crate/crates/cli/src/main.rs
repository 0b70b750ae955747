use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacpair::analyze::{check_derivation_conditions_with, check_nabla_identity, conjecture_report, Conditions};
use jacpair::families::{FamilyError, FamilySpec};
use jacpair::field::is_prime;
use jacpair::forms::UniPoly;
use jacpair::morph::{default_budget, random_chain, KindWeights, MorphError};
use jacpair::report::{
    run_sweep, ChainKind, ChainSet, FamilyRange, ReportRow, SweepGrid, SweepReport, SCHEMA_VERSION,
};
use jacpair::sample::random_poly;
use jacpair::{FieldCtx, MultiPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "jacpair", version, about = "Jacobian pairs over prime fields")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "JACPAIR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report on a pair given inline or in a file (two polynomial lines).
    Check(CheckArgs),
    /// Build a pair from a family and report on it.
    Gen(GenArgs),
    /// Run a parameter grid and write a JSON or CSV report.
    Sweep(SweepArgs),
    /// Check the nabla identity (and, for n = 2, the derivation criteria) on seeded inputs.
    Identity(IdentityArgs),
    /// Re-emit a saved JSON report as JSON, CSV or a summary line.
    Report(ReportArgs),
}

fn prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    FieldCtx::new(p).map_err(|e| e.to_string())?;
    Ok(p)
}

/// `LO..HI`, inclusive.
fn inclusive(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got '{s}'"))?;
    let lo: u32 = lo.parse().map_err(|_| format!("bad bound '{lo}'"))?;
    let hi: u32 = hi.trim_start_matches('=').parse().map_err(|_| format!("bad bound '{hi}'"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short, value_parser = prime)]
    p: u64,
    /// File holding f1 and f2 on separate lines; blank lines and '#' comments are skipped.
    #[arg(long, conflicts_with_all = ["f1", "f2"])]
    file: Option<PathBuf>,
    #[arg(required_unless_present = "file")]
    f1: Option<String>,
    #[arg(required_unless_present = "file")]
    f2: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ex41,
    Ex44c1,
    Ex44c2,
    Prop48,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    #[arg(short, value_parser = prime)]
    p: u64,
    #[arg(short)]
    a: Option<u32>,
    #[arg(short)]
    b: Option<u32>,
    #[arg(short)]
    m: Option<u32>,
    #[arg(short)]
    s: Option<u32>,
    #[arg(long)]
    alpha: Option<u64>,
    #[arg(long)]
    alpha1: Option<u64>,
    /// Univariate polynomial in x1.
    #[arg(long)]
    h1: Option<String>,
    /// Univariate polynomial in x1.
    #[arg(long)]
    h2: Option<String>,
    /// Homogeneous bivariate core.
    #[arg(long)]
    hcore: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFamily {
    Ex41,
    Ex44c2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chains {
    Pmorph,
    Mixed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SweepArgs {
    /// The 800-chain standard grid (p = 2, 3, 5, 7; 200 seeds each); other grid flags add to it.
    #[arg(long)]
    standard: bool,
    /// Comma-separated primes.
    #[arg(long, value_parser = prime, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long = "family", value_enum)]
    families: Vec<SweepFamily>,
    /// Inclusive range of a, e.g. 2..6; default: every valid a.
    #[arg(long, value_parser = inclusive)]
    a: Option<(u32, u32)>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    m: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    s: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    alpha: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    alpha1: Vec<u64>,
    /// Add seeded random chains of this kind.
    #[arg(long, value_enum)]
    chains: Option<Chains>,
    /// Number of chain seeds, starting at --seed-start.
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    #[arg(long, default_value_t = 4)]
    length: usize,
    /// Image degree cap; default 3p^2.
    #[arg(long)]
    budget: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(short, value_parser = clap::value_parser!(u8).range(1..=3))]
    n: u8,
    #[arg(short, value_parser = prime)]
    p: u64,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Summary,
}

#[derive(Args)]
struct ReportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "summary")]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Why a command did not succeed.
enum Failure {
    /// A mathematical check came out false.
    Check(String),
    /// Bad input, parse error or I/O problem.
    Usage(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Serialize)]
struct PairOutput<'a> {
    schema: u32,
    #[serde(flatten)]
    row: &'a ReportRow,
    witness: Option<String>,
}

fn emit(text: &str, output: Option<&PathBuf>) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Failure::usage),
    }
}

fn print_pair(row: &ReportRow, witness: Option<String>) -> Outcome {
    let out = PairOutput { schema: SCHEMA_VERSION, row, witness };
    let mut s = serde_json::to_string_pretty(&out).map_err(Failure::usage)?;
    s.push('\n');
    emit(&s, None)
}

fn check(args: &CheckArgs) -> Outcome {
    let ctx = FieldCtx::new(args.p).map_err(Failure::usage)?;
    let (s1, s2, l1, l2) = match &args.file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let lines: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty())
                .collect();
            if lines.len() != 2 {
                return Err(Failure::usage(format!("expected 2 polynomial lines, found {}", lines.len())));
            }
            (lines[0].1.to_string(), lines[1].1.to_string(), lines[0].0, lines[1].0)
        }
        None => (args.f1.clone().unwrap_or_default(), args.f2.clone().unwrap_or_default(), 1, 2),
    };
    let f1 = MultiPoly::parse_line(ctx, 2, &s1, l1).map_err(Failure::usage)?;
    let f2 = MultiPoly::parse_line(ctx, 2, &s2, l2).map_err(Failure::usage)?;
    if f1.is_zero() || f2.is_zero() {
        return Err(Failure::usage("both polynomials must be nonzero"));
    }
    let report = conjecture_report(&f1, &f2, None).map_err(Failure::usage)?;
    let row = ReportRow::from_report(&report, &f1, &f2);
    print_pair(&row, report.witness.map(|w| w.to_text().trim_end().replace('\n', "; ")))?;
    if row.is_jacobian {
        Ok(())
    } else {
        Err(Failure::Check(format!("not a Jacobian pair: J = {}", row.jacobian_value)))
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing {flag}")))
}

fn gen(args: &GenArgs) -> Outcome {
    let p = args.p;
    let ctx = FieldCtx::new(p).map_err(Failure::usage)?;
    let uni = |s: &Option<String>, flag: &str| -> Result<UniPoly, Failure> {
        UniPoly::parse(ctx, need(s.as_deref(), flag)?).map_err(Failure::usage)
    };
    let spec = match args.family {
        Family::Ex41 => FamilySpec::Linear {
            p,
            a: need(args.a, "-a")?,
            m: need(args.m, "-m")?,
            alpha: need(args.alpha, "--alpha")?,
        },
        Family::Ex44c1 => FamilySpec::Product { p, h1: uni(&args.h1, "--h1")?, h2: uni(&args.h2, "--h2")? },
        Family::Ex44c2 => FamilySpec::Quadratic {
            p,
            a: need(args.a, "-a")?,
            s: need(args.s, "-s")?,
            alpha1: need(args.alpha1, "--alpha1")?,
        },
        Family::Prop48 => FamilySpec::General {
            p,
            a: need(args.a, "-a")?,
            b: need(args.b, "-b")?,
            hcore: MultiPoly::parse(ctx, 2, args.hcore.as_deref().unwrap_or("1")).map_err(Failure::usage)?,
            h1: uni(&args.h1, "--h1")?,
            h2: uni(&args.h2, "--h2")?,
        },
    };
    let family_failure = |e: FamilyError| match e {
        FamilyError::DerivativeNotConstant(_)
        | FamilyError::NotJacobian(_)
        | FamilyError::Morph(MorphError::TypeBCondition(_)) => Failure::Check(e.to_string()),
        other => Failure::usage(other),
    };
    let tb = spec.type_b().map_err(family_failure)?;
    let (f1, f2) = spec.build().map_err(family_failure)?;
    let report = conjecture_report(&f1, &f2, Some(tb.extension_degree())).map_err(Failure::usage)?;
    let mut row = ReportRow::from_report(&report, &f1, &f2);
    row.family = Some(spec.tag().to_string());
    row.params = spec.to_string();
    print_pair(&row, None)
}

fn sweep_grid(args: &SweepArgs) -> SweepGrid {
    let mut grid = if args.standard { SweepGrid::standard() } else { SweepGrid::default() };
    for &p in &args.primes {
        if !grid.primes.contains(&p) {
            grid.primes.push(p);
        }
    }
    let a = args.a.map(|(lo, hi)| lo..=hi);
    for f in &args.families {
        grid.families.push(match f {
            SweepFamily::Ex41 => FamilyRange::Linear { a: a.clone(), m: args.m.clone(), alpha: args.alpha.clone() },
            SweepFamily::Ex44c2 => {
                FamilyRange::Quadratic { a: a.clone(), s: args.s.clone(), alpha1: args.alpha1.clone() }
            }
        });
    }
    if let Some(kind) = args.chains {
        grid.chains.push(ChainSet {
            kind: match kind {
                Chains::Pmorph => ChainKind::PMorphism,
                Chains::Mixed => ChainKind::Mixed,
            },
            seeds: (args.seed_start..args.seed_start + args.seeds).collect(),
            length: args.length,
            budget: args.budget,
        });
    }
    grid
}

fn sweep(args: &SweepArgs) -> Outcome {
    let grid = sweep_grid(args);
    let points = grid.expand().map_err(Failure::usage)?;
    eprintln!("grid: {} points", points.len());
    let report = run_sweep(&grid).map_err(Failure::usage)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
    .map_err(Failure::usage)?;
    emit(&text, args.output.as_ref())?;
    eprintln!("summary: {}", report.summary);
    let bad = report.rows.iter().filter(|r| !r.is_jacobian).count();
    if bad > 0 {
        return Err(Failure::Check(format!("{bad} rows are not Jacobian pairs")));
    }
    Ok(())
}

fn identity(args: &IdentityArgs) -> Outcome {
    let ctx = FieldCtx::new(args.p).map_err(Failure::usage)?;
    let n = args.n as usize;
    if args.count == 0 {
        eprintln!("warning: --count 0, nothing to check");
        println!("identity n={n} p={}: 0/0 tuples pass", args.p);
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passed = 0;
    for _ in 0..args.count {
        let fs: Vec<MultiPoly> = (0..n).map(|_| random_poly(&mut rng, ctx, n, 6, 8)).collect();
        passed += check_nabla_identity(&fs).map_err(Failure::usage)? as u64;
    }
    println!("identity n={n} p={}: {passed}/{} tuples pass", args.p, args.count);
    let mut failures = args.count - passed;
    if n == 2 {
        let mut ok = 0;
        for k in 0..args.count {
            let seed = args.seed.wrapping_add(k);
            let chain = random_chain(ctx, seed, 3, &KindWeights::P_MORPHISM, default_budget(args.p))
                .map_err(Failure::usage)?;
            let (f1, f2) = chain.apply().map_err(Failure::usage)?;
            let g = random_poly(&mut rng, ctx, 2, 3, 3);
            let gs = [MultiPoly::var(ctx, 2, 0), MultiPoly::var(ctx, 2, 1), g];
            let which = Conditions { table: true, reconstruction: true, operator: false };
            let rep = check_derivation_conditions_with(&f1, &f2, &gs, which).map_err(Failure::usage)?;
            ok += rep.all_hold() as u64;
        }
        println!("derivation criteria p={}: {ok}/{} Jacobian pairs pass", args.p, args.count);
        failures += args.count - ok;
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failures} failures")))
    }
}

fn report(args: &ReportArgs) -> Outcome {
    let text = fs::read_to_string(&args.input).map_err(|e| Failure::usage(format!("{}: {e}", args.input.display())))?;
    let rep = SweepReport::from_json(&text).map_err(Failure::usage)?;
    let out = match args.format {
        ReportFormat::Json => rep.to_json().map_err(Failure::usage)?,
        ReportFormat::Csv => rep.to_csv().map_err(Failure::usage)?,
        ReportFormat::Summary => format!("{}\n", rep.summary),
    };
    emit(&out, args.output.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Check(a) => check(a),
        Command::Gen(a) => gen(a),
        Command::Sweep(a) => sweep(a),
        Command::Identity(a) => identity(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
