//! `retrieval`: exact expected retrieval times for two-file linear codes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use coded_retrieval::bounds::{bound_report, region_table, BoundReport};
use coded_retrieval::expectation::{closed_alpha, closed_pair, DISPLAY_DIGITS};
use coded_retrieval::explore::{
    asymptotic_trace, compare_local_global, family_frontier, verify_hyperbolic, FamilyKind,
    VerifyParams,
};
use coded_retrieval::simulate::simulate;
use coded_retrieval::subset_counts::alpha_exhaustive_with;
use coded_retrieval::{
    expected_time_from_alpha, parse_matrix, to_decimal, write_matrix, AlphaProfile, CodeSpec,
    EnumOptions, Error, Family, FileId, FilePartition, Matrix, PrimeField, Rational, RetrievalPair,
};

#[derive(Parser)]
#[command(
    name = "retrieval",
    version,
    about = "Expected retrieval times for two files in one linear code"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "RETRIEVAL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact E1, E2, subset profiles, column classes and bound checks for one code.
    Compute(ComputeArgs),
    /// Operating points of a construction family, with Pareto flags.
    Frontier(FrontierArgs),
    /// Bound curves and construction points for one (n, k, s1) panel, as CSV.
    Region(RegionArgs),
    /// Monte Carlo estimate of the retrieval times.
    Simulate(SimulateArgs),
    /// Random search for codes above the conjectured hyperbola.
    Verify(VerifyArgs),
    /// Local versus global MDS at the proportional allocation.
    Compare(CompareArgs),
    /// Dedicated allocations approaching a point on the hyperbola.
    Trace(TraceArgs),
    /// Writes a construction as a tagged code file.
    Construct(ConstructArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Closed,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Dedicated,
    Global,
    Identity,
    Hybrid,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    s1: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Enumerate beyond the default size cap.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FrontierArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Required for dedicated and global.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
    /// Samples per curve.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
    grid: u32,
    /// Output path, `-` for stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    s1: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra code files evaluated before the random samples.
    #[arg(long)]
    inject: Vec<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
    /// Target E1 as `num/den` or an integer.
    #[arg(long)]
    e1: String,
    /// Target E2 as `num/den` or an integer.
    #[arg(long)]
    e2: String,
    /// Comma-separated block lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Block length (dedicated: n1 + n2, global: n).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s1: usize,
    /// Columns given to F1 (dedicated only).
    #[arg(long)]
    n1: Option<usize>,
    /// Output path, `-` for stdout.
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Lib(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::TooLarge { .. } | Error::TrialOverflow { .. }) => 3,
            Failure::Lib(_) => 2,
            Failure::Io(..) => 4,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Frontier(a) => cmd_frontier(a),
        Command::Region(a) => cmd_region(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Construct(a) => cmd_construct(a),
    };
    match result.and_then(|out| emit(&out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(p, e) => eprintln!("error: {}: {e}", p.display()),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn emit(out: &str) -> CliResult<()> {
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
}

fn opts(force: bool) -> EnumOptions {
    EnumOptions {
        force,
        ..EnumOptions::default()
    }
}

fn read_code(path: &Path) -> CliResult<coded_retrieval::CodeFile> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::Lib(Error::InvalidArgument(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    Ok(parse_matrix(&text)?)
}

/// Writes `text` to `path`, or returns it for stdout when `path` is `-`.
fn write_out(path: &Path, text: String) -> CliResult<String> {
    if path == Path::new("-") {
        return Ok(text);
    }
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    Ok(String::new())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn hyperbolic_flag(sum: &Rational, part: FilePartition) -> String {
    if *sum <= Rational::from_integer(1.into()) {
        "within 1".into()
    } else if part.s_max() == 1 {
        format!("exceeds 1 (excluded regime k={})", part.k())
    } else {
        "exceeds 1 (conjecture violated)".into()
    }
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Exhaustive => "exhaustive",
        MethodArg::Closed => "closed",
        MethodArg::Auto => "auto",
    }
}

struct Computed {
    method: MethodArg,
    pair: RetrievalPair<Rational>,
    alpha: [AlphaProfile; 2],
}

fn evaluate(
    code: &CodeSpec,
    family: Option<&Family>,
    method: MethodArg,
    o: &EnumOptions,
) -> CliResult<Computed> {
    let closed = |f: &Family| -> coded_retrieval::Result<Computed> {
        Ok(Computed {
            method: MethodArg::Closed,
            pair: closed_pair(f, code)?,
            alpha: closed_alpha(f, code)?,
        })
    };
    let exhaustive = || -> coded_retrieval::Result<Computed> {
        let alpha = [
            alpha_exhaustive_with(code, FileId::F1, o)?,
            alpha_exhaustive_with(code, FileId::F2, o)?,
        ];
        Ok(Computed {
            method: MethodArg::Exhaustive,
            pair: RetrievalPair::new(
                expected_time_from_alpha(&alpha[0])?,
                expected_time_from_alpha(&alpha[1])?,
            ),
            alpha,
        })
    };
    Ok(match method {
        MethodArg::Exhaustive => exhaustive()?,
        MethodArg::Closed => {
            let f = family.ok_or_else(|| {
                Error::InvalidArgument(
                    "--method closed needs a `# family:` tag in the code file".into(),
                )
            })?;
            closed(f)?
        }
        MethodArg::Auto => match family.map(closed) {
            Some(Ok(c)) => c,
            _ => exhaustive()?,
        },
    })
}

fn counts(a: &AlphaProfile) -> Vec<String> {
    a.counts.iter().map(|c| c.to_string()).collect()
}

fn cmd_compute(a: &ComputeArgs) -> CliResult<String> {
    let file = read_code(&a.code)?;
    let code = CodeSpec::new(file.matrix, a.s1)?;
    let part = code.partition();
    let c = evaluate(&code, file.family.as_ref(), a.method, &opts(a.force))?;
    let report = bound_report(&code, &c.pair)?;
    let class = code.classify_columns();
    let flag = hyperbolic_flag(&report.hyperbolic_sum, part);
    let (d1, d2) = c.pair.decimals();

    if a.json {
        let v = json!({
            "schema": 1,
            "n": code.n(),
            "k": code.k(),
            "s1": part.s1,
            "s2": part.s2,
            "q": code.field().modulus(),
            "family": file.family,
            "method": method_name(c.method),
            "e1": c.pair.e1.to_string(),
            "e2": c.pair.e2.to_string(),
            "e1_decimal": d1,
            "e2_decimal": d2,
            "alpha": { "f1": counts(&c.alpha[0]), "f2": counts(&c.alpha[1]) },
            "classification": class,
            "hyperbolic": { "sum": report.hyperbolic_sum.to_string(), "flag": flag },
            "bounds": report,
        });
        return Ok(to_json(&v));
    }
    if a.csv {
        return Ok(compute_csv(&code, &c, &report, &flag));
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "code: {}x{} over GF({}), s1={} s2={}",
        code.k(),
        code.n(),
        code.field().modulus(),
        part.s1,
        part.s2
    );
    if let Some(f) = &file.family {
        let _ = writeln!(out, "family: {f}");
    }
    let _ = writeln!(out, "method: {}", method_name(c.method));
    let _ = writeln!(out, "E1 = {} ({d1})", c.pair.e1);
    let _ = writeln!(out, "E2 = {} ({d2})", c.pair.e2);
    for (i, al) in c.alpha.iter().enumerate() {
        let _ = writeln!(out, "alpha F{}: {}", i + 1, counts(al).join(" "));
    }
    let _ = writeln!(
        out,
        "columns: pure F1 {:?}, pure F2 {:?}, mixed {:?}, zero {:?}",
        class.pure1, class.pure2, class.mixed, class.zero
    );
    let _ = writeln!(
        out,
        "counts: n_F1={} n_F2={} m_mix={}",
        class.n_f1, class.n_f2, class.m_mix
    );
    let _ = writeln!(
        out,
        "hyperbolic: s1/E1 + s2/E2 = {} {flag}",
        report.hyperbolic_sum
    );
    let _ = writeln!(out, "bounds:");
    for e in &report.entries {
        let status = match (e.satisfied, e.conjectured) {
            (true, _) => "ok",
            (false, true) => "above (conjectured bound)",
            (false, false) => "VIOLATED",
        };
        let _ = writeln!(
            out,
            "  {:<24} {:<48} rhs {:<14} slack {:<14} {status}",
            e.name,
            e.relation,
            e.rhs.to_string(),
            e.slack.to_string()
        );
    }
    Ok(out)
}

fn compute_csv(code: &CodeSpec, c: &Computed, report: &BoundReport, flag: &str) -> String {
    let mut out = String::from("# schema: 1\nsection,key,value\n");
    let part = code.partition();
    let (d1, d2) = c.pair.decimals();
    let mut row = |s: &str, k: &str, v: String| {
        let _ = writeln!(out, "{s},{k},{v}");
    };
    row("code", "n", code.n().to_string());
    row("code", "k", code.k().to_string());
    row("code", "s1", part.s1.to_string());
    row("code", "s2", part.s2.to_string());
    row("code", "q", code.field().modulus().to_string());
    row("code", "method", method_name(c.method).into());
    row("point", "e1", c.pair.e1.to_string());
    row("point", "e2", c.pair.e2.to_string());
    row("point", "e1_decimal", d1);
    row("point", "e2_decimal", d2);
    for (i, al) in c.alpha.iter().enumerate() {
        for (s, v) in counts(al).into_iter().enumerate() {
            row(&format!("alpha_f{}", i + 1), &s.to_string(), v);
        }
    }
    let class = code.classify_columns();
    row("classification", "n_f1", class.n_f1.to_string());
    row("classification", "n_f2", class.n_f2.to_string());
    row("classification", "m_mix", class.m_mix.to_string());
    row("classification", "zero", class.zero.len().to_string());
    row("hyperbolic", "sum", report.hyperbolic_sum.to_string());
    row("hyperbolic", "flag", flag.into());
    for e in &report.entries {
        row(&e.name, "rhs", e.rhs.to_string());
        row(&e.name, "slack", e.slack.to_string());
        row(&e.name, "satisfied", e.satisfied.to_string());
        row(&e.name, "conjectured", e.conjectured.to_string());
    }
    out
}

fn need_n(n: Option<usize>, family: &str) -> CliResult<usize> {
    n.ok_or_else(|| {
        Failure::Lib(Error::InvalidArgument(format!(
            "--n is required for {family}"
        )))
    })
}

fn cmd_frontier(a: &FrontierArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let (kind, n) = match a.family {
        FamilyArg::Dedicated => (FamilyKind::Dedicated, need_n(a.n, "dedicated")?),
        FamilyArg::Global => (FamilyKind::Global, need_n(a.n, "global")?),
        FamilyArg::Identity => (FamilyKind::Identity, a.k),
        FamilyArg::Hybrid => (FamilyKind::Hybrid, 2 * a.k),
    };
    let points = family_frontier(kind, n, part, &opts(a.force))?;
    if a.json {
        return Ok(to_json(&json!({
            "schema": 1,
            "n": n,
            "k": a.k,
            "s1": part.s1,
            "s2": part.s2,
            "points": points,
        })));
    }
    let mut out = String::from("# schema: 1\nlabel,e1,e2,e1_decimal,e2_decimal,pareto\n");
    for p in &points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.label,
            p.pair.e1,
            p.pair.e2,
            to_decimal(&p.pair.e1, DISPLAY_DIGITS),
            to_decimal(&p.pair.e2, DISPLAY_DIGITS),
            p.pareto
        );
    }
    Ok(out)
}

fn cmd_region(a: &RegionArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let table = region_table(a.n, part, a.grid as usize)?;
    write_out(&a.out, table.to_csv())
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<String> {
    let file = read_code(&a.code)?;
    let code = CodeSpec::new(file.matrix, a.s1)?;
    let est = simulate(&code, a.trials, a.seed)?;
    Ok(to_json(&est.report()))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let q = PrimeField::new(a.q)?;
    let injected: Vec<Matrix> = a
        .inject
        .iter()
        .map(|p| read_code(p).map(|f| f.matrix))
        .collect::<CliResult<_>>()?;
    let params = VerifyParams {
        n: a.n,
        part,
        q,
        samples: a.samples,
        seed: a.seed,
        opts: opts(a.force),
    };
    Ok(to_json(&verify_hyperbolic(&params, &injected)?))
}

fn cmd_compare(a: &CompareArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let cmp = compare_local_global(a.n, part)?;
    let mut v = serde_json::to_value(&cmp).expect("serializable");
    v["schema"] = json!(1);
    Ok(to_json(&v))
}

fn parse_rational(flag: &str, s: &str) -> CliResult<Rational> {
    s.trim().parse::<Rational>().map_err(|_| {
        Failure::Lib(Error::InvalidArgument(format!(
            "{flag}: not a rational number: {s:?}"
        )))
    })
}

fn cmd_trace(a: &TraceArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let target = RetrievalPair::new(
        parse_rational("--e1", &a.e1)?,
        parse_rational("--e2", &a.e2)?,
    );
    let rows = asymptotic_trace(part, &target, &a.n)?;
    let mut out =
        String::from("# schema: 1\nn,n1,n2,e1,e2,gap1,gap2,hyperbolic_sum,max_gap_decimal\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.n1,
            r.n2,
            r.e1,
            r.e2,
            r.gap1,
            r.gap2,
            r.hyperbolic_sum,
            to_decimal(r.max_gap(), DISPLAY_DIGITS)
        );
    }
    Ok(out)
}

fn cmd_construct(a: &ConstructArgs) -> CliResult<String> {
    let part = FilePartition::new(a.k, a.s1)?;
    let family = match a.family {
        FamilyArg::Identity => Family::Identity { k: a.k },
        FamilyArg::Hybrid => Family::Hybrid { k: a.k },
        FamilyArg::Global => Family::Global {
            n: need_n(a.n, "global")?,
            k: a.k,
        },
        FamilyArg::Dedicated => {
            let n = need_n(a.n, "dedicated")?;
            let n1 = a.n1.ok_or_else(|| {
                Failure::Lib(Error::InvalidArgument(
                    "--n1 is required for dedicated".into(),
                ))
            })?;
            if n1 > n {
                return Err(Error::BadAllocation {
                    n1,
                    n2: 0,
                    s1: part.s1,
                    s2: part.s2,
                }
                .into());
            }
            Family::Dedicated {
                n1,
                n2: n - n1,
                s1: part.s1,
                s2: part.s2,
            }
        }
    };
    let code = family.build(part.s1)?;
    write_out(&a.out, write_matrix(code.matrix(), Some(&family)))
}
