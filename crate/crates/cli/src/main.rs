use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use entropic_core::certify::{
    run_condition13, run_entropic, run_entropy_gain_convexity, run_equivalence_13_vs_hessian,
    run_gap_concavity, run_gap_superadditive, run_matrix_entropy, run_principle1_concavity,
    run_subentropic_order_k, uniqueness_pipeline_cached, PipelineReport, SuiteRun, TestConfig,
    TestOutcome, TrialRecord, Verdict,
};
use entropic_core::report::{sweep_csv, CertificationReport, FunctionSpec};
use entropic_core::scalar::registry;
use entropic_core::{Error, ScalarFunction};

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "entropic", version, about = "Randomized certification of entropy conditions for matrix functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and write a JSON report.
    Certify(RunArgs),
    /// List registry functions with f(1), f'(1), f''(1).
    List,
    /// Run suites and write per-trial margins as CSV.
    Sweep(RunArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Principle1,
    Entropic,
    Subentropic,
    Condition13,
    MatrixEntropy,
    Gap,
    Gain,
    Uniqueness,
}

#[derive(Args)]
struct RunArgs {
    /// Registry name, e.g. tlogt, neglog, power:1.5
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    function: Option<String>,
    /// Expression in t, e.g. "t*log(t)"
    #[arg(long)]
    expr: Option<String>,
    /// Value used at zero eigenvalues: a number or "none"
    #[arg(long)]
    zero_extension: Option<String>,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Matrix dimension (repeatable)
    #[arg(long = "dim")]
    dims: Vec<usize>,
    /// Bipartite shape d1xd2 (repeatable)
    #[arg(long, value_parser = parse_shape)]
    bipartite: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0.1)]
    eig_min: f64,
    #[arg(long, default_value_t = 10.0)]
    eig_max: f64,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-trial margins to this CSV file
    #[arg(long)]
    sweep_csv: Option<PathBuf>,
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected d1xd2, got {s:?}"))?;
    let dim = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    Ok((dim(a)?, dim(b)?))
}

fn parse_zero_extension(s: &str) -> entropic_core::Result<Option<f64>> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| Error::Config(format!("zero extension must be a number or \"none\", got {s:?}")))
}

fn resolve_function(args: &RunArgs) -> entropic_core::Result<(ScalarFunction, FunctionSpec)> {
    let zext = args.zero_extension.as_deref().map(parse_zero_extension).transpose()?;
    let (f, expression) = match (&args.function, &args.expr) {
        (Some(name), _) => {
            let f = ScalarFunction::lookup(name)?;
            let f = match zext {
                Some(z) => f.with_zero_extension(z),
                None => f,
            };
            (f, None)
        }
        (None, Some(src)) => (ScalarFunction::from_expression(src, zext.flatten())?, Some(src.clone())),
        (None, None) => return Err(Error::Config("either --function or --expr is required".into())),
    };
    let spec = FunctionSpec {
        name: f.name().to_string(),
        expression,
        zero_extension: f.zero_extension(),
    };
    Ok((f, spec))
}

fn threads_from_env() -> entropic_core::Result<Option<usize>> {
    match std::env::var("ENTROPIC_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("ENTROPIC_THREADS must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn build_config(args: &RunArgs) -> entropic_core::Result<TestConfig> {
    let cfg = TestConfig {
        dims: if args.dims.is_empty() { vec![2, 3] } else { args.dims.clone() },
        bipartite: if args.bipartite.is_empty() { vec![(2, 2)] } else { args.bipartite.clone() },
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
        eig_range: (args.eig_min, args.eig_max),
        threads: threads_from_env()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

struct Collected {
    outcomes: Vec<TestOutcome>,
    pipeline: Option<PipelineReport>,
    records: Vec<TrialRecord>,
}

fn run_suites(f: &ScalarFunction, cfg: &TestConfig, suite: Suite) -> entropic_core::Result<Collected> {
    type Runner = fn(&ScalarFunction, &TestConfig) -> entropic_core::Result<SuiteRun>;
    let sub2: Runner = |f, c| run_subentropic_order_k(f, 2, c);
    let sub3: Runner = |f, c| run_subentropic_order_k(f, 3, c);
    let runners: Vec<Runner> = match suite {
        Suite::All => vec![
            run_principle1_concavity,
            run_entropic,
            sub2,
            sub3,
            run_condition13,
            run_equivalence_13_vs_hessian,
            run_matrix_entropy,
            run_entropy_gain_convexity,
            run_gap_superadditive,
            run_gap_concavity,
        ],
        Suite::Principle1 => vec![run_principle1_concavity],
        Suite::Entropic => vec![run_entropic],
        Suite::Subentropic => vec![sub2, sub3],
        Suite::Condition13 => vec![run_condition13],
        Suite::MatrixEntropy => vec![run_matrix_entropy],
        Suite::Gap => vec![run_gap_superadditive, run_gap_concavity],
        Suite::Gain => vec![run_entropy_gain_convexity],
        Suite::Uniqueness => vec![],
    };
    let mut outcomes = Vec::new();
    let mut records = Vec::new();
    for run in runners {
        let r = run(f, cfg)?;
        outcomes.push(r.outcome);
        records.extend(r.records);
    }
    let mut pipeline = None;
    if matches!(suite, Suite::All | Suite::Uniqueness) {
        let mut cache: BTreeMap<String, TestOutcome> =
            outcomes.iter().map(|o| (o.name.clone(), o.clone())).collect();
        let p = uniqueness_pipeline_cached(f, cfg, &mut cache)?;
        outcomes.push(p.outcome.clone());
        pipeline = Some(p);
    }
    Ok(Collected {
        outcomes,
        pipeline,
        records,
    })
}

fn write_output(path: Option<&PathBuf>, text: &str) -> entropic_core::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code(outcomes: &[TestOutcome]) -> u8 {
    if outcomes.iter().any(|o| o.verdict == Verdict::Fail) {
        1
    } else if outcomes.iter().all(|o| o.verdict == Verdict::Pass) {
        0
    } else {
        2
    }
}

fn certify(args: &RunArgs) -> entropic_core::Result<u8> {
    let start = Instant::now();
    let (f, spec) = resolve_function(args)?;
    let cfg = build_config(args)?;
    let c = run_suites(&f, &cfg, args.suite)?;
    let code = exit_code(&c.outcomes);
    let report = CertificationReport::new(spec, cfg, c.outcomes, c.pipeline, start.elapsed().as_millis() as u64)?;
    let mut json = report.to_json()?;
    json.push('\n');
    write_output(args.out.as_ref(), &json)?;
    if let Some(p) = &args.sweep_csv {
        write_output(Some(p), &sweep_csv(&c.records))?;
    }
    for o in &report.outcomes {
        eprintln!("{:<26} {}", o.name, o.verdict);
    }
    Ok(code)
}

fn sweep(args: &RunArgs) -> entropic_core::Result<u8> {
    let (f, _) = resolve_function(args)?;
    let cfg = build_config(args)?;
    let c = run_suites(&f, &cfg, args.suite)?;
    let csv = sweep_csv(&c.records);
    write_output(args.out.as_ref(), &csv)?;
    if let Some(p) = &args.sweep_csv {
        write_output(Some(p), &csv)?;
    }
    Ok(exit_code(&c.outcomes))
}

fn list() -> u8 {
    println!("{:<12} {:>10} {:>10} {:>10}  zero_extension", "name", "f(1)", "f'(1)", "f''(1)");
    for f in registry() {
        let zext = f.zero_extension().map_or("none".to_string(), |v| v.to_string());
        match f.jet(1.0) {
            Ok(j) => println!("{:<12} {:>10} {:>10} {:>10}  {zext}", f.name(), j.value + 0.0, j.d1 + 0.0, j.d2 + 0.0),
            Err(e) => println!("{:<12} {e}", f.name()),
        }
    }
    0
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
        Command::List => Ok(list()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
