//! `transference`: flow traces, exponent estimates and inequality checks for
//! real matrices, written as CSV and JSON.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use transference::fixtures::{default_corpus, FixtureFile, FixtureKind, FixtureSpec};
use transference::flow::{
    build_lattice, psi_profile, psi_profile_exact, successive_minima, witness_sidecar, write_trace_csv,
    MinimaConfig, PathSpec, ProfileConfig,
};
use transference::harness::{run_suite, ReportBundle, SuiteConfig, Verdict};
use transference::numeric::format_rational;
use transference::ApproximationProblem;

use config::RunConfig;
use output::{fan_out, print_bundle_table, print_corpus_line, write_atomic};

const EXIT_VIOLATED: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "transference", version)]
#[command(about = "Successive minima along a diagonal flow, Diophantine exponents and transference checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` config file (see README for keys).
    #[arg(long, global = true, env = "TRANSFERENCE_CONFIG")]
    config: Option<PathBuf>,
    /// Fixture JSON file, a default-corpus name, or `zero` (Θ = 0 of shape n×m).
    /// Without it a seeded uniform matrix of shape n×m is used.
    #[arg(long, global = true)]
    fixture: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision of real entries (default from $TRANSFERENCE_PRECISION_BITS, else 192).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[arg(long, global = true)]
    s_min: Option<f64>,
    #[arg(long, global = true)]
    s_max: Option<f64>,
    #[arg(long, global = true)]
    s_step: Option<f64>,
    /// Flow on s = n ln u for u = 2..=U instead of the uniform s-grid.
    #[arg(long, global = true, value_name = "U")]
    exact_grid: Option<u64>,
    /// Largest |x| of the classical search.
    #[arg(long, global = true)]
    t_max: Option<u64>,
    /// Enumeration height of the direct estimator.
    #[arg(long, global = true)]
    height: Option<i64>,
    /// Tolerance τ of exponent-level inequalities.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Output file (directory for corpus runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Restrict checks to these families (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    only: Vec<String>,
    /// Work on the transposed matrix (flow and minima).
    #[arg(long, global = true)]
    transposed: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Flow trace as CSV, witnesses as a JSON sidecar next to --out.
    Flow,
    /// Exponent estimates of Θ and ᵗΘ by every method, with duality residuals.
    Exponents,
    /// Runs every check; exits 1 if any is violated.
    Verify {
        /// Run the whole default corpus.
        #[arg(long)]
        corpus: bool,
        /// Print JSON on stdout instead of the table.
        #[arg(long)]
        json: bool,
        /// Negative control: breaks λ₁ ≤ λ₂ in one sample of the trace.
        #[arg(long, hide = true)]
        corrupt_lambda_order: bool,
    },
    /// Writes a fixture file (or the whole default corpus into --out).
    Gen {
        #[arg(long, value_enum, default_value_t = GenKind::Random)]
        kind: GenKind,
        /// Entries for `rational` and `user`: rows separated by `;`, entries by `,`.
        #[arg(long)]
        entries: Option<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        corpus: bool,
    },
    /// Successive minima at one flow time.
    Minima {
        #[arg(long)]
        s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Random,
    Rational,
    User,
}

impl Common {
    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::from_env()?;
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        take!(n, m, seed, precision_bits, s_max, s_step, height, tolerance);
        if self.s_min.is_some() {
            cfg.s_min = self.s_min;
        }
        if self.exact_grid.is_some() {
            cfg.exact_grid = self.exact_grid;
        }
        if self.t_max.is_some() {
            cfg.t_max = self.t_max;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if !self.only.is_empty() {
            cfg.only = self.only.clone();
        }
        cfg.transposed |= self.transposed;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = cli.common.run_config()?;
    let fixture = cli.common.fixture.as_deref();
    match &cli.command {
        Command::Flow => cmd_flow(fixture, &cfg),
        Command::Exponents => cmd_exponents(fixture, &cfg),
        Command::Verify { corpus, json, corrupt_lambda_order } => {
            let mut suite = cfg.suite();
            suite.corrupt_lambda_order = *corrupt_lambda_order;
            if *corpus {
                if fixture.is_some() {
                    bail!("--corpus and --fixture are mutually exclusive");
                }
                cmd_verify_corpus(&cfg, &suite, *json)
            } else {
                cmd_verify(fixture, &cfg, &suite, *json)
            }
        }
        Command::Gen { kind, entries, name, corpus } => {
            cmd_gen(fixture, *kind, entries.as_deref(), name.as_deref(), *corpus, &cfg)
        }
        Command::Minima { s } => cmd_minima(fixture, *s, &cfg),
    }
}

/// The fixture named on the command line, or the seeded uniform default.
fn resolve_fixture(arg: Option<&str>, cfg: &RunConfig) -> Result<FixtureFile> {
    let spec = match arg {
        None => FixtureSpec::random(cfg.n, cfg.m, cfg.seed).with_precision(cfg.precision_bits),
        Some("zero") => {
            let rows = vec![vec!["0".to_string(); cfg.m]; cfg.n];
            FixtureSpec {
                name: format!("zero-{}x{}", cfg.n, cfg.m),
                n: cfg.n,
                m: cfg.m,
                seed: 0,
                precision_bits: cfg.precision_bits,
                kind: FixtureKind::Rational { entries: rows },
            }
        }
        Some(x) if Path::new(x).is_file() => {
            let mut file = FixtureFile::load(Path::new(x)).with_context(|| format!("loading fixture {x}"))?;
            if file.spec.name.is_empty() {
                file.spec.name = Path::new(x)
                    .file_stem()
                    .map_or_else(|| "fixture".into(), |s| s.to_string_lossy().into_owned());
            }
            return Ok(file);
        }
        Some(x) => default_corpus()
            .into_iter()
            .find(|s| s.name == x)
            .with_context(|| format!("{x:?} is neither a fixture file nor a default-corpus name"))?
            .with_precision(cfg.precision_bits),
    };
    Ok(FixtureFile { spec, materialized: None })
}

fn load_problem(arg: Option<&str>, cfg: &RunConfig) -> Result<(String, ApproximationProblem)> {
    let file = resolve_fixture(arg, cfg)?;
    let problem = file.problem().with_context(|| format!("materialising fixture {}", file.spec.name))?;
    Ok((file.spec.name, problem))
}

/// JSON text of `value`, with `generated_at` added when timestamps are on.
fn render(mut value: Value, cfg: &RunConfig) -> Result<String> {
    if cfg.timestamp {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH)?.as_secs();
        if let Value::Object(map) = &mut value {
            map.insert("generated_at".into(), json!(now));
        }
    }
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(text: &str, cfg: &RunConfig) -> Result<()> {
    match &cfg.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_flow(fixture: Option<&str>, cfg: &RunConfig) -> Result<u8> {
    let (_, problem) = load_problem(fixture, cfg)?;
    let problem = if cfg.transposed { problem.transpose() } else { problem };
    let path = PathSpec::standard(problem.n(), problem.m());
    let pcfg = ProfileConfig::default();
    let trace = match cfg.exact_grid {
        Some(u) => psi_profile_exact(&problem, &path, &(2..=u).collect::<Vec<_>>(), &pcfg),
        None => psi_profile(&problem, &path, &cfg.s_grid(), &pcfg),
    }
    .context("flow")?;
    for x in &trace {
        x.check_invariants(cfg.epsilon).context("trace failed validation")?;
    }
    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &trace, cfg.digits)?;
    match &cfg.out {
        Some(out) => {
            write_atomic(out, &csv)?;
            let sidecar = witness_sidecar(&trace, cfg.digits)? + "\n";
            write_atomic(&sidecar_path(out), sidecar.as_bytes())?;
        }
        None => print!("{}", String::from_utf8(csv)?),
    }
    Ok(0)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".witnesses.json");
    out.with_file_name(name)
}

fn cmd_exponents(fixture: Option<&str>, cfg: &RunConfig) -> Result<u8> {
    let (name, problem) = load_problem(fixture, cfg)?;
    let suite = SuiteConfig { direct: true, only: Some(Vec::new()), ..cfg.suite() };
    let b = run_suite(&problem, &name, &suite)?;
    let value = json!({
        "fixture": b.fixture,
        "n": b.n,
        "m": b.m,
        "solution_space": b.solution_space,
        "solution_space_transposed": b.solution_space_transposed,
        "flows": b.flows,
        "reports": b.exponents,
        "duality": b.duality,
        "errors": b.errors,
    });
    emit(&render(value, cfg)?, cfg)?;
    report_errors(&b)
}

fn report_errors(b: &ReportBundle) -> Result<u8> {
    for e in &b.errors {
        eprintln!("error: {}: {e}", b.fixture);
    }
    Ok(if b.errors.is_empty() { 0 } else { EXIT_ERROR })
}

fn exit_code(bundles: &[ReportBundle]) -> u8 {
    if bundles.iter().any(|b| !b.errors.is_empty()) {
        EXIT_ERROR
    } else if bundles.iter().any(ReportBundle::has_violations) {
        EXIT_VIOLATED
    } else {
        0
    }
}

fn cmd_verify(fixture: Option<&str>, cfg: &RunConfig, suite: &SuiteConfig, json_out: bool) -> Result<u8> {
    let (name, problem) = load_problem(fixture, cfg)?;
    let b = run_suite(&problem, &name, suite)?;
    let text = render(serde_json::to_value(&b)?, cfg)?;
    if let Some(path) = &cfg.out {
        write_atomic(path, text.as_bytes())?;
    }
    if json_out {
        print!("{text}");
    } else {
        print_bundle_table(&b);
    }
    report_errors(&b)?;
    Ok(exit_code(std::slice::from_ref(&b)))
}

fn cmd_verify_corpus(cfg: &RunConfig, suite: &SuiteConfig, json_out: bool) -> Result<u8> {
    let specs: Vec<FixtureSpec> =
        default_corpus().into_iter().map(|s| s.with_precision(cfg.precision_bits)).collect();
    let results = fan_out(&specs, |spec| -> Result<ReportBundle> {
        let problem = FixtureFile { spec: spec.clone(), materialized: None }.problem()?;
        let b = run_suite(&problem, &spec.name, suite)?;
        if let Some(dir) = &cfg.out {
            let text = render(serde_json::to_value(&b)?, cfg)?;
            write_atomic(&dir.join(format!("{}.json", spec.name)), text.as_bytes())?;
        }
        Ok(b)
    });
    let bundles = results.into_iter().collect::<Result<Vec<_>>>()?;
    let summary: Vec<Value> = bundles
        .iter()
        .map(|b| {
            json!({
                "fixture": b.fixture,
                "holds": b.count(Verdict::Holds),
                "violated_within_tolerance": b.count(Verdict::ViolatedWithinTolerance),
                "violated": b.count(Verdict::Violated),
                "vacuous": b.count(Verdict::Vacuous),
                "hypothesis_failed": b.count(Verdict::HypothesisFailed),
                "errors": b.errors,
            })
        })
        .collect();
    let text = render(json!({ "fixtures": summary }), cfg)?;
    if let Some(dir) = &cfg.out {
        write_atomic(&dir.join("summary.json"), text.as_bytes())?;
    }
    if json_out {
        print!("{text}");
    } else {
        for b in &bundles {
            print_corpus_line(b);
        }
    }
    for b in &bundles {
        report_errors(b)?;
    }
    Ok(exit_code(&bundles))
}

fn parse_entries(text: &str) -> Vec<Vec<String>> {
    text.split(';').map(config::parse_list).collect()
}

fn cmd_gen(
    fixture: Option<&str>,
    kind: GenKind,
    entries: Option<&str>,
    name: Option<&str>,
    corpus: bool,
    cfg: &RunConfig,
) -> Result<u8> {
    if corpus {
        let Some(dir) = &cfg.out else { bail!("gen --corpus needs --out DIR") };
        for spec in default_corpus() {
            let file = FixtureFile::from_spec(&spec.with_precision(cfg.precision_bits))?;
            write_atomic(&dir.join(format!("{}.json", file.spec.name)), file.to_json()?.as_bytes())?;
        }
        return Ok(0);
    }
    let mut spec = match (kind, entries) {
        (GenKind::Random, None) => resolve_fixture(fixture, cfg)?.spec,
        (GenKind::Random, Some(_)) => bail!("--entries needs --kind rational or --kind user"),
        (_, None) => bail!("--kind rational and --kind user need --entries"),
        (k, Some(text)) => {
            let rows = parse_entries(text);
            let (n, m) = (rows.len(), rows.first().map_or(0, Vec::len));
            let kind = if k == GenKind::Rational {
                FixtureKind::Rational { entries: rows }
            } else {
                FixtureKind::User { entries: rows }
            };
            let prefix = if k == GenKind::Rational { "rational" } else { "user" };
            FixtureSpec {
                name: format!("{prefix}-{n}x{m}"),
                n,
                m,
                seed: 0,
                precision_bits: cfg.precision_bits,
                kind,
            }
        }
    };
    if let Some(name) = name {
        spec.name = name.to_string();
    }
    let file = FixtureFile::from_spec(&spec)?;
    emit(&file.to_json()?, cfg)?;
    Ok(0)
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn cmd_minima(fixture: Option<&str>, s: f64, cfg: &RunConfig) -> Result<u8> {
    let (name, problem) = load_problem(fixture, cfg)?;
    let problem = if cfg.transposed { problem.transpose() } else { problem };
    let shape = PathSpec::standard(problem.n(), problem.m()).box_shape(s)?;
    let mm = successive_minima(&build_lattice(&problem, false), &shape, &MinimaConfig::default())?;
    let value = json!({
        "fixture": name,
        "n": problem.n(),
        "m": problem.m(),
        "transposed": cfg.transposed,
        "s": s,
        "lambdas": mm.lambdas,
        "psis": mm.lambdas.iter().map(|l| l.ln() / s).collect::<Vec<_>>(),
        "witnesses": mm.witnesses.iter().map(|w| strings(w)).collect::<Vec<_>>(),
        "exact_lambdas": mm.exact_lambdas.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()),
    });
    emit(&render(value, cfg)?, cfg)?;
    Ok(0)
}
