use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twistcalc::automorphism::JordanData;
use twistcalc::harness::{expr, run_suite, Suite, SuiteConfig};
use twistcalc::model_zoo::load_model;
use twistcalc::{CalcError, Exponent};

#[derive(Parser)]
#[command(name = "twistcalc", version, about = "Exact checks for twisted modules of vertex superalgebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and emit a JSON report.
    Run(RunArgs),
    /// Expand an expression such as "Ytw(vac,x) psi".
    Expand {
        model: String,
        expression: String,
        /// Exponent half-width per variable.
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Print the coefficients as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Print the Jordan decomposition of an automorphism.
    Decompose {
        model: String,
        /// Automorphism name; defaults to the first one in the model.
        automorphism: Option<String>,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        max_weight: Exponent,
    },
    /// List the PBW basis of the algebra, or of the module with --module.
    DumpBasis {
        model: String,
        #[arg(long, default_value = "2", value_parser = parse_q)]
        max_weight: Exponent,
        #[arg(long)]
        module: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Structured config (TOML); flags given explicitly override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, value_parser = parse_q)]
    max_weight: Option<Exponent>,
    /// Level cutoff for module inputs (default: --max-weight).
    #[arg(long, value_parser = parse_q)]
    module_weight: Option<Exponent>,
    /// Exponent half-width.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    log_bound: Option<u32>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Shuffle the enumeration order with this seed.
    #[arg(long)]
    seed_order: Option<u64>,
    #[arg(long, value_parser = parse_q)]
    dual_slack: Option<Exponent>,
    #[arg(long)]
    fail_fast: bool,
}

/// On-disk config; rationals are written as strings like "3/2".
#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Option<String>,
    suite: Option<String>,
    max_weight: Option<String>,
    module_weight: Option<String>,
    window: Option<i64>,
    log_bound: Option<u32>,
    jobs: Option<usize>,
    seed_order: Option<u64>,
    dual_slack: Option<String>,
    fail_fast: Option<bool>,
}

fn parse_q(s: &str) -> Result<Exponent, String> {
    s.trim().parse::<Exponent>().map_err(|_| format!("not a rational: {s:?}"))
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<CalcError> for Failure {
    fn from(e: CalcError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn config(a: &RunArgs) -> Result<SuiteConfig, Failure> {
    let file: ConfigFile = match &a.config {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            toml::from_str(&t).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let q = |s: &Option<String>| s.as_deref().map(parse_q).transpose().map_err(Failure::Usage);
    let model = a.model.clone().or(file.model).ok_or_else(|| Failure::Usage("--model is required".into()))?;
    let suite: Suite = a.suite.clone().or(file.suite).ok_or_else(|| Failure::Usage("--suite is required".into()))?.parse()?;
    let mut c = SuiteConfig::new(&model, suite);
    if let Some(x) = a.max_weight.or(q(&file.max_weight)?) {
        c.max_weight = x;
    }
    c.module_weight = a.module_weight.or(q(&file.module_weight)?);
    if let Some(x) = a.window.or(file.window) {
        c.half_width = x;
    }
    if let Some(x) = a.log_bound.or(file.log_bound) {
        c.log_bound = x;
    }
    if let Some(x) = a.jobs.or(file.jobs) {
        c.jobs = x;
    }
    c.seed_order = a.seed_order.or(file.seed_order);
    if let Some(x) = a.dual_slack.or(q(&file.dual_slack)?) {
        c.dual_slack = x;
    }
    c.fail_fast = a.fail_fast || file.fail_fast.unwrap_or(false);
    c.validate()?;
    Ok(c)
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let cfg = config(&a)?;
    let report = run_suite(&cfg)?;
    let json = report.to_json();
    match &a.report {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => println!("{json}"),
    }
    let s = &report.summary;
    eprintln!(
        "{} on {}: {} checks, {} passed, {} failed, {} errors, {} skipped",
        cfg.suite.name(),
        cfg.model,
        s.total,
        s.passed,
        s.failed,
        s.errors,
        s.skipped
    );
    if let Some(r) = report.first_failure() {
        eprintln!("first failure: {} on ({})", r.identity, r.input_names.join(", "));
        if let Some(m) = &r.first_mismatch {
            eprintln!("  {} at {}: {} vs {}", m.identity, m.monomial, m.left, m.right);
        }
        if let Some(e) = &r.error {
            eprintln!("  error: {e}");
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn expand(model: &str, text: &str, window: i64, json: bool) -> Result<(), Failure> {
    if window <= 0 {
        return Err(Failure::Usage("--window must be positive".into()));
    }
    expr::parse(text)?;
    let m = load_model(model)?;
    let e = expr::evaluate(&m, text, window)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&e.dump()?).expect("dump serializes"));
    } else {
        println!("{}", e.pretty()?);
    }
    Ok(())
}

fn decompose(model: &str, name: Option<&str>, cut: Exponent) -> Result<(), Failure> {
    let m = load_model(model)?;
    let g = match name {
        Some(n) => m.automorphism(n)?,
        None => m.automorphisms.first().cloned().ok_or_else(|| Failure::Usage(format!("model {model} has no automorphism")))?,
    };
    let j = JordanData::new(g.clone());
    let spectrum: Vec<String> = j.spectrum(cut)?.iter().map(|a| a.to_string()).collect();
    println!("automorphism {} of {}", g.name, m.algebra.name);
    println!("P_V = {{{}}}", spectrum.join(", "));
    println!("N_g = 0: {}", j.max_nil_order(cut)? <= 1);
    for b in j.blocks(cut)? {
        println!("weight {}: dim {}, alphas {{{}}}, nilpotency index {}", b.weight, b.dim, b.alphas.join(", "), b.nilpotency_index);
        for (k, img) in &b.log_columns {
            println!("  2πi·N_g: {k} ↦ {img}");
        }
    }
    Ok(())
}

fn dump_basis(model: &str, cut: Exponent, module: bool) -> Result<(), Failure> {
    let m = load_model(model)?;
    if module {
        let w = m.module()?;
        for (i, k) in w.basis(cut).iter().enumerate() {
            println!("{i}\t{}\t{}\tα={}", k.level(), w.describe(k), w.alpha_of(k));
        }
    } else {
        for (i, k) in m.algebra.basis(cut).iter().enumerate() {
            println!("{i}\t{}\t{}", k.level(), m.algebra.describe(k));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Run(a) => run(a),
        Cmd::Expand { model, expression, window, json } => expand(&model, &expression, window, json),
        Cmd::Decompose { model, automorphism, max_weight } => decompose(&model, automorphism.as_deref(), max_weight),
        Cmd::DumpBasis { model, max_weight, module } => dump_basis(&model, max_weight, module),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
