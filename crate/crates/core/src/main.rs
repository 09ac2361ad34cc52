use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use rankct::counting::{
    gamma_subset, q_limit_product, rank_count, to_f64, tv_split, unconstrained_moments, MomentParams,
};
use rankct::characters::CharacterTable;
use rankct::lemmas::run_lemmas;
use rankct::sampling::{SamplingError, MAX_REJECTIONS};
use rankct::stats::{
    exact_distribution, exact_law_all_matrices, run_clt, standard_normal_cdf, CltConfig, CtDecomposer,
    CtLaw, StatsError,
};
use rankct::{FieldCtx, FieldOrder, MatrixFq, RankSampler, SamplerMode, SeedSpec, SubsetA, Workers};

/// Largest `|residual|` accepted by `identity`.
const IDENTITY_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "rankct", version, about = "Entry statistics of random rank-r matrices over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact rank counts, total variation, and centring constants
    Count(CountArgs),
    /// Draw seeded random rank-r matrices
    Sample(SampleArgs),
    /// Exact law of ct_A by enumeration
    Exact(ExactArgs),
    /// Check the decomposition of ct_A(XY) on one factor pair
    Identity(IdentityArgs),
    /// Run the character identity battery
    Lemmas(LemmaArgs),
    /// Monte Carlo run of the normalized entry count
    Clt(CltArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct FieldArg {
    /// Field order, as "p^e" or a prime power
    #[arg(long)]
    field: FieldOrder,
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Args)]
struct SubsetArg {
    /// Subset A: "nonzero", "zero", "all", "none", or comma-separated element indices
    #[arg(long = "A", default_value = "nonzero")]
    subset: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    field: FieldArg,
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    subset: SubsetArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    field: FieldArg,
    #[command(flatten)]
    shape: Shape,
    /// Number of matrices
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "exact")]
    mode: SamplerMode,
    /// Worker threads; 0 uses all available
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    field: FieldArg,
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    subset: SubsetArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct IdentityArgs {
    #[command(flatten)]
    field: FieldArg,
    #[command(flatten)]
    subset: SubsetArg,
    /// File holding X (m x r) in matrix text format
    #[arg(long, requires = "y")]
    x: Option<PathBuf>,
    /// File holding Y (r x n) in matrix text format
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct LemmaArgs {
    #[command(flatten)]
    field: FieldArg,
    /// Tuple length for the transform checks
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CltArgs {
    #[command(flatten)]
    field: FieldArg,
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    subset: SubsetArg,
    /// Number of samples
    #[arg(long = "N", default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "exact")]
    mode: SamplerMode,
    /// Worker threads; 0 uses all available
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also write "bin_center,count" rows here
    #[arg(long)]
    hist_csv: Option<PathBuf>,
    /// Also write sorted "sample,phi" rows here
    #[arg(long)]
    samples_csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Usage { flag: &'static str, message: String },
    Verification(String),
    Runtime(String),
}

fn usage(flag: &'static str, message: impl ToString) -> Failure {
    Failure::Usage {
        flag,
        message: message.to_string(),
    }
}

fn stats_failure(e: StatsError) -> Failure {
    match &e {
        StatsError::DegenerateSubset => usage("--A", e),
        StatsError::TooFewSamples { .. } => usage("--N", e),
        StatsError::TooLargeToEnumerate(_) => usage("--m", format!("{e}; reduce --m, --n or --r")),
        StatsError::RankTooLarge { .. } | StatsError::BadSubset { .. } => usage("--r", e),
        StatsError::Sampling(s) => sampling_failure(s.clone()),
        StatsError::Counting(_) => usage("--r", e),
        _ => Failure::Runtime(e.to_string()),
    }
}

fn sampling_failure(e: SamplingError) -> Failure {
    match e {
        SamplingError::RankOutOfRange { .. } | SamplingError::ZeroRankProduct => usage("--r", e),
        SamplingError::EmptyShape { rows: 0, .. } => usage("--m", e),
        SamplingError::EmptyShape { .. } => usage("--n", e),
        SamplingError::UnknownMode(_) => usage("--mode", e),
        SamplingError::RejectionLimit { .. } => Failure::Runtime(format!("{e} (cap {MAX_REJECTIONS})")),
    }
}

fn field_ctx(order: FieldOrder) -> Result<Arc<FieldCtx>, Failure> {
    FieldCtx::from_order(order).map(Arc::new).map_err(|e| usage("--field", e))
}

fn subset(field: &FieldCtx, arg: &SubsetArg) -> Result<SubsetA, Failure> {
    SubsetA::parse(field.order(), &arg.subset).map_err(|e| usage("--A", e))
}

fn check_shape(shape: &Shape) -> Result<(), Failure> {
    if shape.m == 0 {
        return Err(usage("--m", "must be positive"));
    }
    if shape.n == 0 {
        return Err(usage("--n", "must be positive"));
    }
    if shape.r > shape.m.min(shape.n) {
        return Err(usage(
            "--r",
            format!("rank {} exceeds min(m, n) = {}", shape.r, shape.m.min(shape.n)),
        ));
    }
    Ok(())
}

fn require_format(out: &OutputArgs, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&out.format) {
        Ok(())
    } else {
        Err(usage("--format", "format not supported by this subcommand"))
    }
}

/// Rounds to 12 significant digits so printed decimals do not depend on
/// last-bit floating-point noise.
fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        // also folds -0 into 0
        return x + 0.0;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(r) = num.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn rational(x: &BigRational) -> Value {
    json!({ "exact": x.to_string(), "decimal": to_f64(x) })
}

fn law_json(law: &CtLaw) -> Value {
    let pmf: Map<String, Value> = law
        .pmf
        .iter()
        .map(|(k, p)| (k.to_string(), Value::String(p.to_string())))
        .collect();
    json!({
        "pmf": pmf,
        "mean": rational(&law.mean()),
        "variance": rational(&law.variance()),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn emit_json(out: &OutputArgs, mut value: Value) -> Result<(), Failure> {
    round_floats(&mut value);
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Failure::Runtime(e.to_string()))?;
    text.push('\n');
    emit(out.output.as_deref(), &text)
}

fn count(args: CountArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json])?;
    let field = field_ctx(args.field.field)?;
    check_shape(&args.shape)?;
    let a = subset(&field, &args.subset)?;
    let Shape { m, n, r } = args.shape;
    let q = field.order() as u64;
    let counting = |e| usage("--r", e);
    let split = tv_split(q, m, n, r).map_err(counting)?;
    let params = MomentParams::new(q, r, m, n, a.clone());
    let (umean, uvar) = unconstrained_moments(q, &a, m, n);
    emit_json(
        &args.out,
        json!({
            "field": field.spec().to_string(),
            "m": m,
            "n": n,
            "r": r,
            "A": a.indices(),
            "rank_count": rank_count(q, m, n, r).map_err(counting)?.to_string(),
            "q_limit_product": rational(&q_limit_product(q, m, n, r).map_err(counting)?),
            "tv_closed_form": rational(&split.total()),
            "tv_split": {
                "below": rational(&split.below),
                "equal": rational(&split.equal),
                "above": rational(&split.above),
            },
            "gamma": rational(&gamma_subset(q, &a)),
            "mu": rational(&params.mu()),
            "sigma2": rational(&params.sigma2()),
            "unconstrained_mean": rational(&umean),
            "unconstrained_variance": rational(&uvar),
        }),
    )
}

fn sample(args: SampleArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json, Format::Text])?;
    let field = field_ctx(args.field.field)?;
    let Shape { m, n, r } = args.shape;
    let sampler = RankSampler::new(field.clone(), m, n, r, args.mode, SeedSpec::new(args.seed))
        .map_err(sampling_failure)?;
    let batch = sampler
        .sample_batch(args.count, Workers(args.workers))
        .map_err(sampling_failure)?;
    if args.out.format == Format::Text {
        let text: Vec<String> = batch.iter().map(MatrixFq::to_text).collect();
        return emit(args.out.output.as_deref(), &text.join("\n"));
    }
    let matrices: Vec<_> = batch.iter().map(MatrixFq::to_index_rows).collect();
    emit_json(&args.out, json!(matrices))
}

fn exact(args: ExactArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json])?;
    let field = field_ctx(args.field.field)?;
    check_shape(&args.shape)?;
    let a = subset(&field, &args.subset)?;
    let Shape { m, n, r } = args.shape;
    let params = MomentParams::new(field.order() as u64, r, m, n, a.clone());
    let (rank_r, product, route) = match exact_distribution(&field, m, n, r, &a) {
        Ok(d) => (d.rank_r, Some(d.product), "factor_pairs"),
        Err(StatsError::TooLargeToEnumerate(_)) => (
            exact_law_all_matrices(&field, m, n, &a, Some(r)).map_err(stats_failure)?,
            None,
            "all_matrices",
        ),
        Err(e) => return Err(stats_failure(e)),
    };
    let sigma2 = params.sigma2();
    let gap = if to_f64(&sigma2) > 0.0 {
        json!(to_f64(&(rank_r.mean() - params.mu())).abs() / to_f64(&sigma2).sqrt())
    } else {
        Value::Null
    };
    emit_json(
        &args.out,
        json!({
            "field": field.spec().to_string(),
            "m": m,
            "n": n,
            "r": r,
            "A": a.indices(),
            "route": route,
            "rank_r": law_json(&rank_r),
            "product": product.as_ref().map(law_json),
            "mu": rational(&params.mu()),
            "sigma2": rational(&sigma2),
            "centering_gap": gap,
        }),
    )
}

fn read_matrix(field: &Arc<FieldCtx>, path: &Path, flag: &'static str) -> Result<MatrixFq, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(flag, format!("{}: {e}", path.display())))?;
    MatrixFq::parse_text(field.clone(), &text).map_err(|e| usage(flag, e))
}

fn identity(args: IdentityArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json, Format::Text])?;
    let field = field_ctx(args.field.field)?;
    let a = subset(&field, &args.subset)?;
    let (x, y) = match (&args.x, &args.y) {
        (Some(xp), Some(yp)) => (read_matrix(&field, xp, "--x")?, read_matrix(&field, yp, "--y")?),
        _ => {
            let m = args.m.ok_or_else(|| usage("--m", "required without --x/--y"))?;
            let n = args.n.ok_or_else(|| usage("--n", "required without --x/--y"))?;
            let r = args.r.ok_or_else(|| usage("--r", "required without --x/--y"))?;
            check_shape(&Shape { m, n, r })?;
            RankSampler::new(field.clone(), m, n, r, SamplerMode::Exact, SeedSpec::new(args.seed))
                .and_then(|s| s.factors(0))
                .map_err(sampling_failure)?
        }
    };
    if x.cols() != y.rows() {
        return Err(usage("--y", format!("Y has {} rows but X has {} columns", y.rows(), x.cols())));
    }
    let table = CharacterTable::new(field.clone());
    let dec = CtDecomposer::new(&table, x.cols(), &a)
        .and_then(|d| d.decompose(&x, &y))
        .map_err(stats_failure)?;
    if args.out.format == Format::Text {
        let rows = [
            ("ct", dec.ct as f64),
            ("mu", dec.mu),
            ("main", dec.main_re),
            ("main_imag", dec.main_im),
            ("z_term", dec.z_term),
            ("w_term", dec.w_term),
            ("total", dec.total),
            ("residual", dec.residual),
        ];
        let text: String = rows
            .iter()
            .map(|(k, v)| format!("{k:<10} {:>20}\n", round_sig(*v)))
            .collect();
        emit(args.out.output.as_deref(), &text)?;
    } else {
        let mut value = serde_json::to_value(&dec).map_err(|e| Failure::Runtime(e.to_string()))?;
        if let Value::Object(map) = &mut value {
            map.insert("field".into(), json!(field.spec().to_string()));
            map.insert("A".into(), json!(a.indices()));
            map.insert("x".into(), json!(x.to_index_rows()));
            map.insert("y".into(), json!(y.to_index_rows()));
        }
        emit_json(&args.out, value)?;
    }
    if dec.residual.abs() > IDENTITY_TOL || dec.main_im.abs() > IDENTITY_TOL {
        return Err(Failure::Verification(format!(
            "decomposition residual {:e} exceeds {IDENTITY_TOL:e}",
            dec.residual
        )));
    }
    Ok(())
}

fn lemmas(args: LemmaArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json])?;
    let field = field_ctx(args.field.field)?;
    let report = run_lemmas(field, args.r, args.seed).map_err(|e| usage("--r", e))?;
    emit_json(&args.out, serde_json::to_value(&report).map_err(|e| Failure::Runtime(e.to_string()))?)?;
    let failed: Vec<&str> = report.results.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("lemma check failed: {}", failed.join(", "))))
    }
}

fn clt(args: CltArgs) -> Result<(), Failure> {
    require_format(&args.out, &[Format::Json, Format::Csv])?;
    let field = field_ctx(args.field.field)?;
    check_shape(&args.shape)?;
    let a = subset(&field, &args.subset)?;
    let config = CltConfig {
        field,
        subset: a,
        r: args.shape.r,
        m: args.shape.m,
        n: args.shape.n,
        samples: args.samples,
        seed: args.seed,
        mode: args.mode,
    };
    let report = run_clt(&config, Workers(args.workers)).map_err(stats_failure)?;
    let edges = report.histogram.bin_edges();
    let hist_csv: String = std::iter::once("bin_center,count\n".to_string())
        .chain(report.histogram.counts.iter().enumerate().map(|(i, c)| {
            format!("{},{c}\n", round_sig(0.5 * (edges[i] + edges[i + 1])))
        }))
        .collect();
    if let Some(path) = &args.hist_csv {
        emit(Some(path), &hist_csv)?;
    }
    if let Some(path) = &args.samples_csv {
        let mut sorted = report.normalized.clone();
        sorted.sort_by(f64::total_cmp);
        let body: String = std::iter::once("sample,phi\n".to_string())
            .chain(
                sorted
                    .iter()
                    .map(|&v| format!("{},{}\n", round_sig(v), round_sig(standard_normal_cdf(v)))),
            )
            .collect();
        emit(Some(path), &body)?;
    }
    match args.out.format {
        Format::Csv => emit(args.out.output.as_deref(), &hist_csv),
        _ => emit_json(
            &args.out,
            serde_json::to_value(&report).map_err(|e| Failure::Runtime(e.to_string()))?,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(a) => count(a),
        Command::Sample(a) => sample(a),
        Command::Exact(a) => exact(a),
        Command::Identity(a) => identity(a),
        Command::Lemmas(a) => lemmas(a),
        Command::Clt(a) => clt(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage { flag, message }) => {
            eprintln!("error: invalid value for '{flag}': {message}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(message)) => {
            eprintln!("verification failed: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
