//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::coverage::{coverage_significance, disc_projection, filter_band, null_ensemble_tails, project_tails, EnsembleRecord};
use crate::error::Error;
use crate::false_corr::{false_corr_curve, false_corr_prob, FalseCorrParams, DEFAULT_REL_TOL};
use crate::geometry::{standardize, NormalizedVector};
use crate::io::{self, DiscRow, EnsembleTable};
use crate::mc::{false_corr_prob_mc, marginal_false_corr_prob_mc};
use crate::rng::StreamSeed;
use crate::soper::{marginal_false_corr_prob, DEFAULT_MARGINAL_REL_TOL};
use crate::synth::{generate_ensemble, SynthConfig, DEFAULT_Q_JITTER};
use crate::tsphere::{expected_cross_correlation, sample_tsphere, TsphereSpec};

pub const DEFAULT_SEED: u64 = 20_190_601;
pub const MAX_CURVE_N: usize = 10_000;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "proxcor", version, about = "Correlation attenuation and false-correlation risk for proxy measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability that the proxy-based correlation has the wrong sign.
    Prob(ProbArgs),
    /// False-correlation probability as a function of n.
    Curve(CurveArgs),
    /// Expected proxy-based correlation q·r.
    Expected(ExpectedArgs),
    /// Uniform samples from T^n(q) around a ground-truth vector.
    Sample(SampleArgs),
    /// Monte Carlo estimate of the false-correlation probability.
    Mc(McArgs),
    /// Coverage of T^n by an ensemble of detector outputs.
    Coverage(CoverageArgs),
    /// Synthetic clustered detector ensemble.
    Synth(SynthArgs),
}

/// `--seed N` or `--seed random`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(SeedArg::Random);
        }
        s.parse().map(SeedArg::Fixed).map_err(|_| format!("seed must be an unsigned integer or `random`, got {s:?}"))
    }
}

impl fmt::Display for SeedArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedArg::Fixed(s) => write!(f, "{s}"),
            SeedArg::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    /// Average over the sampling distribution of the detector's accuracy.
    #[arg(long)]
    pub marginal: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long)]
    pub marginal: bool,
    /// CSV output (`n,probability`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExpectedArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Ground-truth vector file (`value` column).
    #[arg(long)]
    pub u: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    #[arg(long)]
    pub marginal: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub u: PathBuf,
    /// Ensemble file (`subject,<id1>,…`).
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Optional `id,tag` sidecar.
    #[arg(long)]
    pub tags: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub q_lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub q_hi: f64,
    #[arg(long, default_value_t = 9999)]
    pub trials: usize,
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    /// Disc CSV (`id,tag,p1,p2`) for the detectors.
    #[arg(long)]
    pub out_disc: PathBuf,
    /// Disc CSV for one radius-matched uniform ensemble; defaults to
    /// `<out-disc stem>.null.csv`.
    #[arg(long)]
    pub out_null_disc: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub u: PathBuf,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,
    #[arg(long)]
    pub within: f64,
    #[arg(long)]
    pub between: f64,
    /// Records per cluster.
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = DEFAULT_Q_JITTER)]
    pub jitter: f64,
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Tags sidecar; defaults to `<out stem>.tags.csv`.
    #[arg(long)]
    pub tags_out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { 3 } else { 2 };
        let mut message = e.to_string();
        if matches!(e, Error::ApproximationBreakdown(_)) {
            message.push_str("; try `proxcor mc --marginal` for a pure Monte Carlo estimate");
        }
        CliError { code, message }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult = Result<(), CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError { code: 2, message: msg.into() }
}

fn report(command: &str, params: Value, seed: Option<u64>, result: Value) -> Value {
    let mut obj = json!({
        "command": command,
        "tool_version": TOOL_VERSION,
        "params": params,
        "result": result,
    });
    if let Some(seed) = seed {
        obj["seed"] = json!(seed);
    }
    obj
}

fn emit_json(out: &mut dyn Write, value: &Value) -> CliResult {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json values serialize"))?;
    Ok(())
}

fn load_standardized(path: &Path, err: &mut dyn Write) -> Result<NormalizedVector, CliError> {
    let raw = io::read_vector_file(path)?;
    let v = standardize(&raw)?;
    writeln!(err, "note: standardized {} ({} values) to zero mean and unit length", path.display(), raw.len())?;
    Ok(v)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Runs one parsed command, writing primary output to `out` and notices to
/// `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Prob(a) => cmd_prob(a, out),
        Command::Curve(a) => cmd_curve(a, out),
        Command::Expected(a) => cmd_expected(a, out),
        Command::Sample(a) => cmd_sample(a, out, err),
        Command::Mc(a) => cmd_mc(a, out),
        Command::Coverage(a) => cmd_coverage(a, out, err),
        Command::Synth(a) => cmd_synth(a, out, err),
    }
}

fn cmd_prob(a: ProbArgs, out: &mut dyn Write) -> CliResult {
    let params = FalseCorrParams::new(a.n, a.q, a.r)?;
    let res = if a.marginal {
        marginal_false_corr_prob(a.n, a.q, a.r, DEFAULT_MARGINAL_REL_TOL)?
    } else {
        false_corr_prob(&params, DEFAULT_REL_TOL)?
    };
    if a.json {
        let p = json!({ "n": a.n, "q": a.q, "r": a.r, "marginal": a.marginal });
        return emit_json(out, &report("prob", p, None, json!(res)));
    }
    writeln!(out, "probability: {}", res.value)?;
    writeln!(out, "method: {}", json!(res.method).as_str().unwrap_or_default())?;
    writeln!(out, "abs_error_bound: {:e}", res.abs_error_bound)?;
    Ok(())
}

fn cmd_curve(a: CurveArgs, out: &mut dyn Write) -> CliResult {
    if a.n_max > MAX_CURVE_N {
        return Err(invalid(format!("n-max {} exceeds {MAX_CURVE_N}", a.n_max)));
    }
    let curve = false_corr_curve(a.q, a.r, a.n_min, a.n_max, a.marginal)?;
    match &a.out {
        Some(path) => io::write_curve(std::fs::File::create(path)?, &curve)?,
        None if !a.json => io::write_curve(&mut *out, &curve)?,
        None => {}
    }
    if a.json {
        let p = json!({ "q": a.q, "r": a.r, "n_min": a.n_min, "n_max": a.n_max, "marginal": a.marginal, "out": a.out });
        let points: Vec<Value> = curve.iter().map(|(n, p)| json!({ "n": n, "probability": p })).collect();
        return emit_json(out, &report("curve", p, None, json!({ "points": points })));
    }
    Ok(())
}

fn cmd_expected(a: ExpectedArgs, out: &mut dyn Write) -> CliResult {
    let e = expected_cross_correlation(a.q, a.r)?.value();
    if a.json {
        let p = json!({ "q": a.q, "r": a.r });
        return emit_json(out, &report("expected", p, None, json!({ "expected_correlation": e })));
    }
    writeln!(out, "expected_correlation: {e}")?;
    Ok(())
}

fn cmd_sample(a: SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let seed = a.seed.resolve();
    let u = load_standardized(&a.u, err)?;
    let spec = TsphereSpec::new(&u, a.q)?;
    let batch = sample_tsphere(&spec, a.count, seed)?;
    let width = a.count.to_string().len();
    let table = EnsembleTable {
        ids: (0..a.count).map(|i| format!("s{i:0width$}")).collect(),
        columns: batch.vectors.into_iter().map(NormalizedVector::into_values).collect(),
    };
    io::write_ensemble_file(&a.out, &table)?;
    if a.json {
        let p = json!({ "u": a.u, "q": a.q, "count": a.count, "out": a.out });
        return emit_json(out, &report("sample", p, Some(seed), json!({ "n": u.n(), "written": a.count })));
    }
    writeln!(out, "wrote {} samples of dimension {} to {}", a.count, u.n(), a.out.display())?;
    Ok(())
}

fn cmd_mc(a: McArgs, out: &mut dyn Write) -> CliResult {
    let seed = a.seed.resolve();
    let est = if a.marginal {
        marginal_false_corr_prob_mc(a.n, a.q, a.r, a.samples, seed)?
    } else {
        false_corr_prob_mc(a.n, a.q, a.r, a.samples, seed)?
    };
    if a.json {
        let p = json!({ "n": a.n, "q": a.q, "r": a.r, "samples": a.samples, "marginal": a.marginal });
        return emit_json(out, &report("mc", p, Some(seed), json!(est)));
    }
    writeln!(out, "estimate: {}", est.estimate)?;
    writeln!(out, "stderr: {}", est.stderr)?;
    writeln!(out, "samples: {}", est.count)?;
    Ok(())
}

fn cmd_coverage(a: CoverageArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let seed = a.seed.resolve();
    let u = load_standardized(&a.u, err)?;
    let table = io::read_ensemble_file(&a.ensemble)?;
    let tags = match &a.tags {
        Some(p) => io::read_tags_file(p)?,
        None => Default::default(),
    };
    writeln!(err, "note: standardized {} detector columns from {}", table.ids.len(), a.ensemble.display())?;
    let records = table
        .ids
        .iter()
        .zip(&table.columns)
        .map(|(id, col)| {
            let tag = tags.get(id).cloned().unwrap_or_else(|| "untagged".to_owned());
            let v = standardize(col).map_err(|e| Error::Parse(format!("column {id:?}: {e}")))?;
            EnsembleRecord::new(id.clone(), tag, v, &u)
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let kept = filter_band(&records, a.q_lo, a.q_hi)?;
    let disc = disc_projection(&kept, &u)?;
    let bound = (1.0 - a.q_lo.min(a.q_hi.abs()).max(0.0).powi(2)).sqrt();
    let bound = bound.max(disc.radius_bound);
    let rows: Vec<DiscRow> = kept
        .iter()
        .zip(&disc.points)
        .map(|(r, &(p1, p2))| DiscRow { id: r.id.clone(), tag: r.tag.clone(), p1, p2 })
        .collect();
    io::write_disc(std::fs::File::create(&a.out_disc)?, &rows)?;

    let mut cov = coverage_significance(&kept, &u, a.trials, seed)?;
    cov.band = (a.q_lo, a.q_hi);

    // one radius-matched uniform ensemble for side-by-side plotting, with its own PCA
    let q_hats: Vec<f64> = kept.iter().map(|r| r.q_hat.value()).collect();
    let mut rng = StreamSeed::new(seed).derive(0x6e75_6c6c).stream(0);
    let null_tails = null_ensemble_tails(&q_hats, u.n() - 2, &mut rng);
    let (null_points, null_ev) = project_tails(&null_tails);
    let null_rows: Vec<DiscRow> = null_points
        .iter()
        .enumerate()
        .map(|(i, &(p1, p2))| DiscRow { id: format!("null-{i:04}"), tag: "null".into(), p1, p2 })
        .collect();
    let null_path = a.out_null_disc.clone().unwrap_or_else(|| sibling(&a.out_disc, ".null.csv"));
    io::write_disc(std::fs::File::create(&null_path)?, &null_rows)?;

    let trials = cov.null_traces.len() as f64;
    let null_sd = (cov.null_traces.iter().map(|t| (t - cov.null_mean).powi(2)).sum::<f64>() / (trials - 1.0)).sqrt();
    let result = json!({
        "records_total": records.len(),
        "records_in_band": kept.len(),
        "trace_detectors": cov.trace_detectors,
        "null_mean": cov.null_mean,
        "null_sd": null_sd,
        "null_expected": cov.null_expected,
        "p_value": cov.p_value,
        "min_pairwise_corr": cov.min_pairwise_corr,
        "band": [cov.band.0, cov.band.1],
        "tags": cov.tags,
        "disc": {
            "explained_variance": [disc.explained_variance.0, disc.explained_variance.1],
            "radius_bound": bound,
            "null_explained_variance": [null_ev.0, null_ev.1],
            "out": a.out_disc,
            "null_out": null_path,
        },
    });
    if a.json {
        let p = json!({
            "u": a.u, "ensemble": a.ensemble, "tags": a.tags,
            "q_lo": a.q_lo, "q_hi": a.q_hi, "trials": a.trials,
        });
        return emit_json(out, &report("coverage", p, Some(seed), result));
    }
    writeln!(out, "records in band: {} of {}", kept.len(), records.len())?;
    writeln!(out, "trace (detectors): {}", cov.trace_detectors)?;
    writeln!(out, "trace (uniform null): mean {} sd {} expected {}", cov.null_mean, null_sd, cov.null_expected)?;
    writeln!(out, "p-value (one-tailed): {}", cov.p_value)?;
    writeln!(out, "min pairwise correlation: {}", cov.min_pairwise_corr)?;
    for (tag, s) in &cov.tags {
        match s.trace {
            Some(t) => writeln!(out, "  {tag}: {} records, trace {t}", s.count)?,
            None => writeln!(out, "  {tag}: {} record", s.count)?,
        }
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let seed = a.seed.resolve();
    let u = load_standardized(&a.u, err)?;
    let config = SynthConfig {
        anchor: u,
        target_q: a.q,
        clusters: a.clusters,
        within_spread: a.within,
        between_spread: a.between,
        count_per_cluster: a.count,
        q_jitter: a.jitter,
        seed,
    };
    let records = generate_ensemble(&config)?;
    let table = EnsembleTable {
        ids: records.iter().map(|r| r.id.clone()).collect(),
        columns: records.iter().map(|r| r.vector.values().to_vec()).collect(),
    };
    io::write_ensemble_file(&a.out, &table)?;
    let tags_path = a.tags_out.clone().unwrap_or_else(|| sibling(&a.out, ".tags.csv"));
    let tag_rows: Vec<(String, String)> = records.iter().map(|r| (r.id.clone(), r.tag.clone())).collect();
    io::write_tags_file(&tags_path, &tag_rows)?;
    let mean_q = records.iter().map(|r| r.q_hat.value()).sum::<f64>() / records.len() as f64;
    if a.json {
        let p = json!({
            "u": a.u, "q": a.q, "clusters": a.clusters, "within": a.within, "between": a.between,
            "count": a.count, "jitter": a.jitter, "out": a.out, "tags_out": tags_path,
        });
        return emit_json(out, &report("synth", p, Some(seed), json!({ "records": records.len(), "mean_q_hat": mean_q })));
    }
    writeln!(out, "wrote {} detectors to {} (tags in {})", records.len(), a.out.display(), tags_path.display())?;
    writeln!(out, "mean achieved q: {mean_q}")?;
    Ok(())
}
