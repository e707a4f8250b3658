//! `isotropy`: score stored point clouds, sample synthetic ones, and run
//! the validation harness.
//!
//! Structured results go to stdout as JSON; `--pretty` adds a human table
//! on stderr. Exit codes: 0 success, 2 usage or input error, 3 validation
//! regression (the isotropy score failed one of its own tests).

mod io;

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use isotropy::baselines::{self, CosSimConfig, IdConfig};
use isotropy::harness::{self, HarnessConfig, Scale, TestId};
use isotropy::isoscore::isoscore_from_covariance;
use isotropy::linalg;
use isotropy::report::{Metric, MetricReport};
use isotropy::rng::derive_seed;
use isotropy::synthgen::{self, Counts, ScalarOrVec, SyntheticSpec};
use isotropy::PointCloud;

#[derive(Parser)]
#[command(name = "isotropy", version, about = "Isotropy metrics for point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute isotropy metrics for a stored cloud
    Score(ScoreArgs),
    /// Sample a synthetic cloud and write it to a file
    Generate(GenerateArgs),
    /// Run the validation experiments and write report files
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScoreArgs {
    /// Cloud file (CSV or binary)
    #[arg(long)]
    input: PathBuf,
    /// Input format; auto sniffs the binary magic bytes
    #[arg(long, value_enum, default_value_t = io::Format::Auto)]
    format: io::Format,
    /// Skip one CSV header line
    #[arg(long)]
    header: bool,
    /// Comma-separated metrics: isoscore, avg_cos_sim, partition, id_score,
    /// varex, or all
    #[arg(long, value_delimiter = ',', default_value = "isoscore")]
    metric: Vec<String>,
    /// Master seed; the sampled metrics (avg_cos_sim, id_score) refuse to
    /// run without one
    #[arg(long)]
    seed: Option<u64>,
    /// Point pairs drawn by avg_cos_sim
    #[arg(long)]
    pairs: Option<usize>,
    /// Leading components scored by varex (default: half the dimensions,
    /// rounded up)
    #[arg(long)]
    k: Option<usize>,
    /// Smallest neighbor rank used by id_score
    #[arg(long = "id-kmin")]
    id_kmin: Option<usize>,
    /// Largest neighbor rank used by id_score
    #[arg(long = "id-kmax")]
    id_kmax: Option<usize>,
    /// Attach the full isotropy trace (variance vectors, defect, dimension
    /// count) to the isoscore report
    #[arg(long)]
    verbose: bool,
    /// Also print a table to stderr
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Cloud family: gaussian_diag, gaussian_corr2d, ink,
    /// skewered_meatball (alias: meatball), uniform, poisson, student_t,
    /// chi_square
    #[arg(long)]
    family: Option<String>,
    /// Ambient dimension
    #[arg(long)]
    n: Option<usize>,
    /// Point count (single-population families)
    #[arg(long)]
    count: Option<usize>,
    /// Axes that carry variance (ink family)
    #[arg(long)]
    k: Option<usize>,
    /// Line points (skewered_meatball)
    #[arg(long)]
    line: Option<usize>,
    /// Ball points (skewered_meatball)
    #[arg(long)]
    ball: Option<usize>,
    /// Generator seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Mean: one shared value or a comma list with one value per axis
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mean: Option<Vec<f64>>,
    /// Variance per axis: one shared value or a comma list
    #[arg(long, value_delimiter = ',')]
    cov: Option<Vec<f64>>,
    /// Correlation (gaussian_corr2d)
    #[arg(long, allow_hyphen_values = true)]
    corr: Option<f64>,
    /// Planar rotation applied after sampling, in degrees
    #[arg(long = "rotation-deg", allow_hyphen_values = true)]
    rotation_deg: Option<f64>,
    /// Read the full generator description from a JSON file (the format
    /// written to the sidecar) instead of flags
    #[arg(long, conflicts_with = "family")]
    spec: Option<PathBuf>,
    /// Output file; a .csv extension writes text, anything else the binary
    /// format. The generator description is echoed to OUT.spec.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Experiment scale: desk (20,000 points per cloud, thinned sweeps) or
    /// paper (100,000 points, dense sweeps)
    #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,
    /// Comma-separated subset, e.g. --tests 1,4 or --tests 5a; 5 expands
    /// to both halves; default all
    #[arg(long, value_delimiter = ',')]
    tests: Option<Vec<String>>,
    /// Master seed for cloud generation and sampled metrics
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving report.json and curves.csv
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print per-test progress and the final matrix to stderr
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Scale {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", json!({ "error": format!("{err:#}") }));
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Score(args) => cmd_score(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

// --------------------------------------------------------------------
// score
// --------------------------------------------------------------------

fn parse_metrics(tokens: &[String]) -> Result<BTreeSet<Metric>> {
    let mut metrics = BTreeSet::new();
    for token in tokens {
        if token == "all" {
            metrics.extend(Metric::ALL);
        } else {
            metrics.insert(token.parse::<Metric>()?);
        }
    }
    Ok(metrics)
}

fn cmd_score(args: ScoreArgs) -> Result<i32> {
    let metrics = parse_metrics(&args.metric)?;
    if metrics.iter().any(|m| m.is_randomized()) && args.seed.is_none() {
        bail!("--seed is required for the sampled metrics (avg_cos_sim, id_score)");
    }
    let cloud = io::read_cloud(&args.input, args.format, args.header)?;

    // isoscore and varex both consume the covariance spectrum; decompose
    // once. In high dimensions the eigendecomposition dominates the run.
    let spectrum = if metrics.contains(&Metric::Isoscore) || metrics.contains(&Metric::Varex) {
        let cov = linalg::covariance(&cloud)?;
        Some(linalg::sym_eigen(&cov)?.values)
    } else {
        None
    };

    let mut reports = Vec::with_capacity(metrics.len());
    for metric in &metrics {
        reports.push(score_one(*metric, &cloud, spectrum.as_deref(), &args)?);
    }
    let mut doc = serde_json::Map::new();
    for report in &reports {
        doc.insert(report.metric.name().to_string(), serde_json::to_value(report)?);
    }
    println!("{}", serde_json::Value::Object(doc));

    if args.pretty {
        eprintln!("{:<12} {:>12}", "metric", "value");
        for report in &reports {
            eprintln!("{:<12} {:>12.6}", report.metric.name(), report.value);
        }
    }
    Ok(0)
}

fn score_one(
    metric: Metric,
    cloud: &PointCloud,
    spectrum: Option<&[f64]>,
    args: &ScoreArgs,
) -> Result<MetricReport> {
    let report = match metric {
        Metric::Isoscore => {
            let result = isoscore_from_covariance(spectrum.expect("computed for isoscore"))?;
            let details = if args.verbose {
                serde_json::to_value(&result)?
            } else {
                serde_json::Value::Null
            };
            MetricReport::new(metric, result.score, serde_json::Value::Null, details)?
        }
        Metric::AvgCosSim => {
            let cfg = cos_config(args);
            let result = baselines::avg_cos_sim(cloud, &cfg)?;
            MetricReport::new(
                metric,
                result.score,
                json!({ "pairs": cfg.pairs, "seed": args.seed }),
                json!({ "mean_cosine": result.mean_cosine }),
            )?
        }
        Metric::Partition => {
            let result = baselines::partition_score(cloud)?;
            MetricReport::new(
                metric,
                result.score,
                serde_json::Value::Null,
                json!({ "log_z_min": result.log_z_min, "log_z_max": result.log_z_max }),
            )?
        }
        Metric::IdScore => {
            let cfg = id_config(args)?;
            let result = baselines::id_score(cloud, &cfg)?;
            MetricReport::new(
                metric,
                result.score,
                json!({
                    "k_min": cfg.k_min,
                    "k_max": cfg.k_max,
                    "subsample": cfg.subsample,
                    "seed": args.seed,
                }),
                json!({ "dimension": result.dimension }),
            )?
        }
        Metric::Varex => {
            let spectrum = spectrum.expect("computed for varex");
            let k = args
                .k
                .unwrap_or_else(|| baselines::default_component_count(spectrum.len()));
            let result = baselines::varex_from_spectrum(spectrum, k)?;
            MetricReport::new(
                metric,
                result.score,
                json!({ "k": k }),
                json!({ "explained": result.explained }),
            )?
        }
    };
    Ok(report)
}

fn cos_config(args: &ScoreArgs) -> CosSimConfig {
    let mut cfg = CosSimConfig::new(derive_seed(args.seed.unwrap_or(0), 1));
    if let Some(pairs) = args.pairs {
        cfg.pairs = pairs;
    }
    cfg
}

fn id_config(args: &ScoreArgs) -> Result<IdConfig> {
    let mut cfg = IdConfig::new(derive_seed(args.seed.unwrap_or(0), 2));
    if let Some(k_min) = args.id_kmin {
        cfg.k_min = k_min;
    }
    if let Some(k_max) = args.id_kmax {
        cfg.k_max = k_max;
    }
    Ok(cfg)
}

// --------------------------------------------------------------------
// generate
// --------------------------------------------------------------------

fn scalar_or_vec(values: Vec<f64>) -> ScalarOrVec {
    if values.len() == 1 {
        ScalarOrVec::Scalar(values[0])
    } else {
        ScalarOrVec::Vector(values)
    }
}

fn build_spec(args: &GenerateArgs) -> Result<SyntheticSpec> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let mut spec: SyntheticSpec = serde_json::from_str(&text)
            .with_context(|| format!("{} is not a generator description", path.display()))?;
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        return Ok(spec);
    }

    let family = args
        .family
        .as_deref()
        .context("--family is required (or pass --spec)")?;
    let family = serde_json::from_value(json!(family))
        .map_err(|_| anyhow::anyhow!("unknown family {family:?}"))?;
    let count = match (args.count, args.line, args.ball) {
        (Some(c), None, None) => Counts::Single(c),
        (None, Some(line), Some(ball)) => Counts::Pair([line, ball]),
        (None, None, None) => bail!("--count (or --line with --ball) is required"),
        _ => bail!("pass either --count or the --line/--ball pair, not both"),
    };
    Ok(SyntheticSpec {
        family,
        n: args.n,
        count,
        seed: args.seed.unwrap_or(0),
        mean: args.mean.clone().map(scalar_or_vec),
        cov_diag: args.cov.clone().map(scalar_or_vec),
        corr: args.corr,
        k: args.k,
        rotation_deg: args.rotation_deg,
    })
}

fn cmd_generate(args: GenerateArgs) -> Result<i32> {
    let spec = build_spec(&args)?;
    let cloud = synthgen::generate(&spec)?;
    io::write_cloud(&args.out, &cloud)?;

    let mut sidecar = args.out.clone().into_os_string();
    sidecar.push(".spec.json");
    let sidecar = PathBuf::from(sidecar);
    let mut text = serde_json::to_string_pretty(&spec)?;
    text.push('\n');
    std::fs::write(&sidecar, text)
        .with_context(|| format!("cannot write {}", sidecar.display()))?;

    println!(
        "{}",
        json!({
            "out": args.out,
            "spec": sidecar,
            "count": cloud.count(),
            "n": cloud.dim(),
        })
    );
    Ok(0)
}

// --------------------------------------------------------------------
// validate
// --------------------------------------------------------------------

fn parse_tests(tokens: Option<&[String]>) -> Result<Vec<TestId>> {
    let Some(tokens) = tokens else {
        return Ok(TestId::ALL.to_vec());
    };
    let mut set = BTreeSet::new();
    for token in tokens {
        if token == "5" {
            set.insert(TestId::DimsUsedFraction);
            set.insert(TestId::DimsUsedHighDim);
        } else {
            set.insert(token.parse::<TestId>()?);
        }
    }
    Ok(set.into_iter().collect())
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let tests = parse_tests(args.tests.as_deref())?;
    let config = HarnessConfig::new(args.scale.into(), args.seed);

    let mut outcomes = Vec::with_capacity(tests.len());
    for &test in &tests {
        let start = std::time::Instant::now();
        let outcome = harness::run_test(&config, test)?;
        if args.pretty {
            eprintln!(
                "test {:<2} {:<22} {:5.1}s",
                test.label(),
                test.name(),
                start.elapsed().as_secs_f64()
            );
            for (metric, verdict) in &outcome.verdicts {
                eprintln!(
                    "    {:<12} {}  {}",
                    metric.name(),
                    if verdict.pass { "pass" } else { "FAIL" },
                    verdict.violated.as_deref().unwrap_or("")
                );
            }
        }
        outcomes.push(outcome);
    }

    let files = harness::write_report(&config, &outcomes, &args.out)?;
    let isoscore_pass = harness::isoscore_all_pass(&outcomes);

    if args.pretty {
        if let Ok(matrix) = harness::build_score_matrix(&outcomes) {
            eprintln!(
                "{:<24}{}",
                "test",
                Metric::ALL
                    .map(|m| format!("{:>13}", m.name()))
                    .join("")
            );
            for row in &matrix.rows {
                let cells = Metric::ALL
                    .map(|m| format!("{:>13}", if row.cells[&m] { "pass" } else { "fail" }))
                    .join("");
                eprintln!("{:<24}{cells}", format!("{} {}", row.test, row.name));
            }
        }
    }

    println!(
        "{}",
        json!({
            "report": files.report,
            "curves": files.curves,
            "tests": tests.iter().map(|t| t.label()).collect::<Vec<_>>(),
            "isoscore_pass": isoscore_pass,
        })
    );
    Ok(if isoscore_pass { 0 } else { 3 })
}
