//! `samkit` command-line front end. Each subcommand parses flags, resolves a
//! configuration, logs it to stderr and hands it to the library.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use samkit::bounds::{self, BoundMethod, BoundResult};
use samkit::dataio::{self, ReportFormat, SynthConfig};
use samkit::inference::Statistic;
use samkit::pipeline::{
    self, BoundDim, CoverageResult, CoverageSpec, Denominator, PipelineConfig, DEFAULT_HOLDOUT,
    DEFAULT_SEPARATION,
};

const THREADS_VAR: &str = "SAMKIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "samkit",
    version,
    about = "Worst-case accuracy bounds and statistical agnostic maps"
)]
struct Cli {
    /// Print results to stdout as JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one deviation bound.
    Bound(BoundArgs),
    /// Build a statistical agnostic map from a dataset and an atlas.
    Sam(SamArgs),
    /// Write a synthetic dataset with planted regions.
    Synth(SynthArgs),
    /// Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Tabulate a bound over grids of sample sizes and dimensions.
    Curve(CurveArgs),
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Rate at which held-out risk exceeds empirical risk plus the bound.
    Coverage(CoverageArgs),
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_name = "cover|vc|massart")]
    method: BoundMethod,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    dim: u64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

#[derive(Debug, Args)]
struct SamArgs {
    /// Dataset manifest (JSON).
    #[arg(long, value_name = "MANIFEST")]
    data: PathBuf,
    /// Parcellation CSV mapping feature columns to regions.
    #[arg(long, value_name = "CSV")]
    atlas: PathBuf,
    #[arg(long, default_value_t = 1)]
    components: usize,
    #[arg(long, value_name = "METHOD", default_value = "cover")]
    bound: BoundMethod,
    /// Dimension fed to the bound: `components` or `components_plus_bias`.
    #[arg(long, default_value = "components")]
    bound_dim: BoundDim,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pi0: f64,
    #[arg(long, default_value_t = 1.0)]
    c_reg: f64,
    #[arg(
        long,
        value_name = "worst_case|empirical",
        default_value = "worst_case"
    )]
    statistic: Statistic,
    #[arg(long, value_name = "rois|samples", default_value = "rois")]
    denominator: Denominator,
    /// Test each region at alpha divided by the region count.
    #[arg(long)]
    bonferroni: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_name = "json|csv", default_value = "json")]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    rois: usize,
    #[arg(long, default_value_t = 50)]
    voxels_per_roi: usize,
    /// Comma-separated region ids carrying the effect.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    effect_rois: Vec<u32>,
    #[arg(long, default_value_t = 1.5)]
    effect_size: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[arg(long, value_name = "M", default_value = "cover")]
    method: BoundMethod,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_HOLDOUT)]
    holdout: usize,
    /// Distance between the two class means.
    #[arg(long, default_value_t = DEFAULT_SEPARATION)]
    separation: f64,
    #[arg(long, default_value_t = 1.0)]
    c_reg: f64,
    /// Also write the result as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, value_delimiter = ',', default_value = "cover,vc,massart")]
    methods: Vec<BoundMethod>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "50,100,200,500,1000,2000"
    )]
    n_grid: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    dim_grid: Vec<u64>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Output CSV, or `-` for stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<samkit::Error> for Failure {
    fn from(e: samkit::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            Failure::Usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got `{v}`"
            ))
        })?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Run(format!("cannot start worker pool: {e}")))
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Bound(args) => bound(args, cli.json),
        Command::Sam(args) => sam(args, cli.json),
        Command::Synth(args) => synth(args, cli.json),
        Command::Simulate {
            experiment: Experiment::Coverage(args),
        } => coverage(args, cli.json),
        Command::Curve(args) => curve(args, cli.json),
    }
}

fn log_config<T: Serialize>(command: &str, config: &T) -> CliResult {
    eprintln!("samkit {command}: {}", to_json(config)?);
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| Failure::Run(e.to_string()))
}

fn write_json_file<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".config.json");
    PathBuf::from(name)
}

fn bound(args: &BoundArgs, json: bool) -> CliResult {
    let request = bounds::BoundRequest {
        method: args.method,
        n: args.n,
        dim: args.dim,
        delta: args.delta,
    };
    log_config("bound", &request)?;
    let result = request.evaluate()?;
    if json {
        println!("{}", to_json(&result)?);
    } else {
        print_bound(&result);
    }
    Ok(())
}

fn print_bound(r: &BoundResult) {
    if r.vacuous {
        println!("{:.4} (vacuous: exceeds 1)", r.delta_n);
    } else {
        println!("{:.4}", r.delta_n);
    }
}

fn sam(args: &SamArgs, json: bool) -> CliResult {
    let config = PipelineConfig {
        k: args.components,
        bound_method: args.bound,
        bound_dim: args.bound_dim,
        delta: args.delta,
        alpha: args.alpha,
        pi0: args.pi0,
        c_reg: args.c_reg,
        statistic: args.statistic,
        denominator: args.denominator,
        bonferroni: args.bonferroni,
        ..PipelineConfig::default()
    };
    log_config("sam", &config)?;
    config.validate()?;
    let dataset = dataio::load_dataset(&args.data)?;
    let atlas = dataio::load_parcellation(&args.atlas)?;
    let report = pipeline::build_sam(&dataset, &atlas, &config)?;
    dataio::write_report(&report, &args.out, args.format)?;

    if json {
        println!("{}", to_json(&report)?);
        return Ok(());
    }
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{} regions, {} subjects, tested at alpha = {}",
        report.regions.len(),
        dataset.n(),
        report.effective_alpha()
    )?;
    for r in report.regions.iter().filter(|r| r.significant) {
        writeln!(
            out,
            "  {:>4}  {:<16} accuracy {:.4}  worst case {:.4}  p {:.3e}",
            r.roi_id, r.roi_name, r.empirical_accuracy, r.worst_case_accuracy, r.p_value
        )?;
    }
    for r in report
        .regions
        .iter()
        .filter_map(|r| r.warning.as_ref().map(|w| (r.roi_id, w)))
    {
        writeln!(out, "  warning: region {}: {}", r.0, r.1)?;
    }
    writeln!(
        out,
        "{} significant; report written to {}",
        report.significant_count(),
        args.out.display()
    )?;
    Ok(())
}

fn synth(args: &SynthArgs, json: bool) -> CliResult {
    let config = SynthConfig {
        n: args.n,
        rois: args.rois,
        voxels_per_roi: args.voxels_per_roi,
        effect_rois: args.effect_rois.clone(),
        effect_size: args.effect_size,
        noise_sd: args.noise_sd,
        seed: args.seed,
    };
    log_config("synth", &config)?;
    let data = dataio::synth_generate(&config)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Run(format!("{}: {e}", args.out.display())))?;
    let manifest = dataio::write_synth(&data, &config, &args.out)?;

    #[derive(Serialize)]
    struct Written<'a> {
        manifest: &'a Path,
        atlas: &'a Path,
        n: usize,
        d: usize,
        effect_rois: Vec<u32>,
    }
    let atlas = args.out.join("atlas.csv");
    let written = Written {
        manifest: &manifest,
        atlas: &atlas,
        n: data.dataset.n(),
        d: data.dataset.d(),
        effect_rois: data.ground_truth.iter().copied().collect(),
    };
    if json {
        println!("{}", to_json(&written)?);
    } else {
        println!(
            "wrote {} x {} dataset to {} (atlas {}, planted regions {:?})",
            written.n,
            written.d,
            manifest.display(),
            atlas.display(),
            written.effect_rois
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct CoverageOutput<'a> {
    config: &'a CoverageSpec,
    result: &'a CoverageResult,
}

fn coverage(args: &CoverageArgs, json: bool) -> CliResult {
    let spec = CoverageSpec {
        holdout: args.holdout,
        separation: args.separation,
        c_reg: args.c_reg,
        ..CoverageSpec::new(
            args.n,
            args.dim,
            args.method,
            args.delta,
            args.trials,
            args.seed,
        )
    };
    log_config("simulate coverage", &spec)?;
    let result = pipeline::coverage_experiment_with(&spec)?;
    let output = CoverageOutput {
        config: &spec,
        result: &result,
    };
    if let Some(path) = &args.out {
        write_json_file(path, &output)?;
    }
    if json {
        println!("{}", to_json(&output)?);
    } else {
        println!(
            "{} bound, n = {}, dim = {}, delta = {}: delta_n = {:.4}",
            result.method, result.n, result.dim, result.delta, result.delta_n
        );
        println!(
            "violations {}/{} (rate {:.4}); mean empirical risk {:.4}, mean actual risk {:.4}",
            result.violations,
            result.trials,
            result.violation_rate,
            result.mean_empirical_risk,
            result.mean_actual_risk
        );
    }
    Ok(())
}

fn curve(args: &CurveArgs, json: bool) -> CliResult {
    #[derive(Serialize)]
    struct CurveConfig<'a> {
        methods: &'a [BoundMethod],
        n_grid: &'a [u64],
        dim_grid: &'a [u64],
        delta: f64,
    }
    let config = CurveConfig {
        methods: &args.methods,
        n_grid: &args.n_grid,
        dim_grid: &args.dim_grid,
        delta: args.delta,
    };
    log_config("curve", &config)?;
    if args.methods.is_empty() {
        return Err(Failure::Usage(
            "--methods must list at least one method".into(),
        ));
    }
    let mut rows = Vec::new();
    for &method in &args.methods {
        rows.extend(pipeline::bound_curve(
            &args.n_grid,
            &args.dim_grid,
            method,
            args.delta,
        )?);
    }

    let to_stdout = args.out.as_os_str() == "-";
    if to_stdout {
        pipeline::write_curve_csv(&rows, io::stdout().lock())?;
    } else {
        let file = fs::File::create(&args.out)
            .map_err(|e| Failure::Run(format!("{}: {e}", args.out.display())))?;
        pipeline::write_curve_csv(&rows, io::BufWriter::new(file))?;
        write_json_file(&sidecar(&args.out), &config)?;
    }
    if json {
        println!("{}", to_json(&rows)?);
    } else if !to_stdout {
        println!("wrote {} rows to {}", rows.len(), args.out.display());
    }
    Ok(())
}
