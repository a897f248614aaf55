use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ofdmgan::dataset::{self, Container, Representation};
use ofdmgan::metrics::{self, EvalReport};
use ofdmgan::ofdm::WaveformSpec;
use ofdmgan::scaling::ScalingMode;

/// Generate, transform and evaluate synthetic OFDM waveform datasets.
///
/// Set OFDMGAN_THREADS to fix the number of worker threads; output does not
/// depend on it.
#[derive(Debug, Parser)]
#[command(name = "ofdmgan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a raw (unscaled) dataset container.
    Generate(GenerateArgs),
    /// Convert a container between raw and STFT representations.
    Transform(TransformArgs),
    /// Compare a generated test set against a target test set.
    Evaluate(EvaluateArgs),
    /// Render CSV tables from an evaluation report.
    Report(ReportArgs),
    /// List experiment presets.
    Presets,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Named experiment preset, e.g. complexity-256-medium.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    /// Waveform spec as a JSON file path or an inline JSON object.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    count: usize,
    /// Dataset seed; defaults to the seed in the spec.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = ["raw", "stft"])]
    to: String,
    /// Min-max scaling mode; omitted leaves values unscaled.
    #[arg(long, value_parser = ["global", "featurewise"])]
    scaling: Option<String>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long = "gen")]
    generated: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Report JSON written by `evaluate`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    csv_dir: PathBuf,
}

fn load_spec(arg: &str) -> anyhow::Result<WaveformSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading spec {arg}"))?
    };
    let spec: WaveformSpec = serde_json::from_str(&text).map_err(ofdmgan::Error::from)?;
    spec.validate()?;
    Ok(spec)
}

fn generate(args: GenerateArgs) -> anyhow::Result<serde_json::Value> {
    let spec = match (&args.preset, &args.spec) {
        (Some(name), _) => dataset::preset(name)?,
        (None, Some(s)) => load_spec(s)?,
        (None, None) => bail!("either --preset or --spec is required"),
    };
    let seed = args.seed.unwrap_or(spec.seed);
    let header = dataset::generate_to_file(&spec, args.count, seed, &args.out)?;
    Ok(json!({
        "out": args.out,
        "count": header.count,
        "seed": header.seed,
        "waveform_len": header.spec.waveform_len(),
    }))
}

fn transform(args: TransformArgs) -> anyhow::Result<serde_json::Value> {
    let to: Representation = args.to.parse()?;
    let scaling: Option<ScalingMode> = args.scaling.as_deref().map(str::parse).transpose()?;
    let input = Container::read_from(&args.input)?;
    let out = dataset::convert(&input, to, scaling)?;
    out.write_to(&args.out)?;
    Ok(json!({
        "out": args.out,
        "representation": out.header.representation,
        "scaling": scaling,
        "item_len": out.header.item_len()?,
        "stft": out.header.stft,
    }))
}

fn load_waveforms(path: &Path) -> anyhow::Result<(WaveformSpec, Vec<ofdmgan::ofdm::IqWaveform>)> {
    let c = Container::read_from(path).with_context(|| format!("reading {}", path.display()))?;
    Ok((c.header.spec.clone(), dataset::to_waveforms(&c)?))
}

fn summary(report: &EvalReport) -> serde_json::Value {
    json!({
        "psd_distance": report.psd_distance,
        "evm_db": report.evm_db,
        "evm_target_db": report.evm_target_db,
        "cp_relerr_pct": report.cp_relerr_pct,
        "median_coherence_bw_hz": report.coherence_bw.as_ref().map(|c| [c.median_generated_hz, c.median_target_hz]),
    })
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<serde_json::Value> {
    let (target_spec, target) = load_waveforms(&args.target)?;
    let (gen_spec, generated) = load_waveforms(&args.generated)?;
    if gen_spec.waveform_len() != target_spec.waveform_len() || gen_spec.symbol_len != target_spec.symbol_len {
        return Err(ofdmgan::Error::DimensionMismatch(format!(
            "generated set has {}-sample waveforms with {}-point symbols, target has {} and {}",
            gen_spec.waveform_len(),
            gen_spec.symbol_len,
            target_spec.waveform_len(),
            target_spec.symbol_len
        ))
        .into());
    }
    let report = metrics::evaluate(&generated, &target, &target_spec)?;
    std::fs::write(&args.out, report.to_json()?)?;
    let mut out = summary(&report);
    if let Some(dir) = &args.csv_dir {
        out["csv"] = json!(metrics::write_csv_tables(&report, dir)?);
    }
    out["out"] = json!(args.out);
    Ok(out)
}

fn report(args: ReportArgs) -> anyhow::Result<serde_json::Value> {
    let text = std::fs::read_to_string(&args.report).with_context(|| format!("reading {}", args.report.display()))?;
    let report = EvalReport::from_json(&text)?;
    let mut out = summary(&report);
    out["csv"] = json!(metrics::write_csv_tables(&report, &args.csv_dir)?);
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<serde_json::Value> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Transform(a) => transform(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Report(a) => report(a),
        Command::Presets => Ok(json!(dataset::presets()
            .into_iter()
            .map(|p| json!({ "name": p.name, "spec": p.spec }))
            .collect::<Vec<_>>())),
    }
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail("usage", e.to_string()),
    };
    let pool = match dataset::thread_pool_from_env() {
        Ok(p) => p,
        Err(e) => return fail(e.kind(), e.to_string()),
    };
    let result = match pool {
        Some(pool) => pool.install(|| run(cli)),
        None => run(cli),
    };
    match result {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = e.downcast_ref::<ofdmgan::Error>().map_or("cli", ofdmgan::Error::kind);
            fail(kind, format!("{e:#}"))
        }
    }
}
