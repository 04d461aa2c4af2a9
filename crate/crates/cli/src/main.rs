//! `mazeval` — generate the maze benchmark, evaluate solvers over it, and
//! render report tables.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mazeval_core::dataset::{
    assemble_benchmark, default_benchmark_config, load_manifest, write_benchmark, GroupId,
};
use mazeval_core::grade::GradeMode;
use mazeval_core::report::{
    compute_metrics, emit_tables, render_ablation, render_ultra_hard, InputMode, PromptVariant,
    RunReport, TableFormat, TableKind,
};
use mazeval_harness::{run_eval, ProviderConfig, RunOptions};

#[derive(Parser)]
#[command(name = "mazeval", version, about = "Maze benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the benchmark: manifest, text grids, rendered images.
    Generate(GenerateArgs),
    /// Evaluate providers over a generated benchmark.
    Eval(EvalArgs),
    /// Render tables from a persisted run report.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory for manifest.json and images/.
    #[arg(long)]
    out_dir: PathBuf,
    /// Master seed; the whole dataset is a pure function of it.
    #[arg(long, default_value_t = 20260320)]
    master_seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Path to manifest.json.
    #[arg(long)]
    manifest: PathBuf,
    /// JSON file with an array of provider configurations.
    #[arg(long)]
    providers: PathBuf,
    /// image | text-grid
    #[arg(long, default_value = "image")]
    input_mode: String,
    /// standard | visual-intuition
    #[arg(long, default_value = "standard")]
    prompt_variant: String,
    /// annotation-match | simulate
    #[arg(long, default_value = "annotation-match")]
    grade_mode: String,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Comma-separated group letters (e.g. A,B,X); default all.
    #[arg(long)]
    groups: Option<String>,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 300)]
    timeout_s: u64,
    /// Where to write the run report JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Run report JSON; repeat to merge several runs (e.g. for ablation).
    #[arg(long, required = true)]
    run: Vec<PathBuf>,
    /// Manifest path; defaults to the path recorded in the run.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// leaderboard | per-group | efficiency | ultra-hard | ablation
    #[arg(long, default_value = "leaderboard")]
    kind: String,
    /// markdown | csv | json
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Provider label filter for the ultra-hard table.
    #[arg(long)]
    provider: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Eval(args) => eval(args).await,
        Command::Report(args) => report(args),
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    eprintln!("assembling benchmark (master seed {})...", args.master_seed);
    let bench = assemble_benchmark(&default_benchmark_config(), args.master_seed)?;
    write_benchmark(&bench, &args.out_dir)?;
    let reachable = bench.manifest.entries.iter().filter(|e| e.annotation.reachable).count();
    eprintln!(
        "wrote {} mazes ({} reachable, {} unreachable) to {}",
        bench.manifest.entries.len(),
        reachable,
        bench.manifest.entries.len() - reachable,
        args.out_dir.display()
    );
    Ok(())
}

async fn eval(args: EvalArgs) -> Result<()> {
    let manifest = load_manifest(&args.manifest)
        .with_context(|| format!("loading {}", args.manifest.display()))?;
    let manifest_dir = args.manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let providers: Vec<ProviderConfig> = serde_json::from_slice(
        &std::fs::read(&args.providers)
            .with_context(|| format!("reading {}", args.providers.display()))?,
    )
    .context("parsing providers file")?;

    let options = RunOptions {
        input_mode: parse_input_mode(&args.input_mode)?,
        prompt_variant: parse_prompt_variant(&args.prompt_variant)?,
        grade_mode: parse_grade_mode(&args.grade_mode)?,
        concurrency: args.concurrency,
        groups: args.groups.as_deref().map(parse_groups).transpose()?,
        timestamp_override: None,
        request_timeout_s: args.timeout_s,
    };

    eprintln!(
        "evaluating {} providers over {} mazes (concurrency {})...",
        providers.len(),
        manifest.entries.len(),
        options.concurrency
    );
    let report = run_eval(&manifest, &manifest_dir, &providers, &options).await?;
    report.save(&args.out)?;
    let solved = report.trials.iter().filter(|t| t.verdict.solved).count();
    eprintln!("{} trials, {} solved; report at {}", report.trials.len(), solved, args.out.display());
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let runs: Vec<RunReport> = args
        .run
        .iter()
        .map(|p| RunReport::load(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<_>>()?;
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(&runs[0].manifest_path));
    let manifest = load_manifest(&manifest_path)
        .with_context(|| format!("loading {}", manifest_path.display()))?;
    let format = parse_format(&args.format)?;

    let rendered = match args.kind.as_str() {
        "leaderboard" | "per-group" | "per_group" | "efficiency" => {
            let merged = merge_runs(&runs);
            let rows = compute_metrics(&merged, &manifest)?;
            let kind = match args.kind.as_str() {
                "leaderboard" => TableKind::Leaderboard,
                "efficiency" => TableKind::Efficiency,
                _ => TableKind::PerGroup,
            };
            emit_tables(&rows, format, kind)?
        }
        "ultra-hard" | "ultra_hard" => {
            let merged = merge_runs(&runs);
            render_ultra_hard(&merged, &manifest, args.provider.as_deref(), format)?
        }
        "ablation" => {
            let refs: Vec<&RunReport> = runs.iter().collect();
            render_ablation(&refs, &manifest, format)?
        }
        other => bail!("unknown table kind {other:?}"),
    };

    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn merge_runs(runs: &[RunReport]) -> RunReport {
    let mut merged = runs[0].clone();
    for run in &runs[1..] {
        merged.trials.extend(run.trials.iter().cloned());
    }
    merged
        .trials
        .sort_by(|a, b| a.maze_id.cmp(&b.maze_id).then_with(|| a.provider.cmp(&b.provider)));
    merged
}

fn parse_input_mode(s: &str) -> Result<InputMode> {
    match s {
        "image" => Ok(InputMode::Image),
        "text-grid" => Ok(InputMode::TextGrid),
        other => bail!("unknown input mode {other:?} (expected image or text-grid)"),
    }
}

fn parse_prompt_variant(s: &str) -> Result<PromptVariant> {
    match s {
        "standard" => Ok(PromptVariant::Standard),
        "visual-intuition" => Ok(PromptVariant::VisualIntuition),
        other => bail!("unknown prompt variant {other:?}"),
    }
}

fn parse_grade_mode(s: &str) -> Result<GradeMode> {
    match s {
        "annotation-match" => Ok(GradeMode::AnnotationMatch),
        "simulate" => Ok(GradeMode::Simulate),
        other => bail!("unknown grade mode {other:?}"),
    }
}

fn parse_format(s: &str) -> Result<TableFormat> {
    match s {
        "markdown" | "md" => Ok(TableFormat::Markdown),
        "csv" => Ok(TableFormat::Csv),
        "json" => Ok(TableFormat::Json),
        other => bail!("unknown format {other:?}"),
    }
}

fn parse_groups(s: &str) -> Result<BTreeSet<GroupId>> {
    s.split(',')
        .map(|token| {
            let token = token.trim();
            let mut chars = token.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => {
                    GroupId::from_char(c).ok_or_else(|| anyhow::anyhow!("unknown group {token:?}"))
                }
                _ => bail!("unknown group {token:?}"),
            }
        })
        .collect()
}
