//! Evaluation runs: one trial per (maze, provider) pair under bounded
//! parallelism, with the paper-faithful retry rule — a failed JSON parse is
//! re-issued up to twice, so a trial makes at most three calls.
//!
//! Trials are sorted canonically before persisting, and local adapters are
//! fully deterministic, so report content is independent of scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use futures::stream::{self, StreamExt};

use mazeval_core::dataset::{GroupId, Manifest, ManifestEntry};
use mazeval_core::grade::{
    extract_partial_reachable, grade, grade_unparsed, parse_response, GradeMode, Verdict,
};
use mazeval_core::grid::MazeGrid;
use mazeval_core::report::{
    sha256_hex, InputMode, PromptVariant, ResponseOutcome, RunReport, TokenUsage, TrialRecord,
};

use crate::adapter::{HttpAdapter, SolverAdapter};
use crate::error::HarnessError;
use crate::limiter::RateLimiter;
use crate::local::LocalAdapter;
use crate::provider::{build_request, AdapterKind, ProviderConfig};

/// Initial call plus up to two parse retries.
pub const PARSE_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub input_mode: InputMode,
    pub prompt_variant: PromptVariant,
    pub concurrency: usize,
    /// Restrict to these groups; `None` evaluates the whole manifest.
    pub groups: Option<BTreeSet<GroupId>>,
    pub grade_mode: GradeMode,
    /// Fixed timestamp for reproducible reports; defaults to now.
    pub timestamp_override: Option<String>,
    pub request_timeout_s: u64,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            input_mode: InputMode::Image,
            prompt_variant: PromptVariant::Standard,
            concurrency: 4,
            groups: None,
            grade_mode: GradeMode::AnnotationMatch,
            timestamp_override: None,
            request_timeout_s: 300,
        }
    }
}

/// Evaluate one maze with one provider: build the request once, re-issue on
/// parse failure, sum latency and tokens across attempts, grade the result.
pub async fn solve_one(
    adapter: &dyn SolverAdapter,
    config: &ProviderConfig,
    entry: &ManifestEntry,
    grid: &MazeGrid,
    image: Option<&[u8]>,
    input_mode: InputMode,
    prompt_variant: PromptVariant,
    grade_mode: GradeMode,
) -> Result<TrialRecord, HarnessError> {
    let request = build_request(entry, image, config, input_mode, prompt_variant)?;

    let mut attempts = 0u32;
    let mut latency_s = 0.0;
    let mut tokens = TokenUsage::default();
    let mut usage_missing = false;
    let mut last_raw = String::new();
    let mut outcome_and_verdict: Option<(ResponseOutcome, Verdict)> = None;

    while attempts < PARSE_ATTEMPTS {
        attempts += 1;
        let response = match adapter.send(&request).await {
            Ok(r) => r,
            Err(e @ (HarnessError::Transport(_) | HarnessError::Auth(_))) => {
                outcome_and_verdict = Some((
                    ResponseOutcome::TransportFailed { error: e.to_string() },
                    failed_verdict(grade_mode),
                ));
                break;
            }
            Err(e) => return Err(e),
        };
        latency_s += response.latency_s;
        tokens.add(response.tokens);
        usage_missing |= response.usage_missing;

        match parse_response(&response.text) {
            Ok(parsed) => {
                let mut verdict = grade(&parsed, &entry.annotation, grid, grade_mode);
                if response.truncated {
                    // A prefix that happened to parse is still an incomplete
                    // output: never solved.
                    verdict.solved = false;
                    verdict.truncated_output = true;
                }
                outcome_and_verdict =
                    Some((ResponseOutcome::Parsed { response: parsed }, verdict));
                break;
            }
            Err(_) => {
                last_raw = response.text;
            }
        }
    }

    let (response, verdict) = outcome_and_verdict.unwrap_or_else(|| {
        let partial = extract_partial_reachable(&last_raw);
        let verdict = grade_unparsed(partial, &entry.annotation, grade_mode);
        (
            ResponseOutcome::ParseFailed { last_raw: last_raw.clone(), partial_reachable: partial },
            verdict,
        )
    });

    Ok(TrialRecord {
        maze_id: entry.maze_id.clone(),
        provider: config.label(),
        input_mode,
        prompt_variant,
        attempts,
        latency_s,
        tokens,
        usage_missing,
        response,
        verdict,
    })
}

fn failed_verdict(mode: GradeMode) -> Verdict {
    Verdict {
        solved: false,
        reach_correct: false,
        length_correct: None,
        path_valid: None,
        mode,
        truncated_output: false,
        length_inferred_from_path: false,
    }
}

/// Evaluate every (maze, provider) pair and persist-ready report. Individual
/// trial failures are recorded in the report, never fatal; only
/// configuration problems abort the run.
pub async fn run_eval(
    manifest: &Manifest,
    manifest_dir: &Path,
    providers: &[ProviderConfig],
    options: &RunOptions,
) -> Result<RunReport, HarnessError> {
    if providers.is_empty() {
        return Err(HarnessError::InvalidConfig("no providers configured".into()));
    }
    for config in providers {
        config.validate()?;
    }
    {
        let mut labels = BTreeSet::new();
        for config in providers {
            if !labels.insert(config.label()) {
                return Err(HarnessError::InvalidConfig(format!(
                    "duplicate provider label {:?}",
                    config.label()
                )));
            }
        }
    }

    let entries: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| options.groups.as_ref().is_none_or(|gs| gs.contains(&e.group_id)))
        .collect();

    // Pre-parse grids, and load each image at most once if any provider
    // wants image input.
    let mut grids: BTreeMap<String, Arc<MazeGrid>> = BTreeMap::new();
    let mut images: BTreeMap<String, Arc<Vec<u8>>> = BTreeMap::new();
    let wants_images = providers
        .iter()
        .any(|p| p.input_mode.unwrap_or(options.input_mode) == InputMode::Image
            && p.adapter_kind != AdapterKind::Local);
    for entry in &entries {
        grids.insert(entry.maze_id.clone(), Arc::new(entry.grid()?));
        if wants_images {
            let path = manifest_dir.join(&entry.image_path);
            let bytes = std::fs::read(&path).map_err(|e| {
                HarnessError::MissingInput("image", format!("{}: {e}", path.display()))
            })?;
            images.insert(entry.maze_id.clone(), Arc::new(bytes));
        }
    }

    let client = reqwest::Client::builder()
        .timeout(Duration::from_secs(options.request_timeout_s))
        .build()
        .map_err(|e| HarnessError::Transport(e.to_string()))?;

    struct ProviderSlot {
        config: ProviderConfig,
        adapter: Arc<dyn SolverAdapter>,
        limiter: Arc<RateLimiter>,
        input_mode: InputMode,
        prompt_variant: PromptVariant,
    }
    let slots: Vec<Arc<ProviderSlot>> = providers
        .iter()
        .map(|config| {
            let adapter: Arc<dyn SolverAdapter> = match config.adapter_kind {
                AdapterKind::Local => Arc::new(LocalAdapter),
                _ => Arc::new(HttpAdapter::new(client.clone())),
            };
            Arc::new(ProviderSlot {
                adapter,
                limiter: RateLimiter::per_minute(config.requests_per_minute),
                input_mode: config.input_mode.unwrap_or(options.input_mode),
                prompt_variant: config.prompt_variant.unwrap_or(options.prompt_variant),
                config: config.clone(),
            })
        })
        .collect();

    let grade_mode = options.grade_mode;
    let tasks = slots.iter().flat_map(|slot| {
        entries.iter().map(|entry| {
            let slot = Arc::clone(slot);
            let entry = (*entry).clone();
            let grid = Arc::clone(&grids[&entry.maze_id]);
            let image = images.get(&entry.maze_id).cloned();
            async move {
                slot.limiter.acquire().await;
                solve_one(
                    slot.adapter.as_ref(),
                    &slot.config,
                    &entry,
                    &grid,
                    image.as_deref().map(|v| v.as_slice()),
                    slot.input_mode,
                    slot.prompt_variant,
                    grade_mode,
                )
                .await
            }
        })
        .collect::<Vec<_>>()
    });

    let mut trials: Vec<TrialRecord> = stream::iter(tasks)
        .buffer_unordered(options.concurrency.max(1))
        .collect::<Vec<_>>()
        .await
        .into_iter()
        .collect::<Result<_, _>>()?;
    trials.sort_by(|a, b| a.maze_id.cmp(&b.maze_id).then_with(|| a.provider.cmp(&b.provider)));

    Ok(RunReport {
        version: 1,
        timestamp: options
            .timestamp_override
            .clone()
            .unwrap_or_else(|| chrono::Utc::now().to_rfc3339()),
        config_digest: sha256_hex(&serde_json::to_vec(providers)?),
        manifest_digest: manifest.digest(),
        manifest_path: manifest_dir.join("manifest.json").display().to_string(),
        grade_mode,
        trials,
    })
}
