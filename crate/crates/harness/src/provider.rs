//! Provider configuration and wire formats.
//!
//! Each adapter kind builds its provider's native JSON request and extracts
//! text, token usage, and a truncation flag from the native response shape.
//! Images travel as base64; adapters whose schema takes a URL slot
//! (responses-api, dashscope) embed a `data:image/png;base64,` data URL,
//! the others (messages-api, gemini-rest) use their inline base64 source
//! fields.

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use mazeval_core::dataset::ManifestEntry;
use mazeval_core::pathfind::Annotation;
use mazeval_core::report::{InputMode, PromptVariant, TokenUsage};

use crate::error::HarnessError;
use crate::prompt::build_prompt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdapterKind {
    ResponsesApi,
    MessagesApi,
    GeminiRest,
    Dashscope,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReasoningEffort {
    None,
    Low,
    Medium,
    Default,
}

impl ReasoningEffort {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasoningEffort::None => "none",
            ReasoningEffort::Low => "low",
            ReasoningEffort::Medium => "medium",
            ReasoningEffort::Default => "default",
        }
    }
}

fn default_reasoning() -> ReasoningEffort {
    ReasoningEffort::Default
}

fn default_max_output_tokens() -> u32 {
    8192
}

/// One evaluated configuration: adapter kind, model, reasoning knob, limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub adapter_kind: AdapterKind,
    pub model_id: String,
    #[serde(default = "default_reasoning")]
    pub reasoning: ReasoningEffort,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    /// Explicit temperature override; defaults follow the reasoning mode.
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub api_base: Option<String>,
    #[serde(default)]
    pub key_env_var: Option<String>,
    #[serde(default)]
    pub requests_per_minute: Option<u32>,
    /// Thinking-token budget for adapters with an explicit budget knob.
    #[serde(default)]
    pub thinking_budget_tokens: Option<u32>,
    /// Per-provider overrides of the run-level input mode / prompt variant.
    #[serde(default)]
    pub input_mode: Option<InputMode>,
    #[serde(default)]
    pub prompt_variant: Option<PromptVariant>,
}

impl ProviderConfig {
    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("{} ({})", self.model_id, self.reasoning.as_str()))
    }

    fn thinking_enabled(&self) -> bool {
        self.adapter_kind == AdapterKind::MessagesApi
            && matches!(self.reasoning, ReasoningEffort::Low | ReasoningEffort::Medium)
    }

    /// Temperature under the benchmark's rules: 0.0 everywhere, except that
    /// thinking-enabled messages-api calls require 1.0.
    pub fn resolved_temperature(&self) -> Result<f64, HarnessError> {
        if self.thinking_enabled() {
            match self.temperature {
                None => Ok(1.0),
                Some(t) if t == 1.0 => Ok(1.0),
                Some(t) => Err(HarnessError::InvalidConfig(format!(
                    "messages-api with thinking enabled requires temperature 1.0, got {t}"
                ))),
            }
        } else {
            Ok(self.temperature.unwrap_or(0.0))
        }
    }

    fn thinking_budget(&self) -> u32 {
        self.thinking_budget_tokens.unwrap_or(match self.reasoning {
            ReasoningEffort::Medium => 8192,
            _ => 2048,
        })
    }

    pub fn api_base(&self) -> &str {
        if let Some(base) = &self.api_base {
            return base.trim_end_matches('/');
        }
        match self.adapter_kind {
            AdapterKind::ResponsesApi => "https://api.openai.com",
            AdapterKind::MessagesApi => "https://api.anthropic.com",
            AdapterKind::GeminiRest => "https://generativelanguage.googleapis.com",
            AdapterKind::Dashscope => "https://dashscope.aliyuncs.com",
            AdapterKind::Local => "",
        }
    }

    fn api_key(&self) -> Result<Option<String>, HarnessError> {
        match &self.key_env_var {
            None => Ok(None),
            Some(var) => match std::env::var(var) {
                Ok(key) => Ok(Some(key)),
                Err(_) => Err(HarnessError::Auth(var.clone())),
            },
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.resolved_temperature()?;
        match self.adapter_kind {
            AdapterKind::GeminiRest | AdapterKind::Dashscope => {
                if self.reasoning != ReasoningEffort::Default {
                    return Err(HarnessError::UnsupportedCombination(format!(
                        "{} has no reasoning-effort control (models reason by default); \
                         use reasoning = \"default\"",
                        self.label()
                    )));
                }
            }
            AdapterKind::Local => {
                LocalSolverKind::from_model_id(&self.model_id)?;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Reference solvers that run in-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalSolverKind {
    /// Emits the annotation's first accepted path and true metadata.
    Oracle,
    /// Always claims reachable with the unchecked L-shaped greedy path.
    Naive,
    /// Emits a seeded random move sequence; a sanity floor.
    RandomWalk,
}

impl LocalSolverKind {
    pub fn from_model_id(model_id: &str) -> Result<LocalSolverKind, HarnessError> {
        match model_id {
            "oracle" => Ok(LocalSolverKind::Oracle),
            "naive" => Ok(LocalSolverKind::Naive),
            "random-walk" => Ok(LocalSolverKind::RandomWalk),
            other => Err(HarnessError::InvalidConfig(format!(
                "unknown local solver {other:?}; expected oracle, naive, or random-walk"
            ))),
        }
    }
}

/// A fully built request, ready for an adapter.
#[derive(Debug, Clone)]
pub enum ProviderRequest {
    Http(HttpRequestSpec),
    Local(LocalRequestSpec),
}

#[derive(Debug, Clone)]
pub struct HttpRequestSpec {
    pub adapter_kind: AdapterKind,
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: Value,
}

#[derive(Debug, Clone)]
pub struct LocalRequestSpec {
    pub solver: LocalSolverKind,
    pub maze_id: String,
    pub text_grid: String,
    pub annotation: Annotation,
    pub prompt: String,
}

/// Build the provider-native request for one maze entry. `image` must be the
/// PNG bytes in image mode for remote adapters.
pub fn build_request(
    entry: &ManifestEntry,
    image: Option<&[u8]>,
    config: &ProviderConfig,
    input_mode: InputMode,
    prompt_variant: PromptVariant,
) -> Result<ProviderRequest, HarnessError> {
    config.validate()?;
    if input_mode == InputMode::TextGrid && prompt_variant == PromptVariant::VisualIntuition {
        return Err(HarnessError::UnsupportedCombination(
            "the visual-intuition prompt forbids text grids; it needs image input".into(),
        ));
    }
    let prompt = build_prompt(input_mode, prompt_variant, Some(&entry.text_grid));

    if config.adapter_kind == AdapterKind::Local {
        return Ok(ProviderRequest::Local(LocalRequestSpec {
            solver: LocalSolverKind::from_model_id(&config.model_id)?,
            maze_id: entry.maze_id.clone(),
            text_grid: entry.text_grid.clone(),
            annotation: entry.annotation.clone(),
            prompt,
        }));
    }

    let image_b64 = match input_mode {
        InputMode::Image => {
            let bytes = image.ok_or_else(|| {
                HarnessError::MissingInput("image", entry.maze_id.clone())
            })?;
            Some(base64::engine::general_purpose::STANDARD.encode(bytes))
        }
        InputMode::TextGrid => None,
    };
    let temperature = config.resolved_temperature()?;
    let key = config.api_key()?;

    let (url, mut headers, body) = match config.adapter_kind {
        AdapterKind::ResponsesApi => {
            let mut content = vec![json!({"type": "input_text", "text": prompt})];
            if let Some(b64) = &image_b64 {
                content.push(json!({
                    "type": "input_image",
                    "image_url": format!("data:image/png;base64,{b64}"),
                }));
            }
            let mut body = json!({
                "model": config.model_id,
                "input": [{"role": "user", "content": content}],
                "max_output_tokens": config.max_output_tokens,
                "temperature": temperature,
            });
            if config.reasoning != ReasoningEffort::Default {
                body["reasoning"] = json!({"effort": config.reasoning.as_str()});
            }
            let mut headers = Vec::new();
            if let Some(k) = &key {
                headers.push(("authorization".to_string(), format!("Bearer {k}")));
            }
            (format!("{}/v1/responses", config.api_base()), headers, body)
        }
        AdapterKind::MessagesApi => {
            let mut content = Vec::new();
            if let Some(b64) = &image_b64 {
                content.push(json!({
                    "type": "image",
                    "source": {"type": "base64", "media_type": "image/png", "data": b64},
                }));
            }
            content.push(json!({"type": "text", "text": prompt}));
            let mut body = json!({
                "model": config.model_id,
                "max_tokens": config.max_output_tokens,
                "temperature": temperature,
                "messages": [{"role": "user", "content": content}],
            });
            if config.thinking_enabled() {
                body["thinking"] =
                    json!({"type": "enabled", "budget_tokens": config.thinking_budget()});
            }
            let mut headers =
                vec![("anthropic-version".to_string(), "2023-06-01".to_string())];
            if let Some(k) = &key {
                headers.push(("x-api-key".to_string(), k.clone()));
            }
            (format!("{}/v1/messages", config.api_base()), headers, body)
        }
        AdapterKind::GeminiRest => {
            let mut parts = Vec::new();
            if let Some(b64) = &image_b64 {
                parts.push(json!({"inline_data": {"mime_type": "image/png", "data": b64}}));
            }
            parts.push(json!({"text": prompt}));
            let body = json!({
                "contents": [{"parts": parts}],
                "generationConfig": {
                    "temperature": temperature,
                    "maxOutputTokens": config.max_output_tokens,
                },
            });
            let mut headers = Vec::new();
            if let Some(k) = &key {
                headers.push(("x-goog-api-key".to_string(), k.clone()));
            }
            (
                format!(
                    "{}/v1beta/models/{}:generateContent",
                    config.api_base(),
                    config.model_id
                ),
                headers,
                body,
            )
        }
        AdapterKind::Dashscope => {
            let mut content = Vec::new();
            if let Some(b64) = &image_b64 {
                content.push(json!({
                    "type": "image_url",
                    "image_url": {"url": format!("data:image/png;base64,{b64}")},
                }));
            }
            content.push(json!({"type": "text", "text": prompt}));
            let body = json!({
                "model": config.model_id,
                "messages": [{"role": "user", "content": content}],
                "temperature": temperature,
                "max_tokens": config.max_output_tokens,
            });
            let mut headers = Vec::new();
            if let Some(k) = &key {
                headers.push(("authorization".to_string(), format!("Bearer {k}")));
            }
            (
                format!("{}/compatible-mode/v1/chat/completions", config.api_base()),
                headers,
                body,
            )
        }
        AdapterKind::Local => unreachable!("handled above"),
    };
    headers.push(("content-type".to_string(), "application/json".to_string()));

    Ok(ProviderRequest::Http(HttpRequestSpec {
        adapter_kind: config.adapter_kind,
        url,
        headers,
        body,
    }))
}

/// Text, usage, and truncation extracted from a provider's native response.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedResponse {
    pub text: String,
    pub tokens: TokenUsage,
    pub usage_missing: bool,
    pub truncated: bool,
}

/// Decode a provider response body for the given adapter kind.
pub fn extract_response(kind: AdapterKind, body: &Value) -> Result<ExtractedResponse, HarnessError> {
    match kind {
        AdapterKind::ResponsesApi => {
            let mut text = String::new();
            for item in body["output"].as_array().into_iter().flatten() {
                if item["type"] == "message" {
                    for part in item["content"].as_array().into_iter().flatten() {
                        if part["type"] == "output_text" {
                            text.push_str(part["text"].as_str().unwrap_or(""));
                        }
                    }
                }
            }
            if text.is_empty() && body["output"].is_null() {
                return Err(HarnessError::BadPayload("responses-api body has no output".into()));
            }
            let usage = &body["usage"];
            let reasoning = usage["output_tokens_details"]["reasoning_tokens"].as_u64();
            let output = usage["output_tokens"].as_u64();
            let tokens = TokenUsage {
                input: usage["input_tokens"].as_u64().unwrap_or(0),
                thinking: reasoning.unwrap_or(0),
                output: output.unwrap_or(0).saturating_sub(reasoning.unwrap_or(0)),
            };
            let usage_missing = usage["input_tokens"].as_u64().is_none() || output.is_none();
            let truncated = body["status"] == "incomplete"
                && body["incomplete_details"]["reason"] == "max_output_tokens";
            Ok(ExtractedResponse { text, tokens, usage_missing, truncated })
        }
        AdapterKind::MessagesApi => {
            let mut text = String::new();
            for part in body["content"].as_array().into_iter().flatten() {
                if part["type"] == "text" {
                    text.push_str(part["text"].as_str().unwrap_or(""));
                }
            }
            if body["content"].is_null() {
                return Err(HarnessError::BadPayload("messages-api body has no content".into()));
            }
            let usage = &body["usage"];
            let tokens = TokenUsage {
                input: usage["input_tokens"].as_u64().unwrap_or(0),
                // Thinking is not split out in usage; it counts into output.
                thinking: 0,
                output: usage["output_tokens"].as_u64().unwrap_or(0),
            };
            let usage_missing = usage["input_tokens"].as_u64().is_none()
                || usage["output_tokens"].as_u64().is_none();
            let truncated = body["stop_reason"] == "max_tokens";
            Ok(ExtractedResponse { text, tokens, usage_missing, truncated })
        }
        AdapterKind::GeminiRest => {
            let candidate = &body["candidates"][0];
            if candidate.is_null() {
                return Err(HarnessError::BadPayload("gemini body has no candidates".into()));
            }
            let mut text = String::new();
            for part in candidate["content"]["parts"].as_array().into_iter().flatten() {
                text.push_str(part["text"].as_str().unwrap_or(""));
            }
            let usage = &body["usageMetadata"];
            let tokens = TokenUsage {
                input: usage["promptTokenCount"].as_u64().unwrap_or(0),
                thinking: usage["thoughtsTokenCount"].as_u64().unwrap_or(0),
                output: usage["candidatesTokenCount"].as_u64().unwrap_or(0),
            };
            let usage_missing = usage["promptTokenCount"].as_u64().is_none()
                || usage["candidatesTokenCount"].as_u64().is_none();
            let truncated = candidate["finishReason"] == "MAX_TOKENS";
            Ok(ExtractedResponse { text, tokens, usage_missing, truncated })
        }
        AdapterKind::Dashscope => {
            let choice = &body["choices"][0];
            if choice.is_null() {
                return Err(HarnessError::BadPayload("dashscope body has no choices".into()));
            }
            let text = choice["message"]["content"].as_str().unwrap_or("").to_string();
            let usage = &body["usage"];
            let reasoning = usage["completion_tokens_details"]["reasoning_tokens"]
                .as_u64()
                .unwrap_or(0);
            let completion = usage["completion_tokens"].as_u64();
            let tokens = TokenUsage {
                input: usage["prompt_tokens"].as_u64().unwrap_or(0),
                thinking: reasoning,
                output: completion.unwrap_or(0).saturating_sub(reasoning),
            };
            let usage_missing =
                usage["prompt_tokens"].as_u64().is_none() || completion.is_none();
            let truncated = choice["finish_reason"] == "length";
            Ok(ExtractedResponse { text, tokens, usage_missing, truncated })
        }
        AdapterKind::Local => Err(HarnessError::BadPayload(
            "local adapter does not speak HTTP".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mazeval_core::dataset::GroupId;
    use mazeval_core::generate::MazeSpec;
    use mazeval_core::render::PaletteName;
    use mazeval_core::{analyze, MazeGrid};

    pub(crate) fn sample_entry() -> ManifestEntry {
        let grid = MazeGrid::parse_text_grid("S....\n.###.\n.....\n.###.\n....G").unwrap();
        ManifestEntry {
            maze_id: "gen_maze_001".into(),
            group_id: GroupId::A,
            spec: MazeSpec {
                rows: 5,
                cols: 5,
                wall_density: 0.2,
                trap_count: 0,
                border_walls: false,
                reachable_target: true,
                palette: PaletteName::Forest,
                seed: 1,
            },
            image_path: "images/gen_maze_001.png".into(),
            text_grid: grid.export_text_grid(),
            annotation: analyze(&grid),
            pair_id: None,
        }
    }

    fn config(kind: AdapterKind, reasoning: ReasoningEffort) -> ProviderConfig {
        ProviderConfig {
            label: None,
            adapter_kind: kind,
            model_id: "test-model".into(),
            reasoning,
            max_output_tokens: 8192,
            temperature: None,
            api_base: Some("http://127.0.0.1:9".into()),
            key_env_var: None,
            requests_per_minute: None,
            thinking_budget_tokens: None,
            input_mode: None,
            prompt_variant: None,
        }
    }

    fn http(req: ProviderRequest) -> HttpRequestSpec {
        match req {
            ProviderRequest::Http(h) => h,
            ProviderRequest::Local(_) => panic!("expected http request"),
        }
    }

    #[test]
    fn image_mode_carries_data_urls_where_the_schema_has_url_slots() {
        let entry = sample_entry();
        let png = vec![0x89, b'P', b'N', b'G'];
        for kind in [AdapterKind::ResponsesApi, AdapterKind::Dashscope] {
            let reasoning = if kind == AdapterKind::ResponsesApi {
                ReasoningEffort::Low
            } else {
                ReasoningEffort::Default
            };
            let req = build_request(
                &entry,
                Some(&png),
                &config(kind, reasoning),
                InputMode::Image,
                PromptVariant::Standard,
            )
            .unwrap();
            let body = http(req).body.to_string();
            assert!(body.contains("data:image/png;base64,"), "kind {kind:?}");
        }
    }

    #[test]
    fn inline_base64_adapters_carry_the_image_payload() {
        let entry = sample_entry();
        let png = vec![0x89, b'P', b'N', b'G', 1, 2, 3];
        let b64 = base64::engine::general_purpose::STANDARD.encode(&png);
        for (kind, reasoning) in [
            (AdapterKind::MessagesApi, ReasoningEffort::None),
            (AdapterKind::GeminiRest, ReasoningEffort::Default),
        ] {
            let req = build_request(
                &entry,
                Some(&png),
                &config(kind, reasoning),
                InputMode::Image,
                PromptVariant::Standard,
            )
            .unwrap();
            let body = http(req).body.to_string();
            assert!(body.contains(&b64), "kind {kind:?}");
            assert!(body.contains("image/png"), "kind {kind:?}");
        }
    }

    #[test]
    fn text_mode_embeds_grid_and_no_image() {
        let entry = sample_entry();
        let req = build_request(
            &entry,
            None,
            &config(AdapterKind::ResponsesApi, ReasoningEffort::Medium),
            InputMode::TextGrid,
            PromptVariant::Standard,
        )
        .unwrap();
        let h = http(req);
        let body = h.body.to_string();
        assert!(body.contains(&entry.text_grid.replace('\n', "\\n")));
        assert!(!body.contains("input_image"));
        assert_eq!(h.body["reasoning"]["effort"], "medium");
    }

    #[test]
    fn temperature_rules() {
        // Thinking on messages-api forces 1.0.
        let cfg = config(AdapterKind::MessagesApi, ReasoningEffort::Low);
        assert_eq!(cfg.resolved_temperature().unwrap(), 1.0);
        let cfg = config(AdapterKind::MessagesApi, ReasoningEffort::None);
        assert_eq!(cfg.resolved_temperature().unwrap(), 0.0);
        let bad = ProviderConfig {
            temperature: Some(0.5),
            ..config(AdapterKind::MessagesApi, ReasoningEffort::Low)
        };
        assert!(bad.resolved_temperature().is_err());
        let cfg = config(AdapterKind::ResponsesApi, ReasoningEffort::None);
        assert_eq!(cfg.resolved_temperature().unwrap(), 0.0);
    }

    #[test]
    fn thinking_block_only_when_enabled() {
        let entry = sample_entry();
        let req = build_request(
            &entry,
            None,
            &config(AdapterKind::MessagesApi, ReasoningEffort::Low),
            InputMode::TextGrid,
            PromptVariant::Standard,
        )
        .unwrap();
        let h = http(req);
        assert_eq!(h.body["thinking"]["type"], "enabled");
        assert_eq!(h.body["temperature"], 1.0);

        let req = build_request(
            &entry,
            None,
            &config(AdapterKind::MessagesApi, ReasoningEffort::None),
            InputMode::TextGrid,
            PromptVariant::Standard,
        )
        .unwrap();
        let h = http(req);
        assert!(h.body.get("thinking").is_none());
        assert_eq!(h.body["temperature"], 0.0);
    }

    #[test]
    fn unsupported_combinations_error() {
        let entry = sample_entry();
        let err = build_request(
            &entry,
            None,
            &config(AdapterKind::GeminiRest, ReasoningEffort::Medium),
            InputMode::TextGrid,
            PromptVariant::Standard,
        )
        .unwrap_err();
        assert!(matches!(err, HarnessError::UnsupportedCombination(_)));

        let err = build_request(
            &entry,
            None,
            &config(AdapterKind::ResponsesApi, ReasoningEffort::Low),
            InputMode::TextGrid,
            PromptVariant::VisualIntuition,
        )
        .unwrap_err();
        assert!(matches!(err, HarnessError::UnsupportedCombination(_)));
    }

    #[test]
    fn missing_key_env_var_is_an_auth_error() {
        let entry = sample_entry();
        let cfg = ProviderConfig {
            key_env_var: Some("MAZEVAL_TEST_KEY_THAT_DOES_NOT_EXIST".into()),
            ..config(AdapterKind::ResponsesApi, ReasoningEffort::Low)
        };
        let err = build_request(&entry, None, &cfg, InputMode::TextGrid, PromptVariant::Standard)
            .unwrap_err();
        assert!(matches!(err, HarnessError::Auth(_)));
    }

    #[test]
    fn extracts_each_wire_format() {
        let body = json!({
            "status": "completed",
            "output": [
                {"type": "reasoning"},
                {"type": "message", "content": [{"type": "output_text", "text": "{\"reachable\":true}"}]},
            ],
            "usage": {"input_tokens": 100, "output_tokens": 50,
                      "output_tokens_details": {"reasoning_tokens": 30}},
        });
        let r = extract_response(AdapterKind::ResponsesApi, &body).unwrap();
        assert_eq!(r.text, "{\"reachable\":true}");
        assert_eq!(r.tokens, TokenUsage { input: 100, thinking: 30, output: 20 });
        assert!(!r.truncated && !r.usage_missing);

        let body = json!({
            "content": [{"type": "thinking", "thinking": "..."}, {"type": "text", "text": "hi"}],
            "stop_reason": "max_tokens",
            "usage": {"input_tokens": 10, "output_tokens": 8192},
        });
        let r = extract_response(AdapterKind::MessagesApi, &body).unwrap();
        assert_eq!(r.text, "hi");
        assert!(r.truncated);

        let body = json!({
            "candidates": [{"content": {"parts": [{"text": "yo"}]}, "finishReason": "STOP"}],
            "usageMetadata": {"promptTokenCount": 5, "candidatesTokenCount": 7, "thoughtsTokenCount": 7861},
        });
        let r = extract_response(AdapterKind::GeminiRest, &body).unwrap();
        assert_eq!(r.tokens.thinking, 7861);

        let body = json!({
            "choices": [{"message": {"content": "x"}, "finish_reason": "stop"}],
            "usage": {"prompt_tokens": 1, "completion_tokens": 2},
        });
        let r = extract_response(AdapterKind::Dashscope, &body).unwrap();
        assert_eq!(r.tokens, TokenUsage { input: 1, thinking: 0, output: 2 });

        // Missing usage records zeros and sets the flag.
        let body = json!({
            "choices": [{"message": {"content": "x"}, "finish_reason": "stop"}],
        });
        let r = extract_response(AdapterKind::Dashscope, &body).unwrap();
        assert!(r.usage_missing);
        assert_eq!(r.tokens.total(), 0);
    }
}
