//! Shared test fixtures: an in-process HTTP server that speaks all four
//! provider wire formats with scripted behaviors, and a tiny benchmark on
//! disk for end-to-end runs.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Json, State};
use axum::http::{StatusCode, Uri};
use axum::response::IntoResponse;
use axum::routing::any;
use axum::Router;
use serde_json::{json, Value};

use mazeval_core::dataset::{
    assemble_benchmark, write_benchmark, GroupId, GroupSpec, Manifest,
};

#[derive(Clone)]
pub enum MockBehavior {
    /// Always answer with this model text.
    Valid(String),
    /// Respond with unparseable text for the first `failures` calls, then
    /// the given text.
    FailuresThenValid { failures: usize, text: String },
    /// Every response is unparseable prose.
    AlwaysInvalid,
    /// HTTP `status` for the first `failures` calls, then a valid answer.
    StatusThenValid { status: u16, failures: usize, text: String },
}

pub struct MockServer {
    pub base_url: String,
    state: Arc<MockState>,
}

struct MockState {
    behavior: MockBehavior,
    hits: AtomicUsize,
    // Scripted failures count per distinct request body, so every maze sees
    // the same failure sequence regardless of interleaving.
    per_request: Mutex<std::collections::HashMap<String, usize>>,
    captured: Mutex<Vec<(String, Value)>>,
}

impl MockServer {
    pub async fn start(behavior: MockBehavior) -> MockServer {
        let state = Arc::new(MockState {
            behavior,
            hits: AtomicUsize::new(0),
            per_request: Mutex::new(std::collections::HashMap::new()),
            captured: Mutex::new(Vec::new()),
        });
        let app = Router::new().fallback(any(handle)).with_state(Arc::clone(&state));
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr: SocketAddr = listener.local_addr().unwrap();
        tokio::spawn(async move {
            axum::serve(listener, app).await.unwrap();
        });
        MockServer { base_url: format!("http://{addr}"), state }
    }

    pub fn hits(&self) -> usize {
        self.state.hits.load(Ordering::SeqCst)
    }

    pub fn captured(&self) -> Vec<(String, Value)> {
        self.state.captured.lock().unwrap().clone()
    }
}

async fn handle(
    State(state): State<Arc<MockState>>,
    uri: Uri,
    Json(body): Json<Value>,
) -> impl IntoResponse {
    let path = uri.path().to_string();
    state.captured.lock().unwrap().push((path.clone(), body.clone()));
    state.hits.fetch_add(1, Ordering::SeqCst);
    let hit = {
        let mut per_request = state.per_request.lock().unwrap();
        let slot = per_request.entry(body.to_string()).or_insert(0);
        let hit = *slot;
        *slot += 1;
        hit
    };

    let text = match &state.behavior {
        MockBehavior::Valid(text) => text.clone(),
        MockBehavior::AlwaysInvalid => "I cannot answer in JSON, sorry.".to_string(),
        MockBehavior::FailuresThenValid { failures, text } => {
            if hit < *failures {
                "thinking out loud with no json at all".to_string()
            } else {
                text.clone()
            }
        }
        MockBehavior::StatusThenValid { status, failures, text } => {
            if hit < *failures {
                return (
                    StatusCode::from_u16(*status).unwrap(),
                    Json(json!({"error": "scripted failure"})),
                );
            }
            text.clone()
        }
    };
    (StatusCode::OK, Json(wire_response(&path, &text)))
}

/// Wrap `text` in the native response shape for the endpoint at `path`.
fn wire_response(path: &str, text: &str) -> Value {
    if path.ends_with("/v1/responses") {
        json!({
            "status": "completed",
            "output": [
                {"type": "message", "content": [{"type": "output_text", "text": text}]},
            ],
            "usage": {"input_tokens": 100, "output_tokens": 50,
                      "output_tokens_details": {"reasoning_tokens": 30}},
        })
    } else if path.ends_with("/v1/messages") {
        json!({
            "content": [{"type": "text", "text": text}],
            "stop_reason": "end_turn",
            "usage": {"input_tokens": 100, "output_tokens": 50},
        })
    } else if path.contains(":generateContent") {
        json!({
            "candidates": [{"content": {"parts": [{"text": text}]}, "finishReason": "STOP"}],
            "usageMetadata": {"promptTokenCount": 100, "candidatesTokenCount": 50,
                               "thoughtsTokenCount": 30},
        })
    } else {
        json!({
            "choices": [{"message": {"content": text}, "finish_reason": "stop"}],
            "usage": {"prompt_tokens": 100, "completion_tokens": 50},
        })
    }
}

/// A 3-maze benchmark written to `dir`: two reachable diagnostics and one
/// unreachable, images included.
pub fn write_tiny_benchmark(dir: &std::path::Path, master_seed: u64) -> Manifest {
    let config = vec![
        GroupSpec {
            group_id: GroupId::A,
            count: 2,
            sizes: vec![(5, 5), (6, 6)],
            densities: vec![0.0],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 0,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: true,
            shared_structures: None,
        },
        GroupSpec {
            group_id: GroupId::E,
            count: 1,
            sizes: vec![(6, 6)],
            densities: vec![0.2],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 1,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
    ];
    let bench = assemble_benchmark(&config, master_seed).unwrap();
    write_benchmark(&bench, dir).unwrap();
    bench.manifest
}
