//! In-process reference solvers, behind the same adapter interface as remote
//! providers so the whole pipeline runs offline.
//!
//! - `oracle`: answers from the entry's annotation; solves everything.
//! - `naive`: always claims reachable and emits the unchecked L-shaped path
//!   (vertical leg then horizontal leg). Its reachability accuracy equals
//!   the manifest's reachable fraction by construction.
//! - `random-walk`: a seeded random move sequence; the sanity floor.
//!
//! Responses are deterministic (latency 0.0, token counts derived from
//! payload sizes), so parallel runs persist byte-identical reports.

use async_trait::async_trait;
use rand::Rng;
use serde_json::json;

use mazeval_core::grid::{MazeGrid, Move};
use mazeval_core::report::TokenUsage;
use mazeval_core::rng::substream;

use crate::adapter::{AdapterResponse, SolverAdapter};
use crate::error::HarnessError;
use crate::provider::{LocalRequestSpec, LocalSolverKind, ProviderRequest};

pub struct LocalAdapter;

#[async_trait]
impl SolverAdapter for LocalAdapter {
    async fn send(&self, request: &ProviderRequest) -> Result<AdapterResponse, HarnessError> {
        let spec = match request {
            ProviderRequest::Local(spec) => spec,
            ProviderRequest::Http(_) => {
                return Err(HarnessError::InvalidConfig(
                    "local adapter received an http request".into(),
                ))
            }
        };
        let text = answer(spec)?;
        Ok(AdapterResponse {
            tokens: TokenUsage {
                input: (spec.prompt.len() / 4) as u64,
                thinking: 0,
                output: (text.len() / 4) as u64,
            },
            usage_missing: false,
            truncated: false,
            latency_s: 0.0,
            text,
        })
    }
}

fn answer(spec: &LocalRequestSpec) -> Result<String, HarnessError> {
    let grid = MazeGrid::parse_text_grid(&spec.text_grid)
        .map_err(|e| HarnessError::BadPayload(format!("{}: {e}", spec.maze_id)))?;
    let (rows, cols) = (grid.rows(), grid.cols());

    let body = match spec.solver {
        LocalSolverKind::Oracle => {
            let ann = &spec.annotation;
            let path = ann.accepted_paths.first().cloned().unwrap_or_default();
            json!({
                "grid_size": [rows, cols],
                "start_found": true,
                "goal_found": true,
                "reachable": ann.reachable,
                "path_length": ann.shortest_len,
                "path": path,
            })
        }
        LocalSolverKind::Naive => {
            let path = l_shaped_path(&grid);
            json!({
                "grid_size": [rows, cols],
                "start_found": true,
                "goal_found": true,
                "reachable": true,
                "path_length": path.len(),
                "path": path.iter().map(|m| m.letter().to_string()).collect::<Vec<_>>(),
            })
        }
        LocalSolverKind::RandomWalk => {
            let mut rng = substream(0x5eed, &format!("random-walk:{}", spec.maze_id));
            let len = rng.random_range(1..=2 * (rows + cols));
            let path: Vec<String> = (0..len)
                .map(|_| Move::ALL[rng.random_range(0..4)].letter().to_string())
                .collect();
            json!({
                "grid_size": [rows, cols],
                "start_found": true,
                "goal_found": true,
                "reachable": true,
                "path_length": path.len(),
                "path": path,
            })
        }
    };
    Ok(serde_json::to_string(&body).expect("local answer serializes"))
}

/// Vertical leg then horizontal leg from start to goal, ignoring all cells.
fn l_shaped_path(grid: &MazeGrid) -> Vec<Move> {
    let (s, g) = (grid.start(), grid.goal());
    let mut path = Vec::new();
    let vertical = if g.row >= s.row { Move::Down } else { Move::Up };
    for _ in 0..s.row.abs_diff(g.row) {
        path.push(vertical);
    }
    let horizontal = if g.col >= s.col { Move::Right } else { Move::Left };
    for _ in 0..s.col.abs_diff(g.col) {
        path.push(horizontal);
    }
    path
}
