//! Evaluation harness: build prompts, carry maze images or text grids to
//! provider endpoints (or in-process reference solvers), manage retries and
//! rate limits, and record latency, token usage, and graded verdicts.

pub mod adapter;
pub mod error;
pub mod limiter;
pub mod local;
pub mod prompt;
pub mod provider;
pub mod run;

pub use adapter::{AdapterResponse, HttpAdapter, SolverAdapter};
pub use error::HarnessError;
pub use local::LocalAdapter;
pub use prompt::build_prompt;
pub use provider::{
    build_request, AdapterKind, LocalSolverKind, ProviderConfig, ProviderRequest, ReasoningEffort,
};
pub use run::{run_eval, solve_one, RunOptions, PARSE_ATTEMPTS};
