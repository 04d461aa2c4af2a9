//! Core of the maze benchmark toolkit: grid model, ground-truth pathfinding,
//! seeded procedural generation, pixel-art rendering, dataset assembly,
//! response grading, and run metrics.

pub mod grid;
pub mod pathfind;
pub mod dataset;
pub mod grade;
pub mod generate;
pub mod render;
pub mod report;
pub mod rng;

pub use dataset::{assemble_benchmark, default_benchmark_config, load_manifest, Manifest};
pub use generate::{generate, MazeInstance, MazeSpec};
pub use grade::{grade, parse_response, GradeMode, SolverResponse, Verdict};
pub use grid::{CellKind, FailureCause, GridError, MazeGrid, Move, MovePath, Position};
pub use pathfind::{analyze, brute_force_oracle, Annotation, PATH_CAP};
pub use render::{compute_layout, render_png, Palette, PaletteName};
pub use report::{compute_metrics, RunReport, TrialRecord};
