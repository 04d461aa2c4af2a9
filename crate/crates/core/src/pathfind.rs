//! Ground truth for a maze: reachability, shortest-path length, and the list
//! of accepted optimal paths, capped at 50.
//!
//! [`analyze`] is the production oracle: BFS distance labels from both
//! endpoints define the shortest-path DAG, and a depth-first walk over that
//! DAG (branching in U, D, L, R order) emits distinct optimal move sequences
//! until the cap. The cap truncates enumeration only — `shortest_len` is
//! always exact.
//!
//! [`brute_force_oracle`] is an intentionally different route used to check
//! `analyze`: flood-fill reachability plus iterative-deepening DFS over
//! simple paths. Both enumerate in the same lexicographic move order, so
//! their outputs must agree field for field.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CellKind, MazeGrid, Move, MovePath, Position};

/// Maximum number of optimal paths retained in an annotation.
pub const PATH_CAP: usize = 50;

/// Default cell budget for [`brute_force_oracle`] (7x7).
pub const DEFAULT_ORACLE_MAX_CELLS: usize = 49;

/// Ground truth for one maze.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub reachable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortest_len: Option<usize>,
    pub accepted_paths: Vec<MovePath>,
    pub optimal_count_truncated: bool,
}

impl Annotation {
    fn unreachable() -> Annotation {
        Annotation {
            reachable: false,
            shortest_len: None,
            accepted_paths: Vec::new(),
            optimal_count_truncated: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("grid has {cells} cells, oracle is limited to {max_cells}")]
    TooLarge { cells: usize, max_cells: usize },
}

/// BFS distance labels from `from` over open cells, expanding U, D, L, R.
pub(crate) fn bfs_distances(grid: &MazeGrid, from: Position) -> Vec<Option<u32>> {
    let mut dist = vec![None; grid.rows() * grid.cols()];
    if grid.cell(from) != CellKind::Open {
        return dist;
    }
    dist[grid.index_of(from)] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(from);
    while let Some(pos) = queue.pop_front() {
        let d = dist[grid.index_of(pos)].unwrap();
        for m in Move::ALL {
            let Ok(next) = grid.apply_move(pos, m) else { continue };
            if grid.cell(next) != CellKind::Open {
                continue;
            }
            let slot = &mut dist[grid.index_of(next)];
            if slot.is_none() {
                *slot = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Compute the full annotation for a grid.
pub fn analyze(grid: &MazeGrid) -> Annotation {
    let dist_start = bfs_distances(grid, grid.start());
    let Some(total) = dist_start[grid.index_of(grid.goal())] else {
        return Annotation::unreachable();
    };
    let dist_goal = bfs_distances(grid, grid.goal());

    // DFS over the shortest-path DAG: an edge pos -> next is optimal iff it
    // advances the start distance and still admits an optimal completion.
    let mut paths: Vec<MovePath> = Vec::new();
    let mut moves: Vec<Move> = Vec::new();
    let mut truncated = false;
    dag_walk(
        grid,
        &dist_start,
        &dist_goal,
        total,
        grid.start(),
        &mut moves,
        &mut paths,
        &mut truncated,
    );

    Annotation {
        reachable: true,
        shortest_len: Some(total as usize),
        accepted_paths: paths,
        optimal_count_truncated: truncated,
    }
}

#[allow(clippy::too_many_arguments)]
fn dag_walk(
    grid: &MazeGrid,
    dist_start: &[Option<u32>],
    dist_goal: &[Option<u32>],
    total: u32,
    pos: Position,
    moves: &mut Vec<Move>,
    paths: &mut Vec<MovePath>,
    truncated: &mut bool,
) {
    if *truncated {
        return;
    }
    if pos == grid.goal() {
        if paths.len() == PATH_CAP {
            *truncated = true;
        } else {
            paths.push(MovePath::new(moves.clone()));
        }
        return;
    }
    let here = dist_start[grid.index_of(pos)].unwrap();
    for m in Move::ALL {
        let Ok(next) = grid.apply_move(pos, m) else { continue };
        if grid.cell(next) != CellKind::Open {
            continue;
        }
        let ix = grid.index_of(next);
        if dist_start[ix] != Some(here + 1) {
            continue;
        }
        let Some(dg) = dist_goal[ix] else { continue };
        if here + 1 + dg != total {
            continue;
        }
        moves.push(m);
        dag_walk(grid, dist_start, dist_goal, total, next, moves, paths, truncated);
        moves.pop();
        if *truncated {
            return;
        }
    }
}

/// Exhaustive reference oracle for small grids. Identical contract to
/// [`analyze`], computed by flood fill plus bounded-depth DFS over simple
/// paths, with no reliance on BFS distance labels.
pub fn brute_force_oracle(grid: &MazeGrid, max_cells: usize) -> Result<Annotation, OracleError> {
    let cells = grid.rows() * grid.cols();
    if cells > max_cells {
        return Err(OracleError::TooLarge { cells, max_cells });
    }
    if !flood_reaches(grid) {
        return Ok(Annotation::unreachable());
    }

    let open_count = grid.cells().iter().filter(|c| c.passable()).count();
    let base = grid.start().manhattan(grid.goal());
    let mut limit = base;
    loop {
        // Simple paths never exceed open_count - 1 moves; reachability was
        // already established, so some limit below that bound must succeed.
        assert!(limit < open_count, "flood fill and depth-limited search disagree");
        let mut paths = Vec::new();
        let mut moves = Vec::new();
        let mut on_path = vec![false; cells];
        on_path[grid.index_of(grid.start())] = true;
        depth_limited(grid, limit, grid.start(), &mut on_path, &mut moves, &mut paths);
        if !paths.is_empty() {
            let truncated = paths.len() > PATH_CAP;
            paths.truncate(PATH_CAP);
            return Ok(Annotation {
                reachable: true,
                shortest_len: Some(limit),
                accepted_paths: paths,
                optimal_count_truncated: truncated,
            });
        }
        // Path length parity is fixed by the endpoints' Manhattan parity.
        limit += 2;
    }
}

/// Stack-based flood fill, deliberately not a BFS.
fn flood_reaches(grid: &MazeGrid) -> bool {
    let mut seen = vec![false; grid.rows() * grid.cols()];
    let mut stack = vec![grid.start()];
    seen[grid.index_of(grid.start())] = true;
    while let Some(pos) = stack.pop() {
        if pos == grid.goal() {
            return true;
        }
        for m in Move::ALL {
            let Ok(next) = grid.apply_move(pos, m) else { continue };
            let ix = grid.index_of(next);
            if !seen[ix] && grid.cell(next) == CellKind::Open {
                seen[ix] = true;
                stack.push(next);
            }
        }
    }
    false
}

fn depth_limited(
    grid: &MazeGrid,
    budget: usize,
    pos: Position,
    on_path: &mut Vec<bool>,
    moves: &mut Vec<Move>,
    paths: &mut Vec<MovePath>,
) {
    if pos == grid.goal() {
        if moves.len() == budget {
            paths.push(MovePath::new(moves.clone()));
        }
        return;
    }
    if moves.len() + pos.manhattan(grid.goal()) > budget {
        return;
    }
    for m in Move::ALL {
        let Ok(next) = grid.apply_move(pos, m) else { continue };
        let ix = grid.index_of(next);
        if on_path[ix] || grid.cell(next) != CellKind::Open {
            continue;
        }
        on_path[ix] = true;
        moves.push(m);
        depth_limited(grid, budget, next, on_path, moves, paths);
        moves.pop();
        on_path[ix] = false;
    }
}
