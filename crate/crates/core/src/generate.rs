//! Seeded procedural maze generation.
//!
//! Generation is a pure function of the spec (including its seed). Each
//! randomized stage draws from its own labeled substream — `"endpoints"`,
//! `"walls"`, `"traps"`, `"unreachable"` — so two specs that differ only in
//! trap count produce identical wall layouts, which is what matched-pair
//! groups rely on.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CellKind, GridError, MazeGrid, Move, Position};
use crate::pathfind::{analyze, bfs_distances, Annotation};
use crate::render::PaletteName;
use crate::rng::substream;

pub const MIN_DIM: usize = 5;
pub const MAX_DIM: usize = 20;
pub const MAX_WALL_DENSITY: f64 = 0.55;

/// Generation parameters for one maze.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MazeSpec {
    pub rows: usize,
    pub cols: usize,
    pub wall_density: f64,
    pub trap_count: usize,
    pub border_walls: bool,
    pub reachable_target: bool,
    pub palette: PaletteName,
    pub seed: u64,
}

impl MazeSpec {
    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.rows < MIN_DIM || self.rows > MAX_DIM || self.cols < MIN_DIM || self.cols > MAX_DIM
        {
            return Err(GenerateError::InvalidSpec(format!(
                "grid size {}x{} outside [{MIN_DIM},{MAX_DIM}]",
                self.rows, self.cols
            )));
        }
        if !(0.0..=MAX_WALL_DENSITY).contains(&self.wall_density) {
            return Err(GenerateError::InvalidSpec(format!(
                "wall density {} outside [0,{MAX_WALL_DENSITY}]",
                self.wall_density
            )));
        }
        Ok(())
    }

    /// Minimum Manhattan distance between endpoints: floor((rows+cols)/3).
    pub fn min_endpoint_distance(&self) -> usize {
        (self.rows + self.cols) / 3
    }
}

/// A generated maze with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MazeInstance {
    pub id: String,
    pub spec: MazeSpec,
    pub grid: MazeGrid,
    pub annotation: Annotation,
    /// Walls placed by the density stage (border ring and sealing walls excluded).
    pub achieved_wall_count: usize,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("no endpoint pair satisfies the distance bound")]
    PlacementImpossible,
    #[error("goal cannot be sealed without converting an endpoint")]
    CannotSeal,
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Place start and goal on opposite edges (left/right or top/bottom, chosen
/// by `rng`) at Manhattan distance >= floor((rows+cols)/3). With border
/// walls the endpoints sit one cell in, aligned with their edge.
pub fn place_endpoints(
    spec: &MazeSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(Position, Position), GenerateError> {
    spec.validate()?;
    let required = spec.min_endpoint_distance();
    let inset = usize::from(spec.border_walls);
    let horizontal = rng.random_bool(0.5);

    let pairs = endpoint_pairs(spec, horizontal, inset, required);
    let pairs = if pairs.is_empty() {
        endpoint_pairs(spec, !horizontal, inset, required)
    } else {
        pairs
    };
    if pairs.is_empty() {
        return Err(GenerateError::PlacementImpossible);
    }
    let (a, b) = pairs[rng.random_range(0..pairs.len())];
    Ok(if rng.random_bool(0.5) { (a, b) } else { (b, a) })
}

fn endpoint_pairs(
    spec: &MazeSpec,
    horizontal: bool,
    inset: usize,
    required: usize,
) -> Vec<(Position, Position)> {
    let (along_max, low, high) = if horizontal {
        (spec.rows, inset, spec.cols - 1 - inset)
    } else {
        (spec.cols, inset, spec.rows - 1 - inset)
    };
    let mut pairs = Vec::new();
    for i in inset..along_max - inset {
        for j in inset..along_max - inset {
            let (a, b) = if horizontal {
                (Position::new(i, low), Position::new(j, high))
            } else {
                (Position::new(low, i), Position::new(high, j))
            };
            if a.manhattan(b) >= required {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Generate a maze instance. Deterministic in `spec.seed`.
pub fn generate(spec: &MazeSpec) -> Result<MazeInstance, GenerateError> {
    spec.validate()?;
    let mut endpoint_rng = substream(spec.seed, "endpoints");
    let (start, goal) = place_endpoints(spec, &mut endpoint_rng)?;

    let mut work = WorkGrid::new(spec, start, goal);

    // Walls: visit candidates in shuffled order, reverting any placement that
    // breaks reachability when the maze must stay solvable.
    let mut candidates = work.wall_candidates();
    candidates.shuffle(&mut substream(spec.seed, "walls"));
    let target_walls = (spec.wall_density * candidates.len() as f64).round() as usize;
    let mut placed = 0usize;
    for &ix in &candidates {
        if placed == target_walls {
            break;
        }
        work.cells[ix] = CellKind::Wall;
        if spec.reachable_target && !work.reachable() {
            work.cells[ix] = CellKind::Open;
        } else {
            placed += 1;
        }
    }

    // Traps: same scheme, from an independent stream so the wall layout is
    // invariant to the trap count.
    let mut trap_candidates = work.open_candidates();
    trap_candidates.shuffle(&mut substream(spec.seed, "traps"));
    let mut traps = 0usize;
    for &ix in &trap_candidates {
        if traps == spec.trap_count {
            break;
        }
        work.cells[ix] = CellKind::Trap;
        if spec.reachable_target && !work.reachable() {
            work.cells[ix] = CellKind::Open;
        } else {
            traps += 1;
        }
    }
    if traps < spec.trap_count {
        return Err(GenerateError::GenerationFailed(format!(
            "placed {traps}/{} traps before exhausting candidates",
            spec.trap_count
        )));
    }

    let mut grid = MazeGrid::new(spec.rows, spec.cols, work.cells, start, goal, spec.border_walls)?;
    if !spec.reachable_target {
        let mut seal_rng = substream(spec.seed, "unreachable");
        grid = derive_unreachable(&grid, &mut seal_rng)?;
    }

    let annotation = analyze(&grid);
    if annotation.reachable != spec.reachable_target {
        return Err(GenerateError::GenerationFailed(
            "reachability target not met after generation".into(),
        ));
    }

    Ok(MazeInstance {
        id: format!("maze_{:016x}", spec.seed),
        spec: spec.clone(),
        grid,
        annotation,
        achieved_wall_count: placed,
    })
}

/// Make a grid unreachable by walling off a BFS distance layer around the
/// goal, preferring layers with the fewest cells adjacent to the start.
/// Already-unreachable grids are returned unchanged; only Open cells are
/// ever converted to Wall.
pub fn derive_unreachable(grid: &MazeGrid, rng: &mut ChaCha8Rng) -> Result<MazeGrid, GenerateError> {
    let dist = bfs_distances(grid, grid.goal());
    let Some(start_dist) = dist[grid.index_of(grid.start())] else {
        return Ok(grid.clone());
    };
    if start_dist <= 1 {
        return Err(GenerateError::CannotSeal);
    }

    // Every open cell at BFS distance exactly k from the goal (k < start
    // distance) is a separating layer. Consider small k and pick the layer
    // least crowded around the start.
    let k_max = (start_dist - 1).min(3);
    let mut best: Vec<u32> = Vec::new();
    let mut best_score = usize::MAX;
    for k in 1..=k_max {
        let layer: Vec<usize> = (0..dist.len()).filter(|&ix| dist[ix] == Some(k)).collect();
        let score = layer
            .iter()
            .filter(|&&ix| grid.position_of(ix).manhattan(grid.start()) <= 1)
            .count();
        if score < best_score {
            best_score = score;
            best.clear();
            best.push(k);
        } else if score == best_score {
            best.push(k);
        }
    }
    let k = best[rng.random_range(0..best.len())];

    let mut cells = grid.cells().to_vec();
    for ix in 0..cells.len() {
        if dist[ix] == Some(k) {
            debug_assert!(cells[ix] == CellKind::Open);
            cells[ix] = CellKind::Wall;
        }
    }
    let sealed = MazeGrid::new(
        grid.rows(),
        grid.cols(),
        cells,
        grid.start(),
        grid.goal(),
        grid.border_walls(),
    )?;
    debug_assert!(!analyze(&sealed).reachable);
    Ok(sealed)
}

/// Mutable working state for the placement loops.
struct WorkGrid {
    rows: usize,
    cols: usize,
    cells: Vec<CellKind>,
    start: Position,
    goal: Position,
    border_walls: bool,
}

impl WorkGrid {
    fn new(spec: &MazeSpec, start: Position, goal: Position) -> WorkGrid {
        let mut cells = vec![CellKind::Open; spec.rows * spec.cols];
        if spec.border_walls {
            for r in 0..spec.rows {
                for c in 0..spec.cols {
                    if r == 0 || c == 0 || r == spec.rows - 1 || c == spec.cols - 1 {
                        cells[r * spec.cols + c] = CellKind::Wall;
                    }
                }
            }
        }
        WorkGrid {
            rows: spec.rows,
            cols: spec.cols,
            cells,
            start,
            goal,
            border_walls: spec.border_walls,
        }
    }

    fn index(&self, pos: Position) -> usize {
        pos.row * self.cols + pos.col
    }

    fn on_ring(&self, ix: usize) -> bool {
        let (r, c) = (ix / self.cols, ix % self.cols);
        r == 0 || c == 0 || r == self.rows - 1 || c == self.cols - 1
    }

    /// All cells excluding start, goal, and (with borders) the ring, in
    /// row-major order.
    fn wall_candidates(&self) -> Vec<usize> {
        let (s, g) = (self.index(self.start), self.index(self.goal));
        (0..self.cells.len())
            .filter(|&ix| ix != s && ix != g && !(self.border_walls && self.on_ring(ix)))
            .collect()
    }

    /// Open cells excluding start and goal, in row-major order.
    fn open_candidates(&self) -> Vec<usize> {
        let (s, g) = (self.index(self.start), self.index(self.goal));
        (0..self.cells.len())
            .filter(|&ix| ix != s && ix != g && self.cells[ix] == CellKind::Open)
            .collect()
    }

    /// BFS reachability start -> goal over open cells.
    fn reachable(&self) -> bool {
        let mut seen = vec![false; self.cells.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[self.index(self.start)] = true;
        queue.push_back(self.start);
        while let Some(pos) = queue.pop_front() {
            if pos == self.goal {
                return true;
            }
            for m in Move::ALL {
                let (dr, dc) = match m {
                    Move::Up => (-1isize, 0isize),
                    Move::Down => (1, 0),
                    Move::Left => (0, -1),
                    Move::Right => (0, 1),
                };
                let Some(r) = pos.row.checked_add_signed(dr) else { continue };
                let Some(c) = pos.col.checked_add_signed(dc) else { continue };
                if r >= self.rows || c >= self.cols {
                    continue;
                }
                let next = Position::new(r, c);
                let ix = self.index(next);
                if !seen[ix] && self.cells[ix] == CellKind::Open {
                    seen[ix] = true;
                    queue.push_back(next);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathfind::brute_force_oracle;

    fn spec(rows: usize, cols: usize, seed: u64) -> MazeSpec {
        MazeSpec {
            rows,
            cols,
            wall_density: 0.0,
            trap_count: 0,
            border_walls: false,
            reachable_target: true,
            palette: PaletteName::Forest,
            seed,
        }
    }

    #[test]
    fn endpoint_distance_bounds() {
        assert_eq!(spec(5, 5, 0).min_endpoint_distance(), 3);
        assert_eq!(spec(20, 20, 0).min_endpoint_distance(), 13);
    }

    #[test]
    fn endpoints_respect_edges_and_distance() {
        let s = spec(9, 9, 42);
        let mut rng = substream(42, "endpoints");
        for _ in 0..1000 {
            let (a, b) = place_endpoints(&s, &mut rng).unwrap();
            assert!(a.manhattan(b) >= 6);
            let horizontal = a.col == 0 && b.col == 8 || a.col == 8 && b.col == 0;
            let vertical = a.row == 0 && b.row == 8 || a.row == 8 && b.row == 0;
            assert!(horizontal || vertical, "not on opposite edges: {a:?} {b:?}");
        }
    }

    #[test]
    fn bordered_endpoints_sit_inside_the_ring() {
        let s = MazeSpec { border_walls: true, ..spec(9, 9, 7) };
        let mut rng = substream(7, "endpoints");
        for _ in 0..200 {
            let (a, b) = place_endpoints(&s, &mut rng).unwrap();
            for p in [a, b] {
                assert!(p.row >= 1 && p.row <= 7 && p.col >= 1 && p.col <= 7);
            }
            assert!(a.col == 1 || a.col == 7 || a.row == 1 || a.row == 7);
            assert!(a.manhattan(b) >= 6);
        }
    }

    #[test]
    fn empty_grid_shortest_is_manhattan() {
        for seed in 0..20 {
            let inst = generate(&spec(9, 9, seed)).unwrap();
            assert_eq!(inst.achieved_wall_count, 0);
            assert!(inst.annotation.reachable);
            assert_eq!(
                inst.annotation.shortest_len,
                Some(inst.grid.start().manhattan(inst.grid.goal()))
            );
        }
    }

    #[test]
    fn dense_grids_stay_reachable_and_within_budget() {
        for seed in 0..30 {
            let s = MazeSpec { wall_density: 0.45, ..spec(7, 7, seed) };
            let inst = generate(&s).unwrap();
            assert!(inst.annotation.reachable);
            let candidates = 7 * 7 - 2;
            let budget = (0.45 * candidates as f64).round() as usize;
            assert!(inst.achieved_wall_count <= budget);
            // Cross-check with the independent oracle.
            let oracle = brute_force_oracle(&inst.grid, 49).unwrap();
            assert!(oracle.reachable);
            assert_eq!(oracle.shortest_len, inst.annotation.shortest_len);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = MazeSpec { wall_density: 0.3, trap_count: 3, ..spec(11, 9, 1234) };
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn trap_count_is_independent_of_wall_layout() {
        let control = MazeSpec { wall_density: 0.3, trap_count: 0, ..spec(9, 9, 99) };
        let treatment = MazeSpec { trap_count: 4, ..control.clone() };
        let a = generate(&control).unwrap();
        let b = generate(&treatment).unwrap();
        assert_eq!(a.grid.start(), b.grid.start());
        assert_eq!(a.grid.goal(), b.grid.goal());
        let mut trap_cells = 0;
        for ix in 0..a.grid.cells().len() {
            let (ca, cb) = (a.grid.cells()[ix], b.grid.cells()[ix]);
            if ca != cb {
                assert_eq!(ca, CellKind::Open);
                assert_eq!(cb, CellKind::Trap);
                trap_cells += 1;
            }
        }
        assert_eq!(trap_cells, 4);
    }

    #[test]
    fn traps_never_touch_endpoints_and_match_count() {
        for seed in 0..20 {
            let s = MazeSpec { wall_density: 0.25, trap_count: 5, ..spec(9, 9, seed) };
            let inst = generate(&s).unwrap();
            let traps = inst
                .grid
                .cells()
                .iter()
                .filter(|c| **c == CellKind::Trap)
                .count();
            assert_eq!(traps, 5);
            assert_eq!(inst.grid.cell(inst.grid.start()), CellKind::Open);
            assert_eq!(inst.grid.cell(inst.grid.goal()), CellKind::Open);
        }
    }

    #[test]
    fn unreachable_target_is_honored() {
        for seed in 0..20 {
            let s = MazeSpec {
                wall_density: 0.2,
                reachable_target: false,
                ..spec(7, 7, seed)
            };
            let inst = generate(&s).unwrap();
            assert!(!inst.annotation.reachable);
            assert!(!brute_force_oracle(&inst.grid, 49).unwrap().reachable);
        }
    }

    #[test]
    fn derive_unreachable_properties() {
        let mut rng = substream(5, "derive-test");
        // All-open 5x5 becomes unreachable.
        let open = MazeGrid::open(5, 5, Position::new(0, 0), Position::new(4, 4)).unwrap();
        let sealed = derive_unreachable(&open, &mut rng).unwrap();
        assert!(!brute_force_oracle(&sealed, 49).unwrap().reachable);

        // Idempotent on already-unreachable grids.
        let again = derive_unreachable(&sealed, &mut rng).unwrap();
        assert_eq!(again, sealed);

        // Only Open -> Wall conversions.
        for ix in 0..open.cells().len() {
            let (before, after) = (open.cells()[ix], sealed.cells()[ix]);
            if before != after {
                assert_eq!(before, CellKind::Open);
                assert_eq!(after, CellKind::Wall);
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            generate(&spec(4, 9, 0)),
            Err(GenerateError::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&MazeSpec { wall_density: 0.6, ..spec(9, 9, 0) }),
            Err(GenerateError::InvalidSpec(_))
        ));
    }
}
