//! Canonical maze grid: cell matrix, movement semantics, path simulation, and
//! the `S G . # T` text encoding.
//!
//! Coordinates are row-major with the origin at the top-left; `U` decreases
//! the row. Start and goal are stored as positions overlaying `Open` cells,
//! so the cell matrix itself only ever holds `Open`/`Wall`/`Trap` and
//! passability checks stay uniform. All values are immutable after
//! construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// What occupies a cell. Walls and traps are both impassable; `Open` is the
/// only passable kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Open,
    Wall,
    Trap,
}

impl CellKind {
    pub fn passable(self) -> bool {
        matches!(self, CellKind::Open)
    }
}

/// A cell coordinate: `row` counts down from the top, `col` right from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }

    pub fn manhattan(self, other: Position) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

/// A single move. Serializes as the one-letter strings `"U"`, `"D"`, `"L"`, `"R"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    #[serde(rename = "U")]
    Up,
    #[serde(rename = "D")]
    Down,
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Move {
    /// Fixed expansion/enumeration order used everywhere: U, D, L, R.
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn letter(self) -> char {
        match self {
            Move::Up => 'U',
            Move::Down => 'D',
            Move::Left => 'L',
            Move::Right => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Move> {
        match c {
            'U' => Some(Move::Up),
            'D' => Some(Move::Down),
            'L' => Some(Move::Left),
            'R' => Some(Move::Right),
            _ => None,
        }
    }

    pub fn opposite(self) -> Move {
        match self {
            Move::Up => Move::Down,
            Move::Down => Move::Up,
            Move::Left => Move::Right,
            Move::Right => Move::Left,
        }
    }

    /// Row/col deltas for this move.
    fn delta(self) -> (isize, isize) {
        match self {
            Move::Up => (-1, 0),
            Move::Down => (1, 0),
            Move::Left => (0, -1),
            Move::Right => (0, 1),
        }
    }
}

/// An ordered move sequence. Serializes as an array of single-letter strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MovePath(pub Vec<Move>);

impl MovePath {
    pub fn new(moves: Vec<Move>) -> Self {
        MovePath(moves)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn moves(&self) -> &[Move] {
        &self.0
    }

    /// Parse a compact letter string such as `"RRDD"`.
    pub fn from_letters(s: &str) -> Option<MovePath> {
        s.chars().map(Move::from_letter).collect::<Option<Vec<_>>>().map(MovePath)
    }
}

impl std::fmt::Display for MovePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for m in &self.0 {
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("move leaves the grid")]
    OutOfBounds,
    #[error("grid dimensions {0}x{1} are invalid")]
    BadDimensions(usize, usize),
    #[error("cell buffer length does not match dimensions")]
    BadCellCount,
    #[error("{0} position is out of bounds")]
    EndpointOutOfBounds(&'static str),
    #[error("start and goal must differ")]
    EndpointsEqual,
    #[error("{0} must sit on an open cell")]
    EndpointNotOpen(&'static str),
    #[error("border_walls is set but the outer ring is not all walls")]
    BorderRingNotWalls,
    #[error("malformed text grid: {0}")]
    MalformedGrid(String),
}

/// The canonical maze: a `rows x cols` matrix of cells plus start/goal overlay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MazeGrid {
    rows: usize,
    cols: usize,
    cells: Vec<CellKind>,
    start: Position,
    goal: Position,
    border_walls: bool,
}

impl MazeGrid {
    /// Build a grid, validating the start/goal and border invariants.
    pub fn new(
        rows: usize,
        cols: usize,
        cells: Vec<CellKind>,
        start: Position,
        goal: Position,
        border_walls: bool,
    ) -> Result<MazeGrid, GridError> {
        if rows < 2 || cols < 2 {
            return Err(GridError::BadDimensions(rows, cols));
        }
        if cells.len() != rows * cols {
            return Err(GridError::BadCellCount);
        }
        if start.row >= rows || start.col >= cols {
            return Err(GridError::EndpointOutOfBounds("start"));
        }
        if goal.row >= rows || goal.col >= cols {
            return Err(GridError::EndpointOutOfBounds("goal"));
        }
        if start == goal {
            return Err(GridError::EndpointsEqual);
        }
        let grid = MazeGrid { rows, cols, cells, start, goal, border_walls };
        if grid.cell(start) != CellKind::Open {
            return Err(GridError::EndpointNotOpen("start"));
        }
        if grid.cell(goal) != CellKind::Open {
            return Err(GridError::EndpointNotOpen("goal"));
        }
        if border_walls && !grid.ring_is_all_walls() {
            return Err(GridError::BorderRingNotWalls);
        }
        Ok(grid)
    }

    /// An all-open grid, handy for tests and diagnostics.
    pub fn open(rows: usize, cols: usize, start: Position, goal: Position) -> Result<MazeGrid, GridError> {
        MazeGrid::new(rows, cols, vec![CellKind::Open; rows * cols], start, goal, false)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn start(&self) -> Position {
        self.start
    }

    pub fn goal(&self) -> Position {
        self.goal
    }

    pub fn border_walls(&self) -> bool {
        self.border_walls
    }

    pub fn cell(&self, pos: Position) -> CellKind {
        self.cells[pos.row * self.cols + pos.col]
    }

    pub fn cells(&self) -> &[CellKind] {
        &self.cells
    }

    pub fn in_bounds(&self, pos: Position) -> bool {
        pos.row < self.rows && pos.col < self.cols
    }

    pub fn index_of(&self, pos: Position) -> usize {
        pos.row * self.cols + pos.col
    }

    pub fn position_of(&self, index: usize) -> Position {
        Position::new(index / self.cols, index % self.cols)
    }

    /// Whether `pos` lies on the outermost ring of cells.
    pub fn on_ring(&self, pos: Position) -> bool {
        pos.row == 0 || pos.col == 0 || pos.row == self.rows - 1 || pos.col == self.cols - 1
    }

    pub fn ring_is_all_walls(&self) -> bool {
        if self.rows < 3 || self.cols < 3 {
            return false;
        }
        (0..self.rows).all(|r| {
            (0..self.cols).all(|c| {
                let p = Position::new(r, c);
                !self.on_ring(p) || self.cell(p) == CellKind::Wall
            })
        })
    }

    /// The adjacent position in direction `m`, or `OutOfBounds` if it leaves the grid.
    pub fn apply_move(&self, pos: Position, m: Move) -> Result<Position, GridError> {
        let (dr, dc) = m.delta();
        let row = pos.row.checked_add_signed(dr).ok_or(GridError::OutOfBounds)?;
        let col = pos.col.checked_add_signed(dc).ok_or(GridError::OutOfBounds)?;
        let next = Position::new(row, col);
        if !self.in_bounds(next) {
            return Err(GridError::OutOfBounds);
        }
        Ok(next)
    }

    /// Walk `path` from the start. Succeeds iff every visited cell is open and
    /// in bounds and the final cell is the goal. Failures carry the offending
    /// move index (for `EndedOffGoal`, the path length).
    pub fn simulate_path(&self, path: &MovePath) -> SimulationResult {
        let mut pos = self.start;
        for (index, &m) in path.moves().iter().enumerate() {
            let next = match self.apply_move(pos, m) {
                Ok(p) => p,
                Err(_) => return SimulationResult::failed(index, FailureCause::OutOfBounds),
            };
            match self.cell(next) {
                CellKind::Wall => return SimulationResult::failed(index, FailureCause::HitWall),
                CellKind::Trap => return SimulationResult::failed(index, FailureCause::HitTrap),
                CellKind::Open => pos = next,
            }
        }
        if pos == self.goal {
            SimulationResult { reaches_goal: true, steps_taken: path.len(), failure: None }
        } else {
            SimulationResult::failed(path.len(), FailureCause::EndedOffGoal)
        }
    }

    /// One line per row: `S`=start, `G`=goal, `.`=open, `#`=wall, `T`=trap.
    /// Rows are newline-separated with no trailing whitespace or newline.
    pub fn export_text_grid(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            if r > 0 {
                out.push('\n');
            }
            for c in 0..self.cols {
                let p = Position::new(r, c);
                let ch = if p == self.start {
                    'S'
                } else if p == self.goal {
                    'G'
                } else {
                    match self.cell(p) {
                        CellKind::Open => '.',
                        CellKind::Wall => '#',
                        CellKind::Trap => 'T',
                    }
                };
                out.push(ch);
            }
        }
        out
    }

    /// Inverse of [`export_text_grid`]. `border_walls` is inferred from the
    /// outer ring, so export∘parse is the identity on grids whose flag agrees
    /// with their ring (always true for generated mazes).
    ///
    /// [`export_text_grid`]: MazeGrid::export_text_grid
    pub fn parse_text_grid(text: &str) -> Result<MazeGrid, GridError> {
        let lines: Vec<&str> = text.lines().collect();
        let rows = lines.len();
        if rows == 0 {
            return Err(GridError::MalformedGrid("empty input".into()));
        }
        let cols = lines[0].chars().count();
        if cols == 0 {
            return Err(GridError::MalformedGrid("empty first row".into()));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        let mut start = None;
        let mut goal = None;
        for (r, line) in lines.iter().enumerate() {
            let row_chars: Vec<char> = line.chars().collect();
            if row_chars.len() != cols {
                return Err(GridError::MalformedGrid(format!(
                    "ragged rows: row {} has {} cells, expected {}",
                    r,
                    row_chars.len(),
                    cols
                )));
            }
            for (c, ch) in row_chars.into_iter().enumerate() {
                let kind = match ch {
                    '.' => CellKind::Open,
                    '#' => CellKind::Wall,
                    'T' => CellKind::Trap,
                    'S' => {
                        if start.replace(Position::new(r, c)).is_some() {
                            return Err(GridError::MalformedGrid("duplicate S".into()));
                        }
                        CellKind::Open
                    }
                    'G' => {
                        if goal.replace(Position::new(r, c)).is_some() {
                            return Err(GridError::MalformedGrid("duplicate G".into()));
                        }
                        CellKind::Open
                    }
                    other => {
                        return Err(GridError::MalformedGrid(format!("unknown symbol {other:?}")))
                    }
                };
                cells.push(kind);
            }
        }
        let start = start.ok_or_else(|| GridError::MalformedGrid("missing S".into()))?;
        let goal = goal.ok_or_else(|| GridError::MalformedGrid("missing G".into()))?;
        let probe = MazeGrid { rows, cols, cells, start, goal, border_walls: false };
        let border = probe.ring_is_all_walls();
        MazeGrid::new(rows, cols, probe.cells, start, goal, border)
    }

    /// A copy with one cell replaced. Validates the result.
    pub fn with_cell(&self, pos: Position, kind: CellKind) -> Result<MazeGrid, GridError> {
        let mut cells = self.cells.clone();
        cells[self.index_of(pos)] = kind;
        MazeGrid::new(self.rows, self.cols, cells, self.start, self.goal, self.border_walls)
    }

    /// A copy with `border_walls` re-flagged (used when reconstructing grids
    /// whose flag is recorded out-of-band).
    pub fn with_border_flag(&self, border_walls: bool) -> Result<MazeGrid, GridError> {
        MazeGrid::new(self.rows, self.cols, self.cells.clone(), self.start, self.goal, border_walls)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureCause {
    OutOfBounds,
    HitWall,
    HitTrap,
    EndedOffGoal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFailure {
    pub index: usize,
    pub cause: FailureCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub reaches_goal: bool,
    pub steps_taken: usize,
    pub failure: Option<PathFailure>,
}

impl SimulationResult {
    fn failed(index: usize, cause: FailureCause) -> SimulationResult {
        SimulationResult {
            reaches_goal: false,
            steps_taken: index,
            failure: Some(PathFailure { index, cause }),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::random_grid;
    use super::*;
    use crate::rng::substream;
    use rand::Rng;

    fn grid_3x3(walls: &[(usize, usize)], traps: &[(usize, usize)]) -> MazeGrid {
        let mut cells = vec![CellKind::Open; 9];
        for &(r, c) in walls {
            cells[r * 3 + c] = CellKind::Wall;
        }
        for &(r, c) in traps {
            cells[r * 3 + c] = CellKind::Trap;
        }
        MazeGrid::new(3, 3, cells, Position::new(0, 0), Position::new(0, 2), false).unwrap()
    }

    #[test]
    fn apply_move_directions() {
        let g = MazeGrid::open(5, 5, Position::new(0, 0), Position::new(4, 4)).unwrap();
        assert_eq!(g.apply_move(Position::new(3, 2), Move::Up), Ok(Position::new(2, 2)));
        assert_eq!(g.apply_move(Position::new(2, 2), Move::Right), Ok(Position::new(2, 3)));
        assert_eq!(g.apply_move(Position::new(0, 0), Move::Up), Err(GridError::OutOfBounds));
        assert_eq!(g.apply_move(Position::new(4, 4), Move::Down), Err(GridError::OutOfBounds));
        assert_eq!(g.apply_move(Position::new(0, 0), Move::Left), Err(GridError::OutOfBounds));
    }

    #[test]
    fn apply_move_round_trips_with_opposite() {
        let g = MazeGrid::open(7, 9, Position::new(0, 0), Position::new(6, 8)).unwrap();
        for r in 0..7 {
            for c in 0..9 {
                let p = Position::new(r, c);
                for m in Move::ALL {
                    if let Ok(next) = g.apply_move(p, m) {
                        assert_eq!(g.apply_move(next, m.opposite()), Ok(p));
                    }
                }
            }
        }
    }

    #[test]
    fn simulate_success_and_failures() {
        let g = grid_3x3(&[], &[]);
        let ok = g.simulate_path(&MovePath::from_letters("RR").unwrap());
        assert!(ok.reaches_goal);
        assert_eq!(ok.steps_taken, 2);
        assert_eq!(ok.failure, None);

        let oob = g.simulate_path(&MovePath::from_letters("RRR").unwrap());
        assert!(!oob.reaches_goal);
        assert_eq!(oob.failure, Some(PathFailure { index: 2, cause: FailureCause::OutOfBounds }));

        let trapped = grid_3x3(&[], &[(0, 1)]);
        let hit = trapped.simulate_path(&MovePath::from_letters("RR").unwrap());
        assert_eq!(hit.failure, Some(PathFailure { index: 0, cause: FailureCause::HitTrap }));

        let walled = grid_3x3(&[(0, 1)], &[]);
        let hit = walled.simulate_path(&MovePath::from_letters("RR").unwrap());
        assert_eq!(hit.failure, Some(PathFailure { index: 0, cause: FailureCause::HitWall }));

        let short = g.simulate_path(&MovePath::from_letters("R").unwrap());
        assert_eq!(short.failure, Some(PathFailure { index: 1, cause: FailureCause::EndedOffGoal }));
    }

    #[test]
    fn simulate_never_succeeds_off_goal() {
        // Fuzz: random paths on random grids; success implies goal reached.
        let mut rng = substream(99, "simulate-fuzz");
        for _ in 0..500 {
            let g = random_grid(&mut rng);
            let len = rng.random_range(0..20);
            let path = MovePath::new(
                (0..len).map(|_| Move::ALL[rng.random_range(0..4)]).collect(),
            );
            let sim = g.simulate_path(&path);
            if sim.reaches_goal {
                let mut pos = g.start();
                for &m in path.moves() {
                    pos = g.apply_move(pos, m).unwrap();
                    assert!(g.cell(pos).passable());
                }
                assert_eq!(pos, g.goal());
            } else {
                assert!(sim.failure.is_some());
            }
        }
    }

    #[test]
    fn text_grid_spec_examples() {
        let g = grid_3x3(&[(1, 1)], &[]);
        assert_eq!(g.export_text_grid(), "S.G\n.#.\n...");

        let with_trap = grid_3x3(&[(1, 1)], &[(2, 0)]);
        let text = with_trap.export_text_grid();
        assert!(text.lines().nth(2).unwrap().starts_with('T'));

        let parsed = MazeGrid::parse_text_grid("S.G\n.#.\n...").unwrap();
        assert_eq!(parsed, g);

        assert!(matches!(
            MazeGrid::parse_text_grid("S.\n.."),
            Err(GridError::MalformedGrid(_))
        ));
        assert!(matches!(
            MazeGrid::parse_text_grid("S.G\n.#"),
            Err(GridError::MalformedGrid(_))
        ));
        assert!(matches!(
            MazeGrid::parse_text_grid("S.G\n.X.\n..."),
            Err(GridError::MalformedGrid(_))
        ));
        assert!(matches!(
            MazeGrid::parse_text_grid("S.S\n...\n..G"),
            Err(GridError::MalformedGrid(_))
        ));
    }

    #[test]
    fn text_grid_round_trip_fuzz() {
        let mut rng = substream(7, "grid-roundtrip");
        for _ in 0..1000 {
            let g = random_grid(&mut rng);
            let parsed = MazeGrid::parse_text_grid(&g.export_text_grid()).unwrap();
            assert_eq!(parsed, g);
        }
    }

    #[test]
    fn border_flag_requires_walled_ring() {
        let mut cells = vec![CellKind::Wall; 25];
        for r in 1..4 {
            for c in 1..4 {
                cells[r * 5 + c] = CellKind::Open;
            }
        }
        let g = MazeGrid::new(5, 5, cells.clone(), Position::new(1, 1), Position::new(3, 3), true);
        assert!(g.is_ok());

        cells[0] = CellKind::Open;
        let bad = MazeGrid::new(5, 5, cells, Position::new(1, 1), Position::new(3, 3), true);
        assert_eq!(bad.unwrap_err(), GridError::BorderRingNotWalls);
    }
}
