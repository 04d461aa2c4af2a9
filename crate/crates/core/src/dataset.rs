//! Benchmark assembly: 110 mazes across nine groups with matched pairs,
//! palette stress, rejection-sampled ultra-hard entries, and a persisted
//! JSON manifest.
//!
//! Assembly is a pure function of `(config, master_seed)`. Entries that miss
//! their constraints (shortest-length range, straight-line diagnostics,
//! placeable traps) are regenerated with an incremented sub-seed up to a
//! bounded attempt count.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::generate::{generate, MazeInstance, MazeSpec};
use crate::grid::{CellKind, MazeGrid};
use crate::pathfind::{analyze, Annotation};
use crate::render::{render_png, PaletteName};
use crate::rng::derive_seed;

/// Rejection attempts allowed per entry before assembly fails.
pub const MAX_ATTEMPTS_PER_ENTRY: u64 = 10_000;

/// Benchmark group letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    X,
}

impl GroupId {
    pub const ALL: [GroupId; 9] = [
        GroupId::A,
        GroupId::B,
        GroupId::C,
        GroupId::D,
        GroupId::E,
        GroupId::F,
        GroupId::G,
        GroupId::H,
        GroupId::X,
    ];

    pub fn as_char(self) -> char {
        match self {
            GroupId::A => 'A',
            GroupId::B => 'B',
            GroupId::C => 'C',
            GroupId::D => 'D',
            GroupId::E => 'E',
            GroupId::F => 'F',
            GroupId::G => 'G',
            GroupId::H => 'H',
            GroupId::X => 'X',
        }
    }

    pub fn from_char(c: char) -> Option<GroupId> {
        GroupId::ALL.into_iter().find(|g| g.as_char() == c.to_ascii_uppercase())
    }

    fn ordinal(self) -> u64 {
        GroupId::ALL.iter().position(|g| *g == self).unwrap() as u64
    }
}

/// Which feature a matched pair ablates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairedOn {
    Traps,
    Border,
}

/// Parameter ranges and quotas for one benchmark group. Per-entry values are
/// taken from the range vectors cyclically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group_id: GroupId,
    pub count: usize,
    pub sizes: Vec<(usize, usize)>,
    pub densities: Vec<f64>,
    pub trap_counts: Vec<usize>,
    pub border_walls: bool,
    pub unreachable_quota: usize,
    /// Explicit positions of unreachable entries; defaults to an even spread.
    #[serde(default)]
    pub unreachable_indices: Option<Vec<usize>>,
    pub pairing: Option<PairedOn>,
    /// Accepted shortest-length range for reachable entries.
    pub len_range: (usize, usize),
    /// Diagnostic constraint: endpoints share a row/column with a clear corridor.
    #[serde(default)]
    pub straight_line: bool,
    /// Palette-stress: this many base structures cycled through all palettes.
    #[serde(default)]
    pub shared_structures: Option<usize>,
}

impl GroupSpec {
    fn unreachable_set(&self) -> BTreeSet<usize> {
        if let Some(ixs) = &self.unreachable_indices {
            return ixs.iter().copied().collect();
        }
        // Evenly spread quota across the group.
        (0..self.unreachable_quota)
            .map(|j| (2 * j + 1) * self.count / (2 * self.unreachable_quota.max(1)))
            .collect()
    }
}

/// The default 110-maze benchmark: groups A-H (100-maze core set) plus the
/// ultra-hard group X. The core set carries 28 unreachable entries
/// (B=4, C=4, E=14, G=6) and X carries 3.
pub fn default_benchmark_config() -> Vec<GroupSpec> {
    vec![
        // A: diagnostic. Empty or near-empty grids with straight-line paths.
        GroupSpec {
            group_id: GroupId::A,
            count: 8,
            sizes: vec![(5, 5), (6, 6), (7, 7), (8, 8), (9, 9), (10, 10), (11, 11), (12, 12)],
            densities: vec![0.0, 0.0, 0.0, 0.0, 0.05, 0.05, 0.05, 0.05],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 0,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: true,
            shared_structures: None,
        },
        // B: grid scale at constant 25% density, 5x5 through 13x13.
        GroupSpec {
            group_id: GroupId::B,
            count: 15,
            sizes: vec![
                (5, 5),
                (5, 5),
                (5, 5),
                (7, 7),
                (7, 7),
                (7, 7),
                (9, 9),
                (9, 9),
                (9, 9),
                (11, 11),
                (11, 11),
                (11, 11),
                (13, 13),
                (13, 13),
                (13, 13),
            ],
            densities: vec![0.25],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 4,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // C: wall density sweep on a constant 9x9 grid.
        GroupSpec {
            group_id: GroupId::C,
            count: 15,
            sizes: vec![(9, 9)],
            densities: vec![0.0, 0.05, 0.15, 0.25, 0.35, 0.45],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 4,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // D: six trap-ablation pairs sharing a seed.
        GroupSpec {
            group_id: GroupId::D,
            count: 12,
            sizes: vec![(7, 7), (8, 8), (9, 9), (10, 10), (11, 11), (12, 12)],
            densities: vec![0.2, 0.25, 0.3],
            trap_counts: vec![3, 4, 5, 6, 4, 5],
            border_walls: false,
            unreachable_quota: 0,
            unreachable_indices: None,
            pairing: Some(PairedOn::Traps),
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // E: all unreachable, 5x5 through 13x13.
        GroupSpec {
            group_id: GroupId::E,
            count: 14,
            sizes: vec![
                (5, 5),
                (6, 6),
                (7, 7),
                (8, 8),
                (9, 9),
                (10, 10),
                (11, 11),
                (12, 12),
                (13, 13),
            ],
            densities: vec![0.15, 0.25, 0.35],
            trap_counts: vec![0],
            border_walls: false,
            unreachable_quota: 14,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // F: five border-wall pairs sharing a seed.
        GroupSpec {
            group_id: GroupId::F,
            count: 10,
            sizes: vec![(7, 7), (8, 8), (9, 9), (10, 10), (11, 11)],
            densities: vec![0.2, 0.25],
            trap_counts: vec![0],
            border_walls: true,
            unreachable_quota: 0,
            unreachable_indices: None,
            pairing: Some(PairedOn::Border),
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // G: combined hard — larger grids, high density, traps, borders.
        GroupSpec {
            group_id: GroupId::G,
            count: 16,
            sizes: vec![(9, 9), (10, 10), (11, 11), (12, 12), (13, 13)],
            densities: vec![0.35, 0.4, 0.45],
            trap_counts: vec![2, 3, 4, 5, 6],
            border_walls: true,
            unreachable_quota: 6,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: None,
        },
        // H: palette stress — 3 structures cycled through the 4 palettes.
        GroupSpec {
            group_id: GroupId::H,
            count: 10,
            sizes: vec![(9, 9), (10, 10), (11, 11)],
            densities: vec![0.25],
            trap_counts: vec![2],
            border_walls: false,
            unreachable_quota: 0,
            unreachable_indices: None,
            pairing: None,
            len_range: (4, 42),
            straight_line: false,
            shared_structures: Some(3),
        },
        // X: ultra-hard 20x20 with heavy traps and long paths.
        GroupSpec {
            group_id: GroupId::X,
            count: 10,
            sizes: vec![(20, 20)],
            densities: vec![0.35, 0.40, 0.45, 0.50, 0.55],
            trap_counts: vec![8, 10, 12, 15, 18, 20, 22, 25],
            border_walls: false,
            unreachable_quota: 3,
            unreachable_indices: Some(vec![3, 6, 9]),
            pairing: None,
            len_range: (28, 42),
            straight_line: false,
            shared_structures: None,
        },
    ]
}

/// One manifest entry: the spec, text grid, image path, and ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub maze_id: String,
    pub group_id: GroupId,
    pub spec: MazeSpec,
    pub image_path: String,
    pub text_grid: String,
    pub annotation: Annotation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_id: Option<String>,
}

impl ManifestEntry {
    /// Reconstruct the grid from the stored text, with the border flag taken
    /// from the spec.
    pub fn grid(&self) -> Result<MazeGrid, DatasetError> {
        let parsed = MazeGrid::parse_text_grid(&self.text_grid)
            .map_err(|e| DatasetError::ManifestCorrupt(format!("{}: {e}", self.maze_id)))?;
        if parsed.rows() != self.spec.rows || parsed.cols() != self.spec.cols {
            return Err(DatasetError::ManifestCorrupt(format!(
                "{}: text grid is {}x{}, spec says {}x{}",
                self.maze_id,
                parsed.rows(),
                parsed.cols(),
                self.spec.rows,
                self.spec.cols
            )));
        }
        parsed
            .with_border_flag(self.spec.border_walls)
            .map_err(|e| DatasetError::ManifestCorrupt(format!("{}: {e}", self.maze_id)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub master_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn entry(&self, maze_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.maze_id == maze_id)
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("manifest serializes");
        hex(&Sha256::digest(&bytes))
    }
}

/// A fully assembled benchmark: manifest plus rendered images keyed by maze id.
#[derive(Debug, Clone)]
pub struct AssembledBenchmark {
    pub manifest: Manifest,
    pub images: BTreeMap<String, Vec<u8>>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("group {group}: entry {index} unsatisfied after {attempts} attempts")]
    AssemblyFailed { group: char, index: usize, attempts: u64 },
    #[error("invalid group config: {0}")]
    BadConfig(String),
    #[error("manifest corrupt: {0}")]
    ManifestCorrupt(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn cycle<T: Copy>(xs: &[T], i: usize) -> T {
    xs[i % xs.len()]
}

/// Generate every instance of the configured benchmark, deterministically
/// from `master_seed`, rendering each maze to PNG.
pub fn assemble_benchmark(
    config: &[GroupSpec],
    master_seed: u64,
) -> Result<AssembledBenchmark, DatasetError> {
    let mut entries = Vec::new();
    let mut images = BTreeMap::new();
    let mut next_number = 1usize;

    // Manifest entries are ordered by group regardless of config order.
    let mut groups: Vec<&GroupSpec> = config.iter().collect();
    groups.sort_by_key(|g| g.group_id);
    if groups.windows(2).any(|w| w[0].group_id == w[1].group_id) {
        return Err(DatasetError::BadConfig("duplicate group id".into()));
    }

    for group in groups {
        validate_group(group)?;
        let instances = assemble_group(group, master_seed)?;
        for (instance, pair_id) in instances {
            let maze_id = format!("gen_maze_{next_number:03}");
            next_number += 1;
            let png = render_png(
                &instance.grid,
                &instance.spec.palette.palette(),
                instance.spec.seed,
            );
            images.insert(maze_id.clone(), png);
            entries.push(ManifestEntry {
                maze_id: maze_id.clone(),
                group_id: group.group_id,
                image_path: format!("images/{maze_id}.png"),
                text_grid: instance.grid.export_text_grid(),
                annotation: instance.annotation,
                spec: instance.spec,
                pair_id,
            });
        }
    }

    Ok(AssembledBenchmark {
        manifest: Manifest { version: 1, master_seed, entries },
        images,
    })
}

fn validate_group(group: &GroupSpec) -> Result<(), DatasetError> {
    if group.count == 0 {
        return Err(DatasetError::BadConfig(format!("group {}: empty", group.group_id.as_char())));
    }
    if group.sizes.is_empty() || group.densities.is_empty() || group.trap_counts.is_empty() {
        return Err(DatasetError::BadConfig(format!(
            "group {}: empty parameter range",
            group.group_id.as_char()
        )));
    }
    if group.unreachable_set().len() != group.unreachable_quota
        || group.unreachable_set().iter().any(|&i| i >= group.count)
    {
        return Err(DatasetError::BadConfig(format!(
            "group {}: unreachable quota/indices mismatch",
            group.group_id.as_char()
        )));
    }
    if group.pairing.is_some() && !group.count.is_multiple_of(2) {
        return Err(DatasetError::BadConfig(format!(
            "group {}: paired groups need an even count",
            group.group_id.as_char()
        )));
    }
    Ok(())
}

type GroupInstances = Vec<(MazeInstance, Option<String>)>;

fn assemble_group(group: &GroupSpec, master_seed: u64) -> Result<GroupInstances, DatasetError> {
    match group.pairing {
        Some(PairedOn::Traps) => assemble_trap_pairs(group, master_seed),
        Some(PairedOn::Border) => assemble_border_pairs(group, master_seed),
        None if group.shared_structures.is_some() => assemble_palette_stress(group, master_seed),
        None => assemble_plain(group, master_seed),
    }
}

fn assemble_plain(group: &GroupSpec, master_seed: u64) -> Result<GroupInstances, DatasetError> {
    let unreachable = group.unreachable_set();
    let mut out = Vec::with_capacity(group.count);
    for index in 0..group.count {
        let reachable_target = !unreachable.contains(&index);
        let (rows, cols) = cycle(&group.sizes, index);
        let spec_base = MazeSpec {
            rows,
            cols,
            wall_density: cycle(&group.densities, index),
            trap_count: cycle(&group.trap_counts, index),
            border_walls: group.border_walls,
            reachable_target,
            palette: cycle(&PaletteName::ALL, index),
            seed: 0,
        };
        let instance = reject_sample(group, index, |attempt| {
            let spec = MazeSpec {
                seed: entry_seed(master_seed, group.group_id, index as u64, attempt),
                ..spec_base.clone()
            };
            let instance = generate(&spec).ok()?;
            entry_ok(group, &instance).then_some(instance)
        })?;
        out.push((instance, None));
    }
    Ok(out)
}

fn assemble_trap_pairs(group: &GroupSpec, master_seed: u64) -> Result<GroupInstances, DatasetError> {
    let pairs = group.count / 2;
    let mut out = Vec::with_capacity(group.count);
    for pair in 0..pairs {
        let (rows, cols) = cycle(&group.sizes, pair);
        let control_base = MazeSpec {
            rows,
            cols,
            wall_density: cycle(&group.densities, pair),
            trap_count: 0,
            border_walls: group.border_walls,
            reachable_target: true,
            palette: cycle(&PaletteName::ALL, pair),
            seed: 0,
        };
        let traps = cycle(&group.trap_counts, pair);
        let (control, treatment) = reject_sample(group, pair, |attempt| {
            let seed = entry_seed(master_seed, group.group_id, pair as u64, attempt);
            let control_spec = MazeSpec { seed, ..control_base.clone() };
            let treatment_spec = MazeSpec { trap_count: traps, ..control_spec.clone() };
            let control = generate(&control_spec).ok()?;
            let treatment = generate(&treatment_spec).ok()?;
            (entry_ok(group, &control) && entry_ok(group, &treatment))
                .then_some((control, treatment))
        })?;
        let pair_id = format!("D-pair-{}", pair + 1);
        out.push((control, Some(pair_id.clone())));
        out.push((treatment, Some(pair_id)));
    }
    Ok(out)
}

/// Border pairs: the bordered treatment is generated, and the control is the
/// same grid with the ring cleared, so the pair differs in exactly the ring
/// cells.
fn assemble_border_pairs(
    group: &GroupSpec,
    master_seed: u64,
) -> Result<GroupInstances, DatasetError> {
    let pairs = group.count / 2;
    let mut out = Vec::with_capacity(group.count);
    for pair in 0..pairs {
        let (rows, cols) = cycle(&group.sizes, pair);
        let treatment_base = MazeSpec {
            rows,
            cols,
            wall_density: cycle(&group.densities, pair),
            trap_count: cycle(&group.trap_counts, pair),
            border_walls: true,
            reachable_target: true,
            palette: cycle(&PaletteName::ALL, pair),
            seed: 0,
        };
        let (control, treatment) = reject_sample(group, pair, |attempt| {
            let seed = entry_seed(master_seed, group.group_id, pair as u64, attempt);
            let treatment_spec = MazeSpec { seed, ..treatment_base.clone() };
            let treatment = generate(&treatment_spec).ok()?;
            let control = clear_ring(&treatment).ok()?;
            (entry_ok(group, &treatment) && entry_ok(group, &control))
                .then_some((control, treatment))
        })?;
        let pair_id = format!("F-pair-{}", pair + 1);
        out.push((control, Some(pair_id.clone())));
        out.push((treatment, Some(pair_id)));
    }
    Ok(out)
}

fn clear_ring(treatment: &MazeInstance) -> Result<MazeInstance, DatasetError> {
    let grid = &treatment.grid;
    let mut cells = grid.cells().to_vec();
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            if r == 0 || c == 0 || r == grid.rows() - 1 || c == grid.cols() - 1 {
                cells[r * grid.cols() + c] = CellKind::Open;
            }
        }
    }
    let control_grid = MazeGrid::new(grid.rows(), grid.cols(), cells, grid.start(), grid.goal(), false)
        .map_err(|e| DatasetError::ManifestCorrupt(e.to_string()))?;
    let annotation = analyze(&control_grid);
    Ok(MazeInstance {
        id: treatment.id.clone(),
        spec: MazeSpec { border_walls: false, ..treatment.spec.clone() },
        grid: control_grid,
        annotation,
        achieved_wall_count: treatment.achieved_wall_count,
    })
}

fn assemble_palette_stress(
    group: &GroupSpec,
    master_seed: u64,
) -> Result<GroupInstances, DatasetError> {
    let structures = group.shared_structures.unwrap();
    let mut out = Vec::with_capacity(group.count);
    for index in 0..group.count {
        let structure = index / PaletteName::ALL.len();
        let palette = PaletteName::ALL[index % PaletteName::ALL.len()];
        if structure >= structures {
            return Err(DatasetError::BadConfig(format!(
                "group {}: count {} exceeds {structures} structures x 4 palettes",
                group.group_id.as_char(),
                group.count
            )));
        }
        let (rows, cols) = cycle(&group.sizes, structure);
        let base = MazeSpec {
            rows,
            cols,
            wall_density: cycle(&group.densities, structure),
            trap_count: cycle(&group.trap_counts, structure),
            border_walls: group.border_walls,
            reachable_target: true,
            palette,
            seed: 0,
        };
        // Same structure index -> same seed search, so all four palette
        // variants share one grid.
        let instance = reject_sample(group, structure, |attempt| {
            let spec = MazeSpec {
                seed: entry_seed(master_seed, group.group_id, structure as u64, attempt),
                ..base.clone()
            };
            let instance = generate(&spec).ok()?;
            entry_ok(group, &instance).then_some(instance)
        })?;
        out.push((instance, None));
    }
    Ok(out)
}

fn reject_sample<T>(
    group: &GroupSpec,
    index: usize,
    mut try_once: impl FnMut(u64) -> Option<T>,
) -> Result<T, DatasetError> {
    for attempt in 0..MAX_ATTEMPTS_PER_ENTRY {
        if let Some(v) = try_once(attempt) {
            return Ok(v);
        }
    }
    Err(DatasetError::AssemblyFailed {
        group: group.group_id.as_char(),
        index,
        attempts: MAX_ATTEMPTS_PER_ENTRY,
    })
}

fn entry_ok(group: &GroupSpec, instance: &MazeInstance) -> bool {
    if instance.annotation.reachable != instance.spec.reachable_target {
        return false;
    }
    if let Some(len) = instance.annotation.shortest_len {
        if len < group.len_range.0 || len > group.len_range.1 {
            return false;
        }
        if group.straight_line {
            let (s, g) = (instance.grid.start(), instance.grid.goal());
            let aligned = s.row == g.row || s.col == g.col;
            if !aligned || len != s.manhattan(g) {
                return false;
            }
        }
    }
    true
}

fn entry_seed(master_seed: u64, group: GroupId, index: u64, attempt: u64) -> u64 {
    derive_seed(master_seed, "entry", &[group.ordinal(), index, attempt])
}

/// Write manifest, images, and an image checksum list under `dir`.
pub fn write_benchmark(benchmark: &AssembledBenchmark, dir: &Path) -> Result<(), DatasetError> {
    std::fs::create_dir_all(dir.join("images"))?;
    write_manifest(&benchmark.manifest, &dir.join("manifest.json"))?;
    let mut checksums = String::new();
    for (maze_id, png) in &benchmark.images {
        let name = format!("{maze_id}.png");
        std::fs::write(dir.join("images").join(&name), png)?;
        checksums.push_str(&format!("{}  {}\n", hex(&Sha256::digest(png)), name));
    }
    let mut f = std::fs::File::create(dir.join("images").join("checksums.sha256"))?;
    f.write_all(checksums.as_bytes())?;
    Ok(())
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<(), DatasetError> {
    let mut json = serde_json::to_string_pretty(manifest)?;
    json.push('\n');
    std::fs::write(path, json)?;
    Ok(())
}

/// Load a manifest and revalidate every entry: ids well-formed, unique, and
/// ordered; every annotation re-derived from its stored text grid.
pub fn load_manifest(path: &Path) -> Result<Manifest, DatasetError> {
    let bytes = std::fs::read(path)?;
    let manifest: Manifest = serde_json::from_slice(&bytes)?;
    if manifest.version != 1 {
        return Err(DatasetError::ManifestCorrupt(format!(
            "unsupported version {}",
            manifest.version
        )));
    }
    let mut seen = BTreeSet::new();
    let mut last_key = None;
    for entry in &manifest.entries {
        if entry.maze_id.len() != 12
            || !entry.maze_id.starts_with("gen_maze_")
            || !entry.maze_id[9..].chars().all(|c| c.is_ascii_digit())
        {
            return Err(DatasetError::ManifestCorrupt(format!(
                "bad maze id {:?}",
                entry.maze_id
            )));
        }
        if !seen.insert(entry.maze_id.clone()) {
            return Err(DatasetError::ManifestCorrupt(format!(
                "duplicate maze id {}",
                entry.maze_id
            )));
        }
        let key = (entry.group_id, entry.maze_id.clone());
        if let Some(prev) = &last_key {
            if *prev > key {
                return Err(DatasetError::ManifestCorrupt(
                    "entries not ordered by group then id".into(),
                ));
            }
        }
        last_key = Some(key);

        let grid = entry.grid()?;
        let fresh = analyze(&grid);
        if fresh != entry.annotation {
            return Err(DatasetError::ManifestCorrupt(format!(
                "{}: stored annotation does not revalidate",
                entry.maze_id
            )));
        }
    }
    Ok(manifest)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
