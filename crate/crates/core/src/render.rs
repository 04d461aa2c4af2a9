//! Deterministic pixel-art rendering of mazes to 1024x1024 RGB PNGs.
//!
//! Tiles are drawn on a 16x16 "art pixel" lattice scaled to the tile size:
//! speckled floor, bricked walls, spike traps, a player sprite on the start
//! cell and a treasure chest on the goal. Per-tile texture jitter draws from
//! a substream keyed by (seed, palette, row, col), so editing one cell
//! changes only that tile. PNG encoding uses fixed parameters, making output
//! byte-identical across runs and machines.
//!
//! [`readback_grid`] recovers the cell classification from a render by
//! sampling each tile's center region; it doubles as the decoding oracle in
//! tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{CellKind, GridError, MazeGrid, Position};
use crate::rng::substream_with;
use rand::Rng;

/// Output image side length in pixels.
pub const IMAGE_SIZE: usize = 1024;

/// Art pixels per tile side.
const ART: usize = 16;

pub type Rgb = [u8; 3];

/// The four visual styles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaletteName {
    Forest,
    Desert,
    Dungeon,
    Meadow,
}

impl PaletteName {
    pub const ALL: [PaletteName; 4] =
        [PaletteName::Forest, PaletteName::Desert, PaletteName::Dungeon, PaletteName::Meadow];

    pub fn as_str(self) -> &'static str {
        match self {
            PaletteName::Forest => "forest",
            PaletteName::Desert => "desert",
            PaletteName::Dungeon => "dungeon",
            PaletteName::Meadow => "meadow",
        }
    }

    pub fn palette(self) -> Palette {
        match self {
            PaletteName::Forest => Palette {
                name: self,
                background: [34, 44, 30],
                floor_base: [88, 140, 66],
                floor_alt: [78, 128, 58],
                floor_speck: [60, 104, 46],
                wall_face: [104, 112, 96],
                wall_mortar: [64, 70, 58],
                wall_highlight: [128, 136, 118],
                trap_base: [40, 34, 30],
                trap_spike: [204, 62, 40],
                sprite_seed: 0xF0_0001,
            },
            PaletteName::Desert => Palette {
                name: self,
                background: [158, 126, 84],
                floor_base: [212, 186, 134],
                floor_alt: [200, 172, 118],
                floor_speck: [176, 148, 96],
                wall_face: [156, 102, 58],
                wall_mortar: [112, 70, 38],
                wall_highlight: [180, 126, 78],
                trap_base: [70, 40, 26],
                trap_spike: [168, 34, 30],
                sprite_seed: 0xD0_0002,
            },
            PaletteName::Dungeon => Palette {
                name: self,
                background: [18, 18, 26],
                floor_base: [84, 84, 96],
                floor_alt: [74, 74, 86],
                floor_speck: [60, 60, 72],
                wall_face: [46, 46, 60],
                wall_mortar: [24, 24, 34],
                wall_highlight: [70, 70, 88],
                trap_base: [30, 26, 24],
                trap_spike: [222, 120, 32],
                sprite_seed: 0xC0_0003,
            },
            PaletteName::Meadow => Palette {
                name: self,
                background: [96, 150, 70],
                floor_base: [140, 192, 88],
                floor_alt: [128, 180, 78],
                floor_speck: [108, 160, 62],
                wall_face: [58, 104, 48],
                wall_mortar: [38, 74, 32],
                wall_highlight: [80, 128, 64],
                trap_base: [48, 34, 52],
                trap_spike: [154, 44, 166],
                sprite_seed: 0xA0_0004,
            },
        }
    }
}

/// Color ramps and sprite seed for one visual style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub name: PaletteName,
    pub background: Rgb,
    pub floor_base: Rgb,
    pub floor_alt: Rgb,
    pub floor_speck: Rgb,
    pub wall_face: Rgb,
    pub wall_mortar: Rgb,
    pub wall_highlight: Rgb,
    pub trap_base: Rgb,
    pub trap_spike: Rgb,
    pub sprite_seed: u64,
}

// Palette-independent sprite key colors.
const PLAYER_BODY: Rgb = [40, 90, 200];
const PLAYER_SKIN: Rgb = [236, 188, 140];
const PLAYER_DARK: Rgb = [30, 40, 70];
const CHEST_WOOD: Rgb = [122, 76, 40];
const CHEST_DARK: Rgb = [84, 50, 26];
const CHEST_GOLD: Rgb = [235, 195, 50];

/// Tile size and centering margins for a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub tile_px: usize,
    pub offset_x: usize,
    pub offset_y: usize,
}

/// tile_px = floor(1024 / max(rows, cols)), grid centered with symmetric margins.
pub fn compute_layout(rows: usize, cols: usize) -> Layout {
    let tile_px = IMAGE_SIZE / rows.max(cols);
    Layout {
        tile_px,
        offset_x: (IMAGE_SIZE - tile_px * cols) / 2,
        offset_y: (IMAGE_SIZE - tile_px * rows) / 2,
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("png decode failed: {0}")]
    Decode(String),
    #[error("image is {0}x{1}, expected {IMAGE_SIZE}x{IMAGE_SIZE} RGB")]
    BadImage(u32, u32),
    #[error("tile ({0},{1}) does not match any known tile class")]
    UnclassifiableTile(usize, usize),
    #[error("expected exactly one start and one goal tile")]
    BadOverlays,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Render a maze as 1024x1024 RGB PNG bytes. Deterministic in
/// `(grid, palette, seed)`.
pub fn render_png(grid: &MazeGrid, palette: &Palette, seed: u64) -> Vec<u8> {
    let layout = compute_layout(grid.rows(), grid.cols());
    let mut canvas = Canvas::new(palette.background);

    for row in 0..grid.rows() {
        for col in 0..grid.cols() {
            let pos = Position::new(row, col);
            let mut rng = substream_with(
                seed,
                "tile",
                &[palette.sprite_seed, row as u64, col as u64],
            );
            let tile = TileRect::of(&layout, row, col);
            match grid.cell(pos) {
                CellKind::Open => draw_floor(&mut canvas, tile, palette, &mut rng),
                CellKind::Wall => draw_wall(&mut canvas, tile, palette, &mut rng),
                CellKind::Trap => draw_trap(&mut canvas, tile, palette, &mut rng),
            }
            if pos == grid.start() {
                draw_player(&mut canvas, tile);
            } else if pos == grid.goal() {
                draw_treasure(&mut canvas, tile);
            }
        }
    }

    canvas.encode_png()
}

/// Recover the grid from a render by sampling tile centers against the
/// palette's tile classes. Inverse of [`render_png`] up to texture jitter.
pub fn readback_grid(
    png_bytes: &[u8],
    rows: usize,
    cols: usize,
    palette: &Palette,
) -> Result<MazeGrid, RenderError> {
    let decoder = png::Decoder::new(std::io::Cursor::new(png_bytes));
    let mut reader = decoder.read_info().map_err(|e| RenderError::Decode(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(|e| RenderError::Decode(e.to_string()))?;
    if info.width as usize != IMAGE_SIZE
        || info.height as usize != IMAGE_SIZE
        || info.color_type != png::ColorType::Rgb
    {
        return Err(RenderError::BadImage(info.width, info.height));
    }

    let layout = compute_layout(rows, cols);
    let mut cells = Vec::with_capacity(rows * cols);
    let mut start = None;
    let mut goal = None;
    for row in 0..rows {
        for col in 0..cols {
            let tile = TileRect::of(&layout, row, col);
            let sample = tile.center_mean(&buf);
            let classes: [(Rgb, TileClass); 5] = [
                (palette.floor_base, TileClass::Floor),
                (palette.wall_face, TileClass::Wall),
                (palette.trap_spike, TileClass::Trap),
                (PLAYER_BODY, TileClass::Start),
                (CHEST_GOLD, TileClass::Goal),
            ];
            let (_, class) = classes
                .iter()
                .map(|&(color, class)| (color_distance(sample, color), class))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .ok_or(RenderError::UnclassifiableTile(row, col))?;
            match class {
                TileClass::Floor => cells.push(CellKind::Open),
                TileClass::Wall => cells.push(CellKind::Wall),
                TileClass::Trap => cells.push(CellKind::Trap),
                TileClass::Start => {
                    cells.push(CellKind::Open);
                    if start.replace(Position::new(row, col)).is_some() {
                        return Err(RenderError::BadOverlays);
                    }
                }
                TileClass::Goal => {
                    cells.push(CellKind::Open);
                    if goal.replace(Position::new(row, col)).is_some() {
                        return Err(RenderError::BadOverlays);
                    }
                }
            }
        }
    }
    let start = start.ok_or(RenderError::BadOverlays)?;
    let goal = goal.ok_or(RenderError::BadOverlays)?;
    let probe = MazeGrid::new(rows, cols, cells, start, goal, false)?;
    let border = probe.ring_is_all_walls();
    Ok(probe.with_border_flag(border)?)
}

#[derive(Clone, Copy)]
enum TileClass {
    Floor,
    Wall,
    Trap,
    Start,
    Goal,
}

fn color_distance(a: Rgb, b: Rgb) -> f64 {
    let dr = a[0] as f64 - b[0] as f64;
    let dg = a[1] as f64 - b[1] as f64;
    let db = a[2] as f64 - b[2] as f64;
    dr * dr + dg * dg + db * db
}

struct Canvas {
    px: Vec<u8>,
}

impl Canvas {
    fn new(background: Rgb) -> Canvas {
        let mut px = Vec::with_capacity(IMAGE_SIZE * IMAGE_SIZE * 3);
        for _ in 0..IMAGE_SIZE * IMAGE_SIZE {
            px.extend_from_slice(&background);
        }
        Canvas { px }
    }

    fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, color: Rgb) {
        for y in y0..y1.min(IMAGE_SIZE) {
            for x in x0..x1.min(IMAGE_SIZE) {
                let ix = (y * IMAGE_SIZE + x) * 3;
                self.px[ix..ix + 3].copy_from_slice(&color);
            }
        }
    }

    fn encode_png(&self) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut encoder =
                png::Encoder::new(&mut out, IMAGE_SIZE as u32, IMAGE_SIZE as u32);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            // Fixed parameters: no ancillary chunks, fixed filter, so goldens
            // are byte-stable.
            encoder.set_compression(png::Compression::Balanced);
            encoder.set_filter(png::Filter::Sub);
            let mut writer = encoder.write_header().expect("in-memory png header");
            writer.write_image_data(&self.px).expect("in-memory png data");
        }
        out
    }
}

/// Pixel rectangle of one tile, with art-pixel addressing.
#[derive(Clone, Copy)]
struct TileRect {
    x0: usize,
    y0: usize,
    size: usize,
}

impl TileRect {
    fn of(layout: &Layout, row: usize, col: usize) -> TileRect {
        TileRect {
            x0: layout.offset_x + col * layout.tile_px,
            y0: layout.offset_y + row * layout.tile_px,
            size: layout.tile_px,
        }
    }

    /// Fill art pixel (ax, ay) on the 16x16 lattice.
    fn art(&self, canvas: &mut Canvas, ax: usize, ay: usize, color: Rgb) {
        let x0 = self.x0 + ax * self.size / ART;
        let x1 = self.x0 + (ax + 1) * self.size / ART;
        let y0 = self.y0 + ay * self.size / ART;
        let y1 = self.y0 + (ay + 1) * self.size / ART;
        canvas.fill_rect(x0, y0, x1, y1, color);
    }

    fn art_rect(&self, canvas: &mut Canvas, ax0: usize, ay0: usize, ax1: usize, ay1: usize, color: Rgb) {
        for ay in ay0..ay1 {
            for ax in ax0..ax1 {
                self.art(canvas, ax, ay, color);
            }
        }
    }

    /// Mean color of the center 4x4 art-pixel block.
    fn center_mean(&self, buf: &[u8]) -> Rgb {
        let x0 = self.x0 + 6 * self.size / ART;
        let x1 = self.x0 + 10 * self.size / ART;
        let y0 = self.y0 + 6 * self.size / ART;
        let y1 = self.y0 + 10 * self.size / ART;
        let (mut r, mut g, mut b, mut n) = (0u64, 0u64, 0u64, 0u64);
        for y in y0..y1 {
            for x in x0..x1 {
                let ix = (y * IMAGE_SIZE + x) * 3;
                r += buf[ix] as u64;
                g += buf[ix + 1] as u64;
                b += buf[ix + 2] as u64;
                n += 1;
            }
        }
        if n == 0 {
            return [0, 0, 0];
        }
        [(r / n) as u8, (g / n) as u8, (b / n) as u8]
    }
}

fn jitter(color: Rgb, rng: &mut rand_chacha::ChaCha8Rng, amount: i16) -> Rgb {
    let d = rng.random_range(-amount..=amount);
    let mut out = color;
    for ch in &mut out {
        *ch = (*ch as i16 + d).clamp(0, 255) as u8;
    }
    out
}

fn draw_floor(canvas: &mut Canvas, tile: TileRect, palette: &Palette, rng: &mut rand_chacha::ChaCha8Rng) {
    for ay in 0..ART {
        for ax in 0..ART {
            let color = match rng.random_range(0..100) {
                0..=69 => palette.floor_base,
                70..=92 => palette.floor_alt,
                _ => palette.floor_speck,
            };
            tile.art(canvas, ax, ay, jitter(color, rng, 4));
        }
    }
}

fn draw_wall(canvas: &mut Canvas, tile: TileRect, palette: &Palette, rng: &mut rand_chacha::ChaCha8Rng) {
    for ay in 0..ART {
        let band = ay / 5;
        let joint_offset = if band % 2 == 0 { 0 } else { 4 };
        for ax in 0..ART {
            let mortar_row = ay % 5 == 0;
            let mortar_col = (ax + joint_offset) % 8 == 0;
            let color = if mortar_row || (mortar_col && !mortar_row) {
                palette.wall_mortar
            } else if ay % 5 == 1 {
                jitter(palette.wall_highlight, rng, 5)
            } else {
                jitter(palette.wall_face, rng, 5)
            };
            tile.art(canvas, ax, ay, color);
        }
    }
}

fn draw_trap(canvas: &mut Canvas, tile: TileRect, palette: &Palette, rng: &mut rand_chacha::ChaCha8Rng) {
    for ay in 0..ART {
        for ax in 0..ART {
            tile.art(canvas, ax, ay, jitter(palette.trap_base, rng, 4));
        }
    }
    // Three spikes: apex at art row 3, base at row 13.
    for &cx in &[3usize, 8, 13] {
        for ay in 3..=13 {
            let half = (ay - 3) * 3 / 10;
            for ax in cx.saturating_sub(half)..=(cx + half).min(ART - 1) {
                let color = if ax == cx { palette.trap_spike } else { jitter(palette.trap_spike, rng, 6) };
                tile.art(canvas, ax, ay, color);
            }
        }
    }
}

fn draw_player(canvas: &mut Canvas, tile: TileRect) {
    // Head, torso, legs; torso covers the tile center for readback.
    tile.art_rect(canvas, 6, 2, 10, 6, PLAYER_SKIN);
    tile.art_rect(canvas, 5, 6, 11, 12, PLAYER_BODY);
    tile.art_rect(canvas, 4, 6, 5, 10, PLAYER_BODY);
    tile.art_rect(canvas, 11, 6, 12, 10, PLAYER_BODY);
    tile.art_rect(canvas, 6, 12, 8, 15, PLAYER_DARK);
    tile.art_rect(canvas, 9, 12, 11, 15, PLAYER_DARK);
    // Eyes.
    tile.art_rect(canvas, 7, 3, 8, 4, PLAYER_DARK);
    tile.art_rect(canvas, 9, 3, 10, 4, PLAYER_DARK);
}

fn draw_treasure(canvas: &mut Canvas, tile: TileRect) {
    // Chest with a gold band across the middle; the band covers the center.
    tile.art_rect(canvas, 3, 3, 13, 4, CHEST_WOOD);
    tile.art_rect(canvas, 3, 4, 13, 6, CHEST_DARK);
    tile.art_rect(canvas, 3, 6, 13, 10, CHEST_GOLD);
    tile.art_rect(canvas, 3, 10, 13, 14, CHEST_WOOD);
    tile.art_rect(canvas, 7, 10, 9, 12, CHEST_GOLD);
}
