//! Text and image rendering of environments, beliefs, confidence heatmaps,
//! and trajectories. Every renderer is a pure function of its inputs and
//! byte-deterministic.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::belief::ConfidenceGrid;
use crate::grid::{Cell, CellLabel, Environment, ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT};
use crate::perception::AgentBelief;
use crate::planning::find_frontiers;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    PpmP6,
    Svg,
}

impl RenderFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RenderFormat::Ascii => "txt",
            RenderFormat::PpmP6 => "ppm",
            RenderFormat::Svg => "svg",
        }
    }
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(RenderFormat::Ascii),
            "ppm" => Ok(RenderFormat::PpmP6),
            "svg" => Ok(RenderFormat::Svg),
            other => Err(format!("unknown render format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RenderLayer {
    Occupancy,
    Semantics,
    Confidence,
    Trajectory,
    Frontier,
}

/// What to draw and how.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub layers: BTreeSet<RenderLayer>,
    pub format: RenderFormat,
    pub cell_px: usize,
}

impl RenderSpec {
    pub fn new(
        layers: impl IntoIterator<Item = RenderLayer>,
        format: RenderFormat,
        cell_px: usize,
    ) -> Result<Self, RenderError> {
        let layers: BTreeSet<RenderLayer> = layers.into_iter().collect();
        if layers.is_empty() {
            return Err(RenderError::NoLayers);
        }
        if cell_px == 0 {
            return Err(RenderError::ZeroCellPx);
        }
        Ok(Self { layers, format, cell_px })
    }

    /// Everything except the confidence heatmap.
    pub fn full(format: RenderFormat) -> Self {
        Self {
            layers: [
                RenderLayer::Occupancy,
                RenderLayer::Semantics,
                RenderLayer::Trajectory,
            ]
            .into_iter()
            .collect(),
            format,
            cell_px: 8,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("render spec needs at least one layer")]
    NoLayers,
    #[error("cell_px must be positive")]
    ZeroCellPx,
    #[error("heatmaps render to image formats only")]
    AsciiHeatmap,
}

/// The grid being drawn: full ground truth or the agent's partial view.
#[derive(Debug, Clone, Copy)]
pub enum GridView<'a> {
    Env(&'a Environment),
    Belief(&'a AgentBelief),
}

impl GridView<'_> {
    fn dims(&self) -> (usize, usize) {
        match self {
            GridView::Env(env) => (env.rows(), env.cols()),
            GridView::Belief(belief) => (belief.rows(), belief.cols()),
        }
    }
}

/// A renderable scene: a grid view plus optional overlays.
#[derive(Debug, Clone, Copy)]
pub struct Scene<'a> {
    pub view: GridView<'a>,
    pub confidence: Option<&'a ConfidenceGrid>,
    pub trajectory: Option<&'a [Cell]>,
    pub agent: Option<Cell>,
    pub goal: Option<Cell>,
}

impl<'a> Scene<'a> {
    pub fn new(view: GridView<'a>) -> Self {
        Self { view, confidence: None, trajectory: None, agent: None, goal: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BaseCell {
    Unknown,
    Free,
    Wall,
    Door,
    Sign,
}

fn base_cell(view: &GridView<'_>, cell: Cell) -> BaseCell {
    match view {
        GridView::Env(env) => {
            let sem = env.semantics.get(cell);
            if sem.sign_text().is_some() && env.occupancy.is_free(cell) {
                BaseCell::Sign
            } else {
                match sem.label {
                    CellLabel::Door => BaseCell::Door,
                    CellLabel::Wall => BaseCell::Wall,
                    CellLabel::Free => BaseCell::Free,
                }
            }
        }
        GridView::Belief(belief) => {
            let attrs = belief.seen_sem.get(cell);
            match belief.seen_occ.get(cell) {
                -1 => BaseCell::Unknown,
                0 if attrs.contains_key(ATTR_SIGN_TEXT) => BaseCell::Sign,
                0 => BaseCell::Free,
                _ if attrs.contains_key(ATTR_ROOM_NUMBER) => BaseCell::Door,
                _ => BaseCell::Wall,
            }
        }
    }
}

/// One character per cell with layer precedence
/// `@ > G > * > S > D > # > . > ' '`. Rows are joined with newlines, without
/// a trailing newline.
pub fn render_ascii(scene: &Scene<'_>) -> String {
    let (rows, cols) = scene.view.dims();
    let trajectory: BTreeSet<Cell> =
        scene.trajectory.map(|t| t.iter().copied().collect()).unwrap_or_default();
    let mut lines = Vec::with_capacity(rows);
    for row in 0..rows {
        let mut line = String::with_capacity(cols);
        for col in 0..cols {
            let cell = Cell::new(row, col);
            let ch = if scene.agent == Some(cell) {
                '@'
            } else if scene.goal == Some(cell) {
                'G'
            } else if trajectory.contains(&cell) {
                '*'
            } else {
                match base_cell(&scene.view, cell) {
                    BaseCell::Sign => 'S',
                    BaseCell::Door => 'D',
                    BaseCell::Wall => '#',
                    BaseCell::Free => '.',
                    BaseCell::Unknown => ' ',
                }
            };
            line.push(ch);
        }
        lines.push(line);
    }
    lines.join("\n")
}

type Rgb = (u8, u8, u8);

const COLOR_UNKNOWN: Rgb = (130, 130, 130);
const COLOR_FREE: Rgb = (255, 255, 255);
const COLOR_WALL: Rgb = (0, 0, 0);
const COLOR_DOOR: Rgb = (150, 75, 0);
const COLOR_SIGN: Rgb = (30, 90, 255);
const COLOR_TRAJECTORY: Rgb = (0, 170, 0);
const COLOR_AGENT: Rgb = (220, 0, 0);
const COLOR_GOAL: Rgb = (255, 200, 0);
const COLOR_FRONTIER: Rgb = (255, 0, 255);

/// Linear low-to-high confidence ramp, blue to red.
fn heat_color(t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    ((255.0 * t).round() as u8, 0, (255.0 * (1.0 - t)).round() as u8)
}

/// Confidence heatmap normalized by the current maximum; an all-zero grid
/// renders as the uniform base color. One pixel per cell for PPM.
pub fn render_heatmap(grid: &ConfidenceGrid, format: RenderFormat) -> Result<Vec<u8>, RenderError> {
    if format == RenderFormat::Ascii {
        return Err(RenderError::AsciiHeatmap);
    }
    let max = grid.max_value();
    let color_of = |cell: Cell| {
        let t = if max > 0.0 { grid.value(cell) / max } else { 0.0 };
        heat_color(t)
    };
    let (rows, cols) = (grid.rows(), grid.cols());
    match format {
        RenderFormat::PpmP6 => Ok(ppm_bytes(rows, cols, 1, color_of)),
        RenderFormat::Svg => Ok(svg_bytes(rows, cols, 1, color_of)),
        RenderFormat::Ascii => unreachable!(),
    }
}

/// Render a scene according to a spec. ASCII output uses the fixed character
/// set (the confidence layer has no ASCII glyphs and is skipped there);
/// image formats color cells by layer with the same precedence as ASCII.
pub fn render_scene(scene: &Scene<'_>, spec: &RenderSpec) -> Result<Vec<u8>, RenderError> {
    if spec.layers.is_empty() {
        return Err(RenderError::NoLayers);
    }
    if spec.format == RenderFormat::Ascii {
        let mut reduced = *scene;
        if !spec.layers.contains(&RenderLayer::Trajectory) {
            reduced.trajectory = None;
        }
        return Ok(render_ascii(&reduced).into_bytes());
    }
    let (rows, cols) = scene.view.dims();
    let trajectory: BTreeSet<Cell> = if spec.layers.contains(&RenderLayer::Trajectory) {
        scene.trajectory.map(|t| t.iter().copied().collect()).unwrap_or_default()
    } else {
        BTreeSet::new()
    };
    let frontier: BTreeSet<Cell> = if spec.layers.contains(&RenderLayer::Frontier) {
        match scene.view {
            GridView::Belief(belief) => find_frontiers(&belief.seen_occ).iter().collect(),
            GridView::Env(_) => BTreeSet::new(),
        }
    } else {
        BTreeSet::new()
    };
    let heat_max = scene.confidence.map(|c| c.max_value()).unwrap_or(0.0);
    let color_of = |cell: Cell| -> Rgb {
        if scene.agent == Some(cell) {
            return COLOR_AGENT;
        }
        if scene.goal == Some(cell) {
            return COLOR_GOAL;
        }
        if trajectory.contains(&cell) {
            return COLOR_TRAJECTORY;
        }
        if frontier.contains(&cell) {
            return COLOR_FRONTIER;
        }
        let base = base_cell(&scene.view, cell);
        if spec.layers.contains(&RenderLayer::Semantics) {
            match base {
                BaseCell::Sign => return COLOR_SIGN,
                BaseCell::Door => return COLOR_DOOR,
                _ => {}
            }
        }
        if spec.layers.contains(&RenderLayer::Confidence) {
            if let Some(confidence) = scene.confidence {
                if matches!(base, BaseCell::Free | BaseCell::Unknown) {
                    let t =
                        if heat_max > 0.0 { confidence.value(cell) / heat_max } else { 0.0 };
                    return heat_color(t);
                }
            }
        }
        match base {
            BaseCell::Unknown => COLOR_UNKNOWN,
            BaseCell::Free => COLOR_FREE,
            BaseCell::Wall => COLOR_WALL,
            BaseCell::Door if spec.layers.contains(&RenderLayer::Occupancy) => COLOR_WALL,
            BaseCell::Door => COLOR_DOOR,
            BaseCell::Sign => COLOR_FREE,
        }
    };
    Ok(match spec.format {
        RenderFormat::PpmP6 => ppm_bytes(rows, cols, spec.cell_px, color_of),
        RenderFormat::Svg => svg_bytes(rows, cols, spec.cell_px, color_of),
        RenderFormat::Ascii => unreachable!(),
    })
}

fn ppm_bytes(rows: usize, cols: usize, cell_px: usize, color_of: impl Fn(Cell) -> Rgb) -> Vec<u8> {
    let width = cols * cell_px;
    let height = rows * cell_px;
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height * 3);
    for row in 0..rows {
        let mut scanline = Vec::with_capacity(width * 3);
        for col in 0..cols {
            let (r, g, b) = color_of(Cell::new(row, col));
            for _ in 0..cell_px {
                scanline.extend_from_slice(&[r, g, b]);
            }
        }
        for _ in 0..cell_px {
            out.extend_from_slice(&scanline);
        }
    }
    out
}

fn svg_bytes(rows: usize, cols: usize, cell_px: usize, color_of: impl Fn(Cell) -> Rgb) -> Vec<u8> {
    let width = cols * cell_px;
    let height = rows * cell_px;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    for row in 0..rows {
        for col in 0..cols {
            let (r, g, b) = color_of(Cell::new(row, col));
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{cell_px}\" height=\"{cell_px}\" \
                 fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n",
                col * cell_px,
                row * cell_px,
            ));
        }
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}
