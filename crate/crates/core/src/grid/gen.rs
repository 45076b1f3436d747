//! Procedural generators for the seven-environment benchmark suite.
//!
//! Each family produces a corridor-style floorplan at a fixed grid size, with
//! numbered door cells placed along the corridors in strictly increasing order
//! of corridor traversal, optional odd/even side assignment, and directional
//! signs on free corridor cells. The noisy family additionally applies seeded
//! wall/free cell flips followed by connectivity repair.
//!
//! Generators are pure functions of `(family, seed, params)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{
    Cell, CellLabel, CellSemantics, Environment, OccupancyGrid, RoomId, SemanticGrid,
    ATTR_SIGN_TEXT,
};

/// The seven benchmark environment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    SmallHShape,
    SmallHallways,
    SmallPlaza,
    LargeHShape,
    LargeLShape,
    LargeOffices,
    NoisyPolycamAnalogue,
}

impl Family {
    pub fn all() -> [Family; 7] {
        [
            Family::SmallHShape,
            Family::SmallHallways,
            Family::SmallPlaza,
            Family::LargeHShape,
            Family::LargeLShape,
            Family::LargeOffices,
            Family::NoisyPolycamAnalogue,
        ]
    }

    /// Fixed `(rows, cols)` per family.
    pub fn dimensions(self) -> (usize, usize) {
        match self {
            Family::SmallHShape => (11, 7),
            Family::SmallHallways => (7, 11),
            Family::SmallPlaza => (13, 7),
            Family::LargeHShape => (132, 122),
            Family::LargeLShape => (93, 244),
            Family::LargeOffices => (127, 211),
            Family::NoisyPolycamAnalogue => (251, 137),
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Family::SmallHShape => "small-h-shape",
            Family::SmallHallways => "small-hallways",
            Family::SmallPlaza => "small-plaza",
            Family::LargeHShape => "large-h-shape",
            Family::LargeLShape => "large-l-shape",
            Family::LargeOffices => "large-offices",
            Family::NoisyPolycamAnalogue => "noisy-polycam",
        }
    }

    /// Benchmark group label used in reports.
    pub fn group(self) -> &'static str {
        match self {
            Family::SmallHShape | Family::SmallHallways | Family::SmallPlaza => "Small",
            Family::LargeHShape | Family::LargeLShape | Family::LargeOffices => "Large",
            Family::NoisyPolycamAnalogue => "Noisy",
        }
    }

    /// Families that may emit alphanumeric identifiers such as "641A".
    fn alphanumeric_ids(self) -> bool {
        matches!(self, Family::LargeOffices | Family::NoisyPolycamAnalogue)
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::all()
            .into_iter()
            .find(|f| f.slug() == s)
            .ok_or_else(|| format!("unknown environment family {s:?}"))
    }
}

/// Tunable generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Number of numbered rooms to place.
    pub rooms: usize,
    /// Cell-flip rate for the noisy family, in `[0, 1]`.
    pub noise: f64,
    /// Odd room numbers on one corridor side, even on the other.
    pub odd_even_split: bool,
    /// First room number to assign.
    pub first_room: u64,
    /// Place directional signs on corridor cells.
    pub signs: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self { rooms: 8, noise: 0.05, odd_even_split: true, first_room: 601, signs: true }
    }
}

/// Generation metadata: the corridor spine in traversal order, the placed
/// rooms in placement order, and sign cells.
#[derive(Debug, Clone)]
pub struct LayoutInfo {
    pub spine: Vec<Cell>,
    pub rooms: Vec<(String, Cell)>,
    pub signs: Vec<Cell>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerationError {
    #[error("invalid params: {0}")]
    InvalidParams(String),
    #[error("{family} supports at most {capacity} rooms, {requested} requested")]
    CapacityExceeded { family: &'static str, capacity: usize, requested: usize },
    #[error("connectivity repair failed for room at {0}")]
    RepairFailed(Cell),
}

/// Generate an environment.
pub fn generate_environment(
    family: Family,
    seed: u64,
    params: &GeneratorParams,
) -> Result<Environment, GenerationError> {
    generate_with_layout(family, seed, params).map(|(env, _)| env)
}

/// Generate an environment along with its layout metadata.
pub fn generate_with_layout(
    family: Family,
    seed: u64,
    params: &GeneratorParams,
) -> Result<(Environment, LayoutInfo), GenerationError> {
    if params.rooms == 0 {
        return Err(GenerationError::InvalidParams("room count must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&params.noise) || !params.noise.is_finite() {
        return Err(GenerationError::InvalidParams(format!(
            "noise rate {} outside [0, 1]",
            params.noise
        )));
    }
    let blueprint = blueprint_for(family);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    assemble(family, seed, params, blueprint, &mut rng)
}

/// One candidate room placement: a spine anchor plus door cells on each
/// available corridor side, in side-A/side-B order.
struct Site {
    anchor: Cell,
    sides: Vec<Cell>,
}

#[derive(Clone, Copy)]
enum SignAxis {
    Horizontal,
    Vertical,
}

/// Which rooms one clause group of a sign lists: everything, only the rooms
/// of the sign's own corridor (doors within the given perpendicular distance
/// of the sign's corridor line), everything except rooms at the sign's own
/// position along the clause axis (junction signs pointing down the main
/// corridor), or only rooms on the walls the sign's axis points at (plazas).
#[derive(Clone, Copy)]
enum SignScope {
    All,
    Band(usize),
    BandComplement(usize),
    Walls,
}

/// A sign location plus the clause groups written onto it. Multi-part signs
/// mix axes, e.g. a branch junction lists its own rooms up/down and all other
/// rooms left/right.
struct SignSpot {
    cell: Cell,
    parts: Vec<(SignAxis, SignScope)>,
}

fn sign(cell: Cell, axis: SignAxis, scope: SignScope) -> SignSpot {
    SignSpot { cell, parts: vec![(axis, scope)] }
}

struct Blueprint {
    occ: OccupancyGrid,
    spine: Vec<Cell>,
    sites: Vec<Site>,
    sign_spots: Vec<SignSpot>,
}

fn assemble(
    family: Family,
    seed: u64,
    params: &GeneratorParams,
    bp: Blueprint,
    rng: &mut ChaCha8Rng,
) -> Result<(Environment, LayoutInfo), GenerationError> {
    let capacity = bp.sites.len();
    if params.rooms > capacity {
        return Err(GenerationError::CapacityExceeded {
            family: family.slug(),
            capacity,
            requested: params.rooms,
        });
    }

    // Room identifiers, strictly increasing: plain numbers, with occasional
    // suffix runs (641A, 641B, ...) for the alphanumeric families.
    let mut ids: Vec<String> = Vec::with_capacity(params.rooms);
    let mut number = params.first_room;
    while ids.len() < params.rooms {
        let remaining = params.rooms - ids.len();
        if family.alphanumeric_ids() && remaining >= 2 && rng.gen_bool(0.25) {
            let run = rng.gen_range(2..=3usize).min(remaining);
            for j in 0..run {
                ids.push(format!("{number}{}", (b'A' + j as u8) as char));
            }
        } else {
            ids.push(number.to_string());
        }
        number += 1;
    }

    // Spread rooms over the available sites, preserving spine order.
    let chosen: Vec<&Site> =
        (0..params.rooms).map(|i| &bp.sites[i * capacity / params.rooms]).collect();

    let mut occ = bp.occ;
    let mut semantics = SemanticGrid::implied_by(&occ);
    let mut rooms: Vec<(String, Cell)> = Vec::with_capacity(params.rooms);
    for (id, site) in ids.iter().zip(&chosen) {
        let parsed = RoomId::parse(id).expect("generated ids are well-formed");
        let side = if params.odd_even_split && site.sides.len() > 1 && parsed.number.is_multiple_of(2) {
            site.sides[1]
        } else {
            site.sides[0]
        };
        debug_assert!(!occ.is_free(side), "door candidates must be wall cells");
        *semantics.get_mut(side) = CellSemantics::door(id.clone());
        rooms.push((id.clone(), side));
    }

    // Directional signs describing where room ranges lie relative to the sign.
    let mut signs: Vec<Cell> = Vec::new();
    if params.signs {
        for spot in &bp.sign_spots {
            let cell = spot.cell;
            debug_assert!(occ.is_free(cell), "sign spots must be free cells");
            let (rows_max, cols_max) = (occ.rows() - 1, occ.cols() - 1);
            let mut clauses: Vec<String> = Vec::new();
            for &(axis, scope) in &spot.parts {
                let listed: Vec<(String, Cell)> = match scope {
                    SignScope::All => rooms.clone(),
                    SignScope::Band(radius) => rooms
                        .iter()
                        .filter(|(_, door)| match axis {
                            SignAxis::Vertical => door.col.abs_diff(cell.col) <= radius,
                            SignAxis::Horizontal => door.row.abs_diff(cell.row) <= radius,
                        })
                        .cloned()
                        .collect(),
                    SignScope::BandComplement(radius) => rooms
                        .iter()
                        .filter(|(_, door)| match axis {
                            SignAxis::Horizontal => door.col.abs_diff(cell.col) > radius,
                            SignAxis::Vertical => door.row.abs_diff(cell.row) > radius,
                        })
                        .cloned()
                        .collect(),
                    SignScope::Walls => rooms
                        .iter()
                        .filter(|(_, door)| match axis {
                            SignAxis::Horizontal => door.col == 0 || door.col == cols_max,
                            SignAxis::Vertical => door.row == 0 || door.row == rows_max,
                        })
                        .cloned()
                        .collect(),
                };
                clauses.extend(sign_clauses(cell, axis, &listed, &rooms));
            }
            if !clauses.is_empty() {
                let text = format!("{}.", clauses.join("; "));
                semantics.get_mut(cell).attributes.insert(ATTR_SIGN_TEXT.to_string(), text);
                signs.push(cell);
            }
        }
    }

    let start = bp.spine[rng.gen_range(0..bp.spine.len())];

    if family == Family::NoisyPolycamAnalogue {
        apply_noise_and_repair(&mut occ, &mut semantics, start, &rooms, params.noise, rng)?;
    }

    let env = Environment {
        name: format!("{}-{}", family.slug(), seed),
        occupancy: occ,
        semantics,
        start,
    };
    debug_assert_eq!(env.validate(), Ok(()));
    let layout = LayoutInfo { spine: bp.spine, rooms, signs };
    Ok((env, layout))
}

/// Flip non-boundary, attribute-free cells at the given rate, then re-carve
/// the shortest blocked corridor from the start to any room left unreachable.
fn apply_noise_and_repair(
    occ: &mut OccupancyGrid,
    semantics: &mut SemanticGrid,
    start: Cell,
    rooms: &[(String, Cell)],
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(), GenerationError> {
    let (rows, cols) = (occ.rows(), occ.cols());
    for row in 1..rows - 1 {
        for col in 1..cols - 1 {
            let cell = Cell::new(row, col);
            if cell == start || !semantics.get(cell).attributes.is_empty() {
                continue;
            }
            if rng.gen_bool(noise) {
                let flipped = 1 - occ.get(cell);
                occ.set(cell, flipped);
                semantics.get_mut(cell).label =
                    if flipped == 0 { CellLabel::Free } else { CellLabel::Wall };
            }
        }
    }

    for (_, door) in rooms {
        repair_reachability(occ, semantics, start, *door)?;
    }
    Ok(())
}

/// Ensure some free 4-neighbor of `door` is reachable from `start` through
/// free cells, carving attribute-free wall cells along a shortest path.
fn repair_reachability(
    occ: &mut OccupancyGrid,
    semantics: &mut SemanticGrid,
    start: Cell,
    door: Cell,
) -> Result<(), GenerationError> {
    let (rows, cols) = (occ.rows(), occ.cols());
    let idx = |c: Cell| c.row * cols + c.col;
    let reachable = free_reachable_set(occ, start);
    if door
        .neighbors4(rows, cols)
        .any(|n| occ.is_free(n) && reachable[idx(n)])
    {
        return Ok(());
    }
    // BFS from start over cells that are free or carvable (attribute-free),
    // stopping at any 4-neighbor of the door.
    let mut prev: Vec<Option<Cell>> = vec![None; rows * cols];
    let mut visited = vec![false; rows * cols];
    let mut queue = VecDeque::new();
    visited[idx(start)] = true;
    queue.push_back(start);
    let mut hit: Option<Cell> = None;
    'bfs: while let Some(cur) = queue.pop_front() {
        for n in cur.neighbors4(rows, cols) {
            if visited[idx(n)] {
                continue;
            }
            let carvable = occ.is_free(n) || semantics.get(n).attributes.is_empty();
            if !carvable {
                continue;
            }
            visited[idx(n)] = true;
            prev[idx(n)] = Some(cur);
            if n.manhattan(door) == 1 {
                hit = Some(n);
                break 'bfs;
            }
            queue.push_back(n);
        }
    }
    let mut cur = hit.ok_or(GenerationError::RepairFailed(door))?;
    loop {
        if !occ.is_free(cur) {
            occ.set(cur, 0);
            semantics.get_mut(cur).label = CellLabel::Free;
        }
        match prev[idx(cur)] {
            Some(p) => cur = p,
            None => break,
        }
    }
    Ok(())
}

fn free_reachable_set(occ: &OccupancyGrid, start: Cell) -> Vec<bool> {
    let (rows, cols) = (occ.rows(), occ.cols());
    let idx = |c: Cell| c.row * cols + c.col;
    let mut seen = vec![false; rows * cols];
    if !occ.is_free(start) {
        return seen;
    }
    let mut queue = VecDeque::new();
    seen[idx(start)] = true;
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for n in cur.neighbors4(rows, cols) {
            if !seen[idx(n)] && occ.is_free(n) {
                seen[idx(n)] = true;
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Compose the clauses for the two half-planes of one axis, e.g.
/// `["Rooms 601–604 to the right", "Rooms 605, 607–609 to the left"]`.
/// `listed` is what the sign advertises; ranges are exact with respect to the
/// full `inventory`, so a range never covers a room the sign does not list.
fn sign_clauses(
    sign: Cell,
    axis: SignAxis,
    listed: &[(String, Cell)],
    inventory: &[(String, Cell)],
) -> Vec<String> {
    let (pos_phrase, neg_phrase) = match axis {
        SignAxis::Horizontal => ("to the right", "to the left"),
        SignAxis::Vertical => ("downwards", "upwards"),
    };
    let coord = |c: Cell| match axis {
        SignAxis::Horizontal => c.col,
        SignAxis::Vertical => c.row,
    };
    let here = coord(sign);
    let mut pos: Vec<&str> = Vec::new();
    let mut neg: Vec<&str> = Vec::new();
    for (id, cell) in listed {
        if coord(*cell) > here {
            pos.push(id);
        } else if coord(*cell) < here {
            neg.push(id);
        }
    }
    let all_numbers: BTreeSet<u64> =
        inventory.iter().filter_map(|(id, _)| RoomId::parse(id)).map(|r| r.number).collect();
    let mut clauses = Vec::new();
    if let Some(items) = clause_items(&pos, inventory, &all_numbers) {
        clauses.push(format!("Rooms {items} {pos_phrase}"));
    }
    if let Some(items) = clause_items(&neg, inventory, &all_numbers) {
        clauses.push(format!("Rooms {items} {neg_phrase}"));
    }
    clauses
}

/// Build the comma-separated item list for one clause. Numeric parts whose
/// rooms all fall in this clause may be merged into ranges; numeric parts
/// split across directions are listed as explicit full identifiers.
fn clause_items(
    members: &[&str],
    rooms: &[(String, Cell)],
    all_numbers: &BTreeSet<u64>,
) -> Option<String> {
    if members.is_empty() {
        return None;
    }
    let member_set: BTreeSet<&str> = members.iter().copied().collect();
    // Group every room id by numeric part.
    let mut by_number: BTreeMap<u64, Vec<&str>> = BTreeMap::new();
    for (id, _) in rooms {
        if let Some(parsed) = RoomId::parse(id) {
            by_number.entry(parsed.number).or_default().push(id);
        }
    }
    let whole: BTreeSet<u64> = by_number
        .iter()
        .filter(|(_, ids)| ids.iter().all(|id| member_set.contains(*id)))
        .map(|(n, _)| *n)
        .collect();
    let mut items: Vec<(RoomId, String)> = Vec::new();
    // Ranges over wholly-contained numeric parts.
    let mut run: Option<(u64, u64)> = None;
    let flush = |run: &mut Option<(u64, u64)>, items: &mut Vec<(RoomId, String)>| {
        if let Some((a, b)) = run.take() {
            let text = if a == b { a.to_string() } else { format!("{a}\u{2013}{b}") };
            items.push((RoomId { number: a, suffix: String::new() }, text));
        }
    };
    for &n in &whole {
        match run {
            Some((_, b)) if all_numbers.range(b + 1..n).all(|m| whole.contains(m)) => {
                run = Some((run.unwrap().0, n));
            }
            Some(_) => {
                flush(&mut run, &mut items);
                run = Some((n, n));
            }
            None => run = Some((n, n)),
        }
    }
    flush(&mut run, &mut items);
    // Split numeric parts: list the member ids individually.
    for id in &member_set {
        if let Some(parsed) = RoomId::parse(id) {
            if !whole.contains(&parsed.number) {
                items.push((parsed, id.to_string()));
            }
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    Some(items.into_iter().map(|(_, t)| t).collect::<Vec<_>>().join(", "))
}

// ---------------------------------------------------------------------------
// Family blueprints
// ---------------------------------------------------------------------------

struct Carver {
    rows: usize,
    cols: usize,
    occ: OccupancyGrid,
}

impl Carver {
    fn new(family: Family) -> Self {
        let (rows, cols) = family.dimensions();
        Self { rows, cols, occ: OccupancyGrid::filled(rows, cols, 1) }
    }

    fn carve_rect(&mut self, r0: usize, r1: usize, c0: usize, c1: usize) {
        for r in r0..=r1 {
            for c in c0..=c1 {
                self.occ.set(Cell::new(r, c), 0);
            }
        }
    }
}

fn vline(col: usize, r0: usize, r1: usize) -> Vec<Cell> {
    (r0..=r1).map(|r| Cell::new(r, col)).collect()
}

fn hline(row: usize, c0: usize, c1: usize) -> Vec<Cell> {
    (c0..=c1).map(|c| Cell::new(row, c)).collect()
}

fn blueprint_for(family: Family) -> Blueprint {
    match family {
        Family::SmallHShape => small_h_shape(),
        Family::SmallHallways => small_hallways(),
        Family::SmallPlaza => small_plaza(),
        Family::LargeHShape => large_h_shape(),
        Family::LargeLShape => large_l_shape(),
        Family::LargeOffices => comb(Family::LargeOffices),
        Family::NoisyPolycamAnalogue => comb(Family::NoisyPolycamAnalogue),
    }
}

/// 11x7 H: vertical corridors at columns 1 and 5, crossbar at row 5.
fn small_h_shape() -> Blueprint {
    let mut cv = Carver::new(Family::SmallHShape);
    cv.carve_rect(1, 9, 1, 1);
    cv.carve_rect(1, 9, 5, 5);
    cv.carve_rect(5, 5, 2, 4);
    let mut spine = vline(1, 1, 9);
    spine.extend(hline(5, 2, 4));
    spine.extend(vline(5, 1, 9));
    let mut sites = Vec::new();
    for r in [1, 3, 7, 9] {
        sites.push(Site { anchor: Cell::new(r, 1), sides: vec![Cell::new(r, 0), Cell::new(r, 2)] });
    }
    sites.push(Site { anchor: Cell::new(5, 3), sides: vec![Cell::new(4, 3), Cell::new(6, 3)] });
    for r in [1, 3, 7, 9] {
        sites.push(Site { anchor: Cell::new(r, 5), sides: vec![Cell::new(r, 6), Cell::new(r, 4)] });
    }
    sort_sites_by_spine(&mut sites, &spine);
    // Corridor signs split rooms above/below; the crossbar sign splits the
    // two legs left/right.
    let sign_spots = vec![
        sign(Cell::new(3, 1), SignAxis::Vertical, SignScope::Band(1)),
        sign(Cell::new(7, 1), SignAxis::Vertical, SignScope::Band(1)),
        sign(Cell::new(5, 3), SignAxis::Horizontal, SignScope::All),
        sign(Cell::new(3, 5), SignAxis::Vertical, SignScope::Band(1)),
        sign(Cell::new(7, 5), SignAxis::Vertical, SignScope::Band(1)),
    ];
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// 7x11 ladder: hallways at rows 1, 3, and 5 joined by connectors at columns
/// 1, 5, and 9.
fn small_hallways() -> Blueprint {
    let mut cv = Carver::new(Family::SmallHallways);
    cv.carve_rect(1, 1, 1, 9);
    cv.carve_rect(3, 3, 1, 9);
    cv.carve_rect(5, 5, 1, 9);
    for c in [1, 5, 9] {
        cv.carve_rect(2, 4, c, c);
    }
    let mut spine = hline(1, 1, 9);
    spine.extend(vline(9, 2, 4));
    spine.extend(hline(5, 1, 9).into_iter().rev());
    spine.extend(vline(1, 2, 4).into_iter().rev());
    let mut sites = Vec::new();
    for c in [2, 4, 6, 8] {
        sites.push(Site { anchor: Cell::new(1, c), sides: vec![Cell::new(0, c), Cell::new(2, c)] });
    }
    for c in [8, 6, 4, 2] {
        sites.push(Site { anchor: Cell::new(5, c), sides: vec![Cell::new(6, c), Cell::new(4, c)] });
    }
    sort_sites_by_spine(&mut sites, &spine);
    let sign_spots = vec![
        sign(Cell::new(1, 3), SignAxis::Horizontal, SignScope::Band(1)),
        sign(Cell::new(1, 7), SignAxis::Horizontal, SignScope::Band(1)),
        sign(Cell::new(5, 3), SignAxis::Horizontal, SignScope::Band(1)),
        sign(Cell::new(5, 7), SignAxis::Horizontal, SignScope::Band(1)),
        sign(Cell::new(3, 1), SignAxis::Vertical, SignScope::All),
        sign(Cell::new(3, 5), SignAxis::Vertical, SignScope::All),
        sign(Cell::new(3, 9), SignAxis::Vertical, SignScope::All),
    ];
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// 13x7 open plaza with rooms around the outer walls.
fn small_plaza() -> Blueprint {
    let mut cv = Carver::new(Family::SmallPlaza);
    cv.carve_rect(1, 11, 1, 5);
    let mut spine = hline(1, 1, 5);
    spine.extend(vline(5, 2, 11));
    spine.extend(hline(11, 1, 4).into_iter().rev());
    spine.extend(vline(1, 2, 10).into_iter().rev());
    let mut sites = Vec::new();
    for c in [2, 4] {
        sites.push(Site { anchor: Cell::new(1, c), sides: vec![Cell::new(0, c)] });
    }
    for r in [3, 5, 7, 9] {
        sites.push(Site { anchor: Cell::new(r, 5), sides: vec![Cell::new(r, 6)] });
    }
    for c in [4, 2] {
        sites.push(Site { anchor: Cell::new(11, c), sides: vec![Cell::new(12, c)] });
    }
    for r in [9, 7, 5, 3] {
        sites.push(Site { anchor: Cell::new(r, 1), sides: vec![Cell::new(r, 0)] });
    }
    sort_sites_by_spine(&mut sites, &spine);
    // Three signs cover the whole plaza at k = 5.
    let sign_spots = vec![
        sign(Cell::new(3, 3), SignAxis::Vertical, SignScope::All),
        sign(Cell::new(6, 3), SignAxis::Horizontal, SignScope::Walls),
        sign(Cell::new(9, 3), SignAxis::Vertical, SignScope::All),
    ];
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// 132x122 H with width-3 corridors.
fn large_h_shape() -> Blueprint {
    let mut cv = Carver::new(Family::LargeHShape);
    cv.carve_rect(2, 129, 2, 4);
    cv.carve_rect(2, 129, 117, 119);
    cv.carve_rect(64, 66, 5, 116);
    let mut spine = vline(3, 2, 129);
    spine.extend(hline(65, 5, 116));
    spine.extend(vline(118, 2, 129));
    let mut sites = Vec::new();
    let leg_rows: Vec<usize> = (4..=124).step_by(6).filter(|r| !(58..=72).contains(r)).collect();
    for &r in &leg_rows {
        sites.push(Site { anchor: Cell::new(r, 3), sides: vec![Cell::new(r, 1), Cell::new(r, 5)] });
    }
    for c in (10..=110).step_by(6) {
        sites.push(Site { anchor: Cell::new(65, c), sides: vec![Cell::new(63, c), Cell::new(67, c)] });
    }
    for &r in &leg_rows {
        sites.push(Site {
            anchor: Cell::new(r, 118),
            sides: vec![Cell::new(r, 120), Cell::new(r, 116)],
        });
    }
    sort_sites_by_spine(&mut sites, &spine);
    let mut sign_spots = Vec::new();
    for r in [20, 44, 64, 88, 112] {
        sign_spots.push(sign(Cell::new(r, 3), SignAxis::Vertical, SignScope::Band(2)));
        sign_spots.push(sign(Cell::new(r, 118), SignAxis::Vertical, SignScope::Band(2)));
    }
    for c in [20, 40, 61, 80, 100] {
        sign_spots.push(sign(Cell::new(65, c), SignAxis::Horizontal, SignScope::Band(2)));
    }
    // Mid-crossbar signs split the whole inventory left/right.
    sign_spots.push(sign(Cell::new(65, 10), SignAxis::Horizontal, SignScope::All));
    sign_spots.push(sign(Cell::new(65, 111), SignAxis::Horizontal, SignScope::All));
    // In-leg junction signs: own-leg rooms up/down, everything else along
    // the crossbar.
    for col in [3, 118] {
        sign_spots.push(SignSpot {
            cell: Cell::new(65, col),
            parts: vec![
                (SignAxis::Vertical, SignScope::Band(2)),
                (SignAxis::Horizontal, SignScope::BandComplement(2)),
            ],
        });
    }
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// 93x244 L: a vertical arm meeting one long horizontal corridor.
fn large_l_shape() -> Blueprint {
    let mut cv = Carver::new(Family::LargeLShape);
    cv.carve_rect(2, 46, 2, 4);
    cv.carve_rect(44, 46, 2, 241);
    let mut spine = vline(3, 2, 45);
    spine.extend(hline(45, 4, 240));
    let mut sites = Vec::new();
    for r in (4..=38).step_by(6) {
        sites.push(Site { anchor: Cell::new(r, 3), sides: vec![Cell::new(r, 1), Cell::new(r, 5)] });
    }
    for c in (10..=238).step_by(6) {
        sites.push(Site { anchor: Cell::new(45, c), sides: vec![Cell::new(43, c), Cell::new(47, c)] });
    }
    sort_sites_by_spine(&mut sites, &spine);
    let mut sign_spots = vec![
        sign(Cell::new(12, 3), SignAxis::Vertical, SignScope::Band(2)),
        sign(Cell::new(30, 3), SignAxis::Vertical, SignScope::Band(2)),
        // Corner signs route between the two arms: a composite at the bend
        // (own arm up/down, everything else along the main corridor) plus a
        // plain split a few cells in.
        SignSpot {
            cell: Cell::new(45, 3),
            parts: vec![
                (SignAxis::Vertical, SignScope::Band(2)),
                (SignAxis::Horizontal, SignScope::BandComplement(2)),
            ],
        },
        sign(Cell::new(45, 9), SignAxis::Horizontal, SignScope::All),
    ];
    for c in [30, 70, 110, 150, 190, 230] {
        sign_spots.push(sign(Cell::new(45, c), SignAxis::Horizontal, SignScope::Band(2)));
    }
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// Comb layouts: one main corridor with regularly spaced branch corridors and
/// rooms along the branches. LargeOffices runs the main corridor horizontally;
/// the noisy analogue runs it vertically.
fn comb(family: Family) -> Blueprint {
    let mut cv = Carver::new(family);
    let (rows, cols) = (cv.rows, cv.cols);
    let horizontal_main = family == Family::LargeOffices;
    let (main_lo, branch_starts): (usize, Vec<usize>) = if horizontal_main {
        (rows / 2 - 1, (20..cols - 10).step_by(30).collect())
    } else {
        (cols / 2 - 1, (30..rows - 10).step_by(40).collect())
    };
    if horizontal_main {
        cv.carve_rect(main_lo, main_lo + 2, 2, cols - 3);
        for &b in &branch_starts {
            cv.carve_rect(2, rows - 3, b, b + 2);
        }
    } else {
        cv.carve_rect(2, rows - 3, main_lo, main_lo + 2);
        for &b in &branch_starts {
            cv.carve_rect(b, b + 2, 2, cols - 3);
        }
    }
    let main_mid = main_lo + 1;
    let mut spine = Vec::new();
    let mut sites = Vec::new();
    let mut sign_spots = Vec::new();
    for &b in &branch_starts {
        let mid = b + 1;
        if horizontal_main {
            spine.extend(vline(mid, 2, rows - 3));
            for r in (4..rows - 3).step_by(8) {
                if (main_lo.saturating_sub(2)..=main_lo + 4).contains(&r) {
                    continue;
                }
                sites.push(Site {
                    anchor: Cell::new(r, mid),
                    sides: vec![Cell::new(r, b - 1), Cell::new(r, b + 3)],
                });
            }
            // Junction signs list this branch's rooms up/down and everything
            // else left/right along the main corridor; in-branch signs guide
            // the final approach.
            sign_spots.push(SignSpot {
                cell: Cell::new(main_mid, mid),
                parts: vec![
                    (SignAxis::Vertical, SignScope::Band(2)),
                    (SignAxis::Horizontal, SignScope::BandComplement(2)),
                ],
            });
            for r in [rows / 5, 2 * rows / 5, 3 * rows / 5, 4 * rows / 5] {
                if r.abs_diff(main_mid) > 3 {
                    sign_spots.push(sign(Cell::new(r, mid), SignAxis::Vertical, SignScope::Band(2)));
                }
            }
        } else {
            spine.extend(hline(mid, 2, cols - 3));
            for c in (4..cols - 3).step_by(8) {
                if (main_lo.saturating_sub(2)..=main_lo + 4).contains(&c) {
                    continue;
                }
                sites.push(Site {
                    anchor: Cell::new(mid, c),
                    sides: vec![Cell::new(b - 1, c), Cell::new(b + 3, c)],
                });
            }
            sign_spots.push(SignSpot {
                cell: Cell::new(mid, main_mid),
                parts: vec![
                    (SignAxis::Horizontal, SignScope::Band(2)),
                    (SignAxis::Vertical, SignScope::BandComplement(2)),
                ],
            });
            for c in [cols / 5, 2 * cols / 5, 3 * cols / 5, 4 * cols / 5] {
                if c.abs_diff(main_mid) > 3 {
                    sign_spots.push(sign(Cell::new(mid, c), SignAxis::Horizontal, SignScope::Band(2)));
                }
            }
        }
    }
    if horizontal_main {
        sign_spots.push(sign(Cell::new(main_mid, cols / 2), SignAxis::Horizontal, SignScope::All));
    } else {
        sign_spots.push(sign(Cell::new(rows / 2, main_mid), SignAxis::Vertical, SignScope::All));
    }
    sort_sites_by_spine(&mut sites, &spine);
    Blueprint { occ: cv.occ, spine, sites, sign_spots }
}

/// Order sites by their anchor's index on the spine so that room placement
/// follows corridor traversal order.
fn sort_sites_by_spine(sites: &mut [Site], spine: &[Cell]) {
    let index: BTreeMap<Cell, usize> = spine.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    sites.sort_by_key(|s| *index.get(&s.anchor).expect("site anchors lie on the spine"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::save_environment;

    #[test]
    fn dimensions_match_family_table() {
        for family in Family::all() {
            let env = generate_environment(family, 1, &GeneratorParams::default()).unwrap();
            assert_eq!((env.rows(), env.cols()), family.dimensions(), "{}", family.slug());
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        for family in Family::all() {
            let params = GeneratorParams::default();
            let a = generate_environment(family, 7, &params).unwrap();
            let b = generate_environment(family, 7, &params).unwrap();
            assert_eq!(save_environment(&a), save_environment(&b), "{}", family.slug());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let params = GeneratorParams::default();
        let a = generate_environment(Family::SmallHShape, 1, &params).unwrap();
        let b = generate_environment(Family::SmallHShape, 2, &params).unwrap();
        assert_ne!(save_environment(&a), save_environment(&b));
    }

    #[test]
    fn zero_rooms_rejected() {
        let params = GeneratorParams { rooms: 0, ..GeneratorParams::default() };
        assert!(matches!(
            generate_environment(Family::SmallHShape, 1, &params),
            Err(GenerationError::InvalidParams(_))
        ));
    }

    #[test]
    fn capacity_overflow_rejected() {
        let params = GeneratorParams { rooms: 1000, ..GeneratorParams::default() };
        assert!(matches!(
            generate_environment(Family::SmallHShape, 1, &params),
            Err(GenerationError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn bad_noise_rejected() {
        let params = GeneratorParams { noise: 1.5, ..GeneratorParams::default() };
        assert!(matches!(
            generate_environment(Family::NoisyPolycamAnalogue, 1, &params),
            Err(GenerationError::InvalidParams(_))
        ));
    }

    #[test]
    fn odd_even_split_puts_parities_on_distinct_sides() {
        let params = GeneratorParams::default();
        let (_, layout) =
            generate_with_layout(Family::SmallHShape, 3, &params).unwrap();
        // Doors on the left corridor: odd rooms at col 0, even rooms at col 2.
        for (id, cell) in &layout.rooms {
            let parsed = RoomId::parse(id).unwrap();
            if cell.col == 0 {
                assert_eq!(parsed.number % 2, 1, "room {id} at {cell}");
            }
            if cell.col == 2 {
                assert_eq!(parsed.number % 2, 0, "room {id} at {cell}");
            }
        }
    }

    #[test]
    fn sign_ranges_are_exact() {
        let rooms: Vec<(String, Cell)> = vec![
            ("601".into(), Cell::new(0, 1)),
            ("602".into(), Cell::new(0, 3)),
            ("603".into(), Cell::new(0, 8)),
            ("604".into(), Cell::new(0, 9)),
        ];
        // Sign at col 5: 601-602 left, 603-604 right.
        let clauses = sign_clauses(Cell::new(0, 5), SignAxis::Horizontal, &rooms, &rooms);
        assert_eq!(
            clauses.join("; "),
            "Rooms 603\u{2013}604 to the right; Rooms 601\u{2013}602 to the left"
        );
    }

    #[test]
    fn sign_ranges_never_swallow_other_direction() {
        // 602 is to the right while 601 and 603 are to the left: the left
        // clause must not merge into 601-603.
        let rooms: Vec<(String, Cell)> = vec![
            ("601".into(), Cell::new(0, 1)),
            ("602".into(), Cell::new(0, 9)),
            ("603".into(), Cell::new(0, 2)),
        ];
        let clauses = sign_clauses(Cell::new(0, 5), SignAxis::Horizontal, &rooms, &rooms);
        assert_eq!(clauses.join("; "), "Rooms 602 to the right; Rooms 601, 603 to the left");
    }
}
