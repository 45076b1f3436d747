//! Directional-sign parsing.
//!
//! Grammar: a sign is a `;`-separated list of clauses. Each clause names a
//! room list ("Rooms 607–609, 611–615, 621") followed by a direction keyword
//! ("to the right", "to the left", "upwards"/"up", "downwards"/"down", or an
//! arrow → ← ↑ ↓). Ranges accept `-`, `–`, `—` as the dash and cover a goal
//! whose numeric part falls inside them; a bare numeric item covers any goal
//! sharing its numeric part, while a suffixed item ("641A") requires an exact
//! match. Unparseable text never aborts; it simply covers nothing.

use std::sync::OnceLock;

use regex::Regex;

use crate::belief::Region;
use crate::grid::RoomId;

fn item_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?x)
            (?P<a>[0-9]+[A-Za-z]*)
            (?:\s*[-\x{2013}\x{2014}]\s*(?P<b>[0-9]+[A-Za-z]*))?
        ")
        .expect("item regex compiles")
    })
}

// Keyword table, longest-match-first so "downwards" wins over "down".
const DIRECTIONS: &[(&str, Region)] = &[
    ("to the right", Region::Right),
    ("to the left", Region::Left),
    ("downwards", Region::Down),
    ("upwards", Region::Up),
    ("down", Region::Down),
    ("up", Region::Up),
    ("\u{2192}", Region::Right),
    ("\u{2190}", Region::Left),
    ("\u{2191}", Region::Up),
    ("\u{2193}", Region::Down),
];

/// Direction of the first clause whose room list covers `goal`, if any.
pub fn parse_sign(sign_text: &str, goal: &str) -> Option<Region> {
    let goal_id = RoomId::parse(goal);
    for clause in sign_text.split(';') {
        let Some((list_text, direction)) = split_direction(clause) else {
            continue;
        };
        // The list must be introduced by "room"/"rooms" (any case).
        // ASCII lowercasing keeps byte offsets aligned with the original.
        let lower = list_text.to_ascii_lowercase();
        let Some(intro) = lower.find("room") else {
            continue;
        };
        let after_intro = &list_text[intro..];
        let list_start = after_intro
            .find(|c: char| c.is_ascii_digit())
            .map(|i| intro + i)
            .unwrap_or(list_text.len());
        let list = &list_text[list_start..];
        if covers(list, goal, goal_id.as_ref()) {
            return Some(direction);
        }
    }
    None
}

/// Split a clause at its direction keyword; the earliest keyword occurrence
/// wins, longer keywords taking precedence at equal positions.
fn split_direction(clause: &str) -> Option<(&str, Region)> {
    let lower = clause.to_ascii_lowercase();
    let mut best: Option<(usize, usize, Region)> = None;
    for &(keyword, region) in DIRECTIONS {
        if let Some(pos) = lower.find(keyword) {
            let better = match best {
                None => true,
                Some((best_pos, best_len, _)) => {
                    pos < best_pos || (pos == best_pos && keyword.len() > best_len)
                }
            };
            if better {
                best = Some((pos, keyword.len(), region));
            }
        }
    }
    best.map(|(pos, _, region)| (&clause[..pos], region))
}

fn covers(list: &str, goal: &str, goal_id: Option<&RoomId>) -> bool {
    for piece in list.split(',') {
        let piece = piece.trim();
        let Some(caps) = item_regex().captures(piece) else {
            continue;
        };
        match caps.name("b") {
            Some(b) => {
                // Range: covers iff the goal's numeric part lies inside.
                let (Some(goal_id), Some(lo), Some(hi)) = (
                    goal_id,
                    RoomId::parse(caps.name("a").unwrap().as_str()),
                    RoomId::parse(b.as_str()),
                ) else {
                    continue;
                };
                if (lo.number..=hi.number).contains(&goal_id.number) {
                    return true;
                }
            }
            None => {
                let item = caps.name("a").unwrap().as_str();
                if item == goal {
                    return true;
                }
                // A bare numeric item covers suffixed variants of the same
                // number ("641" lists the whole 641 cluster).
                if let (Some(item_id), Some(goal_id)) = (RoomId::parse(item), goal_id) {
                    if item_id.suffix.is_empty() && item_id.number == goal_id.number {
                        return true;
                    }
                }
            }
        }
    }
    false
}
