//! Deterministic rule-based predictor: the offline stand-in for the LLM.
//!
//! Pipeline, in priority order:
//! 1. Sign directives — if any seen sign covers the goal identifier, answer
//!    with that sign's direction.
//! 2. Numbering trends — with at least two seen room numbers, fit linear
//!    trends of numeric value against column and against row, pick the axis
//!    with the stronger correlation, and point toward where the goal's number
//!    extrapolates. When odd and even rooms occupy distinct bands, the fit is
//!    restricted to the goal's parity class.
//! 3. Abstain.

use crate::belief::Region;
use crate::grid::{Cell, RoomId, ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT};

use super::{parse_sign, GoalRegionPredictor, PredictionQuery, PredictionResult, PredictorError};

/// Pure-function predictor reproducing the sign/numbering/parity inference
/// classes. Identical queries always yield identical results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulePredictor;

impl GoalRegionPredictor for RulePredictor {
    fn predict(&mut self, query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        Ok(rule_predict(query))
    }
}

/// See [`RulePredictor`].
pub fn rule_predict(query: &PredictionQuery<'_>) -> PredictionResult {
    // 1. Signs dominate trends; the covering sign nearest to the agent wins
    //    (row-major order on ties).
    let covering = query
        .seen_sem
        .iter_non_empty()
        .filter_map(|(cell, attrs)| {
            let text = attrs.get(ATTR_SIGN_TEXT)?;
            parse_sign(text, query.goal).map(|region| (cell, region))
        })
        .min_by_key(|(cell, _)| (cell.manhattan(query.agent_pos), *cell));
    if let Some((cell, region)) = covering {
        return PredictionResult {
            reasoning: format!("sign at {cell} lists goal {} {region}", query.goal),
            patterns: vec![format!("sign at {cell} covers goal {}", query.goal)],
            region: Some(region),
        };
    }

    // 2. Least-squares trend over seen room numbers.
    let rooms: Vec<(Cell, u64)> = query
        .seen_sem
        .iter_non_empty()
        .filter_map(|(cell, attrs)| {
            attrs
                .get(ATTR_ROOM_NUMBER)
                .and_then(|id| RoomId::parse(id))
                .map(|id| (cell, id.number))
        })
        .collect();
    let Some(goal_id) = RoomId::parse(query.goal) else {
        return PredictionResult::abstain();
    };
    if rooms.len() < 2 {
        return PredictionResult::abstain();
    }

    let mut patterns = Vec::new();
    let fit_set: Vec<(Cell, u64)> = match parity_band_subset(&rooms, goal_id.number) {
        Some(subset) => {
            // Parities occupy distinct bands: only the goal's parity class is
            // informative. A cross-parity fit would read the side-of-corridor
            // assignment as a spatial trend.
            patterns.push("odd/even separation".to_string());
            if subset.len() < 2 {
                return PredictionResult {
                    reasoning: "goal parity class has too few observations".into(),
                    patterns,
                    region: None,
                };
            }
            subset
        }
        None => rooms.clone(),
    };

    let col_fit = linear_fit(fit_set.iter().map(|(c, n)| (c.col as f64, *n as f64)));
    let row_fit = linear_fit(fit_set.iter().map(|(c, n)| (c.row as f64, *n as f64)));
    let (fit, along_cols) = if col_fit.correlation.abs() >= row_fit.correlation.abs() {
        (col_fit, true)
    } else {
        (row_fit, false)
    };
    if fit.correlation == 0.0 || fit.slope == 0.0 {
        return PredictionResult { reasoning: "no numbering trend".into(), patterns, region: None };
    }

    let agent_coord =
        if along_cols { query.agent_pos.col as f64 } else { query.agent_pos.row as f64 };
    let predicted_here = fit.slope * agent_coord + fit.intercept;
    let goal_number = goal_id.number as f64;
    if goal_number == predicted_here {
        return PredictionResult {
            reasoning: "goal number extrapolates to the agent's own coordinate".into(),
            patterns,
            region: None,
        };
    }
    let increasing = (goal_number > predicted_here) == (fit.slope > 0.0);
    let region = match (along_cols, increasing) {
        (true, true) => Region::Right,
        (true, false) => Region::Left,
        (false, true) => Region::Down,
        (false, false) => Region::Up,
    };
    patterns.push(match (along_cols, fit.slope > 0.0) {
        (true, true) => "room numbers increase to the right".to_string(),
        (true, false) => "room numbers increase to the left".to_string(),
        (false, true) => "room numbers increase downward".to_string(),
        (false, false) => "room numbers increase upward".to_string(),
    });
    PredictionResult {
        reasoning: format!(
            "goal {} vs {:.1} extrapolated at the agent's {}: go {region}",
            query.goal,
            predicted_here,
            if along_cols { "column" } else { "row" },
        ),
        patterns,
        region: Some(region),
    }
}

/// When odd and even room numbers occupy disjoint row bands (or disjoint
/// column bands), return the rooms sharing the goal's parity.
fn parity_band_subset(rooms: &[(Cell, u64)], goal_number: u64) -> Option<Vec<(Cell, u64)>> {
    let odd: Vec<&(Cell, u64)> = rooms.iter().filter(|(_, n)| n % 2 == 1).collect();
    let even: Vec<&(Cell, u64)> = rooms.iter().filter(|(_, n)| n % 2 == 0).collect();
    if odd.is_empty() || even.is_empty() {
        return None;
    }
    let disjoint = |f: fn(&Cell) -> usize| {
        odd.iter().all(|(c, _)| even.iter().all(|(e, _)| f(c) != f(e)))
    };
    let split_rows = disjoint(|c| c.row);
    let split_cols = disjoint(|c| c.col);
    if !split_rows && !split_cols {
        return None;
    }
    let wanted = goal_number % 2;
    Some(rooms.iter().filter(|(_, n)| n % 2 == wanted).copied().collect())
}

struct Fit {
    slope: f64,
    intercept: f64,
    correlation: f64,
}

/// Ordinary least squares of value against coordinate; correlation is 0 when
/// either variance vanishes.
fn linear_fit(points: impl Iterator<Item = (f64, f64)> + Clone) -> Fit {
    let n = points.clone().count() as f64;
    let mean_x = points.clone().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.clone().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        syy += (y - mean_y) * (y - mean_y);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Fit { slope: 0.0, intercept: mean_y, correlation: 0.0 };
    }
    let slope = sxy / sxx;
    Fit { slope, intercept: mean_y - slope * mean_x, correlation: sxy / (sxx * syy).sqrt() }
}
