//! Grid ↔ world SE(2) pose mapping and odometry-frame calibration.
//!
//! Axis convention: world y points up while grid rows grow downward, so cell
//! (row, col) maps to the local vector (col, −row) before rotation by the
//! frame heading and scaling by the resolution. Facing angles: Right = 0,
//! Up = π/2, Left = π, Down = −π/2. All headings normalize to (−π, π].

use std::f64::consts::PI;

use crate::agent::StepAction;
use crate::grid::Cell;

/// Anchors the grid to the world: world coordinates of cell (0,0)'s center,
/// the orientation of the grid's column axis, and meters per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFrame {
    pub origin: (f64, f64),
    pub heading: f64,
    pub resolution: f64,
}

impl GridFrame {
    pub fn new(origin: (f64, f64), heading: f64, resolution: f64) -> Self {
        assert!(resolution > 0.0, "resolution must be positive, got {resolution}");
        Self { origin, heading, resolution }
    }
}

/// A planar pose (or rigid transform): position plus heading in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SE2Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl SE2Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta: normalize_angle(theta) }
    }

    pub fn identity() -> Self {
        Self { x: 0.0, y: 0.0, theta: 0.0 }
    }

    /// `self ∘ other`: apply `other` in `self`'s frame.
    pub fn compose(self, other: SE2Pose) -> SE2Pose {
        let (sin, cos) = self.theta.sin_cos();
        SE2Pose::new(
            self.x + cos * other.x - sin * other.y,
            self.y + sin * other.x + cos * other.y,
            self.theta + other.theta,
        )
    }

    pub fn inverse(self) -> SE2Pose {
        let (sin, cos) = self.theta.sin_cos();
        SE2Pose::new(-(cos * self.x + sin * self.y), sin * self.x - cos * self.y, -self.theta)
    }
}

/// Normalize an angle to (−π, π].
pub fn normalize_angle(theta: f64) -> f64 {
    let wrapped = theta.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Facing angle of a primitive move: Right = 0, Up = π/2, Left = π,
/// Down = −π/2.
pub fn facing_angle(action: StepAction) -> f64 {
    match action {
        StepAction::Right => 0.0,
        StepAction::Up => PI / 2.0,
        StepAction::Left => PI,
        StepAction::Down => -PI / 2.0,
    }
}

/// World pose of a cell center with the given facing.
pub fn cell_to_pose(frame: &GridFrame, cell: Cell, facing: StepAction) -> SE2Pose {
    let (sin, cos) = frame.heading.sin_cos();
    let local_x = cell.col as f64;
    let local_y = -(cell.row as f64);
    SE2Pose::new(
        frame.origin.0 + frame.resolution * (cos * local_x - sin * local_y),
        frame.origin.1 + frame.resolution * (sin * local_x + cos * local_y),
        frame.heading + facing_angle(facing),
    )
}

/// Inverse of [`cell_to_pose`] by nearest-cell quantization. `None` when the
/// pose quantizes outside the non-negative grid quadrant.
pub fn pose_to_cell(frame: &GridFrame, pose: &SE2Pose) -> Option<Cell> {
    let dx = (pose.x - frame.origin.0) / frame.resolution;
    let dy = (pose.y - frame.origin.1) / frame.resolution;
    let (sin, cos) = frame.heading.sin_cos();
    // Rotate back by −heading.
    let local_x = cos * dx + sin * dy;
    let local_y = -sin * dx + cos * dy;
    let col = local_x.round();
    let row = (-local_y).round();
    if row < 0.0 || col < 0.0 {
        return None;
    }
    Some(Cell::new(row as usize, col as usize))
}

/// Fixed transform from the grid frame to the odometry frame, computed by
/// standing at a known cell (with a known facing) and reading the odometry
/// pose there: `T ∘ cell_to_pose(frame, known_cell, facing) == observed`.
pub fn calibrate(
    known_cell: Cell,
    frame: &GridFrame,
    observed_odom_pose: &SE2Pose,
    facing: StepAction,
) -> SE2Pose {
    let grid_pose = cell_to_pose(frame, known_cell, facing);
    observed_odom_pose.compose(grid_pose.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &SE2Pose, b: &SE2Pose, tol: f64) -> bool {
        // Compare headings on the circle.
        let dtheta = normalize_angle(a.theta - b.theta).abs();
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && dtheta <= tol
    }

    #[test]
    fn identity_frame_origin_cell() {
        let frame = GridFrame::new((0.0, 0.0), 0.0, 1.0);
        let pose = cell_to_pose(&frame, Cell::new(0, 0), StepAction::Right);
        assert!(close(&pose, &SE2Pose::identity(), 1e-15));
    }

    #[test]
    fn columns_map_to_x() {
        let frame = GridFrame::new((0.0, 0.0), 0.0, 1.0);
        let pose = cell_to_pose(&frame, Cell::new(0, 3), StepAction::Right);
        assert!(close(&pose, &SE2Pose::new(3.0, 0.0, 0.0), 1e-12));
        // Rows go down, world y goes up.
        let pose = cell_to_pose(&frame, Cell::new(2, 0), StepAction::Right);
        assert!(close(&pose, &SE2Pose::new(0.0, -2.0, 0.0), 1e-12));
    }

    #[test]
    fn rotated_scaled_frame_matches_hand_computation() {
        // heading π/2, resolution 0.5, cell (2,4): local (4,−2) rotates to
        // (2,4), scaled to (1,2).
        let frame = GridFrame::new((0.0, 0.0), PI / 2.0, 0.5);
        let pose = cell_to_pose(&frame, Cell::new(2, 4), StepAction::Right);
        assert!(close(&pose, &SE2Pose::new(1.0, 2.0, PI / 2.0), 1e-12), "{pose:?}");
    }

    #[test]
    fn facing_angles() {
        let frame = GridFrame::new((0.0, 0.0), 0.0, 1.0);
        assert_eq!(cell_to_pose(&frame, Cell::new(0, 0), StepAction::Up).theta, PI / 2.0);
        assert_eq!(cell_to_pose(&frame, Cell::new(0, 0), StepAction::Left).theta, PI);
        assert_eq!(cell_to_pose(&frame, Cell::new(0, 0), StepAction::Down).theta, -PI / 2.0);
    }

    #[test]
    fn normalize_lands_in_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        // Circular distance; 3π may wrap to either end of the interval.
        let wrapped = normalize_angle(3.0 * PI);
        assert!(normalize_angle(wrapped - PI).abs() < 1e-12);
        assert!(wrapped > -PI && wrapped <= PI);
        assert!((normalize_angle(-0.25) - -0.25).abs() < 1e-15);
    }

    #[test]
    fn pose_round_trips_to_cell() {
        let frame = GridFrame::new((3.25, -1.5), 0.7, 0.25);
        for row in (0..50).step_by(7) {
            for col in (0..50).step_by(7) {
                let cell = Cell::new(row, col);
                let pose = cell_to_pose(&frame, cell, StepAction::Up);
                assert_eq!(pose_to_cell(&frame, &pose), Some(cell));
            }
        }
    }

    #[test]
    fn identity_calibration_when_odometry_agrees() {
        let frame = GridFrame::new((1.0, 2.0), 0.3, 0.5);
        let cell = Cell::new(4, 9);
        let observed = cell_to_pose(&frame, cell, StepAction::Left);
        let transform = calibrate(cell, &frame, &observed, StepAction::Left);
        assert!(close(&transform, &SE2Pose::identity(), 1e-12), "{transform:?}");
    }

    #[test]
    fn translation_offset_recovered() {
        let frame = GridFrame::new((0.0, 0.0), 0.0, 1.0);
        let cell = Cell::new(2, 3);
        let grid_pose = cell_to_pose(&frame, cell, StepAction::Right);
        let observed = SE2Pose::new(grid_pose.x + 5.0, grid_pose.y - 2.0, grid_pose.theta);
        let transform = calibrate(cell, &frame, &observed, StepAction::Right);
        assert!(close(&transform, &SE2Pose::new(5.0, -2.0, 0.0), 1e-12), "{transform:?}");
    }

    #[test]
    fn compose_inverse_is_identity() {
        let pose = SE2Pose::new(3.7, -1.2, 2.1);
        let round = pose.compose(pose.inverse());
        assert!(close(&round, &SE2Pose::identity(), 1e-12), "{round:?}");
    }
}
