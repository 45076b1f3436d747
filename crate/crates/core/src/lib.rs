//! Semantic goal navigation in partially observable 2D grid worlds.
//!
//! A deterministic simulator and planning toolkit: grid environments with
//! room-number and sign semantics, a k×k partial observation model, a
//! confidence-grid belief heatmap steered by pluggable goal-region predictors
//! (rule-based, scripted, uniform, or an external process over JSON), A* and
//! frontier planning, the navigation control loop with its baselines, SPL/SR
//! benchmarking, renderers, and grid-to-world SE(2) pose math.

pub mod agent;
pub mod belief;
pub mod eval;
pub mod grid;
pub mod perception;
pub mod planning;
pub mod predictor;
pub mod render;
pub mod worldlink;

pub use agent::{AgentConfig, Episode, EpisodeStatus, Policy, StepAction};
pub use belief::{ConfidenceGrid, Region};
pub use grid::{Cell, Environment, GoalSpec};
pub use perception::AgentBelief;
