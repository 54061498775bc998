//! Euclidean domains of finite width and their ε-graphs.
//!
//! A domain is sampled on a grid of spacing `h`; intrinsic distances come from
//! straight segments when they stay in the closed domain and from Dijkstra on
//! the fine sample graph (radius `2.5h`) otherwise. The ε-graph joins samples
//! at intrinsic distance `< ε` and carries the problem `Δ∞u = ±ε²f`, `u = g`.

mod convergence;
mod domain;
mod sample;

use thiserror::Error;

use crate::problem::ProblemError;
use crate::solver::SolveError;

pub use convergence::{
    convergence_run, q_bar, uniform_bound_check, BoundaryEntry, ConvergenceConfig, ConvergenceReport, LevelReport,
    LevelStats, ModulusEntry, Summary, DEFAULT_MAX_SAMPLES,
};
pub use domain::{DomainSpec, FieldExpr, RhsSign, Shape, DEFAULT_H_FACTOR};
pub use sample::{build_eps_graph, intrinsic_distance, sample_domain, w_i, DomainSample, EpsGraphBundle, HopCheck};

pub type Pt = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EuclidError {
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("the sampled domain has no interior points at h = {0}")]
    EmptyInterior(f64),
    #[error("the sampled domain has no boundary points reachable from the interior")]
    NoBoundary,
    #[error("{count} samples exceed the cap of {cap}; use a coarser ε or a larger cap")]
    TooManySamples { count: usize, cap: usize },
    #[error("sample spacing h = {h} exceeds ε/10 for ε = {eps}")]
    StepTooLarge { h: f64, eps: f64 },
    #[error("interior sample {index} at {point:?} has no neighbour within ε = {eps}")]
    Isolated { index: usize, point: Pt, eps: f64 },
    #[error("ε schedule must be nonempty, positive and strictly decreasing")]
    Schedule,
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
