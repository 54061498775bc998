//! Tug-of-war: a fair coin decides each round which player moves the token to
//! a neighbour. Player I collects `r(x)` at every visited interior vertex and
//! `g(y)` on reaching the boundary; the value solves `Δ∞u = -2r`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{min_max, residual, CalcError};
use crate::field::ScalarField;
use crate::graph::{Graph, Vertex};
use crate::problem::{DirichletProblem, Partition, ProblemError};

pub const DEFAULT_MAX_ROUNDS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("start vertex {0} is not in the play region")]
    StartNotInterior(i64),
    #[error("round {round}: strategy moved from {from} to {to}, which is not a neighbour")]
    StrategyFault { round: usize, from: i64, to: i64 },
    #[error("round {round}: strategy has no move at vertex {at}")]
    NoMove { round: usize, at: i64 },
    #[error("all {0} games hit the round cap; no estimate is possible")]
    AllCapped(usize),
    #[error("need at least one game")]
    NoGames,
    #[error("vertex {0} has an incomplete neighbourhood; strategies need materialized neighbourhoods")]
    Truncated(i64),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

#[derive(Clone, Debug)]
pub struct GameConfig {
    pub graph: Arc<Graph>,
    pub partition: Partition,
    /// Running payoff on `X` (ignored on `Y`).
    pub running: ScalarField,
    /// Terminal payoff on `Y` (ignored on `X`).
    pub terminal: ScalarField,
    pub start: Vertex,
    pub max_rounds: usize,
    /// `d(Y, ·)` on the exposed graph, for [`Strategy::TowardBoundary`].
    boundary_distance: Vec<Option<usize>>,
}

impl GameConfig {
    pub fn new(
        graph: impl Into<Arc<Graph>>,
        interior: &[Vertex],
        running: ScalarField,
        terminal: ScalarField,
        start: Vertex,
        max_rounds: usize,
    ) -> Result<Self, GameError> {
        let graph = graph.into();
        // Reuse the problem validation (lengths, finiteness, connectivity).
        let problem = DirichletProblem::new(graph.clone(), interior, running.map(|r| -2.0 * r), terminal.clone())?;
        if start >= graph.len() || !problem.is_interior(start) {
            return Err(GameError::StartNotInterior(start as i64));
        }
        let boundary: Vec<Vertex> = problem.partition.boundary().collect();
        let boundary_distance = graph.distance_map(&boundary).map_err(ProblemError::from)?.raw().to_vec();
        Ok(GameConfig {
            graph,
            partition: problem.partition,
            running,
            terminal,
            start,
            max_rounds,
            boundary_distance,
        })
    }

    /// The PDE whose solution is the game value: `Δ∞u = -2r`, `u = g`.
    pub fn to_problem(&self) -> DirichletProblem {
        DirichletProblem::with_partition(
            self.graph.clone(),
            self.partition.clone(),
            self.running.map(|r| -2.0 * r),
            self.terminal.clone(),
        )
        .expect("validated at construction")
    }

    pub fn boundary_distance(&self, v: Vertex) -> Option<usize> {
        self.boundary_distance[v]
    }
}

#[derive(Clone, Debug)]
pub enum Strategy {
    /// Move to a neighbour maximising the field (smallest id on ties).
    GreedyMax(Arc<ScalarField>),
    /// Move to a neighbour minimising the field (smallest id on ties).
    GreedyMin(Arc<ScalarField>),
    /// Move to a neighbour strictly closer to `Y` (smallest id on ties).
    TowardBoundary,
    /// Fixed successor per vertex; unknown vertices are a fault.
    Scripted(HashMap<Vertex, Vertex>),
}

impl Strategy {
    fn choose(&self, cfg: &GameConfig, at: Vertex, round: usize) -> Result<Vertex, GameError> {
        let g = &*cfg.graph;
        if !matches!(self, Strategy::Scripted(_)) && !g.is_complete(at) {
            return Err(GameError::Truncated(g.id(at)));
        }
        let nbrs = g.neighbors(at);
        let pick = |score: &dyn Fn(Vertex) -> f64| {
            let mut best: Option<Vertex> = None;
            for &w in nbrs {
                let better = match best {
                    None => true,
                    Some(b) => score(w) > score(b) || (score(w) == score(b) && g.id(w) < g.id(b)),
                };
                if better {
                    best = Some(w);
                }
            }
            best
        };
        let choice = match self {
            Strategy::GreedyMax(u) => pick(&|w| u[w]),
            Strategy::GreedyMin(u) => pick(&|w| -u[w]),
            Strategy::TowardBoundary => {
                let here = cfg.boundary_distance[at];
                pick(&|w| match (cfg.boundary_distance[w], here) {
                    (Some(d), Some(h)) if d < h => -(d as f64),
                    _ => f64::NEG_INFINITY,
                })
                .filter(|&w| matches!((cfg.boundary_distance[w], here), (Some(d), Some(h)) if d < h))
            }
            Strategy::Scripted(map) => map.get(&at).copied(),
        };
        let to = choice.ok_or(GameError::NoMove { round, at: g.id(at) })?;
        if !g.are_adjacent(at, to) {
            return Err(GameError::StrategyFault { round, from: g.id(at), to: g.id(to as Vertex) });
        }
        Ok(to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ending {
    Terminal(Vertex),
    Capped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    /// `x₀ … xₙ`, followed by the terminal vertex when the game ended.
    pub visited: Vec<Vertex>,
    pub coins: Vec<Player>,
    pub ending: Ending,
    /// `Σ r(x_k) + g(y)`; `None` for capped games.
    pub payoff: Option<f64>,
}

impl Transcript {
    pub fn rounds(&self) -> usize {
        self.coins.len()
    }

    /// Payoff recomputed from the visited list.
    pub fn recompute_payoff(&self, cfg: &GameConfig) -> Option<f64> {
        match self.ending {
            Ending::Capped => None,
            Ending::Terminal(y) => {
                let n = self.visited.len() - 1;
                let run: f64 = self.visited[..n].iter().map(|&x| cfg.running[x]).sum();
                Some(run + cfg.terminal[y])
            }
        }
    }
}

fn coin_stream(seed: u64, game: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(game);
    rng
}

fn play_indexed(cfg: &GameConfig, one: &Strategy, two: &Strategy, seed: u64, game: u64) -> Result<Transcript, GameError> {
    let mut rng = coin_stream(seed, game);
    let mut at = cfg.start;
    let mut visited = vec![at];
    let mut coins = Vec::new();
    let mut payoff = 0.0;
    while coins.len() < cfg.max_rounds {
        payoff += cfg.running[at];
        let player = if rng.next_u32() & 1 == 0 { Player::One } else { Player::Two };
        let strategy = match player {
            Player::One => one,
            Player::Two => two,
        };
        let round = coins.len();
        coins.push(player);
        at = strategy.choose(cfg, at, round)?;
        visited.push(at);
        if !cfg.partition.is_interior(at) {
            return Ok(Transcript {
                visited,
                coins,
                ending: Ending::Terminal(at),
                payoff: Some(payoff + cfg.terminal[at]),
            });
        }
    }
    Ok(Transcript { visited, coins, ending: Ending::Capped, payoff: None })
}

/// One game; the coin stream is determined by `seed`.
pub fn play_game(cfg: &GameConfig, one: &Strategy, two: &Strategy, seed: u64) -> Result<Transcript, GameError> {
    play_indexed(cfg, one, two, seed, 0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    /// Games that hit `max_rounds`; excluded from the mean.
    pub capped: usize,
    /// Games requested.
    pub n: usize,
    pub seed: u64,
}

/// Monte-Carlo mean of the payoff over `n_games` independent games. Game `i`
/// uses stream `i` of the seeded generator; the reduction is sequential in
/// game order, so results do not depend on thread scheduling.
pub fn estimate_value(
    cfg: &GameConfig,
    one: &Strategy,
    two: &Strategy,
    n_games: usize,
    seed: u64,
) -> Result<Estimate, GameError> {
    if n_games == 0 {
        return Err(GameError::NoGames);
    }
    let payoffs: Vec<Option<f64>> = (0..n_games as u64)
        .into_par_iter()
        .map(|i| play_indexed(cfg, one, two, seed, i).map(|t| t.payoff))
        .collect::<Result<_, _>>()?;
    // Welford: exact for constant samples.
    let (mut count, mut mean, mut m2, mut capped) = (0usize, 0.0f64, 0.0f64, 0usize);
    for p in payoffs {
        match p {
            None => capped += 1,
            Some(x) => {
                count += 1;
                let delta = x - mean;
                mean += delta / count as f64;
                m2 += delta * (x - mean);
            }
        }
    }
    if count == 0 {
        return Err(GameError::AllCapped(n_games));
    }
    let var = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
    Ok(Estimate { mean, stderr: (var / count as f64).sqrt(), capped, n: n_games, seed })
}

/// `sup |Δ∞u + 2r|` over `X`, plus the boundary mismatch `sup |u - g|`.
pub fn dpp_check(cfg: &GameConfig, u: &ScalarField) -> Result<f64, GameError> {
    Ok(residual(&cfg.to_problem(), u)?.sup_norm)
}

/// Expected one-step value under greedy play: `(u₊ + u₋)/2 + r`.
pub fn dpp_update(cfg: &GameConfig, u: &ScalarField, x: Vertex) -> f64 {
    let (lo, hi) = min_max(cfg.graph.neighbors(x), u.values());
    (lo + hi) / 2.0 + cfg.running[x]
}
