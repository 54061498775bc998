//! Barrier-initialised monotone value iteration for `Δ∞u = f`, `u = g`.
//!
//! The update `u'(x) = (u₊(x) + u₋(x) - f(x)) / 2` is monotone and
//! nonexpansive in the sup norm, and fixes exactly the solutions. Started from
//! the upper barrier envelope (a supersolution, so `sweep(w) ≤ w`) the iterates
//! decrease pointwise; from the lower envelope they increase.

pub mod amle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{barrier_envelope, min_max, residual, CalcError, Side};
use crate::field::ScalarField;
use crate::graph::{Vertex, Width};
use crate::problem::DirichletProblem;

pub use amle::solve_exact_amle;

/// Interior sizes from which Jacobi sweeps fan out over threads.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("the interior has infinite width ({0:?}); bounded solutions need finite width and may not exist otherwise")]
    InfiniteWidth(Width),
    #[error("interior vertex {0} has an incomplete neighbourhood; solve on a materialized graph (truncation-limited)")]
    TruncationLimited(i64),
    #[error("initial field has {got} values, expected {expected}")]
    InitLength { got: usize, expected: usize },
    #[error("f must vanish identically for the exact solver")]
    NonzeroF,
    #[error(transparent)]
    Calc(#[from] CalcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Jacobi,
    GaussSeidel,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum Init {
    #[default]
    UpperBarrier,
    LowerBarrier,
    Field(ScalarField),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Upper,
    Lower,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub init: Init,
    pub tol: f64,
    pub max_iters: usize,
    pub scheme: Scheme,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { init: Init::UpperBarrier, tol: 1e-9, max_iters: 1_000_000, scheme: Scheme::Jacobi }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub field: ScalarField,
    pub residual: f64,
    pub iterations: usize,
    /// Sup-norm change of each sweep.
    pub history: Vec<f64>,
    pub init: InitKind,
    pub converged: bool,
}

fn check_solvable(p: &DirichletProblem) -> Result<(), SolveError> {
    if let Some(&x) = p.interior().iter().find(|&&x| !p.graph.is_complete(x)) {
        return Err(SolveError::TruncationLimited(p.graph.id(x)));
    }
    match p.width() {
        Width::Finite(_) => Ok(()),
        _ if p.interior().is_empty() => Ok(()),
        w => Err(SolveError::InfiniteWidth(w)),
    }
}

#[inline]
fn update(p: &DirichletProblem, u: &[f64], x: Vertex) -> f64 {
    let (lo, hi) = min_max(p.graph.neighbors(x), u);
    (lo + hi - p.f[x]) / 2.0
}

/// One Jacobi sweep: `u'(x) = (u₊ + u₋ - f)/2` on `X`, `u' = g` on `Y`.
/// The input is read with its boundary values replaced by `g`.
pub fn sweep(p: &DirichletProblem, u: &ScalarField) -> Result<ScalarField, SolveError> {
    check_solvable(p)?;
    if u.len() != p.graph.len() {
        return Err(SolveError::InitLength { got: u.len(), expected: p.graph.len() });
    }
    let mut out = p.boundary_extension(0.0);
    let mut input = u.clone();
    for y in p.partition.boundary() {
        input[y] = p.g[y];
    }
    let vals = jacobi_values(p, input.values());
    for (&x, v) in p.interior().iter().zip(vals) {
        out[x] = v;
    }
    Ok(out)
}

fn jacobi_values(p: &DirichletProblem, u: &[f64]) -> Vec<f64> {
    let xs = p.interior();
    if xs.len() >= PARALLEL_THRESHOLD {
        xs.par_iter().map(|&x| update(p, u, x)).collect()
    } else {
        xs.iter().map(|&x| update(p, u, x)).collect()
    }
}

pub fn initial_field(p: &DirichletProblem, init: &Init) -> Result<(ScalarField, InitKind), SolveError> {
    Ok(match init {
        Init::UpperBarrier => (barrier_envelope(p, Side::Upper)?, InitKind::Upper),
        Init::LowerBarrier => (barrier_envelope(p, Side::Lower)?, InitKind::Lower),
        Init::Field(f) => {
            if f.len() != p.graph.len() {
                return Err(SolveError::InitLength { got: f.len(), expected: p.graph.len() });
            }
            let mut u = f.clone();
            for y in p.partition.boundary() {
                u[y] = p.g[y];
            }
            (u, InitKind::Custom)
        }
    })
}

/// Iterates until the residual and the last sweep change are both ≤ `tol`,
/// or `max_iters` sweeps have run (then `converged = false`).
pub fn solve(p: &DirichletProblem, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    check_solvable(p)?;
    let (mut u, init) = initial_field(p, &opts.init)?;
    let xs = p.interior();
    let order: Vec<Vertex> = {
        let mut o = xs.to_vec();
        o.sort_by_key(|&x| p.graph.id(x));
        o
    };
    let mut history = Vec::new();
    let mut converged = xs.is_empty();
    let mut res = if converged { residual(p, &u)?.sup_norm } else { f64::INFINITY };
    while !converged && history.len() < opts.max_iters {
        let change = match opts.scheme {
            Scheme::Jacobi => {
                let next = jacobi_values(p, u.values());
                let mut change = 0.0f64;
                for (&x, v) in xs.iter().zip(next) {
                    let old = u[x];
                    debug_assert!(
                        init != InitKind::Upper || v <= old + 1e-12 * (1.0 + old.abs()),
                        "iterates from the upper barrier must not increase (vertex {x}: {old} -> {v})"
                    );
                    debug_assert!(
                        init != InitKind::Lower || v >= old - 1e-12 * (1.0 + old.abs()),
                        "iterates from the lower barrier must not decrease (vertex {x}: {old} -> {v})"
                    );
                    change = change.max((v - old).abs());
                    u[x] = v;
                }
                change
            }
            Scheme::GaussSeidel => {
                let mut change = 0.0f64;
                for &x in &order {
                    let v = update(p, u.values(), x);
                    change = change.max((v - u[x]).abs());
                    u[x] = v;
                }
                change
            }
        };
        history.push(change);
        if change <= opts.tol {
            res = residual(p, &u)?.sup_norm;
            converged = res <= opts.tol;
        }
    }
    if !converged {
        res = residual(p, &u)?.sup_norm;
    }
    Ok(SolveOutcome { field: u, residual: res, iterations: history.len(), history, init, converged })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Uniqueness {
    UniqueEvidence { gap: f64, threshold: f64, f_one_signed: bool },
    DistinctSolutions { gap: f64, threshold: f64, u_hi: ScalarField, u_lo: ScalarField },
}

impl Uniqueness {
    pub fn gap(&self) -> f64 {
        match self {
            Uniqueness::UniqueEvidence { gap, .. } | Uniqueness::DistinctSolutions { gap, .. } => *gap,
        }
    }
}

/// Solves from both barrier envelopes and compares the limits.
///
/// The gap threshold is `max(100·tol, tol·(W+1)²)`: a residual of `tol` can
/// move a solution by roughly `tol` times the squared width.
pub fn uniqueness_probe(p: &DirichletProblem, opts: &SolveOptions) -> Result<Uniqueness, SolveError> {
    let hi = solve(p, &SolveOptions { init: Init::UpperBarrier, ..opts.clone() })?;
    let lo = solve(p, &SolveOptions { init: Init::LowerBarrier, ..opts.clone() })?;
    for out in [&hi, &lo] {
        if !out.converged {
            return Err(CalcError::Precondition(format!(
                "solve did not converge within {} sweeps (residual {})",
                out.iterations, out.residual
            ))
            .into());
        }
    }
    let w = p.width().finite().unwrap_or(0) as f64;
    let threshold = (100.0 * opts.tol).max(opts.tol * (w + 1.0) * (w + 1.0));
    let gap = hi.field.sup_distance(&lo.field);
    Ok(if gap <= threshold {
        Uniqueness::UniqueEvidence { gap, threshold, f_one_signed: p.f_sign().is_some() }
    } else {
        Uniqueness::DistinctSolutions { gap, threshold, u_hi: hi.field, u_lo: lo.field }
    })
}
