//! Concrete graphs and fields with known properties.
//!
//! Id layouts are part of each generator's contract so tests and callers can
//! address named vertices.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::UnexposedBounds;
use crate::field::ScalarField;
use crate::graph::{Graph, GraphBuilder, GraphKind, Vertex};
use crate::problem::{DirichletProblem, ProblemError};
use crate::solver::{solve, SolveError, SolveOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalleryError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("tail sums are not certified to {required:e} relative precision (bracket {achieved:e}); use at least {terms} terms")]
    TailPrecision { required: f64, achieved: f64, terms: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Two 4-vertex rails joined by two rungs; `X` is the middle square.
///
/// Ids: bottom rail `0..=3` with `u = (0, -1, -1, 0)`, top rail `4..=7` with
/// `u = (0, 1, 1, 0)`, rungs `1-5` and `2-6`, `X = {1, 2, 5, 6}`.
#[derive(Clone, Debug)]
pub struct SignChange {
    pub problem: DirichletProblem,
    pub u: ScalarField,
    /// `u + a·1_X` solves the same problem for every `a` in this range.
    pub family: (f64, f64),
}

impl SignChange {
    pub fn shifted(&self, a: f64) -> ScalarField {
        let mut w = self.u.clone();
        for &x in self.problem.interior() {
            w[x] += a;
        }
        w
    }
}

pub fn sign_change_example() -> SignChange {
    let edges = [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (1, 5), (2, 6)];
    let graph = Graph::from_edges(8, &edges).expect("fixed edge list");
    let u = ScalarField::new(vec![0.0, -1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    let interior = [1, 2, 5, 6];
    let f = ScalarField::from_fn(8, |v| {
        if interior.contains(&v) {
            crate::calculus::inf_laplacian(&graph, &u, v).expect("interior vertices are complete")
        } else {
            0.0
        }
    });
    let problem = DirichletProblem::new(graph, &interior, f, ScalarField::zeros(8)).expect("valid problem");
    SignChange { problem, u, family: (-1.0, 1.0) }
}

/// Window `0..=N` of the graph on `ℕ₀` with edges `0 ~ k` and `k ~ 2k`.
///
/// Ids equal the integers. `k ≥ 1` is complete iff `2k ≤ N`; the hub `0`
/// is never complete. `X = {1..=N}`, `Y = {0}`, `g = 0`, `f = 0`.
#[derive(Clone, Debug)]
pub struct Doubling {
    pub problem: DirichletProblem,
    /// `u(n) = n`: an unbounded solution.
    pub u: ScalarField,
    /// `v ≡ 0`: the bounded solution.
    pub v: ScalarField,
}

impl Doubling {
    /// Both solutions are ≥ 0 and `f = 0` everywhere, including unexposed vertices.
    pub fn unexposed_bounds(&self) -> UnexposedBounds {
        UnexposedBounds { inf_u: 0.0, sup_f: 0.0 }
    }
}

pub fn doubling_graph(n: usize) -> Result<Doubling, GalleryError> {
    if n < 4 {
        return Err(GalleryError::Param(format!("doubling graph needs N ≥ 4, got {n}")));
    }
    let mut b = GraphBuilder::with_vertices(n + 1);
    for k in 1..=n {
        b.add_edge(0, k).expect("in range");
        if 2 * k <= n {
            b.add_edge(k, 2 * k).expect("in range");
        } else {
            b.mark_incomplete(k);
        }
    }
    b.mark_incomplete(0);
    b.kind(GraphKind::Truncated { root: 0, radius: None });
    let graph = b.build();
    let interior: Vec<Vertex> = (1..=n).collect();
    let problem = DirichletProblem::new(graph, &interior, ScalarField::zeros(n + 1), ScalarField::zeros(n + 1))?;
    Ok(Doubling { problem, u: ScalarField::from_fn(n + 1, |k| k as f64), v: ScalarField::zeros(n + 1) })
}

/// Comb with shaft `(n, 0)`, `0 ≤ n < teeth`, and teeth `(n, l)`, `l ≤ l_n = (n + C)³`.
///
/// Vertex `(n, l)` has index `offset[n] + l`, ids equal indices. Teeth longer
/// than `tooth_depth` are cut there, so their tips are not exposed. The shaft
/// end `(teeth - 1, 0)` is incomplete. `X = {l < l_n}`, tips carry `g = 0`,
/// and `f = -1/l_n` on the shaft, `0` on teeth (the equation `Δ∞u = f`).
#[derive(Clone, Debug)]
pub struct Comb {
    pub c: u64,
    pub problem: DirichletProblem,
    pub offsets: Vec<usize>,
    pub lengths: Vec<u64>,
    /// `T_n = Σ_{k ≥ n} (C + k)⁻³` for `0 ≤ n ≤ teeth`.
    pub tails: Vec<f64>,
    /// `u(n, l) = (l_n - l)/l_n`.
    pub u: ScalarField,
    /// `v(0,0) = l_0·T_0`, `v(n,0) = v(n-1,0) + T_n`, linear along teeth.
    pub v: ScalarField,
    /// `v(n,0) - v(n-1,0) - v(n,0)/(C+n)³` for `1 ≤ n < teeth`.
    pub margins: Vec<f64>,
}

impl Comb {
    pub fn vertex(&self, n: usize, l: usize) -> Option<Vertex> {
        let depth = self.offsets.get(n + 1).copied().unwrap_or(self.problem.graph.len()) - self.offsets.get(n)?;
        (l < depth).then(|| self.offsets[n] + l)
    }

    pub fn teeth(&self) -> usize {
        self.lengths.len()
    }

    /// `u`, `v` ≥ 0 and `f ≤ 0` hold on the unexposed part as well.
    pub fn unexposed_bounds(&self) -> UnexposedBounds {
        UnexposedBounds { inf_u: 0.0, sup_f: 0.0 }
    }
}

/// Partial sum of `K` terms plus the midpoint of the integral remainder bracket,
/// then the downward recursion `T_n = T_{n+1} + (C+n)⁻³`.
fn comb_tails(c: u64, top: usize, terms: usize) -> Result<Vec<f64>, GalleryError> {
    let base = (c + top as u64) as f64;
    // Sum smallest terms first.
    let partial: f64 = (0..terms).rev().map(|k| (base + k as f64).powi(-3)).sum();
    let hi = 0.5 * (base + terms as f64 - 1.0).powi(-2);
    let lo = 0.5 * (base + terms as f64).powi(-2);
    let tail = partial + 0.5 * (lo + hi);
    let required = 1e-8;
    let achieved = (hi - lo) / tail;
    if achieved > required {
        let needed = ((base / required).sqrt() as usize).max(terms * 2);
        return Err(GalleryError::TailPrecision { required, achieved, terms: needed });
    }
    let mut tails = vec![0.0; top + 1];
    tails[top] = tail;
    for n in (0..top).rev() {
        tails[n] = tails[n + 1] + ((c + n as u64) as f64).powi(-3);
    }
    Ok(tails)
}

pub fn comb_graph(c: u64, teeth: usize, tooth_depth: Option<u64>) -> Result<Comb, GalleryError> {
    if c < 2 {
        return Err(GalleryError::Param(format!("comb needs C ≥ 2, got {c}")));
    }
    if teeth < 2 {
        return Err(GalleryError::Param(format!("comb needs at least 2 teeth, got {teeth}")));
    }
    if tooth_depth == Some(0) {
        return Err(GalleryError::Param("tooth depth must be ≥ 1".into()));
    }
    let lengths: Vec<u64> = (0..teeth as u64).map(|n| (n + c).pow(3)).collect();
    let depths: Vec<u64> = lengths.iter().map(|&l| tooth_depth.map_or(l, |d| d.min(l))).collect();
    let mut offsets = Vec::with_capacity(teeth);
    let mut total = 0usize;
    for &d in &depths {
        offsets.push(total);
        total += d as usize + 1;
    }
    let tails = comb_tails(c, teeth, 1_000_000)?;

    let mut b = GraphBuilder::with_vertices(total);
    let mut interior = Vec::with_capacity(total);
    let mut f = ScalarField::zeros(total);
    let mut u = ScalarField::zeros(total);
    let mut v = ScalarField::zeros(total);
    let mut shaft = 0.0;
    for n in 0..teeth {
        let (o, d, len) = (offsets[n], depths[n] as usize, lengths[n]);
        if n + 1 < teeth {
            b.add_edge(o, offsets[n + 1]).expect("in range");
        } else {
            b.mark_incomplete(o);
        }
        shaft = if n == 0 { len as f64 * tails[0] } else { shaft + tails[n] };
        for l in 0..=d {
            if l < d {
                b.add_edge(o + l, o + l + 1).expect("in range");
            } else if (d as u64) < len {
                b.mark_incomplete(o + l);
            }
            if (l as u64) < len {
                interior.push(o + l);
            }
            let frac = (len - l as u64) as f64 / len as f64;
            u[o + l] = frac;
            v[o + l] = frac * shaft;
        }
        f[o] = -1.0 / len as f64;
    }
    b.kind(GraphKind::Truncated { root: 0, radius: None });
    let problem = DirichletProblem::new(b.build(), &interior, f, ScalarField::zeros(total))?;
    let margins = (1..teeth)
        .map(|n| {
            let (now, before) = (v[offsets[n]], v[offsets[n - 1]]);
            now - before - now / lengths[n] as f64
        })
        .collect();
    Ok(Comb { c, problem, offsets, lengths, tails, u, v, margins })
}

/// Window of two parallel rails and a centre vertex.
///
/// Rail position `i ∈ [-hw, hw]`: top vertex id `i + hw` with `u = 2i`,
/// bottom vertex id `2hw + 1 + i + hw` with `u = 2i + 1`. The centre has id
/// `4hw + 2` and `u = a`, adjacent to top(0) and bottom(0), which are also
/// joined by a rung. The four rail ends are incomplete.
#[derive(Clone, Debug)]
pub struct CcaExample {
    pub graph: Arc<Graph>,
    pub u: ScalarField,
    pub half_width: usize,
    pub center: Vertex,
}

impl CcaExample {
    pub fn top(&self, i: i64) -> Vertex {
        (i + self.half_width as i64) as Vertex
    }

    pub fn bottom(&self, i: i64) -> Vertex {
        (2 * self.half_width as i64 + 1 + i + self.half_width as i64) as Vertex
    }
}

pub fn cca_counterexample(a: f64, half_width: usize) -> Result<CcaExample, GalleryError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(GalleryError::Param(format!("a must lie in [0, 1], got {a}")));
    }
    if half_width < 3 {
        return Err(GalleryError::Param(format!("half width must be ≥ 3, got {half_width}")));
    }
    let hw = half_width;
    let rail = 2 * hw + 1;
    let center = 2 * rail;
    let mut b = GraphBuilder::with_vertices(center + 1);
    let mut u = ScalarField::zeros(center + 1);
    for k in 0..rail {
        let i = k as f64 - hw as f64;
        u[k] = 2.0 * i;
        u[rail + k] = 2.0 * i + 1.0;
        if k + 1 < rail {
            b.add_edge(k, k + 1).expect("in range");
            b.add_edge(rail + k, rail + k + 1).expect("in range");
        }
    }
    for end in [0, rail - 1, rail, 2 * rail - 1] {
        b.mark_incomplete(end);
    }
    b.add_edge(hw, rail + hw).expect("in range");
    b.add_edge(center, hw).expect("in range");
    b.add_edge(center, rail + hw).expect("in range");
    u[center] = a;
    b.label(center, "center");
    b.label(hw, "top 0");
    b.label(rail + hw, "bottom 0");
    b.kind(GraphKind::Truncated { root: center, radius: None });
    Ok(CcaExample { graph: Arc::new(b.build()), u, half_width, center })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonexistenceRow {
    pub r: usize,
    pub width: usize,
    /// `‖u‖∞` of the (unique) solution on the truncation.
    pub sup_norm: f64,
    /// `max_k k(r-k)/2`.
    pub closed_form: f64,
    /// `width·|sup f|/4`, forced by the gradient estimate for any solution.
    pub gradient_lower_bound: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonexistenceReport {
    pub sup_f: f64,
    pub rows: Vec<NonexistenceRow>,
    /// `sup_norm` strictly increases with `r`.
    pub diverging: bool,
}

/// The path `0..=r` with `f ≡ -1` and `g = 0` at both ends: truncations of the
/// half-line. Solutions must grow without bound as the width grows.
pub fn nonexistence_witness(depths: &[usize]) -> Result<NonexistenceReport, GalleryError> {
    let sup_f = -1.0;
    let mut rows = Vec::new();
    for &r in depths {
        if r < 2 {
            return Err(GalleryError::Param(format!("depth must be ≥ 2, got {r}")));
        }
        let n = r + 1;
        let interior: Vec<Vertex> = (1..r).collect();
        let p = DirichletProblem::new(Graph::path(n), &interior, ScalarField::constant(n, sup_f), ScalarField::zeros(n))?;
        let out = solve(&p, &SolveOptions { tol: 1e-11, ..Default::default() })?;
        if !out.converged {
            return Err(GalleryError::Param(format!("solve did not converge at r = {r}")));
        }
        let width = p.width().finite().expect("finite path");
        let closed_form = (0..=r).map(|k| (k * (r - k)) as f64 / 2.0).fold(0.0, f64::max);
        rows.push(NonexistenceRow {
            r,
            width,
            sup_norm: out.field.sup_norm(),
            closed_form,
            gradient_lower_bound: width as f64 * sup_f.abs() / 4.0,
            residual: out.residual,
        });
    }
    let diverging = rows.windows(2).all(|w| w[1].sup_norm > w[0].sup_norm);
    Ok(NonexistenceReport { sup_f, rows, diverging })
}
