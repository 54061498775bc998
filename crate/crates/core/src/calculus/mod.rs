//! The discrete infinity Laplacian `Δ∞u(x) = inf_{y~x} u(y) + sup_{y~x} u(y) - 2u(x)`
//! and the checks built on it.
//!
//! Sign convention: the problem is `Δ∞u = f` on `X`. A *supersolution* satisfies
//! `Δ∞v ≤ f` (the Perron class), a *subsolution* `Δ∞u ≥ f`.

pub mod barrier;
pub mod cone;

use serde::Serialize;
use thiserror::Error;

use crate::field::ScalarField;
use crate::graph::{Graph, GraphError, Vertex, Width};
use crate::problem::{DirichletProblem, ProblemError};

pub use barrier::{
    barrier_envelope, barrier_field, check_barrier, quadratic_prop_check, Barrier, BarrierCheck,
    BarrierSpec, QuadraticProfile, QuadraticPropReport, Side,
};
pub use cone::{
    ball_family, cca_ccb_probe, DEFAULT_BALL_RADIUS, cone_field, cone_property_check, liouville_probe, ConeSamples,
    LiouvilleCertificate, LiouvilleOutcome, LiouvilleRefusal, ProbeReport, ProbeViolation,
};

/// Default slack for equality-type assertions.
pub const TAU: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalcError {
    #[error("vertex {0} has an incomplete neighbourhood (truncation-limited)")]
    Truncated(i64),
    #[error("vertex {0} has no neighbours")]
    Isolated(i64),
    #[error("vertex {0} is not interior")]
    NotInterior(i64),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(i64, i64),
    #[error("field has {got} values, graph has {expected} vertices")]
    Length { got: usize, expected: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

pub(crate) fn check_len(g: &Graph, u: &ScalarField) -> Result<(), CalcError> {
    if u.len() != g.len() {
        return Err(CalcError::Length { got: u.len(), expected: g.len() });
    }
    Ok(())
}

/// `u₊(x)`, `u₋(x)` and where they are attained (smallest index on ties).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extremes {
    pub upper: f64,
    pub lower: f64,
    pub argmax: Vertex,
    pub argmin: Vertex,
}

/// Extremes without completeness checks; `nbrs` must be nonempty.
#[inline]
pub(crate) fn min_max(nbrs: &[Vertex], u: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &y in nbrs {
        let v = u[y];
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

pub fn neighbor_extremes(g: &Graph, u: &ScalarField, x: Vertex) -> Result<Extremes, CalcError> {
    check_len(g, u)?;
    if x >= g.len() {
        return Err(GraphError::UnknownVertex(x as i64).into());
    }
    if !g.is_complete(x) {
        return Err(CalcError::Truncated(g.id(x)));
    }
    let nbrs = g.neighbors(x);
    let Some(&first) = nbrs.first() else {
        return Err(CalcError::Isolated(g.id(x)));
    };
    let mut e = Extremes { upper: u[first], lower: u[first], argmax: first, argmin: first };
    for &y in &nbrs[1..] {
        if u[y] > e.upper {
            e.upper = u[y];
            e.argmax = y;
        }
        if u[y] < e.lower {
            e.lower = u[y];
            e.argmin = y;
        }
    }
    Ok(e)
}

/// `Δ∞u(x)`. Refuses incomplete and isolated vertices.
pub fn inf_laplacian(g: &Graph, u: &ScalarField, x: Vertex) -> Result<f64, CalcError> {
    let e = neighbor_extremes(g, u, x)?;
    Ok(e.lower + e.upper - 2.0 * u[x])
}

/// `Δ∞u` at every complete, non-isolated vertex; `None` elsewhere.
pub fn laplacian_field(g: &Graph, u: &ScalarField) -> Result<Vec<Option<f64>>, CalcError> {
    check_len(g, u)?;
    Ok((0..g.len())
        .map(|x| {
            let nbrs = g.neighbors(x);
            (g.is_complete(x) && !nbrs.is_empty()).then(|| {
                let (lo, hi) = min_max(nbrs, u.values());
                lo + hi - 2.0 * u[x]
            })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    /// `Δ∞u - f` on `X`, zero on `Y` and at skipped vertices.
    pub defect: ScalarField,
    /// `sup |u - g|` over `Y`.
    pub boundary_mismatch: f64,
    /// `sup |defect|` over the evaluated interior.
    pub interior_sup: f64,
    /// `max(interior_sup, boundary_mismatch)`.
    pub sup_norm: f64,
    pub worst: Option<Vertex>,
    /// Interior vertices that could not be evaluated (incomplete neighbourhoods).
    pub skipped: Vec<Vertex>,
}

fn residual_impl(p: &DirichletProblem, u: &ScalarField, strict: bool) -> Result<Residual, CalcError> {
    let g = &*p.graph;
    check_len(g, u)?;
    let mut defect = ScalarField::zeros(g.len());
    let mut interior_sup = 0.0f64;
    let mut worst = None;
    let mut skipped = Vec::new();
    for &x in p.interior() {
        if !g.is_complete(x) {
            if strict {
                return Err(CalcError::Truncated(g.id(x)));
            }
            skipped.push(x);
            continue;
        }
        let nbrs = g.neighbors(x);
        if nbrs.is_empty() {
            return Err(CalcError::Isolated(g.id(x)));
        }
        let (lo, hi) = min_max(nbrs, u.values());
        let d = lo + hi - 2.0 * u[x] - p.f[x];
        defect[x] = d;
        if d.abs() > interior_sup || worst.is_none() {
            interior_sup = interior_sup.max(d.abs());
            worst = Some(x);
        }
    }
    let boundary_mismatch = p.partition.boundary().fold(0.0f64, |m, y| m.max((u[y] - p.g[y]).abs()));
    Ok(Residual {
        defect,
        boundary_mismatch,
        interior_sup,
        sup_norm: interior_sup.max(boundary_mismatch),
        worst,
        skipped,
    })
}

/// Residual of `Δ∞u = f`, `u = g`. Every interior vertex must be complete.
pub fn residual(p: &DirichletProblem, u: &ScalarField) -> Result<Residual, CalcError> {
    residual_impl(p, u, true)
}

/// As [`residual`], but incomplete interior vertices are skipped and listed.
pub fn residual_on_complete(p: &DirichletProblem, u: &ScalarField) -> Result<Residual, CalcError> {
    residual_impl(p, u, false)
}

/// Largest amount by which `sign·(Δ∞u - f)` exceeds zero on `X` (complete vertices).
fn one_sided_excess(p: &DirichletProblem, u: &ScalarField, sign: f64) -> Result<f64, CalcError> {
    let r = residual(p, u)?;
    Ok(p.interior().iter().fold(f64::NEG_INFINITY, |m, &x| m.max(sign * r.defect[x])))
}

/// `Δ∞v ≤ f + τ` on `X`.
pub fn is_supersolution(p: &DirichletProblem, v: &ScalarField, tau: f64) -> Result<bool, CalcError> {
    Ok(one_sided_excess(p, v, 1.0)? <= tau)
}

/// `Δ∞u ≥ f - τ` on `X`.
pub fn is_subsolution(p: &DirichletProblem, u: &ScalarField, tau: f64) -> Result<bool, CalcError> {
    Ok(one_sided_excess(p, u, -1.0)? <= tau)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub sup_diff_interior: f64,
    pub sup_diff_boundary: f64,
    pub interior_witness: Option<Vertex>,
    pub boundary_witness: Option<Vertex>,
    /// `sup_V (u - v) ≤ sup_Y (u - v) + τ`.
    pub verdict: bool,
    pub u_is_subsolution: bool,
    pub v_is_supersolution: bool,
    pub f_one_signed: bool,
    pub finite_width: bool,
    pub hypotheses_met: bool,
    pub notes: Vec<String>,
}

/// Compares a subsolution `u` with a supersolution `v`. The report is produced
/// even when hypotheses fail; `hypotheses_met` says whether the verdict is
/// guaranteed.
pub fn comparison_check(
    p: &DirichletProblem,
    u: &ScalarField,
    v: &ScalarField,
    tau: f64,
) -> Result<ComparisonReport, CalcError> {
    let g = &*p.graph;
    check_len(g, u)?;
    check_len(g, v)?;
    let mut notes = Vec::new();
    let argsup = |vs: &mut dyn Iterator<Item = Vertex>| {
        vs.map(|x| (x, u[x] - v[x]))
            .fold(None, |best: Option<(Vertex, f64)>, (x, d)| match best {
                Some((_, b)) if b >= d => best,
                _ => Some((x, d)),
            })
    };
    let interior = argsup(&mut p.interior().iter().copied());
    let boundary = argsup(&mut p.partition.boundary());
    let sup_i = interior.map_or(f64::NEG_INFINITY, |(_, d)| d);
    let sup_b = boundary.map_or(f64::NEG_INFINITY, |(_, d)| d);
    let verdict = boundary.is_some() && sup_i <= sup_b + tau;
    if boundary.is_none() {
        notes.push("boundary is empty".to_string());
    }

    let u_sub = is_subsolution(p, u, tau)?;
    let v_super = is_supersolution(p, v, tau)?;
    let f_one_signed = p.f_sign().is_some();
    let finite_width = matches!(p.width(), Width::Finite(_));
    if !u_sub {
        notes.push("u is not a subsolution".to_string());
    }
    if !v_super {
        notes.push("v is not a supersolution".to_string());
    }
    if !f_one_signed {
        notes.push("theorem hypotheses not met: f changes sign".to_string());
    }
    if !finite_width {
        notes.push("theorem hypotheses not met: width is not finite".to_string());
    }
    Ok(ComparisonReport {
        sup_diff_interior: sup_i,
        sup_diff_boundary: sup_b,
        interior_witness: interior.map(|(x, _)| x),
        boundary_witness: boundary.map(|(x, _)| x),
        verdict,
        u_is_subsolution: u_sub,
        v_is_supersolution: v_super,
        f_one_signed,
        finite_width,
        hypotheses_met: u_sub && v_super && f_one_signed && finite_width,
        notes,
    })
}

/// Both sides of `u(x) - u₋(x) = u₊(x) - u(x) - f(x) ≥ u(y) - u(x) - f(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarchingReport {
    pub descent: f64,
    pub ascent: f64,
    pub step: f64,
    pub holds: bool,
}

pub fn marching_check(
    p: &DirichletProblem,
    u: &ScalarField,
    x: Vertex,
    y: Vertex,
    tau: f64,
) -> Result<MarchingReport, CalcError> {
    let g = &*p.graph;
    if x >= g.len() || !p.is_interior(x) {
        return Err(CalcError::NotInterior(g.id(x.min(g.len().saturating_sub(1)))));
    }
    if !g.are_adjacent(x, y) {
        return Err(CalcError::NotAdjacent(g.id(x), g.id(y)));
    }
    let e = neighbor_extremes(g, u, x)?;
    let descent = u[x] - e.lower;
    let ascent = e.upper - u[x] - p.f[x];
    let step = u[y] - u[x] - p.f[x];
    let holds = (descent - ascent).abs() <= tau && ascent >= step - tau;
    Ok(MarchingReport { descent, ascent, step, holds })
}

/// Bounds on the part of the domain that is not exposed, needed to evaluate
/// `inf u` and `sup f` honestly on truncated graphs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnexposedBounds {
    /// Lower bound for `u` on unexposed vertices.
    pub inf_u: f64,
    /// Upper bound for `f` on unexposed interior vertices.
    pub sup_f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradientOptions {
    pub tau: f64,
    pub unexposed: Option<UnexposedBounds>,
}

impl Default for GradientOptions {
    fn default() -> Self {
        GradientOptions { tau: TAU, unexposed: None }
    }
}

/// `u(y) - u(x) ≤ (u(x) - inf u)/N + (N+1)·sup f/2 + slack`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub n: usize,
    pub inf_u: f64,
    pub sup_f: f64,
    pub holds: bool,
}

struct GradientContext {
    inf_u: f64,
    sup_f: f64,
    /// Certified lower bound on `d(Y, x)`; `None` means unbounded.
    dist: Vec<Option<usize>>,
}

fn gradient_context(p: &DirichletProblem, u: &ScalarField, opts: &GradientOptions) -> Result<GradientContext, CalcError> {
    let g = &*p.graph;
    check_len(g, u)?;
    let truncated = !g.is_fully_materialized();
    if truncated && opts.unexposed.is_none() {
        return Err(CalcError::Precondition(
            "graph is truncated: inf u and sup f over unexposed vertices need caller-supplied bounds".into(),
        ));
    }
    let mut inf_u = u.values().iter().copied().fold(f64::INFINITY, f64::min);
    let mut sup_f = p.interior().iter().fold(f64::NEG_INFINITY, |m, &x| m.max(p.f[x]));
    if let Some(b) = opts.unexposed {
        inf_u = inf_u.min(b.inf_u);
        sup_f = sup_f.max(b.sup_f);
    }
    let boundary: Vec<Vertex> = p.partition.boundary().collect();
    Ok(GradientContext { inf_u, sup_f, dist: g.certified_lower_distances(&boundary)? })
}

fn gradient_at(ctx: &GradientContext, u: &ScalarField, x: Vertex, y: Vertex, n: usize, tau: f64) -> GradientReport {
    let lhs = u[y] - u[x];
    let rhs = (u[x] - ctx.inf_u) / n as f64 + (n as f64 + 1.0) * ctx.sup_f / 2.0;
    let slack = tau * (n as f64 + 1.0);
    GradientReport { lhs, rhs, slack, n, inf_u: ctx.inf_u, sup_f: ctx.sup_f, holds: lhs <= rhs + slack }
}

pub fn gradient_estimate_check(
    p: &DirichletProblem,
    u: &ScalarField,
    x: Vertex,
    y: Vertex,
    n: usize,
    opts: &GradientOptions,
) -> Result<GradientReport, CalcError> {
    let g = &*p.graph;
    if x >= g.len() || !p.is_interior(x) {
        return Err(CalcError::NotInterior(x as i64));
    }
    if !g.are_adjacent(x, y) {
        return Err(CalcError::NotAdjacent(g.id(x), g.id(y)));
    }
    let ctx = gradient_context(p, u, opts)?;
    if n == 0 || ctx.dist[x].is_some_and(|d| n > d) {
        return Err(CalcError::Precondition(format!(
            "N = {n} must satisfy 1 ≤ N ≤ d(Y, x) = {:?}",
            ctx.dist[x]
        )));
    }
    Ok(gradient_at(&ctx, u, x, y, n, opts.tau))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientSweep {
    pub checked: usize,
    pub violations: Vec<(Vertex, Vertex, usize, f64)>,
    /// `min (rhs + slack - lhs)` over all checks.
    pub min_margin: f64,
}

/// Runs the gradient estimate for every complete `x ∈ X`, `y ~ x` and
/// `1 ≤ N ≤ min(d(Y, x), max_n)`.
pub fn gradient_sweep(
    p: &DirichletProblem,
    u: &ScalarField,
    max_n: Option<usize>,
    opts: &GradientOptions,
) -> Result<GradientSweep, CalcError> {
    let g = &*p.graph;
    let ctx = gradient_context(p, u, opts)?;
    let mut out = GradientSweep { checked: 0, violations: Vec::new(), min_margin: f64::INFINITY };
    for &x in p.interior() {
        if !g.is_complete(x) {
            continue;
        }
        let Some(d) = ctx.dist[x] else {
            return Err(CalcError::Precondition(format!("vertex {} has no finite distance bound", g.id(x))));
        };
        let top = max_n.map_or(d, |m| d.min(m));
        for &y in g.neighbors(x) {
            for n in 1..=top {
                let r = gradient_at(&ctx, u, x, y, n, opts.tau);
                out.checked += 1;
                let margin = r.rhs + r.slack - r.lhs;
                out.min_margin = out.min_margin.min(margin);
                if !r.holds {
                    out.violations.push((x, y, n, margin));
                }
            }
        }
    }
    Ok(out)
}
