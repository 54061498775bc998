//! Quadratic barriers `q̄(r) = a + br - c·r(r-1)/2`, `q̲(r) = a - br + c·r(r-1)/2`
//! evaluated on distances, and the augmented-graph construction that turns
//! them into super/subsolutions dominating the boundary data.

use serde::{Deserialize, Serialize};

use super::{check_len, min_max, CalcError, TAU};
use crate::field::ScalarField;
use crate::graph::{Graph, GraphBuilder, GraphKind, Vertex, Width};
use crate::problem::DirichletProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProfile {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticProfile {
    pub fn upper(&self, r: usize) -> f64 {
        let r = r as f64;
        self.a + self.b * r - self.c * r * (r - 1.0) / 2.0
    }

    pub fn lower(&self, r: usize) -> f64 {
        let r = r as f64;
        self.a - self.b * r + self.c * r * (r - 1.0) / 2.0
    }

    pub fn eval(&self, side: Side, r: usize) -> f64 {
        match side {
            Side::Upper => self.upper(r),
            Side::Lower => self.lower(r),
        }
    }

    /// `max_{0 ≤ r ≤ top} q̄(r)`.
    pub fn upper_max(&self, top: usize) -> f64 {
        (0..=top).map(|r| self.upper(r)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Parameters actually used by [`barrier_field`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub profile: QuadraticProfile,
    pub radius: usize,
    pub width: usize,
    pub anchor: Vertex,
}

#[derive(Clone, Debug)]
pub struct Barrier {
    pub spec: BarrierSpec,
    pub side: Side,
    /// `G'`: the original vertices (same indices) followed by the path vertices.
    pub augmented: Graph,
    pub augmented_field: ScalarField,
    /// The barrier restricted to the original vertices.
    pub field: ScalarField,
}

fn finite_width(p: &DirichletProblem) -> Result<usize, CalcError> {
    if !p.graph.is_fully_materialized() {
        return Err(CalcError::Precondition("barriers need a fully materialized graph".into()));
    }
    match p.width() {
        Width::Finite(w) => Ok(w),
        other => Err(CalcError::Precondition(format!("barriers need a finite width, got {other:?}"))),
    }
}

/// Builds `G'` (a path of length `R` from `y₀` to every other boundary vertex)
/// and the barrier `q(d_{G'}(y₀, ·))` with `a = sup/inf {g(y) : d_G(y₀, y) < R}`
/// and `b = 2‖g‖/R + c(W + R)`.
pub fn barrier_field(p: &DirichletProblem, y0: Vertex, c: f64, radius: usize, side: Side) -> Result<Barrier, CalcError> {
    let w = finite_width(p)?;
    let g = &*p.graph;
    if y0 >= g.len() || p.is_interior(y0) {
        return Err(CalcError::Precondition(format!("anchor {y0} is not a boundary vertex")));
    }
    if radius == 0 || c < 0.0 {
        return Err(CalcError::Precondition("need R ≥ 1 and c ≥ 0".into()));
    }
    let from_anchor = g.distance_map(&[y0])?;
    let near = p
        .partition
        .boundary()
        .filter(|&y| from_anchor.raw()[y].is_some_and(|d| d < radius))
        .map(|y| p.g[y]);
    let a = match side {
        Side::Upper => near.fold(f64::NEG_INFINITY, f64::max),
        Side::Lower => near.fold(f64::INFINITY, f64::min),
    };
    let b = 2.0 * p.g_norm() / radius as f64 + c * (w + radius) as f64;
    let profile = QuadraticProfile { a, b, c };

    let n = g.len();
    let boundary: Vec<Vertex> = p.partition.boundary().filter(|&y| y != y0).collect();
    let extra = boundary.len() * (radius - 1);
    let mut ids: Vec<i64> = (0..n).map(|v| g.id(v)).collect();
    let next = ids.iter().copied().max().unwrap_or(-1) + 1;
    ids.extend((0..extra as i64).map(|k| next + k));
    let mut builder = GraphBuilder::with_ids(&ids)?;
    for (a_, b_) in g.edges() {
        builder.add_edge(a_, b_)?;
    }
    let mut fresh = n;
    for &y in &boundary {
        let mut prev = y0;
        for _ in 1..radius {
            builder.add_edge(prev, fresh)?;
            prev = fresh;
            fresh += 1;
        }
        builder.add_edge(prev, y)?;
    }
    builder.kind(GraphKind::Materialized);
    let augmented = builder.build();
    let dist = augmented.distance_map(&[y0])?;
    let augmented_field = ScalarField::from_fn(augmented.len(), |v| match dist.raw()[v] {
        Some(d) => profile.eval(side, d),
        None => match side {
            Side::Upper => f64::INFINITY,
            Side::Lower => f64::NEG_INFINITY,
        },
    });
    let field = ScalarField::new(augmented_field.values()[..n].to_vec());
    Ok(Barrier {
        spec: BarrierSpec { profile, radius, width: w, anchor: y0 },
        side,
        augmented,
        augmented_field,
        field,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierCheck {
    /// `w(y₀) = g(y₀)`; only asserted for `R = 1`.
    pub anchor_ok: Option<bool>,
    /// `min_X (-Δ∞w̄ - c)` or `min_X (Δ∞w̲ - c)`.
    pub operator_margin: f64,
    pub operator_ok: bool,
    /// `min_Y (w̄ - g)` or `min_Y (g - w̲)`.
    pub boundary_margin: f64,
    pub boundary_ok: bool,
    pub holds: bool,
}

/// Asserts the three barrier guarantees, the operator on `G'`.
pub fn check_barrier(p: &DirichletProblem, barrier: &Barrier, tau: f64) -> BarrierCheck {
    let c = barrier.spec.profile.c;
    let s = match barrier.side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    let aug = &barrier.augmented;
    let w = &barrier.augmented_field;
    let operator_margin = p.interior().iter().fold(f64::INFINITY, |m, &x| {
        let (lo, hi) = min_max(aug.neighbors(x), w.values());
        m.min(-s * (lo + hi - 2.0 * w[x]) - c)
    });
    let boundary_margin = p.partition.boundary().fold(f64::INFINITY, |m, y| m.min(s * (w[y] - p.g[y])));
    let y0 = barrier.spec.anchor;
    let anchor_ok = (barrier.spec.radius == 1).then(|| (w[y0] - p.g[y0]).abs() <= tau);
    let operator_ok = operator_margin >= -tau;
    let boundary_ok = boundary_margin >= -tau;
    BarrierCheck {
        anchor_ok,
        operator_margin,
        operator_ok,
        boundary_margin,
        boundary_ok,
        holds: operator_ok && boundary_ok && anchor_ok.unwrap_or(true),
    }
}

/// Pointwise min (upper) or max (lower) of the `R = 1` barriers over every
/// boundary anchor, with `c = ‖f‖∞`, computed without building `G'`.
///
/// With `R = 1`, `d_{G'}(y₀, x)` is `D(x) = d(Y, x)` when `y₀` is a nearest
/// boundary vertex of `x`, and `D(x) + 1` otherwise.
pub fn barrier_envelope(p: &DirichletProblem, side: Side) -> Result<ScalarField, CalcError> {
    let w = finite_width(p)?;
    let g = &*p.graph;
    let c = p.f_norm();
    let profile = QuadraticProfile { a: 0.0, b: 2.0 * p.g_norm() + c * (w + 1) as f64, c };
    let q0 = |d: usize| profile.upper(d);

    let boundary: Vec<Vertex> = p.partition.boundary().collect();
    let mut out = p.boundary_extension(0.0);
    if p.interior().is_empty() {
        return Ok(out);
    }
    // For the upper envelope we track min g over nearest anchors; the lower
    // envelope is the mirror image, so work with s·g throughout.
    let s = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    let best_any = boundary.iter().map(|&y| s * p.g[y]).fold(f64::INFINITY, f64::min);
    let mut depth: Vec<Option<usize>> = vec![None; g.len()];
    let mut nearest = vec![f64::INFINITY; g.len()];
    let mut frontier = boundary.clone();
    for &y in &boundary {
        depth[y] = Some(0);
        nearest[y] = s * p.g[y];
    }
    let mut d = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &x in g.neighbors(v) {
                match depth[x] {
                    None => {
                        depth[x] = Some(d + 1);
                        nearest[x] = nearest[v];
                        next.push(x);
                    }
                    Some(dx) if dx == d + 1 => nearest[x] = nearest[x].min(nearest[v]),
                    _ => {}
                }
            }
        }
        frontier = next;
        d += 1;
    }
    for &x in p.interior() {
        let dx = depth[x].ok_or_else(|| CalcError::Precondition(format!("vertex {} cannot reach Y", g.id(x))))?;
        let via_nearest = nearest[x] + q0(dx);
        let via_any = best_any + q0(dx + 1);
        out[x] = s * via_nearest.min(via_any);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticPropReport {
    pub checked: usize,
    pub monotone_ok: bool,
    /// `min (Δ∞Q̲ - c)` and `min (-Δ∞Q̄ - c)` over checked vertices.
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub operator_ok: bool,
}

/// Monotonicity of `Q̄`, `Q̲` in `d(V', ·)` on `1 ≤ d ≤ R` and the operator
/// bounds `Δ∞Q̲ ≥ c`, `-Δ∞Q̄ ≥ c` at every complete vertex there.
pub fn quadratic_prop_check(
    g: &Graph,
    anchors: &[Vertex],
    profile: QuadraticProfile,
    radius: usize,
) -> Result<QuadraticPropReport, CalcError> {
    if profile.b <= radius as f64 * profile.c || profile.c < 0.0 {
        return Err(CalcError::Precondition(format!(
            "need b > R·c with c ≥ 0 (b = {}, R = {radius}, c = {})",
            profile.b, profile.c
        )));
    }
    let dist = g.distance_map(anchors)?;
    let raw = dist.raw();
    let field = |side| {
        ScalarField::from_fn(g.len(), |v| match raw[v] {
            Some(d) => profile.eval(side, d),
            None => f64::NAN,
        })
    };
    let up = field(Side::Upper);
    let lo = field(Side::Lower);
    check_len(g, &up)?;

    let mut present: Vec<usize> = raw.iter().flatten().copied().filter(|&d| d >= 1 && d <= radius).collect();
    present.sort_unstable();
    present.dedup();
    let monotone_ok = present.windows(2).all(|w| {
        profile.upper(w[1]) > profile.upper(w[0]) && profile.lower(w[1]) < profile.lower(w[0])
    });

    let mut report = QuadraticPropReport {
        checked: 0,
        monotone_ok,
        lower_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
        operator_ok: true,
    };
    for x in 0..g.len() {
        let in_range = raw[x].is_some_and(|d| d >= 1 && d <= radius);
        if !in_range || !g.is_complete(x) {
            continue;
        }
        let (l0, l1) = min_max(g.neighbors(x), lo.values());
        let (u0, u1) = min_max(g.neighbors(x), up.values());
        report.lower_margin = report.lower_margin.min(l0 + l1 - 2.0 * lo[x] - profile.c);
        report.upper_margin = report.upper_margin.min(-(u0 + u1 - 2.0 * up[x]) - profile.c);
        report.checked += 1;
    }
    report.operator_ok = report.lower_margin >= -TAU && report.upper_margin >= -TAU;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchored_path() -> DirichletProblem {
        let mut g = ScalarField::zeros(4);
        g[0] = 5.0;
        DirichletProblem::new(Graph::path(4), &[1, 2, 3], ScalarField::constant(4, 1.0), g).unwrap()
    }

    #[test]
    fn hand_computed_upper_barrier() {
        let p = anchored_path();
        let b = barrier_field(&p, 0, 1.0, 1, Side::Upper).unwrap();
        assert_eq!(b.spec.profile.b, 14.0);
        assert_eq!(b.field.values(), &[5.0, 19.0, 32.0, 44.0]);
        let lap = super::super::inf_laplacian(&b.augmented, &b.augmented_field, 1).unwrap();
        assert_eq!(-lap, 1.0);
        assert!(check_barrier(&p, &b, TAU).holds);
    }

    #[test]
    fn zero_c_gives_cone() {
        let g = ScalarField::new(vec![3.0, 0.0, 0.0, 3.0]);
        let p = DirichletProblem::new(Graph::path(4), &[1, 2], ScalarField::zeros(4), g).unwrap();
        let b = barrier_field(&p, 0, 0.0, 1, Side::Upper).unwrap();
        assert_eq!(b.field.values(), &[3.0, 9.0, 15.0, 9.0]);
        assert!(super::super::is_supersolution(&p, &b.field, 0.0).unwrap());
    }

    #[test]
    fn profile_monotone_example() {
        let q = QuadraticProfile { a: 0.0, b: 3.0, c: 1.0 };
        assert_eq!([q.upper(0), q.upper(1), q.upper(2)], [0.0, 3.0, 5.0]);
        let rep = quadratic_prop_check(&Graph::path(5), &[0], q, 2).unwrap();
        assert!(rep.monotone_ok && rep.operator_ok);
        assert!(quadratic_prop_check(&Graph::path(5), &[0], QuadraticProfile { b: 2.0, ..q }, 2).is_err());
    }

    #[test]
    fn envelope_matches_explicit_barriers() {
        let g = Graph::grid(4, 3);
        let interior = [5, 6];
        let mut gv = ScalarField::zeros(12);
        for (v, val) in gv.values_mut().iter_mut().enumerate() {
            *val = ((v * 7) % 5) as f64 - 2.0;
        }
        let f = ScalarField::from_fn(12, |v| if v == 5 { 0.5 } else { -1.5 });
        let p = DirichletProblem::new(g, &interior, f, gv).unwrap();
        for side in [Side::Upper, Side::Lower] {
            let env = barrier_envelope(&p, side).unwrap();
            let c = p.f_norm();
            for &x in &interior {
                let explicit = p
                    .partition
                    .boundary()
                    .map(|y| barrier_field(&p, y, c, 1, side).unwrap().field[x])
                    .fold(if side == Side::Upper { f64::INFINITY } else { f64::NEG_INFINITY }, |m, v| {
                        if side == Side::Upper { m.min(v) } else { m.max(v) }
                    });
                assert!((env[x] - explicit).abs() < 1e-12, "{side:?} {x}: {} vs {explicit}", env[x]);
            }
        }
    }
}
