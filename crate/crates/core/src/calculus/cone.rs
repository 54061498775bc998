//! Cones `a ± b·d(x₀, ·)`, sampled cone-comparison probes and the finite-ball
//! Liouville certificate.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{check_len, min_max, CalcError, Side, TAU};
use crate::field::ScalarField;
use crate::graph::{Graph, Vertex};

/// `a + b·d(x₀, ·)` (upper) or `a - b·d(x₀, ·)` (lower). Unreachable vertices
/// get `±∞` matching the side.
pub fn cone_field(g: &Graph, x0: Vertex, a: f64, b: f64, side: Side) -> Result<ScalarField, CalcError> {
    if b < 0.0 {
        return Err(CalcError::Precondition(format!("cone slope must be ≥ 0, got {b}")));
    }
    let dist = g.distance_map(&[x0])?;
    let s = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    Ok(ScalarField::from_fn(g.len(), |v| match dist.raw()[v] {
        Some(d) => a + s * b * d as f64,
        None => s * f64::INFINITY,
    }))
}

/// Worst value of `Δ∞C̲` (lower cone, should be ≥ 0) or `-Δ∞C̄` (upper, ≥ 0)
/// over complete vertices `x ≠ x₀` with finite cone values.
pub fn cone_property_check(g: &Graph, cone: &ScalarField, x0: Vertex, side: Side) -> Result<f64, CalcError> {
    check_len(g, cone)?;
    let s = match side {
        Side::Upper => -1.0,
        Side::Lower => 1.0,
    };
    let mut worst = f64::INFINITY;
    for x in 0..g.len() {
        if x == x0 || !g.is_complete(x) || g.neighbors(x).is_empty() || !cone[x].is_finite() {
            continue;
        }
        let (lo, hi) = min_max(g.neighbors(x), cone.values());
        worst = worst.min(s * (lo + hi - 2.0 * cone[x]));
    }
    Ok(worst)
}

/// Radius of the default subset family used by the probe.
pub const DEFAULT_BALL_RADIUS: usize = 3;

/// Distinct open balls `B_x(r)`, `1 ≤ r ≤ r_max`, made only of complete vertices.
pub fn ball_family(g: &Graph, r_max: usize) -> Vec<Vec<Vertex>> {
    let mut seen = BTreeSet::new();
    for x in 0..g.len() {
        let dist = g.distance_map(&[x]).expect("x is a valid source");
        for r in 1..=r_max {
            let ball: Vec<Vertex> =
                (0..g.len()).filter(|&v| dist.raw()[v].is_some_and(|d| d < r)).collect();
            if ball.iter().all(|&v| g.is_complete(v)) {
                seen.insert(ball);
            }
        }
    }
    seen.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSamples {
    /// Apexes to try; `None` means every vertex outside the subset.
    pub apexes: Option<Vec<Vertex>>,
    pub slopes: Vec<f64>,
}

impl Default for ConeSamples {
    fn default() -> Self {
        ConeSamples { apexes: None, slopes: vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeViolation {
    pub subset: usize,
    pub apex: Vertex,
    pub slope: f64,
    /// The cone offset `a` at which the hypothesis is tight on the boundary.
    pub critical_a: f64,
    pub witness: Vertex,
    pub amount: f64,
}

/// Pass/fail evidence over a sampled family; never a membership claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub subsets: usize,
    pub samples: usize,
    pub cca_violations: Vec<ProbeViolation>,
    pub ccb_violations: Vec<ProbeViolation>,
    pub notes: Vec<String>,
}

/// Cone comparison from above and below, sampled.
///
/// For a subset `X`, apex `x₀ ∉ X` and slope `b`, the lower cone `a - b·d` lies
/// below `u` on `∂X` exactly when `a ≤ a* = min_{∂X} (u + b·d)`. The worst
/// admissible cone is therefore `a = a*`, and CCA fails for this `(X, x₀, b)`
/// iff `min_X (u + b·d) < a*`. CCB is the mirror image. Distances are those of
/// the exposed graph.
pub fn cca_ccb_probe(
    g: &Graph,
    u: &ScalarField,
    family: &[Vec<Vertex>],
    samples: &ConeSamples,
    tau: f64,
) -> Result<ProbeReport, CalcError> {
    check_len(g, u)?;
    let mut report = ProbeReport {
        subsets: family.len(),
        samples: 0,
        cca_violations: Vec::new(),
        ccb_violations: Vec::new(),
        notes: Vec::new(),
    };
    let mut dist_cache: HashMap<Vertex, Vec<Option<usize>>> = HashMap::new();
    for (i, set) in family.iter().enumerate() {
        if let Some(&v) = set.iter().find(|&&v| !g.is_complete(v)) {
            report.notes.push(format!("subset {i} skipped: vertex {} is incomplete", g.id(v)));
            continue;
        }
        let boundary = g.boundary_of(set)?;
        if boundary.is_empty() {
            report.notes.push(format!("subset {i} skipped: empty boundary"));
            continue;
        }
        let mut inside = vec![false; g.len()];
        for &v in set {
            inside[v] = true;
        }
        let apexes: Vec<Vertex> = match &samples.apexes {
            Some(list) => list.clone(),
            None => (0..g.len()).filter(|&v| !inside[v]).collect(),
        };
        for x0 in apexes {
            if x0 >= g.len() {
                return Err(crate::graph::GraphError::UnknownVertex(x0 as i64).into());
            }
            if inside[x0] {
                report.notes.push(format!("subset {i}, apex {} skipped: apex inside subset", g.id(x0)));
                continue;
            }
            let dist = dist_cache
                .entry(x0)
                .or_insert_with(|| g.distance_map(&[x0]).expect("apex is valid").raw().to_vec());
            if boundary.iter().chain(set).any(|&v| dist[v].is_none()) {
                report.notes.push(format!("subset {i}, apex {} skipped: infinite distance", g.id(x0)));
                continue;
            }
            let d = |v: Vertex| dist[v].expect("checked above") as f64;
            for &b in &samples.slopes {
                report.samples += 1;
                // CCA: phi = u + b d.
                let (a_star, _) = argmin(boundary.iter().map(|&v| (v, u[v] + b * d(v))));
                let (inner, witness) = argmin(set.iter().map(|&v| (v, u[v] + b * d(v))));
                if inner < a_star - tau {
                    report.cca_violations.push(ProbeViolation {
                        subset: i,
                        apex: x0,
                        slope: b,
                        critical_a: a_star,
                        witness,
                        amount: a_star - inner,
                    });
                }
                // CCB: psi = u - b d, mirrored.
                let (neg_a_star, _) = argmin(boundary.iter().map(|&v| (v, -(u[v] - b * d(v)))));
                let (neg_inner, witness) = argmin(set.iter().map(|&v| (v, -(u[v] - b * d(v)))));
                if neg_inner < neg_a_star - tau {
                    report.ccb_violations.push(ProbeViolation {
                        subset: i,
                        apex: x0,
                        slope: b,
                        critical_a: -neg_a_star,
                        witness,
                        amount: neg_a_star - neg_inner,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn argmin(it: impl Iterator<Item = (Vertex, f64)>) -> (f64, Vertex) {
    it.fold((f64::INFINITY, usize::MAX), |(m, w), (v, x)| if x < m { (x, v) } else { (m, w) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiouvilleCertificate {
    pub k: usize,
    pub n: usize,
    pub eps: f64,
    pub u_x0: f64,
    pub u_x1: f64,
    /// `min (u - C̲)` over the closed ball; nonnegative up to τ.
    pub cone_margin: f64,
    /// True when the ball is a whole, fully exposed component.
    pub covers_component: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefusalKind {
    Incomplete,
    Negative,
    NotSuperharmonic,
    Unreachable,
    ConeViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiouvilleRefusal {
    pub kind: RefusalKind,
    pub vertex: Option<Vertex>,
    /// `Δ∞u` at `vertex` over its exposed neighbours, when defined.
    pub exposed_laplacian: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiouvilleOutcome {
    Certificate(LiouvilleCertificate),
    Refusal(LiouvilleRefusal),
}

/// Certifies `u(x₁) ≥ u(x₀) - ε` from `u ≥ 0`, `Δ∞u ≤ 0` on an exposed ball.
///
/// With `K = d(x₀, x₁)`, the cone `C̲ = u(x₀) - (ε/K)·d(x₀, ·)` is ≤ 0 from
/// radius `N = max(K + 1, ⌈K·u(x₀)/ε⌉)` on, so one cone comparison on
/// `B_{x₀}(N) \ {x₀}` suffices. Every vertex of the ball must be complete.
pub fn liouville_probe(g: &Graph, u: &ScalarField, x0: Vertex, x1: Vertex, eps: f64) -> Result<LiouvilleOutcome, CalcError> {
    check_len(g, u)?;
    if eps <= 0.0 {
        return Err(CalcError::Precondition("ε must be positive".into()));
    }
    let refuse = |kind, vertex: Option<Vertex>, exposed_laplacian, reason: String| {
        Ok(LiouvilleOutcome::Refusal(LiouvilleRefusal { kind, vertex, exposed_laplacian, reason }))
    };
    let dist = g.distance_map(&[x0])?;
    let raw = dist.raw();
    let Some(k) = dist.get(x1).exact() else {
        return refuse(RefusalKind::Unreachable, Some(x1), None, format!("d(x0, x1) is not certified: {:?}", dist.get(x1)));
    };
    if u[x0] < -TAU {
        return refuse(RefusalKind::Negative, Some(x0), None, format!("u({}) = {} < 0", g.id(x0), u[x0]));
    }
    if k == 0 {
        return Ok(LiouvilleOutcome::Certificate(LiouvilleCertificate {
            k,
            n: 0,
            eps,
            u_x0: u[x0],
            u_x1: u[x1],
            cone_margin: 0.0,
            covers_component: false,
        }));
    }
    let needed = (k as f64 * u[x0].max(0.0) / eps).ceil();
    if needed > 1e9 {
        return refuse(RefusalKind::Incomplete, None, None, format!("radius {needed} is beyond any exposed ball"));
    }
    let n = (k + 1).max(needed as usize);

    let mut order: Vec<Vertex> = (0..g.len()).filter(|&v| raw[v].is_some_and(|d| d <= n)).collect();
    order.sort_by_key(|&v| (raw[v], v));
    for &v in &order {
        let in_ball = raw[v].is_some_and(|d| d < n);
        if u[v] < -TAU {
            return refuse(RefusalKind::Negative, Some(v), None, format!("u({}) = {} < 0", g.id(v), u[v]));
        }
        if !in_ball {
            continue;
        }
        let nbrs = g.neighbors(v);
        let lap = (!nbrs.is_empty()).then(|| {
            let (lo, hi) = min_max(nbrs, u.values());
            lo + hi - 2.0 * u[v]
        });
        if !g.is_complete(v) {
            let msg = match lap {
                Some(l) => format!("vertex {} in B(x0, {n}) is incomplete; Δ∞u over exposed neighbours = {l}", g.id(v)),
                None => format!("vertex {} in B(x0, {n}) is incomplete", g.id(v)),
            };
            return refuse(RefusalKind::Incomplete, Some(v), lap, msg);
        }
        if let Some(l) = lap {
            if l > TAU {
                return refuse(RefusalKind::NotSuperharmonic, Some(v), Some(l), format!("Δ∞u({}) = {l} > 0", g.id(v)));
            }
        }
    }

    let slope = eps / k as f64;
    let mut margin = f64::INFINITY;
    for &v in &order {
        let c = u[x0] - slope * raw[v].expect("ordered vertices are reached") as f64;
        let m = u[v] - c;
        if m < -TAU {
            return refuse(RefusalKind::ConeViolated, Some(v), None, format!("u({}) = {} < cone value {c}", g.id(v), u[v]));
        }
        margin = margin.min(m);
    }
    let covers_component = order.iter().all(|&v| raw[v].is_some_and(|d| d < n));
    Ok(LiouvilleOutcome::Certificate(LiouvilleCertificate {
        k,
        n,
        eps,
        u_x0: u[x0],
        u_x1: u[x1],
        cone_margin: margin,
        covers_component,
    }))
}
