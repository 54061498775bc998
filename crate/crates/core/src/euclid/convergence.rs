use rayon::prelude::*;
use serde::Serialize;

use super::domain::{to_pt, DomainSpec, FieldExpr, RhsSign, Shape};
use super::sample::{build_eps_graph, sample_domain, DomainSample, EpsGraphBundle, HopCheck};
use super::{EuclidError, Pt};
use crate::field::ScalarField;
use crate::solver::{solve, SolveOptions, SolveOutcome};

pub const DEFAULT_MAX_SAMPLES: usize = 5_000;

/// `q̄(r) = a + b·r - c·r(r-1)/2`, maximised over `r = 0..=w`.
pub fn q_bar(a: f64, b: f64, c: f64, w: usize) -> f64 {
    (0..=w).map(|r| a + b * r as f64 - c * (r * r.saturating_sub(1)) as f64 / 2.0).fold(f64::NEG_INFINITY, f64::max)
}

impl EpsGraphBundle {
    /// `q̄(W)` with `a = ‖g‖`, `c = ε²‖f‖`, `b = W·c`; `W` is the larger of
    /// `W_i` and the measured graph width.
    pub fn uniform_bound(&self) -> f64 {
        let w = self.w_i.max(self.graph_width);
        let c = self.problem.f_norm();
        q_bar(self.problem.g_norm(), w as f64 * c, c, w)
    }
}

/// `‖u‖∞ ≤ q̄(W)`. A field with defect `δ` may sit up to `δ·(W+1)²` away
/// from the exact discrete solution, which is allowed as slack.
pub fn uniform_bound_check(bundle: &EpsGraphBundle, out: &SolveOutcome) -> bool {
    let bound = bundle.uniform_bound();
    let w = bundle.w_i.max(bundle.graph_width) as f64;
    out.field.sup_norm() <= bound + out.residual * (w + 1.0) * (w + 1.0) + 1e-12 * (1.0 + bound)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub schedule: Vec<f64>,
    pub h_factor: f64,
    pub exact: Option<FieldExpr>,
    pub tol: f64,
    pub max_samples: usize,
    pub r_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub probes: Option<Vec<Pt>>,
}

impl ConvergenceConfig {
    /// Reads schedule, `h` factor, grids, probes and exact solution from the
    /// spec; `schedule` overrides the spec's own.
    pub fn from_spec(spec: &DomainSpec, schedule: Option<Vec<f64>>) -> Result<Self, EuclidError> {
        spec.validate()?;
        let schedule = schedule.or_else(|| spec.eps_schedule.clone()).ok_or(EuclidError::Schedule)?;
        Ok(ConvergenceConfig {
            schedule,
            h_factor: spec.h_factor(),
            exact: spec.exact.clone(),
            tol: 1e-10,
            max_samples: DEFAULT_MAX_SAMPLES,
            r_grid: spec.r_grid.clone(),
            delta_grid: spec.delta_grid.clone(),
            probes: spec.probes.as_ref().map(|ps| ps.iter().map(|p| to_pt(p)).collect()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusEntry {
    pub r: f64,
    /// Adjacent pairs (`d < ε`) with both ends in `Ω_r`.
    pub pairs: usize,
    /// `max |u(x) - u(y)| / ε` over those pairs.
    pub c_r: Option<f64>,
    /// Per δ: `max |u(x) - u(y)|` over pairs in `Ω_r` with `d < δ`.
    pub oscillation: Vec<Option<f64>>,
    /// Per δ: `oscillation / δ`.
    pub c_prime: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryEntry {
    pub delta: f64,
    /// `max |u(x) - g(y₀)|` over boundary samples `y₀` and samples `x` with `d(x, y₀) < δ`.
    pub max_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelStats {
    pub h: f64,
    pub samples: usize,
    pub interior: usize,
    pub width: f64,
    pub w_i: usize,
    pub graph_width: usize,
    pub hop_check: HopCheck,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub sup_norm: f64,
    pub bound: f64,
    pub bound_ok: bool,
    pub modulus: Vec<ModulusEntry>,
    pub boundary: Vec<BoundaryEntry>,
    /// Boundary deviation at `δ = 2ε`.
    pub boundary_diagonal: BoundaryEntry,
    /// `sup |u - exact|` over the probe set (nearest samples).
    pub error: Option<f64>,
    /// `sup |u - exact|` over all samples.
    pub error_all: Option<f64>,
    pub probe_values: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<LevelStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub complete: bool,
    pub bound_ok: bool,
    pub all_converged: bool,
    /// Strictly decreasing probe-set error column; `None` without an exact solution.
    pub errors_decreasing: Option<bool>,
    /// The same for the error over all samples.
    pub errors_all_decreasing: Option<bool>,
    pub cauchy_decreasing: bool,
    /// Per `r`: `C_r` at the finest level over `C_r` at the coarsest.
    pub c_r_growth: Vec<Option<f64>>,
    /// Boundary diagonal decreases over the last two levels.
    pub boundary_decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub shape: Shape,
    pub rhs_sign: RhsSign,
    pub h_factor: f64,
    pub r_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub probes: Vec<Pt>,
    pub levels: Vec<LevelReport>,
    /// `sup` over probes of `|u_i - u_{i+1}|` for successive levels.
    pub cauchy: Vec<Option<f64>>,
    pub summary: Summary,
}

struct Grids<'a> {
    r: &'a [f64],
    delta: &'a [f64],
    probes: &'a [Pt],
}

fn modulus_table(sample: &DomainSample, u: &ScalarField, eps: f64, grids: &Grids) -> Vec<ModulusEntry> {
    let r_min = grids.r.first().copied().unwrap_or(f64::INFINITY);
    let reach = grids.delta.iter().copied().fold(eps, f64::max);
    let nr = grids.r.len();
    let nd = grids.delta.len();
    // Per interior sample: (pairs, c_r max, oscillation per δ) for each r.
    let partial: Vec<(Vec<usize>, Vec<f64>, Vec<Vec<f64>>)> = (0..sample.interior)
        .into_par_iter()
        .filter(|&i| sample.in_omega_r(i, r_min))
        .map(|i| {
            let mut pairs = vec![0usize; nr];
            let mut adj = vec![f64::NEG_INFINITY; nr];
            let mut osc = vec![vec![f64::NEG_INFINITY; nd]; nr];
            for (j, d) in sample.pairs_within(i, reach) {
                if j <= i || j >= sample.interior {
                    continue;
                }
                let diff = (u[i] - u[j]).abs();
                for (k, &r) in grids.r.iter().enumerate() {
                    if !(sample.in_omega_r(i, r) && sample.in_omega_r(j, r)) {
                        continue;
                    }
                    if d < eps {
                        pairs[k] += 1;
                        adj[k] = adj[k].max(diff);
                    }
                    for (m, &delta) in grids.delta.iter().enumerate() {
                        if d < delta {
                            osc[k][m] = osc[k][m].max(diff);
                        }
                    }
                }
            }
            (pairs, adj, osc)
        })
        .collect();
    let finite = |v: f64| (v > f64::NEG_INFINITY).then_some(v);
    (0..nr)
        .map(|k| {
            let pairs = partial.iter().map(|p| p.0[k]).sum();
            let adj = partial.iter().map(|p| p.1[k]).fold(f64::NEG_INFINITY, f64::max);
            let oscillation: Vec<Option<f64>> =
                (0..nd).map(|m| finite(partial.iter().map(|p| p.2[k][m]).fold(f64::NEG_INFINITY, f64::max))).collect();
            ModulusEntry {
                r: grids.r[k],
                pairs,
                c_r: finite(adj).map(|a| a / eps),
                c_prime: oscillation.iter().zip(grids.delta).map(|(o, d)| o.map(|o| o / d)).collect(),
                oscillation,
            }
        })
        .collect()
}

fn boundary_table(sample: &DomainSample, u: &ScalarField, deltas: &[f64]) -> Vec<BoundaryEntry> {
    let reach = deltas.iter().copied().fold(0.0, f64::max);
    let per_y: Vec<Vec<f64>> = (sample.interior..sample.len())
        .into_par_iter()
        .map(|y| {
            let mut dev = vec![f64::NEG_INFINITY; deltas.len()];
            for (x, d) in sample.pairs_within(y, reach) {
                let diff = (u[x] - u[y]).abs();
                for (m, &delta) in deltas.iter().enumerate() {
                    if d < delta {
                        dev[m] = dev[m].max(diff);
                    }
                }
            }
            dev
        })
        .collect();
    deltas
        .iter()
        .enumerate()
        .map(|(m, &delta)| {
            let v = per_y.iter().map(|d| d[m]).fold(f64::NEG_INFINITY, f64::max);
            BoundaryEntry { delta, max_deviation: (v > f64::NEG_INFINITY).then_some(v) }
        })
        .collect()
}

fn run_level(spec: &DomainSpec, cfg: &ConvergenceConfig, eps: f64, grids: &Grids) -> Result<LevelStats, EuclidError> {
    let h = eps / cfg.h_factor;
    let sample = sample_domain(&spec.shape, h)?;
    if sample.len() > cfg.max_samples {
        return Err(EuclidError::TooManySamples { count: sample.len(), cap: cfg.max_samples });
    }
    let bundle = build_eps_graph(&sample, eps, &spec.f, &spec.g, spec.rhs_sign)?;
    let out = solve(&bundle.problem, &SolveOptions { tol: cfg.tol, ..Default::default() })?;
    let u = &out.field;
    let bound = bundle.uniform_bound();
    let mut boundary = boundary_table(&sample, u, &[grids.delta, &[2.0 * eps]].concat());
    let boundary_diagonal = boundary.pop().expect("diagonal entry");
    let nearest: Vec<usize> = grids.probes.iter().map(|&p| sample.nearest(p)).collect();
    let sup_err = |idx: &mut dyn Iterator<Item = usize>, e: &FieldExpr| {
        idx.map(|i| (u[i] - e.eval(sample.points[i])).abs()).fold(0.0, f64::max)
    };
    let error = cfg.exact.as_ref().map(|e| sup_err(&mut nearest.iter().copied(), e));
    let error_all = cfg.exact.as_ref().map(|e| sup_err(&mut (0..sample.len()), e));
    Ok(LevelStats {
        h,
        samples: sample.len(),
        interior: sample.interior,
        width: bundle.width,
        w_i: bundle.w_i,
        graph_width: bundle.graph_width,
        hop_check: bundle.hop_check.clone(),
        iterations: out.iterations,
        converged: out.converged,
        residual: out.residual,
        sup_norm: u.sup_norm(),
        bound,
        bound_ok: uniform_bound_check(&bundle, &out),
        modulus: modulus_table(&sample, u, eps, grids),
        boundary,
        boundary_diagonal,
        error,
        error_all,
        probe_values: nearest.iter().map(|&i| u[i]).collect(),
        warnings: sample.warnings.clone(),
    })
}

/// Margin below which two table entries count as equal; well above the
/// solver tolerance times the squared graph width at desk scale.
const DECREASE_MARGIN: f64 = 1e-8;

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0] - DECREASE_MARGIN)
}

/// Solves the ε-graph problem for each ε of the schedule and tabulates
/// bounds, moduli, boundary attainment, successive differences and, when an
/// exact solution is given, errors. A failed level is recorded, not fatal.
pub fn convergence_run(spec: &DomainSpec, cfg: &ConvergenceConfig) -> Result<ConvergenceReport, EuclidError> {
    spec.validate()?;
    let sched = &cfg.schedule;
    if sched.is_empty() || sched.iter().any(|&e| !(e > 0.0)) || sched.windows(2).any(|w| w[1] >= w[0]) {
        return Err(EuclidError::Schedule);
    }
    if !(cfg.h_factor >= 10.0) {
        return Err(EuclidError::InvalidSpec(format!("h factor must be ≥ 10, got {}", cfg.h_factor)));
    }
    // Grids are fixed from a coarse look at the domain so every level shares them.
    let coarse = sample_domain(&spec.shape, sched[0] / 2.0)?;
    let w = coarse.width;
    let r_grid = cfg.r_grid.clone().unwrap_or_else(|| vec![0.1 * w, 0.25 * w, 0.5 * w]);
    let delta_grid = cfg.delta_grid.clone().unwrap_or_else(|| vec![0.1 * w, 0.2 * w, 0.4 * w]);
    // Default probes stay a quarter width inside, where convergence is locally uniform.
    let probes = cfg.probes.clone().unwrap_or_else(|| {
        (0..coarse.interior).filter(|&i| coarse.boundary_distance[i] >= 0.25 * w).map(|i| coarse.points[i]).collect()
    });
    let grids = Grids { r: &r_grid, delta: &delta_grid, probes: &probes };

    let levels: Vec<LevelReport> = sched
        .par_iter()
        .map(|&eps| match run_level(spec, cfg, eps, &grids) {
            Ok(stats) => LevelReport { eps, stats: Some(stats), failure: None },
            Err(e) => LevelReport { eps, stats: None, failure: Some(e.to_string()) },
        })
        .collect();

    let cauchy: Vec<Option<f64>> = levels
        .windows(2)
        .map(|w| match (&w[0].stats, &w[1].stats) {
            (Some(a), Some(b)) => {
                Some(a.probe_values.iter().zip(&b.probe_values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            }
            _ => None,
        })
        .collect();
    let stats: Vec<&LevelStats> = levels.iter().filter_map(|l| l.stats.as_ref()).collect();
    let complete = stats.len() == levels.len();
    let errors: Option<Vec<f64>> = stats.iter().map(|s| s.error).collect();
    let errors_all: Option<Vec<f64>> = stats.iter().map(|s| s.error_all).collect();
    let cauchy_vals: Option<Vec<f64>> = cauchy.iter().copied().collect();
    let diag: Option<Vec<f64>> = stats.iter().map(|s| s.boundary_diagonal.max_deviation).collect();
    let c_r_growth = (0..r_grid.len())
        .map(|k| {
            let first = stats.first()?.modulus[k].c_r?;
            let last = stats.last()?.modulus[k].c_r?;
            (first > 0.0).then(|| last / first)
        })
        .collect();
    let summary = Summary {
        complete,
        bound_ok: complete && stats.iter().all(|s| s.bound_ok),
        all_converged: complete && stats.iter().all(|s| s.converged),
        errors_decreasing: errors.filter(|_| complete).map(|e| strictly_decreasing(&e)),
        errors_all_decreasing: errors_all.filter(|_| complete).map(|e| strictly_decreasing(&e)),
        cauchy_decreasing: cauchy_vals.is_some_and(|c| strictly_decreasing(&c)),
        c_r_growth,
        boundary_decreasing: complete
            && diag.is_some_and(|d| d.len() < 2 || strictly_decreasing(&d[d.len() - 2..])),
    };
    Ok(ConvergenceReport {
        shape: spec.shape.clone(),
        rhs_sign: spec.rhs_sign,
        h_factor: cfg.h_factor,
        r_grid,
        delta_grid,
        probes,
        levels,
        cauchy,
        summary,
    })
}
