use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::domain::{FieldExpr, RhsSign, Shape};
use super::{EuclidError, Pt};
use crate::field::ScalarField;
use crate::graph::{GraphBuilder, Vertex};
use crate::problem::DirichletProblem;

/// Fine-grid connection radius in units of `h`.
const RHO_FACTOR: f64 = 2.5;

#[derive(Clone, Debug)]
struct Axis {
    origin: f64,
    size: f64,
    cells: Option<i64>,
}

impl Axis {
    fn new(origin: f64, size: f64, period: Option<f64>) -> Axis {
        match period {
            Some(l) => {
                let n = ((l / size).floor() as i64).max(1);
                Axis { origin: 0.0, size: l / n as f64, cells: Some(n) }
            }
            None => Axis { origin, size, cells: None },
        }
    }

    fn key(&self, c: f64) -> i64 {
        let k = ((c - self.origin) / self.size).floor() as i64;
        self.cells.map_or(k, |n| k.rem_euclid(n))
    }

    fn range(&self, c: f64, r: f64) -> Vec<i64> {
        let lo = ((c - r - self.origin) / self.size).floor() as i64;
        let hi = ((c + r - self.origin) / self.size).floor() as i64;
        match self.cells {
            Some(n) if hi - lo + 1 >= n => (0..n).collect(),
            Some(n) => (lo..=hi).map(|k| k.rem_euclid(n)).collect(),
            None => (lo..=hi).collect(),
        }
    }
}

/// Uniform bucket grid for radius queries, periodic where the shape is.
#[derive(Clone, Debug)]
struct CellIndex {
    axes: [Axis; 2],
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl CellIndex {
    fn new(points: &[Pt], shape: &Shape, cell: f64) -> CellIndex {
        let per = shape.period();
        let axes = [Axis::new(0.0, cell, per[0]), Axis::new(0.0, cell, per[1])];
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry((axes[0].key(p[0]), axes[1].key(p[1]))).or_default().push(i as u32);
        }
        CellIndex { axes, cells }
    }

    /// Points at (minimum-image) Euclidean distance `< r` from `p`.
    fn within(&self, points: &[Pt], shape: &Shape, p: Pt, r: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for kx in self.axes[0].range(p[0], r) {
            for ky in self.axes[1].range(p[1], r) {
                for &j in self.cells.get(&(kx, ky)).map(Vec::as_slice).unwrap_or(&[]) {
                    let d = shape.dist(p, points[j as usize]);
                    if d < r {
                        out.push((j as usize, d));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed: BinaryHeap pops the smallest distance first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Grid restricted to `Ω̄`: interior samples first, then boundary samples.
#[derive(Clone, Debug)]
pub struct DomainSample {
    pub shape: Shape,
    pub h: f64,
    pub rho: f64,
    pub points: Vec<Pt>,
    pub interior: usize,
    /// `d(x, ∂Ω)` per sample, `0` on boundary samples.
    pub boundary_distance: Vec<f64>,
    /// `max` of `boundary_distance`, the measured width.
    pub width: f64,
    pub warnings: Vec<String>,
    fine: Vec<Vec<(u32, f64)>>,
    index: CellIndex,
}

fn fine_graph(shape: &Shape, points: &[Pt], index: &CellIndex, rho: f64) -> Vec<Vec<(u32, f64)>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut nb: Vec<(u32, f64)> = index
                .within(points, shape, p, rho)
                .into_iter()
                .filter(|&(j, _)| j != i && shape.visible(p, points[j]))
                .map(|(j, d)| (j as u32, d))
                .collect();
            nb.sort_by_key(|e| e.0);
            nb
        })
        .collect()
}

fn components(fine: &[Vec<(u32, f64)>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; fine.len()];
    let mut next = 0;
    for s in 0..fine.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, _) in &fine[v] {
                if comp[w as usize] == usize::MAX {
                    comp[w as usize] = next;
                    stack.push(w as usize);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Samples `Ω̄` at spacing `h`. Disconnected pieces of the sample are dropped,
/// keeping the largest component, with a warning.
pub fn sample_domain(shape: &Shape, h: f64) -> Result<DomainSample, EuclidError> {
    shape.validate()?;
    if !(h > 0.0) {
        return Err(EuclidError::InvalidSpec(format!("h must be positive, got {h}")));
    }
    let [(x0, dx, nx), (y0, dy, ny)] = shape.grid(h);
    let mut points: Vec<Pt> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let p = [x0 + i as f64 * dx, y0 + j as f64 * dy];
            if shape.strictly_inside(p) {
                points.push(p);
            }
        }
    }
    let mut interior = points.len();
    if interior == 0 {
        return Err(EuclidError::EmptyInterior(h));
    }
    points.extend(shape.boundary_points(h));
    let rho = RHO_FACTOR * h;
    let mut index = CellIndex::new(&points, shape, rho);
    let mut fine = fine_graph(shape, &points, &index, rho);
    let mut warnings = Vec::new();

    let comp = components(&fine);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    if ncomp > 1 {
        let mut sizes = vec![0usize; ncomp];
        for &c in &comp {
            sizes[c] += 1;
        }
        let keep = (0..ncomp).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).expect("nonempty");
        let dropped = points.len() - sizes[keep];
        warnings.push(format!("sample has {ncomp} components; kept the largest, dropped {dropped} samples"));
        interior = (0..interior).filter(|&i| comp[i] == keep).count();
        points = points.iter().zip(&comp).filter(|(_, &c)| c == keep).map(|(p, _)| *p).collect();
        if interior == 0 {
            return Err(EuclidError::EmptyInterior(h));
        }
        index = CellIndex::new(&points, shape, rho);
        fine = fine_graph(shape, &points, &index, rho);
    }
    if interior == points.len() {
        return Err(EuclidError::NoBoundary);
    }

    // The nearest boundary point is always seen along a straight segment, so
    // the intrinsic distance to ∂Ω is Euclidean.
    let bpts = &points[interior..];
    let boundary_distance: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            if i >= interior {
                0.0
            } else {
                bpts.iter().map(|&b| shape.dist(points[i], b)).fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let width = boundary_distance.iter().copied().fold(0.0, f64::max);
    Ok(DomainSample { shape: shape.clone(), h, rho, points, interior, boundary_distance, width, warnings, fine, index })
}

impl DomainSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_interior(&self, i: usize) -> bool {
        i < self.interior
    }

    /// Membership in `Ω_r = {x : d(x, ∂Ω) > r}`.
    pub fn in_omega_r(&self, i: usize, r: f64) -> bool {
        self.boundary_distance[i] > r
    }

    /// Closest sample to `p`.
    pub fn nearest(&self, p: Pt) -> usize {
        let mut r = self.h;
        loop {
            let hits = self.index.within(&self.points, &self.shape, p, r);
            if let Some(&(j, _)) = hits.iter().min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))) {
                return j;
            }
            r *= 2.0;
        }
    }

    pub fn fine_degree(&self, i: usize) -> usize {
        self.fine[i].len()
    }

    /// Dijkstra on the fine graph, stopping at `radius` (exclusive) or at `target`.
    fn dijkstra(&self, src: usize, radius: f64, target: Option<usize>) -> HashMap<u32, f64> {
        let mut dist: HashMap<u32, f64> = HashMap::new();
        let mut done: HashMap<u32, f64> = HashMap::new();
        let mut heap = BinaryHeap::from([Entry(0.0, src as u32)]);
        dist.insert(src as u32, 0.0);
        while let Some(Entry(d, v)) = heap.pop() {
            if done.contains_key(&v) || d > dist[&v] {
                continue;
            }
            done.insert(v, d);
            if target == Some(v as usize) {
                break;
            }
            for &(w, len) in &self.fine[v as usize] {
                let nd = d + len;
                if nd < radius && !done.contains_key(&w) && dist.get(&w).is_none_or(|&old| nd < old) {
                    dist.insert(w, nd);
                    heap.push(Entry(nd, w));
                }
            }
        }
        done
    }

    /// Shortest fine-grid path length, `∞` if unreachable.
    pub fn grid_distance(&self, x: usize, y: usize) -> f64 {
        self.dijkstra(x, f64::INFINITY, Some(y)).get(&(y as u32)).copied().unwrap_or(f64::INFINITY)
    }

    /// Samples at intrinsic distance `< radius` from `i`, excluding `i`.
    pub fn pairs_within(&self, i: usize, radius: f64) -> Vec<(usize, f64)> {
        let p = self.points[i];
        let mut cand = self.index.within(&self.points, &self.shape, p, radius);
        cand.retain(|&(j, _)| j != i);
        if self.shape.all_visible() {
            cand.sort_by_key(|e| e.0);
            return cand;
        }
        let mut grid: Option<HashMap<u32, f64>> = None;
        let mut out = Vec::with_capacity(cand.len());
        for (j, d) in cand {
            if self.shape.visible(p, self.points[j]) {
                out.push((j, d));
            } else {
                let g = grid.get_or_insert_with(|| self.dijkstra(i, radius, None));
                if let Some(&dg) = g.get(&(j as u32)) {
                    out.push((j, dg));
                }
            }
        }
        out.sort_by_key(|e| e.0);
        out
    }
}

/// Intrinsic distance between samples: the straight segment when it stays in
/// `Ω̄`, else the fine-grid path length (overestimates by at most ~3%).
pub fn intrinsic_distance(sample: &DomainSample, x: usize, y: usize) -> f64 {
    if x == y {
        return 0.0;
    }
    let (p, q) = (sample.points[x], sample.points[y]);
    if sample.shape.visible(p, q) {
        sample.shape.dist(p, q)
    } else {
        sample.grid_distance(x, y)
    }
}

/// `⌊W/ε⌋ + 1`, with a rounding guard for exact multiples.
pub fn w_i(width: f64, eps: f64) -> usize {
    (width / eps + 1e-9).floor() as usize + 1
}

/// Agreement of ε-graph hop counts with `⌊d/ε⌋ + 1` on sampled pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopCheck {
    pub pairs: usize,
    pub agree: usize,
    /// Largest `hops - (⌊d/ε⌋ + 1)`.
    pub max_excess: i64,
    /// Smallest `hops - (⌊d/ε⌋ + 1)`.
    pub min_excess: i64,
}

#[derive(Clone, Debug)]
pub struct EpsGraphBundle {
    pub eps: f64,
    pub problem: DirichletProblem,
    /// Measured width of the sampled domain.
    pub width: f64,
    pub w_i: usize,
    pub graph_width: usize,
    pub hop_check: HopCheck,
}

fn hop_check(sample: &DomainSample, p: &DirichletProblem, eps: f64) -> HopCheck {
    let n = sample.len();
    let sources: Vec<usize> = (0..4).map(|k| k * sample.interior / 4).collect();
    let mut check = HopCheck { pairs: 0, agree: 0, max_excess: 0, min_excess: 0 };
    let mut first = true;
    for &s in &sources {
        let hops = p.graph.distance_map(&[s]).expect("source in range");
        let grid = (!sample.shape.all_visible()).then(|| sample.dijkstra(s, f64::INFINITY, None));
        for t in (0..n).step_by((n / 64).max(1)) {
            let Some(k) = hops.raw()[t] else { continue };
            if t == s {
                continue;
            }
            let (a, b) = (sample.points[s], sample.points[t]);
            let d = if sample.shape.visible(a, b) {
                sample.shape.dist(a, b)
            } else {
                grid.as_ref().and_then(|g| g.get(&(t as u32)).copied()).unwrap_or(f64::INFINITY)
            };
            let excess = k as i64 - w_i(d, eps) as i64;
            check.pairs += 1;
            check.agree += usize::from(excess == 0);
            if first {
                (check.max_excess, check.min_excess) = (excess, excess);
                first = false;
            }
            check.max_excess = check.max_excess.max(excess);
            check.min_excess = check.min_excess.min(excess);
        }
    }
    check
}

/// ε-graph on the samples with `f_ε = ±ε²f` on interior samples and `g` on
/// boundary samples.
pub fn build_eps_graph(
    sample: &DomainSample,
    eps: f64,
    f: &FieldExpr,
    g: &FieldExpr,
    sign: RhsSign,
) -> Result<EpsGraphBundle, EuclidError> {
    if !(eps > 0.0) || sample.h > eps / 10.0 * (1.0 + 1e-12) {
        return Err(EuclidError::StepTooLarge { h: sample.h, eps });
    }
    let n = sample.len();
    let adjacency: Vec<Vec<(usize, f64)>> = (0..n).into_par_iter().map(|i| sample.pairs_within(i, eps)).collect();
    let mut b = GraphBuilder::with_vertices(n);
    for (i, nb) in adjacency.iter().enumerate() {
        if i < sample.interior && nb.is_empty() {
            return Err(EuclidError::Isolated { index: i, point: sample.points[i], eps });
        }
        for &(j, _) in nb.iter().filter(|&&(j, _)| j > i) {
            b.add_edge(i, j).expect("indices in range");
        }
    }
    let interior: Vec<Vertex> = (0..sample.interior).collect();
    let scale = sign.factor() * eps * eps;
    let fv = ScalarField::from_fn(n, |i| if i < sample.interior { scale * f.eval(sample.points[i]) } else { 0.0 });
    let gv = ScalarField::from_fn(n, |i| if i < sample.interior { 0.0 } else { g.eval(sample.points[i]) });
    let problem = DirichletProblem::new(b.build(), &interior, fv, gv)?;
    let graph_width = problem.width().finite().unwrap_or(usize::MAX);
    let hop_check = hop_check(sample, &problem, eps);
    Ok(EpsGraphBundle { eps, width: sample.width, w_i: w_i(sample.width, eps), graph_width, hop_check, problem })
}
