use serde::{Deserialize, Serialize};

use super::{EuclidError, Pt};

/// Shapes of finite width in ℝ¹ or ℝ².
///
/// `slab` and `punctured_box` stand in for unbounded domains: they are
/// periodic windows (x-periodic, resp. periodic in both axes), so the cuts
/// carry no boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `(lo, hi)` in one or two dimensions.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Annulus { center: [f64; 2], r_in: f64, r_out: f64 },
    /// `{(x, y): lower(x) < y < upper(x)}`, `x` periodic with the given period.
    /// Both graphs are tabulated at `period / len` spacing and interpolated linearly.
    Slab { period: f64, lower: Vec<f64>, upper: Vec<f64> },
    /// `(0, size)²` with the closed square `[notch, size]²` removed.
    LShape { size: f64, notch: f64 },
    /// Torus of `cells × cells` lattice cells of side `spacing`; the lattice
    /// points are the boundary.
    PuncturedBox { spacing: f64, cells: usize },
}

fn wrap(d: f64, period: Option<f64>) -> f64 {
    match period {
        Some(l) => d - l * (d / l).round(),
        None => d,
    }
}

fn interp_periodic(table: &[f64], period: f64, x: f64) -> f64 {
    let n = table.len();
    let t = (x / period).rem_euclid(1.0) * n as f64;
    let i = (t.floor() as usize).min(n - 1);
    let s = t - i as f64;
    table[i] * (1.0 - s) + table[(i + 1) % n] * s
}

/// Splits the closed polyline (or polygon if `closed`) into pieces of length ≤ h.
fn polyline(corners: &[Pt], h: f64, closed: bool) -> Vec<Pt> {
    let mut out = Vec::new();
    let edges = if closed { corners.len() } else { corners.len() - 1 };
    for e in 0..edges {
        let (a, b) = (corners[e], corners[(e + 1) % corners.len()]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let k = (len / h - 1e-9).ceil().max(1.0) as usize;
        for j in 0..k {
            let t = j as f64 / k as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    if !closed {
        out.push(*corners.last().expect("nonempty"));
    }
    out
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box { lo, .. } => lo.len(),
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<(), EuclidError> {
        let bad = |m: String| Err(EuclidError::InvalidSpec(m));
        match self {
            Shape::Box { lo, hi } => {
                if lo.len() != hi.len() || !(1..=2).contains(&lo.len()) {
                    return bad("box corners must both have 1 or 2 coordinates".into());
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return bad("box needs lo < hi in every coordinate".into());
                }
            }
            Shape::Annulus { r_in, r_out, .. } => {
                if !(*r_in > 0.0 && r_in < r_out) {
                    return bad(format!("annulus needs 0 < r_in < r_out, got {r_in}, {r_out}"));
                }
            }
            Shape::Slab { period, lower, upper } => {
                if !(*period > 0.0) || lower.is_empty() || lower.len() != upper.len() {
                    return bad("slab needs a positive period and equally long nonempty tables".into());
                }
                if lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
                    return bad("slab needs lower < upper at every table point".into());
                }
            }
            Shape::LShape { size, notch } => {
                if !(*notch > 0.0 && notch < size) {
                    return bad(format!("l_shape needs 0 < notch < size, got {notch}, {size}"));
                }
            }
            Shape::PuncturedBox { spacing, cells } => {
                if !(*spacing > 0.0) || *cells == 0 {
                    return bad("punctured_box needs spacing > 0 and at least one cell".into());
                }
            }
        }
        Ok(())
    }

    pub fn period(&self) -> [Option<f64>; 2] {
        match self {
            Shape::Slab { period, .. } => [Some(*period), None],
            Shape::PuncturedBox { spacing, cells } => {
                let l = spacing * *cells as f64;
                [Some(l), Some(l)]
            }
            _ => [None, None],
        }
    }

    /// Displacement `q - p`, minimum image on periodic axes.
    pub fn delta(&self, p: Pt, q: Pt) -> Pt {
        let per = self.period();
        [wrap(q[0] - p[0], per[0]), wrap(q[1] - p[1], per[1])]
    }

    pub fn dist(&self, p: Pt, q: Pt) -> f64 {
        let d = self.delta(p, q);
        d[0].hypot(d[1])
    }

    /// Grid anchor and extent: grid points are `origin + k·step` for `k < count`.
    pub(crate) fn grid(&self, h: f64) -> [(f64, f64, usize); 2] {
        let axis = |lo: f64, hi: f64| (lo, h, ((hi - lo) / h + 1e-9).floor() as usize + 1);
        let periodic = |l: f64| {
            let n = (l / h - 1e-9).ceil() as usize;
            (0.0, l / n as f64, n)
        };
        match self {
            Shape::Box { lo, hi } if lo.len() == 1 => [axis(lo[0], hi[0]), (0.0, h, 1)],
            Shape::Box { lo, hi } => [axis(lo[0], hi[0]), axis(lo[1], hi[1])],
            Shape::Annulus { center, r_out, .. } => {
                let k = (r_out / h).floor();
                [axis(center[0] - k * h, center[0] + r_out), axis(center[1] - k * h, center[1] + r_out)]
            }
            Shape::Slab { period, lower, upper } => {
                let lo = lower.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                [periodic(*period), axis(lo, hi)]
            }
            Shape::LShape { size, .. } => [axis(0.0, *size), axis(0.0, *size)],
            Shape::PuncturedBox { spacing, cells } => {
                let l = spacing * *cells as f64;
                [periodic(l), periodic(l)]
            }
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max),
            Shape::Annulus { r_out, .. } => *r_out,
            Shape::Slab { period, .. } => *period,
            Shape::LShape { size, .. } => *size,
            Shape::PuncturedBox { spacing, .. } => *spacing,
        }
    }

    /// Whether `p` lies in the open domain, away from `∂Ω` by more than a rounding margin.
    pub fn strictly_inside(&self, p: Pt) -> bool {
        let tol = 1e-9 * self.scale();
        match self {
            Shape::Box { lo, hi } => (0..lo.len()).all(|i| p[i] > lo[i] + tol && p[i] < hi[i] - tol),
            Shape::Annulus { center, r_in, r_out } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                r > r_in + tol && r < r_out - tol
            }
            Shape::Slab { period, lower, upper } => {
                p[1] > interp_periodic(lower, *period, p[0]) + tol && p[1] < interp_periodic(upper, *period, p[0]) - tol
            }
            Shape::LShape { size, notch } => {
                let in_box = p.iter().all(|&c| c > tol && c < size - tol);
                in_box && !(p[0] > notch - tol && p[1] > notch - tol)
            }
            Shape::PuncturedBox { spacing, .. } => {
                let off = |c: f64| wrap(c, Some(*spacing));
                off(p[0]).hypot(off(p[1])) > tol
            }
        }
    }

    /// Points of `∂Ω` with arc spacing ≤ h.
    pub fn boundary_points(&self, h: f64) -> Vec<Pt> {
        match self {
            Shape::Box { lo, hi } if lo.len() == 1 => vec![[lo[0], 0.0], [hi[0], 0.0]],
            Shape::Box { lo, hi } => polyline(&[[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]], h, true),
            Shape::Annulus { center, r_in, r_out } => {
                let mut out = Vec::new();
                for r in [*r_in, *r_out] {
                    let n = (std::f64::consts::TAU * r / h - 1e-9).ceil() as usize;
                    for k in 0..n {
                        let t = std::f64::consts::TAU * k as f64 / n as f64;
                        out.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
                    }
                }
                out
            }
            Shape::Slab { period, lower, upper } => {
                let m = lower.len();
                let dx = period / m as f64;
                let slope = lower
                    .iter()
                    .chain(upper)
                    .enumerate()
                    .map(|(i, &v)| {
                        let table = if i < m { lower } else { upper };
                        ((table[(i % m + 1) % m] - v) / dx).abs()
                    })
                    .fold(0.0, f64::max);
                let n = (period * (1.0 + slope * slope).sqrt() / h - 1e-9).ceil() as usize;
                let mut out = Vec::with_capacity(2 * n);
                for table in [lower, upper] {
                    for k in 0..n {
                        let x = period * k as f64 / n as f64;
                        out.push([x, interp_periodic(table, *period, x)]);
                    }
                }
                out
            }
            Shape::LShape { size, notch } => {
                let (s, n) = (*size, *notch);
                polyline(&[[0.0, 0.0], [s, 0.0], [s, n], [n, n], [n, s], [0.0, s]], h, true)
            }
            Shape::PuncturedBox { spacing, cells } => {
                let mut out = Vec::new();
                for j in 0..*cells {
                    for i in 0..*cells {
                        out.push([i as f64 * spacing, j as f64 * spacing]);
                    }
                }
                out
            }
        }
    }

    /// Every segment between points of `Ω̄` stays in `Ω̄`.
    pub fn all_visible(&self) -> bool {
        matches!(self, Shape::Box { .. } | Shape::PuncturedBox { .. })
    }

    /// Whether the segment from `p` to `p + delta(p, q)` lies in `Ω̄`.
    pub fn visible(&self, p: Pt, q: Pt) -> bool {
        let d = self.delta(p, q);
        let tol = 1e-9 * self.scale();
        match self {
            Shape::Box { .. } | Shape::PuncturedBox { .. } => true,
            Shape::Annulus { center, r_in, .. } => {
                let (ax, ay) = (p[0] - center[0], p[1] - center[1]);
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = if len2 > 0.0 { (-(ax * d[0] + ay * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
                (ax + t * d[0]).hypot(ay + t * d[1]) >= r_in - tol
            }
            Shape::LShape { size, notch } => !segment_hits_open_box(p, d, [*notch + tol; 2], [*size + 1.0; 2]),
            Shape::Slab { period, lower, upper } => {
                let len = d[0].hypot(d[1]);
                let cell = period / lower.len() as f64;
                let steps = ((len / cell) * 4.0).ceil().max(4.0) as usize;
                (0..=steps).all(|k| {
                    let t = k as f64 / steps as f64;
                    let (x, y) = (p[0] + t * d[0], p[1] + t * d[1]);
                    y >= interp_periodic(lower, *period, x) - tol && y <= interp_periodic(upper, *period, x) + tol
                })
            }
        }
    }
}

/// Liang–Barsky clip against the open box `(lo, hi)`.
fn segment_hits_open_box(p: Pt, d: Pt, lo: Pt, hi: Pt) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for i in 0..2 {
        if d[i] == 0.0 {
            if p[i] <= lo[i] || p[i] >= hi[i] {
                return false;
            }
            continue;
        }
        let (a, b) = ((lo[i] - p[i]) / d[i], (hi[i] - p[i]) / d[i]);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    t1 > t0
}

/// Scalar functions on `Ω̄` from a fixed catalog. Points are `(x, y)`; in one
/// dimension `y = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldExpr {
    Constant { value: f64 },
    /// `constant + gradient · p`.
    Affine { constant: f64, gradient: Vec<f64> },
    /// `a + b·|p - apex|`.
    Cone { apex: Vec<f64>, a: f64, b: f64 },
    /// `Σ coeffs[k] · p[axis]^k`.
    Polynomial {
        coeffs: Vec<f64>,
        #[serde(default)]
        axis: usize,
    },
    /// Values on a regular grid, multilinear interpolation, clamped outside.
    Table { origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64> },
}

impl FieldExpr {
    pub fn validate(&self, dim: usize) -> Result<(), EuclidError> {
        let bad = |m: String| Err(EuclidError::InvalidSpec(m));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            FieldExpr::Constant { value } if !value.is_finite() => bad("constant must be finite".into()),
            FieldExpr::Affine { constant, gradient } if gradient.len() != dim || !finite(gradient) || !constant.is_finite() => {
                bad(format!("affine gradient must have {dim} finite entries"))
            }
            FieldExpr::Cone { apex, a, b } if apex.len() != dim || !finite(apex) || !a.is_finite() || !b.is_finite() => {
                bad(format!("cone apex must have {dim} finite entries"))
            }
            FieldExpr::Polynomial { coeffs, axis } if *axis >= dim || coeffs.is_empty() || !finite(coeffs) => {
                bad("polynomial needs coefficients and an axis within the dimension".into())
            }
            FieldExpr::Table { origin, spacing, shape, values } => {
                let n: usize = shape.iter().product();
                if origin.len() != dim || spacing.len() != dim || shape.len() != dim {
                    bad(format!("table needs origin, spacing and shape of length {dim}"))
                } else if shape.iter().any(|&s| s < 2) || values.len() != n || !finite(values) {
                    bad(format!("table needs ≥ 2 nodes per axis and {n} finite values"))
                } else if spacing.iter().any(|&s| !(s > 0.0)) {
                    bad("table spacing must be positive".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, p: Pt) -> f64 {
        match self {
            FieldExpr::Constant { value } => *value,
            FieldExpr::Affine { constant, gradient } => constant + gradient.iter().zip(p).map(|(g, x)| g * x).sum::<f64>(),
            FieldExpr::Cone { apex, a, b } => {
                let r2: f64 = apex.iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum();
                a + b * r2.sqrt()
            }
            FieldExpr::Polynomial { coeffs, axis } => coeffs.iter().rev().fold(0.0, |acc, c| acc * p[*axis] + c),
            FieldExpr::Table { origin, spacing, shape, values } => {
                let dim = origin.len();
                let mut base = [0usize; 2];
                let mut frac = [0.0f64; 2];
                for i in 0..dim {
                    let t = ((p[i] - origin[i]) / spacing[i]).clamp(0.0, (shape[i] - 1) as f64);
                    base[i] = (t.floor() as usize).min(shape[i] - 2);
                    frac[i] = t - base[i] as f64;
                }
                let corners = 1usize << dim;
                (0..corners)
                    .map(|c| {
                        let mut w = 1.0;
                        let mut idx = 0;
                        for i in (0..dim).rev() {
                            let bit = (c >> i) & 1;
                            w *= if bit == 1 { frac[i] } else { 1.0 - frac[i] };
                            idx = idx * shape[i] + base[i] + bit;
                        }
                        w * values[idx]
                    })
                    .sum()
            }
        }
    }
}

/// Sign of the right-hand side in `Δ∞^ε u = ±ε²f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsSign {
    #[default]
    Plus,
    Minus,
}

impl RhsSign {
    pub fn factor(self) -> f64 {
        match self {
            RhsSign::Plus => 1.0,
            RhsSign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub shape: Shape,
    pub f: FieldExpr,
    pub g: FieldExpr,
    #[serde(default)]
    pub rhs_sign: RhsSign,
    /// Closed-form solution of the continuum problem, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<FieldExpr>,
    /// `h = ε / h_factor`; at least 10, default 20.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<Vec<f64>>>,
}

pub const DEFAULT_H_FACTOR: f64 = 20.0;

impl DomainSpec {
    pub fn new(shape: Shape, f: FieldExpr, g: FieldExpr) -> Self {
        DomainSpec {
            shape,
            f,
            g,
            rhs_sign: RhsSign::Plus,
            exact: None,
            h_factor: None,
            eps_schedule: None,
            r_grid: None,
            delta_grid: None,
            probes: None,
        }
    }

    pub fn validate(&self) -> Result<(), EuclidError> {
        self.shape.validate()?;
        let dim = self.shape.dim();
        for e in [Some(&self.f), Some(&self.g), self.exact.as_ref()].into_iter().flatten() {
            e.validate(dim)?;
        }
        if let Some(k) = self.h_factor {
            if !(k >= 10.0) {
                return Err(EuclidError::InvalidSpec(format!("h_factor must be ≥ 10, got {k}")));
            }
        }
        for grid in [&self.r_grid, &self.delta_grid].into_iter().flatten() {
            if grid.iter().any(|&v| !(v > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(EuclidError::InvalidSpec("r and δ grids must be positive and increasing".into()));
            }
        }
        if let Some(ps) = &self.probes {
            if ps.iter().any(|p| p.len() != dim) {
                return Err(EuclidError::InvalidSpec(format!("probe points need {dim} coordinates")));
            }
        }
        Ok(())
    }

    pub fn h_factor(&self) -> f64 {
        self.h_factor.unwrap_or(DEFAULT_H_FACTOR)
    }

    pub fn interval(f: FieldExpr, g: FieldExpr) -> Self {
        DomainSpec::new(Shape::Box { lo: vec![0.0], hi: vec![1.0] }, f, g)
    }
}

pub(crate) fn to_pt(v: &[f64]) -> Pt {
    [v[0], v.get(1).copied().unwrap_or(0.0)]
}
