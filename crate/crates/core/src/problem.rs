use std::sync::Arc;

use thiserror::Error;

use crate::field::ScalarField;
use crate::graph::{Graph, GraphError, Vertex, Width};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("interior vertex {0} has no path to the boundary: the width is infinite, and a finite width is required")]
    Disconnected(i64),
    #[error("field `{name}` has {got} values, expected {expected}")]
    Length { name: &'static str, got: usize, expected: usize },
    #[error("field `{0}` has a non-finite value at vertex {1}")]
    NonFinite(&'static str, i64),
    #[error("vertex {0} is listed twice in the interior")]
    DuplicateInterior(i64),
}

/// Split of the vertex set into interior `X` and boundary `Y = V \ X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    interior: Vec<bool>,
    members: Vec<Vertex>,
    width: Width,
}

impl Partition {
    /// Validates that every interior vertex reaches `Y` through exposed edges.
    pub fn new(g: &Graph, interior: &[Vertex]) -> Result<Self, ProblemError> {
        let mut mask = vec![false; g.len()];
        for &x in interior {
            if x >= g.len() {
                return Err(GraphError::UnknownVertex(x as i64).into());
            }
            if mask[x] {
                return Err(ProblemError::DuplicateInterior(g.id(x)));
            }
            mask[x] = true;
        }
        let mut members = interior.to_vec();
        members.sort_unstable();
        let width = g.width_of_mask(&mask);
        let boundary: Vec<Vertex> = (0..g.len()).filter(|&v| !mask[v]).collect();
        if !members.is_empty() {
            if boundary.is_empty() {
                // The whole boundary may lie beyond a truncation.
                if g.is_fully_materialized() {
                    return Err(ProblemError::Disconnected(g.id(members[0])));
                }
                return Ok(Partition { interior: mask, members, width });
            }
            let map = g.distance_map(&boundary)?;
            if let Some(&x) = members.iter().find(|&&x| map.raw()[x].is_none()) {
                // No exposed path; only a genuinely unreachable vertex is an error.
                if map.nearest_incomplete().is_none() {
                    return Err(ProblemError::Disconnected(g.id(x)));
                }
            }
        }
        Ok(Partition { interior: mask, members, width })
    }

    pub fn is_interior(&self, v: Vertex) -> bool {
        self.interior[v]
    }

    /// Interior vertices, ascending by index.
    pub fn interior(&self) -> &[Vertex] {
        &self.members
    }

    pub fn boundary(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.interior.iter().enumerate().filter(|(_, &i)| !i).map(|(v, _)| v)
    }

    pub fn mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn width(&self) -> Width {
        self.width
    }
}

/// `Δ∞u = f` on `X`, `u = g` on `Y`. Both fields are stored over all of `V`;
/// `f` is read on `X` only and `g` on `Y` only.
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub graph: Arc<Graph>,
    pub partition: Partition,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl DirichletProblem {
    pub fn new(
        graph: impl Into<Arc<Graph>>,
        interior: &[Vertex],
        f: ScalarField,
        g: ScalarField,
    ) -> Result<Self, ProblemError> {
        let graph = graph.into();
        let partition = Partition::new(&graph, interior)?;
        Self::with_partition(graph, partition, f, g)
    }

    pub fn with_partition(
        graph: Arc<Graph>,
        partition: Partition,
        mut f: ScalarField,
        mut g: ScalarField,
    ) -> Result<Self, ProblemError> {
        let n = graph.len();
        for (name, field) in [("f", &f), ("g", &g)] {
            if field.len() != n {
                return Err(ProblemError::Length { name, got: field.len(), expected: n });
            }
        }
        for v in 0..n {
            let (name, value) = if partition.is_interior(v) { ("f", f[v]) } else { ("g", g[v]) };
            if !value.is_finite() {
                return Err(ProblemError::NonFinite(name, graph.id(v)));
            }
            // Normalise the unused halves so equality and hashing are stable.
            if partition.is_interior(v) {
                g[v] = 0.0;
            } else {
                f[v] = 0.0;
            }
        }
        Ok(DirichletProblem { graph, partition, f, g })
    }

    pub fn interior(&self) -> &[Vertex] {
        self.partition.interior()
    }

    pub fn is_interior(&self, v: Vertex) -> bool {
        self.partition.is_interior(v)
    }

    pub fn width(&self) -> Width {
        self.partition.width()
    }

    /// `sup |f|` over `X`.
    pub fn f_norm(&self) -> f64 {
        self.interior().iter().fold(0.0, |m, &x| m.max(self.f[x].abs()))
    }

    /// `sup |g|` over `Y`.
    pub fn g_norm(&self) -> f64 {
        self.partition.boundary().fold(0.0, |m, y| m.max(self.g[y].abs()))
    }

    /// `Some(+1)` if `f ≥ 0` on `X`, `Some(-1)` if `f ≤ 0`, `None` if it changes sign.
    /// `f ≡ 0` reports `+1`.
    pub fn f_sign(&self) -> Option<i8> {
        let xs = self.interior();
        if xs.iter().all(|&x| self.f[x] >= 0.0) {
            Some(1)
        } else if xs.iter().all(|&x| self.f[x] <= 0.0) {
            Some(-1)
        } else {
            None
        }
    }

    /// Interior vertices whose neighbourhood is not fully exposed.
    pub fn incomplete_interior(&self) -> Vec<Vertex> {
        self.interior().iter().copied().filter(|&x| !self.graph.is_complete(x)).collect()
    }

    /// `g` on `Y` and `value` on `X`.
    pub fn boundary_extension(&self, value: f64) -> ScalarField {
        ScalarField::from_fn(self.graph.len(), |v| if self.is_interior(v) { value } else { self.g[v] })
    }
}
