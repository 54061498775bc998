//! Undirected graphs, combinatorial distances and truncation bookkeeping.
//!
//! A [`Graph`] is always finite in memory. Graphs that stand in for an
//! infinite (or not locally finite) graph carry a per-vertex completeness
//! flag: a vertex is *complete* when every one of its true neighbours is
//! exposed. Any answer that could change if incomplete vertices gained
//! neighbours is reported through [`Distance::Truncated`],
//! [`Width::Truncated`] or [`Ball::truncated`] instead of a plain number.
//!
//! Vertices are addressed by dense indices ([`Vertex`]). Each vertex also
//! carries an opaque external id (`i64`) used by the file formats; graphs
//! built by the generators in this crate use `id == index`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index, `0..graph.len()`.
pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(i64),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(i64),
    #[error("self-loop at vertex {0}")]
    SelfLoop(i64),
    #[error("adjacency is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(i64, i64),
    #[error("source set is empty")]
    EmptySources,
    #[error("graph document has neither `edges` nor `adjacency`")]
    NoEdges,
}

/// How the exposed vertex set relates to the graph it represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Every vertex is complete; the graph is exactly what is stored.
    Materialized,
    /// A finite window of a larger graph. `radius` is set when the window is
    /// the closed ball of that radius around `root`.
    Truncated { root: Vertex, radius: Option<usize> },
}

#[derive(Clone, Debug)]
enum IdMap {
    Identity,
    Table { ids: Vec<i64>, index: HashMap<i64, Vertex> },
}

#[derive(Clone, Debug)]
pub struct Graph {
    ids: IdMap,
    adj: Vec<Vec<Vertex>>,
    complete: Vec<bool>,
    kind: GraphKind,
    labels: BTreeMap<Vertex, String>,
}

/// Incremental construction; edges are deduplicated on `build`.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    ids: Option<(Vec<i64>, HashMap<i64, Vertex>)>,
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    incomplete: Vec<Vertex>,
    labels: BTreeMap<Vertex, String>,
    kind: Option<GraphKind>,
}

impl GraphBuilder {
    /// `n` vertices with ids `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        GraphBuilder { n, ..Default::default() }
    }

    /// Vertices with arbitrary external ids, in the given order.
    pub fn with_ids(ids: &[i64]) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        Ok(GraphBuilder { n: ids.len(), ids: Some((ids.to_vec(), index)), ..Default::default() })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Appends a vertex and returns its index. Only valid for identity-id builders.
    pub fn push_vertex(&mut self) -> Vertex {
        assert!(self.ids.is_none(), "push_vertex on a builder with explicit ids");
        self.n += 1;
        self.n - 1
    }

    pub fn index_of(&self, id: i64) -> Result<Vertex, GraphError> {
        match &self.ids {
            Some((_, index)) => index.get(&id).copied().ok_or(GraphError::UnknownVertex(id)),
            None if id >= 0 && (id as usize) < self.n => Ok(id as usize),
            None => Err(GraphError::UnknownVertex(id)),
        }
    }

    fn id_of(&self, v: Vertex) -> i64 {
        match &self.ids {
            Some((ids, _)) => ids[v],
            None => v as i64,
        }
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        if a >= self.n {
            return Err(GraphError::UnknownVertex(a as i64));
        }
        if b >= self.n {
            return Err(GraphError::UnknownVertex(b as i64));
        }
        if a == b {
            return Err(GraphError::SelfLoop(self.id_of(a)));
        }
        self.edges.push((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn mark_incomplete(&mut self, v: Vertex) {
        self.incomplete.push(v);
    }

    pub fn label(&mut self, v: Vertex, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn kind(&mut self, kind: GraphKind) {
        self.kind = Some(kind);
    }

    pub fn build(mut self) -> Graph {
        self.edges.sort_unstable();
        self.edges.dedup();
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut complete = vec![true; self.n];
        for &v in &self.incomplete {
            complete[v] = false;
        }
        let kind = match self.kind {
            Some(k) => k,
            None if self.incomplete.is_empty() => GraphKind::Materialized,
            None => GraphKind::Truncated { root: 0, radius: None },
        };
        let ids = match self.ids {
            Some((ids, index)) => IdMap::Table { ids, index },
            None => IdMap::Identity,
        };
        Graph { ids, adj, complete, kind, labels: self.labels }
    }
}

/// Neighbour enumeration for graphs that are too large (or infinite) to store.
pub trait NeighborOracle {
    /// Neighbours of `id`. `exhaustive` is false when the list is partial,
    /// e.g. for a vertex of infinite degree.
    fn neighbors(&self, id: i64) -> OracleNeighbors;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleNeighbors {
    pub ids: Vec<i64>,
    pub exhaustive: bool,
}

/// Combinatorial distance as far as the exposed graph can certify it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Exact(usize),
    /// No path exists, and no incomplete vertex could provide one.
    Unreachable,
    /// The true distance lies in `[lower, upper]`; `upper` is `None` when no
    /// exposed path exists.
    Truncated { lower: usize, upper: Option<usize> },
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            _ => None,
        }
    }

    /// A certified lower bound; `None` for [`Distance::Unreachable`] (infinite).
    pub fn lower_bound(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Unreachable => None,
            Distance::Truncated { lower, .. } => Some(lower),
        }
    }

    pub fn is_finite_upper(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Truncated { upper, .. } => upper,
            Distance::Unreachable => None,
        }
    }
}

/// Supremum of distances to a boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Width {
    Finite(usize),
    Infinite,
    Truncated { lower: usize, upper: Option<usize> },
}

impl Width {
    pub fn finite(self) -> Option<usize> {
        match self {
            Width::Finite(w) => Some(w),
            _ => None,
        }
    }
}

/// Result of a multi-source breadth-first search.
#[derive(Clone, Debug)]
pub struct DistanceMap {
    raw: Vec<Option<usize>>,
    nearest_incomplete: Option<usize>,
}

impl DistanceMap {
    pub fn get(&self, v: Vertex) -> Distance {
        let bound = self.nearest_incomplete.map(|m| m + 1);
        match (self.raw[v], bound) {
            (Some(d), None) => Distance::Exact(d),
            (Some(d), Some(b)) if d <= b => Distance::Exact(d),
            (Some(d), Some(b)) => Distance::Truncated { lower: b, upper: Some(d) },
            (None, None) => Distance::Unreachable,
            (None, Some(b)) => Distance::Truncated { lower: b, upper: None },
        }
    }

    /// Hop counts inside the exposed graph, ignoring truncation.
    pub fn raw(&self) -> &[Option<usize>] {
        &self.raw
    }

    /// Smallest exposed distance at which an incomplete vertex was reached.
    pub fn nearest_incomplete(&self) -> Option<usize> {
        self.nearest_incomplete
    }
}

/// Open ball `{y : d(x, y) < r}` restricted to exposed vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub vertices: Vec<Vertex>,
    /// True when unexposed vertices could belong to the ball.
    pub truncated: bool,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::with_vertices(n);
        for &(x, y) in edges {
            b.add_edge(x, y)?;
        }
        Ok(b.build())
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let mut edges: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Star with centre `0` and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|k| (0, k)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star edges are valid")
    }

    /// `w x h` grid graph; vertex `(i, j)` has index `j * w + i`.
    pub fn grid(w: usize, h: usize) -> Graph {
        let mut edges = Vec::new();
        for j in 0..h {
            for i in 0..w {
                let v = j * w + i;
                if i + 1 < w {
                    edges.push((v, v + 1));
                }
                if j + 1 < h {
                    edges.push((v, v + w));
                }
            }
        }
        Graph::from_edges(w * h, &edges).expect("grid edges are valid")
    }

    /// Exposes the closed ball of `radius` around `root` of an oracle graph.
    /// A vertex is complete iff its enumeration is exhaustive and every
    /// neighbour is exposed.
    pub fn explore(oracle: &dyn NeighborOracle, root: i64, radius: usize) -> Graph {
        let mut ids = vec![root];
        let mut index = HashMap::from([(root, 0usize)]);
        let mut depth = vec![0usize];
        let mut lists: Vec<OracleNeighbors> = Vec::new();
        let mut head = 0;
        while head < ids.len() {
            let list = oracle.neighbors(ids[head]);
            if depth[head] < radius {
                for &nb in &list.ids {
                    if !index.contains_key(&nb) {
                        index.insert(nb, ids.len());
                        ids.push(nb);
                        depth.push(depth[head] + 1);
                    }
                }
            }
            lists.push(list);
            head += 1;
        }
        let mut b = GraphBuilder::with_ids(&ids).expect("explored ids are unique");
        for (v, list) in lists.iter().enumerate() {
            let mut all_exposed = list.exhaustive;
            for nb in &list.ids {
                match index.get(nb) {
                    Some(&w) if w != v => b.add_edge(v, w).expect("indices are in range"),
                    Some(_) => {}
                    None => all_exposed = false,
                }
            }
            if !all_exposed {
                b.mark_incomplete(v);
            }
        }
        b.kind(GraphKind::Truncated { root: 0, radius: Some(radius) });
        b.build()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn are_adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn is_complete(&self, v: Vertex) -> bool {
        self.complete[v]
    }

    /// True when no vertex is flagged incomplete.
    pub fn is_fully_materialized(&self) -> bool {
        self.complete.iter().all(|&c| c)
    }

    pub fn incomplete_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.complete.iter().enumerate().filter(|(_, &c)| !c).map(|(v, _)| v)
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn labels(&self) -> &BTreeMap<Vertex, String> {
        &self.labels
    }

    pub fn id(&self, v: Vertex) -> i64 {
        match &self.ids {
            IdMap::Identity => v as i64,
            IdMap::Table { ids, .. } => ids[v],
        }
    }

    pub fn vertex(&self, id: i64) -> Result<Vertex, GraphError> {
        match &self.ids {
            IdMap::Identity if id >= 0 && (id as usize) < self.len() => Ok(id as usize),
            IdMap::Identity => Err(GraphError::UnknownVertex(id)),
            IdMap::Table { index, .. } => index.get(&id).copied().ok_or(GraphError::UnknownVertex(id)),
        }
    }

    /// Vertex indices ordered by external id.
    pub fn vertices_by_id(&self) -> Vec<Vertex> {
        let mut order: Vec<Vertex> = (0..self.len()).collect();
        if let IdMap::Table { ids, .. } = &self.ids {
            order.sort_by_key(|&v| ids[v]);
        }
        order
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn check(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v as i64))
        }
    }

    /// Multi-source breadth-first search from `sources`.
    pub fn distance_map(&self, sources: &[Vertex]) -> Result<DistanceMap, GraphError> {
        if sources.is_empty() {
            return Err(GraphError::EmptySources);
        }
        let mut raw = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            self.check(s)?;
            if raw[s].is_none() {
                raw[s] = Some(0);
                queue.push_back(s);
            }
        }
        let mut nearest_incomplete = None;
        while let Some(v) = queue.pop_front() {
            let d = raw[v].expect("queued vertices have a distance");
            if !self.complete[v] && nearest_incomplete.is_none() {
                nearest_incomplete = Some(d);
            }
            for &w in &self.adj[v] {
                if raw[w].is_none() {
                    raw[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(DistanceMap { raw, nearest_incomplete })
    }

    /// Certified lower bounds on `d(sources, x)` for every `x`, valid for any
    /// completion of the incomplete vertices. `sources` may be empty (all of
    /// them unexposed). `None` means the distance is certainly infinite.
    ///
    /// A true shortest path either stays on exposed edges or leaves through
    /// an incomplete vertex, so `d ≥ min(d_exposed(S, x), d_exposed(I, x) + 1)`.
    pub fn certified_lower_distances(&self, sources: &[Vertex]) -> Result<Vec<Option<usize>>, GraphError> {
        let exposed = if sources.is_empty() { None } else { Some(self.distance_map(sources)?) };
        let incomplete: Vec<Vertex> = self.incomplete_vertices().collect();
        let escape = if incomplete.is_empty() { None } else { Some(self.distance_map(&incomplete)?) };
        Ok((0..self.len())
            .map(|x| {
                let a = exposed.as_ref().and_then(|m| m.raw[x]);
                let b = escape.as_ref().and_then(|m| m.raw[x]).map(|d| d + 1);
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            })
            .collect())
    }

    /// Distance from a vertex set to a vertex.
    pub fn distance(&self, from: &[Vertex], to: Vertex) -> Result<Distance, GraphError> {
        self.check(to)?;
        Ok(self.distance_map(from)?.get(to))
    }

    /// `{y not in X : y ~ x for some x in X}`, restricted to exposed vertices.
    pub fn boundary_of(&self, set: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
        let mut inside = vec![false; self.len()];
        for &x in set {
            self.check(x)?;
            inside[x] = true;
        }
        Ok(self.boundary_of_mask(&inside))
    }

    pub(crate) fn boundary_of_mask(&self, inside: &[bool]) -> Vec<Vertex> {
        let mut out = BTreeSet::new();
        for (x, _) in inside.iter().enumerate().filter(|(_, &i)| i) {
            for &y in &self.adj[x] {
                if !inside[y] {
                    out.insert(y);
                }
            }
        }
        out.into_iter().collect()
    }

    /// `sup_{x in X} d(boundary(X), x)`, computed by one sweep from the boundary.
    pub fn width_of(&self, set: &[Vertex]) -> Result<Width, GraphError> {
        let mut inside = vec![false; self.len()];
        for &x in set {
            self.check(x)?;
            inside[x] = true;
        }
        Ok(self.width_of_mask(&inside))
    }

    pub(crate) fn width_of_mask(&self, inside: &[bool]) -> Width {
        let boundary = self.boundary_of_mask(inside);
        let members = inside.iter().enumerate().filter(|(_, &i)| i).map(|(x, _)| x);
        let any_incomplete = members.clone().any(|x| !self.complete[x]);
        if boundary.is_empty() {
            return if any_incomplete {
                Width::Truncated { lower: 0, upper: None }
            } else if members.clone().next().is_none() {
                Width::Finite(0)
            } else {
                Width::Infinite
            };
        }
        let map = self.distance_map(&boundary).expect("boundary is nonempty");
        aggregate_width(members.map(|x| map.get(x)), any_incomplete)
    }

    /// Open ball `B_x(r) = {y : d(x, y) < r}`.
    pub fn ball(&self, x: Vertex, r: usize) -> Result<Ball, GraphError> {
        let map = self.distance_map(&[x])?;
        let vertices: Vec<Vertex> = map
            .raw
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d < r))
            .map(|(v, _)| v)
            .collect();
        let truncated = map.nearest_incomplete.is_some_and(|m| m + 1 < r);
        Ok(Ball { vertices, truncated })
    }

    /// `sup_{x, y in X} d(x, y)`.
    pub fn diameter(&self, set: &[Vertex]) -> Result<Width, GraphError> {
        let any_incomplete = set.iter().any(|&x| !self.complete[x]);
        let mut dists = Vec::new();
        for &x in set {
            let map = self.distance_map(&[x])?;
            dists.extend(set.iter().map(|&y| map.get(y)));
        }
        Ok(aggregate_width(dists.into_iter(), any_incomplete))
    }
}

fn aggregate_width(dists: impl Iterator<Item = Distance>, open_ended: bool) -> Width {
    let mut lower = 0usize;
    let mut upper = Some(0usize);
    let mut truncated = open_ended;
    for d in dists {
        match d {
            Distance::Exact(d) => {
                lower = lower.max(d);
                upper = upper.map(|u| u.max(d));
            }
            Distance::Unreachable => return Width::Infinite,
            Distance::Truncated { lower: l, upper: u } => {
                truncated = true;
                lower = lower.max(l);
                upper = match (upper, u) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
            }
        }
    }
    if truncated {
        // Unexposed members of an incomplete set could be arbitrarily far away.
        let upper = if open_ended { None } else { upper };
        Width::Truncated { lower, upper }
    } else {
        Width::Finite(lower)
    }
}

/// JSON graph document: `{"vertices": [...], "edges": [[a, b], ...], "labels": {id: text}}`.
///
/// `adjacency` (an id -> neighbour-ids map) may replace `edges`; it must be
/// symmetric. `incomplete` lists vertices whose neighbourhoods are partial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<BTreeMap<i64, Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<i64, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incomplete: Option<Vec<i64>>,
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::with_ids(&self.vertices)?;
        match (&self.edges, &self.adjacency) {
            (Some(edges), _) => {
                for [x, y] in edges {
                    let (a, c) = (b.index_of(*x)?, b.index_of(*y)?);
                    b.add_edge(a, c)?;
                }
            }
            (None, Some(adjacency)) => {
                for (&x, list) in adjacency {
                    for &y in list {
                        let back = adjacency.get(&y).is_some_and(|l| l.contains(&x));
                        if !back {
                            return Err(GraphError::Asymmetric(x, y));
                        }
                        let (a, c) = (b.index_of(x)?, b.index_of(y)?);
                        b.add_edge(a, c)?;
                    }
                }
            }
            (None, None) => return Err(GraphError::NoEdges),
        }
        for &id in self.incomplete.iter().flatten() {
            let v = b.index_of(id)?;
            b.mark_incomplete(v);
        }
        for (&id, text) in self.labels.iter().flatten() {
            let v = b.index_of(id)?;
            b.label(v, text.clone());
        }
        Ok(b.build())
    }

    pub fn from_graph(g: &Graph) -> GraphDoc {
        let order = g.vertices_by_id();
        let mut edges: Vec<[i64; 2]> = g
            .edges()
            .map(|(a, b)| {
                let (x, y) = (g.id(a), g.id(b));
                [x.min(y), x.max(y)]
            })
            .collect();
        edges.sort_unstable();
        let incomplete: Vec<i64> = {
            let mut v: Vec<i64> = g.incomplete_vertices().map(|v| g.id(v)).collect();
            v.sort_unstable();
            v
        };
        let labels: BTreeMap<i64, String> = g.labels().iter().map(|(&v, s)| (g.id(v), s.clone())).collect();
        GraphDoc {
            vertices: order.iter().map(|&v| g.id(v)).collect(),
            edges: Some(edges),
            adjacency: None,
            labels: (!labels.is_empty()).then_some(labels),
            incomplete: (!incomplete.is_empty()).then_some(incomplete),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling(n: usize) -> Graph {
        let mut b = GraphBuilder::with_vertices(n + 1);
        for k in 1..=n {
            b.add_edge(0, k).unwrap();
            if 2 * k <= n {
                b.add_edge(k, 2 * k).unwrap();
            } else {
                b.mark_incomplete(k);
            }
        }
        b.mark_incomplete(0);
        b.build()
    }

    #[test]
    fn path_midpoint_distance() {
        let g = Graph::path(5);
        assert_eq!(g.distance(&[0, 4], 2).unwrap(), Distance::Exact(2));
        assert_eq!(g.distance(&[0, 4], 4).unwrap(), Distance::Exact(0));
    }

    #[test]
    fn doubling_hub_distance_is_exact() {
        let g = doubling(16);
        assert_eq!(g.distance(&[0], 12).unwrap(), Distance::Exact(1));
    }

    #[test]
    fn unknown_and_empty_inputs() {
        let g = Graph::path(3);
        assert_eq!(g.distance(&[0], 7), Err(GraphError::UnknownVertex(7)));
        assert_eq!(g.distance(&[], 1).unwrap_err(), GraphError::EmptySources);
        assert!(Graph::from_edges(2, &[(1, 1)]).is_err());
    }

    #[test]
    fn disconnected_is_unreachable() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.distance(&[0], 3).unwrap(), Distance::Unreachable);
        assert_eq!(g.width_of(&[2]).unwrap(), Width::Finite(1));
        assert_eq!(g.width_of(&[2, 3]).unwrap(), Width::Infinite);
    }

    #[test]
    fn boundary_and_width_on_path() {
        let g = Graph::path(5);
        assert_eq!(g.boundary_of(&[1, 2, 3]).unwrap(), vec![0, 4]);
        assert!(g.boundary_of(&[]).unwrap().is_empty());
        assert_eq!(g.width_of(&[1, 2, 3]).unwrap(), Width::Finite(2));
    }

    #[test]
    fn grid_width_by_hand() {
        let g = Graph::grid(5, 5);
        let interior: Vec<Vertex> = (1..4).flat_map(|j| (1..4).map(move |i| j * 5 + i)).collect();
        assert_eq!(interior.len(), 9);
        assert_eq!(g.width_of(&interior).unwrap(), Width::Finite(2));
    }

    #[test]
    fn balls_are_open() {
        let g = Graph::path(5);
        assert_eq!(g.ball(2, 2).unwrap().vertices, vec![1, 2, 3]);
        assert_eq!(g.ball(2, 1).unwrap().vertices, vec![2]);
        let d = doubling(8);
        let b = d.ball(0, 2).unwrap();
        assert_eq!(b.vertices, (0..=8).collect::<Vec<_>>());
        assert!(b.truncated);
    }

    #[test]
    fn truncation_is_reported() {
        // A window 0..=6 of the integer line; the ends continue.
        let mut b = GraphBuilder::with_vertices(7);
        for k in 1..7 {
            b.add_edge(k - 1, k).unwrap();
        }
        b.mark_incomplete(0);
        b.mark_incomplete(6);
        let g = b.build();
        // From 1, the incomplete end 0 is one hop away: anything beyond 2 hops is uncertain.
        assert_eq!(g.distance(&[1], 2).unwrap(), Distance::Exact(1));
        assert_eq!(g.distance(&[1], 5).unwrap(), Distance::Truncated { lower: 2, upper: Some(4) });
    }

    struct HalfLine;
    impl NeighborOracle for HalfLine {
        fn neighbors(&self, id: i64) -> OracleNeighbors {
            let ids = if id == 0 { vec![1] } else { vec![id - 1, id + 1] };
            OracleNeighbors { ids, exhaustive: true }
        }
    }

    #[test]
    fn explore_marks_frontier_incomplete() {
        let g = Graph::explore(&HalfLine, 0, 3);
        assert_eq!(g.len(), 4);
        assert!(g.is_complete(0) && g.is_complete(2));
        assert!(!g.is_complete(3));
        assert_eq!(g.kind(), &GraphKind::Truncated { root: 0, radius: Some(3) });
    }

    #[test]
    fn diameter_of_path() {
        let g = Graph::path(6);
        assert_eq!(g.diameter(&[0, 2, 5]).unwrap(), Width::Finite(5));
    }

    #[test]
    fn doc_round_trip_and_validation() {
        let doc: GraphDoc =
            serde_json::from_str(r#"{"vertices":[10,20,30],"edges":[[10,20],[20,10],[20,30]],"labels":{"10":"a"}}"#)
                .unwrap();
        let g = doc.to_graph().unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.vertex(30).unwrap(), 2);
        let back = GraphDoc::from_graph(&g);
        assert_eq!(back.edges.unwrap(), vec![[10, 20], [20, 30]]);

        let selfloop: GraphDoc = serde_json::from_str(r#"{"vertices":[1],"edges":[[1,1]]}"#).unwrap();
        assert_eq!(selfloop.to_graph().unwrap_err(), GraphError::SelfLoop(1));
        let asym: GraphDoc = serde_json::from_str(r#"{"vertices":[1,2],"adjacency":{"1":[2],"2":[]}}"#).unwrap();
        assert_eq!(asym.to_graph().unwrap_err(), GraphError::Asymmetric(1, 2));
    }
}
