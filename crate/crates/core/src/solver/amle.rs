//! Exact solution of `Δ∞u = 0` on a finite graph by repeated steepest-path
//! interpolation.
//!
//! Among all paths of length ≥ 2 whose endpoints carry values and whose inner
//! vertices do not, take one of maximal slope `(val(b) - val(a)) / len`, fill
//! it in linearly and repeat. Components that touch a single valued vertex
//! end up constant.

use std::collections::VecDeque;

use super::SolveError;
use crate::field::ScalarField;
use crate::graph::{Graph, Vertex};
use crate::problem::DirichletProblem;

/// Lengths of paths from `b` whose inner vertices are all unvalued. Valued
/// vertices are reached but not expanded, and a direct edge from `b` to a
/// valued vertex does not count.
fn unvalued_bfs(g: &Graph, valued: &[Option<f64>], b: Vertex) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.len()];
    dist[b] = Some(0);
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued");
        if v != b && valued[v].is_some() {
            continue;
        }
        for &w in g.neighbors(v) {
            if v == b && valued[w].is_some() {
                continue;
            }
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

struct Candidate {
    slope: f64,
    a: Vertex,
    b: Vertex,
    len: usize,
}

pub fn solve_exact_amle(p: &DirichletProblem) -> Result<ScalarField, SolveError> {
    let g = &*p.graph;
    if p.interior().iter().any(|&x| p.f[x] != 0.0) {
        return Err(SolveError::NonzeroF);
    }
    if !g.is_fully_materialized() {
        let x = g.incomplete_vertices().next().expect("some vertex is incomplete");
        return Err(SolveError::TruncationLimited(g.id(x)));
    }
    let mut valued: Vec<Option<f64>> = (0..g.len()).map(|v| (!p.is_interior(v)).then(|| p.g[v])).collect();
    // Vertices in increasing id order, for tie-breaking.
    let by_id = g.vertices_by_id();
    let mut rank = vec![0usize; g.len()];
    for (r, &v) in by_id.iter().enumerate() {
        rank[v] = r;
    }

    loop {
        if valued.iter().all(Option::is_some) {
            break;
        }
        let mut best: Option<Candidate> = None;
        for &b in &by_id {
            let Some(vb) = valued[b] else { continue };
            let dist = unvalued_bfs(g, &valued, b);
            for &a in &by_id {
                let (Some(va), Some(len)) = (valued[a], dist[a]) else { continue };
                if a == b || len < 2 {
                    continue;
                }
                let slope = (vb - va) / len as f64;
                let better = match &best {
                    None => true,
                    Some(c) => slope > c.slope || (slope == c.slope && (rank[a], rank[b]) < (rank[c.a], rank[c.b])),
                };
                if better {
                    best = Some(Candidate { slope, a, b, len });
                }
            }
        }
        let Some(c) = best else {
            fill_constant_components(g, &mut valued);
            break;
        };
        // Lexicographically smallest geodesic from a to b through unvalued vertices.
        let dist = unvalued_bfs(g, &valued, c.b);
        let va = valued[c.a].expect("a is valued");
        let mut cur = c.a;
        for k in 1..c.len {
            let next = g
                .neighbors(cur)
                .iter()
                .copied()
                .filter(|&w| valued[w].is_none() && dist[w] == Some(c.len - k))
                .min_by_key(|&w| rank[w])
                .expect("a geodesic continues through unvalued vertices");
            valued[next] = Some(va + c.slope * k as f64);
            cur = next;
        }
    }
    Ok(ScalarField::new(valued.into_iter().map(|v| v.expect("all vertices valued")).collect()))
}

/// Gives each unvalued component the value of its single valued neighbour.
fn fill_constant_components(g: &Graph, valued: &mut [Option<f64>]) {
    for start in 0..g.len() {
        if valued[start].is_some() {
            continue;
        }
        let mut comp = vec![start];
        let mut seen = vec![false; g.len()];
        seen[start] = true;
        let mut value = None;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &w in g.neighbors(v) {
                match valued[w] {
                    Some(val) => value = Some(val),
                    None if !seen[w] => {
                        seen[w] = true;
                        comp.push(w);
                    }
                    None => {}
                }
            }
        }
        let value = value.expect("every interior vertex reaches the boundary");
        for v in comp {
            valued[v] = Some(value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_interpolates() {
        let mut g = ScalarField::zeros(5);
        g[4] = 2.0;
        let p = DirichletProblem::new(Graph::path(5), &[1, 2, 3], ScalarField::zeros(5), g).unwrap();
        assert_eq!(solve_exact_amle(&p).unwrap().values(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn equal_boundary_values_give_constant() {
        let g = Graph::grid(4, 4);
        let interior = [5, 6, 9, 10];
        let p = DirichletProblem::new(g, &interior, ScalarField::zeros(16), ScalarField::constant(16, 1.25)).unwrap();
        assert!(solve_exact_amle(&p).unwrap().values().iter().all(|&v| v == 1.25));
    }

    #[test]
    fn pendant_component_is_constant() {
        // 0 - 1 - 2 with a pendant 3 hanging off 1 and a dead-end 4 off 3.
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let gv = ScalarField::new(vec![0.0, 0.0, 4.0, 0.0, 0.0]);
        let p = DirichletProblem::new(g, &[1, 3, 4], ScalarField::zeros(5), gv).unwrap();
        let u = solve_exact_amle(&p).unwrap();
        assert_eq!(u.values(), &[0.0, 2.0, 4.0, 2.0, 2.0]);
    }

    #[test]
    fn direct_edge_does_not_hide_longer_path() {
        // 0 and 3 are adjacent and also joined through 1 - 2.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let gv = ScalarField::new(vec![0.0, 0.0, 0.0, 3.0]);
        let p = DirichletProblem::new(g, &[1, 2], ScalarField::zeros(4), gv).unwrap();
        assert_eq!(solve_exact_amle(&p).unwrap().values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_nonzero_f() {
        let p = DirichletProblem::new(Graph::path(3), &[1], ScalarField::constant(3, 1.0), ScalarField::zeros(3)).unwrap();
        assert_eq!(solve_exact_amle(&p).unwrap_err(), SolveError::NonzeroF);
    }
}
