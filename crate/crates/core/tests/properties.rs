use std::collections::VecDeque;

use inflap::calculus::{
    barrier_field, check_barrier, comparison_check, inf_laplacian, quadratic_prop_check, QuadraticProfile, Side,
};
use inflap::solver::{solve, solve_exact_amle, sweep, SolveOptions};
use inflap::{DirichletProblem, Graph, ScalarField, Vertex};
use proptest::prelude::*;

/// Connected graph on `n` vertices: a random tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
        let extra = proptest::collection::vec((0..n, 0..n), 0..n);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (i + 1, p)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            edges.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
            edges.dedup_by_key(|&mut (a, b)| (a.min(b), a.max(b)));
            (n, edges)
        })
    })
}

fn bfs(g: &Graph, src: &[Vertex]) -> Vec<Option<usize>> {
    let mut d = vec![None; g.len()];
    let mut q = VecDeque::new();
    for &s in src {
        d[s] = Some(0);
        q.push_back(s);
    }
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if d[w].is_none() {
                d[w] = Some(d[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    d
}

/// Random problem on a connected graph; vertex 0 is always on the boundary.
fn problem(max_n: usize, f_range: std::ops::Range<f64>) -> impl Strategy<Value = DirichletProblem> {
    connected_graph(max_n).prop_flat_map(move |(n, edges)| {
        let mask = proptest::collection::vec(any::<bool>(), n);
        let vals = proptest::collection::vec(-3.0..3.0f64, n);
        let fs = proptest::collection::vec(f_range.clone(), n);
        (Just(n), Just(edges), mask, vals, fs).prop_filter_map("needs interior", |(n, edges, mask, g, f)| {
            let interior: Vec<Vertex> = (1..n).filter(|&v| mask[v]).collect();
            if interior.is_empty() {
                return None;
            }
            let graph = Graph::from_edges(n, &edges).unwrap();
            DirichletProblem::new(graph, &interior, ScalarField::new(f), ScalarField::new(g)).ok()
        })
    })
}

fn tight() -> SolveOptions {
    SolveOptions { tol: 1e-11, ..SolveOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_are_a_metric((n, edges) in connected_graph(24)) {
        let g = Graph::from_edges(n, &edges).unwrap();
        let d: Vec<Vec<usize>> = (0..n).map(|a| bfs(&g, &[a]).into_iter().map(Option::unwrap).collect()).collect();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(g.distance(&[a], b).unwrap().exact(), Some(d[a][b]));
                prop_assert_eq!(d[a][b], d[b][a]);
                prop_assert_eq!(d[a][b] == 0, a == b);
                for c in 0..n {
                    prop_assert!(d[a][c] <= d[a][b] + d[b][c]);
                }
            }
        }
    }

    #[test]
    fn width_matches_brute_force(p in problem(24, 0.0..1.0)) {
        let boundary: Vec<Vertex> = p.partition.boundary().collect();
        let d = bfs(&p.graph, &boundary);
        let brute = p.interior().iter().map(|&x| d[x].unwrap()).max().unwrap();
        prop_assert_eq!(p.width().finite(), Some(brute));
    }

    #[test]
    fn laplacian_shift_and_scale(
        (n, edges) in connected_graph(16),
        u in proptest::collection::vec(-5.0..5.0f64, 16),
        alpha in -3.0..3.0f64,
        beta in -10.0..10.0f64,
    ) {
        let g = Graph::from_edges(n, &edges).unwrap();
        let u = ScalarField::new(u[..n].to_vec());
        let w = u.map(|t| alpha * t + beta);
        for x in 0..n {
            let base = inf_laplacian(&g, &u, x).unwrap();
            let moved = inf_laplacian(&g, &w, x).unwrap();
            prop_assert!((moved - alpha * base).abs() <= 1e-9 * (1.0 + base.abs() * alpha.abs()));
        }
    }

    #[test]
    fn sweep_is_monotone_and_nonexpansive(
        p in problem(16, -1.0..1.0),
        a in proptest::collection::vec(-4.0..4.0f64, 16),
        bump in proptest::collection::vec(0.0..2.0f64, 16),
        b in proptest::collection::vec(-4.0..4.0f64, 16),
    ) {
        let n = p.graph.len();
        let u = ScalarField::new(a[..n].to_vec());
        let above = ScalarField::from_fn(n, |v| u[v] + bump[v]);
        let (su, sa) = (sweep(&p, &u).unwrap(), sweep(&p, &above).unwrap());
        for v in 0..n {
            prop_assert!(su[v] <= sa[v] + 1e-12);
        }
        // Nonexpansive in the sup norm once both fields carry the boundary data.
        let w = ScalarField::new(b[..n].to_vec());
        let pin = |z: &ScalarField| ScalarField::from_fn(n, |v| if p.is_interior(v) { z[v] } else { p.g[v] });
        let (u0, w0) = (pin(&u), pin(&w));
        let sw = sweep(&p, &w0).unwrap();
        let su0 = sweep(&p, &u0).unwrap();
        prop_assert!(su0.sup_distance(&sw) <= u0.sup_distance(&w0) + 1e-12);
    }

    #[test]
    fn solver_matches_exact_amle(p in problem(20, 0.0..0.0001)) {
        let p = DirichletProblem::new(p.graph.clone(), p.interior(), ScalarField::zeros(p.graph.len()), p.g.clone()).unwrap();
        let exact = solve_exact_amle(&p).unwrap();
        let out = solve(&p, &tight()).unwrap();
        prop_assert!(out.converged);
        prop_assert!(out.field.sup_distance(&exact) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Sub- and supersolutions built by solving with a larger (smaller)
    /// right-hand side and arbitrary boundary data.
    #[test]
    fn comparison_holds(
        p in problem(18, 0.0..1.0),
        up in proptest::collection::vec(0.0..1.0f64, 18),
        down in proptest::collection::vec(0.0..1.0f64, 18),
        gu in proptest::collection::vec(-2.0..2.0f64, 18),
        gv in proptest::collection::vec(-2.0..2.0f64, 18),
    ) {
        let n = p.graph.len();
        let variant = |df: &[f64], sign: f64, g: &[f64]| {
            let f = ScalarField::from_fn(n, |v| p.f[v] + sign * df[v]);
            DirichletProblem::new(p.graph.clone(), p.interior(), f, ScalarField::new(g[..n].to_vec())).unwrap()
        };
        let u = solve(&variant(&up, 1.0, &gu), &tight()).unwrap();
        let v = solve(&variant(&down, -1.0, &gv), &tight()).unwrap();
        prop_assert!(u.converged && v.converged);
        let rep = comparison_check(&p, &u.field, &v.field, 1e-8).unwrap();
        prop_assert!(rep.hypotheses_met, "{:?}", rep.notes);
        prop_assert!(rep.verdict);
        prop_assert!(rep.boundary_witness.is_some());
    }
}

/// Paths, cycles and caterpillars (a path with pendant legs).
fn path_structured() -> impl Strategy<Value = Graph> {
    (3usize..30, 0usize..3, proptest::collection::vec(any::<bool>(), 30)).prop_map(|(n, kind, legs)| match kind {
        0 => Graph::path(n),
        1 => Graph::cycle(n),
        _ => {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            let mut next = n;
            for (i, _) in legs.iter().enumerate().take(n).filter(|(_, &l)| l) {
                edges.push((i, next));
                next += 1;
            }
            Graph::from_edges(next, &edges).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn barriers_hold(
        g in path_structured(),
        radius in 1usize..6,
        c in 0.0..2.0f64,
        extra in 0.001..3.0f64,
        a in -2.0..2.0f64,
        gvals in proptest::collection::vec(-2.0..2.0f64, 64),
        fvals in proptest::collection::vec(-1.0..1.0f64, 64),
        anchor_pick in any::<proptest::sample::Index>(),
    ) {
        let n = g.len();
        // Quadratic profile properties with b > R·c.
        let profile = QuadraticProfile { a, b: radius as f64 * c + extra, c };
        let anchor = anchor_pick.index(n);
        let rep = quadratic_prop_check(&g, &[anchor], profile, radius).unwrap();
        prop_assert!(rep.monotone_ok);
        prop_assert!(rep.operator_ok, "{:?}", rep);

        // Barrier guarantees on the augmented graph: endpoints of the path
        // (and the leg tips) form Y.
        let boundary: Vec<Vertex> = (0..n).filter(|&v| g.degree(v) == 1 || v == 0).collect();
        let interior: Vec<Vertex> = (0..n).filter(|v| !boundary.contains(v)).collect();
        prop_assume!(!interior.is_empty());
        let p = DirichletProblem::new(
            g.clone(),
            &interior,
            ScalarField::new(fvals[..n].to_vec()),
            ScalarField::new(gvals[..n].to_vec()),
        ).unwrap();
        let y0 = boundary[anchor_pick.index(boundary.len())];
        let c = p.f_norm();
        for side in [Side::Upper, Side::Lower] {
            let b = barrier_field(&p, y0, c, radius, side).unwrap();
            let check = check_barrier(&p, &b, 1e-9);
            prop_assert!(check.holds, "{:?} {:?}", side, check);
        }
    }
}
