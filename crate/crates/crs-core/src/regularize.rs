//! Reductions to 1-regular instances.
//!
//! Both reductions keep the original edges first (so the edge map is the
//! identity on them), attach gadget edges after, and leave mapped `x` values
//! bit-identical. Vertices whose slack is at most `skip_tol` receive no
//! gadget: the gadget edges they would get carry value 0 and can never
//! survive, so selection probabilities of mapped edges are unaffected.
//!
//! Reduced instances carry no arrival order; random-order runs resample
//! arrival times over all edges.

use crate::error::{Error, Result};
use crate::graph::{bipartition_of, one_regular_slack, GraphInstance, DEFAULT_FEAS_TOL};

/// Slack below which a vertex is left without a gadget.
pub const DEFAULT_SKIP_TOL: f64 = 1e-12;

/// A 1-regular instance plus the map from original edge indices into it.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub reduced: GraphInstance,
    pub edge_map: Vec<usize>,
    pub added_vertices: usize,
}

/// Attaches a 7-cycle `v0, v1, ..., v6, v0` to each vertex `v0` with slack
/// above `skip_tol`. With `L` the load of `v0`, cycle edges carry
/// `(1-L)/2` at even positions and `(1+L)/2` at odd positions, which makes
/// every touched vertex exactly 1-regular. All created cycles have length 7,
/// so absence of 3-cycles and 5-cycles is preserved.
pub fn regularize_seven_cycle(g: &GraphInstance, skip_tol: f64) -> Result<Reduction> {
    let slacks = one_regular_slack(g, DEFAULT_FEAS_TOL)?;
    let mut edges: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|e| (e.u, e.v, e.x)).collect();
    let mut next_vertex = g.vertex_count();
    for v0 in 0..g.vertex_count() {
        if slacks[v0] <= skip_tol {
            continue;
        }
        let load = 1.0 - slacks[v0];
        let even = (1.0 - load) / 2.0;
        let odd = (1.0 + load) / 2.0;
        let mut cycle = Vec::with_capacity(7);
        cycle.push(v0);
        for _ in 0..6 {
            cycle.push(next_vertex);
            next_vertex += 1;
        }
        for i in 0..7 {
            let value = if i % 2 == 0 { even } else { odd };
            edges.push((cycle[i], cycle[(i + 1) % 7], value));
        }
    }
    let reduced = GraphInstance::new(next_vertex, edges)?;
    Ok(Reduction {
        edge_map: (0..g.edge_count()).collect(),
        added_vertices: next_vertex - g.vertex_count(),
        reduced,
    })
}

/// Attaches a dummy biclique `K_{n,n}` to a bipartite instance. Every
/// original vertex `u` with slack above `skip_tol` gets cross edges of value
/// `(1 - load_u)/n` to all dummies of the opposite side, and dummy-dummy
/// edges carry `sum_e x_e / n^2`, which makes the result 1-regular and
/// bipartite. Sides are first padded to equal size with isolated vertices.
pub fn regularize_biclique(g: &GraphInstance, skip_tol: f64) -> Result<Reduction> {
    let slacks = one_regular_slack(g, DEFAULT_FEAS_TOL)?;
    let sides = match g.bipartition() {
        Some(s) => s.to_vec(),
        None => bipartition_of(g).ok_or(Error::NotBipartite)?,
    };
    let left: Vec<usize> = (0..g.vertex_count()).filter(|&v| sides[v] == 0).collect();
    let right: Vec<usize> = (0..g.vertex_count()).filter(|&v| sides[v] == 1).collect();
    let n = left.len().max(right.len()).max(1);

    // Padded real vertices: `n` slots per side, missing ones are isolated
    // dummies with slack 1.
    let mut next_vertex = g.vertex_count();
    let mut take = |list: &[usize], i: usize| -> usize {
        if i < list.len() {
            list[i]
        } else {
            let v = next_vertex;
            next_vertex += 1;
            v
        }
    };
    let left_pad: Vec<usize> = (0..n).map(|i| take(&left, i)).collect();
    let right_pad: Vec<usize> = (0..n).map(|i| take(&right, i)).collect();
    let clique_left: Vec<usize> = (0..n).map(|i| next_vertex + i).collect();
    let clique_right: Vec<usize> = (0..n).map(|i| next_vertex + n + i).collect();
    let total_vertices = next_vertex + 2 * n;

    let slack_of = |v: usize| if v < g.vertex_count() { slacks[v] } else { 1.0 };
    let mut edges: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|e| (e.u, e.v, e.x)).collect();
    for &u in &left_pad {
        let s = slack_of(u);
        if s <= skip_tol {
            continue;
        }
        for &vk in &clique_right {
            edges.push((u, vk, s / n as f64));
        }
    }
    for &v in &right_pad {
        let s = slack_of(v);
        if s <= skip_tol {
            continue;
        }
        for &uk in &clique_left {
            edges.push((uk, v, s / n as f64));
        }
    }
    let total_x: f64 = g.edges().iter().map(|e| e.x).sum();
    let clique_value = total_x / (n * n) as f64;
    if clique_value > 0.0 {
        for &uk in &clique_left {
            for &vk in &clique_right {
                edges.push((uk, vk, clique_value));
            }
        }
    }

    let mut new_sides = vec![0u8; total_vertices];
    for v in 0..g.vertex_count() {
        new_sides[v] = sides[v];
    }
    for (i, &v) in left_pad.iter().enumerate() {
        new_sides[v] = 0;
        new_sides[clique_left[i]] = 0;
    }
    for (i, &v) in right_pad.iter().enumerate() {
        new_sides[v] = 1;
        new_sides[clique_right[i]] = 1;
    }
    let reduced = GraphInstance::new(total_vertices, edges)?.with_bipartition(new_sides)?;
    Ok(Reduction {
        edge_map: (0..g.edge_count()).collect(),
        added_vertices: total_vertices - g.vertex_count(),
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{require_one_regular, short_odd_cycles, validate_instance};
    use crate::instances;

    fn single_edge(x: f64) -> GraphInstance {
        GraphInstance::new(2, vec![(0, 1, x)]).unwrap()
    }

    #[test]
    fn seven_cycle_on_single_half_edge() {
        let g = single_edge(0.5);
        let red = regularize_seven_cycle(&g, DEFAULT_SKIP_TOL).unwrap();
        // one gadget of 6 fresh vertices per slack vertex
        assert_eq!(red.added_vertices, 12);
        assert_eq!(red.reduced.edge_count(), 1 + 14);
        require_one_regular(&red.reduced, 1e-9).unwrap();
        // gadget values alternate (1-L)/2 = 0.25 and (1+L)/2 = 0.75
        let gadget: Vec<f64> = red.reduced.edges()[1..8].iter().map(|e| e.x).collect();
        assert_eq!(gadget, vec![0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25]);
        // mapped value unchanged bitwise
        assert_eq!(red.reduced.edges()[0].x.to_bits(), 0.5f64.to_bits());
    }

    #[test]
    fn seven_cycle_skips_regular_instances() {
        let g = instances::gen_complete_bipartite(2).unwrap();
        let red = regularize_seven_cycle(&g, 0.0).unwrap();
        assert_eq!(red.added_vertices, 0);
        assert_eq!(red.reduced.edge_count(), g.edge_count());
    }

    #[test]
    fn seven_cycle_at_full_slack_uses_half_values() {
        // a vertex whose edges all carry x = 0 has load 0, so the gadget
        // alternates (1-0)/2 = 0.5 and (1+0)/2 = 0.5
        let g = single_edge(0.0);
        let red = regularize_seven_cycle(&g, DEFAULT_SKIP_TOL).unwrap();
        require_one_regular(&red.reduced, 1e-9).unwrap();
        for e in &red.reduced.edges()[1..8] {
            assert!((e.x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn seven_cycle_errors_on_infeasible() {
        let g = GraphInstance::new(3, vec![(0, 1, 0.8), (1, 2, 0.8)]).unwrap();
        assert!(regularize_seven_cycle(&g, DEFAULT_SKIP_TOL).is_err());
    }

    #[test]
    fn biclique_single_full_edge() {
        let g = single_edge(1.0).with_bipartition(vec![0, 1]).unwrap();
        let red = regularize_biclique(&g, DEFAULT_SKIP_TOL).unwrap();
        // zero-slack endpoints get no cross edges; one dummy edge of value 1
        assert_eq!(red.reduced.edge_count(), 2);
        assert_eq!(red.reduced.edges()[1].x, 1.0);
        require_one_regular(&red.reduced, 1e-9).unwrap();
    }

    #[test]
    fn biclique_single_half_edge() {
        let g = single_edge(0.5).with_bipartition(vec![0, 1]).unwrap();
        let red = regularize_biclique(&g, DEFAULT_SKIP_TOL).unwrap();
        require_one_regular(&red.reduced, 1e-9).unwrap();
        // n = 1: cross edges 0.5 on each side, dummy edge 0.5
        let values: Vec<f64> = red.reduced.edges()[1..].iter().map(|e| e.x).collect();
        assert_eq!(values, vec![0.5, 0.5, 0.5]);
        assert!(red.reduced.bipartition().is_some());
    }

    #[test]
    fn biclique_on_regular_input_adds_only_the_clique() {
        let g = instances::gen_complete_bipartite(2).unwrap();
        let red = regularize_biclique(&g, DEFAULT_SKIP_TOL).unwrap();
        // no cross edges, 4 dummy-dummy edges of value sum_x / n^2 = 0.5
        assert_eq!(red.reduced.edge_count(), g.edge_count() + 4);
        for e in &red.reduced.edges()[g.edge_count()..] {
            assert!((e.x - 0.5).abs() < 1e-15);
        }
        require_one_regular(&red.reduced, 1e-9).unwrap();
    }

    #[test]
    fn biclique_rejects_non_bipartite() {
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in u + 1..3 {
                edges.push((u, v, 0.4));
            }
        }
        let g = GraphInstance::new(3, edges).unwrap();
        assert!(matches!(
            regularize_biclique(&g, DEFAULT_SKIP_TOL),
            Err(Error::NotBipartite)
        ));
    }

    #[test]
    fn reductions_are_one_regular_on_random_instances() {
        for seed in 0..60 {
            let g = instances::gen_random_feasible(9, 14, 0.7, seed);
            let red = regularize_seven_cycle(&g, DEFAULT_SKIP_TOL).unwrap();
            require_one_regular(&red.reduced, 1e-9).unwrap();
            assert!(validate_instance(&red.reduced, 1e-9).feasible);
            for (orig, &mapped) in red.edge_map.iter().enumerate() {
                assert_eq!(
                    g.edges()[orig].x.to_bits(),
                    red.reduced.edges()[mapped].x.to_bits()
                );
            }
            let (c3_before, c5_before) = short_odd_cycles(&g);
            let (c3_after, c5_after) = short_odd_cycles(&red.reduced);
            if !c3_before {
                assert!(!c3_after);
            }
            if !c5_before {
                assert!(!c5_after);
            }

            if let Some(sides) = crate::graph::bipartition_of(&g) {
                let bg = g.clone().with_bipartition(sides).unwrap();
                let red = regularize_biclique(&bg, DEFAULT_SKIP_TOL).unwrap();
                require_one_regular(&red.reduced, 1e-9).unwrap();
                assert!(red.reduced.bipartition().is_some());
            }
        }
    }
}
