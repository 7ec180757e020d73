//! Generators for the hard instances and benchmark graphs, with symmetry
//! classes declared wherever exchangeability follows from an automorphism.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::GraphInstance;
use crate::rng::trial_rng;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParamOutOfRange {
            what: "eps",
            lo: 0.0,
            hi: 1.0,
            value: eps,
        });
    }
    Ok(())
}

/// `K_4` with values `(1-eps)/2` along the 4-cycle and `eps` on the
/// diagonals, arriving as two diametrically opposite pairs followed by the
/// diagonals. The classes pool the two arrival-pairs and the diagonals.
pub fn gen_example_4cycle(eps: f64) -> Result<GraphInstance> {
    check_eps(eps)?;
    let c = (1.0 - eps) / 2.0;
    let edges = vec![
        (0, 1, c),
        (2, 3, c),
        (1, 2, c),
        (3, 0, c),
        (0, 2, eps),
        (1, 3, eps),
    ];
    GraphInstance::new(4, edges)?
        .with_arrival_order((0..6).collect())?
        .with_symmetry_classes(vec![vec![0, 1], vec![2, 3], vec![4, 5]])
}

/// Path of three edges with values `(1-eps, eps, 1-eps)`; the middle edge
/// arrives last.
pub fn gen_three_path(eps: f64) -> Result<GraphInstance> {
    check_eps(eps)?;
    let edges = vec![(0, 1, 1.0 - eps), (1, 2, eps), (2, 3, 1.0 - eps)];
    GraphInstance::new(4, edges)?
        .with_arrival_order(vec![0, 2, 1])?
        .with_bipartition(vec![0, 1, 0, 1])?
        .with_symmetry_classes(vec![vec![0, 2], vec![1]])
}

/// Complete 1-regular bipartite graph `K_{n,n}` with uniform values `1/n`.
/// All edges form a single symmetry class.
pub fn gen_complete_bipartite(n: usize) -> Result<GraphInstance> {
    if n == 0 {
        return Err(Error::ZeroCount { what: "n" });
    }
    let x = 1.0 / n as f64;
    let mut edges = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            edges.push((i, n + j, x));
        }
    }
    let mut sides = vec![0u8; 2 * n];
    for s in sides.iter_mut().skip(n) {
        *s = 1;
    }
    GraphInstance::new(2 * n, edges)?
        .with_bipartition(sides)?
        .with_symmetry_classes(vec![(0..n * n).collect()])
}

/// The 6-edge bipartite instance on which the events of both endpoints of
/// the final edge being matched are negatively correlated. Vertices are
/// `u1,u2,u3 = 0,1,2` and `v1,v2,v3 = 3,4,5`; all values are `1/3`.
pub fn gen_neg_correlation() -> GraphInstance {
    let x = 1.0 / 3.0;
    let edges = vec![
        (2, 4, x), // e1 = (u3, v2)
        (1, 5, x), // e2 = (u2, v3)
        (1, 4, x), // e3 = (u2, v2)
        (1, 3, x), // e4 = (u2, v1)
        (0, 4, x), // e5 = (u1, v2)
        (0, 3, x), // e6 = (u1, v1)
    ];
    GraphInstance::new(6, edges)
        .and_then(|g| g.with_arrival_order((0..6).collect()))
        .and_then(|g| g.with_bipartition(vec![0, 0, 0, 1, 1, 1]))
        .expect("fixed construction is structurally valid")
}

/// A center edge `(u0, v0)` plus `n` pendant edges on each center vertex,
/// all with value `1/(n+1)`. The center edge is index 0.
pub fn gen_star_pair(n: usize) -> Result<GraphInstance> {
    if n == 0 {
        return Err(Error::ZeroCount { what: "n" });
    }
    let x = 1.0 / (n + 1) as f64;
    let u0 = 0;
    let v0 = 1;
    let mut edges = vec![(u0, v0, x)];
    for i in 0..n {
        edges.push((u0, 2 + i, x));
    }
    for i in 0..n {
        edges.push((v0, 2 + n + i, x));
    }
    let mut sides = vec![0u8; 2 * n + 2];
    sides[v0] = 1;
    for i in 0..n {
        sides[2 + i] = 1; // neighbors of u0
        sides[2 + n + i] = 0; // neighbors of v0
    }
    GraphInstance::new(2 * n + 2, edges)?
        .with_bipartition(sides)?
        .with_symmetry_classes(vec![vec![0], (1..=2 * n).collect()])
}

/// Replaces vertex `w` with `k` copies, splitting each incident edge value
/// uniformly among the copies. Copy 0 reuses index `w`; copies 1..k are
/// appended after the existing vertices. Arrival order and symmetry classes
/// are dropped; a bipartition is carried over (copies keep `w`'s side).
pub fn split_vertex(g: &GraphInstance, w: usize, k: usize) -> Result<GraphInstance> {
    if w >= g.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex: w });
    }
    if k == 0 {
        return Err(Error::ZeroCount { what: "k" });
    }
    let n = g.vertex_count();
    let copy = |i: usize| if i == 0 { w } else { n + i - 1 };
    let mut edges = Vec::new();
    for e in g.edges() {
        if let Some(r) = e.other(w) {
            let x = e.x / k as f64;
            for i in 0..k {
                edges.push((copy(i), r, x));
            }
        } else {
            edges.push((e.u, e.v, e.x));
        }
    }
    let out = GraphInstance::new(n + k - 1, edges)?;
    if let Some(sides) = g.bipartition() {
        let mut extended = sides.to_vec();
        extended.extend(std::iter::repeat_n(sides[w], k - 1));
        return out.with_bipartition(extended);
    }
    Ok(out)
}

/// Random feasible instance: up to `m` distinct edges on `n` vertices with
/// raw values in `(0, density]`, rescaled so the maximum vertex load is at
/// most 1. Deterministic in `seed`.
pub fn gen_random_feasible(n: usize, m: usize, density: f64, seed: u64) -> GraphInstance {
    let mut rng = trial_rng(seed, 0);
    let mut chosen = std::collections::HashSet::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    if n >= 2 {
        let max_edges = n * (n - 1) / 2;
        for _ in 0..m.min(max_edges) * 8 {
            if edges.len() >= m.min(max_edges) {
                break;
            }
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if !chosen.insert(key) {
                continue;
            }
            let x = rng.random::<f64>() * density;
            edges.push((u, v, x));
        }
    }
    let mut loads = vec![0.0f64; n];
    for &(u, v, x) in &edges {
        loads[u] += x;
        loads[v] += x;
    }
    let max_load = loads.iter().cloned().fold(0.0, f64::max);
    if max_load > 1.0 {
        for e in &mut edges {
            e.2 /= max_load;
        }
    }
    GraphInstance::new(n, edges).expect("construction is structurally valid")
}
