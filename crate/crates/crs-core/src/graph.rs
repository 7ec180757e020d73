//! Graphs with fractional matchings: domain types, polytope validation, and
//! structural queries.
//!
//! Edges are identified by their index in the input list; arrival orders and
//! symmetry classes refer to those indices. Every type is immutable after
//! construction, so instances can be shared freely across trial workers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance when testing membership in the matching polytope.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;

/// An edge with its fractional value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub x: f64,
}

impl Edge {
    /// The endpoint other than `w`; `None` if `w` is not an endpoint.
    pub fn other(&self, w: usize) -> Option<usize> {
        if self.u == w {
            Some(self.v)
        } else if self.v == w {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

/// A graph with a fractional-matching vector and optional annotations.
#[derive(Clone, Debug)]
pub struct GraphInstance {
    vertex_count: usize,
    edges: Vec<Edge>,
    arrival_order: Option<Vec<usize>>,
    bipartition: Option<Vec<u8>>,
    symmetry_classes: Option<Vec<Vec<usize>>>,
}

impl GraphInstance {
    /// Builds an instance, rejecting structural defects: out-of-range
    /// endpoints, self-loops, parallel edges, and values outside `[0, 1]`.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashMap::new();
        let mut list = Vec::with_capacity(edges.len());
        for (i, (u, v, x)) in edges.into_iter().enumerate() {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::EndpointOutOfRange {
                        edge: i,
                        vertex: w,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { edge: i, vertex: u });
            }
            if !(0.0..=1.0).contains(&x) || !x.is_finite() {
                return Err(Error::EdgeValueOutOfRange { edge: i, x });
            }
            let key = (u.min(v), u.max(v));
            if let Some(&first) = seen.get(&key) {
                return Err(Error::DuplicateEdge { first, second: i });
            }
            seen.insert(key, i);
            list.push(Edge { u, v, x });
        }
        Ok(Self {
            vertex_count,
            edges: list,
            arrival_order: None,
            bipartition: None,
            symmetry_classes: None,
        })
    }

    /// Attaches a fixed arrival order (a permutation of `0..edge_count`).
    pub fn with_arrival_order(mut self, order: Vec<usize>) -> Result<Self> {
        check_order(&order, self.edges.len())?;
        self.arrival_order = Some(order);
        Ok(self)
    }

    /// Attaches a two-coloring; every edge must cross it.
    pub fn with_bipartition(mut self, sides: Vec<u8>) -> Result<Self> {
        if sides.len() != self.vertex_count {
            return Err(Error::BadBipartition {
                reason: format!(
                    "length {} does not match vertex count {}",
                    sides.len(),
                    self.vertex_count
                ),
            });
        }
        if sides.iter().any(|&s| s > 1) {
            return Err(Error::BadBipartition {
                reason: "entries must be 0 or 1".into(),
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            if sides[e.u] == sides[e.v] {
                return Err(Error::BadBipartition {
                    reason: format!("edge {i} joins two vertices of the same side"),
                });
            }
        }
        self.bipartition = Some(sides);
        Ok(self)
    }

    /// Attaches disjoint classes of exchangeable edge indices.
    pub fn with_symmetry_classes(mut self, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut used = vec![false; self.edges.len()];
        for class in &classes {
            if class.is_empty() {
                return Err(Error::BadSymmetryClasses {
                    reason: "empty class".into(),
                });
            }
            for &e in class {
                if e >= self.edges.len() {
                    return Err(Error::BadSymmetryClasses {
                        reason: format!("edge index {e} out of range"),
                    });
                }
                if used[e] {
                    return Err(Error::BadSymmetryClasses {
                        reason: format!("edge index {e} appears in two classes"),
                    });
                }
                used[e] = true;
            }
        }
        self.symmetry_classes = Some(classes);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Result<Edge> {
        self.edges.get(i).copied().ok_or(Error::EdgeOutOfRange { edge: i })
    }

    pub fn arrival_order(&self) -> Option<&[usize]> {
        self.arrival_order.as_deref()
    }

    pub fn bipartition(&self) -> Option<&[u8]> {
        self.bipartition.as_deref()
    }

    pub fn symmetry_classes(&self) -> Option<&[Vec<usize>]> {
        self.symmetry_classes.as_deref()
    }

    /// `sum_{e in boundary(v)} x_e` per vertex.
    pub fn loads(&self) -> Vec<f64> {
        let mut loads = vec![0.0; self.vertex_count];
        for e in &self.edges {
            loads[e.u] += e.x;
            loads[e.v] += e.x;
        }
        loads
    }

    /// Edge indices incident to each vertex.
    pub fn incident(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Neighbor vertex lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// Index lookup by unordered endpoint pair.
    pub fn edge_index_map(&self) -> std::collections::HashMap<(usize, usize), usize> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.u.min(e.v), e.u.max(e.v)), i))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = InstanceJson {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|e| (e.u, e.v, e.x)).collect(),
            order: self.arrival_order.clone(),
            bipartition: self.bipartition.clone(),
            symmetry: self.symmetry_classes.clone(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        let mut g = GraphInstance::new(raw.vertices, raw.edges)?;
        if let Some(order) = raw.order {
            g = g.with_arrival_order(order)?;
        }
        if let Some(sides) = raw.bipartition {
            g = g.with_bipartition(sides)?;
        }
        if let Some(classes) = raw.symmetry {
            g = g.with_symmetry_classes(classes)?;
        }
        Ok(g)
    }
}

/// Wire format shared by all CLI tools:
/// `{"vertices": N, "edges": [[u,v,x],...], "order": [...]?, "bipartition": [...]?, "symmetry": [[...]]?}`.
#[derive(Serialize, Deserialize)]
struct InstanceJson {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bipartition: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetry: Option<Vec<Vec<usize>>>,
}

/// Validates that `order` is a permutation of `0..edge_count`.
pub fn check_order(order: &[usize], edge_count: usize) -> Result<()> {
    if order.len() != edge_count {
        return Err(Error::BadArrivalOrder { edge_count });
    }
    let mut seen = vec![false; edge_count];
    for &e in order {
        if e >= edge_count || seen[e] {
            return Err(Error::BadArrivalOrder { edge_count });
        }
        seen[e] = true;
    }
    Ok(())
}

/// Outcome of a polytope-membership check.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub per_vertex_load: Vec<f64>,
    pub violations: Vec<(usize, f64)>,
}

/// Checks that the fractional matching lies in the matching polytope:
/// every vertex load is at most `1 + tol`. Structural defects are caught at
/// construction and are distinct from infeasibility.
pub fn validate_instance(g: &GraphInstance, tol: f64) -> ValidationReport {
    let loads = g.loads();
    let violations: Vec<(usize, f64)> = loads
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1.0 + tol)
        .map(|(v, &l)| (v, l))
        .collect();
    ValidationReport {
        feasible: violations.is_empty(),
        per_vertex_load: loads,
        violations,
    }
}

/// Per-vertex slack `1 - load`; errors on infeasible input.
pub fn one_regular_slack(g: &GraphInstance, tol: f64) -> Result<Vec<f64>> {
    let report = validate_instance(g, tol);
    if let Some(&(vertex, load)) = report.violations.first() {
        return Err(Error::Infeasible { vertex, load });
    }
    Ok(report.per_vertex_load.iter().map(|&l| 1.0 - l).collect())
}

/// Errors unless every vertex load equals 1 within `tol`.
pub fn require_one_regular(g: &GraphInstance, tol: f64) -> Result<()> {
    for (v, l) in g.loads().iter().enumerate() {
        if (l - 1.0).abs() > tol {
            return Err(Error::NotOneRegular { vertex: v, load: *l });
        }
    }
    Ok(())
}

/// Exact presence flags for cycles of length 3 and 5.
pub fn short_odd_cycles(g: &GraphInstance) -> (bool, bool) {
    if bipartition_of(g).is_some() {
        return (false, false);
    }
    (has_triangle(g), has_five_cycle(g))
}

fn has_triangle(g: &GraphInstance) -> bool {
    let adj = adjacency_bitsets(g);
    for e in g.edges() {
        let ru = &adj[e.u];
        let rv = &adj[e.v];
        if ru.iter().zip(rv).any(|(a, b)| a & b != 0) {
            return true;
        }
    }
    false
}

fn adjacency_bitsets(g: &GraphInstance) -> Vec<Vec<u64>> {
    let words = g.vertex_count().div_ceil(64);
    let mut adj = vec![vec![0u64; words]; g.vertex_count()];
    for e in g.edges() {
        adj[e.u][e.v / 64] |= 1 << (e.v % 64);
        adj[e.v][e.u / 64] |= 1 << (e.u % 64);
    }
    adj
}

/// Depth-limited DFS for a simple 5-cycle, canonicalized so each cycle is
/// visited from its minimum vertex only.
fn has_five_cycle(g: &GraphInstance) -> bool {
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut stack = Vec::with_capacity(5);
    for start in 0..n {
        stack.clear();
        stack.push(start);
        if dfs_five(&adj, start, start, &mut stack) {
            return true;
        }
    }
    false
}

fn dfs_five(adj: &[Vec<usize>], start: usize, at: usize, stack: &mut Vec<usize>) -> bool {
    if stack.len() == 5 {
        return adj[at].contains(&start);
    }
    for &next in &adj[at] {
        if next <= start || stack.contains(&next) {
            continue;
        }
        stack.push(next);
        if dfs_five(adj, start, next, stack) {
            return true;
        }
        stack.pop();
    }
    false
}

/// Breadth-first 2-coloring; `None` if some component has an odd cycle.
pub fn bipartition_of(g: &GraphInstance) -> Option<Vec<u8>> {
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if color[root] != u8::MAX {
            continue;
        }
        color[root] = 0;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// Outcome of one scheme execution.
#[derive(Clone, Debug)]
pub struct MatchingResult {
    /// Selected edge indices, in selection order.
    pub selected: Vec<usize>,
    /// Per-edge activeness bits `X_e`.
    pub active_states: Vec<bool>,
    /// Per-edge survival bits `S_e = X_e * A_e`.
    pub survival_states: Vec<bool>,
}

impl MatchingResult {
    /// Selected edges form a matching and are a subset of the survivors.
    pub fn check_invariants(&self, g: &GraphInstance) -> bool {
        let mut used = vec![false; g.vertex_count()];
        for &i in &self.selected {
            let e = g.edges()[i];
            if used[e.u] || used[e.v] || !self.survival_states[i] || !self.active_states[i] {
                return false;
            }
            used[e.u] = true;
            used[e.v] = true;
        }
        true
    }
}
