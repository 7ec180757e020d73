//! Random-order contention resolution with a fixed attenuation function:
//! every edge draws an arrival time uniformly on `[0,1]`, survives when both
//! its activeness bit and an independent `Ber(a(x_e))` bit come up 1, and the
//! scheme greedily selects surviving unblocked edges in arrival order.
//!
//! Diagnostics follow the run-time structure of the analysis: the relevant
//! edges of `e` are its surviving earlier neighbors, and a relevant edge `f`
//! is certified blocked by a "simple-blocker" `h` at the far endpoint of `f`
//! whose own earlier neighborhood (outside the neighborhood of `e`) contains
//! no surviving edge.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::GraphInstance;
use crate::rng::trial_rng;

/// `e` in the quadratic attenuation `a1(x) = (1 - (3 - e) x)^2`.
const E: f64 = std::f64::consts::E;

/// Attenuation functions mapping `x in [0,1]` to a survival discount.
#[derive(Clone, Debug, PartialEq)]
pub enum AttenuationFn {
    /// `(1 - (3 - e) x)^2`, for general graphs.
    A1,
    /// `(1 - x)^4 / (e^x - e x)^2` with the removable endpoint
    /// `a2(1) = 4/e^2`, for graphs without 3- or 5-cycles.
    A2,
    /// Constant attenuation.
    Constant(f64),
    /// Piecewise-linear table over sorted `(x, a)` knots; used to probe the
    /// property checks with functions that violate them.
    Table(Vec<(f64, f64)>),
}

impl AttenuationFn {
    /// `a(x)`. Callers guarantee `x in [0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        match self {
            AttenuationFn::A1 => {
                let t = 1.0 - (3.0 - E) * x;
                t * t
            }
            AttenuationFn::A2 => a2(x),
            AttenuationFn::Constant(v) => *v,
            AttenuationFn::Table(knots) => eval_table(knots, x),
        }
    }

    /// Survival probability `s(x) = x * a(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        x * self.eval(x)
    }

    pub fn label(&self) -> String {
        match self {
            AttenuationFn::A1 => "a1".into(),
            AttenuationFn::A2 => "a2".into(),
            AttenuationFn::Constant(v) => format!("const={v}"),
            AttenuationFn::Table(_) => "table".into(),
        }
    }
}

/// Range-checked evaluation.
pub fn eval_attenuation(f: &AttenuationFn, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParamOutOfRange {
            what: "x",
            lo: 0.0,
            hi: 1.0,
            value: x,
        });
    }
    Ok(f.eval(x))
}

/// `(e^{-z} - 1 + z) / z^2`, the normalized second-order remainder of
/// `exp(-z)`; equals `1/2` at `z = 0`. Below 1e-4 the truncated series is
/// exact to 1e-20; above it `expm1` keeps the cancellation benign.
pub(crate) fn exp_neg_remainder(z: f64) -> f64 {
    if z < 1e-4 {
        0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0
    } else {
        (z + (-z).exp_m1()) / (z * z)
    }
}

/// `e^x - e x = e (1-x)^2 r(1-x)` with `r` the remainder above, so the
/// quartic cancels exactly and the removable endpoint needs no special case.
fn a2(x: f64) -> f64 {
    let r = E * exp_neg_remainder(1.0 - x);
    1.0 / (r * r)
}

fn eval_table(knots: &[(f64, f64)], x: f64) -> f64 {
    match knots.iter().position(|&(k, _)| k >= x) {
        None => knots.last().map_or(1.0, |&(_, a)| a),
        Some(0) => knots[0].1,
        Some(i) => {
            let (x0, a0) = knots[i - 1];
            let (x1, a1) = knots[i];
            let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
            a0 + t * (a1 - a0)
        }
    }
}

/// Per-edge diagnostics of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeDiagnostics {
    /// Relevant edges of `e` (surviving, earlier neighbors) paired with
    /// whether each has a simple-blocker.
    pub relevant: Vec<(usize, bool)>,
}

/// Full record of one random-order execution.
#[derive(Clone, Debug, PartialEq)]
pub struct RcrsRunRecord {
    pub arrival_times: Vec<f64>,
    pub active: Vec<bool>,
    pub survival: Vec<bool>,
    /// Selected edge indices in arrival order.
    pub matching: Vec<usize>,
    pub diagnostics: Option<Vec<EdgeDiagnostics>>,
}

/// Executes one run. Arrival ties (probability zero) break by edge index.
/// With `with_diagnostics`, relevant-edge counts and simple-blocker flags are
/// filled in and the run asserts the two structural facts they guarantee:
/// no relevant edge has two simple-blockers, and a surviving edge whose
/// relevant edges (at most one) are all certified blocked is matched.
pub fn run_rcrs<R: Rng>(
    g: &GraphInstance,
    attn: &AttenuationFn,
    rng: &mut R,
    with_diagnostics: bool,
) -> RcrsRunRecord {
    let m = g.edge_count();
    let arrival_times: Vec<f64> = (0..m).map(|_| rng.random()).collect();
    let active: Vec<bool> = g.edges().iter().map(|e| rng.random::<f64>() < e.x).collect();
    let attenuated: Vec<bool> = g
        .edges()
        .iter()
        .map(|e| rng.random::<f64>() < attn.eval(e.x))
        .collect();
    let survival: Vec<bool> = (0..m).map(|e| active[e] && attenuated[e]).collect();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&a, &b| {
        arrival_times[a]
            .total_cmp(&arrival_times[b])
            .then(a.cmp(&b))
    });
    let mut matched = vec![false; g.vertex_count()];
    let mut matching = Vec::new();
    let mut in_matching = vec![false; m];
    for &e in &order {
        let edge = g.edges()[e];
        if survival[e] && !matched[edge.u] && !matched[edge.v] {
            matched[edge.u] = true;
            matched[edge.v] = true;
            matching.push(e);
            in_matching[e] = true;
        }
    }

    let diagnostics = with_diagnostics.then(|| {
        let diags = compute_diagnostics(g, &arrival_times, &survival);
        for (e, diag) in diags.iter().enumerate() {
            let certified = diag.relevant.len() <= 1 && diag.relevant.iter().all(|&(_, b)| b);
            if survival[e] && certified {
                assert!(in_matching[e], "surviving edge {e} with certified-blocked relevant edges must be matched");
            }
        }
        diags
    });

    RcrsRunRecord {
        arrival_times,
        active,
        survival,
        matching,
        diagnostics,
    }
}

fn compute_diagnostics(
    g: &GraphInstance,
    y: &[f64],
    survival: &[bool],
) -> Vec<EdgeDiagnostics> {
    let incident = g.incident();
    let earlier = |a: usize, b: usize| y[a] < y[b] || (y[a] == y[b] && a < b);
    let mut out = Vec::with_capacity(g.edge_count());
    for (e, edge) in g.edges().iter().enumerate() {
        let mut neighborhood: Vec<usize> = incident[edge.u]
            .iter()
            .chain(&incident[edge.v])
            .copied()
            .filter(|&f| f != e)
            .collect();
        neighborhood.sort_unstable();
        neighborhood.dedup();
        let mut relevant = Vec::new();
        for &f in &neighborhood {
            if !survival[f] || !earlier(f, e) {
                continue;
            }
            let has_blocker =
                simple_blocker_count(g, &incident, y, survival, e, f, &neighborhood) > 0;
            relevant.push((f, has_blocker));
        }
        out.push(EdgeDiagnostics { relevant });
    }
    out
}

/// Counts the simple-blockers of relevant edge `f` with respect to `e`,
/// asserting the structural fact that there is at most one.
fn simple_blocker_count(
    g: &GraphInstance,
    incident: &[Vec<usize>],
    y: &[f64],
    survival: &[bool],
    e: usize,
    f: usize,
    e_neighborhood: &[usize],
) -> usize {
    let earlier = |a: usize, b: usize| y[a] < y[b] || (y[a] == y[b] && a < b);
    let e_edge = g.edges()[e];
    let f_edge = g.edges()[f];
    let w = if f_edge.touches(e_edge.u) {
        f_edge.other(e_edge.u).unwrap()
    } else {
        f_edge.other(e_edge.v).unwrap()
    };
    let mut count = 0usize;
    for &h in &incident[w] {
        // exclude (u, w) and (v, w): any edge joining w to e's endpoints
        let h_edge = g.edges()[h];
        if h_edge.touches(e_edge.u) || h_edge.touches(e_edge.v) {
            continue;
        }
        if !survival[h] || !earlier(h, f) {
            continue;
        }
        // condition 2: every h' in boundary(h) \ boundary(e) is irrelevant for h
        let blocked_itself = incident[h_edge.u]
            .iter()
            .chain(&incident[h_edge.v])
            .copied()
            .filter(|&hp| hp != h && !e_neighborhood.contains(&hp) && hp != e)
            .any(|hp| survival[hp] && earlier(hp, h));
        if !blocked_itself {
            count += 1;
        }
    }
    assert!(count <= 1, "an edge can have at most one simple-blocker");
    count
}

/// Conditional frequency of `e` having no relevant edges given it survives.
/// Since the survival bits of `e` itself are independent of everything the
/// relevant-edge set depends on, the run conditions by forcing them to 1.
/// Returns the estimate with its Wilson interval at `z = 1.96`.
pub fn estimate_no_relevant_prob(
    g: &GraphInstance,
    attn: &AttenuationFn,
    edge: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, (f64, f64))> {
    if edge >= g.edge_count() {
        return Err(Error::EdgeOutOfRange { edge });
    }
    if trials == 0 {
        return Err(Error::ZeroCount { what: "trials" });
    }
    let survival_probs: Vec<f64> = g.edges().iter().map(|e| attn.survival(e.x)).collect();
    let e_edge = g.edges()[edge];
    let neighborhood: Vec<usize> = (0..g.edge_count())
        .filter(|&f| f != edge && (g.edges()[f].touches(e_edge.u) || g.edges()[f].touches(e_edge.v)))
        .collect();
    use rayon::prelude::*;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let y: Vec<f64> = (0..g.edge_count()).map(|_| rng.random()).collect();
            let none = neighborhood
                .iter()
                .all(|&f| !(y[f] < y[edge] && rng.random::<f64>() < survival_probs[f]));
            u64::from(none)
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let ci = crate::estimator::wilson_interval(hits, trials, 1.96)?;
    Ok((p, ci))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn attenuation_endpoint_values() {
        assert!((AttenuationFn::A1.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((AttenuationFn::A2.eval(0.0) - 1.0).abs() < 1e-15);
        let a1_at_1 = (E - 2.0) * (E - 2.0);
        assert!((AttenuationFn::A1.eval(1.0) - a1_at_1).abs() < 1e-15);
        assert!((AttenuationFn::A1.eval(1.0) - 0.515929).abs() < 1e-6);
        let a2_at_1 = 4.0 / (E * E);
        assert!((AttenuationFn::A2.eval(1.0) - a2_at_1).abs() < 1e-12);
        assert!((AttenuationFn::A2.eval(1.0) - 0.541341).abs() < 1e-6);
    }

    #[test]
    fn a2_matches_the_textbook_formula_away_from_the_endpoint() {
        // the direct quotient loses precision once e^x - ex is a heavily
        // cancelled difference, so compare where it is still trustworthy
        for (d, tol) in [(1.0, 1e-12), (0.5, 1e-12), (0.1, 1e-11), (1e-2, 1e-9), (1e-3, 1e-8), (1e-4, 1e-6)] {
            let x: f64 = 1.0 - d;
            let num = (1.0 - x).powi(4);
            let den = x.exp() - E * x;
            let direct = num / (den * den);
            let stable = AttenuationFn::A2.eval(x);
            assert!(
                (direct - stable).abs() < tol,
                "x={x}: direct {direct} vs stable {stable}"
            );
        }
        // approaching the removable endpoint stays finite and continuous
        let mut last = AttenuationFn::A2.eval(1.0 - 1e-4);
        for d in [1e-5, 1e-6, 1e-7, 0.0] {
            let value = AttenuationFn::A2.eval(1.0 - d);
            assert!(value.is_finite());
            assert!((value - last).abs() < 1e-4);
            last = value;
        }
    }

    #[test]
    fn checked_eval_rejects_out_of_range() {
        assert!(eval_attenuation(&AttenuationFn::A1, 1.5).is_err());
        assert!(eval_attenuation(&AttenuationFn::A1, -0.1).is_err());
        assert!(eval_attenuation(&AttenuationFn::A1, 0.5).is_ok());
    }

    #[test]
    fn run_with_zero_values_selects_nothing() {
        let g = GraphInstance::new(4, vec![(0, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0)]).unwrap();
        let mut rng = trial_rng(1, 0);
        let rec = run_rcrs(&g, &AttenuationFn::A1, &mut rng, true);
        assert!(rec.matching.is_empty());
    }

    #[test]
    fn single_full_edge_selected_with_frequency_a1_of_1() {
        let g = GraphInstance::new(2, vec![(0, 1, 1.0)]).unwrap();
        let trials = 200_000u64;
        let mut hits = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(5, t);
            let rec = run_rcrs(&g, &AttenuationFn::A1, &mut rng, false);
            hits += rec.matching.len() as u64;
        }
        let p = hits as f64 / trials as f64;
        let expected = AttenuationFn::A1.eval(1.0);
        let (lo, hi) = crate::estimator::wilson_interval(hits, trials, 1.96).unwrap();
        let hw = (hi - lo) / 2.0;
        assert!((p - expected).abs() < 3.0 * hw, "p={p} expected={expected}");
    }

    #[test]
    fn determinism_per_seed() {
        let g = instances::gen_example_4cycle(0.05).unwrap();
        let a = run_rcrs(&g, &AttenuationFn::A1, &mut trial_rng(9, 3), true);
        let b = run_rcrs(&g, &AttenuationFn::A1, &mut trial_rng(9, 3), true);
        assert_eq!(a, b);
    }

    #[test]
    fn diagnostics_invariants_hold_over_many_runs() {
        // the asserts inside run_rcrs fire if a certified edge is unmatched
        // or an edge acquires two simple-blockers
        for (name, g) in [
            ("4cycle", instances::gen_example_4cycle(0.3).unwrap()),
            ("k33", instances::gen_complete_bipartite(3).unwrap()),
            ("star", instances::gen_star_pair(3).unwrap()),
            ("random", instances::gen_random_feasible(8, 12, 0.8, 3)),
        ] {
            for t in 0..2_000u64 {
                let mut rng = trial_rng(17, t);
                let rec = run_rcrs(&g, &AttenuationFn::A1, &mut rng, true);
                let diags = rec.diagnostics.as_ref().unwrap();
                for (e, d) in diags.iter().enumerate() {
                    if rec.survival[e] && d.relevant.is_empty() {
                        assert!(
                            rec.matching.contains(&e),
                            "{name}: surviving edge {e} with no relevant edges unmatched"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn no_relevant_prob_on_single_edge_is_one() {
        let g = GraphInstance::new(2, vec![(0, 1, 0.4)]).unwrap();
        let (p, _) = estimate_no_relevant_prob(&g, &AttenuationFn::A1, 0, 100, 0).unwrap();
        assert_eq!(p, 1.0);
    }

    /// Exhaustive oracle on the triangle: enumerate the 3! arrival orders and
    /// all survival-bit patterns with exact weights.
    #[test]
    fn no_relevant_prob_matches_triangle_oracle() {
        let x = 0.5;
        let g = GraphInstance::new(3, vec![(0, 1, x), (1, 2, x), (2, 0, x)]).unwrap();
        let attn = AttenuationFn::A1;
        let s = attn.survival(x);
        // P[R_0 = empty | S_0 = 1]: neither neighbor both survives and lands
        // earlier. Integrating the uniform arrival times order by order gives
        // the same weight 1/6 to each of the 6 orders.
        let orders = [
            [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
        ];
        let mut oracle = 0.0;
        for order in orders {
            for bits in 0..8u32 {
                let survives = |e: usize| bits & (1 << e) != 0;
                let mut weight = 1.0 / 6.0;
                for e in 1..3 {
                    weight *= if survives(e) { s } else { 1.0 - s };
                }
                if !survives(0) {
                    continue; // conditioned on edge 0 surviving
                }
                weight *= 1.0; // survival of edge 0 is forced, weight 1
                let pos = |e: usize| order.iter().position(|&o| o == e).unwrap();
                let relevant = (1..3).any(|e| survives(e) && pos(e) < pos(0));
                if !relevant {
                    oracle += weight;
                }
            }
        }
        let trials = 200_000u64;
        let (p, (lo, hi)) = estimate_no_relevant_prob(&g, &attn, 0, trials, 2).unwrap();
        let hw = (hi - lo) / 2.0;
        assert!((p - oracle).abs() < 3.0 * hw, "p={p} oracle={oracle}");
    }

    #[test]
    fn selection_frequencies_invariant_under_edge_relabeling() {
        let g = instances::gen_complete_bipartite(3).unwrap();
        // reversed edge list, same graph
        let reversed: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .rev()
            .map(|e| (e.u, e.v, e.x))
            .collect();
        let h = GraphInstance::new(6, reversed).unwrap();
        let trials = 60_000u64;
        let count = |g: &GraphInstance, edge: usize, seed: u64| -> u64 {
            (0..trials)
                .map(|t| {
                    let mut rng = trial_rng(seed, t);
                    let rec = run_rcrs(g, &AttenuationFn::A1, &mut rng, false);
                    u64::from(rec.matching.contains(&edge))
                })
                .sum()
        };
        // edge 0 of g is edge 8 of h
        let a = count(&g, 0, 21);
        let b = count(&h, 8, 22);
        let pa = a as f64 / trials as f64;
        let pb = b as f64 / trials as f64;
        let hw = 3.0 * (2.0 * 1.96) * (pa * (1.0 - pa) / trials as f64).sqrt();
        assert!((pa - pb).abs() < hw, "pa={pa} pb={pb}");
    }
}
