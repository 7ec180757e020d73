//! Adversarial-order contention resolution: attenuate every arriving edge by
//! `alpha_e = c / P[not blocked(e)]` and select it when it is active, not
//! blocked, and its attenuation bit comes up 1.
//!
//! Blocking depends only on the set of matched vertices, so that set is a
//! sufficient statistic for the arrival process; the exact engine maintains
//! the full probability distribution over matched-vertex subsets. The
//! Monte-Carlo engine instead estimates each `P[not blocked]` by resimulating
//! the prefix with the attenuations already fixed for earlier edges.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{check_order, GraphInstance, MatchingResult};
use crate::rng::trial_rng;

/// Largest instance the exact DP accepts by default.
pub const DEFAULT_VERTEX_LIMIT: usize = 22;

/// Floor on Monte-Carlo block-free estimates before dividing.
pub const DEFAULT_MC_FLOOR: f64 = 1e-6;

/// How the attenuation probabilities of a plan were computed.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Calibrated attenuation probabilities for one `(instance, order, c)`.
#[derive(Clone, Debug)]
pub struct OcrsPlan {
    pub c: f64,
    /// Per-edge `alpha_e`, clamped to at most 1.
    pub alphas: Vec<f64>,
    /// Per-edge `P[not blocked(e)]` (exact or estimated).
    pub blockfree_probs: Vec<f64>,
    /// False where the unclamped `alpha_e` exceeded 1 (exact mode) or the
    /// block-free estimate fell significantly below `c` (Monte-Carlo mode).
    pub valid: Vec<bool>,
    pub mode: PlanMode,
    /// Wilson half-widths of the block-free estimates (Monte-Carlo mode).
    pub ci_halfwidth: Option<Vec<f64>>,
}

impl OcrsPlan {
    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    fn check_instance(&self, g: &GraphInstance) -> Result<()> {
        if self.alphas.len() != g.edge_count() {
            return Err(Error::PlanMismatch {
                reason: format!(
                    "plan covers {} edges, instance has {}",
                    self.alphas.len(),
                    g.edge_count()
                ),
            });
        }
        Ok(())
    }
}

/// Exact probability distribution over matched-vertex subsets.
#[derive(Clone, Debug)]
pub struct SubsetDistribution {
    probs: HashMap<u64, f64>,
}

impl SubsetDistribution {
    fn new() -> Self {
        let mut probs = HashMap::new();
        probs.insert(0u64, 1.0);
        Self { probs }
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probability that neither `u` nor `v` is matched.
    pub fn prob_avoiding(&self, u: usize, v: usize) -> f64 {
        let bits = (1u64 << u) | (1u64 << v);
        self.probs
            .iter()
            .filter(|(mask, _)| *mask & bits == 0)
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability that `v` is matched.
    pub fn prob_matched(&self, v: usize) -> f64 {
        let bit = 1u64 << v;
        self.probs
            .iter()
            .filter(|(mask, _)| *mask & bit != 0)
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability that both `u` and `v` are matched.
    pub fn prob_both_matched(&self, u: usize, v: usize) -> f64 {
        let bits = (1u64 << u) | (1u64 << v);
        self.probs
            .iter()
            .filter(|(mask, _)| *mask & bits == bits)
            .map(|(_, p)| p)
            .sum()
    }

    /// Applies the arrival of edge `(u, v)` that is selected with
    /// probability `p_select` conditional on being unblocked.
    fn step(&mut self, u: usize, v: usize, p_select: f64) {
        if p_select == 0.0 {
            return;
        }
        let bits = (1u64 << u) | (1u64 << v);
        let mut moved = Vec::new();
        for (&mask, p) in self.probs.iter_mut() {
            if mask & bits == 0 {
                let gain = *p * p_select;
                *p -= gain;
                moved.push((mask | bits, gain));
            }
        }
        for (mask, gain) in moved {
            *self.probs.entry(mask).or_insert(0.0) += gain;
        }
        debug_assert!((self.total_mass() - 1.0).abs() < 1e-12);
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::ParamOutOfRange {
            what: "c",
            lo: 0.0,
            hi: 1.0,
            value: c,
        });
    }
    Ok(())
}

fn check_limit(g: &GraphInstance, vertex_limit: usize) -> Result<()> {
    if g.vertex_count() > vertex_limit.min(63) {
        return Err(Error::VertexLimitExceeded {
            vertices: g.vertex_count(),
            limit: vertex_limit.min(63),
        });
    }
    Ok(())
}

/// Walks the exact DP, invoking `visit(t, edge, distribution-before-arrival)`
/// at every arrival, with `alpha(t, edge, blockfree) -> alpha_e` supplying
/// the attenuation to use.
fn exact_walk<A, V>(g: &GraphInstance, order: &[usize], mut alpha: A, mut visit: V) -> Result<()>
where
    A: FnMut(usize, usize, f64) -> f64,
    V: FnMut(usize, usize, &SubsetDistribution),
{
    check_order(order, g.edge_count())?;
    let mut dist = SubsetDistribution::new();
    for (t, &e) in order.iter().enumerate() {
        visit(t, e, &dist);
        let edge = g.edges()[e];
        let blockfree = dist.prob_avoiding(edge.u, edge.v);
        let a = alpha(t, e, blockfree);
        dist.step(edge.u, edge.v, edge.x * a);
    }
    Ok(())
}

/// Computes the plan by exact dynamic programming over matched-vertex
/// subsets. Where the unclamped `alpha` exceeds 1 it is clamped and the edge
/// flagged invalid; execution can still proceed to measure the shortfall.
pub fn compute_alphas_exact(
    g: &GraphInstance,
    order: &[usize],
    c: f64,
    vertex_limit: usize,
) -> Result<OcrsPlan> {
    check_c(c)?;
    check_limit(g, vertex_limit)?;
    let m = g.edge_count();
    let mut alphas = vec![0.0; m];
    let mut blockfree = vec![0.0; m];
    let mut valid = vec![true; m];
    exact_walk(
        g,
        order,
        |_t, e, bf| {
            blockfree[e] = bf;
            let unclamped = if c == 0.0 { 0.0 } else { c / bf };
            valid[e] = unclamped <= 1.0;
            alphas[e] = unclamped.min(1.0);
            alphas[e]
        },
        |_, _, _| {},
    )?;
    Ok(OcrsPlan {
        c,
        alphas,
        blockfree_probs: blockfree,
        valid,
        mode: PlanMode::Exact,
        ci_halfwidth: None,
    })
}

/// Estimates each `P[not blocked]` by forward simulation of the prefix with
/// the alphas fixed so far. Edges whose prefix shares no endpoint with them
/// are block-free with certainty and skip sampling.
pub fn compute_alphas_mc(
    g: &GraphInstance,
    order: &[usize],
    c: f64,
    samples: u64,
    seed: u64,
    floor: f64,
) -> Result<OcrsPlan> {
    check_c(c)?;
    check_order(order, g.edge_count())?;
    if samples == 0 {
        return Err(Error::ZeroCount { what: "samples" });
    }
    let m = g.edge_count();
    let mut alphas = vec![0.0; m];
    let mut blockfree = vec![0.0; m];
    let mut valid = vec![true; m];
    let mut ci = vec![0.0; m];
    for (t, &e) in order.iter().enumerate() {
        let edge = g.edges()[e];
        let touches_prefix = order[..t]
            .iter()
            .any(|&f| g.edges()[f].touches(edge.u) || g.edges()[f].touches(edge.v));
        let (estimate, halfwidth) = if !touches_prefix {
            (1.0, 0.0)
        } else {
            let mut hits = 0u64;
            for s in 0..samples {
                let mut rng = trial_rng(seed, t as u64 * samples + s);
                let mut matched = vec![false; g.vertex_count()];
                for &f in &order[..t] {
                    let ef = g.edges()[f];
                    if matched[ef.u] || matched[ef.v] {
                        continue;
                    }
                    if rng.random::<f64>() < ef.x * alphas[f] {
                        matched[ef.u] = true;
                        matched[ef.v] = true;
                    }
                }
                if !matched[edge.u] && !matched[edge.v] {
                    hits += 1;
                }
            }
            let (lo, hi) = crate::estimator::wilson_interval(hits, samples, 1.96)?;
            (hits as f64 / samples as f64, (hi - lo) / 2.0)
        };
        blockfree[e] = estimate;
        ci[e] = halfwidth;
        alphas[e] = (c / estimate.max(floor)).min(1.0);
        valid[e] = estimate >= c - 3.0 * halfwidth;
    }
    Ok(OcrsPlan {
        c,
        alphas,
        blockfree_probs: blockfree,
        valid,
        mode: PlanMode::MonteCarlo { samples, seed },
        ci_halfwidth: Some(ci),
    })
}

/// One execution: draws `A_e ~ Ber(alpha_e)` and greedily selects every
/// active, surviving, unblocked edge in arrival order.
pub fn run_ocrs<R: Rng>(
    g: &GraphInstance,
    order: &[usize],
    plan: &OcrsPlan,
    active: &[bool],
    rng: &mut R,
) -> Result<MatchingResult> {
    plan.check_instance(g)?;
    check_order(order, g.edge_count())?;
    if active.len() != g.edge_count() {
        return Err(Error::PlanMismatch {
            reason: "activeness vector length differs from edge count".into(),
        });
    }
    let mut matched = vec![false; g.vertex_count()];
    let mut survival = vec![false; g.edge_count()];
    let mut selected = Vec::new();
    for &e in order {
        let attn = rng.random::<f64>() < plan.alphas[e];
        survival[e] = active[e] && attn;
        let edge = g.edges()[e];
        if survival[e] && !matched[edge.u] && !matched[edge.v] {
            matched[edge.u] = true;
            matched[edge.v] = true;
            selected.push(e);
        }
    }
    let result = MatchingResult {
        selected,
        active_states: active.to_vec(),
        survival_states: survival,
    };
    assert!(result.check_invariants(g));
    Ok(result)
}

/// Exact selection probabilities `P[e in M]` under an exact-mode plan; equals
/// `c * x_e` wherever every preceding alpha is valid.
pub fn selection_probs_exact(
    g: &GraphInstance,
    order: &[usize],
    plan: &OcrsPlan,
) -> Result<Vec<f64>> {
    plan.check_instance(g)?;
    if plan.mode != PlanMode::Exact {
        return Err(Error::ExactPlanRequired);
    }
    check_limit(g, DEFAULT_VERTEX_LIMIT.max(g.vertex_count()))?;
    let mut probs = vec![0.0; g.edge_count()];
    exact_walk(
        g,
        order,
        |_t, e, _bf| plan.alphas[e],
        |_t, e, dist| {
            let edge = g.edges()[e];
            probs[e] = dist.prob_avoiding(edge.u, edge.v) * edge.x * plan.alphas[e];
        },
    )?;
    Ok(probs)
}

/// Marginal and joint matched probabilities of `u` and `v` just before
/// arrival index `t`.
pub fn joint_matched_probs(
    g: &GraphInstance,
    order: &[usize],
    plan: &OcrsPlan,
    u: usize,
    v: usize,
    t: usize,
) -> Result<(f64, f64, f64)> {
    plan.check_instance(g)?;
    if plan.mode != PlanMode::Exact {
        return Err(Error::ExactPlanRequired);
    }
    if t > g.edge_count() {
        return Err(Error::ArrivalIndexOutOfRange {
            index: t,
            edge_count: g.edge_count(),
        });
    }
    for w in [u, v] {
        if w >= g.vertex_count() {
            return Err(Error::VertexOutOfRange { vertex: w });
        }
    }
    let mut out = (0.0, 0.0, 0.0);
    let mut dist = SubsetDistribution::new();
    for (step, &e) in order.iter().enumerate() {
        if step == t {
            break;
        }
        let edge = g.edges()[e];
        let blockfree = dist.prob_avoiding(edge.u, edge.v);
        let _ = blockfree;
        dist.step(edge.u, edge.v, edge.x * plan.alphas[e]);
    }
    out.0 = dist.prob_matched(u);
    out.1 = dist.prob_matched(v);
    out.2 = dist.prob_both_matched(u, v);
    Ok(out)
}

/// Bisection for the supremum `c` such that the exact plan keeps every
/// unclamped `alpha` at most 1.
pub fn max_valid_c(
    g: &GraphInstance,
    order: &[usize],
    lo: f64,
    hi: f64,
    tol: f64,
    vertex_limit: usize,
) -> Result<f64> {
    check_limit(g, vertex_limit)?;
    let is_valid = |c: f64| -> Result<bool> {
        Ok(compute_alphas_exact(g, order, c, vertex_limit)?.all_valid())
    };
    if is_valid(hi)? {
        return Ok(hi);
    }
    if !is_valid(lo)? {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_valid(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn identity_order(m: usize) -> Vec<usize> {
        (0..m).collect()
    }

    #[test]
    fn example_4cycle_first_arrivals_get_alpha_c() {
        let g = instances::gen_example_4cycle(0.01).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        assert!((plan.alphas[0] - 0.3).abs() < 1e-12);
        assert!((plan.alphas[1] - 0.3).abs() < 1e-12);
        assert!((plan.blockfree_probs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_4cycle_third_arrival_matches_closed_form() {
        let eps = 0.01;
        let c = 0.3;
        let g = instances::gen_example_4cycle(eps).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
        // edge 2 = (1,2): the first edge that can be blocked
        let expected_blockfree = (1.0 - c * (1.0 - eps) / 2.0).powi(2);
        assert!((plan.blockfree_probs[2] - expected_blockfree).abs() < 1e-12);
        assert!((plan.alphas[2] - c / expected_blockfree).abs() < 1e-12);
    }

    #[test]
    fn three_path_middle_blockfree_matches_closed_form() {
        let eps = 1e-3;
        let c = 0.25;
        let g = instances::gen_three_path(eps).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
        let expected = (1.0 - c * (1.0 - eps)).powi(2);
        assert!((plan.blockfree_probs[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn star_last_edge_alpha_closed_form() {
        // center vertex 0 with three pendant edges of value 1/3
        let g = GraphInstance::new(
            4,
            vec![(0, 1, 1.0 / 3.0), (0, 2, 1.0 / 3.0), (0, 3, 1.0 / 3.0)],
        )
        .unwrap();
        let c = 0.3;
        let order = identity_order(3);
        let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
        let expected = c / (1.0 - 2.0 * c / 3.0);
        assert!((plan.alphas[2] - expected).abs() < 1e-12);

        let mc = compute_alphas_mc(&g, &order, c, 40_000, 11, DEFAULT_MC_FLOOR).unwrap();
        let hw = mc.ci_halfwidth.as_ref().unwrap()[2];
        assert!((mc.alphas[2] - expected).abs() <= 3.0 * hw / (1.0 - 2.0 * c / 3.0).powi(2));
    }

    #[test]
    fn single_edge_mc_is_exact() {
        let g = GraphInstance::new(2, vec![(0, 1, 0.7)]).unwrap();
        let plan = compute_alphas_mc(&g, &[0], 0.4, 100, 3, DEFAULT_MC_FLOOR).unwrap();
        assert_eq!(plan.alphas[0], 0.4);
        assert_eq!(plan.ci_halfwidth.as_ref().unwrap()[0], 0.0);
        assert!(plan.valid[0]);
    }

    #[test]
    fn mc_alphas_track_exact_alphas() {
        let g = instances::gen_example_4cycle(0.01).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let exact = compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        let mut within = 0usize;
        let mut total = 0usize;
        for seed in 0..10u64 {
            let mc = compute_alphas_mc(&g, &order, 0.3, 20_000, seed, DEFAULT_MC_FLOOR).unwrap();
            for e in 0..g.edge_count() {
                total += 1;
                let hw = mc.ci_halfwidth.as_ref().unwrap()[e];
                // alpha = c / blockfree, so propagate the CI through the division
                let slack = 3.0 * 0.3 * hw / exact.blockfree_probs[e].powi(2) + 1e-12;
                if (mc.alphas[e] - exact.alphas[e]).abs() <= slack {
                    within += 1;
                }
            }
        }
        assert!(within * 100 >= total * 99, "{within}/{total} within 3 CI");
    }

    #[test]
    fn run_with_no_active_edges_selects_nothing() {
        let g = instances::gen_example_4cycle(0.01).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        let mut rng = trial_rng(0, 0);
        let result = run_ocrs(&g, &order, &plan, &vec![false; 6], &mut rng).unwrap();
        assert!(result.selected.is_empty());
    }

    #[test]
    fn selection_probs_equal_c_times_x_when_valid() {
        let g = instances::gen_example_4cycle(0.01).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        assert!(plan.all_valid());
        let probs = selection_probs_exact(&g, &order, &plan).unwrap();
        for (e, p) in probs.iter().enumerate() {
            assert!((p - 0.3 * g.edges()[e].x).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_alphas_fall_short_of_c_times_x() {
        let g = instances::gen_example_4cycle(1e-4).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        // 0.37 exceeds the ~0.3602 threshold, so the diagonals clamp
        let plan = compute_alphas_exact(&g, &order, 0.37, DEFAULT_VERTEX_LIMIT).unwrap();
        assert!(!plan.valid[4] || !plan.valid[5]);
        let probs = selection_probs_exact(&g, &order, &plan).unwrap();
        for e in [4usize, 5] {
            assert!(probs[e] < 0.37 * g.edges()[e].x - 1e-9);
        }
    }

    #[test]
    fn empty_graph_has_no_probs() {
        let g = GraphInstance::new(3, vec![]).unwrap();
        let plan = compute_alphas_exact(&g, &[], 0.5, DEFAULT_VERTEX_LIMIT).unwrap();
        assert!(selection_probs_exact(&g, &[], &plan).unwrap().is_empty());
    }

    #[test]
    fn joint_probs_start_at_zero_and_factor_across_components() {
        let g = instances::gen_example_4cycle(0.01).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let plan = compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        let (pu, pv, both) = joint_matched_probs(&g, &order, &plan, 0, 1, 0).unwrap();
        assert_eq!((pu, pv, both), (0.0, 0.0, 0.0));

        // two disjoint edges, then an edge joining them: independence
        let h = GraphInstance::new(4, vec![(0, 1, 0.9), (2, 3, 0.8), (1, 2, 0.1)]).unwrap();
        let order = identity_order(3);
        let plan = compute_alphas_exact(&h, &order, 0.3, DEFAULT_VERTEX_LIMIT).unwrap();
        let (p1, p2, both) = joint_matched_probs(&h, &order, &plan, 1, 2, 2).unwrap();
        assert!((both - p1 * p2).abs() < 1e-12);
    }

    /// On the six-edge instance the joint law at the final arrival has a
    /// short Boolean closed form: the only survival pattern matching both
    /// endpoints is S4 = S5 = 1 with S1 = S2 = S3 = 0. The DP must reproduce
    /// it and the marginals exactly.
    #[test]
    fn joint_probs_match_boolean_oracle_on_six_edge_instance() {
        let g = instances::gen_neg_correlation();
        let order = g.arrival_order().unwrap().to_vec();
        for c in [0.1, 0.3, 0.5] {
            let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
            let s: Vec<f64> = (0..5)
                .map(|e| g.edges()[e].x * plan.alphas[e])
                .collect();
            let (pu, pv, both) = joint_matched_probs(&g, &order, &plan, 0, 3, 5).unwrap();
            let both_oracle = s[3] * s[4] * (1.0 - s[0]) * (1.0 - s[1]) * (1.0 - s[2]);
            let pu_oracle = s[4] * (1.0 - s[0]) * (1.0 - s[2] * (1.0 - s[1]));
            let pv_oracle = s[3] * (1.0 - s[1]) * (1.0 - s[2] * (1.0 - s[0]));
            assert!((both - both_oracle).abs() < 1e-12, "c={c}");
            assert!((pu - pu_oracle).abs() < 1e-12, "c={c}");
            assert!((pv - pv_oracle).abs() < 1e-12, "c={c}");
            // calibration: each endpoint is matched iff its unique earlier
            // edge was selected, each with probability exactly c/3
            assert!((pu - c / 3.0).abs() < 1e-12);
            assert!((pv - c / 3.0).abs() < 1e-12);
        }
    }

    /// The executed scheme must reproduce the DP's joint matched
    /// probabilities at the final arrival of the six-edge instance.
    #[test]
    fn joint_probs_agree_with_simulation() {
        let g = instances::gen_neg_correlation();
        let order = g.arrival_order().unwrap().to_vec();
        let c = 0.3;
        let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
        let (pu, pv, both) = joint_matched_probs(&g, &order, &plan, 0, 3, 5).unwrap();
        let trials = 400_000u64;
        let mut hits_u = 0u64;
        let mut hits_v = 0u64;
        let mut hits_both = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(33, t);
            let active: Vec<bool> = g.edges().iter().map(|e| rng.random::<f64>() < e.x).collect();
            let result = run_ocrs(&g, &order, &plan, &active, &mut rng).unwrap();
            // u1 (vertex 0) is matched before the final arrival iff edge 4
            // was selected; v1 (vertex 3) iff edge 3 was selected
            let u_matched = result.selected.contains(&4);
            let v_matched = result.selected.contains(&3);
            hits_u += u64::from(u_matched);
            hits_v += u64::from(v_matched);
            hits_both += u64::from(u_matched && v_matched);
        }
        let n = trials as f64;
        for (hits, exact) in [(hits_u, pu), (hits_v, pv), (hits_both, both)] {
            let (lo, hi) = crate::estimator::wilson_interval(hits, trials, 1.96).unwrap();
            let hw = (hi - lo) / 2.0;
            assert!(
                (hits as f64 / n - exact).abs() <= 3.0 * hw,
                "simulated {} vs exact {exact}",
                hits as f64 / n
            );
        }
    }

    #[test]
    fn max_valid_c_on_known_instances() {
        let g = instances::gen_three_path(1e-4).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let c = max_valid_c(&g, &order, 0.0, 1.0, 1e-7, DEFAULT_VERTEX_LIMIT).unwrap();
        let golden_ratio_root = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((c - golden_ratio_root).abs() < 5e-4, "c = {c}");

        let g = instances::gen_example_4cycle(1e-4).unwrap();
        let order = g.arrival_order().unwrap().to_vec();
        let c = max_valid_c(&g, &order, 0.0, 1.0, 1e-7, DEFAULT_VERTEX_LIMIT).unwrap();
        assert!((c - 0.3602).abs() < 5e-4, "c = {c}");

        let g = GraphInstance::new(2, vec![(0, 1, 1.0)]).unwrap();
        let c = max_valid_c(&g, &[0], 0.0, 1.0, 1e-7, DEFAULT_VERTEX_LIMIT).unwrap();
        assert_eq!(c, 1.0);
    }

    #[test]
    fn blockfree_monotone_in_star_prefix_length() {
        // prepending pendant edges to the neighborhood of the final edge's
        // endpoint can only lower its block-free probability
        let c = 0.3;
        let mut last = f64::INFINITY;
        for k in 1..=5usize {
            let x = 1.0 / 6.0;
            let mut edges: Vec<(usize, usize, f64)> = (0..k).map(|i| (0, 1 + i, x)).collect();
            edges.push((0, 6, x));
            let g = GraphInstance::new(7, edges).unwrap();
            let order = identity_order(k + 1);
            let plan = compute_alphas_exact(&g, &order, c, DEFAULT_VERTEX_LIMIT).unwrap();
            let bf = plan.blockfree_probs[k];
            assert!(bf <= last + 1e-12);
            last = bf;
        }
    }

    #[test]
    fn vertex_limit_is_enforced() {
        let g = instances::gen_complete_bipartite(12).unwrap();
        let order = identity_order(g.edge_count());
        assert!(matches!(
            compute_alphas_exact(&g, &order, 0.3, DEFAULT_VERTEX_LIMIT),
            Err(Error::VertexLimitExceeded { .. })
        ));
    }
}
