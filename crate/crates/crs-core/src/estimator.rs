//! Trial-parallel statistical harness turning scheme executions into
//! selectability estimates.
//!
//! Every trial draws from its own RNG stream keyed by `(seed, trial)`, so an
//! estimate is a pure function of the seed no matter how trials are split
//! across workers. Pooling uses only declared symmetry classes; the harness
//! never infers exchangeability.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::{check_order, GraphInstance};
use crate::ocrs::OcrsPlan;
use crate::rcrs::AttenuationFn;
use crate::rng::trial_rng;

/// A scheme configuration to estimate.
#[derive(Clone, Debug)]
pub enum Scheme<'a> {
    Ocrs {
        order: &'a [usize],
        plan: &'a OcrsPlan,
    },
    Rcrs {
        attenuation: &'a AttenuationFn,
    },
}

impl Scheme<'_> {
    pub fn label(&self) -> String {
        match self {
            Scheme::Ocrs { plan, .. } => format!("ocrs(c={})", plan.c),
            Scheme::Rcrs { attenuation } => format!("rcrs({})", attenuation.label()),
        }
    }
}

/// Per-edge selection statistics. `ratio` is `P_hat[e in M] / x_e`, absent
/// for zero-value edges.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeEstimate {
    pub edge: usize,
    pub x: f64,
    pub selected: u64,
    pub ratio: Option<f64>,
    pub ci: Option<(f64, f64)>,
}

/// Selection statistics pooled over one symmetry class.
#[derive(Clone, Debug, Serialize)]
pub struct PooledEstimate {
    pub edges: Vec<usize>,
    pub selected: u64,
    pub total_x: f64,
    pub ratio: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub scheme: String,
    pub trials: u64,
    pub z: f64,
    pub per_edge: Vec<EdgeEstimate>,
    pub pooled: Option<Vec<PooledEstimate>>,
    /// Smallest ratio across edges (or classes when pooled), with a
    /// Bonferroni-adjusted interval: selectability is a minimum, and naive
    /// per-edge intervals understate its uncertainty.
    pub min_ratio: Option<f64>,
    pub min_ratio_ci: Option<(f64, f64)>,
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::ZeroCount { what: "trials" });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // degenerate counts have exact one-sided limits
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((lo, hi))
}

/// Runs `trials` independent executions and returns per-edge selection
/// counts. Deterministic in `seed` and independent of the worker count.
pub fn per_edge_counts(
    g: &GraphInstance,
    scheme: &Scheme,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    if trials == 0 {
        return Err(Error::ZeroCount { what: "trials" });
    }
    if let Scheme::Ocrs { order, plan } = scheme {
        check_order(order, g.edge_count())?;
        if plan.alphas.len() != g.edge_count() {
            return Err(Error::PlanMismatch {
                reason: "plan length differs from edge count".into(),
            });
        }
    }
    let m = g.edge_count();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; m],
            |mut acc, t| {
                let mut rng = trial_rng(seed, t);
                run_trial(g, scheme, &mut rng, &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0u64; m],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts)
}

fn run_trial<R: Rng>(g: &GraphInstance, scheme: &Scheme, rng: &mut R, counts: &mut [u64]) {
    let mut matched = vec![false; g.vertex_count()];
    match scheme {
        Scheme::Ocrs { order, plan } => {
            for &e in order.iter() {
                let edge = g.edges()[e];
                let active = rng.random::<f64>() < edge.x;
                let attn = rng.random::<f64>() < plan.alphas[e];
                if active && attn && !matched[edge.u] && !matched[edge.v] {
                    matched[edge.u] = true;
                    matched[edge.v] = true;
                    counts[e] += 1;
                }
            }
        }
        Scheme::Rcrs { attenuation } => {
            // Fisher-Yates arrival order; equivalent in law to sorting
            // uniform arrival times and cheaper.
            let m = g.edge_count();
            let mut order: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            for &e in &order {
                let edge = g.edges()[e];
                let survives = rng.random::<f64>() < attenuation.survival(edge.x);
                if survives && !matched[edge.u] && !matched[edge.v] {
                    matched[edge.u] = true;
                    matched[edge.v] = true;
                    counts[e] += 1;
                }
            }
        }
    }
}

/// Assembles a report from raw counts.
pub fn report_from_counts(
    g: &GraphInstance,
    scheme_label: String,
    counts: &[u64],
    trials: u64,
    z: f64,
    pool: bool,
) -> Result<EstimateReport> {
    if counts.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            reason: "counts length differs from edge count".into(),
        });
    }
    let per_edge: Vec<EdgeEstimate> = counts
        .iter()
        .enumerate()
        .map(|(e, &selected)| {
            let x = g.edges()[e].x;
            let (ratio, ci) = if x > 0.0 {
                let (lo, hi) = wilson_interval(selected, trials, z)?;
                (
                    Some(selected as f64 / (trials as f64 * x)),
                    Some((lo / x, hi / x)),
                )
            } else {
                (None, None)
            };
            Ok(EdgeEstimate {
                edge: e,
                x,
                selected,
                ratio,
                ci,
            })
        })
        .collect::<Result<_>>()?;

    let pooled = if pool {
        let classes = g.symmetry_classes().ok_or(Error::NoSymmetryClasses)?;
        let mut rows = Vec::new();
        let mut assigned = vec![false; g.edge_count()];
        for class in classes {
            for &e in class {
                assigned[e] = true;
            }
            rows.push(pool_class(g, counts, trials, z, class)?);
        }
        for e in 0..g.edge_count() {
            if !assigned[e] && g.edges()[e].x > 0.0 {
                rows.push(pool_class(g, counts, trials, z, &[e])?);
            }
        }
        Some(rows)
    } else {
        None
    };

    // the minimum is over pooled rows when pooling, else over edges
    let ratios: Vec<(f64, u64, u64, f64)> = match &pooled {
        Some(rows) => rows
            .iter()
            .map(|r| (r.ratio, r.selected, trials * r.edges.len() as u64, r.total_x / r.edges.len() as f64))
            .collect(),
        None => per_edge
            .iter()
            .filter(|e| e.ratio.is_some())
            .map(|e| (e.ratio.unwrap(), e.selected, trials, e.x))
            .collect(),
    };
    let (min_ratio, min_ratio_ci) = match ratios
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
    {
        None => (None, None),
        Some(&(ratio, selected, n, mean_x)) => {
            let z_adj = bonferroni_z(z, ratios.len());
            let (lo, hi) = wilson_interval(selected, n, z_adj)?;
            (Some(ratio), Some((lo / mean_x, hi / mean_x)))
        }
    };

    Ok(EstimateReport {
        scheme: scheme_label,
        trials,
        z,
        per_edge,
        pooled,
        min_ratio,
        min_ratio_ci,
    })
}

fn pool_class(
    g: &GraphInstance,
    counts: &[u64],
    trials: u64,
    z: f64,
    class: &[usize],
) -> Result<PooledEstimate> {
    let positive: Vec<usize> = class
        .iter()
        .copied()
        .filter(|&e| g.edges()[e].x > 0.0)
        .collect();
    if positive.is_empty() {
        return Err(Error::BadSymmetryClasses {
            reason: "class contains only zero-value edges".into(),
        });
    }
    let selected: u64 = positive.iter().map(|&e| counts[e]).sum();
    let total_x: f64 = positive.iter().map(|&e| g.edges()[e].x).sum();
    let k = positive.len() as f64;
    let ratio = selected as f64 / (trials as f64 * total_x);
    let (lo, hi) = wilson_interval(selected, trials * positive.len() as u64, z)?;
    let scale = k / total_x;
    Ok(PooledEstimate {
        edges: positive,
        selected,
        total_x,
        ratio,
        ci: (lo * scale, hi * scale),
    })
}

/// Quantile adjusted for taking a minimum over `rows` estimates.
fn bonferroni_z(z: f64, rows: usize) -> f64 {
    if rows <= 1 {
        return z;
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let alpha = 2.0 * (1.0 - normal.cdf(z));
    let adjusted = (alpha / rows as f64).clamp(f64::MIN_POSITIVE, 1.0);
    normal.inverse_cdf(1.0 - adjusted / 2.0)
}

/// Full pipeline: run trials, then report with `z = 1.96`.
pub fn estimate_selectability(
    g: &GraphInstance,
    scheme: &Scheme,
    trials: u64,
    seed: u64,
    pool: bool,
) -> Result<EstimateReport> {
    let counts = per_edge_counts(g, scheme, trials, seed)?;
    report_from_counts(g, scheme.label(), &counts, trials, 1.96, pool)
}
