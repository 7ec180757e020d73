//! The adversary's minimization problem bounding the probability that both
//! endpoints of an arriving edge are already matched, and a multi-start
//! projected Nelder-Mead search over it.
//!
//! The search provides evidence, not proof: a returned point is an upper
//! bound on the infimum. The original verification used a global
//! branch-and-bound solver; every report produced here records that
//! distinction.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::trial_rng;

/// A feasible-ish point of the minimization with its objective value.
#[derive(Clone, Debug, Serialize)]
pub struct AdvMinPoint {
    pub b: f64,
    pub k: usize,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub objective: f64,
    pub residuals: FeasibilityResiduals,
}

/// Constraint residuals of a point; all zero (to rounding) for points
/// produced by the projection.
#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityResiduals {
    /// `|sum y - 1|`
    pub sum_y: f64,
    /// `|sum z - 1|`
    pub sum_z: f64,
    /// `max(0, y_i + z_i - 1)`
    pub pair_cap: f64,
    /// `max(0, y_{i+1} - y_i)` and the `z` analogue
    pub monotone: f64,
}

pub fn residuals(y: &[f64], z: &[f64]) -> FeasibilityResiduals {
    let sum = |v: &[f64]| (v.iter().sum::<f64>() - 1.0).abs();
    let pair = y
        .iter()
        .zip(z)
        .map(|(a, b)| (a + b - 1.0).max(0.0))
        .fold(0.0, f64::max);
    let mono = |v: &[f64]| {
        v.windows(2)
            .map(|w| (w[1] - w[0]).max(0.0))
            .fold(0.0, f64::max)
    };
    FeasibilityResiduals {
        sum_y: sum(y),
        sum_z: sum(z),
        pair_cap: pair,
        monotone: mono(y).max(mono(z)),
    }
}

fn check_b(b: f64) -> Result<()> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::ParamOutOfRange {
            what: "b",
            lo: 0.0,
            hi: f64::INFINITY,
            value: b,
        });
    }
    Ok(())
}

/// The summand `y_i (1 - b + b y_i) / (1 + b y_i)`.
fn term(b: f64, v: f64) -> f64 {
    v * (1.0 - b + b * v) / (1.0 + b * v)
}

/// Exact objective of the minimization: two prefix-weighted product-sums
/// multiplied, minus the diagonal sum, all scaled by `b^2`. Feasibility is
/// reported separately, never enforced here.
pub fn advmin_objective(b: f64, y: &[f64], z: &[f64]) -> Result<f64> {
    check_b(b)?;
    if y.len() != z.len() || y.is_empty() {
        return Err(Error::DimensionMismatch {
            reason: format!("y has {} entries, z has {}", y.len(), z.len()),
        });
    }
    let mut sum_y = 0.0;
    let mut sum_z = 0.0;
    let mut diag = 0.0;
    let mut prefix_y = 1.0;
    let mut prefix_z = 1.0;
    for (&yi, &zi) in y.iter().zip(z) {
        let ty = term(b, yi);
        let tz = term(b, zi);
        sum_y += ty * prefix_y;
        sum_z += tz * prefix_z;
        diag += ty * tz * prefix_y * prefix_z;
        prefix_y /= 1.0 + b * yi;
        prefix_z /= 1.0 + b * zi;
    }
    Ok(b * b * (sum_y * sum_z - diag))
}

/// The truncated auxiliary objective lower-bounding `advmin_objective` for
/// any feasible point with at least `K = y.len()` coordinates: the first `K`
/// terms keep their exact form, the tail is replaced by its exponential
/// lower bound `(1-b) * prod(1 - b y_i) * (1 - e^{-b(1 - sum y)})`, and the
/// tail of the diagonal sum is absorbed into the `-b^2 (1-b)^2 / (K-2)`
/// correction.
pub fn advminaux_objective(b: f64, y: &[f64], z: &[f64]) -> Result<f64> {
    check_b(b)?;
    let big_k = y.len();
    if big_k != z.len() {
        return Err(Error::DimensionMismatch {
            reason: format!("y has {} entries, z has {}", y.len(), z.len()),
        });
    }
    if big_k <= 2 {
        return Err(Error::AuxCutoffTooSmall);
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let factor = |v: &[f64]| {
        let mut sum = 0.0;
        let mut prefix = 1.0;
        let mut survive_all = 1.0;
        let mut total = 0.0;
        for &vi in v {
            sum += b * vi * (1.0 - b / (1.0 + b * vi)) * prefix;
            prefix /= 1.0 + b * vi;
            survive_all *= 1.0 - b * vi;
            total += vi;
        }
        let tail = (1.0 - b) * survive_all * (1.0 - (-b * (1.0 - total)).exp());
        sum + tail
    };
    let mut diag = 0.0;
    let mut prefix = 1.0;
    for (&yi, &zi) in y.iter().zip(z) {
        diag += b * yi * (1.0 - b / (1.0 + b * yi)) * b * zi * (1.0 - b / (1.0 + b * zi)) * prefix;
        prefix /= (1.0 + b * yi) * (1.0 + b * zi);
    }
    let correction = b * b * (1.0 - b) * (1.0 - b) / (big_k as f64 - 2.0);
    Ok(factor(y) * factor(z) - diag - correction)
}

/// The hybrid configuration: half the mass on the first coordinate, the
/// rest spread uniformly.
pub fn hybrid_point(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 2);
    let tail = 0.5 / (k - 1) as f64;
    let mut y = vec![tail; k];
    y[0] = 0.5;
    (y.clone(), y)
}

/// Projects an unconstrained vector onto the feasible set: absolute values,
/// sorted descending, normalized to sum 1, and the first-coordinate cap
/// `y_1 + z_1 <= 1` repaired by proportional scaling (only the first
/// coordinate can violate it once both vectors are sorted simplex points).
fn project(theta: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut y = normalize_sorted(&theta[..k]);
    let mut z = normalize_sorted(&theta[k..]);
    for _ in 0..100 {
        let s = y[0] + z[0];
        if s <= 1.0 + 1e-14 {
            return (y, z);
        }
        let (hy, hz) = (y[0] / s, z[0] / s);
        shrink_head(&mut y, hy);
        shrink_head(&mut z, hz);
    }
    // extremely skewed inputs: pin the heads at the boundary
    shrink_head(&mut y, 0.5);
    shrink_head(&mut z, 0.5);
    (y, z)
}

fn normalize_sorted(raw: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = raw.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        vec![1.0 / raw.len() as f64; raw.len()]
    } else {
        v.iter().map(|x| x / sum).collect()
    }
}

/// Replaces the head value with `head` and rescales the tail so the vector
/// still sums to 1 and stays sorted.
fn shrink_head(v: &mut [f64], head: f64) {
    let old_head = v[0];
    let old_tail = 1.0 - old_head;
    let new_tail = 1.0 - head;
    v[0] = head;
    if old_tail > 0.0 {
        let scale = new_tail / old_tail;
        for x in v.iter_mut().skip(1) {
            *x *= scale;
        }
    } else if v.len() > 1 {
        let fill = new_tail / (v.len() - 1) as f64;
        for x in v.iter_mut().skip(1) {
            *x = fill;
        }
    }
    v.sort_unstable_by(|a, b| b.total_cmp(a));
}

/// Multi-start projected Nelder-Mead over the adversary's problem. Returns
/// the best point found, an upper bound on the infimum.
pub fn advmin_search(b: f64, k: usize, restarts: usize, seed: u64) -> Result<AdvMinPoint> {
    advmin_search_with_starts(b, k, restarts, seed, &[])
}

/// Search seeded with extra starting points, used to warm-start from
/// solutions of smaller `k` (padded with zeros, the objective is unchanged).
pub fn advmin_search_with_starts(
    b: f64,
    k: usize,
    restarts: usize,
    seed: u64,
    extra: &[(Vec<f64>, Vec<f64>)],
) -> Result<AdvMinPoint> {
    check_b(b)?;
    if k < 2 {
        return Err(Error::ParamOutOfRange {
            what: "k",
            lo: 2.0,
            hi: f64::INFINITY,
            value: k as f64,
        });
    }
    let objective = |theta: &[f64]| {
        let (y, z) = project(theta, k);
        advmin_objective(b, &y, &z).expect("projection keeps dimensions")
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let (hy, hz) = hybrid_point(k);
    starts.push([hy.as_slice(), hz.as_slice()].concat());
    starts.push(vec![1.0 / k as f64; 2 * k]);
    let mut two_point = vec![0.0; 2 * k];
    two_point[0] = 0.5;
    two_point[1] = 0.5;
    two_point[k] = 0.5;
    two_point[k + 1] = 0.5;
    starts.push(two_point);
    for (ey, ez) in extra {
        if ey.len() == k && ez.len() == k {
            starts.push([ey.as_slice(), ez.as_slice()].concat());
        }
    }
    let mut rng = trial_rng(seed, 0);
    while starts.len() < restarts.max(4) {
        // exponential draws normalize to a uniform simplex sample
        let theta: Vec<f64> = (0..2 * k)
            .map(|_| -(rng.random::<f64>().max(1e-300)).ln())
            .collect();
        starts.push(theta);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in &starts {
        let (value, point) = nelder_mead(&objective, start, 400 * 2 * k);
        if best.as_ref().is_none_or(|(bv, _)| value < *bv) {
            best = Some((value, point));
        }
    }
    let (objective_value, theta) = best.expect("at least one start");
    let (y, z) = project(&theta, k);
    Ok(AdvMinPoint {
        b,
        k,
        residuals: residuals(&y, &z),
        objective: objective_value,
        y,
        z,
    })
}

/// Plain Nelder-Mead with the standard reflection/expansion/contraction
/// coefficients and an evaluation budget.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    max_evals: usize,
) -> (f64, Vec<f64>) {
    let dim = start.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    simplex.push((f(start), start.to_vec()));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += if p[i].abs() > 1e-8 { 0.10 * p[i] } else { 0.02 };
        simplex.push((f(&p), p));
    }
    let mut evals = dim + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        if simplex[dim].0 - simplex[0].0 < 1e-13 {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (_, p) in simplex.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.1)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = f(&reflect);
        evals += 1;
        if fr < simplex[0].0 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let fe = f(&expand);
            evals += 1;
            simplex[dim] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflect);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst.1)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = f(&contract);
            evals += 1;
            if fc < worst.0 {
                simplex[dim] = (fc, contract);
            } else {
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best
                        .iter()
                        .zip(&entry.1)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    *entry = (f(&shrunk), shrunk);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (v, p) = simplex.swap_remove(0);
    (v, p)
}
