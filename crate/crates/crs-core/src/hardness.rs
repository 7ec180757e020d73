//! Random-order online matching on `K_{n,n}` with activation probability
//! `1/n`: the greedy trajectory against the limiting solution
//! `w(z) = z/(1+z)` of `w' = (1-w)^2`, and the offline maximum-matching
//! benchmark on the same realizations.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::trial_rng;

/// Limiting greedy matching fraction after `z n^2` arrivals.
pub fn ode_solution(z: f64) -> f64 {
    z / (1.0 + z)
}

/// Time-indexed samples of the greedy matching size.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub n: usize,
    /// Arrival counts at which the matching size is sampled.
    pub checkpoints: Vec<usize>,
    /// `|M_t| / n` per trial per checkpoint.
    pub samples: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Trajectory {
    /// Largest deviation of the mean trajectory from `w(t/n^2)`.
    pub fn sup_deviation(&self) -> f64 {
        let n2 = (self.n * self.n) as f64;
        self.checkpoints
            .iter()
            .zip(&self.mean)
            .map(|(&t, &m)| (m - ode_solution(t as f64 / n2)).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean_final_fraction(&self) -> f64 {
        *self.mean.last().expect("at least one checkpoint")
    }
}

/// Greedy matching on `K_{n,n}` with edges shuffled uniformly and each
/// arrival active with probability `1/n`; records `|M_t|/n` at evenly
/// spaced checkpoints. Each trial asserts that the result is maximal in the
/// arrived-active graph.
pub fn simulate_greedy(
    n: usize,
    trials: u64,
    checkpoints: usize,
    seed: u64,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::ZeroCount { what: "n" });
    }
    if trials == 0 {
        return Err(Error::ZeroCount { what: "trials" });
    }
    let checkpoints = checkpoints.max(2);
    let n2 = n * n;
    let marks: Vec<usize> = (0..checkpoints)
        .map(|j| (j * n2).div_ceil(checkpoints - 1).min(n2))
        .collect();
    let samples: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            greedy_trial(n, &marks, &mut rng).0
        })
        .collect();
    Ok(finish_trajectory(n, marks, samples))
}

fn finish_trajectory(n: usize, checkpoints: Vec<usize>, samples: Vec<Vec<f64>>) -> Trajectory {
    let cols = checkpoints.len();
    let trials = samples.len() as f64;
    let mut mean = vec![0.0; cols];
    let mut lo = vec![f64::INFINITY; cols];
    let mut hi = vec![f64::NEG_INFINITY; cols];
    for row in &samples {
        for (j, &v) in row.iter().enumerate() {
            mean[j] += v / trials;
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    Trajectory {
        n,
        checkpoints,
        samples,
        mean,
        lo,
        hi,
    }
}

/// One shuffled greedy pass; returns checkpoint fractions and the realized
/// active graph as left-vertex adjacency lists.
fn greedy_trial<R: Rng>(n: usize, marks: &[usize], rng: &mut R) -> (Vec<f64>, Vec<Vec<usize>>) {
    let n2 = n * n;
    let mut order: Vec<u32> = (0..n2 as u32).collect();
    for i in (1..n2).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut matched_left = vec![false; n];
    let mut matched_right = vec![false; n];
    let mut active_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut size = 0usize;
    let mut fractions = Vec::with_capacity(marks.len());
    let mut next_mark = 0usize;
    for (t, &code) in order.iter().enumerate() {
        while next_mark < marks.len() && marks[next_mark] == t {
            fractions.push(size as f64 / n as f64);
            next_mark += 1;
        }
        let active = rng.random::<f64>() < 1.0 / n as f64;
        if !active {
            continue;
        }
        let u = code as usize / n;
        let v = code as usize % n;
        active_adj[u].push(v);
        if !matched_left[u] && !matched_right[v] {
            matched_left[u] = true;
            matched_right[v] = true;
            size += 1;
        }
    }
    while next_mark < marks.len() {
        fractions.push(size as f64 / n as f64);
        next_mark += 1;
    }
    // maximality: no active edge has both endpoints free
    for (u, nbrs) in active_adj.iter().enumerate() {
        if matched_left[u] {
            continue;
        }
        assert!(
            nbrs.iter().all(|&v| matched_right[v]),
            "greedy result must be maximal"
        );
    }
    (fractions, active_adj)
}

/// Maximum bipartite matching by Hopcroft-Karp layered augmentation.
/// `adj[u]` lists the right-side neighbors of left vertex `u`.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_count: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left_count = adj.len();
    let mut match_left = vec![FREE; left_count];
    let mut match_right = vec![FREE; right_count];
    let mut dist = vec![0usize; left_count];
    loop {
        // BFS layers from free left vertices
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left_count {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = FREE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    FREE => found = true,
                    w => {
                        if dist[w] == FREE {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        if !found {
            break;
        }
        fn augment(
            adj: &[Vec<usize>],
            match_left: &mut [usize],
            match_right: &mut [usize],
            dist: &mut [usize],
            u: usize,
        ) -> bool {
            for i in 0..adj[u].len() {
                let v = adj[u][i];
                let w = match_right[v];
                if w == FREE
                    || (dist[w] == dist[u].wrapping_add(1)
                        && augment(adj, match_left, match_right, dist, w))
                {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
            dist[u] = FREE;
            false
        }
        for u in 0..left_count {
            if match_left[u] == FREE && dist[u] == 0 {
                augment(adj, &mut match_left, &mut match_right, &mut dist, u);
            }
        }
    }
    match_left.iter().filter(|&&v| v != FREE).count()
}

/// Mean of `(maximum matching size)/n` over sampled active-edge graphs of
/// `K_{n,n}` with activation probability `1/n`. Each trial also runs greedy
/// on the same realization, which the maximum matching must dominate.
pub fn offline_fraction(n: usize, trials: u64, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroCount { what: "n" });
    }
    if trials == 0 {
        return Err(Error::ZeroCount { what: "trials" });
    }
    let marks = [n * n];
    let total: f64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (fractions, active_adj) = greedy_trial(n, &marks, &mut rng);
            let maximum = hopcroft_karp(&active_adj, n);
            let greedy = (fractions[0] * n as f64).round() as usize;
            assert!(maximum >= greedy, "maximum matching dominates greedy");
            maximum as f64 / n as f64
        })
        .sum();
    Ok(total / trials as f64)
}
