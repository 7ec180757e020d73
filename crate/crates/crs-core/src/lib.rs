//! Contention resolution schemes for the matching polytope of graphs.
//!
//! This crate implements two sequential schemes for selecting a matching
//! among independently active edges, together with the numerical machinery
//! needed to calibrate and verify them:
//!
//! - [`ocrs`]: the adversarial-order scheme that attenuates each arriving
//!   edge by `alpha_e = c / P[not blocked(e)]`, with an exact subset-DP and a
//!   Monte-Carlo fallback for computing the attenuation probabilities.
//! - [`rcrs`]: the random-order scheme that attenuates each edge by a fixed
//!   function `a(x_e)` of its fractional value, plus per-run diagnostics of
//!   relevant edges and simple-blockers.
//! - [`regularize`]: gadget reductions (7-cycle, biclique) producing
//!   1-regular instances with edge maps back to the original.
//! - [`analysis`]: numerical verification of the attenuation-function
//!   properties, the selectability integrals and their closed-form constants,
//!   the `obj` functionals, and the adversary's minimization problem.
//! - [`hardness`]: random-order greedy matching on `K_{n,n}` against the
//!   `w(z) = z/(1+z)` trajectory, with a Hopcroft-Karp offline benchmark.
//! - [`estimator`]: a seeded, trial-parallel Monte-Carlo harness turning
//!   scheme executions into selectability estimates with Wilson intervals
//!   and symmetry-class pooling.

pub mod analysis;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod hardness;
pub mod instances;
pub mod ocrs;
pub mod quad;
pub mod rcrs;
pub mod regularize;
pub mod rng;

pub use error::{Error, Result};
