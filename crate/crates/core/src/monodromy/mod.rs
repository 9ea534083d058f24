//! Monodromy sampling: transport a certified fiber around random loops in
//! coefficient space and collect the resulting permutations.

mod perm;

#[cfg(test)]
mod tests;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{certify_fiber, ComplexBox};
use crate::error::{FanoError, Result};
use crate::forge::random_form_system;
use crate::problem::{fano_degree, FanoType};
use crate::system::{build_square_system, FormSystem};
use crate::tracker::{distinct_endpoints, solve_total_degree, track_parameter_path, FloatSystem, TrackSettings, C64};

pub use perm::{group_order, PermGroupEstimate, Permutation, StabilizerChain};

/// Fiber sizes above this are not sampled unless asked for explicitly.
pub const DEFAULT_DEGREE_LIMIT: u64 = 64;

/// Give up after this many attempts per requested loop.
const MAX_ATTEMPT_FACTOR: usize = 4;

/// Relative distance within which an endpoint may be matched to its
/// nearest fiber point when it lies in no certified box.
const MATCH_RADIUS: f64 = 1e-6;

/// Why a loop was thrown away.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LoopRejection {
    #[error("a path failed: {0}")]
    PathFailure(String),
    #[error("endpoint {0} matches no fiber point unambiguously")]
    Unmatched(usize),
    #[error("two endpoints matched the same fiber point")]
    NotBijective,
}

/// Matches each endpoint to a fiber point: the unique certified box that
/// contains it, else the nearest fiber point if it is within
/// [`MATCH_RADIUS`] and every other point is much farther away.
pub fn match_endpoints(
    endpoints: &[Vec<C64>],
    fiber: &[Vec<C64>],
    boxes: Option<&[ComplexBox]>,
) -> std::result::Result<Permutation, LoopRejection> {
    let mut images = Vec::with_capacity(endpoints.len());
    for (k, e) in endpoints.iter().enumerate() {
        let by_box = boxes.and_then(|bs| {
            let mut hits = bs.iter().enumerate().filter(|(_, b)| b.contains(e)).map(|(i, _)| i);
            match (hits.next(), hits.next()) {
                (Some(i), None) => Some(i),
                _ => None,
            }
        });
        let idx = match by_box {
            Some(i) => i,
            None => nearest(e, fiber).ok_or(LoopRejection::Unmatched(k))?,
        };
        images.push(idx);
    }
    Permutation::new(images).map_err(|_| LoopRejection::NotBijective)
}

fn nearest(e: &[C64], fiber: &[Vec<C64>]) -> Option<usize> {
    let dist = |p: &[C64]| p.iter().zip(e).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let scale = 1.0 + e.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut d: Vec<(f64, usize)> = fiber.iter().enumerate().map(|(i, p)| (dist(p), i)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (best, i) = *d.first()?;
    let ok = best <= MATCH_RADIUS * scale && d.get(1).is_none_or(|second| second.0 > 1e3 * best.max(1e-12 * scale));
    ok.then_some(i)
}

/// Transports `fiber` (zeros of `base`) around the triangle
/// `base → A → B → base` through two random auxiliary systems.
pub fn loop_permutation(
    base: &FormSystem,
    fiber: &[Vec<C64>],
    boxes: Option<&[ComplexBox]>,
    seed: u64,
    settings: &TrackSettings,
) -> Result<std::result::Result<Permutation, LoopRejection>> {
    let t = base.fano_type();
    let aux = |k: u64| -> Result<FloatSystem> {
        Ok(FloatSystem::new(&build_square_system(&random_form_system(t, seed.wrapping_mul(2).wrapping_add(k))?)?))
    };
    let g0 = FloatSystem::new(&build_square_system(base)?);
    let vertices = [g0.clone(), aux(0)?, aux(1)?, g0];
    Ok(match track_parameter_path(&vertices, fiber, settings) {
        Ok(end) => match_endpoints(&end, fiber, boxes),
        Err(e) => Err(LoopRejection::PathFailure(e.to_string())),
    })
}

/// Result of a monodromy run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub fano_type: FanoType,
    pub seed: u64,
    pub fiber_size: usize,
    pub accepted_loops: usize,
    pub rejected_loops: usize,
    /// Group order after each accepted loop.
    #[serde(with = "decimal_vec")]
    pub order_history: Vec<BigUint>,
    pub group: PermGroupEstimate,
    pub incidence: Option<IncidenceCheck>,
}

mod decimal_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl MonodromyReport {
    /// Accepted loops needed before the order first reached `target`.
    pub fn loops_to_reach(&self, target: &BigUint) -> Option<usize> {
        self.order_history.iter().position(|o| o >= target).map(|k| k + 1)
    }
}

/// Intersection graph of the lines (or planes) in a fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceCheck {
    /// Number of other members each member meets.
    pub degrees: Vec<usize>,
    /// Whether every sampled permutation is a graph automorphism.
    pub preserved: bool,
}

/// Which pairs of planes in the fiber meet, decided by the rank of the
/// stacked `(n+1) × 2(r+1)` matrix of the two planes.
pub fn incidence_graph(t: &FanoType, fiber: &[Vec<C64>]) -> Result<Vec<Vec<bool>>> {
    let (r, n) = (t.r() as usize, t.n() as usize);
    let cols = r + 1;
    let plane = |x: &[C64]| -> DMatrix<C64> {
        DMatrix::from_fn(n + 1, cols, |i, j| {
            if i < n - r {
                x[i * cols + j]
            } else if i - (n - r) == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let planes: Vec<DMatrix<C64>> = fiber.iter().map(|x| plane(x)).collect();
    let m = fiber.len();
    let mut adj = vec![vec![false; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            let mut stacked = DMatrix::zeros(n + 1, 2 * cols);
            stacked.columns_mut(0, cols).copy_from(&planes[a]);
            stacked.columns_mut(cols, cols).copy_from(&planes[b]);
            for mut c in stacked.column_iter_mut() {
                let norm = c.norm();
                c.unscale_mut(norm);
            }
            let sv = stacked.singular_values();
            let (hi, lo) = (sv.max(), sv.min());
            let ratio = lo / hi;
            let meet = if ratio < 1e-8 {
                true
            } else if ratio > 1e-5 {
                false
            } else {
                return Err(FanoError::Numerical(format!("cannot decide whether planes {a} and {b} meet")));
            };
            adj[a][b] = meet;
            adj[b][a] = meet;
        }
    }
    Ok(adj)
}

pub fn preserves_graph(adj: &[Vec<bool>], p: &Permutation) -> bool {
    let m = adj.len();
    p.degree() == m && (0..m).all(|i| (0..m).all(|j| adj[i][j] == adj[p.apply(i)][p.apply(j)]))
}

fn loop_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(1 + k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Solves and certifies a random instance, then transports it around
/// random loops until `num_loops` of them succeed (or too many fail). The result generates a subgroup of the Galois group.
pub fn sample_galois_group(t: &FanoType, num_loops: usize, seed: u64, settings: &TrackSettings) -> Result<MonodromyReport> {
    sample_galois_group_limited(t, num_loops, seed, settings, DEFAULT_DEGREE_LIMIT)
}

pub fn sample_galois_group_limited(
    t: &FanoType,
    num_loops: usize,
    seed: u64,
    settings: &TrackSettings,
    degree_limit: u64,
) -> Result<MonodromyReport> {
    let degree = fano_degree(t)?;
    let n: u64 = u64::try_from(&degree)
        .ok()
        .filter(|&d| d <= degree_limit)
        .ok_or_else(|| FanoError::Numerical(format!("fiber of size {degree} exceeds the sampling limit {degree_limit}")))?;
    let base = random_form_system(t, seed)?;
    let g = build_square_system(&base)?;
    let sols = distinct_endpoints(&solve_total_degree(&g, settings, seed)?, 1e-8);
    let fiber = certify_fiber(&g, &sols, None, n).map_err(|e| FanoError::Certification(e.to_string()))?;
    let points: Vec<Vec<C64>> = fiber.boxes.iter().map(ComplexBox::midpoint).collect();

    // loops are attempted in seed order and batched for parallelism; the
    // first `num_loops` successes are kept, so the result does not depend
    // on the thread count
    let max_attempts = num_loops.saturating_mul(MAX_ATTEMPT_FACTOR);
    let mut gens = Vec::new();
    let mut history = Vec::new();
    let mut rejected = 0;
    let mut next = 0;
    while gens.len() < num_loops && next < max_attempts {
        let batch = (num_loops - gens.len()).max(rayon::current_num_threads()).min(max_attempts - next);
        let outcomes = (next..next + batch)
            .into_par_iter()
            .map(|k| loop_permutation(&base, &points, Some(&fiber.boxes), loop_seed(seed, k), settings))
            .collect::<Result<Vec<_>>>()?;
        next += batch;
        for o in outcomes {
            match o {
                Ok(p) if gens.len() < num_loops => {
                    gens.push(p);
                    history.push(StabilizerChain::new(n as usize, &gens)?.order());
                }
                Ok(_) => {}
                Err(_) => rejected += 1,
            }
        }
    }
    let group = group_order(n as usize, &gens)?;
    let incidence = if t.r() == 1 {
        incidence_graph(t, &points).ok().map(|adj| IncidenceCheck {
            degrees: adj.iter().map(|row| row.iter().filter(|&&b| b).count()).collect(),
            preserved: gens.iter().all(|p| preserves_graph(&adj, p)),
        })
    } else {
        None
    };
    Ok(MonodromyReport {
        fano_type: t.clone(),
        seed,
        fiber_size: n as usize,
        accepted_loops: gens.len(),
        rejected_loops: rejected,
        order_history: history,
        group,
        incidence,
    })
}
