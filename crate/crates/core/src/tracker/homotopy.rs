use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{max_dist, max_norm, newton_refine, newton_update, FloatSystem, PathResult, PathStatus, TrackSettings, C64};
use crate::error::{check_dim, FanoError, Result};
use crate::exact::{GaussianRational, Monomial, SparsePoly};
use crate::system::SquareSystem;

/// `H(x, t) = (1−t)·ga·A(x) + t·gb·B(x)`.
struct Segment<'a> {
    a: &'a FloatSystem,
    b: &'a FloatSystem,
    ga: C64,
    gb: C64,
}

impl Segment<'_> {
    fn parts(&self, x: &[C64], t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let (fa, ja) = self.a.eval_with_jacobian(x);
        let (fb, jb) = self.b.eval_with_jacobian(x);
        let (wa, wb) = (self.ga * (1.0 - t), self.gb * t);
        let h = &fa * wa + &fb * wb;
        let hx = ja * wa + jb * wb;
        let ht = fa * (-self.ga) + fb * self.gb;
        (h, hx, ht)
    }

    /// Davidenko field `dx/dt = −H_x⁻¹ H_t`.
    fn velocity(&self, x: &[C64], t: f64) -> Option<DVector<C64>> {
        let (_, hx, ht) = self.parts(x, t);
        newton_update(&ht, hx)
    }

    fn rk4(&self, x: &[C64], t: f64, h: f64) -> Option<Vec<C64>> {
        let shift = |v: &DVector<C64>, s: f64| -> Vec<C64> { x.iter().zip(v.iter()).map(|(a, b)| a + b * s).collect() };
        let k1 = self.velocity(x, t)?;
        let k2 = self.velocity(&shift(&k1, h / 2.0), t + h / 2.0)?;
        let k3 = self.velocity(&shift(&k2, h / 2.0), t + h / 2.0)?;
        let k4 = self.velocity(&shift(&k3, h), t + h)?;
        let two = C64::new(2.0, 0.0);
        let dir = (k1 + k2 * two + k3 * two + k4).unscale(6.0);
        Some(shift(&dir, h))
    }

    /// At most `iters` Newton steps on `H(·, t)`; rejects updates that do
    /// not contract, which guards against jumping to a neighbouring path.
    fn correct(&self, mut x: Vec<C64>, t: f64, s: &TrackSettings) -> Option<Vec<C64>> {
        let mut prev = f64::INFINITY;
        for k in 0..s.max_newton_iters {
            let (h, hx, _) = self.parts(&x, t);
            let d = newton_update(&h, hx)?;
            let dn = d.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let scale = 1.0 + max_norm(&x);
            if k == 0 && dn > 0.1 * scale {
                return None;
            }
            if k > 0 && dn > 0.5 * prev && dn > s.corrector_tol * scale {
                return None;
            }
            for (xi, di) in x.iter_mut().zip(d.iter()) {
                *xi += di;
            }
            if dn <= s.corrector_tol * scale {
                return Some(x);
            }
            prev = dn;
        }
        None
    }

    fn track(&self, start: &[C64], s: &TrackSettings, watch: Option<&[C64]>) -> PathResult {
        let mut x = start.to_vec();
        let (mut t, mut h) = (0.0f64, s.initial_step);
        let (mut streak, mut steps) = (0usize, 0usize);
        let near_watch = |x: &[C64], t: f64, radius: f64| {
            watch.is_some_and(|w| t >= s.target_cutoff && max_dist(x, w) <= radius * (1.0 + max_norm(w)))
        };
        let result = |x: Vec<C64>, status, t, steps| PathResult { start_index: 0, endpoint: x, status, t_reached: t, steps };
        while t < 1.0 {
            steps += 1;
            if steps > s.max_steps {
                return result(x, PathStatus::Failed, t, steps);
            }
            let step = h.min(1.0 - t);
            let t1 = if step == 1.0 - t { 1.0 } else { t + step };
            let next = self.rk4(&x, t, step).and_then(|p| self.correct(p, t1, s));
            match next {
                Some(x1) => {
                    x = x1;
                    t = t1;
                    streak += 1;
                    if streak >= 5 {
                        h = (2.0 * h).min(s.max_step);
                        streak = 0;
                    }
                    if max_norm(&x) > s.divergence_norm {
                        return result(x, PathStatus::Diverged, t, steps);
                    }
                    if near_watch(&x, t, s.singular_radius) {
                        return result(x, PathStatus::TruncatedNearSingularity, t, steps);
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                    if h < s.min_step {
                        let status = if near_watch(&x, t, 1e-2) {
                            PathStatus::TruncatedNearSingularity
                        } else if t >= s.target_cutoff && max_norm(&x) > s.divergence_norm.sqrt() {
                            // blowing up as t → 1: a solution at infinity
                            PathStatus::Diverged
                        } else {
                            PathStatus::Failed
                        };
                        return result(x, status, t, steps);
                    }
                }
            }
        }
        if near_watch(&x, 1.0, 1e-2) {
            return result(x, PathStatus::TruncatedNearSingularity, 1.0, steps);
        }
        match newton_refine(self.b, &x, 8) {
            Ok(out) if !near_watch(&out.point, 1.0, s.singular_radius) => {
                if max_dist(&out.point, &x) <= 1e-6 * (1.0 + max_norm(&x)) {
                    result(out.point, PathStatus::Converged, 1.0, steps)
                } else {
                    result(x, PathStatus::Failed, 1.0, steps)
                }
            }
            Ok(out) => result(out.point, PathStatus::TruncatedNearSingularity, 1.0, steps),
            _ => result(x, PathStatus::Failed, 1.0, steps),
        }
    }
}

/// Start system `x_i^{d_i} − 1` for the equation degrees `d`.
fn start_system(d: &[u32]) -> Result<SquareSystem> {
    let n = d.len();
    let polys = d
        .iter()
        .enumerate()
        .map(|(i, &di)| {
            let mut m = Monomial::one(n);
            m.0[i] = di;
            SparsePoly::from_terms(n, [(m, GaussianRational::from_int(1)), (Monomial::one(n), GaussianRational::from_int(-1))])
        })
        .collect::<Result<Vec<_>>>()?;
    SquareSystem::new(polys)
}

/// Zeros of the start system, indexed in mixed radix.
fn start_point(d: &[u32], mut index: usize) -> Vec<C64> {
    d.iter()
        .map(|&di| {
            let k = index % di as usize;
            index /= di as usize;
            C64::from_polar(1.0, TAU * k as f64 / di as f64)
        })
        .collect()
}

/// Total-degree homotopy from `(x_i^{deg g_i} − 1)` to `G`, one result per
/// start solution, ordered by start index.
pub fn solve_total_degree(g: &SquareSystem, settings: &TrackSettings, seed: u64) -> Result<Vec<PathResult>> {
    solve_total_degree_watching(g, settings, seed, None)
}

/// As [`solve_total_degree`], truncating paths that approach `watch` late in
/// the homotopy (the known double point of a forged instance).
pub fn solve_total_degree_watching(
    g: &SquareSystem,
    settings: &TrackSettings,
    seed: u64,
    watch: Option<&[C64]>,
) -> Result<Vec<PathResult>> {
    let d = g.degrees();
    if d.contains(&0) {
        return Err(FanoError::Numerical("an equation of G is constant".into()));
    }
    if let Some(w) = watch {
        check_dim(g.num_vars(), w.len())?;
    }
    let total: usize = d.iter().try_fold(1usize, |acc, &di| acc.checked_mul(di as usize)).ok_or_else(|| {
        FanoError::Numerical("Bezout number overflows".into())
    })?;
    let start = FloatSystem::new(&start_system(&d)?);
    let target = FloatSystem::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
    let seg = Segment { a: &start, b: &target, ga: gamma, gb: C64::new(1.0, 0.0) };
    Ok((0..total)
        .into_par_iter()
        .map(|i| {
            let mut r = seg.track(&start_point(&d, i), settings, watch);
            r.start_index = i;
            r
        })
        .collect())
}

/// Converged endpoints merged when within `tol` (max-norm, relative to size).
pub fn distinct_endpoints(results: &[PathResult], tol: f64) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for r in results.iter().filter(|r| r.status == PathStatus::Converged) {
        let scale = 1.0 + max_norm(&r.endpoint);
        if !out.iter().any(|p| max_dist(p, &r.endpoint) <= tol * scale) {
            out.push(r.endpoint.clone());
        }
    }
    out
}

/// Transports a zero of `a` to a zero of `b` along `(1−s)·a + s·b`.
pub fn track_segment(a: &FloatSystem, b: &FloatSystem, start: &[C64], settings: &TrackSettings) -> Result<Vec<C64>> {
    check_dim(a.num_vars(), start.len())?;
    let one = C64::new(1.0, 0.0);
    let r = Segment { a, b, ga: one, gb: one }.track(start, settings, None);
    match r.status {
        PathStatus::Converged => Ok(r.endpoint),
        other => Err(FanoError::Numerical(format!(
            "segment path ended {other:?} at t = {} with |x| = {:.3e} after {} steps",
            r.t_reached,
            max_norm(&r.endpoint),
            r.steps
        ))),
    }
}

/// Transports every point of `start_fiber` around the closed polygon of
/// systems `vertices[0] → vertices[1] → ... → vertices[last]`. Any failed
/// path discards the whole loop.
pub fn track_parameter_path(vertices: &[FloatSystem], start_fiber: &[Vec<C64>], settings: &TrackSettings) -> Result<Vec<Vec<C64>>> {
    start_fiber
        .par_iter()
        .map(|p| {
            let mut x = p.clone();
            for w in vertices.windows(2) {
                x = track_segment(&w[0], &w[1], &x, settings)?;
            }
            Ok(x)
        })
        .collect()
}
