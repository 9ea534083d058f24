//! Floating-point engine: compiled evaluation, Newton refinement and
//! predictor–corrector path tracking.

mod homotopy;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FanoError, Result};
use crate::exact::SparsePoly;
use crate::system::SquareSystem;

pub use homotopy::{
    distinct_endpoints, solve_total_degree, solve_total_degree_watching, track_parameter_path,
    track_segment,
};

pub type C64 = Complex64;

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(C64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn new(p: &SparsePoly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let exps = m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                (c.to_c64(), exps)
            })
            .collect();
        Self { terms }
    }

    fn eval(&self, pows: &[Vec<C64>]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (c, exps) in &self.terms {
            let mut t = *c;
            for &(i, e) in exps {
                t *= pows[i][e as usize];
            }
            acc += t;
        }
        acc
    }
}

/// Hardware-float shadow of a [`SquareSystem`] and its Jacobian.
#[derive(Clone, Debug)]
pub struct FloatSystem {
    num_vars: usize,
    max_deg: u32,
    eqs: Vec<CompiledPoly>,
    jac: Vec<Vec<CompiledPoly>>,
}

impl FloatSystem {
    pub fn new(g: &SquareSystem) -> Self {
        let eqs = g.polys().iter().map(CompiledPoly::new).collect();
        let jac = g
            .jacobian_polys()
            .iter()
            .map(|row| row.iter().map(CompiledPoly::new).collect())
            .collect();
        let max_deg = g.degrees().into_iter().max().unwrap_or(0);
        Self { num_vars: g.num_vars(), max_deg, eqs, jac }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn powers(&self, x: &[C64]) -> Vec<Vec<C64>> {
        x.iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(self.max_deg as usize + 1);
                p.push(C64::new(1.0, 0.0));
                for k in 1..=self.max_deg as usize {
                    p.push(p[k - 1] * xi);
                }
                p
            })
            .collect()
    }

    pub fn eval(&self, x: &[C64]) -> DVector<C64> {
        let pows = self.powers(x);
        DVector::from_iterator(self.eqs.len(), self.eqs.iter().map(|e| e.eval(&pows)))
    }

    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let pows = self.powers(x);
        let n = self.num_vars;
        DMatrix::from_fn(self.eqs.len(), n, |i, j| self.jac[i][j].eval(&pows))
    }

    /// Value and Jacobian sharing one power table.
    pub fn eval_with_jacobian(&self, x: &[C64]) -> (DVector<C64>, DMatrix<C64>) {
        let pows = self.powers(x);
        let n = self.num_vars;
        let v = DVector::from_iterator(self.eqs.len(), self.eqs.iter().map(|e| e.eval(&pows)));
        let j = DMatrix::from_fn(self.eqs.len(), n, |i, k| self.jac[i][k].eval(&pows));
        (v, j)
    }
}

/// Knobs of the path tracker.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackSettings {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_newton_iters: usize,
    /// Relative size of the last corrector update accepted as converged.
    pub corrector_tol: f64,
    /// Endpoints are accepted when the final Newton update is below this.
    pub path_tol: f64,
    /// Paths whose max-norm exceeds this are declared diverged.
    pub divergence_norm: f64,
    /// From this time on, paths near a watched point are truncated.
    pub target_cutoff: f64,
    /// Max-norm radius around the watched point that triggers truncation.
    pub singular_radius: f64,
    pub max_steps: usize,
}

impl Default for TrackSettings {
    fn default() -> Self {
        Self {
            initial_step: 0.01,
            min_step: 1e-14,
            max_step: 0.1,
            max_newton_iters: 3,
            corrector_tol: 1e-7,
            path_tol: 1e-10,
            divergence_norm: 1e8,
            target_cutoff: 0.99,
            singular_radius: 1e-4,
            max_steps: 50_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathStatus {
    Converged,
    Diverged,
    Failed,
    TruncatedNearSingularity,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathResult {
    pub start_index: usize,
    #[serde(with = "crate::io::hex_complex_vec")]
    pub endpoint: Vec<C64>,
    pub status: PathStatus,
    pub t_reached: f64,
    pub steps: usize,
}

pub(crate) fn max_norm(x: &[C64]) -> f64 {
    x.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub(crate) fn max_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Result of a successful Newton refinement.
#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub point: Vec<C64>,
    pub residual: f64,
    pub last_step: f64,
    /// Norms of the successive Newton updates.
    pub steps: Vec<f64>,
}

/// Solves `J Δ = −F`, failing on a singular `J`.
pub(crate) fn newton_update(f: &DVector<C64>, j: DMatrix<C64>) -> Option<DVector<C64>> {
    let d = j.lu().solve(&(-f))?;
    d.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(d)
}

/// Newton's method from `x0`; succeeds once the update is negligible.
pub fn newton_refine(s: &FloatSystem, x0: &[C64], max_iter: usize) -> Result<NewtonOutcome> {
    check_dim(s.num_vars(), x0.len())?;
    let mut x = x0.to_vec();
    let mut steps = Vec::new();
    for _ in 0..max_iter.max(1) {
        let (f, j) = s.eval_with_jacobian(&x);
        let d = newton_update(&f, j).ok_or_else(|| FanoError::Numerical("singular Jacobian".into()))?;
        let dn = d.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (xi, di) in x.iter_mut().zip(d.iter()) {
            *xi += di;
        }
        steps.push(dn);
        let scale = 1.0 + max_norm(&x);
        if dn <= 1e-14 * scale {
            break;
        }
        if let [.., prev, last] = steps[..] {
            // past the quadratic regime: further updates only add rounding noise
            if last > 0.5 * prev && last < 1e-11 * scale {
                break;
            }
        }
    }
    let residual = s.eval(&x).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let last_step = *steps.last().unwrap();
    let scale = 1.0 + max_norm(&x);
    if last_step <= 1e-10 * scale && residual.is_finite() {
        Ok(NewtonOutcome { point: x, residual, last_step, steps })
    } else {
        Err(FanoError::Numerical(format!("Newton did not converge (last update {last_step:e})")))
    }
}
