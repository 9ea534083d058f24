use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{is_zero_vector, GaussianRational};
use crate::system::{ChartPoint, SquareSystem, TangentVector};

/// Why a point is not a simple double zero; the first failing condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    #[error("G does not vanish at the point")]
    NotAZero,
    #[error("the Jacobian is nonsingular (smooth zero)")]
    KernelDimZero,
    #[error("the Jacobian kernel has dimension {0}")]
    KernelDimHigh(usize),
    #[error("D²G(v,v) lies in the image of DG")]
    HessianInImage,
}

/// Flags for the three defining conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleZeroChecks {
    pub zero_value: bool,
    pub kernel_dim_one: bool,
    pub hessian_escape: bool,
}

/// Exact witness that `point` is a simple double zero of `G`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleZeroCertificate {
    pub point: ChartPoint,
    pub kernel_vector: TangentVector,
    pub checks: DoubleZeroChecks,
}

impl DoubleZeroCertificate {
    pub fn is_valid(&self) -> bool {
        let c = self.checks;
        c.zero_value && c.kernel_dim_one && c.hessian_escape
    }

    /// Re-derives all three conditions from the stored point and kernel
    /// vector alone.
    pub fn recheck(&self, g: &SquareSystem) -> Result<bool> {
        let (x, v) = (&self.point, &self.kernel_vector);
        if !is_zero_vector(&g.eval(x)?) || is_zero_vector(v) {
            return Ok(false);
        }
        let dg = g.jacobian_at(x)?;
        if dg.rank() + 1 != g.num_vars() || !is_zero_vector(&dg.mul_vec(v)?) {
            return Ok(false);
        }
        Ok(!dg.in_column_span(&g.hessian_quadratic(x, v)?)?)
    }
}

pub type DoubleZeroVerdict = std::result::Result<DoubleZeroCertificate, Rejection>;

/// Exact test of the simple-double-zero conditions: `G(x) = 0`,
/// `ker DG(x) = ⟨v⟩` and `D²G(x)(v,v) ∉ Im DG(x)`.
///
/// The outer `Result` carries malformed input (wrong dimension); the inner
/// one the verdict.
pub fn is_simple_double_zero(g: &SquareSystem, x: &[GaussianRational]) -> Result<DoubleZeroVerdict> {
    if !is_zero_vector(&g.eval(x)?) {
        return Ok(Err(Rejection::NotAZero));
    }
    let dg = g.jacobian_at(x)?;
    let mut kernel = dg.kernel_basis();
    match kernel.len() {
        0 => return Ok(Err(Rejection::KernelDimZero)),
        1 => {}
        k => return Ok(Err(Rejection::KernelDimHigh(k))),
    }
    let v = kernel.remove(0);
    if dg.in_column_span(&g.hessian_quadratic(x, &v)?)? {
        return Ok(Err(Rejection::HessianInImage));
    }
    Ok(Ok(DoubleZeroCertificate {
        point: x.to_vec(),
        kernel_vector: v,
        checks: DoubleZeroChecks { zero_value: true, kernel_dim_one: true, hessian_escape: true },
    }))
}
