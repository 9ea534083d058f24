//! Verification engines: exact simple-double-zero checks and interval
//! certification of smooth zeros via the Krawczyk operator.

mod double_zero;
mod interval;
mod krawczyk;

#[cfg(test)]
mod tests;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FanoError, Result};
use crate::system::SquareSystem;
use crate::tracker::{FloatSystem, C64};

pub use double_zero::{is_simple_double_zero, DoubleZeroCertificate, DoubleZeroChecks, DoubleZeroVerdict, Rejection};
pub use interval::{ComplexBox, ComplexInterval, RealInterval};
pub use krawczyk::{eval_poly_interval, krawczyk, krawczyk_contracts, rump_certify, IntervalSystem};

/// Certified isolation of (part of) the zero set of one system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedFiber {
    pub system: SquareSystem,
    pub double_point: Option<DoubleZeroCertificate>,
    pub boxes: Vec<ComplexBox>,
    pub expected_degree: u64,
    /// Candidates handed in that could not be certified.
    pub uncertified: usize,
}

impl CertifiedFiber {
    /// Zeros accounted for, counting the double point twice.
    pub fn accounted(&self) -> u64 {
        self.boxes.len() as u64 + 2 * self.double_point.is_some() as u64
    }

    pub fn is_complete(&self) -> bool {
        self.accounted() == self.expected_degree
    }

    /// Re-checks every certificate from the stored data alone.
    pub fn verify(&self) -> Result<FiberVerdict> {
        let g = &self.system;
        let double_point_valid = match &self.double_point {
            Some(dz) => Some(dz.is_valid() && dz.recheck(g)?),
            None => None,
        };
        let (ig, fg) = (IntervalSystem::new(g), FloatSystem::new(g));
        let contracting = self.boxes.par_iter().filter(|b| krawczyk_contracts(&ig, &fg, b)).count();
        let overlap = find_overlap(&self.boxes);
        let excluded_hit = self
            .double_point
            .as_ref()
            .and_then(|dz| self.boxes.iter().position(|b| b.contains_exact(&dz.point)));
        Ok(FiberVerdict {
            boxes_contract: contracting == self.boxes.len(),
            contracting_boxes: contracting,
            disjoint: overlap.is_none(),
            excludes_double_point: excluded_hit.is_none(),
            double_point_valid,
            complete: self.is_complete(),
        })
    }
}

/// Outcome of re-verifying a stored [`CertifiedFiber`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberVerdict {
    pub boxes_contract: bool,
    pub contracting_boxes: usize,
    pub disjoint: bool,
    pub excludes_double_point: bool,
    pub double_point_valid: Option<bool>,
    pub complete: bool,
}

impl FiberVerdict {
    /// Everything stored is sound (the fiber may still be partial).
    pub fn sound(&self) -> bool {
        self.boxes_contract && self.disjoint && self.excludes_double_point && self.double_point_valid != Some(false)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    /// Sound but wrong size; the partial fiber is kept for reporting.
    #[error("certified {found} zeros (counting multiplicity), expected {expected}")]
    CountMismatch { found: u64, expected: u64, fiber: Box<CertifiedFiber> },
    #[error("certified boxes {0} and {1} intersect")]
    OverlapDetected(usize, usize),
    #[error("certified box {0} contains the double point")]
    ExcludedPointHit(usize),
    #[error("the supplied double-zero certificate does not check out")]
    InvalidDoubleZero,
    #[error(transparent)]
    Input(#[from] FanoError),
}

/// First intersecting pair, found by a sweep over boxes sorted by the
/// lower real bound of the first coordinate.
pub fn find_overlap(boxes: &[ComplexBox]) -> Option<(usize, usize)> {
    if boxes.first().is_none_or(|b| b.dim() == 0) {
        return (boxes.len() > 1).then_some((0, 1));
    }
    let key = |i: usize| boxes[i].coords()[0].re;
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| key(a).lo().total_cmp(&key(b).lo()).then(a.cmp(&b)));
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if key(b).lo() > key(a).hi() {
                break;
            }
            if boxes[a].intersects(&boxes[b]) {
                return Some((a.min(b), a.max(b)));
            }
        }
    }
    None
}

/// Certifies every candidate, then checks disjointness, exclusion of the
/// double point and the count `boxes + 2·[double point] = expected_degree`.
pub fn certify_fiber(
    g: &SquareSystem,
    candidates: &[Vec<C64>],
    dz: Option<DoubleZeroCertificate>,
    expected_degree: u64,
) -> std::result::Result<CertifiedFiber, CertifyError> {
    if let Some(d) = &dz {
        if !d.is_valid() || !d.recheck(g)? {
            return Err(CertifyError::InvalidDoubleZero);
        }
    }
    let (ig, fg) = (IntervalSystem::new(g), FloatSystem::new(g));
    let certified: Vec<Option<ComplexBox>> = candidates.par_iter().map(|x| rump_certify(&ig, &fg, x)).collect();
    let uncertified = certified.iter().filter(|b| b.is_none()).count();
    let boxes: Vec<ComplexBox> = certified.into_iter().flatten().collect();
    if let Some((a, b)) = find_overlap(&boxes) {
        return Err(CertifyError::OverlapDetected(a, b));
    }
    if let Some(d) = &dz {
        if let Some(i) = boxes.iter().position(|b| b.contains_exact(&d.point)) {
            return Err(CertifyError::ExcludedPointHit(i));
        }
    }
    let fiber = CertifiedFiber { system: g.clone(), double_point: dz, boxes, expected_degree, uncertified };
    if fiber.is_complete() {
        Ok(fiber)
    } else {
        Err(CertifyError::CountMismatch { found: fiber.accounted(), expected: expected_degree, fiber: Box::new(fiber) })
    }
}
