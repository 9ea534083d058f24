//! Combinatorics of Fano problems: expected dimension, degree, lower bounds
//! and enumeration under a degree cap.

mod degree;
mod enumerate;
mod residue;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{FanoError, Result};

pub use degree::{compositions, fano_degree, q_poly, vandermonde};
pub use enumerate::enumerate_fano_problems;
pub use residue::{degree_residue, RESIDUE_MODULUS};

/// The datum `(r, n, d•)`: r-planes on a complete intersection of forms of
/// degrees `d•` in projective n-space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawType", into = "RawType")]
pub struct FanoType {
    r: u32,
    n: u32,
    degrees: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawType {
    r: u32,
    n: u32,
    degrees: Vec<u32>,
}

impl TryFrom<RawType> for FanoType {
    type Error = FanoError;
    fn try_from(t: RawType) -> Result<Self> {
        FanoType::new(t.r, t.n, t.degrees)
    }
}

impl From<FanoType> for RawType {
    fn from(t: FanoType) -> Self {
        RawType { r: t.r, n: t.n, degrees: t.degrees }
    }
}

impl FanoType {
    /// Validates `r ≥ 1`, `s ≥ 1`, every `dᵢ ≥ 2` and `2r ≤ n − s`; the
    /// degrees are stored sorted ascending.
    pub fn new(r: u32, n: u32, mut degrees: Vec<u32>) -> Result<Self> {
        if r == 0 {
            return Err(FanoError::InvalidType("r must be at least 1".into()));
        }
        if degrees.is_empty() {
            return Err(FanoError::InvalidType("at least one form is required".into()));
        }
        if let Some(d) = degrees.iter().find(|&&d| d < 2) {
            return Err(FanoError::InvalidType(format!("form degree {d} < 2")));
        }
        let s = degrees.len() as u64;
        if 2 * r as u64 + s > n as u64 {
            return Err(FanoError::InvalidType(format!("2r = {} exceeds n - s", 2 * r)));
        }
        degrees.sort_unstable();
        Ok(Self { r, n, degrees })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn s(&self) -> usize {
        self.degrees.len()
    }

    /// Dimension `(r+1)(n−r)` of the Grassmannian, i.e. the chart variable count.
    pub fn grassmannian_dim(&self) -> usize {
        ((self.r + 1) * (self.n - self.r)) as usize
    }

    /// Number of coefficients of a form of degree `d` restricted to an r-plane.
    pub fn restricted_len(&self, d: u32) -> usize {
        binomial(d + self.r, self.r) as usize
    }

    /// Σ C(dᵢ + r, r): the equation count of the square system.
    pub fn equation_count(&self) -> u128 {
        self.degrees.iter().map(|&d| binomial(d + self.r, self.r)).sum()
    }

    pub fn require_fano(&self) -> Result<()> {
        match delta(self) {
            0 => Ok(()),
            d => Err(FanoError::NotAFanoProblem(d)),
        }
    }
}

/// `(1,4,(2,2))`.
impl fmt::Display for FanoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.degrees.iter().map(u32::to_string).collect();
        write!(f, "({},{},({}))", self.r, self.n, ds.join(","))
    }
}

/// Accepts `r,n,d1:d2:...`, `r,n,d1,d2,...` and the display form `(r,n,(d1,...))`.
impl FromStr for FanoType {
    type Err = FanoError;
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !matches!(c, '(' | ')' | ' ')).collect();
        let bad = || FanoError::Parse(format!("bad Fano type `{s}`"));
        let mut parts = cleaned.split(',');
        let r = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let n = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let rest: Vec<&str> = parts.collect();
        let degrees = rest
            .join(":")
            .split(':')
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().map_err(|_| bad()))
            .collect::<Result<Vec<u32>>>()?;
        FanoType::new(r, n, degrees)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    num_integer::binomial(n as u128, k as u128)
}

/// Expected dimension `(r+1)(n−r) − Σ C(dᵢ+r, r)` of the Fano scheme.
pub fn delta(t: &FanoType) -> i128 {
    t.grassmannian_dim() as i128 - t.equation_count() as i128
}

/// `(refined, crude)` lower bounds on the degree. The refined bound also
/// divides the degree: each factor is a constant factor of `Q_{r,d•}`.
pub fn degree_lower_bound(t: &FanoType) -> (BigUint, BigUint) {
    let k = t.r + 1;
    let mut refined = BigUint::one();
    let mut crude = BigUint::one();
    for &d in &t.degrees {
        crude *= BigUint::from(d).pow(k);
        for j in (1..=k.min(d)).filter(|j| d % j == 0) {
            let e = binomial(k, j);
            refined *= BigUint::from(d / j).pow(e as u32);
        }
    }
    (refined, crude)
}

/// The problems whose planes meet each other: `(1,3,(3))` and `(r,2r+2,(2,2))`.
pub fn is_enriched(t: &FanoType) -> bool {
    (t.r == 1 && t.n == 3 && t.degrees == [3]) || (t.n == 2 * t.r + 2 && t.degrees == [2, 2])
}

/// A Fano type together with its degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoProblem {
    pub fano_type: FanoType,
    #[serde(with = "crate::io::decimal")]
    pub degree: BigUint,
}

impl FanoProblem {
    pub fn new(fano_type: FanoType) -> Result<Self> {
        let degree = fano_degree(&fano_type)?;
        Ok(Self { fano_type, degree })
    }

    pub fn is_enriched(&self) -> bool {
        is_enriched(&self.fano_type)
    }
}
