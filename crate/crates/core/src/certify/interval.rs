//! Outward-rounded interval arithmetic over binary64.
//!
//! Hardware rounding modes are not touched. Each operation instead computes
//! the round-to-nearest result together with its exact error term (TwoSum
//! for additions, FMA for products) and steps one ulp outward when the
//! error points that way. Near the underflow range the FMA error term is not
//! exact any more, so tiny products are always widened by one ulp.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact::{GaussianRational, Rational};
use crate::io::hex;

/// Below this magnitude the FMA error term of a product may be inexact.
const TINY: f64 = 1e-290;

/// Rounded-to-nearest value `v` with `exact = v + err`; returns (down, up).
fn bracket(v: f64, err: f64) -> (f64, f64) {
    if !v.is_finite() || err.is_nan() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    match err.partial_cmp(&0.0) {
        Some(Ordering::Greater) => (v, v.next_up()),
        Some(Ordering::Less) => (v.next_down(), v),
        _ => (v, v),
    }
}

fn add_bounds(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    bracket(s, err)
}

fn mul_bounds(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 || b == 0.0 {
        return if (a * b).is_nan() { (f64::NEG_INFINITY, f64::INFINITY) } else { (0.0, 0.0) };
    }
    let p = a * b;
    if p.abs() < TINY {
        return (p.next_down(), p.next_up());
    }
    let err = a.mul_add(b, -p);
    bracket(p, err)
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    /// Panics unless `lo ≤ hi` (NaN bounds included).
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("interval bounds out of order")
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn entire() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    /// Smallest float interval containing an exact rational.
    pub fn enclosing(q: &Rational) -> Self {
        let f = q.to_f64().unwrap_or(f64::NAN);
        if !f.is_finite() {
            return Self::entire();
        }
        let (mut lo, mut hi) = (f, f);
        while Rational::from_float(lo).is_some_and(|l| &l > q) {
            lo = lo.next_down();
        }
        while Rational::from_float(hi).is_some_and(|h| &h < q) {
            hi = hi.next_up();
        }
        Self { lo, hi }
    }

    /// `[x − r, x + r]`, rounded outward.
    pub fn around(x: f64, r: f64) -> Self {
        let r = r.abs();
        Self { lo: add_bounds(x, -r).0, hi: add_bounds(x, r).1 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return if self.lo.is_finite() || self.hi.is_finite() { f64::NAN } else { 0.0 };
        }
        self.lo / 2.0 + self.hi / 2.0
    }

    /// Upper bound on `hi − lo`.
    pub fn width(&self) -> f64 {
        add_bounds(self.hi, -self.lo).1
    }

    /// Upper bound on `max |t|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Exact containment test for a rational (no float conversion of `q`).
    pub fn contains_rational(&self, q: &Rational) -> bool {
        let below = Rational::from_float(self.lo).is_none_or(|l| &l <= q);
        let above = Rational::from_float(self.hi).is_none_or(|h| q <= &h);
        below && above
    }

    pub fn subset_of(&self, other: &RealInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊂ int(other)`: both endpoints strictly inside.
    pub fn interior_of(&self, other: &RealInterval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersects(&self, other: &RealInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn add(&self, o: &RealInterval) -> RealInterval {
        Self::checked(add_bounds(self.lo, o.lo).0, add_bounds(self.hi, o.hi).1)
    }

    pub fn sub(&self, o: &RealInterval) -> RealInterval {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RealInterval {
        Self { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &RealInterval) -> RealInterval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in [self.lo, self.hi] {
            for b in [o.lo, o.hi] {
                let (d, u) = mul_bounds(a, b);
                lo = lo.min(d);
                hi = hi.max(u);
            }
        }
        Self::checked(lo, hi)
    }

    fn checked(lo: f64, hi: f64) -> RealInterval {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            Self::entire()
        } else {
            Self { lo, hi }
        }
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Serialize for RealInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [hex::Hex(self.lo), hex::Hex(self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[hex::Hex; 2]>::deserialize(d)?;
        Self::try_new(lo.0, hi.0).ok_or_else(|| serde::de::Error::custom("interval bounds out of order"))
    }
}

/// A rectangle `re + i·im` in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexInterval {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexInterval {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        Self { re, im }
    }

    pub fn point(z: num_complex::Complex64) -> Self {
        Self::new(RealInterval::point(z.re), RealInterval::point(z.im))
    }

    pub fn zero() -> Self {
        Self::new(RealInterval::zero(), RealInterval::zero())
    }

    pub fn enclosing(q: &GaussianRational) -> Self {
        Self::new(RealInterval::enclosing(&q.re), RealInterval::enclosing(&q.im))
    }

    pub fn mid(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.mid(), self.im.mid())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        // real-only operands are common (real coefficients); skip the zero products
        if o.im == RealInterval::zero() {
            return Self::new(self.re.mul(&o.re), self.im.mul(&o.re));
        }
        if self.im == RealInterval::zero() {
            return Self::new(self.re.mul(&o.re), self.re.mul(&o.im));
        }
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn contains_exact(&self, q: &GaussianRational) -> bool {
        self.re.contains_rational(&q.re) && self.im.contains_rational(&q.im)
    }

    pub fn subset_of(&self, o: &Self) -> bool {
        self.re.subset_of(&o.re) && self.im.subset_of(&o.im)
    }

    pub fn interior_of(&self, o: &Self) -> bool {
        self.re.interior_of(&o.re) && self.im.interior_of(&o.im)
    }

    pub fn intersects(&self, o: &Self) -> bool {
        self.re.intersects(&o.re) && self.im.intersects(&o.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re == RealInterval::zero() && self.im == RealInterval::zero()
    }
}

/// A product of complex intervals, one per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexBox(pub Vec<ComplexInterval>);

impl ComplexBox {
    pub fn point(x: &[num_complex::Complex64]) -> Self {
        Self(x.iter().map(|&z| ComplexInterval::point(z)).collect())
    }

    /// The box `x ± r(1 + i)` in every coordinate.
    pub fn around(x: &[num_complex::Complex64], r: f64) -> Self {
        Self(
            x.iter()
                .map(|z| ComplexInterval::new(RealInterval::around(z.re, r), RealInterval::around(z.im, r)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[ComplexInterval] {
        &self.0
    }

    pub fn midpoint(&self) -> Vec<num_complex::Complex64> {
        self.0.iter().map(|c| c.mid()).collect()
    }

    /// Largest real or imaginary side length.
    pub fn max_width(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.re.width()).max(c.im.width()))
    }

    pub fn contains(&self, x: &[num_complex::Complex64]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(c, &z)| c.contains(z))
    }

    pub fn contains_exact(&self, x: &[GaussianRational]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(c, q)| c.contains_exact(q))
    }

    pub fn subset_of(&self, o: &Self) -> bool {
        self.dim() == o.dim() && self.0.iter().zip(&o.0).all(|(a, b)| a.subset_of(b))
    }

    pub fn interior_of(&self, o: &Self) -> bool {
        self.dim() == o.dim() && self.0.iter().zip(&o.0).all(|(a, b)| a.interior_of(b))
    }

    pub fn intersects(&self, o: &Self) -> bool {
        self.dim() == o.dim() && self.0.iter().zip(&o.0).all(|(a, b)| a.intersects(b))
    }

    pub fn intersection(&self, o: &Self) -> Option<Self> {
        if !self.intersects(o) {
            return None;
        }
        let meet = |a: &RealInterval, b: &RealInterval| RealInterval::new(a.lo.max(b.lo), a.hi.min(b.hi));
        Some(Self(
            self.0
                .iter()
                .zip(&o.0)
                .map(|(a, b)| ComplexInterval::new(meet(&a.re, &b.re), meet(&a.im, &b.im)))
                .collect(),
        ))
    }
}
