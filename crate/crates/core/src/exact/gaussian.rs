use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::Rational;
use crate::error::FanoError;

/// An element `re + im*i` of the Gaussian rationals Q(i).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(Rational::from_integer(BigInt::from(v)), Rational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(num.into(), den.into()), Rational::zero())
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            Rational::new(re_num.into(), re_den.into()),
            Rational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Rough size of the representation in bits; used to pick elimination pivots.
    pub fn height(&self) -> u64 {
        self.re.numer().bits()
            + self.re.denom().bits()
            + self.im.numer().bits()
            + self.im.denom().bits()
    }

    /// Nearest double-precision approximation of each part.
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Canonical text form `a/b+c/d*i`; unit denominators are omitted.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.re, f)?;
        write!(f, "+")?;
        fmt_rational(&self.im, f)?;
        write!(f, "*i")
    }
}

fn parse_rational(s: &str) -> Result<Rational, FanoError> {
    let s = s.trim();
    let bad = || FanoError::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for GaussianRational {
    type Err = FanoError;

    /// Accepts the canonical `a/b+c/d*i` form as well as a bare rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix("*i") {
            // rationals never contain '+', so the last one separates the parts
            let cut = body
                .rfind('+')
                .filter(|&p| p > 0)
                .ok_or_else(|| FanoError::Parse(format!("bad gaussian rational `{s}`")))?;
            Ok(Self::new(
                parse_rational(&body[..cut])?,
                parse_rational(&body[cut + 1..])?,
            ))
        } else {
            Ok(Self::new(parse_rational(s)?, Rational::zero()))
        }
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::new(&self.re * &o.re, Rational::zero());
        }
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["3/2+-1/4*i", "0+0*i", "-7+1*i", "5/3+0*i"] {
            let g: GaussianRational = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        let g: GaussianRational = "-3/6".parse().unwrap();
        assert_eq!(g, GaussianRational::from_ratio(-1, 2));
    }

    #[test]
    fn inverse_of_i() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i.inv().unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn rejects_garbage() {
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("abc*i".parse::<GaussianRational>().is_err());
    }
}
