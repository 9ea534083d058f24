use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::GaussianRational;
use crate::error::{check_dim, FanoError, Result};

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All exponent vectors in `num_vars` variables of total degree `d`,
    /// descending in graded-lex order (x0^d first).
    pub fn all_of_degree(num_vars: usize, d: u32) -> Vec<Monomial> {
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        if num_vars == 0 {
            return if d == 0 { vec![Monomial(vec![])] } else { vec![] };
        }
        let mut out = Vec::new();
        rec(0, d, &mut vec![0; num_vars], &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with Gaussian-rational coefficients over a fixed
/// number of variables `x0..x{n-1}`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl SparsePoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::one(num_vars), c);
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, GaussianRational::one())
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::var(num_vars, i), GaussianRational::one());
        p
    }

    /// The linear form `sum_i coeffs[i] * x_i`.
    pub fn linear(coeffs: &[GaussianRational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(num_vars);
        for (m, c) in terms {
            check_dim(num_vars, m.num_vars())?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        debug_assert_eq!(m.num_vars(), self.num_vars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Result<GaussianRational> {
        check_dim(self.num_vars, m.num_vars())?;
        Ok(self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero))
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_dim(self.num_vars, other.num_vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_dim(self.num_vars, other.num_vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &GaussianRational) -> SparsePoly {
        if k.is_zero() {
            return SparsePoly::zero(self.num_vars);
        }
        SparsePoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        check_dim(self.num_vars, other.num_vars)?;
        let mut out = SparsePoly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.num_vars);
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// The same polynomial in a ring with `extra` more (trailing) variables.
    pub fn with_trailing_vars(&self, extra: usize) -> SparsePoly {
        SparsePoly {
            num_vars: self.num_vars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(self.num_vars + extra, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Partial derivative with respect to `x_var`.
    pub fn derivative(&self, var: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        check_dim(self.num_vars, point.len())?;
        let mut powers: Vec<Vec<GaussianRational>> = point
            .iter()
            .map(|x| vec![GaussianRational::one(), x.clone()])
            .collect();
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Composition `p(images[0], ..., images[n-1])`.
    pub fn substitute_linear(&self, images: &[SparsePoly]) -> Result<SparsePoly> {
        check_dim(self.num_vars, images.len())?;
        let target = images.first().map(|p| p.num_vars).unwrap_or(0);
        for img in images {
            check_dim(target, img.num_vars)?;
        }
        let mut cache: Vec<Vec<SparsePoly>> =
            images.iter().map(|p| vec![SparsePoly::one(target), p.clone()]).collect();
        let mut out = SparsePoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut cache[i];
                while pw.len() <= e as usize {
                    let next = pw[pw.len() - 1].mul(&pw[1])?;
                    pw.push(next);
                }
                t = t.mul(&pw[e as usize])?;
            }
            for (m2, c2) in t.terms {
                out.add_term(m2, c2);
            }
        }
        Ok(out)
    }

    /// Coefficient polynomials with respect to the trailing `k` variables:
    /// writes `self` as `sum_beta c_beta(x_0..x_{n-k-1}) * y^beta` and returns
    /// the map `beta -> c_beta` with `c_beta` in the leading `n-k` variables.
    pub fn split_trailing(&self, k: usize) -> BTreeMap<Monomial, SparsePoly> {
        let lead = self.num_vars - k;
        let mut out: BTreeMap<Monomial, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let head = Monomial(m.0[..lead].to_vec());
            let tail = Monomial(m.0[lead..].to_vec());
            out.entry(tail)
                .or_insert_with(|| SparsePoly::zero(lead))
                .add_term(head, c.clone());
        }
        out
    }
}

/// Canonical text: terms in descending graded-lex order, e.g.
/// `(1+0*i)*x0^2 + (-1+0*i)*x1^2`; the zero polynomial prints as `0`.
impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl SparsePoly {
    /// Parses the canonical text form in a ring with `num_vars` variables.
    pub fn parse(s: &str, num_vars: usize) -> Result<SparsePoly> {
        let bad = |why: &str| FanoError::Parse(format!("{why} in polynomial `{s}`"));
        let s = s.trim();
        let mut p = SparsePoly::zero(num_vars);
        if s == "0" {
            return Ok(p);
        }
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed `(`"))?;
            let coef = GaussianRational::from_str(&body[..close])?;
            let mut tail = &body[close + 1..];
            let mut exps = vec![0u32; num_vars];
            while let Some(t) = tail.strip_prefix("*x") {
                let end = t.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(t.len());
                let var: usize = t[..end].parse().map_err(|_| bad("bad variable"))?;
                if var >= num_vars {
                    return Err(bad("variable out of range"));
                }
                let mut t = &t[end..];
                let mut e = 1u32;
                if let Some(t2) = t.strip_prefix('^') {
                    let end = t2.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(t2.len());
                    e = t2[..end].parse().map_err(|_| bad("bad exponent"))?;
                    t = &t2[end..];
                }
                exps[var] += e;
                tail = t;
            }
            p.add_term(Monomial(exps), coef);
            let tail = tail.trim_start();
            if tail.is_empty() {
                break;
            }
            rest = tail.strip_prefix('+').ok_or_else(|| bad("expected `+`"))?;
        }
        Ok(p)
    }
}
