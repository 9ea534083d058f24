use nalgebra::DMatrix;

use super::interval::{ComplexBox, ComplexInterval};
use crate::exact::SparsePoly;
use crate::system::SquareSystem;
use crate::tracker::{FloatSystem, C64};

#[derive(Clone, Debug)]
struct IntervalPoly {
    terms: Vec<(ComplexInterval, Vec<(usize, u32)>)>,
}

impl IntervalPoly {
    fn new(p: &SparsePoly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let exps = m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                (ComplexInterval::enclosing(c), exps)
            })
            .collect();
        Self { terms }
    }

    fn eval(&self, pows: &[Vec<ComplexInterval>]) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for (c, exps) in &self.terms {
            let mut t = *c;
            for &(i, e) in exps {
                t = t.mul(&pows[i][e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// Interval extension of a square system and its Jacobian, with every
/// exact coefficient replaced by its tightest float enclosure.
#[derive(Clone, Debug)]
pub struct IntervalSystem {
    num_vars: usize,
    max_deg: u32,
    eqs: Vec<IntervalPoly>,
    jac: Vec<Vec<IntervalPoly>>,
}

impl IntervalSystem {
    pub fn new(g: &SquareSystem) -> Self {
        let eqs = g.polys().iter().map(IntervalPoly::new).collect();
        let jac = g
            .jacobian_polys()
            .iter()
            .map(|row| row.iter().map(IntervalPoly::new).collect())
            .collect();
        let max_deg = g.degrees().into_iter().max().unwrap_or(0);
        Self { num_vars: g.num_vars(), max_deg, eqs, jac }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn powers(&self, b: &ComplexBox) -> Vec<Vec<ComplexInterval>> {
        b.coords()
            .iter()
            .map(|xi| {
                let mut p = Vec::with_capacity(self.max_deg as usize + 1);
                p.push(ComplexInterval::point(C64::new(1.0, 0.0)));
                for k in 1..=self.max_deg as usize {
                    p.push(p[k - 1].mul(xi));
                }
                p
            })
            .collect()
    }

    /// Enclosure of `G(B)`.
    pub fn eval(&self, b: &ComplexBox) -> Vec<ComplexInterval> {
        assert_eq!(b.dim(), self.num_vars, "box dimension");
        let pows = self.powers(b);
        self.eqs.iter().map(|e| e.eval(&pows)).collect()
    }

    /// Enclosure of `DG(B)`, row-major.
    pub fn jacobian(&self, b: &ComplexBox) -> Vec<Vec<ComplexInterval>> {
        assert_eq!(b.dim(), self.num_vars, "box dimension");
        let pows = self.powers(b);
        self.jac.iter().map(|row| row.iter().map(|p| p.eval(&pows)).collect()).collect()
    }
}

/// Interval enclosure of a single polynomial over a box.
pub fn eval_poly_interval(p: &SparsePoly, b: &ComplexBox) -> ComplexInterval {
    assert_eq!(b.dim(), p.num_vars(), "box dimension");
    let max_deg = p.degree().unwrap_or(0) as usize;
    let pows: Vec<Vec<ComplexInterval>> = b
        .coords()
        .iter()
        .map(|xi| {
            let mut v = vec![ComplexInterval::point(C64::new(1.0, 0.0))];
            for k in 1..=max_deg {
                v.push(v[k - 1].mul(xi));
            }
            v
        })
        .collect();
    IntervalPoly::new(p).eval(&pows)
}

/// `K(I) = x − Y·G(x) + (Id − Y·DG(I))·(I − x)` in outward-rounded interval
/// arithmetic; `x` and `Y` enter as degenerate intervals.
pub fn krawczyk(g: &IntervalSystem, x: &[C64], y: &DMatrix<C64>, i: &ComplexBox) -> ComplexBox {
    let m = g.num_vars();
    assert!(x.len() == m && y.nrows() == m && y.ncols() == m && i.dim() == m, "krawczyk dimensions");
    let yi = |r: usize, c: usize| ComplexInterval::point(y[(r, c)]);
    let gx = g.eval(&ComplexBox::point(x));
    let dg = g.jacobian(i);
    let d: Vec<ComplexInterval> =
        i.coords().iter().zip(x).map(|(c, &xk)| c.sub(&ComplexInterval::point(xk))).collect();
    let one = ComplexInterval::point(C64::new(1.0, 0.0));
    let out = (0..m)
        .map(|r| {
            let mut acc = ComplexInterval::point(x[r]);
            for (j, gj) in gx.iter().enumerate() {
                acc = acc.sub(&yi(r, j).mul(gj));
            }
            for (k, dk) in d.iter().enumerate() {
                let mut mrk = if r == k { one } else { ComplexInterval::zero() };
                for (j, row) in dg.iter().enumerate() {
                    mrk = mrk.sub(&yi(r, j).mul(&row[k]));
                }
                acc = acc.add(&mrk.mul(dk));
            }
            acc
        })
        .collect();
    ComplexBox(out)
}

/// Checks `K(I) ⊂ int(I)` with `x` the midpoint of `I` and `Y` the float
/// inverse of the Jacobian there. Deterministic in the bits of `I`, so a
/// stored box re-verifies identically.
pub fn krawczyk_contracts(g: &IntervalSystem, f: &FloatSystem, i: &ComplexBox) -> bool {
    if i.dim() != g.num_vars() {
        return false;
    }
    let x = i.midpoint();
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return false;
    }
    let Some(y) = f.jacobian(&x).try_inverse() else {
        return false;
    };
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return false;
    }
    krawczyk(g, &x, &y, i).interior_of(i)
}

/// Inflation schedule: starting radius floor, growth factor, retries.
const MIN_RADIUS: f64 = 1e-12;
const GROWTH: f64 = 8.0;
const RETRIES: usize = 5;

/// Certifies that a box around `x` contains a zero of `G` (Rump's theorem).
/// `None` means "could not certify", never "no zero".
pub fn rump_certify(g: &IntervalSystem, f: &FloatSystem, x: &[C64]) -> Option<ComplexBox> {
    if x.len() != g.num_vars() || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let (gx, jx) = f.eval_with_jacobian(x);
    let y = jx.try_inverse()?;
    let step = (y * gx).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if !step.is_finite() {
        return None;
    }
    let mut radius = MIN_RADIUS.max(8.0 * step);
    for _ in 0..=RETRIES {
        let b = ComplexBox::around(x, radius);
        if krawczyk_contracts(g, f, &b) {
            return Some(b);
        }
        radius *= GROWTH;
    }
    None
}
