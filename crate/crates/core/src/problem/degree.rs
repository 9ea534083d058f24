use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::FanoType;
use crate::error::{FanoError, Result};
use crate::exact::{GaussianRational, Monomial, SparsePoly};

/// Tuples `(a_0..a_{k-1})` of non-negative integers summing to `d`, in
/// descending lexicographic order.
pub fn compositions(d: u32, k: usize) -> Vec<Vec<u32>> {
    Monomial::all_of_degree(k, d).into_iter().map(|m| m.0).collect()
}

/// `Q_{r,d}(x) = Π_{|a| = d} (a_0 x_0 + ... + a_r x_r)` in `r+1` variables.
pub fn q_poly(r: u32, d: u32) -> SparsePoly {
    let k = r as usize + 1;
    compositions(d, k).iter().fold(SparsePoly::one(k), |acc, a| {
        let coeffs: Vec<GaussianRational> =
            a.iter().map(|&c| GaussianRational::from_int(c as i64)).collect();
        acc.mul(&SparsePoly::linear(&coeffs)).expect("same ring")
    })
}

/// `V(x) = Π_{i<j} (x_i − x_j)` in `r+1` variables.
pub fn vandermonde(r: u32) -> SparsePoly {
    let k = r as usize + 1;
    let mut acc = SparsePoly::one(k);
    for i in 0..k {
        for j in i + 1..k {
            let diff = SparsePoly::var(k, i).sub(&SparsePoly::var(k, j)).expect("same ring");
            acc = acc.mul(&diff).expect("same ring");
        }
    }
    acc
}

/// The linear factors of `Q_{r,d•}·V` as small integer coefficient vectors.
pub(crate) fn linear_factors(t: &FanoType) -> Vec<Vec<i64>> {
    let k = t.r() as usize + 1;
    let mut out: Vec<Vec<i64>> = Vec::new();
    for &d in t.degrees() {
        out.extend(compositions(d, k).into_iter().map(|a| a.into_iter().map(i64::from).collect()));
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut v = vec![0; k];
            v[i] = 1;
            v[j] = -1;
            out.push(v);
        }
    }
    out
}

/// Coefficient of `x_0^n x_1^{n-1} ... x_r^{n-r}` in `Q_{r,d•}(x)·V(x)`.
///
/// The product is never expanded: factors are multiplied one at a time and
/// only exponent vectors that can still reach the target are kept.
pub fn fano_degree(t: &FanoType) -> Result<BigUint> {
    t.require_fano()?;
    let k = t.r() as usize + 1;
    let target: Vec<u32> = (0..k as u32).map(|i| t.n() - i).collect();
    let mut factors = linear_factors(t);
    // eliminate variables in order: once the last factor touching x_i is
    // consumed, the exponent of x_i is frozen and states collapse
    factors.sort_by_key(|f| f.iter().position(|&c| c != 0));
    let m = factors.len();
    let mut remaining = vec![vec![0u32; k]; m + 1];
    for s in (0..m).rev() {
        for i in 0..k {
            remaining[s][i] = remaining[s + 1][i] + u32::from(factors[s][i] != 0);
        }
    }
    let mut states: HashMap<Vec<u16>, BigInt> = HashMap::new();
    states.insert(vec![0; k], BigInt::one());
    for (s, f) in factors.iter().enumerate() {
        let rem = &remaining[s + 1];
        let mut next: HashMap<Vec<u16>, BigInt> = HashMap::with_capacity(states.len() * 2);
        for (e, c) in &states {
            for (i, &a) in f.iter().enumerate() {
                if a == 0 || e[i] as u32 >= target[i] {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] += 1;
                if (0..k).any(|j| target[j] - e2[j] as u32 > rem[j]) {
                    continue;
                }
                *next.entry(e2).or_insert_with(BigInt::zero) += c * a;
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }
    let key: Vec<u16> = target.iter().map(|&x| x as u16).collect();
    let coeff = states.remove(&key).unwrap_or_default();
    if coeff.is_negative() {
        return Err(FanoError::Numerical(format!("negative degree {coeff} for {t}")));
    }
    Ok(coeff.magnitude().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::binomial;

    fn ty(r: u32, n: u32, d: &[u32]) -> FanoType {
        FanoType::new(r, n, d.to_vec()).unwrap()
    }

    fn deg(r: u32, n: u32, d: &[u32]) -> u64 {
        fano_degree(&ty(r, n, d)).unwrap().try_into().unwrap()
    }

    #[test]
    fn q_poly_examples() {
        assert_eq!(q_poly(1, 2).to_string(), "(4+0*i)*x0^2*x1 + (4+0*i)*x0*x1^2");
        assert_eq!(q_poly(0, 5).to_string(), "(5+0*i)*x0");
        assert_eq!(q_poly(1, 1).to_string(), "(1+0*i)*x0*x1");
        for (r, d) in [(1, 3), (2, 2), (2, 3), (3, 2)] {
            let q = q_poly(r, d);
            assert!(q.is_homogeneous_of(binomial(d + r, r) as u32));
            assert!(q.terms().all(|(_, c)| c.is_real() && c.re.is_integer() && !c.re.is_negative()));
        }
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(0), SparsePoly::one(1));
        assert_eq!(vandermonde(1).to_string(), "(1+0*i)*x0 + (-1+0*i)*x1");
        assert_eq!(vandermonde(2).degree(), Some(3));
    }

    #[test]
    fn vandermonde_alternates() {
        for r in 1..=3u32 {
            let k = r as usize + 1;
            let v = vandermonde(r);
            for i in 0..k {
                for j in i + 1..k {
                    let mut images: Vec<SparsePoly> = (0..k).map(|a| SparsePoly::var(k, a)).collect();
                    images.swap(i, j);
                    let swapped = v.substitute_linear(&images).unwrap();
                    assert_eq!(swapped, v.scale(&GaussianRational::from_int(-1)));
                }
            }
        }
    }

    #[test]
    fn table_one() {
        assert_eq!(deg(1, 4, &[2, 2]), 16);
        assert_eq!(deg(1, 3, &[3]), 27);
        assert_eq!(deg(2, 6, &[2, 2]), 64);
        assert_eq!(deg(3, 8, &[2, 2]), 256);
        assert_eq!(deg(1, 7, &[2, 2, 2, 2]), 512);
        assert_eq!(deg(1, 6, &[2, 2, 3]), 720);
        assert_eq!(deg(2, 8, &[2, 2, 2]), 1024);
        assert_eq!(deg(4, 10, &[2, 2]), 1024);
    }

    #[test]
    fn rejects_positive_dimension() {
        assert!(matches!(fano_degree(&ty(1, 4, &[3])), Err(FanoError::NotAFanoProblem(2))));
    }

    #[test]
    fn matches_full_expansion() {
        // oracle: expand Q·V completely and read the coefficient
        for t in [ty(1, 4, &[2, 2]), ty(1, 3, &[3]), ty(2, 6, &[2, 2]), ty(1, 6, &[2, 2, 3])] {
            let mut p = vandermonde(t.r());
            for &d in t.degrees() {
                p = p.mul(&q_poly(t.r(), d)).unwrap();
            }
            let mono = Monomial((0..=t.r()).map(|i| t.n() - i).collect());
            let c = p.coefficient_of(&mono).unwrap();
            let want = crate::exact::Rational::from_integer(BigInt::from(fano_degree(&t).unwrap()));
            assert_eq!(c, GaussianRational::from(want), "{t}");
        }
    }
}
