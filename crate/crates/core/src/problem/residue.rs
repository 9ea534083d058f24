//! The degree modulo a large prime, via torus localization on the
//! Grassmannian. This is independent of the coefficient extraction and much
//! cheaper for large `n`; enumeration uses it to discard candidates whose
//! degree provably exceeds the cap.
//!
//! With weights `t_0..t_n`, the fixed points are coordinate planes `I` and
//!
//!   deg = (−1)^N Σ_{|I| = r+1} Π_a (a·t_I) / Π_{i∈I, j∉I} (t_j − t_i),
//!
//! `N = (r+1)(n−r)`, the numerator running over the linear factors of
//! `Q_{r,d•}`. Taking `t_j = q^j` with `q = −(d−1)` for a form degree
//! `d ≥ 3` kills every `I` holding two consecutive indices (the factor with
//! `a = (.., d−1, 1, ..)` vanishes), and every term depends on `I` only
//! through its gaps up to a power of `q^{min I}`.

use rayon::prelude::*;

use super::degree::linear_factors;
use super::FanoType;
use crate::error::Result;

/// The Mersenne prime 2^61 − 1.
pub const RESIDUE_MODULUS: u64 = (1 << 61) - 1;
const P: u64 = RESIDUE_MODULUS;

#[inline]
fn reduce(x: u128) -> u64 {
    let s = (x as u64 & P) + (x >> 61) as u64;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

#[inline]
fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn sub(a: u64, b: u64) -> u64 {
    add(a, P - b)
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn from_signed(v: i64) -> u64 {
    if v >= 0 {
        v as u64 % P
    } else {
        P - ((-v) as u64 % P)
    }
}

/// Whether `1, q, ..., q^n` are pairwise distinct mod P.
fn distinct_powers(q: u64, n: u32) -> bool {
    let mut x = 1;
    for _ in 0..n {
        x = mul(x, q);
        if x == 1 || x == 0 {
            return false;
        }
    }
    true
}

/// `fano_degree(t) mod 2^61 − 1`.
pub fn degree_residue(t: &FanoType) -> Result<u64> {
    t.require_fano()?;
    let k = t.r() as usize + 1;
    let n = t.n();
    let (q, min_gap) = t
        .degrees()
        .iter()
        .rev()
        .filter(|&&d| d >= 3)
        .map(|&d| from_signed(-(d as i64 - 1)))
        .find(|&q| distinct_powers(q, n))
        .map(|q| (q, 2))
        .unwrap_or_else(|| ((3..).find(|&q| distinct_powers(q, n)).unwrap(), 1));

    let factors: Vec<Vec<(usize, u64)>> = linear_factors(t)
        .into_iter()
        .take(t.equation_count() as usize)
        .map(|f| f.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c as u64)).collect())
        .collect();
    let tw: Vec<u64> = (0..=n as u64).map(|j| pow(q, j)).collect();
    let w_inv: Vec<u64> = (0..tw.len())
        .map(|i| {
            let w = (0..tw.len()).filter(|&j| j != i).fold(1, |acc, j| mul(acc, sub(tw[j], tw[i])));
            inv(w)
        })
        .collect();
    // shifting I by m scales the numerator by q^{mN} and the in-plane
    // Vandermonde by q^{m k(k-1)}
    let shift_base = pow(q, factors.len() as u64 + (k * (k - 1)) as u64);

    let term = |gaps: &[u32]| -> u64 {
        let idx: Vec<usize> = gaps.iter().map(|&g| g as usize).collect();
        let ti: Vec<u64> = idx.iter().map(|&i| tw[i]).collect();
        let mut num = 1;
        for f in &factors {
            let v = f.iter().fold(0, |acc, &(i, c)| add(acc, mul(c, ti[i])));
            num = mul(num, v);
            if num == 0 {
                return 0;
            }
        }
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    num = mul(num, sub(ti[b], ti[a]));
                }
            }
        }
        let last = idx[k - 1];
        let mut shifted = 0;
        let mut scale = 1;
        for m in 0..=(n as usize - last) {
            let den = idx.iter().fold(1, |acc, &i| mul(acc, w_inv[i + m]));
            shifted = add(shifted, mul(scale, den));
            scale = mul(scale, shift_base);
        }
        mul(num, shifted)
    };

    // subsets with minimum 0; parallelize over the second element
    fn walk(cur: &mut Vec<u32>, k: usize, n: u32, gap: u32, acc: &mut u64, term: &dyn Fn(&[u32]) -> u64) {
        if cur.len() == k {
            *acc = add(*acc, term(cur));
            return;
        }
        let left = (k - cur.len() - 1) as u32;
        let mut next = cur.last().map_or(0, |&l| l + gap);
        while next + left * gap <= n {
            cur.push(next);
            walk(cur, k, n, gap, acc, term);
            cur.pop();
            next += 1;
        }
    }
    // k = r + 1 ≥ 2, so every subset has a second element
    let last_second = n - (k as u32 - 2) * min_gap;
    let total = (min_gap..=last_second)
        .into_par_iter()
        .map(|second| {
            let mut acc = 0;
            walk(&mut vec![0, second], k, n, min_gap, &mut acc, &term);
            acc
        })
        .reduce(|| 0, add);
    let sign_flip = factors.len() % 2 == 1;
    Ok(if sign_flip { sub(0, total) } else { total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::fano_degree;

    fn check(r: u32, n: u32, d: &[u32]) {
        let t = FanoType::new(r, n, d.to_vec()).unwrap();
        let exact = fano_degree(&t).unwrap() % num_bigint::BigUint::from(P);
        assert_eq!(num_bigint::BigUint::from(degree_residue(&t).unwrap()), exact, "{t}");
    }

    #[test]
    fn agrees_with_coefficient_extraction() {
        check(1, 4, &[2, 2]);
        check(1, 3, &[3]);
        check(2, 6, &[2, 2]);
        check(1, 6, &[2, 2, 3]);
        check(1, 5, &[2, 4]);
        check(1, 7, &[2, 3, 4]);
        check(2, 8, &[2, 2, 2]);
        check(1, 10, &[2, 2, 2, 2, 2, 2]);
        check(2, 7, &[4]);
        check(3, 8, &[3]);
        check(1, 5, &[7]);
    }
}
