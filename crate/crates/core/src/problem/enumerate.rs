use num_bigint::BigUint;
use rayon::prelude::*;

use super::residue::{degree_residue, RESIDUE_MODULUS};
use super::{binomial, degree_lower_bound, fano_degree, FanoProblem, FanoType};

/// Multisets `d_1 ≤ ... ≤ d_s` (each ≥ 2) with `Π d_i^{k} < cap`.
fn degree_tuples(k: u32, cap: u64) -> Vec<Vec<u32>> {
    fn rec(min: u32, prod: u128, k: u32, cap: u128, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        let mut d = min;
        loop {
            let next = prod * (d as u128).pow(k);
            if next >= cap {
                break;
            }
            cur.push(d);
            rec(d, next, k, cap, cur, out);
            cur.pop();
            d += 1;
        }
    }
    let mut out = Vec::new();
    rec(2, 1, k, cap as u128, &mut Vec::new(), &mut out);
    out
}

/// Candidate types whose crude and refined bounds are below `cap`; `n` is
/// solved from δ = 0.
fn candidates(cap: u64) -> Vec<FanoType> {
    let mut out = Vec::new();
    let mut k = 2u32;
    // the smallest crude bound for r+1 = k is 2^k
    while k < 128 && (1u128 << k) < cap as u128 {
        let r = k - 1;
        for ds in degree_tuples(k, cap) {
            let total: u128 = ds.iter().map(|&d| binomial(d + r, r)).sum();
            if !total.is_multiple_of(k as u128) {
                continue;
            }
            let n = r as u128 + total / k as u128;
            let Ok(n) = u32::try_from(n) else { continue };
            let Ok(t) = FanoType::new(r, n, ds) else { continue };
            if degree_lower_bound(&t).0 < BigUint::from(cap) {
                out.push(t);
            }
        }
        k += 1;
    }
    out
}

/// Whether the degree can be below `cap`, judged from its residue: a degree
/// below the cap (and the modulus) equals its residue and is a multiple of
/// the refined bound. `true` means "compute exactly".
fn may_be_below(t: &FanoType, cap: u64) -> bool {
    if cap >= RESIDUE_MODULUS {
        return true;
    }
    let (refined, _) = degree_lower_bound(t);
    let res = degree_residue(t).expect("candidate has δ = 0");
    res < cap && BigUint::from(res) % refined == BigUint::from(0u32)
}

/// Every Fano problem with degree below `degree_cap`, sorted by
/// `(degree, r, n, d•)`.
pub fn enumerate_fano_problems(degree_cap: u64) -> Vec<FanoProblem> {
    let cap = BigUint::from(degree_cap);
    let mut found: Vec<FanoProblem> = candidates(degree_cap)
        .into_par_iter()
        .filter(|t| may_be_below(t, degree_cap))
        .filter_map(|t| {
            let degree = fano_degree(&t).expect("candidate has δ = 0");
            (degree < cap).then_some(FanoProblem { fano_type: t, degree })
        })
        .collect();
    found.sort_by(|a, b| {
        (&a.degree, a.fano_type.r(), a.fano_type.n(), a.fano_type.degrees()).cmp(&(
            &b.degree,
            b.fano_type.r(),
            b.fano_type.n(),
            b.fano_type.degrees(),
        ))
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ps: &[FanoProblem]) -> Vec<String> {
        ps.iter().map(|p| format!("{} {}", p.fano_type, p.degree)).collect()
    }

    #[test]
    fn small_caps() {
        assert!(enumerate_fano_problems(16).is_empty());
        assert!(enumerate_fano_problems(1).is_empty());
        assert_eq!(names(&enumerate_fano_problems(17)), ["(1,4,(2,2)) 16"]);
        assert_eq!(names(&enumerate_fano_problems(30)), ["(1,4,(2,2)) 16", "(1,3,(3)) 27"]);
    }

    #[test]
    fn table_one_cap() {
        let table_one = [
            "(1,4,(2,2)) 16",
            "(1,3,(3)) 27",
            "(2,6,(2,2)) 64",
            "(3,8,(2,2)) 256",
            "(1,7,(2,2,2,2)) 512",
            "(1,6,(2,2,3)) 720",
            "(2,8,(2,2,2)) 1024",
            "(4,10,(2,2)) 1024",
        ];
        assert_eq!(names(&enumerate_fano_problems(1025)), table_one);
        // lines on two cubics in P^5 (degree 1053) come right after Table 1
        let mut with_next = table_one.to_vec();
        with_next.push("(1,5,(3,3)) 1053");
        assert_eq!(names(&enumerate_fano_problems(1100)), with_next);
    }

    #[test]
    fn candidate_space_is_exhaustive_for_small_caps() {
        // brute force over a box that certainly contains every crude-bounded type
        let cap = 1100u64;
        let mut brute = Vec::new();
        for r in 1..=10u32 {
            for n in 2 * r + 1..=60 {
                for ds in degree_tuples(r + 1, cap) {
                    if let Ok(t) = FanoType::new(r, n, ds) {
                        if super::super::delta(&t) == 0 {
                            let d = fano_degree(&t).unwrap();
                            if d < BigUint::from(cap) {
                                brute.push(t);
                            }
                        }
                    }
                }
            }
        }
        let mut got: Vec<FanoType> =
            enumerate_fano_problems(cap).into_iter().map(|p| p.fano_type).collect();
        brute.sort();
        got.sort();
        assert_eq!(brute, got);
    }
}
