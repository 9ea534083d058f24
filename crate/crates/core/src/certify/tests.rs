use nalgebra::DMatrix;
use num_traits::Zero;

use super::*;
use crate::exact::{GaussianRational, Rational, SparsePoly};
use crate::forge::{constrained_form_system, default_plane, default_tangent, random_form_system};
use crate::problem::FanoType;
use crate::system::build_square_system;
use crate::tracker::{distinct_endpoints, solve_total_degree, TrackSettings};

fn sys(eqs: &[&str]) -> SquareSystem {
    SquareSystem::new(eqs.iter().map(|e| SparsePoly::parse(e, eqs.len()).unwrap()).collect()).unwrap()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn real_box(lo: f64, hi: f64) -> ComplexBox {
    ComplexBox(vec![ComplexInterval::new(RealInterval::new(lo, hi), RealInterval::zero())])
}

fn q(f: f64) -> Rational {
    Rational::from_float(f).unwrap()
}

#[test]
fn interval_basics() {
    let a = RealInterval::new(1.0, 2.0);
    let b = RealInterval::new(-3.0, 4.0);
    assert_eq!(a.mul(&b), RealInterval::new(-6.0, 8.0));
    assert_eq!(a.add(&b), RealInterval::new(-2.0, 6.0));
    assert_eq!(a.sub(&b), RealInterval::new(-3.0, 5.0));

    // 0.1 + 0.2 is inexact in binary: the exact sum sits strictly inside
    let s = RealInterval::point(0.1).add(&RealInterval::point(0.2));
    assert!(s.contains_rational(&(q(0.1) + q(0.2))));
    assert_eq!(s.hi(), s.lo().next_up());

    let third = Rational::new(1.into(), 3.into());
    let e = RealInterval::enclosing(&third);
    assert!(e.contains_rational(&third));
    assert_eq!(e.hi(), e.lo().next_up());
    assert_eq!(RealInterval::enclosing(&q(0.75)), RealInterval::point(0.75));

    let p = RealInterval::point(1e300).mul(&RealInterval::point(1e300));
    assert_eq!(p, RealInterval::entire());
    assert!(RealInterval::try_new(2.0, 1.0).is_none());
}

#[test]
fn interval_json_is_hex() {
    let b = ComplexBox::around(&[C64::new(1.5, -0.1)], 1e-3);
    let text = serde_json::to_string(&b).unwrap();
    assert!(text.contains("0x1.8"), "{text}");
    assert_eq!(serde_json::from_str::<ComplexBox>(&text).unwrap(), b);
    assert!(serde_json::from_str::<RealInterval>(r#"["0x1p+1","0x1p+0"]"#).is_err());
}

#[test]
fn krawczyk_on_unit_root() {
    let g = IntervalSystem::new(&sys(&["(1)*x0^2 + (-1)"]));
    let y = DMatrix::from_element(1, 1, c(0.5));
    let i = real_box(0.9, 1.1);
    let k = krawczyk(&g, &[c(1.0)], &y, &i);
    assert!(k.subset_of(&real_box(0.99 - 1e-15, 1.01 + 1e-15)), "{k:?}");
    assert!(k.coords()[0].re.interior_of(&i.coords()[0].re));
}

#[test]
fn krawczyk_is_exact_on_linear_systems() {
    let g = IntervalSystem::new(&sys(&["(1)*x0 + (-3/7)"]));
    let y = DMatrix::from_element(1, 1, c(1.0));
    let k = krawczyk(&g, &[c(5.0)], &y, &real_box(-10.0, 10.0));
    let re = k.coords()[0].re;
    assert!(re.contains_rational(&Rational::new(3.into(), 7.into())));
    assert!(re.width() < 1e-15);
}

#[test]
fn krawczyk_fixes_a_degenerate_box_at_an_exact_zero() {
    let g = IntervalSystem::new(&sys(&["(1)*x0^2 + (-4)"]));
    let y = DMatrix::from_element(1, 1, c(0.25));
    let k = krawczyk(&g, &[c(2.0)], &y, &real_box(2.0, 2.0));
    assert_eq!(k, real_box(2.0, 2.0));
}

#[test]
fn rump_encloses_sqrt_two() {
    let g = sys(&["(1)*x0^2 + (-2)"]);
    let (ig, fg) = (IntervalSystem::new(&g), FloatSystem::new(&g));
    let b = rump_certify(&ig, &fg, &[c(2f64.sqrt())]).unwrap();
    let re = b.coords()[0].re;
    let two = Rational::from_integer(2.into());
    assert!(q(re.lo()) * q(re.lo()) < two && two < q(re.hi()) * q(re.hi()));
    assert!(b.coords()[0].im.contains(0.0));
    assert!(b.max_width() < 1e-9);

    assert!(rump_certify(&ig, &fg, &[c(3.0)]).is_none());
    assert!(rump_certify(&ig, &fg, &[c(0.0)]).is_none());
}

#[test]
fn toy_double_zero_verdicts() {
    let origin = vec![GaussianRational::zero(); 2];
    let dz = is_simple_double_zero(&sys(&["(1)*x0^2 + (-1)*x1", "(1)*x1"]), &origin).unwrap().unwrap();
    assert!(dz.is_valid());
    assert!(dz.kernel_vector[1].is_zero() && !dz.kernel_vector[0].is_zero());

    let verdict = |eqs: &[&str], x: &[GaussianRational]| is_simple_double_zero(&sys(eqs), x).unwrap().unwrap_err();
    assert_eq!(verdict(&["(1)*x0", "(1)*x1"], &origin), Rejection::KernelDimZero);
    assert_eq!(verdict(&["(1)*x0^2", "(1)*x1^2"], &origin), Rejection::KernelDimHigh(2));
    assert_eq!(verdict(&["(1)*x0^3 + (-1)*x1", "(1)*x1"], &origin), Rejection::HessianInImage);
    let one = vec![GaussianRational::from_int(1); 2];
    assert_eq!(verdict(&["(1)*x0", "(1)*x1"], &one), Rejection::NotAZero);
}

#[test]
fn double_zero_recheck_rejects_tampering() {
    let g = sys(&["(1)*x0^2 + (-1)*x1", "(1)*x1"]);
    let mut dz = is_simple_double_zero(&g, &[GaussianRational::zero(), GaussianRational::zero()]).unwrap().unwrap();
    assert!(dz.recheck(&g).unwrap());
    // any nonzero multiple of the kernel vector is as good
    dz.kernel_vector = dz.kernel_vector.iter().map(|v| v * &GaussianRational::from_parts(-3, 2, 1, 5)).collect();
    assert!(dz.recheck(&g).unwrap());
    dz.kernel_vector = vec![GaussianRational::zero(), GaussianRational::from_int(1)];
    assert!(!dz.recheck(&g).unwrap());
}

fn forged(t: &FanoType, v: &[GaussianRational], seed: u64) -> SquareSystem {
    build_square_system(&constrained_form_system(t, &default_plane(t), v, seed).unwrap()).unwrap()
}

#[test]
fn forged_instances_have_a_simple_double_zero() {
    for spec in ["1,4,2:2", "1,3,3", "2,6,2:2"] {
        let t: FanoType = spec.parse().unwrap();
        let g = forged(&t, &default_tangent(&t), 1);
        let dz = is_simple_double_zero(&g, &default_plane(&t)).unwrap();
        assert!(dz.as_ref().is_ok_and(|d| d.is_valid()), "{spec}: {dz:?}");
    }
}

#[test]
fn rank_one_tangent_is_not_simple() {
    let t: FanoType = "1,4,2:2".parse().unwrap();
    let mut v = vec![GaussianRational::zero(); 6];
    v[0] = GaussianRational::from_int(1);
    let verdict = is_simple_double_zero(&forged(&t, &v, 1), &default_plane(&t)).unwrap();
    assert!(verdict.is_err(), "{verdict:?}");
}

#[test]
fn double_point_itself_is_never_certified() {
    let t: FanoType = "1,4,2:2".parse().unwrap();
    let g = forged(&t, &default_tangent(&t), 1);
    let (ig, fg) = (IntervalSystem::new(&g), FloatSystem::new(&g));
    assert!(rump_certify(&ig, &fg, &[c(0.0); 6]).is_none());
    assert!(rump_certify(&ig, &fg, &[c(1e-9); 6]).is_none());
}

fn generic_fiber(spec: &str, seed: u64) -> (SquareSystem, Vec<Vec<C64>>) {
    let t: FanoType = spec.parse().unwrap();
    let g = build_square_system(&random_form_system(&t, seed).unwrap()).unwrap();
    let res = solve_total_degree(&g, &TrackSettings::default(), seed).unwrap();
    (g, distinct_endpoints(&res, 1e-8))
}

#[test]
fn generic_quadric_pair_certifies_sixteen_lines() {
    let (g, sols) = generic_fiber("1,4,2:2", 2);
    let fiber = certify_fiber(&g, &sols, None, 16).unwrap();
    assert_eq!(fiber.boxes.len(), 16);
    let v = fiber.verify().unwrap();
    assert!(v.sound() && v.complete && v.double_point_valid.is_none());

    let text = serde_json::to_string(&fiber).unwrap();
    let back: CertifiedFiber = serde_json::from_str(&text).unwrap();
    assert_eq!(back, fiber);
    assert_eq!(back.verify().unwrap(), v);
}

#[test]
fn duplicate_candidates_overlap() {
    let (g, mut sols) = generic_fiber("1,4,2:2", 3);
    sols.push(sols[4].clone());
    assert!(matches!(certify_fiber(&g, &sols, None, 16), Err(CertifyError::OverlapDetected(..))));
}

#[test]
fn missing_candidates_are_a_count_mismatch() {
    let (g, sols) = generic_fiber("1,4,2:2", 4);
    match certify_fiber(&g, &sols[..10], None, 16) {
        Err(CertifyError::CountMismatch { found: 10, expected: 16, fiber }) => {
            assert!(fiber.verify().unwrap().sound());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn tampered_boxes_fail_verification() {
    let (g, sols) = generic_fiber("1,4,2:2", 5);
    let mut fiber = certify_fiber(&g, &sols, None, 16).unwrap();
    fiber.boxes[3] = ComplexBox::around(&fiber.boxes[3].midpoint(), 1e-30);
    fiber.boxes[7] = fiber.boxes[6].clone();
    let v = fiber.verify().unwrap();
    assert!(!v.boxes_contract && !v.disjoint && !v.sound());
}

#[test]
fn forged_fiber_excludes_the_double_point() {
    let t: FanoType = "1,4,2:2".parse().unwrap();
    let g = forged(&t, &default_tangent(&t), 1);
    let dz = is_simple_double_zero(&g, &default_plane(&t)).unwrap().unwrap();
    let res = solve_total_degree(&g, &TrackSettings::default(), 1).unwrap();
    let sols = distinct_endpoints(&res, 1e-8);
    // the enriched structure forces further double points: only the smooth
    // zeros certify, and the count falls short of 14
    let fiber = match certify_fiber(&g, &sols, Some(dz.clone()), 16) {
        Err(CertifyError::CountMismatch { fiber, .. }) => *fiber,
        other => panic!("{other:?}"),
    };
    assert_eq!(fiber.boxes.len(), 8);
    assert!(fiber.verify().unwrap().sound());

    // a box around x_ℓ itself is caught by the exact exclusion test
    let mut tampered = fiber.clone();
    tampered.boxes.push(ComplexBox::around(&vec![c(0.0); 6], 1e-3));
    assert!(!tampered.verify().unwrap().excludes_double_point);
}
