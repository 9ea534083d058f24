use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::tracker::track_parameter_path;

fn perm(images: &[usize]) -> Permutation {
    Permutation::new(images.to_vec()).unwrap()
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Closure of `gens` by breadth-first multiplication.
fn brute_force_order(n: usize, gens: &[Permutation]) -> usize {
    let mut seen: HashSet<Permutation> = HashSet::from([Permutation::identity(n)]);
    let mut frontier = vec![Permutation::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen.len()
}

#[test]
fn permutation_basics() {
    assert!(Permutation::new(vec![0, 0, 1]).is_err());
    assert!(Permutation::new(vec![0, 3, 1]).is_err());
    let p = perm(&[1, 2, 0, 4, 3]);
    assert_eq!(p.to_string(), "(0 1 2)(3 4)");
    assert_eq!(p.cycle_type(), vec![2, 3]);
    assert!(p.is_odd());
    assert!(p.then(&p.inverse()).is_identity());
    let q = perm(&[0, 2, 1, 3, 4]);
    // `then` applies the left factor first
    assert_eq!(p.then(&q).apply(0), q.apply(p.apply(0)));
    let text = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<Permutation>(&text).unwrap(), p);
    assert!(serde_json::from_str::<Permutation>(r#"{"images":[1,1]}"#).is_err());
}

#[test]
fn small_group_orders() {
    assert_eq!(group_order(5, &[]).unwrap().order, BigUint::from(1u32));
    assert_eq!(group_order(2, &[perm(&[1, 0])]).unwrap().order, BigUint::from(2u32));
    for n in 2..=6 {
        let gens = [Permutation::long_cycle(n), Permutation::transposition(n, 0, 1)];
        let g = group_order(n, &gens).unwrap();
        assert_eq!(g.order, factorial(n as u64));
        assert!(g.transitive && g.contains_odd);
        assert_eq!(BigUint::from(brute_force_order(n, &gens)), factorial(n as u64));
    }
    // A5 = ⟨(0 1 2), (0 1 2 3 4)⟩; dihedral of order 14
    let a5 = group_order(5, &[perm(&[1, 2, 0, 3, 4]), Permutation::long_cycle(5)]).unwrap();
    assert_eq!(a5.order, BigUint::from(60u32));
    assert!(!a5.contains_odd);
    let flip: Vec<usize> = (0..7).map(|i| (7 - i) % 7).collect();
    assert_eq!(group_order(7, &[Permutation::long_cycle(7), perm(&flip)]).unwrap().order, BigUint::from(14u32));
    let split = group_order(4, &[perm(&[1, 0, 2, 3]), perm(&[0, 1, 3, 2])]).unwrap();
    assert_eq!(split.order, BigUint::from(4u32));
    assert!(!split.transitive);
    assert!(group_order(3, &[perm(&[1, 0])]).is_err());
}

#[test]
fn stabilizer_chain_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..60 {
        let n = 3 + trial % 5;
        let k = 1 + trial % 3;
        let gens: Vec<Permutation> = (0..k)
            .map(|_| {
                let mut v: Vec<usize> = (0..n).collect();
                // sparse-ish permutations give a spread of subgroup orders
                for _ in 0..(trial % 3) + 1 {
                    let (a, b) = (rand::Rng::gen_range(&mut rng, 0..n), rand::Rng::gen_range(&mut rng, 0..n));
                    v.swap(a, b);
                }
                if trial % 4 == 0 {
                    v.shuffle(&mut rng);
                }
                Permutation::new(v).unwrap()
            })
            .collect();
        let chain = StabilizerChain::new(n, &gens).unwrap();
        assert_eq!(chain.order(), BigUint::from(brute_force_order(n, &gens)), "{gens:?}");
        for g in &gens {
            assert!(chain.contains(g));
        }
    }
}

#[test]
fn order_is_monotone_and_divides_factorial() {
    let gens = [perm(&[1, 0, 2, 3, 4, 5]), perm(&[0, 2, 3, 1, 4, 5]), perm(&[0, 1, 2, 3, 5, 4]), Permutation::long_cycle(6)];
    let mut last = BigUint::from(1u32);
    for k in 1..=gens.len() {
        let o = group_order(6, &gens[..k]).unwrap().order;
        assert!(o >= last);
        assert_eq!(factorial(6) % &o, BigUint::from(0u32));
        last = o;
    }
    assert_eq!(last, factorial(6));
}

#[test]
fn matching_uses_boxes_then_nearest_point() {
    let fiber = vec![vec![C64::new(0.0, 0.0)], vec![C64::new(1.0, 0.0)]];
    let ends = vec![vec![C64::new(1.0 + 1e-9, 0.0)], vec![C64::new(1e-9, 0.0)]];
    assert_eq!(match_endpoints(&ends, &fiber, None).unwrap(), perm(&[1, 0]));
    let boxes = [ComplexBox::around(&fiber[0], 1e-3), ComplexBox::around(&fiber[1], 1e-3)];
    let far = vec![vec![C64::new(1.0005, 0.0)], vec![C64::new(0.0, 0.0)]];
    assert_eq!(match_endpoints(&far, &fiber, Some(&boxes)).unwrap(), perm(&[1, 0]));
    assert_eq!(match_endpoints(&far, &fiber, None), Err(LoopRejection::Unmatched(0)));
    let twice = vec![vec![C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0)]];
    assert_eq!(match_endpoints(&twice, &fiber, None), Err(LoopRejection::NotBijective));
}

fn certified_fiber(spec: &str, seed: u64) -> (FormSystem, Vec<Vec<C64>>, Vec<ComplexBox>) {
    let t: FanoType = spec.parse().unwrap();
    let base = random_form_system(&t, seed).unwrap();
    let g = build_square_system(&base).unwrap();
    let sols = distinct_endpoints(&solve_total_degree(&g, &TrackSettings::default(), seed).unwrap(), 1e-8);
    let n = u64::try_from(&fano_degree(&t).unwrap()).unwrap();
    let fiber = certify_fiber(&g, &sols, None, n).unwrap();
    (base, fiber.boxes.iter().map(ComplexBox::midpoint).collect(), fiber.boxes)
}

#[test]
fn constant_loop_is_the_identity() {
    let (base, pts, boxes) = certified_fiber("1,4,2:2", 1);
    let g = FloatSystem::new(&build_square_system(&base).unwrap());
    let end = track_parameter_path(&[g.clone(), g], &pts, &TrackSettings::default()).unwrap();
    assert!(match_endpoints(&end, &pts, Some(&boxes)).unwrap().is_identity());
}

#[test]
fn loops_compose() {
    let (base, pts, boxes) = certified_fiber("1,4,2:2", 2);
    let s = TrackSettings::default();
    let g0 = FloatSystem::new(&build_square_system(&base).unwrap());
    let aux: Vec<FloatSystem> = (40..44)
        .map(|k| FloatSystem::new(&build_square_system(&random_form_system(base.fano_type(), k).unwrap()).unwrap()))
        .collect();
    let run = |v: &[FloatSystem]| match_endpoints(&track_parameter_path(v, &pts, &s).unwrap(), &pts, Some(&boxes)).unwrap();
    let a = run(&[g0.clone(), aux[0].clone(), aux[1].clone(), g0.clone()]);
    let b = run(&[g0.clone(), aux[2].clone(), aux[3].clone(), g0.clone()]);
    let ab = run(&[g0.clone(), aux[0].clone(), aux[1].clone(), g0.clone(), aux[2].clone(), aux[3].clone(), g0]);
    assert_eq!(a.then(&b), ab);
}

#[test]
fn line_incidences() {
    for (spec, meets) in [("1,4,2:2", 5), ("1,3,3", 10)] {
        let (base, pts, _) = certified_fiber(spec, 3);
        let adj = incidence_graph(base.fano_type(), &pts).unwrap();
        assert!(adj.iter().all(|row| row.iter().filter(|&&b| b).count() == meets), "{spec}");
        assert!(preserves_graph(&adj, &Permutation::identity(pts.len())));
        assert!(!preserves_graph(&adj, &Permutation::transposition(pts.len(), 0, 1)) || adj[0] == adj[1]);
    }
}

#[test]
fn sampled_group_of_the_quadric_pair_sits_in_d5() {
    let t: FanoType = "1,4,2:2".parse().unwrap();
    let report = sample_galois_group(&t, 12, 7, &TrackSettings::default()).unwrap();
    assert_eq!(report.fiber_size, 16);
    assert!(report.accepted_loops >= 8, "{report:?}");
    assert_eq!(BigUint::from(1920u32) % &report.group.order, BigUint::from(0u32));
    assert!(report.group.transitive);
    let inc = report.incidence.unwrap();
    assert!(inc.preserved && inc.degrees.iter().all(|&d| d == 5));
    assert!(report.order_history.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn large_fibers_are_gated() {
    let t: FanoType = "3,8,2:2".parse().unwrap();
    assert!(sample_galois_group(&t, 1, 1, &TrackSettings::default()).is_err());
}
