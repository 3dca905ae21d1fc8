//! Property tests: metric axioms, geodesic parameterization, modular
//! reduction, convex-body duality and coarse-formula monotonicity.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stathyp::coarse::{annular_chain, random_profile, repackaged_distance, threshold_floor};
use stathyp::finsler::{
    densities, mahler, random_ellipsoid, random_symmetric_polytope, unit_ball_volume, ConvexBody, Polytope,
    VolumeMethod,
};
use stathyp::space::modular::{in_fundamental_domain, reduce};
use stathyp::space::{ModelSpace, NormFactor, Point, TreeAddress};
use stathyp::stats::estimate_e;

fn tolerance(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)]
}

fn upper_half_plane() -> impl Strategy<Value = Point> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, log_im)| Point::complex(re, 10f64.powf(log_im * 0.6)))
}

fn tree_point(valence: u8) -> impl Strategy<Value = Point> {
    prop::collection::vec(0..valence, 0..12).prop_map(move |raw| {
        // Drop repeated labels so the word is backtrack-free.
        let mut labels: Vec<u8> = Vec::new();
        for l in raw {
            if labels.last() != Some(&l) {
                labels.push(l);
            }
        }
        Point::Tree(TreeAddress::from_labels(labels, valence).unwrap())
    })
}

fn real_point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-50.0..50.0f64, dim).prop_map(Point::Real)
}

fn check_axioms(space: &ModelSpace, x: &Point, y: &Point, z: &Point) -> Result<(), TestCaseError> {
    let dxy = space.distance(x, y).unwrap();
    let dyx = space.distance(y, x).unwrap();
    let dxz = space.distance(x, z).unwrap();
    let dyz = space.distance(y, z).unwrap();
    let scale = dxy + dxz + dyz;
    prop_assert!(dxy >= 0.0);
    prop_assert_eq!(space.distance(x, x).unwrap(), 0.0);
    prop_assert!((dxy - dyx).abs() <= tolerance(scale));
    prop_assert!(dxz <= dxy + dyz + tolerance(scale));
    if x != y {
        prop_assert!(dxy > 0.0);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn euclidean_metric_axioms(
        (dim, x, y, z) in (1usize..5).prop_flat_map(|d| (Just(d), real_point(d), real_point(d), real_point(d))),
        p in exponent(),
    ) {
        check_axioms(&ModelSpace::euclidean(dim, p).unwrap(), &x, &y, &z)?;
    }

    #[test]
    fn hyperbolic_metric_axioms(x in upper_half_plane(), y in upper_half_plane(), z in upper_half_plane()) {
        check_axioms(&ModelSpace::hyperbolic_plane(), &x, &y, &z)?;
        check_axioms(&ModelSpace::modular_torus(), &x, &y, &z)?;
    }

    #[test]
    fn tree_metric_axioms(x in tree_point(3), y in tree_point(3), z in tree_point(3)) {
        check_axioms(&ModelSpace::regular_tree(3).unwrap(), &x, &y, &z)?;
    }

    #[test]
    fn sup_product_metric_axioms(x in real_point(3), y in real_point(3), z in real_point(3), p in exponent()) {
        let space = ModelSpace::sup_product(vec![NormFactor { dim: 1, p: 2.0 }, NormFactor { dim: 2, p }]).unwrap();
        check_axioms(&space, &x, &y, &z)?;
    }
}

fn unit_speed(space: &ModelSpace, u: &Point, v: &Point, a: f64, b: f64) -> Result<(), TestCaseError> {
    prop_assume!(u != v);
    let d = space.distance(u, v).unwrap();
    let (s, t) = (a * d, b * d);
    let ps = space.geodesic_point(u, v, s).unwrap();
    let pt = space.geodesic_point(u, v, t).unwrap();
    let err = (space.distance(&ps, &pt).unwrap() - (s - t).abs()).abs();
    prop_assert!(err < 1e-8 * d.max(1.0), "error {err} at d = {d}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5_000))]

    #[test]
    fn hyperbolic_geodesics_have_unit_speed(u in upper_half_plane(), v in upper_half_plane(), a in 0.0..2.0f64, b in 0.0..2.0f64) {
        unit_speed(&ModelSpace::hyperbolic_plane(), &u, &v, a, b)?;
    }

    #[test]
    fn normed_geodesics_have_unit_speed(u in real_point(3), v in real_point(3), p in exponent(), a in 0.0..2.0f64, b in 0.0..2.0f64) {
        unit_speed(&ModelSpace::euclidean(3, p).unwrap(), &u, &v, a, b)?;
        let sup = ModelSpace::sup_product(vec![NormFactor { dim: 2, p }, NormFactor { dim: 1, p: 2.0 }]).unwrap();
        unit_speed(&sup, &u, &v, a, b)?;
    }

    #[test]
    fn tree_geodesics_have_unit_speed(u in tree_point(4), v in tree_point(4), s in 0usize..30, t in 0usize..30) {
        prop_assume!(u != v);
        let space = ModelSpace::regular_tree(4).unwrap();
        let ps = space.geodesic_point(&u, &v, s as f64).unwrap();
        let pt = space.geodesic_point(&u, &v, t as f64).unwrap();
        prop_assert_eq!(space.distance(&ps, &pt).unwrap(), s.abs_diff(t) as f64);
    }

    #[test]
    fn modular_reduction_lands_in_domain_and_undoes(re in -1e3..1e3f64, log_im in -6.0..6.0f64) {
        let z = Complex64::new(re, 10f64.powf(log_im));
        let (zr, word) = reduce(z).unwrap();
        prop_assert!(in_fundamental_domain(zr, 1e-12));
        let back = word.undo(zr);
        prop_assert!((back - z).norm() <= 1e-9 * z.norm().max(1.0), "{} vs {}", back, z);
    }

    #[test]
    fn tree_paths_make_cumulative_progress(x in tree_point(3), y in tree_point(3), cuts in prop::collection::vec(0.0..1.0f64, 2..12)) {
        // Disjoint subsegments [p_i, q_i] of a tree geodesic add up: the
        // endpoint distance is at least their count times their minimum length.
        let space = ModelSpace::regular_tree(3).unwrap();
        let d = space.distance(&x, &y).unwrap();
        prop_assume!(d >= 2.0);
        let mut times: Vec<f64> = cuts.iter().map(|c| (c * d).round()).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times.truncate(times.len() / 2 * 2);
        prop_assume!(!times.is_empty());
        let lens: Vec<f64> = times
            .chunks(2)
            .map(|w| {
                let p = space.geodesic_point(&x, &y, w[0]).unwrap();
                let q = space.geodesic_point(&x, &y, w[1]).unwrap();
                space.distance(&p, &q).unwrap()
            })
            .collect();
        let shortest = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(d >= lens.len() as f64 * shortest);
        prop_assert!(d >= lens.iter().sum::<f64>());
    }
}

fn random_body(kind: u8, dim: usize, seed: u64) -> ConvexBody {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        0 => ConvexBody::Polytope(random_symmetric_polytope(dim, &mut g).unwrap()),
        1 => random_ellipsoid(dim, &mut g),
        _ => ConvexBody::lp_ball(dim, [1.0, 1.5, 3.0, f64::INFINITY][seed as usize % 4]).unwrap(),
    }
}

fn probes(dim: usize, seed: u64, n: usize) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut g = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n).map(|_| (0..dim).map(|_| g.random_range(-3.0..3.0)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn bipolar_membership_matches(kind in 0u8..3, dim in 2usize..4, seed in any::<u64>()) {
        let body = random_body(kind, dim, seed);
        let bipolar = body.polar().unwrap().polar().unwrap();
        let mut checked = 0;
        for x in probes(dim, seed, 10_000) {
            // Skip probes on the boundary, where rounding decides membership.
            if (body.gauge(&x) - 1.0).abs() < 1e-9 {
                continue;
            }
            prop_assert_eq!(body.contains(&x), bipolar.contains(&x), "probe {:?}", x);
            checked += 1;
        }
        prop_assert!(checked > 9_000);
    }

    #[test]
    fn inclusion_reverses_under_polarity(dim in 2usize..4, seed in any::<u64>(), grow in 1.0..3.0f64) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let inner = random_symmetric_polytope(dim, &mut g).unwrap();
        // Outer body: the inner vertices together with scaled copies.
        let mut pts: Vec<Vec<f64>> = inner.vertices().to_vec();
        pts.extend(inner.vertices().iter().take(2).map(|v| v.iter().map(|c| c * grow).collect()));
        let outer = Polytope::symmetric_hull(pts).unwrap();
        let (small, big) = (ConvexBody::Polytope(inner), ConvexBody::Polytope(outer));
        let (vs, vb) = (small.exact_volume().unwrap(), big.exact_volume().unwrap());
        prop_assert!(vs <= vb * (1.0 + 1e-12));
        let (ps, pb) = (small.polar().unwrap(), big.polar().unwrap());
        for x in probes(dim, seed, 2_000) {
            if small.contains(&x) {
                prop_assert!(big.contains(&x) || (big.gauge(&x) - 1.0).abs() < 1e-9);
            }
            if pb.contains(&x) && (ps.gauge(&x) - 1.0).abs() > 1e-9 {
                prop_assert!(ps.contains(&x));
            }
        }
        prop_assert!(ps.exact_volume().unwrap() >= pb.exact_volume().unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn lp_balls_nest_and_polars_reverse(dim in 2usize..7, p in 1.0..8.0f64, q_extra in 0.1..8.0f64) {
        let q = p + q_extra;
        let (bp, bq) = (ConvexBody::lp_ball(dim, p).unwrap(), ConvexBody::lp_ball(dim, q).unwrap());
        prop_assert!(bp.exact_volume().unwrap() <= bq.exact_volume().unwrap());
        prop_assert!(bq.polar().unwrap().exact_volume().unwrap() <= bp.polar().unwrap().exact_volume().unwrap());
    }

    #[test]
    fn mahler_volume_equals_eps_squared_times_density_ratio(kind in 0u8..3, dim in 2usize..4, seed in any::<u64>()) {
        let body = random_body(kind, dim, seed);
        let m = mahler(&body, VolumeMethod::Exact).unwrap();
        let d = densities(&body, VolumeMethod::Exact).unwrap();
        let eps = unit_ball_volume(dim);
        let identity = eps * eps * d.holmes_thompson / d.busemann;
        prop_assert!((m.mahler - identity).abs() <= 1e-9 * identity);
        prop_assert!(d.within_sandwich());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn raising_threshold_never_increases_repackaged_distance(seed in any::<u64>(), m in 1.0..1e4f64, factor in 1.0..100.0f64) {
        let profile = random_profile(&mut ChaCha8Rng::seed_from_u64(seed));
        let low = repackaged_distance(&profile, m).unwrap();
        let high = repackaged_distance(&profile, m * factor).unwrap();
        prop_assert!(high <= low);
    }

    #[test]
    fn chain_holds_above_floor(seed in any::<u64>(), log_inv_eps in 0.1..3.0f64, scale in 1.0..5.0f64) {
        let eps0 = (-log_inv_eps).exp();
        let profile = random_profile(&mut ChaCha8Rng::seed_from_u64(seed));
        let c = annular_chain(&profile, threshold_floor(eps0) * scale, eps0).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn estimates_are_normalized(model in 0u8..5, r in 0.5..30.0f64, width in 0.0..1.0f64, seed in any::<u64>()) {
        let space = match model {
            0 => ModelSpace::euclidean(2, 2.0).unwrap(),
            1 => ModelSpace::hyperbolic_plane(),
            2 => ModelSpace::modular_torus(),
            3 => ModelSpace::regular_tree(3).unwrap(),
            _ => ModelSpace::sup_product(vec![NormFactor { dim: 1, p: 2.0 }; 2]).unwrap(),
        };
        let r = if space.is_discrete() { r.ceil().min(12.0) } else { r };
        let k = if width < 0.3 { 0.0 } else { width * r };
        let e = estimate_e(&space, &space.basepoint(), r, k, 64, seed).unwrap();
        prop_assert!((0.0..=2.0).contains(&e.mean));
    }
}
