//! Distributional checks of the samplers and estimator invariances.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::PI;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use stathyp::space::hyperbolic::direction_from_i;
use stathyp::space::tree::sphere_cardinality;
use stathyp::space::{radial_mass, ModelSpace, Point, SphereMeasure, TreeAddress};
use stathyp::stats::{estimate_e, separation_profile};

#[test]
fn tree_sphere_cardinality_by_enumeration() {
    for q in 2..=4u8 {
        let mut counts = [0u128; 11];
        let mut seen = HashSet::from([TreeAddress::root()]);
        let mut queue = VecDeque::from([TreeAddress::root()]);
        while let Some(v) = queue.pop_front() {
            counts[v.depth()] += 1;
            if v.depth() == 10 {
                continue;
            }
            for n in v.neighbours(q) {
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        for (r, &count) in counts.iter().enumerate() {
            let expected = if r == 0 { 1 } else { q as u128 * (q as u128 - 1).pow(r as u32 - 1) };
            assert_eq!(count, expected, "q={q} r={r}");
            assert_eq!(sphere_cardinality(q, r), expected, "q={q} r={r}");
        }
    }
}

/// χ² statistic of `angles` in `bins` equal sectors, and the 0.001 critical value.
fn chi_squared(angles: &[f64], bins: usize) -> (f64, f64) {
    let mut counts = vec![0f64; bins];
    for a in angles {
        let u = a.rem_euclid(2.0 * PI) / (2.0 * PI);
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1.0;
    }
    let expected = angles.len() as f64 / bins as f64;
    let stat = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.999);
    (stat, critical)
}

#[test]
fn sphere_directions_are_rotation_invariant() {
    let n = 100_000;
    let plane = ModelSpace::euclidean(2, 2.0).unwrap();
    let pts = plane.sample_sphere(&Point::real([0.0, 0.0]), 3.0, n, SphereMeasure::VisualUniformDirection, 11).unwrap();
    let angles: Vec<f64> = pts.iter().map(|p| p.as_real().unwrap()[1].atan2(p.as_real().unwrap()[0])).collect();
    let (stat, crit) = chi_squared(&angles, 36);
    assert!(stat < crit, "euclidean χ² {stat} ≥ {crit}");

    let h = ModelSpace::hyperbolic_plane();
    let pts = h.sample_sphere(&h.basepoint(), 4.0, n, SphereMeasure::VisualUniformDirection, 12).unwrap();
    let angles: Vec<f64> = pts.iter().map(|p| direction_from_i(p.as_complex().unwrap())).collect();
    let (stat, crit) = chi_squared(&angles, 36);
    assert!(stat < crit, "hyperbolic χ² {stat} ≥ {crit}");
}

#[test]
fn flat_annulus_radii_are_uniform() {
    let (r, k, n) = (10.0, 5.0, 100_000);
    let plane = ModelSpace::euclidean(2, 2.0).unwrap();
    let origin = Point::real([0.0, 0.0]);
    let mut radii: Vec<f64> =
        plane.sample_annulus(&origin, r, k, n, 21).unwrap().iter().map(|p| plane.distance(&origin, p).unwrap()).collect();
    radii.sort_by(f64::total_cmp);
    let ks = radii
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = (s - (r - k)) / k;
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // Kolmogorov critical value at significance 0.001.
    let critical = (-(0.0005f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
    assert!(ks < critical, "KS {ks} ≥ {critical}");
}

#[test]
fn exponential_annulus_concentrates_near_the_outer_sphere() {
    let (r, k, n) = (20.0, 5.0, 100_000);
    let h = ModelSpace::hyperbolic_plane();
    let x = h.basepoint();
    let pts = h.sample_annulus(&x, r, k, n, 31).unwrap();
    let above = pts.iter().filter(|p| h.distance(&x, p).unwrap() >= r - 1.0).count() as f64 / n as f64;
    let expected = (1.0 - (-1f64).exp()) / (1.0 - (-k).exp());
    let se = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!((above - expected).abs() <= 4.0 * se, "{above} vs {expected}");
}

#[test]
fn ball_mass_grows_like_exp_hr() {
    // ∫₀^r e^{hs} ds = (e^{hr} − 1)/h, so mass/e^{hr} lies in [1/(2h), 1/h].
    for hi in 0..=18 {
        let h = 1.0 + hi as f64 * 0.5;
        for ri in 0..=55 {
            let r = 5.0 + ri as f64;
            let ratio = radial_mass(h, 0.0, r) / (h * r).exp();
            let (c1, c2) = (1.0 / (2.0 * h), 1.0 / h);
            assert!(c1 <= ratio && ratio <= c2 * (1.0 + 1e-12), "h={h} r={r}: {ratio}");
        }
    }
}

#[test]
fn estimate_is_scale_invariant_on_normed_spaces() {
    for (dim, p) in [(2, 2.0), (3, 1.0), (2, f64::INFINITY)] {
        let space = ModelSpace::euclidean(dim, p).unwrap();
        let x = Point::real(vec![0.0; dim]);
        let base = estimate_e(&space, &x, 4.0, 0.0, 20_000, 5).unwrap();
        for lambda in [0.5, 2.0] {
            let scaled = estimate_e(&space, &x, 4.0 * lambda, 0.0, 20_000, 5).unwrap();
            assert!((scaled.mean - base.mean).abs() <= 1e-12, "dim {dim} p {p} λ {lambda}");
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let h = ModelSpace::hyperbolic_plane();
    let times: Vec<f64> = (1..=10).map(|t| t as f64).collect();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let e = estimate_e(&h, &h.basepoint(), 10.0, 2.0, 50_000, 9).unwrap();
            let s = separation_profile(&h, &h.basepoint(), 10.0, &times, 2.0, 5_000, 9).unwrap();
            (e.mean.to_bits(), e.std_error.to_bits(), s)
        })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn tree_radius_two_estimate_is_exact_in_expectation() {
    // Ordered pairs on the q = 3 sphere of radius 2: 6 at distance 0, 6 at 2,
    // 24 at 4, so E = (6·0 + 6·2 + 24·4) / (36·2) = 1.5.
    let t = ModelSpace::regular_tree(3).unwrap();
    let e = estimate_e(&t, &t.basepoint(), 2.0, 0.0, 200_000, 3).unwrap();
    assert!((e.mean - 1.5).abs() <= 4.0 * e.std_error);
}
