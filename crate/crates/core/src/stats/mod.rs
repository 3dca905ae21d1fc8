//! Monte Carlo estimators on model spaces.
//!
//! Sample `j` of every estimator draws from stream `j` of its seed and results
//! are reduced by pairwise summation in index order, so outputs are identical
//! for any thread count.

pub mod discretize;
pub mod separation;
pub mod thick;
pub mod triangle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{param, Result};
use crate::rng;
use crate::space::{check_shell, ModelSpace, Point};

pub use discretize::{discretize_geodesic, SamplePath};
pub use separation::{separation_fraction, separation_profile, DecayFit, SeparationPoint};
pub use thick::{longest_thick_runs, p1_fraction, ray_thick_fraction, thick_stat};
pub use triangle::{near_fraction, thin_triangle_probe, TriangleProbe};

/// Mean of `d(y, z)/r` over sampled pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_pairs: usize,
    pub r: f64,
    pub k: f64,
    pub seed: u64,
    pub config_digest: String,
}

/// Hex SHA-256 of a canonical description string.
pub fn digest(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub const MIN_PAIRS: usize = 10;

/// Average normalized distance between independent pairs drawn from the
/// sphere (`k = 0`), annulus (`0 < k < r`) or ball (`k = r`) about `x`.
///
/// On trees the measure is atomic and pairs with `y = z` are kept, matching
/// the product measure literally. Each ratio is clamped to `[0, 2]`, which the
/// triangle inequality guarantees up to rounding.
pub fn estimate_e(space: &ModelSpace, x: &Point, r: f64, k: f64, n: usize, seed: u64) -> Result<EstimateResult> {
    space.validate(x)?;
    check_shell(r, k)?;
    if n < MIN_PAIRS {
        return Err(param(format!("need at least {MIN_PAIRS} pairs, got {n}")));
    }
    let measure = space.default_measure();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut g = rng::stream(seed, j as u64);
            let (y, z) = if k == 0.0 {
                (space.draw_sphere_point(x, r, measure, &mut g)?, space.draw_sphere_point(x, r, measure, &mut g)?)
            } else {
                (
                    space.draw_shell_point(x, r, k, measure, &mut g)?,
                    space.draw_shell_point(x, r, k, measure, &mut g)?,
                )
            };
            Ok((space.distance_unchecked(&y, &z) / r).clamp(0.0, 2.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std_error) = rng::mean_and_stderr(&values);
    let canonical = format!("estimate-e|{}|h={:?}|x={x}|r={r:?}|k={k:?}|n={n}|seed={seed}", space.label(), space.growth());
    Ok(EstimateResult { mean, std_error, n_pairs: n, r, k, seed, config_digest: digest(&canonical) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::TreeAddress;

    #[test]
    fn euclidean_plane_sphere_mean_is_four_over_pi() {
        let plane = ModelSpace::euclidean(2, 2.0).unwrap();
        let est = estimate_e(&plane, &Point::real([0.0, 0.0]), 3.0, 0.0, 100_000, 1).unwrap();
        let target = 4.0 / std::f64::consts::PI;
        assert!((est.mean - target).abs() < 4.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn tree_radius_two_oracle() {
        // Enumerate all 36 ordered pairs on the sphere of radius 2.
        let mut pts = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                if a != b {
                    pts.push(TreeAddress::from_labels(vec![a, b], 3).unwrap());
                }
            }
        }
        let total: usize = pts.iter().flat_map(|u| pts.iter().map(move |v| u.distance(v))).sum();
        assert_eq!(pts.len(), 6);
        assert_eq!(total as f64 / 36.0 / 2.0, 1.5);
        let tree = ModelSpace::regular_tree(3).unwrap();
        let est = estimate_e(&tree, &tree.basepoint(), 2.0, 0.0, 200_000, 9).unwrap();
        assert!((est.mean - 1.5).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn result_is_reproducible_and_digest_tracks_config() {
        let h = ModelSpace::hyperbolic_plane();
        let x = h.basepoint();
        let a = estimate_e(&h, &x, 5.0, 0.0, 1000, 3).unwrap();
        let b = estimate_e(&h, &x, 5.0, 0.0, 1000, 3).unwrap();
        let c = estimate_e(&h, &x, 5.0, 0.0, 1000, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.config_digest, c.config_digest);
        assert_eq!(a.config_digest.len(), 64);
    }

    #[test]
    fn rejects_bad_shapes() {
        let h = ModelSpace::hyperbolic_plane();
        let x = h.basepoint();
        assert!(estimate_e(&h, &x, 5.0, 6.0, 100, 0).is_err());
        assert!(estimate_e(&h, &x, 5.0, 0.0, 5, 0).is_err());
        assert!(estimate_e(&h, &x, 0.0, 0.0, 100, 0).is_err());
    }
}
