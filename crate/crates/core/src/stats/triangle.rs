//! Grid probes of how close one side of a geodesic triangle comes to the
//! other two.
//!
//! Each side is replaced by unit-speed grid points `ds` apart. Distance to a
//! point is 1-Lipschitz along a unit-speed path, so a grid point at distance
//! `D` rules out its next `⌊(D − b)/ds⌋` neighbours from beating `b`.
//! This skips work without changing the grid minimum.

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Result};
use crate::space::{Geometry, ModelSpace, Point};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleProbe {
    pub hit: bool,
    /// Grid minimum; exceeds the true minimum by at most `ds`.
    pub min_distance: f64,
}

/// Points at times `s₁, s₁ + step, …, s₂` along `[a, b]`.
fn side_grid(space: &ModelSpace, a: &Point, b: &Point, s1: f64, s2: f64, ds: f64) -> Result<(Vec<Point>, f64)> {
    if a == b {
        return Err(domain(format!("degenerate triangle side at {a}")));
    }
    let step = if matches!(space.geometry(), Geometry::Tree { .. }) { ds.ceil().max(1.0) } else { ds };
    let (s1, s2) = if step == ds { (s1, s2) } else { (s1.ceil(), s2.floor()) };
    let count = ((s2 - s1) / step).floor() as usize;
    let mut times: Vec<f64> = (0..=count).map(|j| s1 + j as f64 * step).collect();
    if s2 - times[count] > 1e-12 * s2.max(1.0) {
        times.push(s2);
    }
    let pts = times.iter().map(|&t| space.geodesic_point(a, b, t)).collect::<Result<Vec<_>>>()?;
    Ok((pts, step))
}

/// Smallest distance from `p` to `grid`, skipping points that provably cannot
/// come below `bound`. Returns a value `≥ bound` when nothing beats it.
fn min_to_grid(space: &ModelSpace, p: &Point, grid: &[Point], step: f64, bound: f64) -> f64 {
    let mut best = bound;
    let mut j = 0;
    while j < grid.len() {
        let d = space.distance_unchecked(p, &grid[j]);
        if d < best {
            best = d;
        }
        j += ((d - best) / step).floor() as usize + 1;
    }
    best
}

struct Setup {
    interval: Vec<Point>,
    sides: [(Vec<Point>, f64); 2],
    step: f64,
}

fn setup(
    space: &ModelSpace,
    x: &Point,
    y: &Point,
    z: &Point,
    interval: (f64, f64),
    c: f64,
    ds: f64,
) -> Result<Setup> {
    for p in [x, y, z] {
        space.validate(p)?;
    }
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(param(format!("grid step must be positive, got {ds}")));
    }
    if !(c >= 0.0) {
        return Err(param(format!("neighbourhood radius must be nonnegative, got {c}")));
    }
    let dxy = space.distance_unchecked(x, y);
    let (s1, s2) = interval;
    if !(s1 >= 0.0 && s1 < s2 && s2 <= dxy * (1.0 + 1e-12)) {
        return Err(param(format!("interval ({s1}, {s2}) must satisfy 0 ≤ s₁ < s₂ ≤ d(x,y) = {dxy}")));
    }
    let (interval, step) = side_grid(space, x, y, s1, s2.min(dxy), ds)?;
    let xz = side_grid(space, x, z, 0.0, space.distance_unchecked(x, z), ds)?;
    let yz = side_grid(space, y, z, 0.0, space.distance_unchecked(y, z), ds)?;
    Ok(Setup { interval, sides: [xz, yz], step })
}

/// Minimum over the interval grid of the distance to the grids of `[x, z]`
/// and `[y, z]`; a hit when it is at most `C`.
pub fn thin_triangle_probe(
    space: &ModelSpace,
    x: &Point,
    y: &Point,
    z: &Point,
    interval: (f64, f64),
    c: f64,
    ds: f64,
) -> Result<TriangleProbe> {
    let s = setup(space, x, y, z, interval, c, ds)?;
    let mut best = f64::INFINITY;
    let mut i = 0;
    while i < s.interval.len() {
        let p = &s.interval[i];
        let d = s
            .sides
            .iter()
            .map(|(g, st)| min_to_grid(space, p, g, *st, f64::INFINITY))
            .fold(f64::INFINITY, f64::min);
        best = best.min(d);
        i += ((d - best) / s.step).floor() as usize + 1;
    }
    Ok(TriangleProbe { hit: best <= c, min_distance: best })
}

/// Fraction of interval grid points within `C` of the other two sides.
pub fn near_fraction(
    space: &ModelSpace,
    x: &Point,
    y: &Point,
    z: &Point,
    interval: (f64, f64),
    c: f64,
    ds: f64,
) -> Result<f64> {
    let s = setup(space, x, y, z, interval, c, ds)?;
    let near = s
        .interval
        .iter()
        .filter(|p| {
            // Any value ≤ C decides membership, so C itself is a valid bound.
            let bound = c + f64::EPSILON * c.max(1.0);
            s.sides.iter().any(|(g, st)| min_to_grid(space, p, g, *st, bound) <= c)
        })
        .count();
    Ok(near as f64 / s.interval.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormFactor;

    #[test]
    fn collinear_triangle_hits_with_zero_radius() {
        let e = ModelSpace::euclidean(2, 2.0).unwrap();
        let (x, y, z) = (Point::real([0.0, 0.0]), Point::real([4.0, 0.0]), Point::real([2.0, 0.0]));
        let probe = thin_triangle_probe(&e, &x, &y, &z, (1.0, 3.0), 0.0, 0.05).unwrap();
        assert!(probe.hit);
        assert_eq!(probe.min_distance, 0.0);
        // Grid points of the overlapping sides need not coincide, so allow one step.
        assert_eq!(near_fraction(&e, &x, &y, &z, (1.0, 3.0), 0.05, 0.05).unwrap(), 1.0);
    }

    #[test]
    fn pruned_minimum_equals_brute_force() {
        let h = ModelSpace::hyperbolic_plane();
        let (x, y, z) = (Point::complex(0.0, 1.0), Point::complex(30.0, 2.0), Point::complex(-5.0, 0.01));
        let ds = 0.05;
        let dxy = h.distance(&x, &y).unwrap();
        let probe = thin_triangle_probe(&h, &x, &y, &z, (dxy / 3.0, 2.0 * dxy / 3.0), 1.0, ds).unwrap();
        let (ig, _) = side_grid(&h, &x, &y, dxy / 3.0, 2.0 * dxy / 3.0, ds).unwrap();
        let (a, _) = side_grid(&h, &x, &z, 0.0, h.distance(&x, &z).unwrap(), ds).unwrap();
        let (b, _) = side_grid(&h, &y, &z, 0.0, h.distance(&y, &z).unwrap(), ds).unwrap();
        let h = &h;
        let brute = ig
            .iter()
            .flat_map(|p| a.iter().chain(&b).map(move |q| h.distance(p, q).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(probe.min_distance, brute);
    }

    #[test]
    fn sup_product_triangle_stays_far() {
        let s = ModelSpace::sup_product(vec![NormFactor { dim: 1, p: 2.0 }; 2]).unwrap();
        let r = 8.0;
        let (x, y, z) = (Point::real([0.0, 0.0]), Point::real([2.0 * r, r]), Point::real([2.0 * r, -r]));
        let d = 2.0 * r;
        let probe = thin_triangle_probe(&s, &x, &y, &z, (d / 3.0, 2.0 * d / 3.0), r / 4.0, 0.05).unwrap();
        assert!(!probe.hit);
        assert!((probe.min_distance - 4.0 * r / 9.0).abs() <= 0.05);
    }

    #[test]
    fn degenerate_sides_are_domain_errors() {
        let e = ModelSpace::euclidean(2, 2.0).unwrap();
        let (x, y) = (Point::real([0.0, 0.0]), Point::real([4.0, 0.0]));
        assert!(matches!(thin_triangle_probe(&e, &x, &y, &x, (1.0, 2.0), 1.0, 0.1), Err(crate::Error::Domain(_))));
    }
}
