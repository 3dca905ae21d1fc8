//! Separated, dense nets built greedily over a fine candidate grid.

use serde::{Deserialize, Serialize};

use super::hyperbolic::GeodesicFrame;
use super::{Geometry, ModelSpace, Point};
use crate::error::{param, Error, Result};

/// Bounded region a net should cover.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Closed interval of a one-dimensional real model.
    Interval { start: f64, end: f64 },
    /// Axis-aligned box in a real-vector model of dimension ≤ 3.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Points within normal distance `radius` of the segment `[from, to]`,
    /// in Fermi coordinates. Euclidean plane or hyperbolic/modular models.
    Tube { from: Point, to: Point, radius: f64 },
    /// The whole space; never bounded.
    Unbounded,
}

/// Region kinds as they appear in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Interval,
    Box,
    Tube,
    Unbounded,
}

/// A `c`-separated point set covering a region to within `2c`.
#[derive(Clone, Debug)]
pub struct Net {
    pub points: Vec<Point>,
    pub separation: f64,
    pub region: Region,
}

const MAX_CANDIDATES: usize = 4_000_000;

impl Net {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance of the nearest net point.
    pub fn nearest(&self, space: &ModelSpace, p: &Point) -> Option<(usize, f64)> {
        self.points
            .iter()
            .map(|q| space.distance_unchecked(p, q))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Smallest pairwise distance (infinite for fewer than two points).
    pub fn min_separation(&self, space: &ModelSpace) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min(space.distance_unchecked(p, q));
            }
        }
        best
    }
}

fn grid_1d(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).ceil() as usize;
    let mut v: Vec<f64> = (0..n).map(|j| start + j as f64 * step).collect();
    v.push(end);
    v
}

/// Candidate points whose `c/4`-balls cover the region.
pub(crate) fn candidates(space: &ModelSpace, region: &Region, c: f64) -> Result<Vec<Point>> {
    match region {
        Region::Unbounded => Err(param("cannot build a net on an unbounded region")),
        Region::Interval { start, end } => {
            if !(start.is_finite() && end.is_finite() && start <= end) {
                return Err(param(format!("interval [{start}, {end}] is not bounded")));
            }
            match space.geometry() {
                Geometry::Euclidean { dim: 1, .. } => {}
                _ => return Err(param("interval regions need a one-dimensional euclidean model")),
            }
            Ok(grid_1d(*start, *end, c / 4.0).into_iter().map(|x| Point::Real(vec![x])).collect())
        }
        Region::Box { lower, upper } => {
            let dim = lower.len();
            if dim == 0 || dim > 3 || upper.len() != dim {
                return Err(param("box regions need matching bounds of dimension 1..=3"));
            }
            if lower.iter().chain(upper).any(|x| !x.is_finite()) || lower.iter().zip(upper).any(|(l, u)| l > u) {
                return Err(param("box region is not bounded"));
            }
            if !matches!(space.geometry(), Geometry::Euclidean { .. } | Geometry::SupProduct { .. }) {
                return Err(param("box regions need a real-vector model"));
            }
            // ‖δ‖_p ≤ ‖δ‖_1 ≤ dim · step / 2 for any p ≥ 1.
            let step = c / (2.0 * dim as f64);
            let axes: Vec<Vec<f64>> = lower.iter().zip(upper).map(|(l, u)| grid_1d(*l, *u, step)).collect();
            let total: usize = axes.iter().map(Vec::len).product();
            if total > MAX_CANDIDATES {
                return Err(param(format!("box needs {total} candidates; increase c")));
            }
            let mut out = vec![Vec::new()];
            for axis in &axes {
                out = out
                    .into_iter()
                    .flat_map(|prefix: Vec<f64>| {
                        axis.iter().map(move |x| {
                            let mut p = prefix.clone();
                            p.push(*x);
                            p
                        })
                    })
                    .collect();
            }
            let pts: Vec<Point> = out.into_iter().map(Point::Real).collect();
            pts.iter().try_for_each(|p| space.validate(p))?;
            Ok(pts)
        }
        Region::Tube { from, to, radius } => {
            space.validate(from)?;
            space.validate(to)?;
            if !(radius.is_finite() && *radius >= 0.0) {
                return Err(param(format!("tube radius {radius} is not bounded")));
            }
            let length = space.distance_unchecked(from, to);
            if from == to {
                return Err(Error::DegenerateRay);
            }
            let across = grid_1d(-radius, *radius, c / 4.0);
            match (space.geometry(), from, to) {
                (Geometry::Hyperbolic | Geometry::Modular, Point::Complex(a), Point::Complex(b)) => {
                    let frame = GeodesicFrame::through(*a, *b);
                    let along = grid_1d(0.0, length, c / (4.0 * radius.cosh()));
                    check_count(along.len() * across.len())?;
                    Ok(along
                        .iter()
                        .flat_map(|s| across.iter().map(move |u| Point::Complex(frame.fermi_point(*s, *u))))
                        .collect())
                }
                (Geometry::Euclidean { dim: 2, p }, Point::Real(a), Point::Real(b)) if *p == 2.0 => {
                    let dir = [(b[0] - a[0]) / length, (b[1] - a[1]) / length];
                    let normal = [-dir[1], dir[0]];
                    let along = grid_1d(0.0, length, c / 4.0);
                    check_count(along.len() * across.len())?;
                    Ok(along
                        .iter()
                        .flat_map(|s| {
                            across.iter().map(move |u| {
                                Point::Real(vec![
                                    a[0] + s * dir[0] + u * normal[0],
                                    a[1] + s * dir[1] + u * normal[1],
                                ])
                            })
                        })
                        .collect())
                }
                _ => Err(param(format!("tube regions are not supported on {}", space.label()))),
            }
        }
    }
}

fn check_count(n: usize) -> Result<()> {
    if n > MAX_CANDIDATES {
        Err(param(format!("region needs {n} candidates; increase c")))
    } else {
        Ok(())
    }
}

/// Greedy maximal `c`-separated subset of the candidate grid.
///
/// Every candidate lies within `c` of the net (otherwise it would have been
/// added) and every region point lies within `c/4` of a candidate, so the net
/// is `(5c/4)`-dense, inside the required `2c`.
pub fn build_net(space: &ModelSpace, region: &Region, c: f64) -> Result<Net> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(param(format!("net separation must be positive, got {c}")));
    }
    let cands = candidates(space, region, c)?;
    let mut points: Vec<Point> = Vec::new();
    for cand in cands {
        if points.iter().all(|p| space.distance_unchecked(p, &cand) >= c) {
            points.push(cand);
        }
    }
    Ok(Net { points, separation: c, region: region.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_net_size_is_between_packing_and_covering_counts() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        let net = build_net(&line, &Region::Interval { start: 0.0, end: 10.0 }, 1.0).unwrap();
        assert!((6..=11).contains(&net.len()), "{}", net.len());
        assert!(net.min_separation(&line) >= 1.0);
        for x in grid_1d(0.0, 10.0, 0.01) {
            let (_, d) = net.nearest(&line, &Point::Real(vec![x])).unwrap();
            assert!(d <= 2.0);
        }
    }

    #[test]
    fn unbounded_regions_are_rejected() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        assert!(matches!(build_net(&line, &Region::Unbounded, 1.0), Err(Error::Parameter(_))));
        assert!(build_net(&line, &Region::Interval { start: 0.0, end: f64::INFINITY }, 1.0).is_err());
    }

    #[test]
    fn hyperbolic_tube_net_is_separated_and_dense() {
        let h = ModelSpace::hyperbolic_plane();
        let (a, b) = (Point::complex(0.0, 1.0), Point::complex(2.0, 3.0));
        let region = Region::Tube { from: a.clone(), to: b.clone(), radius: 1.0 };
        let net = build_net(&h, &region, 0.5).unwrap();
        assert!(net.min_separation(&h) >= 0.5);
        for p in candidates(&h, &region, 0.05).unwrap() {
            assert!(net.nearest(&h, &p).unwrap().1 <= 1.0);
        }
    }

    #[test]
    fn box_net_in_sup_plane() {
        let s = ModelSpace::sup_product(vec![super::super::NormFactor { dim: 1, p: 2.0 }; 2]).unwrap();
        let region = Region::Box { lower: vec![0.0, 0.0], upper: vec![3.0, 2.0] };
        let net = build_net(&s, &region, 0.5).unwrap();
        assert!(net.min_separation(&s) >= 0.5);
        for p in candidates(&s, &region, 0.1).unwrap() {
            assert!(net.nearest(&s, &p).unwrap().1 <= 1.0);
        }
    }
}
