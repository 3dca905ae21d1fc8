//! Sample paths: geodesics replaced by nearby net points.
//!
//! Marks are placed every `τ − 2c` along the geodesic and each is snapped to
//! its nearest net point. Two snaps can add up to `4c` to a step, so when a
//! snapped step would exceed `τ` the mark is pulled back to `τ − 4c` after
//! the previous one, which always fits.

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::space::{ModelSpace, Net, Point};

#[derive(Clone, Debug, Serialize)]
pub struct SamplePath {
    #[serde(skip)]
    pub points: Vec<Point>,
    /// Geodesic times of the marks, one per path point.
    pub marks: Vec<f64>,
    /// Distance from each mark to its path point.
    pub snap_distances: Vec<f64>,
    pub tau: f64,
    pub c: f64,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance between consecutive path points.
    pub fn max_step(&self, space: &ModelSpace) -> f64 {
        self.points.windows(2).map(|w| space.distance_unchecked(&w[0], &w[1])).fold(0.0, f64::max)
    }
}

fn snap(space: &ModelSpace, net: &Net, p: &Point, t: f64) -> Result<(Point, f64)> {
    let (i, d) = net.nearest(space, p).ok_or_else(|| Error::Coverage("net is empty".into()))?;
    if d > 2.0 * net.separation * (1.0 + 1e-12) {
        return Err(Error::Coverage(format!(
            "no net point within 2c = {} of the geodesic at time {t} (nearest is {d} away)",
            2.0 * net.separation
        )));
    }
    Ok((net.points[i].clone(), d))
}

pub fn discretize_geodesic(space: &ModelSpace, net: &Net, tau: f64, segment: (&Point, &Point)) -> Result<SamplePath> {
    let (x, y) = segment;
    space.validate(x)?;
    space.validate(y)?;
    let c = net.separation;
    if !(tau > 4.0 * c) || !tau.is_finite() {
        return Err(param(format!("step τ = {tau} must exceed 4c = {}", 4.0 * c)));
    }
    let length = space.distance_unchecked(x, y);
    let (first, d0) = snap(space, net, x, 0.0)?;
    let mut path = SamplePath { points: vec![first], marks: vec![0.0], snap_distances: vec![d0], tau, c };
    let mut t = 0.0;
    while t < length {
        let mut next = (t + tau - 2.0 * c).min(length);
        let mut candidate = snap(space, net, &space.geodesic_point(x, y, next)?, next)?;
        let prev = path.points.last().expect("path starts with a point");
        if space.distance_unchecked(prev, &candidate.0) > tau {
            next = (t + tau - 4.0 * c).min(length);
            candidate = snap(space, net, &space.geodesic_point(x, y, next)?, next)?;
        }
        t = next;
        path.points.push(candidate.0);
        path.marks.push(t);
        path.snap_distances.push(candidate.1);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_net, Region};

    fn integer_net() -> Net {
        Net {
            points: (-2..=12).map(|i| Point::real([i as f64])).collect(),
            separation: 0.5,
            region: Region::Interval { start: -2.0, end: 12.0 },
        }
    }

    #[test]
    fn integer_net_marks_every_two_units() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        let path = discretize_geodesic(&line, &integer_net(), 3.0, (&Point::real([0.0]), &Point::real([10.0]))).unwrap();
        assert_eq!(path.marks, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let expected: Vec<Point> = (0..6).map(|i| Point::real([2.0 * i as f64])).collect();
        assert_eq!(path.points, expected);
    }

    #[test]
    fn short_segment_gives_two_points() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        let path = discretize_geodesic(&line, &integer_net(), 3.0, (&Point::real([0.0]), &Point::real([1.5]))).unwrap();
        assert_eq!(path.len(), 2);
    }

    #[test]
    fn uncovered_segment_is_a_coverage_error() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        let err = discretize_geodesic(&line, &integer_net(), 3.0, (&Point::real([0.0]), &Point::real([20.0])));
        assert!(matches!(err, Err(Error::Coverage(_))));
    }

    #[test]
    fn step_must_exceed_four_c() {
        let line = ModelSpace::euclidean(1, 2.0).unwrap();
        assert!(discretize_geodesic(&line, &integer_net(), 2.0, (&Point::real([0.0]), &Point::real([5.0]))).is_err());
    }

    #[test]
    fn hyperbolic_tube_path_invariants() {
        let h = ModelSpace::hyperbolic_plane();
        let (a, b) = (Point::complex(0.0, 1.0), Point::complex(3.0, 2.0));
        let net = build_net(&h, &Region::Tube { from: a.clone(), to: b.clone(), radius: 1.0 }, 0.3).unwrap();
        let path = discretize_geodesic(&h, &net, 2.0, (&a, &b)).unwrap();
        assert!(path.max_step(&h) <= 2.0);
        assert!(path.snap_distances.iter().all(|d| *d <= 0.6));
    }
}
