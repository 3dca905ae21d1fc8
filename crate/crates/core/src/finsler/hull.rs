//! Convex hulls in dimensions two and three, enough to recover facet planes
//! and exact volumes of centrally symmetric polytopes.

use std::collections::HashSet;

use crate::error::{param, Result};

/// Hull of a point cloud containing the origin in its interior.
#[derive(Clone, Debug)]
pub struct Hull {
    /// Extreme points.
    pub vertices: Vec<Vec<f64>>,
    /// Facet normals scaled so the facet plane is `a · x = 1`, deduplicated.
    pub normals: Vec<Vec<f64>>,
    /// Lebesgue volume (area in dimension two).
    pub volume: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn push_unique(normals: &mut Vec<Vec<f64>>, a: Vec<f64>) {
    let tol = 1e-9 * (1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    if !normals.iter().any(|b| b.iter().zip(&a).all(|(x, y)| (x - y).abs() <= tol)) {
        normals.push(a);
    }
}

fn facet_normal(points: &[&[f64]], raw_normal: &[f64]) -> Result<Vec<f64>> {
    let offset = dot(raw_normal, points[0]);
    if !(offset > 0.0) {
        return Err(param("origin is not interior to the polytope"));
    }
    Ok(raw_normal.iter().map(|x| x / offset).collect())
}

pub fn hull(points: &[Vec<f64>]) -> Result<Hull> {
    match points.first().map(Vec::len) {
        Some(2) => hull_2d(points),
        Some(3) => hull_3d(points),
        _ => Err(param("exact polytope geometry is available in dimensions 2 and 3 only")),
    }
}

fn hull_2d(points: &[Vec<f64>]) -> Result<Hull> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Err(param("polygon needs at least three distinct points"));
    }
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let tol = 1e-14 * scale_of(points).powi(2);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let ring: Vec<[f64; 2]> = lower.into_iter().chain(upper).collect();
    if ring.len() < 3 {
        return Err(param("points are collinear"));
    }
    let mut area = 0.0;
    let mut normals = Vec::new();
    for i in 0..ring.len() {
        let (p, q) = (ring[i], ring[(i + 1) % ring.len()]);
        area += p[0] * q[1] - p[1] * q[0];
        let n = [q[1] - p[1], p[0] - q[0]];
        push_unique(&mut normals, facet_normal(&[&p], &n)?);
    }
    Ok(Hull { vertices: ring.iter().map(|p| p.to_vec()).collect(), normals, volume: 0.5 * area })
}

/// Incremental hull; faces are index triples oriented outward.
fn hull_3d(points: &[Vec<f64>]) -> Result<Hull> {
    let n = points.len();
    if n < 4 {
        return Err(param("polytope needs at least four points in dimension 3"));
    }
    let scale = scale_of(points).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale;
    // Points this close to the current hull are treated as lying on it; the
    // volume changes by at most tol·area.
    let tol = 1e-10 * scale;
    let p = |i: usize| points[i].as_slice();

    // Initial simplex from extreme choices.
    let i0 = 0;
    let i1 = (0..n)
        .max_by(|&a, &b| norm3(sub3(p(a), p(i0))).total_cmp(&norm3(sub3(p(b), p(i0)))))
        .unwrap();
    let line = sub3(p(i1), p(i0));
    let i2 = (0..n)
        .max_by(|&a, &b| {
            norm3(cross(line, sub3(p(a), p(i0)))).total_cmp(&norm3(cross(line, sub3(p(b), p(i0)))))
        })
        .unwrap();
    let plane = cross(line, sub3(p(i2), p(i0)));
    if norm3(plane) <= eps * scale {
        return Err(param("points are collinear"));
    }
    let i3 = (0..n)
        .max_by(|&a, &b| dot(&plane, &sub3(p(a), p(i0))).abs().total_cmp(&dot(&plane, &sub3(p(b), p(i0))).abs()))
        .unwrap();
    if dot(&plane, &sub3(p(i3), p(i0))).abs() <= eps * norm3(plane) {
        return Err(param("points are coplanar"));
    }

    let centre: Vec<f64> = (0..3).map(|k| (p(i0)[k] + p(i1)[k] + p(i2)[k] + p(i3)[k]) / 4.0).collect();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        faces.push(orient_outward(points, f, &centre));
    }

    let simplex = [i0, i1, i2, i3];
    for idx in 0..n {
        if simplex.contains(&idx) {
            continue;
        }
        let q = p(idx);
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| {
                let nrm = cross(sub3(p(f[1]), p(f[0])), sub3(p(f[2]), p(f[0])));
                dot(&nrm, &sub3(q, p(f[0]))) > tol * norm3(nrm)
            })
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert(e);
            }
        }
        let mut next: Vec<[usize; 3]> =
            faces.iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| *f).collect();
        for f in faces.iter().zip(&visible).filter(|(_, &v)| v).map(|(f, _)| f) {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                if !edges.contains(&(b, a)) {
                    next.push([a, b, idx]);
                }
            }
        }
        faces = next;
    }

    for f in &faces {
        let nrm = cross(sub3(p(f[1]), p(f[0])), sub3(p(f[2]), p(f[0])));
        if (0..n).any(|i| dot(&nrm, &sub3(p(i), p(f[0]))) > 1e3 * tol * norm3(nrm)) {
            return Err(param("hull construction lost convexity; input is numerically degenerate"));
        }
    }

    let mut volume = 0.0;
    let mut normals = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    for f in &faces {
        let (a, b, c) = (p(f[0]), p(f[1]), p(f[2]));
        volume += dot(a, &cross([b[0], b[1], b[2]], [c[0], c[1], c[2]])) / 6.0;
        let nrm = cross(sub3(b, a), sub3(c, a));
        push_unique(&mut normals, facet_normal(&[a], &nrm)?);
        used.extend_from_slice(f);
    }
    used.sort_unstable();
    used.dedup();
    Ok(Hull { vertices: used.into_iter().map(|i| points[i].clone()).collect(), normals, volume })
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn orient_outward(points: &[Vec<f64>], f: [usize; 3], interior: &[f64]) -> [usize; 3] {
    let (a, b, c) = (&points[f[0]], &points[f[1]], &points[f[2]]);
    let nrm = cross(sub3(b, a), sub3(c, a));
    if dot(&nrm, &sub3(interior, a)) > 0.0 {
        [f[0], f[2], f[1]]
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vec<f64>> {
        let mut v = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    v.push(vec![x, y, z]);
                }
            }
        }
        v
    }

    #[test]
    fn square_area_and_facets() {
        let pts = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0], vec![0.0, 0.5]];
        let h = hull(&pts).unwrap();
        assert_eq!(h.volume, 4.0);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.normals.len(), 4);
    }

    #[test]
    fn cube_volume_and_merged_faces() {
        let h = hull(&cube()).unwrap();
        assert!((h.volume - 8.0).abs() < 1e-12);
        assert_eq!(h.vertices.len(), 8);
        // 12 triangles collapse to 6 facet planes.
        assert_eq!(h.normals.len(), 6);
    }

    #[test]
    fn octahedron_volume() {
        let mut pts = Vec::new();
        for k in 0..3 {
            for s in [-1.0, 1.0] {
                let mut v = vec![0.0; 3];
                v[k] = s;
                pts.push(v);
            }
        }
        let h = hull(&pts).unwrap();
        assert!((h.volume - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(h.normals.len(), 8);
    }

    #[test]
    fn interior_points_are_ignored() {
        let mut pts = cube();
        pts.push(vec![0.1, 0.2, -0.3]);
        pts.push(vec![1.0, 0.0, 0.0]);
        let h = hull(&pts).unwrap();
        assert!((h.volume - 8.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(hull(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        assert!(hull(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0]]).is_err());
        // Origin on the boundary.
        assert!(hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
    }
}
