//! Measured metric model spaces.
//!
//! Five geometries with exact distances and unit-speed geodesics:
//! normed euclidean spaces, the hyperbolic plane, the modular torus model (the
//! hyperbolic plane with a thick/thin decomposition read off after reduction
//! to the `SL(2,ℤ)` fundamental domain), regular trees, and sup-metric
//! products. Each carries a growth exponent `h` used as the radial density
//! `e^{hs}` of its visual measure.

pub mod hyperbolic;
pub mod modular;
pub mod net;
pub mod tree;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::rng;
use hyperbolic::GeodesicFrame;
pub use net::{build_net, Net, Region};
pub use tree::TreeAddress;

/// One factor of a sup-metric product: a `dim`-dimensional `ℓ^p` space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormFactor {
    pub dim: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Euclidean { dim: usize, p: f64 },
    Hyperbolic,
    Modular,
    Tree { valence: u8 },
    SupProduct { factors: Vec<NormFactor> },
}

/// Model-specific coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Real(Vec<f64>),
    Complex(Complex64),
    Tree(TreeAddress),
}

impl Point {
    pub fn real(coords: impl Into<Vec<f64>>) -> Self {
        Point::Real(coords.into())
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Point::Complex(Complex64::new(re, im))
    }

    pub fn tree(addr: &str) -> Result<Self> {
        Ok(Point::Tree(addr.parse()?))
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Point::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Point::Complex(z) => Some(*z),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(v) => write!(f, "{v:?}"),
            Point::Complex(z) => write!(f, "{}{:+}i", z.re, z.im),
            Point::Tree(a) => write!(f, "{a}"),
        }
    }
}

/// Measure on spheres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereMeasure {
    /// Push-forward of the uniform (rotation-invariant) direction measure.
    VisualUniformDirection,
    /// Counting measure on a finite sphere; trees only.
    Counting,
}

/// An immutable, shareable measured metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpace {
    geometry: Geometry,
    growth: f64,
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(param(format!("norm exponent must be ≥ 1, got {p}")))
    }
}

impl ModelSpace {
    pub fn euclidean(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(param("dimension must be positive"));
        }
        check_exponent(p)?;
        Ok(ModelSpace { geometry: Geometry::Euclidean { dim, p }, growth: 0.0 })
    }

    pub fn hyperbolic_plane() -> Self {
        ModelSpace { geometry: Geometry::Hyperbolic, growth: 1.0 }
    }

    pub fn modular_torus() -> Self {
        ModelSpace { geometry: Geometry::Modular, growth: 1.0 }
    }

    pub fn regular_tree(valence: u8) -> Result<Self> {
        if !(3..=tree::MAX_VALENCE).contains(&valence) {
            return Err(param(format!("tree valence must be in 3..=26, got {valence}")));
        }
        let growth = ((valence - 1) as f64).ln();
        Ok(ModelSpace { geometry: Geometry::Tree { valence }, growth })
    }

    pub fn sup_product(factors: Vec<NormFactor>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.dim == 0) {
            return Err(param("sup-product needs at least one factor of positive dimension"));
        }
        for f in &factors {
            check_exponent(f.p)?;
        }
        Ok(ModelSpace { geometry: Geometry::SupProduct { factors }, growth: 0.0 })
    }

    /// Replaces the growth exponent of the visual measure.
    pub fn with_growth(mut self, h: f64) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(param(format!("growth exponent must be finite and ≥ 0, got {h}")));
        }
        self.growth = h;
        Ok(self)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match &self.geometry {
            Geometry::Euclidean { dim, p } => format!("euclidean(n={dim},p={p})"),
            Geometry::Hyperbolic => "hyperbolic-plane".into(),
            Geometry::Modular => "modular-torus".into(),
            Geometry::Tree { valence } => format!("regular-tree(q={valence})"),
            Geometry::SupProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(|f| format!("{}:{}", f.dim, f.p)).collect();
                format!("sup-product({})", parts.join(","))
            }
        }
    }

    fn real_dim(&self) -> Option<usize> {
        match &self.geometry {
            Geometry::Euclidean { dim, .. } => Some(*dim),
            Geometry::SupProduct { factors } => Some(factors.iter().map(|f| f.dim).sum()),
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.geometry, Geometry::Tree { .. })
    }

    /// Default base point: origin, `i`, or the tree root.
    pub fn basepoint(&self) -> Point {
        match &self.geometry {
            Geometry::Hyperbolic | Geometry::Modular => Point::complex(0.0, 1.0),
            Geometry::Tree { .. } => Point::Tree(TreeAddress::root()),
            _ => Point::Real(vec![0.0; self.real_dim().unwrap_or(0)]),
        }
    }

    /// Norm of a vector in a real-vector model.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match &self.geometry {
            Geometry::Euclidean { p, .. } => lp_norm(v, *p),
            Geometry::SupProduct { factors } => {
                let mut start = 0;
                let mut best: f64 = 0.0;
                for f in factors {
                    best = best.max(lp_norm(&v[start..start + f.dim], f.p));
                    start += f.dim;
                }
                best
            }
            _ => f64::NAN,
        }
    }

    /// Checks that `p` is a valid point of this model.
    pub fn validate(&self, p: &Point) -> Result<()> {
        match (&self.geometry, p) {
            (Geometry::Hyperbolic | Geometry::Modular, Point::Complex(z)) => {
                if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
                    Ok(())
                } else {
                    Err(domain(format!("point {p} must have finite coordinates and Im > 0")))
                }
            }
            (Geometry::Tree { valence }, Point::Tree(a)) => a.validate(*valence),
            (Geometry::Euclidean { .. } | Geometry::SupProduct { .. }, Point::Real(v)) => {
                let dim = self.real_dim().unwrap_or(0);
                if v.len() != dim {
                    Err(domain(format!("expected {dim} coordinates, got {}", v.len())))
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(domain("non-finite coordinate"))
                } else {
                    Ok(())
                }
            }
            _ => Err(domain(format!("point {p} does not belong to {}", self.label()))),
        }
    }

    /// Metric distance.
    pub fn distance(&self, u: &Point, v: &Point) -> Result<f64> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(self.distance_unchecked(u, v))
    }

    pub(crate) fn distance_unchecked(&self, u: &Point, v: &Point) -> f64 {
        match (u, v) {
            (Point::Complex(a), Point::Complex(b)) => hyperbolic::distance(*a, *b),
            (Point::Tree(a), Point::Tree(b)) => a.distance(b) as f64,
            (Point::Real(a), Point::Real(b)) => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
                self.norm(&diff)
            }
            _ => f64::NAN,
        }
    }

    /// Time-`t` point on the unit-speed ray from `u` through `v`.
    ///
    /// Real-vector models use the straight segment, which is a geodesic for
    /// every norm (and the canonical choice in sup metrics, where geodesics are
    /// not unique). Tree rays only visit vertices, so `t` must be an integer.
    pub fn geodesic_point(&self, u: &Point, v: &Point, t: f64) -> Result<Point> {
        self.validate(u)?;
        self.validate(v)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(param(format!("ray time must be finite and ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(u.clone());
        }
        if u == v {
            return Err(Error::DegenerateRay);
        }
        Ok(match (&self.geometry, u, v) {
            (Geometry::Hyperbolic | Geometry::Modular, Point::Complex(a), Point::Complex(b)) => {
                Point::Complex(GeodesicFrame::through(*a, *b).point_at(t))
            }
            (Geometry::Tree { valence }, Point::Tree(a), Point::Tree(b)) => {
                let steps = t.round();
                if (t - steps).abs() > 1e-9 {
                    return Err(param(format!("tree rays visit integer times only, got {t}")));
                }
                Point::Tree(a.ray_point(b, steps as usize, *valence))
            }
            (_, Point::Real(a), Point::Real(b)) => {
                let d = self.distance_unchecked(u, v);
                let s = t / d;
                Point::Real(a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect())
            }
            _ => unreachable!("validated above"),
        })
    }

    fn random_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let dim = self.real_dim().unwrap_or(0);
        loop {
            let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let n = self.norm(&g);
            if n > 1e-300 {
                return g.into_iter().map(|x| x / n).collect();
            }
        }
    }

    /// One point on the sphere of radius `r` about `x`.
    pub(crate) fn draw_sphere_point<R: Rng + ?Sized>(
        &self,
        x: &Point,
        r: f64,
        measure: SphereMeasure,
        rng: &mut R,
    ) -> Result<Point> {
        match (&self.geometry, x) {
            (Geometry::Tree { valence }, Point::Tree(a)) => {
                let steps = integral_radius(r)?;
                Ok(Point::Tree(a.random_sphere_point(steps, *valence, rng)))
            }
            _ if measure == SphereMeasure::Counting => Err(Error::UnsupportedMeasure(format!(
                "counting measure is only defined on trees, not {}",
                self.label()
            ))),
            (Geometry::Hyperbolic | Geometry::Modular, Point::Complex(z)) => {
                let theta = rng.random::<f64>() * TAU;
                Ok(Point::Complex(GeodesicFrame::at_angle(*z, theta).point_at(r)))
            }
            (_, Point::Real(base)) => {
                let dir = self.random_direction(rng);
                Ok(Point::Real(base.iter().zip(dir).map(|(b, d)| b + r * d).collect()))
            }
            _ => Err(domain(format!("point {x} does not belong to {}", self.label()))),
        }
    }

    /// `n` samples from the sphere of radius `r` about `x`. Sample `j` uses
    /// stream `j` of `seed`, so output is independent of evaluation order.
    pub fn sample_sphere(&self, x: &Point, r: f64, n: usize, measure: SphereMeasure, seed: u64) -> Result<Vec<Point>> {
        self.validate(x)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(param(format!("sphere radius must be positive, got {r}")));
        }
        if n == 0 {
            return Err(param("sample count must be ≥ 1"));
        }
        (0..n)
            .map(|j| self.draw_sphere_point(x, r, measure, &mut rng::stream(seed, j as u64)))
            .collect()
    }

    /// Radius drawn with density `∝ e^{hs}` on `[r−k, r]`.
    pub(crate) fn draw_shell_radius<R: Rng + ?Sized>(&self, r: f64, k: f64, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        shell_radius_quantile(self.growth, r, k, u)
    }

    /// One point from the annulus `B_r \ B_{r−k}` (the ball when `k = r`).
    pub(crate) fn draw_shell_point<R: Rng + ?Sized>(
        &self,
        x: &Point,
        r: f64,
        k: f64,
        measure: SphereMeasure,
        rng: &mut R,
    ) -> Result<Point> {
        if let Geometry::Tree { valence } = self.geometry {
            let s = self.draw_tree_shell_radius(valence, r, k, measure, rng)?;
            if s == 0 {
                return Ok(x.clone());
            }
            return self.draw_sphere_point(x, s as f64, measure, rng);
        }
        let s = self.draw_shell_radius(r, k, rng);
        if s <= 0.0 {
            return Ok(x.clone());
        }
        self.draw_sphere_point(x, s, measure, rng)
    }

    fn draw_tree_shell_radius<R: Rng + ?Sized>(
        &self,
        valence: u8,
        r: f64,
        k: f64,
        measure: SphereMeasure,
        rng: &mut R,
    ) -> Result<usize> {
        let hi = r.floor().max(0.0) as usize;
        let lo = (r - k).ceil().max(0.0) as usize;
        if lo > hi {
            return Err(param(format!("annulus [{}, {r}] contains no tree vertices", r - k)));
        }
        let weights: Vec<f64> = (lo..=hi)
            .map(|s| match measure {
                SphereMeasure::Counting => tree::sphere_cardinality(valence, s) as f64,
                SphereMeasure::VisualUniformDirection => (self.growth * (s as f64 - hi as f64)).exp(),
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut target = rng.random::<f64>() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return Ok(lo + i);
            }
            target -= w;
        }
        Ok(hi)
    }

    /// `n` samples from the annulus of outer radius `r` and width `k`, radius
    /// weighted by `e^{hs}` and directions as in [`ModelSpace::sample_sphere`].
    pub fn sample_annulus(&self, x: &Point, r: f64, k: f64, n: usize, seed: u64) -> Result<Vec<Point>> {
        self.validate(x)?;
        check_shell(r, k)?;
        if k >= r {
            return Err(param(format!("annulus width k={k} must be < r={r}")));
        }
        if n == 0 {
            return Err(param("sample count must be ≥ 1"));
        }
        (0..n)
            .map(|j| {
                self.draw_shell_point(x, r, k, self.default_measure(), &mut rng::stream(seed, j as u64))
            })
            .collect()
    }

    pub fn default_measure(&self) -> SphereMeasure {
        if self.is_discrete() {
            SphereMeasure::Counting
        } else {
            SphereMeasure::VisualUniformDirection
        }
    }

    /// Thick-part membership. Only the modular model has a thin part: `p` is
    /// thick iff its reduced representative has `Im ≤ 1/ε²` (the systole of
    /// the unit-area flat torus with modulus `z` is `1/√Im z`).
    pub fn thick_indicator(&self, p: &Point, epsilon: f64) -> Result<bool> {
        if !(epsilon > 0.0) {
            return Err(param(format!("thickness parameter must be positive, got {epsilon}")));
        }
        self.validate(p)?;
        match (&self.geometry, p) {
            (Geometry::Modular, Point::Complex(z)) => {
                let (reduced, _) = modular::reduce(*z)?;
                Ok(reduced_is_thick(reduced, epsilon))
            }
            _ => Ok(true),
        }
    }
}

pub(crate) fn reduced_is_thick(reduced: Complex64, epsilon: f64) -> bool {
    reduced.im <= 1.0 / (epsilon * epsilon)
}

fn integral_radius(r: f64) -> Result<usize> {
    let steps = r.round();
    if (r - steps).abs() > 1e-9 || steps < 0.0 {
        return Err(param(format!("tree spheres need integer radius, got {r}")));
    }
    Ok(steps as usize)
}

pub(crate) fn check_shell(r: f64, k: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(param(format!("radius must be positive, got {r}")));
    }
    if !(k >= 0.0) || k > r {
        return Err(param(format!("shell width k={k} must lie in [0, r={r}]")));
    }
    Ok(())
}

/// Inverse CDF of the radial density `∝ e^{hs}` on `[r−k, r]`.
pub fn shell_radius_quantile(h: f64, r: f64, k: f64, u: f64) -> f64 {
    if h * k < 1e-12 {
        return r - k + u * k;
    }
    // Measured down from r keeps precision when hk is large.
    let from_top = -(-(1.0 - u) * (-(-h * k).exp_m1())).ln_1p() / h;
    (r - from_top).max(r - k)
}

/// Radial mass `λ₀([a, b]) = ∫ e^{hs} ds` of the visual measure.
pub fn radial_mass(h: f64, a: f64, b: f64) -> f64 {
    if h == 0.0 {
        b - a
    } else {
        ((h * b).exp() - (h * a).exp()) / h
    }
}
