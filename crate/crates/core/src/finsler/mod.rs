//! Centrally symmetric convex bodies: volumes, polar bodies, Mahler volume and
//! the Busemann / Holmes–Thompson densities of a normed space.
//!
//! For a norm with unit ball `B` in fixed linear coordinates the Busemann
//! density is `ε_n / λ(B)` and the Holmes–Thompson density is `λ(B°) / ε_n`,
//! where `ε_n` is the volume of the euclidean unit ball. Their ratio equals
//! `ε_n² / M(B)` and so is pinned between `1` and `n^{n/2}` by the
//! Blaschke–Santaló and John bounds on the Mahler volume `M(B) = λ(B)·λ(B°)`.

pub mod hull;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{param, Error, Result};
use crate::rng;

pub const MAX_MONTE_CARLO_DIM: usize = 6;

/// Volume of the euclidean unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

/// Conjugate exponent `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Symmetric polytope in dimension 2 or 3, held in both vertex and facet form.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
    normals: Vec<Vec<f64>>,
    volume: f64,
}

impl Polytope {
    /// Vertex list that must already be centrally symmetric.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let tol = 1e-9;
        for v in &vertices {
            let has_opposite = vertices
                .iter()
                .any(|w| w.len() == v.len() && w.iter().zip(v).all(|(a, b)| (a + b).abs() <= tol));
            if !has_opposite {
                return Err(param(format!("vertex list is not centrally symmetric: {v:?} has no antipode")));
            }
        }
        Self::symmetric_hull(vertices)
    }

    /// Convex hull of the points together with their negatives.
    pub fn symmetric_hull(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        if !(2..=3).contains(&dim) || points.iter().any(|p| p.len() != dim) {
            return Err(param("polytopes are supported in dimensions 2 and 3"));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(param("non-finite polytope vertex"));
        }
        let mut all = points.clone();
        all.extend(points.iter().map(|p| p.iter().map(|x| -x).collect::<Vec<f64>>()));
        let h = hull::hull(&all)?;
        Ok(Polytope { vertices: h.vertices, normals: h.normals, volume: h.volume })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facet normals `a` with facets `a · x = 1`.
    pub fn facet_normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        self.normals.iter().map(|a| dot(a, x)).fold(0.0, f64::max)
    }

    fn support(&self, u: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(v, u)).fold(0.0, f64::max)
    }

    /// The polar polytope: its facets are this polytope's vertices, so its
    /// membership test is `ξ ↦ max_v ξ · v ≤ 1`.
    pub fn polar(&self) -> Result<Polytope> {
        let polar = Polytope::symmetric_hull(self.normals.clone())?;
        Ok(Polytope { normals: self.vertices.clone(), ..polar })
    }
}

type MembershipFn = dyn Fn(&[f64]) -> bool + Send + Sync;
type SupportFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Body given only by a membership test, a support function, and radii
/// `inner ≤ |x| ≤ outer` bracketing its boundary.
#[derive(Clone)]
pub struct OracleBody {
    pub dim: usize,
    membership: Arc<MembershipFn>,
    support: Arc<SupportFn>,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl OracleBody {
    pub fn new(
        dim: usize,
        membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        support: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        inner_radius: f64,
        outer_radius: f64,
    ) -> Result<Self> {
        if dim == 0 || !(inner_radius > 0.0) || !(outer_radius >= inner_radius) || !outer_radius.is_finite() {
            return Err(param("oracle body needs dim ≥ 1 and 0 < inner ≤ outer < ∞"));
        }
        Ok(OracleBody { dim, membership: Arc::new(membership), support: Arc::new(support), inner_radius, outer_radius })
    }

    /// Minkowski gauge by bisection along the ray through `x`.
    fn gauge(&self, x: &[f64]) -> f64 {
        let len = dot(x, x).sqrt();
        if len == 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (self.inner_radius / len, self.outer_radius / len);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let probe: Vec<f64> = x.iter().map(|c| c * mid).collect();
            if (self.membership)(&probe) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        1.0 / (0.5 * (lo + hi))
    }

    fn polar(&self) -> OracleBody {
        let primal = self.clone();
        let support = self.support.clone();
        OracleBody {
            dim: self.dim,
            membership: Arc::new(move |xi: &[f64]| support(xi) <= 1.0),
            support: Arc::new(move |v: &[f64]| primal.gauge(v)),
            inner_radius: 1.0 / self.outer_radius,
            outer_radius: 1.0 / self.inner_radius,
        }
    }
}

impl fmt::Debug for OracleBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleBody")
            .field("dim", &self.dim)
            .field("inner_radius", &self.inner_radius)
            .field("outer_radius", &self.outer_radius)
            .finish_non_exhaustive()
    }
}

/// Centrally symmetric convex body containing a neighbourhood of the origin.
#[derive(Clone, Debug)]
pub enum ConvexBody {
    Polytope(Polytope),
    Ellipsoid { axes: Vec<f64> },
    LpBall { dim: usize, p: f64 },
    Oracle(OracleBody),
}

/// How to compute a volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A volume with its standard error (zero for exact values).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        VolumeEstimate { value, std_error: 0.0 }
    }
}

impl ConvexBody {
    pub fn ellipsoid(axes: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(param("ellipsoid semi-axes must be positive and finite"));
        }
        Ok(ConvexBody::Ellipsoid { axes })
    }

    pub fn lp_ball(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 || !(p >= 1.0) {
            return Err(param(format!("ℓ^p ball needs dim ≥ 1 and p ∈ [1, ∞], got p = {p}")));
        }
        Ok(ConvexBody::LpBall { dim, p })
    }

    pub fn unit_ball(dim: usize) -> Self {
        ConvexBody::Ellipsoid { axes: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ellipsoid { axes } => axes.len(),
            ConvexBody::LpBall { dim, .. } => *dim,
            ConvexBody::Oracle(o) => o.dim,
        }
    }

    /// Minkowski gauge `inf { λ > 0 : x ∈ λ·body }`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.gauge(x),
            ConvexBody::Ellipsoid { axes } => x.iter().zip(axes).map(|(c, a)| (c / a).powi(2)).sum::<f64>().sqrt(),
            ConvexBody::LpBall { p, .. } => lp_norm(x, *p),
            ConvexBody::Oracle(o) => o.gauge(x),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexBody::Oracle(o) => (o.membership)(x),
            _ => self.gauge(x) <= 1.0,
        }
    }

    /// Support function `h(u) = max_{x ∈ body} x · u`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.support(u),
            ConvexBody::Ellipsoid { axes } => u.iter().zip(axes).map(|(c, a)| (c * a).powi(2)).sum::<f64>().sqrt(),
            ConvexBody::LpBall { p, .. } => lp_norm(u, conjugate_exponent(*p)),
            ConvexBody::Oracle(o) => (o.support)(u),
        }
    }

    /// Polar body `{ξ : ξ · v ≤ 1 for all v in body}`.
    pub fn polar(&self) -> Result<ConvexBody> {
        Ok(match self {
            ConvexBody::Polytope(p) => ConvexBody::Polytope(p.polar()?),
            ConvexBody::Ellipsoid { axes } => ConvexBody::Ellipsoid { axes: axes.iter().map(|a| 1.0 / a).collect() },
            ConvexBody::LpBall { dim, p } => ConvexBody::LpBall { dim: *dim, p: conjugate_exponent(*p) },
            ConvexBody::Oracle(o) => ConvexBody::Oracle(o.polar()),
        })
    }

    /// Closed-form volume where one exists.
    pub fn exact_volume(&self) -> Result<f64> {
        match self {
            ConvexBody::Polytope(p) => Ok(p.volume()),
            ConvexBody::Ellipsoid { axes } => Ok(unit_ball_volume(axes.len()) * axes.iter().product::<f64>()),
            ConvexBody::LpBall { dim, p } => {
                let n = *dim as f64;
                if p.is_infinite() {
                    Ok(2f64.powf(n))
                } else {
                    Ok(2f64.powf(n) * gamma(1.0 + 1.0 / p).powf(n) / gamma(1.0 + n / p))
                }
            }
            ConvexBody::Oracle(_) => Err(Error::UnsupportedMethod("no exact volume for oracle bodies".into())),
        }
    }

    /// Rejection sampling in the bounding box `∏ [−h(eᵢ), h(eᵢ)]`.
    pub fn monte_carlo_volume(&self, samples: u64, seed: u64) -> Result<VolumeEstimate> {
        let dim = self.dim();
        if dim > MAX_MONTE_CARLO_DIM {
            return Err(param(format!("Monte Carlo volumes are limited to dimension ≤ {MAX_MONTE_CARLO_DIM}")));
        }
        if samples < 2 {
            return Err(param("Monte Carlo volume needs at least two samples"));
        }
        let half_widths: Vec<f64> = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                self.support(&e)
            })
            .collect();
        let box_volume: f64 = half_widths.iter().map(|w| 2.0 * w).product();
        const CHUNK: u64 = 8192;
        let chunks = samples.div_ceil(CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = rng::stream(seed, c);
                let count = CHUNK.min(samples - c * CHUNK);
                let mut x = vec![0.0; dim];
                let mut hits = 0u64;
                for _ in 0..count {
                    for (xi, w) in x.iter_mut().zip(&half_widths) {
                        *xi = (2.0 * rng.random::<f64>() - 1.0) * w;
                    }
                    if self.contains(&x) {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        let frac = hits as f64 / samples as f64;
        Ok(VolumeEstimate {
            value: frac * box_volume,
            std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
        })
    }

    pub fn volume(&self, method: VolumeMethod) -> Result<VolumeEstimate> {
        match method {
            VolumeMethod::Exact => self.exact_volume().map(VolumeEstimate::exact),
            VolumeMethod::MonteCarlo { samples, seed } => self.monte_carlo_volume(samples, seed),
        }
    }
}

/// Number of rejection samples giving relative standard error `target` for a
/// body occupying fraction `fill` of its bounding box.
pub fn samples_for_relative_error(fill: f64, target: f64) -> u64 {
    ((1.0 - fill) / (fill * target * target)).ceil() as u64
}

/// Mahler volume with the John and Blaschke–Santaló bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MahlerReport {
    pub dim: usize,
    pub volume: VolumeEstimate,
    pub polar_volume: VolumeEstimate,
    pub mahler: f64,
    pub std_error: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_violated: bool,
    pub upper_violated: bool,
}

impl MahlerReport {
    pub fn within_bounds(&self) -> bool {
        !self.lower_violated && !self.upper_violated
    }
}

/// Slack for exact evaluations, which still carry rounding error.
const EXACT_RELATIVE_SLACK: f64 = 1e-9;

fn polar_method(method: VolumeMethod) -> VolumeMethod {
    match method {
        VolumeMethod::Exact => VolumeMethod::Exact,
        VolumeMethod::MonteCarlo { samples, seed } => {
            VolumeMethod::MonteCarlo { samples, seed: rng::derive_seed(seed, 0x9013) }
        }
    }
}

/// `M = λ(body) · λ(body°)`, flagging violations of
/// `ε_n² / n^{n/2} ≤ M ≤ ε_n²` beyond three standard errors.
pub fn mahler(body: &ConvexBody, method: VolumeMethod) -> Result<MahlerReport> {
    let n = body.dim();
    let volume = body.volume(method)?;
    let polar_volume = body.polar()?.volume(polar_method(method))?;
    let mahler = volume.value * polar_volume.value;
    let std_error = ((polar_volume.value * volume.std_error).powi(2) + (volume.value * polar_volume.std_error).powi(2)).sqrt();
    let eps = unit_ball_volume(n);
    let upper_bound = eps * eps;
    let lower_bound = upper_bound / (n as f64).powf(n as f64 / 2.0);
    let slack = 3.0 * std_error + EXACT_RELATIVE_SLACK * upper_bound;
    Ok(MahlerReport {
        dim: n,
        volume,
        polar_volume,
        mahler,
        std_error,
        lower_bound,
        upper_bound,
        lower_violated: mahler < lower_bound - slack,
        upper_violated: mahler > upper_bound + slack,
    })
}

/// Busemann density `ε_n / λ(body)`.
pub fn busemann_density(body: &ConvexBody, method: VolumeMethod) -> Result<f64> {
    Ok(unit_ball_volume(body.dim()) / body.volume(method)?.value)
}

/// Holmes–Thompson density `λ(body°) / ε_n`.
pub fn holmes_thompson_density(body: &ConvexBody, method: VolumeMethod) -> Result<f64> {
    Ok(body.polar()?.volume(polar_method(method))?.value / unit_ball_volume(body.dim()))
}

/// Both densities and their ratio, with its propagated standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPair {
    pub dim: usize,
    pub busemann: f64,
    pub holmes_thompson: f64,
    pub ratio: f64,
    pub ratio_std_error: f64,
}

impl DensityPair {
    /// `1 ≤ f/g ≤ n^{n/2}` up to three standard errors.
    pub fn within_sandwich(&self) -> bool {
        let slack = 3.0 * self.ratio_std_error + EXACT_RELATIVE_SLACK;
        let top = (self.dim as f64).powf(self.dim as f64 / 2.0);
        self.ratio >= 1.0 - slack && self.ratio <= top * (1.0 + slack)
    }
}

pub fn densities(body: &ConvexBody, method: VolumeMethod) -> Result<DensityPair> {
    let n = body.dim();
    let eps = unit_ball_volume(n);
    let vol = body.volume(method)?;
    let pol = body.polar()?.volume(polar_method(method))?;
    let busemann = eps / vol.value;
    let holmes_thompson = pol.value / eps;
    let ratio = busemann / holmes_thompson;
    // ratio = ε² / (V·W); relative errors add in quadrature.
    let rel = ((vol.std_error / vol.value).powi(2) + (pol.std_error / pol.value).powi(2)).sqrt();
    Ok(DensityPair { dim: n, busemann, holmes_thompson, ratio, ratio_std_error: ratio * rel })
}

fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = dot(&g, &g).sqrt();
        if n > 1e-12 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Symmetrized hull of `k` uniform points on the unit sphere, `k` drawn from
/// `4..=40`. Retries the (measure-zero) degenerate draws.
pub fn random_symmetric_polytope<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Polytope> {
    for _ in 0..100 {
        let k = rng.random_range(4..=40);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| random_unit_vector(dim, rng)).collect();
        if let Ok(p) = Polytope::symmetric_hull(pts) {
            return Ok(p);
        }
    }
    Err(param("could not draw a non-degenerate polytope"))
}

/// Ellipsoid with semi-axes log-uniform in `[1/4, 4]`.
pub fn random_ellipsoid<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ConvexBody {
    let axes = (0..dim).map(|_| (rng.random_range(-1.0..1.0) * 4f64.ln()).exp()).collect();
    ConvexBody::Ellipsoid { axes }
}
