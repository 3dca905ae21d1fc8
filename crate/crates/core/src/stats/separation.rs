//! Fellow-travelling of random ray pairs and fitted decay rates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::rng;
use crate::space::{ModelSpace, Point};

/// Pairs still within `M0` of each other at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationPoint {
    pub t: f64,
    pub hits: u64,
    pub n: u64,
}

impl SeparationPoint {
    pub fn fraction(&self) -> f64 {
        self.hits as f64 / self.n as f64
    }
}

/// For `n` pairs `(y, z)` on the sphere of radius `r` about `x`, counts at
/// each time `t` the pairs with `d(y_t, z_t) < M0`. Every time shares the
/// same pairs.
pub fn separation_profile(
    space: &ModelSpace,
    x: &Point,
    r: f64,
    times: &[f64],
    m0: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<SeparationPoint>> {
    space.validate(x)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(param(format!("radius must be positive, got {r}")));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= r)) {
        return Err(param(format!("separation time {t} must lie in [0, r={r}]")));
    }
    if !(m0 > 0.0) {
        return Err(param(format!("closeness threshold must be positive, got {m0}")));
    }
    if n == 0 {
        return Err(param("sample count must be ≥ 1"));
    }
    let measure = space.default_measure();
    let rows: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut g = rng::stream(seed, j as u64);
            let y = space.draw_sphere_point(x, r, measure, &mut g)?;
            let z = space.draw_sphere_point(x, r, measure, &mut g)?;
            times
                .iter()
                .map(|&t| {
                    if t == 0.0 {
                        return Ok(true);
                    }
                    let yt = space.geodesic_point(x, &y, t)?;
                    let zt = space.geodesic_point(x, &z, t)?;
                    Ok(space.distance_unchecked(&yt, &zt) < m0)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(i, &t)| SeparationPoint { t, hits: rows.iter().filter(|row| row[i]).count() as u64, n: n as u64 })
        .collect())
}

/// Fraction of pairs from the sphere of radius `r` whose time-`t` points are
/// within `M0` of each other.
pub fn separation_fraction(
    space: &ModelSpace,
    x: &Point,
    r: f64,
    t: f64,
    m0: f64,
    n: usize,
    seed: u64,
) -> Result<f64> {
    Ok(separation_profile(space, x, r, &[t], m0, n, seed)?[0].fraction())
}

/// Weighted least-squares line `log f ≈ intercept + slope·u`, with `u = t`
/// (exponential) or `u = log t` (power law) and weights equal to hit counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Weighted residual sum of squares, normalized by total weight.
    pub residual: f64,
    pub points_used: usize,
}

fn weighted_line(points: &[SeparationPoint], abscissa: impl Fn(f64) -> f64) -> Result<DecayFit> {
    let used: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.hits > 0)
        .map(|p| (abscissa(p.t), p.fraction().ln(), p.hits as f64))
        .collect();
    if used.len() < 2 {
        return Err(param("need at least two times with nonzero counts to fit a decay"));
    }
    let w: f64 = used.iter().map(|p| p.2).sum();
    let mu = used.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let mv = used.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxx: f64 = used.iter().map(|p| p.2 * (p.0 - mu).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| p.2 * (p.0 - mu) * (p.1 - mv)).sum();
    if sxx == 0.0 {
        return Err(param("decay fit needs at least two distinct times"));
    }
    let slope = sxy / sxx;
    let intercept = mv - slope * mu;
    let residual = used.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / w;
    Ok(DecayFit { slope, intercept, residual, points_used: used.len() })
}

/// Fit of `log f` against `t`.
pub fn fit_exponential(points: &[SeparationPoint]) -> Result<DecayFit> {
    weighted_line(points, |t| t)
}

/// Fit of `log f` against `log t`; times must be positive.
pub fn fit_power_law(points: &[SeparationPoint]) -> Result<DecayFit> {
    if points.iter().any(|p| p.hits > 0 && p.t <= 0.0) {
        return Err(param("power-law fit needs positive times"));
    }
    weighted_line(points, f64::ln)
}
