//! Time spent in the thick part along geodesics.
//!
//! Integrals over time use the midpoint rule on cells of width `dt`; the last
//! cell is shortened to end exactly at the segment endpoint. On the modular
//! model the geodesic is followed by the renormalized flow, so arbitrarily
//! long rays stay representable.

use rayon::prelude::*;

use crate::error::{domain, param, Result};
use crate::rng;
use crate::space::modular::ModularFlow;
use crate::space::{check_shell, reduced_is_thick, Geometry, ModelSpace, Point};

/// Walks a ray and reports thickness at cell midpoints.
enum Walker {
    Modular(ModularFlow),
    AlwaysThick,
}

impl Walker {
    fn new(space: &ModelSpace, x: &Point, through: &Point) -> Result<Self> {
        match (space.geometry(), x, through) {
            (Geometry::Modular, Point::Complex(a), Point::Complex(b)) => Ok(Walker::Modular(ModularFlow::new(*a, *b)?)),
            _ => Ok(Walker::AlwaysThick),
        }
    }

    fn advance(&mut self, dt: f64) -> Result<()> {
        if let Walker::Modular(flow) = self {
            flow.advance(dt)?;
        }
        Ok(())
    }

    fn thick(&self, epsilon: f64) -> bool {
        match self {
            Walker::Modular(flow) => reduced_is_thick(flow.base(), epsilon),
            Walker::AlwaysThick => true,
        }
    }
}

/// Thick indicator of each cell along the ray, paired with cell widths.
fn cell_profile(
    space: &ModelSpace,
    x: &Point,
    through: &Point,
    length: f64,
    epsilon: f64,
    dt: f64,
) -> Result<Vec<(f64, bool)>> {
    let mut walker = Walker::new(space, x, through)?;
    let full = (length / dt).floor() as usize;
    let rest = length - full as f64 * dt;
    let mut cells = Vec::with_capacity(full + 1);
    let mut here = 0.0;
    for j in 0..=full {
        let width = if j < full { dt } else { rest };
        if width <= 0.0 {
            break;
        }
        let mid = j as f64 * dt + width / 2.0;
        walker.advance(mid - here)?;
        here = mid;
        cells.push((width, walker.thick(epsilon)));
    }
    Ok(cells)
}

fn check_params(epsilon: f64, dt: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(param(format!("thickness parameter must be positive, got {epsilon}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(param(format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

/// Fraction of the first `length` units of the ray from `x` through `through`
/// that lies in the thick part.
pub fn ray_thick_fraction(
    space: &ModelSpace,
    x: &Point,
    through: &Point,
    length: f64,
    epsilon: f64,
    dt: f64,
) -> Result<f64> {
    check_params(epsilon, dt)?;
    space.validate(x)?;
    space.validate(through)?;
    if x == through {
        return Err(domain("degenerate segment"));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(param(format!("ray length must be positive, got {length}")));
    }
    let cells = cell_profile(space, x, through, length, epsilon, dt)?;
    // Accumulating the thin side keeps an all-thick ray at exactly 1.
    let thin: Vec<f64> = cells.iter().map(|&(w, t)| if t { 0.0 } else { w }).collect();
    Ok(1.0 - rng::pairwise_sum(&thin) / length)
}

/// Fraction of `[x, y]` spent in the thick part.
pub fn thick_stat(space: &ModelSpace, x: &Point, y: &Point, epsilon: f64, dt: f64) -> Result<f64> {
    space.validate(x)?;
    space.validate(y)?;
    if x == y {
        return Err(domain("thick-stat of a degenerate segment"));
    }
    ray_thick_fraction(space, x, y, space.distance_unchecked(x, y), epsilon, dt)
}

fn p1_holds(cells: &[(f64, bool)], lo: f64, theta: f64) -> bool {
    let mut time = 0.0;
    let mut thick = 0.0;
    for &(w, t) in cells {
        time += w;
        if t {
            thick += w;
        }
        // Grid times are cell ends; compare with a relative guard for rounding.
        if time >= lo * (1.0 - 1e-12) && thick < theta * time {
            return false;
        }
    }
    true
}

/// Fraction of sampled shell points `y` whose ray `x → y` keeps thick-stat at
/// least `θ` for every grid time `t ∈ [σr, r]`.
#[allow(clippy::too_many_arguments)]
pub fn p1_fraction(
    space: &ModelSpace,
    x: &Point,
    r: f64,
    k: f64,
    epsilon: f64,
    theta: f64,
    sigma: f64,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<f64> {
    check_params(epsilon, dt)?;
    check_shell(r, k)?;
    space.validate(x)?;
    if !(sigma > 0.0 && sigma < 1.0) || !(theta > 0.0 && theta < 1.0) {
        return Err(param(format!("need 0 < σ < 1 and 0 < θ < 1, got σ={sigma}, θ={theta}")));
    }
    if n == 0 {
        return Err(param("sample count must be ≥ 1"));
    }
    if !matches!(space.geometry(), Geometry::Modular) {
        return Ok(1.0);
    }
    let measure = space.default_measure();
    let hits: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut g = rng::stream(seed, j as u64);
            let y = if k == 0.0 {
                space.draw_sphere_point(x, r, measure, &mut g)?
            } else {
                space.draw_shell_point(x, r, k, measure, &mut g)?
            };
            if &y == x {
                return Ok(1.0);
            }
            let cells = cell_profile(space, x, &y, r, epsilon, dt)?;
            Ok(if p1_holds(&cells, sigma * r, theta) { 1.0 } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(rng::pairwise_sum(&hits) / n as f64)
}

/// For `n` rays from `x` in uniformly random directions, the longest run of
/// consecutive thick cells inside `[σr, 2σr]`.
#[allow(clippy::too_many_arguments)]
pub fn longest_thick_runs(
    space: &ModelSpace,
    x: &Point,
    r: f64,
    sigma: f64,
    epsilon: f64,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    check_params(epsilon, dt)?;
    space.validate(x)?;
    if !(r > 0.0) || !(sigma > 0.0 && sigma <= 0.5) {
        return Err(param("need r > 0 and 0 < σ ≤ 1/2"));
    }
    let measure = space.default_measure();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut g = rng::stream(seed, j as u64);
            let dir = space.draw_sphere_point(x, 1.0, measure, &mut g)?;
            let cells = cell_profile(space, x, &dir, 2.0 * sigma * r, epsilon, dt)?;
            let (mut time, mut run, mut best) = (0.0, 0.0, 0.0f64);
            for (w, t) in cells {
                let mid = time + w / 2.0;
                time += w;
                if mid < sigma * r {
                    continue;
                }
                run = if t { run + w } else { 0.0 };
                best = best.max(run);
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_segments_are_fully_thick() {
        let e = ModelSpace::euclidean(2, 2.0).unwrap();
        let v = thick_stat(&e, &Point::real([0.0, 0.0]), &Point::real([3.0, 4.0]), 0.5, 0.1).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn vertical_modular_segment_is_thin_above_threshold_height() {
        let m = ModelSpace::modular_torus();
        let (eps, t_big) = (0.5, 6.0f64);
        let t0: f64 = 1.0 / (eps * eps);
        let v = thick_stat(&m, &Point::complex(0.0, 1.0), &Point::complex(0.0, t_big.exp()), eps, 0.1).unwrap();
        assert!((v - t0.ln() / t_big).abs() <= 0.1 / t_big, "{v}");
    }

    #[test]
    fn tiny_epsilon_empties_the_thin_part() {
        let m = ModelSpace::modular_torus();
        let v = thick_stat(&m, &Point::complex(0.0, 1.0), &Point::complex(0.0, 400.0), 1e-3, 0.1).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn degenerate_segment_is_a_domain_error() {
        let m = ModelSpace::modular_torus();
        let p = Point::complex(0.0, 1.0);
        assert!(matches!(thick_stat(&m, &p, &p, 0.5, 0.1), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn p1_trivial_and_extreme_cases() {
        let e = ModelSpace::euclidean(2, 2.0).unwrap();
        assert_eq!(p1_fraction(&e, &Point::real([0.0, 0.0]), 10.0, 1.0, 0.5, 0.99, 0.2, 50, 0.1, 0).unwrap(), 1.0);
        let m = ModelSpace::modular_torus();
        let f = p1_fraction(&m, &m.basepoint(), 30.0, 1.0, 0.9, 0.999, 0.2, 100, 0.1, 0).unwrap();
        assert!(f < 0.1, "{f}");
    }

    #[test]
    fn p1_cell_logic() {
        let cells = vec![(1.0, true), (1.0, false), (1.0, false), (1.0, true)];
        assert!(p1_holds(&cells, 1.0, 0.3));
        assert!(!p1_holds(&cells, 1.0, 0.5));
        assert!(p1_holds(&cells, 4.0, 0.5));
    }
}
