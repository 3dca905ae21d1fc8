//! Executes one experiment config and collects its rows and checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::catalog::defaults;
use super::config::{BodyConfig, BodyKind, ExperimentConfig, ExperimentKind};
use super::report::{Check, Report, Row};
use crate::coarse::{
    annular_chain, annular_sandwich, max_log_identity_check, random_profile, reorganized_distance,
    repackaged_distance, threshold_floor, twist_bounds, HoroballPair, ProjectionProfile,
};
use crate::error::{Error, Result};
use crate::finsler::{self, densities, mahler, ConvexBody};
use crate::rng::{derive_seed, mean_and_stderr, stream};
use crate::space::{build_net, Geometry, ModelSpace, Point, Region};
use crate::stats::separation::{fit_exponential, fit_power_law};
use crate::stats::{
    digest, discretize_geodesic, estimate_e, longest_thick_runs, p1_fraction, ray_thick_fraction,
    separation_profile, thin_triangle_probe,
};

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Parameter(format!("missing parameter `{name}`")))
}

fn count(n: u64) -> Result<usize> {
    if n == 0 {
        return Err(Error::Parameter("`n` must be at least 1".into()));
    }
    usize::try_from(n).map_err(|_| Error::Parameter(format!("`n` = {n} is too large")))
}

fn binomial_se(f: f64, n: usize) -> f64 {
    (f * (1.0 - f) / n as f64).sqrt()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Runs `cfg` (seed already resolved). Errors are configuration or
/// precondition failures; failed invariants are reported in the checks.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let mut cfg = cfg.clone();
    let d = defaults(cfg.experiment);
    let p = &mut cfg.params;
    macro_rules! fill {
        ($($f:ident),*) => { $( if p.$f.is_none() { p.$f = d.$f.clone(); } )* };
    }
    fill!(r, k, n, epsilon, theta, sigma, m0, c, dt, ds, tau, t_min, t_max, t_step, length, epsilon0, profile);
    let digest = digest(&cfg.to_toml());
    let (space_label, rows, checks) = match cfg.experiment {
        kind if kind.needs_space() => {
            let space = cfg.space()?;
            let (rows, checks) = match kind {
                ExperimentKind::EstimateE => run_estimate_e(&cfg, &space)?,
                ExperimentKind::ThickStat => run_thick_stat(&cfg, &space)?,
                ExperimentKind::P1 => run_p1(&cfg, &space)?,
                ExperimentKind::Separation => run_separation(&cfg, &space)?,
                ExperimentKind::ThinTriangle => run_thin_triangle(&cfg, &space)?,
                ExperimentKind::Discretize => run_discretize(&cfg, &space)?,
                _ => unreachable!("body and arithmetic experiments handled below"),
            };
            (space.label(), rows, checks)
        }
        ExperimentKind::Mahler | ExperimentKind::Densities => {
            let body = cfg.body()?;
            let (rows, checks) = run_bodies(&cfg, body)?;
            (body_label(body), rows, checks)
        }
        _ => {
            let (rows, checks) = run_coarse(&cfg)?;
            ("arithmetic".to_string(), rows, checks)
        }
    };
    Ok(Report { experiment: cfg.experiment.to_string(), space: space_label, seed: cfg.seed, digest, rows, checks })
}

fn run_estimate_e(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (r, k, n) = (need(&p.r, "r")?, need(&p.k, "k")?, need(&p.n, "n")?);
    if k >= r {
        return Err(Error::Parameter(format!("annulus width k = {k} must be smaller than r = {r}")));
    }
    let est = estimate_e(space, &space.basepoint(), r, k, count(n)?, cfg.seed)?;
    let ok = (0.0..=2.0).contains(&est.mean);
    let row = Row::new(est.mean, Some(est.std_error)).shell(Some(r), Some(k), Some(n)).extra1("n_pairs", est.n_pairs).pass(ok);
    Ok((vec![row], vec![Check::new("mean within [0, 2]", ok, format!("mean {}", est.mean))]))
}

/// Unit-distance points from the base point in `n` sampled directions.
fn directions(space: &ModelSpace, n: usize, seed: u64) -> Result<Vec<Point>> {
    space.sample_sphere(&space.basepoint(), 1.0, n, space.default_measure(), seed)
}

fn run_thick_stat(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (length, eps, dt, n) = (need(&p.length, "length")?, need(&p.epsilon, "epsilon")?, need(&p.dt, "dt")?, need(&p.n, "n")?);
    let x = space.basepoint();
    let through = directions(space, count(n)?, cfg.seed)?;
    let fractions: Vec<f64> =
        through.par_iter().map(|y| ray_thick_fraction(space, &x, y, length, eps, dt)).collect::<Result<_>>()?;
    let (mean, se) = mean_and_stderr(&fractions);
    let in_range = fractions.iter().all(|f| (0.0..=1.0).contains(f));
    let mut row = Row::new(mean, Some(se)).shell(Some(length), None, Some(n)).extra1("epsilon", eps);
    if matches!(space.geometry(), Geometry::Modular) && eps <= 1.0 {
        // Thick part {Im ≤ 1/ε²} of the fundamental domain: area π/3 − ε².
        row = row.extra2("thick_area_fraction", 1.0 - 3.0 * eps * eps / std::f64::consts::PI);
    }
    let check = Check::new(
        "every thick fraction within [0, 1]",
        in_range,
        format!("min {}, max {}", fractions.iter().cloned().fold(f64::INFINITY, f64::min), fractions.iter().cloned().fold(0.0, f64::max)),
    );
    Ok((vec![row.pass(in_range)], vec![check]))
}

fn run_p1(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (r, k, eps, theta, sigma, n, dt) = (
        need(&p.r, "r")?,
        need(&p.k, "k")?,
        need(&p.epsilon, "epsilon")?,
        need(&p.theta, "theta")?,
        need(&p.sigma, "sigma")?,
        count(need(&p.n, "n")?)?,
        need(&p.dt, "dt")?,
    );
    let x = space.basepoint();
    let f = p1_fraction(space, &x, r, k, eps, theta, sigma, n, dt, cfg.seed)?;
    let mut row = Row::new(f, Some(binomial_se(f, n))).shell(Some(r), Some(k), Some(n as u64)).extra1("theta", theta);
    if sigma <= 0.5 {
        let runs = longest_thick_runs(space, &x, r, sigma, eps, n, dt, derive_seed(cfg.seed, 1))?;
        row = row.extra2("median_longest_thick_run", median(runs));
    }
    let ok = (0.0..=1.0).contains(&f);
    Ok((vec![row.pass(ok)], vec![Check::new("P1 fraction within [0, 1]", ok, format!("fraction {f}"))]))
}

fn run_separation(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (r, m0, n) = (need(&p.r, "r")?, need(&p.m0, "m0")?, count(need(&p.n, "n")?)?);
    let (t0, t1, dt) = (need(&p.t_min, "t_min")?, need(&p.t_max, "t_max")?, need(&p.t_step, "t_step")?);
    if !(dt > 0.0) || !(t0 <= t1) {
        return Err(Error::Parameter(format!("need t_min ≤ t_max and t_step > 0, got {t0}, {t1}, {dt}")));
    }
    let steps = ((t1 - t0) / dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| t0 + i as f64 * dt).collect();
    let prof = separation_profile(space, &space.basepoint(), r, &times, m0, n, cfg.seed)?;
    let mut rows: Vec<Row> = prof
        .iter()
        .map(|pt| {
            let f = pt.fraction();
            Row::new(f, Some(binomial_se(f, n))).shell(Some(r), None, Some(n as u64)).extra1("t", pt.t).extra2("hits", pt.hits)
        })
        .collect();
    for (name, fit) in [("exponential", fit_exponential(&prof)), ("power-law", fit_power_law(&prof))] {
        if let Ok(fit) = fit {
            rows.push(Row::new(fit.slope, None).shell(Some(r), None, Some(n as u64)).extra1("fit", name).extra2("residual", fit.residual));
        }
    }
    let mut checks = Vec::new();
    // Distances between points at time t on rays from a common point are
    // monotone in t on every model except the torus quotient.
    if !matches!(space.geometry(), Geometry::Modular) {
        let ok = prof.windows(2).all(|w| w[1].hits <= w[0].hits);
        checks.push(Check::new("separation counts nonincreasing in t", ok, format!("{} times", prof.len())));
    }
    Ok((rows, checks))
}

fn run_thin_triangle(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (r, c, n) = (need(&p.r, "r")?, need(&p.c, "c")?, count(need(&p.n, "n")?)?);
    let ds = p.ds.unwrap_or(f64::min(0.05, c / 20.0));
    let x = space.basepoint();
    let pts = space.sample_sphere(&x, r, 2 * n, space.default_measure(), cfg.seed)?;
    let probes: Vec<Option<f64>> = pts
        .par_chunks(2)
        .map(|pair| {
            let (y, z) = (&pair[0], &pair[1]);
            if y == z {
                return Ok(None);
            }
            let d = space.distance_unchecked(&x, y);
            Ok(Some(thin_triangle_probe(space, &x, y, z, (d / 3.0, 2.0 * d / 3.0), c, ds)?.min_distance))
        })
        .collect::<Result<_>>()?;
    let mins: Vec<f64> = probes.into_iter().flatten().collect();
    if mins.is_empty() {
        return Err(Error::Parameter("every sampled triangle was degenerate".into()));
    }
    let hits: Vec<f64> = mins.iter().map(|&m| if m <= c { 1.0 } else { 0.0 }).collect();
    let (f, se) = mean_and_stderr(&hits);
    let worst = mins.iter().cloned().fold(0.0, f64::max);
    let row = Row::new(f, Some(se)).shell(Some(r), None, Some(mins.len() as u64)).extra1("C", c).extra2("empirical_min_C", worst);
    let ok = mins.iter().all(|m| *m >= 0.0 && m.is_finite());
    Ok((vec![row], vec![Check::new("probe distances finite and nonnegative", ok, format!("{} triangles", mins.len()))]))
}

fn run_discretize(cfg: &ExperimentConfig, space: &ModelSpace) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let (r, c, tau, n) = (need(&p.r, "r")?, need(&p.c, "c")?, need(&p.tau, "tau")?, count(need(&p.n, "n")?)?);
    let x = space.basepoint();
    let ends = space.sample_sphere(&x, r, n, space.default_measure(), cfg.seed)?;
    let one_dim = matches!(space.geometry(), Geometry::Euclidean { dim: 1, .. });
    let stats: Vec<(f64, f64, f64)> = ends
        .par_iter()
        .map(|y| {
            let region = if one_dim {
                let (a, b) = (x.as_real().unwrap()[0], y.as_real().unwrap()[0]);
                Region::Interval { start: a.min(b) - 2.0 * c, end: a.max(b) + 2.0 * c }
            } else {
                Region::Tube { from: x.clone(), to: y.clone(), radius: 2.0 * c }
            };
            let net = build_net(space, &region, c)?;
            let path = discretize_geodesic(space, &net, tau, (&x, y))?;
            let snap = path.snap_distances.iter().cloned().fold(0.0, f64::max);
            Ok((path.len() as f64, path.max_step(space), snap))
        })
        .collect::<Result<_>>()?;
    let lens: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let (mean, se) = mean_and_stderr(&lens);
    let max_step = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    let max_snap = stats.iter().map(|s| s.2).fold(0.0, f64::max);
    let step_ok = max_step <= tau * (1.0 + 1e-12);
    let snap_ok = max_snap <= 2.0 * c * (1.0 + 1e-12);
    let row = Row::new(mean, Some(se))
        .shell(Some(r), None, Some(n as u64))
        .extra1("max_step", max_step)
        .extra2("max_snap_distance", max_snap)
        .pass(step_ok && snap_ok);
    Ok((
        vec![row],
        vec![
            Check::new("consecutive path points at most tau apart", step_ok, format!("max step {max_step} vs tau {tau}")),
            Check::new("path points within 2c of their marks", snap_ok, format!("max {max_snap} vs 2c {}", 2.0 * c)),
        ],
    ))
}

fn body_label(b: &BodyConfig) -> String {
    let dim = b.dimension.unwrap_or(2);
    match b.kind {
        BodyKind::LpBall => format!("lp-ball(n={dim},p={})", b.p.unwrap_or(2.0)),
        BodyKind::Ellipsoid => format!("ellipsoid(n={})", b.axes.as_ref().map_or(0, Vec::len)),
        BodyKind::Polytope => format!("polytope({} vertices)", b.vertices.as_ref().map_or(0, Vec::len)),
        BodyKind::RandomPolytope => format!("random-polytope(n={dim})"),
        BodyKind::RandomEllipsoid => format!("random-ellipsoid(n={dim})"),
    }
}

fn bodies(cfg: &ExperimentConfig, b: &BodyConfig) -> Result<Vec<ConvexBody>> {
    let dim = b.dimension.unwrap_or(2);
    let random = |i: usize| -> Result<ConvexBody> {
        let mut g = stream(cfg.seed, i as u64);
        match b.kind {
            BodyKind::RandomPolytope => Ok(ConvexBody::Polytope(finsler::random_symmetric_polytope(dim, &mut g)?)),
            _ => Ok(finsler::random_ellipsoid(dim, &mut g)),
        }
    };
    match b.kind {
        BodyKind::RandomPolytope | BodyKind::RandomEllipsoid => {
            (0..b.count.unwrap_or(100)).into_par_iter().map(random).collect()
        }
        _ => Ok(vec![b.build()?]),
    }
}

fn run_bodies(cfg: &ExperimentConfig, b: &BodyConfig) -> Result<(Vec<Row>, Vec<Check>)> {
    let list = bodies(cfg, b)?;
    let n = b.samples.filter(|_| matches!(b.method, Some(super::config::MethodKind::MonteCarlo)));
    let results: Vec<Row> = list
        .par_iter()
        .enumerate()
        .map(|(i, body)| {
            let method = b.method(derive_seed(cfg.seed, i as u64));
            Ok(match cfg.experiment {
                ExperimentKind::Mahler => {
                    let m = mahler(body, method)?;
                    Row::new(m.mahler, Some(m.std_error))
                        .extra1("lower_bound", m.lower_bound)
                        .extra2("upper_bound", m.upper_bound)
                        .pass(m.within_bounds())
                }
                _ => {
                    let d = densities(body, method)?;
                    Row::new(d.ratio, Some(d.ratio_std_error))
                        .extra1("busemann", d.busemann)
                        .extra2("holmes_thompson", d.holmes_thompson)
                        .pass(d.within_sandwich())
                }
            })
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Row> = results.into_iter().map(|row| row.shell(None, None, n)).collect();
    let failed = rows.iter().filter(|r| r.pass == Some(false)).count();
    let name = match cfg.experiment {
        ExperimentKind::Mahler => "Mahler volume within eps_n^2 / n^(n/2) and eps_n^2 (3 std errors)",
        _ => "density ratio within [1, n^(n/2)] (3 std errors)",
    };
    let check = Check::new(name, failed == 0, format!("{failed}/{} bodies outside", rows.len()));
    Ok((rows, vec![check]))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi).exp()
}

fn run_coarse(cfg: &ExperimentConfig) -> Result<(Vec<Row>, Vec<Check>)> {
    let p = &cfg.params;
    let n = count(need(&p.n, "n")?)?;
    let eps0 = need(&p.epsilon0, "epsilon0")?;
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::Parameter(format!("epsilon0 must lie in (0, 1), got {eps0}")));
    }
    let floor = threshold_floor(eps0);
    let m0 = p.m0.unwrap_or(2.0 * floor);
    let l = -eps0.ln();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut tally = |name: &str, applicable: usize, failures: usize, rows: &mut Vec<Row>| {
        let frac = if applicable == 0 { 0.0 } else { failures as f64 / applicable as f64 };
        rows.push(Row::new(frac, None).shell(None, None, Some(n as u64)).extra1("check", name).extra2("applicable", applicable).pass(failures == 0));
        checks.push(Check::new(name, failures == 0, format!("{failures}/{applicable} failures")));
    };

    let mut g = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
    let (mut applicable, mut failures) = (0, 0);
    // Lengths from ε₀ up, core distances up to where d_A clears the floor.
    let dc_hi = (100.0 * l).min(700.0);
    for _ in 0..n {
        let pair = HoroballPair::with_epsilon0(
            log_uniform(&mut g, -l, 5.0),
            log_uniform(&mut g, -l, 5.0),
            log_uniform(&mut g, -5.0, dc_hi),
            eps0,
        )?;
        let c = annular_sandwich(&pair)?;
        if c.applicable {
            applicable += 1;
            failures += usize::from(!c.holds);
        }
    }
    tally("annular sandwich d_A/6 <= H_A <= 6 d_A", applicable, failures, &mut rows);

    let mut g = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2));
    let (mut applicable, mut failures) = (0, 0);
    for _ in 0..n {
        let (app, holds) = twist_bounds(log_uniform(&mut g, (1e-3f64).ln(), 20.0))?;
        if app {
            applicable += 1;
            failures += usize::from(!holds);
        }
    }
    tally("twist bounds log+ d <= B <= 4 log+ d", applicable, failures, &mut rows);

    let mut g = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 3));
    let mut failures = 0;
    for _ in 0..n {
        failures += usize::from(!annular_chain(&random_profile(&mut g), m0, eps0)?.holds);
    }
    tally("threshold chain", n, failures, &mut rows);

    let mut g = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 4));
    let mut failures = 0;
    for _ in 0..n {
        let mut v = || log_uniform(&mut g, (1e-3f64).ln(), 20.0);
        let (a, b, c) = (v(), v(), v());
        failures += usize::from(!max_log_identity_check(a, b, c, m0)?.ratio_ok);
    }
    tally("factor-3 max/log identity", n, failures, &mut rows);

    if let Some(path) = &p.profile {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let profile: ProjectionProfile = text.parse()?;
        let rep = repackaged_distance(&profile, m0)?;
        let reo = reorganized_distance(&profile, m0, eps0)?;
        let chain = annular_chain(&profile, m0, eps0)?;
        rows.push(
            Row::new(rep, None)
                .shell(None, None, Some(profile.entries.len() as u64))
                .extra1("reorganized", reo)
                .extra2("m0", m0)
                .pass(chain.holds),
        );
        checks.push(Check::new(
            "threshold chain on profile",
            chain.holds,
            format!("{} <= {} <= {}", chain.lower, chain.middle, chain.upper),
        ));
    }
    Ok((rows, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::catalog::example;

    #[test]
    fn every_example_runs_at_small_size() {
        for kind in ExperimentKind::ALL {
            let mut cfg = example(kind);
            cfg.params.n = Some(match kind {
                ExperimentKind::EstimateE | ExperimentKind::Separation => 200,
                ExperimentKind::CoarseCheck => 500,
                _ => 4,
            });
            if let Some(b) = cfg.body.as_mut() {
                b.count = b.count.map(|_| 5);
            }
            if kind == ExperimentKind::ThickStat {
                cfg.params.length = Some(50.0);
            }
            if kind == ExperimentKind::P1 {
                cfg.params.r = Some(10.0);
            }
            let report = run(&cfg).unwrap_or_else(|e| panic!("{kind}: {e}"));
            assert!(!report.rows.is_empty(), "{kind}");
            assert!(report.passed(), "{kind}: {}", report.summary());
        }
    }

    #[test]
    fn annulus_width_at_least_r_is_a_parameter_error() {
        let mut cfg = example(ExperimentKind::EstimateE);
        cfg.params.k = Some(10.0);
        assert!(matches!(run(&cfg), Err(Error::Parameter(_))));
    }

    #[test]
    fn missing_space_is_a_parameter_error() {
        let mut cfg = example(ExperimentKind::P1);
        cfg.space = None;
        assert!(matches!(run(&cfg), Err(Error::Parameter(_))));
    }
}
