//! Machine-readable list of experiment kinds, their parameters and defaults.

use serde::Serialize;

use super::config::{BodyConfig, BodyKind, ExperimentConfig, ExperimentKind, MethodKind, Params, SpaceConfig, SpaceKind};

#[derive(Clone, Debug, Serialize)]
pub struct ParamDoc {
    pub name: &'static str,
    pub default: serde_json::Value,
    pub meaning: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub kind: ExperimentKind,
    /// The statement the experiment reproduces, in words.
    pub anchor: &'static str,
    pub description: &'static str,
    pub parameters: Vec<ParamDoc>,
    /// Ready-to-run config in TOML form.
    pub example: String,
}

fn anchor(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::EstimateE => {
            "E(R^2) = 4/pi, E(R^n) < sqrt 2, and E tends to 2 on hyperbolic spaces and regular trees"
        }
        ExperimentKind::ThickStat => "thick-stat: fraction of a geodesic spent in the epsilon-thick part",
        ExperimentKind::P1 => {
            "property P1: most geodesics from x to the visual shell spend a theta fraction of every initial segment past sigma r in the thick part"
        }
        ExperimentKind::Separation => {
            "exponential separation: the fraction of sphere pairs whose time-t points stay within M0 decays exponentially in t"
        }
        ExperimentKind::ThinTriangle => {
            "thin triangles on average: the middle third of one side comes within C of the other two sides"
        }
        ExperimentKind::Mahler => {
            "Mahler volume bounds eps_n^2 / n^(n/2) <= vol(B) vol(B polar) <= eps_n^2 (John and Blaschke-Santalo)"
        }
        ExperimentKind::Densities => {
            "Holmes-Thompson <= Busemann <= n^(n/2) Holmes-Thompson for the densities of a normed space"
        }
        ExperimentKind::CoarseCheck => {
            "annular distance comparison d_A/6 <= H_A <= 6 d_A, the twist bounds, the threshold chain and the factor-3 max/log identity"
        }
        ExperimentKind::Discretize => {
            "sample paths: a geodesic replaced by net points with steps at most tau, each within 2c of its mark"
        }
    }
}

fn description(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::EstimateE => "Average d(y,z)/r over pairs from the sphere (k = 0) or the annulus of width k.",
        ExperimentKind::ThickStat => "Thick fraction of n rays of the given length from the base point.",
        ExperimentKind::P1 => "Fraction of shell samples satisfying P1, plus the median longest thick run in [sigma r, 2 sigma r].",
        ExperimentKind::Separation => "Separation fraction on a grid of times, with exponential and power-law fits.",
        ExperimentKind::ThinTriangle => "Grid probe of n triangles with two vertices on the sphere of radius r.",
        ExperimentKind::Mahler => "Mahler volume of the configured body or of count random bodies.",
        ExperimentKind::Densities => "Busemann and Holmes-Thompson densities and their ratio.",
        ExperimentKind::CoarseCheck => "Randomized checks of the coarse distance-formula arithmetic; optionally evaluates a profile file.",
        ExperimentKind::Discretize => "Discretizes n geodesics of length r against a c-net of a tube around each.",
    }
}

fn meaning(name: &str) -> &'static str {
    match name {
        "r" => "radius or length scale",
        "k" => "annulus width (0 selects the sphere)",
        "n" => "number of samples, rays, triangles or segments",
        "epsilon" => "thickness parameter",
        "theta" => "required thick fraction",
        "sigma" => "fraction of r after which P1 is checked",
        "m0" => "closeness threshold",
        "c" => "neighbourhood radius C, or net separation c for discretize",
        "dt" => "time step along geodesics",
        "ds" => "grid step along triangle sides (default min(0.05, C/20))",
        "tau" => "maximum step of a sample path",
        "t_min" => "first separation time",
        "t_max" => "last separation time",
        "t_step" => "spacing of separation times",
        "length" => "ray length",
        "epsilon0" => "short-curve constant",
        "profile" => "path of a projection profile file",
        _ => "",
    }
}

/// Parameter defaults for each experiment kind.
pub fn defaults(kind: ExperimentKind) -> Params {
    let mut p = Params::default();
    match kind {
        ExperimentKind::EstimateE => {
            p.r = Some(10.0);
            p.k = Some(0.0);
            p.n = Some(100_000);
        }
        ExperimentKind::ThickStat => {
            p.length = Some(1000.0);
            p.epsilon = Some(0.5);
            p.dt = Some(0.1);
            p.n = Some(8);
        }
        ExperimentKind::P1 => {
            p.r = Some(50.0);
            p.k = Some(1.0);
            p.epsilon = Some(0.25);
            p.theta = Some(0.5);
            p.sigma = Some(0.2);
            p.n = Some(2000);
            p.dt = Some(0.1);
        }
        ExperimentKind::Separation => {
            p.r = Some(15.0);
            p.m0 = Some(2.0);
            p.n = Some(10_000);
            p.t_min = Some(5.0);
            p.t_max = Some(15.0);
            p.t_step = Some(0.5);
        }
        ExperimentKind::ThinTriangle => {
            p.r = Some(20.0);
            p.c = Some(3.0);
            p.n = Some(100);
        }
        ExperimentKind::Mahler | ExperimentKind::Densities => {}
        ExperimentKind::CoarseCheck => {
            p.n = Some(100_000);
            p.epsilon0 = Some(0.6);
        }
        ExperimentKind::Discretize => {
            p.r = Some(5.0);
            p.c = Some(0.25);
            p.tau = Some(2.0);
            p.n = Some(100);
        }
    }
    p
}

fn space(kind: SpaceKind) -> Option<SpaceConfig> {
    Some(SpaceConfig { kind, dimension: None, p: None, valence: None, h: None, factors: None })
}

fn body(kind: BodyKind, dimension: usize, p: Option<f64>, count: Option<usize>) -> Option<BodyConfig> {
    Some(BodyConfig {
        kind,
        dimension: Some(dimension),
        p,
        axes: None,
        vertices: None,
        count,
        method: Some(MethodKind::Exact),
        samples: None,
    })
}

/// Example config: the defaults on a representative model.
pub fn example(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.params = defaults(kind);
    cfg.output = Some(format!("{kind}.csv"));
    match kind {
        ExperimentKind::EstimateE => {
            cfg.space = Some(SpaceConfig { dimension: Some(2), p: Some(2.0), ..space(SpaceKind::Euclidean).unwrap() })
        }
        ExperimentKind::ThickStat | ExperimentKind::P1 => cfg.space = space(SpaceKind::Modular),
        ExperimentKind::Separation | ExperimentKind::ThinTriangle | ExperimentKind::Discretize => {
            cfg.space = space(SpaceKind::Hyperbolic)
        }
        ExperimentKind::Mahler => cfg.body = body(BodyKind::RandomPolytope, 2, None, Some(100)),
        ExperimentKind::Densities => cfg.body = body(BodyKind::LpBall, 2, Some(f64::INFINITY), None),
        ExperimentKind::CoarseCheck => {}
    }
    cfg
}

pub fn catalog() -> Vec<CatalogEntry> {
    ExperimentKind::ALL
        .iter()
        .map(|&kind| {
            let defaults = serde_json::to_value(defaults(kind)).expect("params serialize");
            let parameters = NAMES
                .iter()
                .filter(|name| relevant(kind, name))
                .map(|&name| ParamDoc {
                    name,
                    default: defaults.get(name).cloned().unwrap_or(serde_json::Value::Null),
                    meaning: meaning(name),
                })
                .collect();
            CatalogEntry {
                kind,
                anchor: anchor(kind),
                description: description(kind),
                parameters,
                example: example(kind).to_toml(),
            }
        })
        .collect()
}

const NAMES: [&str; 17] = [
    "r", "k", "n", "epsilon", "theta", "sigma", "m0", "c", "dt", "ds", "tau", "t_min", "t_max", "t_step", "length",
    "epsilon0", "profile",
];

/// Parameters an experiment reads.
pub fn relevant(kind: ExperimentKind, name: &str) -> bool {
    let used: &[&str] = match kind {
        ExperimentKind::EstimateE => &["r", "k", "n"],
        ExperimentKind::ThickStat => &["length", "epsilon", "dt", "n"],
        ExperimentKind::P1 => &["r", "k", "epsilon", "theta", "sigma", "n", "dt"],
        ExperimentKind::Separation => &["r", "m0", "n", "t_min", "t_max", "t_step"],
        ExperimentKind::ThinTriangle => &["r", "c", "n", "ds"],
        ExperimentKind::Mahler | ExperimentKind::Densities => &[],
        ExperimentKind::CoarseCheck => &["n", "epsilon0", "m0", "profile"],
        ExperimentKind::Discretize => &["r", "c", "tau", "n"],
    };
    used.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

/// Every field set, so serialization lists all parameter names.
fn all_params() -> Params {
    Params {
        r: Some(0.0),
        k: Some(0.0),
        n: Some(0),
        epsilon: Some(0.0),
        theta: Some(0.0),
        sigma: Some(0.0),
        m0: Some(0.0),
        c: Some(0.0),
        dt: Some(0.0),
        ds: Some(0.0),
        tau: Some(0.0),
        t_min: Some(0.0),
        t_max: Some(0.0),
        t_step: Some(0.0),
        length: Some(0.0),
        epsilon0: Some(0.0),
        profile: Some(String::new()),
    }
}

    #[test]
    fn nine_kinds_each_with_anchor() {
        let cat = catalog();
        assert_eq!(cat.len(), 9);
        assert!(cat.iter().all(|e| !e.anchor.is_empty()));
    }

    #[test]
    fn examples_round_trip() {
        for entry in catalog() {
            let parsed: ExperimentConfig = entry.example.parse().unwrap();
            assert_eq!(parsed, example(entry.kind));
        }
    }

    #[test]
    fn every_parameter_has_a_meaning() {
        for name in NAMES {
            assert!(!meaning(name).is_empty(), "{name}");
        }
        let listed = serde_json::to_value(all_params()).unwrap();
        assert_eq!(listed.as_object().unwrap().len(), NAMES.len());
    }
}
