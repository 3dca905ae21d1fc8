//! Experiment configuration files (TOML).
//!
//! ```toml
//! experiment = "estimate-e"
//! seed = 42
//! output = "e_plane.csv"
//!
//! [space]
//! kind = "euclidean"
//! dimension = 2
//! p = 2.0
//!
//! [params]
//! r = 10.0
//! k = 0.0
//! n = 1000000
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::{ConvexBody, Polytope, VolumeMethod};
use crate::space::{ModelSpace, NormFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EstimateE,
    ThickStat,
    P1,
    Separation,
    ThinTriangle,
    Mahler,
    Densities,
    CoarseCheck,
    Discretize,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::EstimateE,
        ExperimentKind::ThickStat,
        ExperimentKind::P1,
        ExperimentKind::Separation,
        ExperimentKind::ThinTriangle,
        ExperimentKind::Mahler,
        ExperimentKind::Densities,
        ExperimentKind::CoarseCheck,
        ExperimentKind::Discretize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EstimateE => "estimate-e",
            ExperimentKind::ThickStat => "thick-stat",
            ExperimentKind::P1 => "p1",
            ExperimentKind::Separation => "separation",
            ExperimentKind::ThinTriangle => "thin-triangle",
            ExperimentKind::Mahler => "mahler",
            ExperimentKind::Densities => "densities",
            ExperimentKind::CoarseCheck => "coarse-check",
            ExperimentKind::Discretize => "discretize",
        }
    }

    /// Whether the experiment runs on a model space (the others use `[body]`
    /// or pure arithmetic).
    pub fn needs_space(self) -> bool {
        !matches!(self, ExperimentKind::Mahler | ExperimentKind::Densities | ExperimentKind::CoarseCheck)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Euclidean,
    Hyperbolic,
    Modular,
    Tree,
    SupProduct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valence: Option<u8>,
    /// Growth exponent of the radial density; the model default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<NormFactor>>,
}

impl SpaceConfig {
    pub fn build(&self) -> Result<ModelSpace> {
        let space = match self.kind {
            SpaceKind::Euclidean => ModelSpace::euclidean(self.dimension.unwrap_or(2), self.p.unwrap_or(2.0))?,
            SpaceKind::Hyperbolic => ModelSpace::hyperbolic_plane(),
            SpaceKind::Modular => ModelSpace::modular_torus(),
            SpaceKind::Tree => ModelSpace::regular_tree(self.valence.unwrap_or(3))?,
            SpaceKind::SupProduct => ModelSpace::sup_product(
                self.factors.clone().unwrap_or_else(|| vec![NormFactor { dim: 1, p: 2.0 }; 2]),
            )?,
        };
        match self.h {
            Some(h) => space.with_growth(h),
            None => Ok(space),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    LpBall,
    Ellipsoid,
    Polytope,
    /// `count` random symmetric polytopes.
    RandomPolytope,
    /// `count` random ellipsoids.
    RandomEllipsoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub kind: BodyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

impl BodyConfig {
    pub fn method(&self, seed: u64) -> VolumeMethod {
        match self.method.unwrap_or(MethodKind::Exact) {
            MethodKind::Exact => VolumeMethod::Exact,
            MethodKind::MonteCarlo => VolumeMethod::MonteCarlo { samples: self.samples.unwrap_or(1_000_000), seed },
        }
    }

    fn dim(&self) -> usize {
        self.dimension.unwrap_or(2)
    }

    /// The fixed body described by the config; random kinds are drawn by the runner.
    pub fn build(&self) -> Result<ConvexBody> {
        match self.kind {
            BodyKind::LpBall => ConvexBody::lp_ball(self.dim(), self.p.unwrap_or(2.0)),
            BodyKind::Ellipsoid => ConvexBody::ellipsoid(
                self.axes.clone().ok_or_else(|| Error::Parameter("ellipsoid needs `axes`".into()))?,
            ),
            BodyKind::Polytope => Ok(ConvexBody::Polytope(Polytope::from_vertices(
                self.vertices.clone().ok_or_else(|| Error::Parameter("polytope needs `vertices`".into()))?,
            )?)),
            BodyKind::RandomPolytope | BodyKind::RandomEllipsoid => {
                Err(Error::Parameter("random bodies are generated per sample".into()))
            }
        }
    }
}

/// Numeric parameters; each experiment reads the ones it needs and falls back
/// to the catalog defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Separation times: first, last and step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_step: Option<f64>,
    /// Ray length for the long-run thick fraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Short-curve constant for the coarse checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    /// Profile fixture evaluated by the coarse check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceConfig>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyConfig>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig { experiment, seed: 0, output: None, space: None, params: Params::default(), body: None }
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        text.parse().map_err(ConfigError::Invalid)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn space(&self) -> Result<ModelSpace> {
        self.space
            .as_ref()
            .ok_or_else(|| Error::Parameter(format!("experiment {} needs a [space] section", self.experiment)))?
            .build()
    }

    pub fn body(&self) -> Result<&BodyConfig> {
        self.body
            .as_ref()
            .ok_or_else(|| Error::Parameter(format!("experiment {} needs a [body] section", self.experiment)))
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Loading failures, split by exit status.
#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Invalid(Error),
}
