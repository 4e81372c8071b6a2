//! Experiment configuration: JSON validated against the published schema,
//! then deserialized with unknown keys rejected.

use anyhow::{anyhow, bail, Context, Result};
use fv_core::surface::{make_circle, make_graph_curve, make_sphere, SphereResolution};
use fv_core::{Complex64, Family, GraphFunction, Surface, SurfaceDensity, TailClass, TestFunction};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

/// The published configuration schema.
pub const SCHEMA: &str = include_str!("../schema/config.schema.json");

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Decay(DecayConfig),
    Tails(TailsConfig),
    Knapp(KnappConfig),
    Smooth(SmoothConfig),
    Dimension(DimensionConfig),
    Autoconv(AutoconvConfig),
    Solve(SolveConfig),
    Sobolev(SobolevConfig),
    Accept(AcceptConfig),
}

impl ExperimentConfig {
    pub fn id(&self) -> &'static str {
        match self {
            ExperimentConfig::Decay(_) => "decay",
            ExperimentConfig::Tails(_) => "tails",
            ExperimentConfig::Knapp(_) => "knapp",
            ExperimentConfig::Smooth(_) => "smooth",
            ExperimentConfig::Dimension(_) => "dimension",
            ExperimentConfig::Autoconv(_) => "autoconv",
            ExperimentConfig::Solve(_) => "solve",
            ExperimentConfig::Sobolev(_) => "sobolev",
            ExperimentConfig::Accept(_) => "accept",
        }
    }

    pub fn out_dir(&self) -> Option<&Path> {
        match self {
            ExperimentConfig::Decay(c) => c.out_dir.as_deref(),
            ExperimentConfig::Tails(c) => c.out_dir.as_deref(),
            ExperimentConfig::Knapp(c) => c.out_dir.as_deref(),
            ExperimentConfig::Smooth(c) => c.out_dir.as_deref(),
            ExperimentConfig::Dimension(c) => c.out_dir.as_deref(),
            ExperimentConfig::Autoconv(c) => c.out_dir.as_deref(),
            ExperimentConfig::Solve(c) => c.out_dir.as_deref(),
            ExperimentConfig::Sobolev(c) => c.out_dir.as_deref(),
            ExperimentConfig::Accept(c) => c.out_dir.as_deref(),
        }
    }

    /// Validates `text` against [`SCHEMA`] and deserializes it.
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).context("config is not valid JSON")?;
        validate(&value)?;
        serde_json::from_value(value).context("config does not match the experiment types")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCHEMA).expect("published schema is valid JSON");
        jsonschema::validator_for(&schema).expect("published schema compiles")
    })
}

/// Schema validation; the error lists every violation with its instance path.
pub fn validate(value: &Value) -> Result<()> {
    let errors: Vec<String> = validator()
        .iter_errors(value)
        .map(|e| format!("schema violation at '{}': {}", e.instance_path(), e))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(anyhow!(errors.join("\n")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Circle { radius: f64, nodes: usize },
    Sphere { radius: f64, n_theta: usize, n_phi: usize },
    /// Graph of `coefficient·t²` over `|t| ≤ epsilon`.
    Parabola { coefficient: f64, epsilon: f64, nodes: usize },
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<Arc<Surface>> {
        let s = match *self {
            SurfaceConfig::Circle { radius, nodes } => make_circle(radius, nodes)?,
            SurfaceConfig::Sphere { radius, n_theta, n_phi } => {
                make_sphere(radius, SphereResolution { n_theta, n_phi })?
            }
            SurfaceConfig::Parabola { coefficient, epsilon, nodes } => {
                make_graph_curve(GraphFunction::parabola(coefficient), epsilon, nodes)?
            }
        };
        Ok(Arc::new(s))
    }

    pub fn dim(&self) -> usize {
        match self {
            SurfaceConfig::Sphere { .. } => 3,
            _ => 2,
        }
    }

    pub fn constant_density(&self, value: [f64; 2]) -> Result<SurfaceDensity> {
        Ok(SurfaceDensity::constant(self.build()?, Complex64::new(value[0], value[1])))
    }
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusRange {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub surface: SurfaceConfig,
    #[serde(default = "unit")]
    pub density: [f64; 2],
    pub direction: Vec<f64>,
    pub radii: RadiusRange,
    /// Defaults to the stationary-phase rate `-(d-1)/2`.
    #[serde(default)]
    pub expected_exponent: Option<f64>,
    #[serde(default = "decay_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn decay_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailsConfig {
    pub surface: SurfaceConfig,
    #[serde(default = "unit")]
    pub density: [f64; 2],
    pub q: f64,
    pub r_max: f64,
    pub rings: usize,
    /// Defaults to the classification predicted from `q` against `2d/(d-1)`.
    #[serde(default)]
    pub expected: Option<TailClass>,
    #[serde(default = "band")]
    pub exponent_tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn band() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnappConfig {
    pub radius: f64,
    pub nodes: usize,
    pub cap_node: usize,
    pub deltas: Vec<f64>,
    /// Largest allowed spread of `‖R f_δ‖_{L1(σ)}/δ` over the family.
    #[serde(default = "knapp_spread")]
    pub max_spread: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn knapp_spread() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub half_width: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<fv_core::Grid> {
        Ok(fv_core::Grid::new(self.dim, self.half_width, self.n)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothConfig {
    pub grid: GridConfig,
    pub fields: Vec<TestFunction>,
    pub q_list: Vec<f64>,
    pub n_list: Vec<usize>,
    #[serde(default = "rotation_samples")]
    pub rotation_samples: usize,
    #[serde(default = "rings")]
    pub rings: usize,
    #[serde(default = "smooth_final")]
    pub final_fraction: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn rotation_samples() -> usize {
    64
}

fn rings() -> usize {
    16
}

fn smooth_final() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Dirac { point: Vec<f64> },
    CircleArclength { nodes: usize },
    SquareLebesgue { m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl AlphaGrid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionConfig {
    pub measure: MeasureConfig,
    pub alpha_grid: AlphaGrid,
    pub r_list: Vec<f64>,
    #[serde(default)]
    pub expected_min: Option<f64>,
    #[serde(default)]
    pub expected_max: Option<f64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutoconvConfig {
    /// Chart half-width of the parabola `t²/2`.
    pub epsilon: f64,
    pub interval: [f64; 2],
    pub n_list: Vec<usize>,
    #[serde(default = "bump_count")]
    pub bumps: usize,
    #[serde(default = "bump_nodes")]
    pub quadrature_nodes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn bump_count() -> usize {
    20
}

fn bump_nodes() -> usize {
    1024
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub grid: GridConfig,
    /// Radius of the zero set `|ξ| = radius` of the Helmholtz-type symbol.
    pub radius: f64,
    #[serde(default = "circle_nodes")]
    pub zero_set_nodes: usize,
    pub g0: TestFunction,
    #[serde(default = "solve_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn circle_nodes() -> usize {
    256
}

fn solve_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedTrend {
    Unbounded,
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevConfig {
    pub k: u32,
    pub l: u32,
    pub sigma: f64,
    pub p: f64,
    /// Either `q` or `gap = 1/p - 1/q`.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    #[serde(default)]
    pub beta: f64,
    pub family: Family,
    /// The `1/p - 1/q` threshold the run is compared against.
    #[serde(default = "two_thirds")]
    pub threshold: f64,
    #[serde(default)]
    pub expected: Option<ExpectedTrend>,
    #[serde(default = "band")]
    pub trend_band: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn two_thirds() -> f64 {
    2.0 / 3.0
}

impl SobolevConfig {
    pub fn q(&self) -> Result<f64> {
        match (self.q, self.gap) {
            (Some(q), None) => Ok(q),
            (None, Some(gap)) => Ok(fv_core::SobolevParams::q_for_gap(self.p, gap)?),
            _ => bail!("exactly one of q and gap must be given"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptConfig {
    #[serde(default)]
    pub only: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}
