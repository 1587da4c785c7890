//! Experiment configuration: the JSON schema read by `--config`, and the
//! named presets for the published figures.

use std::fmt;
use std::path::PathBuf;

use ftlocal::flow::FlowOptions;
use serde::{Deserialize, Serialize};

/// A configuration problem. Exits with code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Nonlocal,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Number of transit error corrections, or `"optimize"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TauRepr", into = "TauRepr")]
pub enum TauChoice {
    Fixed(u32),
    Optimize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TauRepr {
    Fixed(u32),
    Keyword(String),
}

impl TryFrom<TauRepr> for TauChoice {
    type Error = String;

    fn try_from(r: TauRepr) -> Result<Self, String> {
        match r {
            TauRepr::Fixed(t) => Ok(TauChoice::Fixed(t)),
            TauRepr::Keyword(s) if s == "optimize" => Ok(TauChoice::Optimize),
            TauRepr::Keyword(s) => Err(format!("tau must be a positive integer or \"optimize\", got {s:?}")),
        }
    }
}

impl From<TauChoice> for TauRepr {
    fn from(t: TauChoice) -> Self {
        match t {
            TauChoice::Fixed(t) => TauRepr::Fixed(t),
            TauChoice::Optimize => TauRepr::Keyword("optimize".into()),
        }
    }
}

impl std::str::FromStr for TauChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "optimize" {
            return Ok(TauChoice::Optimize);
        }
        s.parse().map(TauChoice::Fixed).map_err(|_| format!("expected an integer or \"optimize\", got {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    /// Defaults to the origin.
    #[serde(default)]
    pub base: Option<Vec<f64>>,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub r: u32,
    pub tau: TauChoice,
    pub epsilon: f64,
    /// Largest `tau` tried when optimizing.
    pub tau_max: u32,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec { r: 20, tau: TauChoice::Optimize, epsilon: 1.0, tau_max: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    R,
    Tau,
    Epsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    /// Distances for which an epsilon or tau sweep is repeated. Empty means
    /// `geometry.r` only.
    #[serde(default)]
    pub r_values: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticSpec {
    /// Defaults to `geometry.r`.
    pub r: Option<u64>,
    /// Defaults to the catalog count.
    pub a_lc: Option<u64>,
    pub k: u32,
    pub gamma_0: Option<f64>,
    pub levels: u32,
}

impl Default for AnalyticSpec {
    fn default() -> Self {
        AnalyticSpec { r: None, a_lc: None, k: 1, gamma_0: None, levels: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: Model,
    /// Explicit ray; otherwise the standard ray of the model.
    pub ray: Option<RaySpec>,
    /// `gamma_w / gamma_else` on the standard nonlocal ray.
    pub w_ratio: f64,
    /// Flow start points as scales along the ray.
    pub scales: Vec<f64>,
    pub geometry: GeometrySpec,
    pub bracket: [f64; 2],
    pub rel_tol: f64,
    pub flow: FlowOptions,
    /// Solve for the fixed point after a flow.
    pub fixed_point: bool,
    pub guess: Option<Vec<f64>>,
    /// Location type for pseudothresholds, e.g. "1", "2", "w".
    pub component: String,
    /// `gamma_w` values for the threshold line.
    pub gamma_w_grid: Vec<f64>,
    pub sweep: Option<SweepSpec>,
    pub analytic: AnalyticSpec,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Also write a gnuplot script and data file next to the output.
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: Model::Nonlocal,
            ray: None,
            w_ratio: 0.1,
            scales: vec![3e-4],
            geometry: GeometrySpec::default(),
            bracket: [1e-7, 1e-2],
            rel_tol: 1e-3,
            flow: FlowOptions::default(),
            fixed_point: false,
            guess: None,
            component: "1".into(),
            gamma_w_grid: Vec::new(),
            sweep: None,
            analytic: AnalyticSpec::default(),
            output: None,
            format: Format::Csv,
            plot: false,
        }
    }
}

fn strictly_monotone(grid: &[f64]) -> bool {
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    up || down
}

fn check_grid(name: &str, grid: &[f64]) -> anyhow::Result<()> {
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(config_err(format!("{name} contains a non-finite value")));
    }
    if !strictly_monotone(grid) {
        return Err(config_err(format!("{name} must be strictly monotone")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        let [lo, hi] = self.bracket;
        if !(lo > 0.0 && hi > lo && hi <= 1.0) {
            return Err(config_err(format!("bracket [{lo}, {hi}] must satisfy 0 < lo < hi <= 1")));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(config_err("rel_tol must lie in (0, 1)"));
        }
        if !(self.w_ratio >= 0.0 && self.w_ratio.is_finite()) {
            return Err(config_err("w_ratio must be finite and nonnegative"));
        }
        if self.flow.max_iter == 0 || !(self.flow.below_floor < self.flow.above_ceiling) {
            return Err(config_err("flow options need max_iter > 0 and below_floor < above_ceiling"));
        }
        check_grid("scales", &self.scales)?;
        if self.scales.iter().any(|&s| s < 0.0) {
            return Err(config_err("scales must be nonnegative"));
        }
        check_grid("gamma_w_grid", &self.gamma_w_grid)?;
        if self.gamma_w_grid.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(config_err("gamma_w_grid values must be probabilities"));
        }
        let g = &self.geometry;
        if g.r == 0 || g.tau_max == 0 || !(0.0..=1e6).contains(&g.epsilon) {
            return Err(config_err("geometry needs r > 0, tau_max > 0 and epsilon >= 0"));
        }
        if let TauChoice::Fixed(t) = g.tau {
            if t == 0 || t > g.r {
                return Err(config_err(format!("tau = {t} must lie in 1..=r = {}", g.r)));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return Err(config_err("sweep grid is empty"));
            }
            check_grid("sweep.grid", &sweep.grid)?;
            if sweep.variable != SweepVariable::Epsilon
                && sweep.grid.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
            {
                return Err(config_err("r and tau sweep grids must hold positive integers"));
            }
            if sweep.r_values.contains(&0) {
                return Err(config_err("sweep.r_values must be positive"));
            }
        }
        if self.plot && self.output.is_none() {
            return Err(config_err("--plot needs --out so the script and data have a place to go"));
        }
        Ok(())
    }

    pub fn preset(name: &str) -> anyhow::Result<Self> {
        let base = ExperimentConfig::default();
        let direction = |d: [f64; 5]| Some(RaySpec { base: None, direction: d.to_vec() });
        Ok(match name {
            // gamma_1 = gamma_2 = gamma_p = gamma_m = 10 gamma_w, four starts
            // straddling the threshold.
            "fig3" => ExperimentConfig { scales: vec![2.7e-4, 3.2e-4, 3.6e-4, 4.2e-4], ..base },
            // gamma_1 = 0.25 gamma_2.
            "fig4" => ExperimentConfig {
                ray: direction([1.0, 4.0, 0.1, 2.0, 1.0]),
                scales: vec![1.2e-4, 1.4e-4, 1.5e-4, 1.8e-4],
                fixed_point: true,
                ..base
            },
            // gamma_1 = 2 gamma_2.
            "fig5" => ExperimentConfig {
                ray: direction([1.0, 0.5, 0.1, 2.0, 1.0]),
                scales: vec![3.5e-4, 4.1e-4, 4.6e-4, 5.5e-4],
                fixed_point: true,
                ..base
            },
            "fig6" => ExperimentConfig {
                gamma_w_grid: (0..=9).map(|i| f64::from(i) * 1e-5).collect(),
                ..base
            },
            "fig7" => ExperimentConfig {
                model: Model::Local,
                sweep: Some(SweepSpec {
                    variable: SweepVariable::R,
                    grid: vec![10.0, 20.0, 40.0, 80.0],
                    r_values: Vec::new(),
                }),
                ..base
            },
            "fig8" => ExperimentConfig {
                model: Model::Local,
                geometry: GeometrySpec { r: 50, ..GeometrySpec::default() },
                sweep: Some(SweepSpec {
                    variable: SweepVariable::Tau,
                    grid: (1..=16).map(f64::from).collect(),
                    r_values: Vec::new(),
                }),
                ..base
            },
            "fig9" => ExperimentConfig {
                model: Model::Local,
                sweep: Some(SweepSpec {
                    variable: SweepVariable::Epsilon,
                    grid: vec![0.01, 0.03, 0.1, 0.3, 1.0],
                    r_values: vec![20, 50, 80],
                }),
                ..base
            },
            other => return Err(config_err(format!("unknown preset {other:?} (expected fig3 .. fig9)"))),
        })
    }
}
