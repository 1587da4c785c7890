//! Iteration of a rate map and the analyses built on it: threshold
//! bisection along a ray, the unstable fixed point, pseudothresholds and the
//! transit error-correction frequency scan.

mod fixed_point;
mod threshold;
mod tau;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::model::AncillaStats;

pub use fixed_point::{find_fixed_point, jacobian, FixedPointOptions, FixedPointReport};
pub use threshold::{bisect_threshold, outer_pseudothreshold, pseudothreshold, BisectOptions, ThresholdEstimate};
pub use tau::{local_threshold, optimize_tau, TauOptimum};

/// One level of concatenation as a map on rate vectors.
pub trait RateMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn component_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("x{i}")).collect()
    }

    /// Ancilla statistics at `x`, for maps that have them.
    fn ancilla_stats(&self, _x: &[f64]) -> Result<Option<AncillaStats>> {
        Ok(None)
    }
}

impl<M: RateMap + ?Sized> RateMap for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(x)
    }

    fn component_names(&self) -> Vec<String> {
        (**self).component_names()
    }

    fn ancilla_stats(&self, x: &[f64]) -> Result<Option<AncillaStats>> {
        (**self).ancilla_stats(x)
    }
}

/// Wraps a closure as a [`RateMap`].
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnMap { dim, f }
    }
}

impl<F> RateMap for FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok((self.f)(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    /// A vector whose largest component drops below this has converged.
    pub below_floor: f64,
    /// A vector whose largest component exceeds this has diverged.
    pub above_ceiling: f64,
    pub max_iter: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { below_floor: 1e-12, above_ceiling: 0.3, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Below,
    Above,
    Undecided,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Below => "below",
            Classification::Above => "above",
            Classification::Undecided => "undecided",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowResult {
    /// The start vector followed by one entry per applied level.
    pub trajectory: Vec<Vec<f64>>,
    pub classification: Classification,
    pub iterations_used: usize,
}

impl FlowResult {
    pub fn last(&self) -> &[f64] {
        self.trajectory.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

pub(crate) fn max_component(x: &[f64]) -> f64 {
    x.iter().copied().fold(0.0, f64::max)
}

fn check_vector(map: &impl RateMap, x: &[f64]) -> Result<()> {
    if x.len() != map.dim() {
        return Err(Error::domain(format!("expected {} rates, got {}", map.dim(), x.len())));
    }
    for &v in x {
        check_probability("rate", v)?;
    }
    Ok(())
}

/// Applies `map` repeatedly, stopping as soon as the vector is classified.
pub fn iterate_flow(map: &impl RateMap, start: &[f64], opts: &FlowOptions) -> Result<FlowResult> {
    check_vector(map, start)?;
    let mut trajectory = vec![start.to_vec()];
    let mut classification = Classification::Undecided;
    loop {
        let x = trajectory.last().expect("trajectory is never empty");
        let m = max_component(x);
        if m < opts.below_floor {
            classification = Classification::Below;
            break;
        }
        if m > opts.above_ceiling {
            classification = Classification::Above;
            break;
        }
        if trajectory.len() > opts.max_iter {
            break;
        }
        let next = map.apply(x)?;
        trajectory.push(next);
    }
    let iterations_used = trajectory.len();
    Ok(FlowResult { trajectory, classification, iterations_used })
}

/// Classification only, without keeping the trajectory.
pub fn classify(map: &impl RateMap, start: &[f64], opts: &FlowOptions) -> Result<Classification> {
    check_vector(map, start)?;
    let mut x = start.to_vec();
    for level in 0..=opts.max_iter {
        let m = max_component(&x);
        if m < opts.below_floor {
            return Ok(Classification::Below);
        }
        if m > opts.above_ceiling {
            return Ok(Classification::Above);
        }
        if level < opts.max_iter {
            x = map.apply(&x)?;
        }
    }
    Ok(Classification::Undecided)
}

/// The line `base + scale * direction` through rate space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
}

impl Ray {
    pub fn new(base: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::domain("ray base and direction differ in length"));
        }
        if direction.iter().all(|&d| d == 0.0) {
            return Err(Error::domain("ray direction is zero"));
        }
        if direction.iter().chain(&base).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("ray base and direction must be finite and nonnegative"));
        }
        Ok(Ray { base, direction })
    }

    /// A ray through the origin.
    pub fn through_origin(direction: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; direction.len()], direction)
    }

    /// The nonlocal ray with `gamma_1 = gamma_2 = gamma_p = s`,
    /// `gamma_w = w_ratio * s` and `gamma_1m = 2 s`.
    pub fn nonlocal_standard(w_ratio: f64) -> Result<Self> {
        Self::through_origin(vec![1.0, 1.0, w_ratio, 2.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn point(&self, scale: f64) -> Vec<f64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + scale * d).collect()
    }

    /// The point at `scale`, rejected if it leaves the unit cube.
    pub fn checked_point(&self, scale: f64) -> Result<Vec<f64>> {
        let p = self.point(scale);
        for &v in &p {
            check_probability("ray point component", v)?;
        }
        Ok(p)
    }
}
