use serde::{Deserialize, Serialize};

use super::{classify, Classification, FlowOptions, RateMap, Ray};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectOptions {
    /// Stop once `hi - lo <= rel_tol * hi`.
    pub rel_tol: f64,
    pub flow: FlowOptions,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions { rel_tol: 1e-3, flow: FlowOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// Geometric midpoint of the final bracket.
    pub scale: f64,
    /// Largest scale seen to flow to zero.
    pub lo: f64,
    /// Smallest scale seen to flow away from zero.
    pub hi: f64,
    /// Probes that hit the iteration limit; each was counted as above.
    pub undecided: usize,
    pub probes: usize,
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        (lo * hi).sqrt()
    } else {
        0.5 * (lo + hi)
    }
}

fn check_bracket(lo: f64, hi: f64, rel_tol: f64) -> Result<()> {
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::domain(format!("relative tolerance {rel_tol} outside (0, 1)")));
    }
    Ok(())
}

/// Bisects the scale along `ray` at which the flow switches from converging
/// to diverging.
pub fn bisect_threshold(
    map: &impl RateMap,
    ray: &Ray,
    lo: f64,
    hi: f64,
    opts: &BisectOptions,
) -> Result<ThresholdEstimate> {
    check_bracket(lo, hi, opts.rel_tol)?;
    if ray.dim() != map.dim() {
        return Err(Error::domain("ray and map dimensions differ"));
    }
    let mut undecided = 0;
    let mut probes = 0;
    let mut above = |scale: f64| -> Result<bool> {
        probes += 1;
        Ok(match classify(map, &ray.checked_point(scale)?, &opts.flow)? {
            Classification::Below => false,
            Classification::Above => true,
            Classification::Undecided => {
                undecided += 1;
                log::warn!("flow undecided at scale {scale:.6e}; counted as above");
                true
            }
        })
    };
    if above(lo)? {
        return Err(Error::domain(format!("lower bracket {lo:e} does not flow to zero")));
    }
    if !above(hi)? {
        return Err(Error::domain(format!("upper bracket {hi:e} flows to zero")));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > opts.rel_tol * hi {
        let mid = midpoint(lo, hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate { scale: midpoint(lo, hi), lo, hi, undecided, probes })
}

/// The scale along `ray` at which component `component` is left unchanged by
/// one application of the map.
pub fn pseudothreshold(
    map: &impl RateMap,
    ray: &Ray,
    component: usize,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_bracket(lo, hi, rel_tol)?;
    if component >= map.dim() || ray.dim() != map.dim() {
        return Err(Error::domain(format!("component {component} out of range")));
    }
    let change = |scale: f64| -> Result<f64> {
        let x = ray.checked_point(scale)?;
        Ok(map.apply(&x)?[component] - x[component])
    };
    let grows_lo = change(lo)? > 0.0;
    let grows_hi = change(hi)? > 0.0;
    if grows_lo == grows_hi {
        return Err(Error::domain(format!(
            "component {component} does not cross its one-step fixed line in [{lo:e}, {hi:e}]"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > rel_tol * hi {
        let mid = midpoint(lo, hi);
        if (change(mid)? > 0.0) == grows_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(midpoint(lo, hi))
}

/// Like [`pseudothreshold`], but scans `points` log-spaced scales downward
/// from `hi` first and refines the uppermost crossing. Off the origin ray a
/// component can also grow at very small scales, fed by the fixed part of
/// the base vector, so the bracket ends alone do not locate the crossing.
pub fn outer_pseudothreshold(
    map: &impl RateMap,
    ray: &Ray,
    component: usize,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    points: usize,
) -> Result<f64> {
    check_bracket(lo, hi, rel_tol)?;
    if lo <= 0.0 || points < 2 {
        return Err(Error::domain("scan needs a positive lower bracket and at least two points"));
    }
    if component >= map.dim() || ray.dim() != map.dim() {
        return Err(Error::domain(format!("component {component} out of range")));
    }
    let grows = |scale: f64| -> Result<bool> {
        let x = ray.checked_point(scale)?;
        Ok(map.apply(&x)?[component] > x[component])
    };
    let ratio = (lo / hi).powf(1.0 / (points - 1) as f64);
    let mut upper = hi;
    let upper_grows = grows(hi)?;
    for i in 1..points {
        let scale = if i == points - 1 { lo } else { hi * ratio.powi(i as i32) };
        if grows(scale)? != upper_grows {
            return pseudothreshold(map, ray, component, scale, upper, rel_tol);
        }
        upper = scale;
    }
    Err(Error::domain(format!(
        "component {component} does not cross its one-step fixed line in [{lo:e}, {hi:e}]"
    )))
}
