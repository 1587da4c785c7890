use std::ops::RangeInclusive;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use super::{bisect_threshold, BisectOptions, Ray, ThresholdEstimate};
use crate::catalog::CircuitCatalog;
use crate::error::{Error, Result};
use crate::local::{GeometryParams, LocalMap, LocalRates, ReplacementTable};
use crate::model::ProtocolParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauOptimum {
    pub tau: u32,
    pub threshold: ThresholdEstimate,
    /// Threshold for every scanned `tau`, in increasing `tau`.
    pub curve: Vec<(u32, ThresholdEstimate)>,
}

/// Threshold of `gamma_else` along the base-rate ray of `geometry`.
pub fn local_threshold(
    geometry: &GeometryParams,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
    bracket: (f64, f64),
    opts: &BisectOptions,
) -> Result<ThresholdEstimate> {
    geometry.validate()?;
    let map = LocalMap::new(*params, catalog.clone(), ReplacementTable::from_geometry(geometry));
    let ray = Ray::through_origin(LocalRates::base_direction(geometry).to_vec())?;
    bisect_threshold(&map, &ray, bracket.0, bracket.1, opts)
}

/// Scans the number of transit error corrections and returns the one with
/// the highest threshold. Values of `tau` above `r` are skipped; ties go to
/// the smaller `tau`.
pub fn optimize_tau(
    geometry: &GeometryParams,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
    taus: RangeInclusive<u32>,
    bracket: (f64, f64),
    opts: &BisectOptions,
) -> Result<TauOptimum> {
    let start = (*taus.start()).max(1);
    let end = (*taus.end()).min(geometry.r);
    if start > end {
        return Err(Error::domain(format!("no tau in {taus:?} is admissible for r = {}", geometry.r)));
    }
    let eval = |tau: u32| -> Result<(u32, ThresholdEstimate)> {
        let g = geometry.with_tau(tau)?;
        Ok((tau, local_threshold(&g, params, catalog, bracket, opts)?))
    };
    #[cfg(feature = "parallel")]
    let curve: Vec<_> = (start..=end).into_par_iter().map(eval).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let curve: Vec<_> = (start..=end).map(eval).collect::<Result<_>>()?;

    let mut best = &curve[0];
    for entry in &curve[1..] {
        if entry.1.scale > best.1.scale {
            best = entry;
        }
    }
    Ok(TauOptimum { tau: best.0, threshold: best.1.clone(), curve })
}
