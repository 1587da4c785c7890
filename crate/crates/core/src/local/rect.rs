use super::{ElementaryKind, LocalRates, ReplacementTable};
use crate::catalog::CircuitCatalog;
use crate::error::Result;
use crate::flow::RateMap;
use crate::model::{
    beta_from, check_deltas, failure_from_sources, pass_probabilities, pow, single_block_mixture,
    two_block_failure, two_thirds, AncillaStats, BetaInputs, FaultSource, PassInputs, ProtocolParams,
    SourceKind, SourceTerm, SyndromeCounts,
};

/// Ancilla statistics of the local model, computed from composite rates.
pub fn ancilla_stats_local(
    composite: &LocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<AncillaStats> {
    composite.validate()?;
    params.validate()?;
    let inputs = PassInputs {
        one: composite.gamma_1,
        two: composite.gamma_2,
        w1: composite.gamma_w1,
        w2: composite.gamma_w2,
        one_m: composite.gamma_1m,
        prep: composite.gamma_p,
    };
    let pass = pass_probabilities(&inputs, catalog)?;
    let s = params.s;
    let beta = beta_from(
        &BetaInputs {
            gamma_2: composite.gamma_2,
            gamma_1m: composite.gamma_1m,
            max_rate: composite.max_rate(),
            waiting_data: pow(two_thirds(composite.gamma_w1), 14 * (s - 1))
                * pow(two_thirds(composite.gamma_w2), 7 * (s - 1)),
        },
        params,
        &pass,
        catalog,
    )?;
    Ok(AncillaStats { pass, beta })
}

fn split_wait(kind: SourceKind, composite: &LocalRates, w1_count: u32, w2_count: u32) -> FaultSource {
    FaultSource {
        kind,
        terms: vec![
            SourceTerm { delta: composite.gamma_w1, count: w1_count },
            SourceTerm { delta: composite.gamma_w2, count: w2_count },
        ],
    }
}

/// Error-correction rows of the local model. Data and ancillas that wait
/// for other blocks do so partly in one-step and partly in two-step waits;
/// the two kinds are kept as two terms of one source.
fn ec_sources_local(
    sc: SyndromeCounts,
    composite: &LocalRates,
    stats: &AncillaStats,
    params: &ProtocolParams,
) -> Vec<FaultSource> {
    let s = params.s;
    let total = sc.total();
    let repeated = sc.repeated(s);
    let single = sc.single();
    let w1 = composite.gamma_w1;
    vec![
        FaultSource::single(SourceKind::AncillaPropagation, stats.delta_anc(), total),
        FaultSource::single(SourceKind::SyndromeGates, composite.gamma_2, 7 * total),
        FaultSource::single(SourceKind::DataWaitEndOfS, w1, 14 * total),
        FaultSource::single(SourceKind::DataWaitDuringR, w1, 6 * repeated),
        FaultSource::single(
            SourceKind::RecoveryGate,
            (composite.gamma_1 + params.gamma_ws).min(1.0),
            repeated,
        ),
        split_wait(SourceKind::DataWaitSingleSyndrome, composite, 14 * (s - 1) * single, 7 * (s - 1) * single),
        split_wait(
            SourceKind::AncillaWait,
            composite,
            14 * s * (s - 1) * repeated / 2,
            7 * s * (s - 1) * repeated / 2,
        ),
    ]
}

/// Fault sources of the elementary rectangle of type `kind`.
pub fn source_table_local(
    kind: ElementaryKind,
    sc: SyndromeCounts,
    composite: &LocalRates,
    stats: &AncillaStats,
    params: &ProtocolParams,
) -> Result<Vec<FaultSource>> {
    composite.validate()?;
    let mut rows = ec_sources_local(sc, composite, stats, params);
    rows.push(FaultSource::single(SourceKind::EncodedGate, composite.get(kind), 7));
    check_deltas(&rows)?;
    Ok(rows)
}

/// Elementary rectangle failure with caller-supplied ancilla statistics.
pub fn gamma_elementary_with(
    kind: ElementaryKind,
    composite: &LocalRates,
    params: &ProtocolParams,
    stats: &AncillaStats,
) -> Result<f64> {
    composite.validate()?;
    if kind == ElementaryKind::Two {
        return Ok(two_block_failure(stats.beta, params.s, composite.gamma_2, |sc| {
            ec_sources_local(sc, composite, stats, params)
        }));
    }
    let gate = composite.get(kind);
    Ok(single_block_mixture(stats.beta, params.s, |sc| {
        let mut rows = ec_sources_local(sc, composite, stats, params);
        rows.push(FaultSource::single(SourceKind::EncodedGate, gate, 7));
        failure_from_sources(&rows)
    }))
}

/// Failure probability of a level-`n + 1` elementary rectangle given the
/// level-`n` composite rates.
pub fn gamma_elementary(
    kind: ElementaryKind,
    composite: &LocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<f64> {
    let stats = ancilla_stats_local(composite, params, catalog)?;
    gamma_elementary_with(kind, composite, params, &stats)
}

/// All eight elementary failure rates at the next level.
pub fn elementary_rates(
    composite: &LocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<LocalRates> {
    let stats = ancilla_stats_local(composite, params, catalog)?;
    let mut out = [0.0; 8];
    for kind in ElementaryKind::ALL {
        out[kind.index()] = gamma_elementary_with(kind, composite, params, &stats)?;
    }
    Ok(LocalRates::from_array(out))
}

/// One level of concatenation in the local model.
pub fn step_map_local(
    composite: &LocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
    table: &ReplacementTable,
) -> Result<LocalRates> {
    Ok(table.compose(&elementary_rates(composite, params, catalog)?))
}

/// The local map as a [`RateMap`] over composite rates.
#[derive(Debug, Clone)]
pub struct LocalMap {
    pub params: ProtocolParams,
    pub catalog: CircuitCatalog,
    pub table: ReplacementTable,
}

impl LocalMap {
    pub fn new(params: ProtocolParams, catalog: CircuitCatalog, table: ReplacementTable) -> Self {
        LocalMap { params, catalog, table }
    }

    pub fn from_geometry(geometry: &super::GeometryParams) -> Result<Self> {
        geometry.validate()?;
        Ok(LocalMap {
            params: ProtocolParams::default(),
            catalog: CircuitCatalog::steane(),
            table: ReplacementTable::from_geometry(geometry),
        })
    }
}

impl RateMap for LocalMap {
    fn dim(&self) -> usize {
        LocalRates::DIM
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let rates = LocalRates::from_slice(x)?;
        Ok(step_map_local(&rates, &self.params, &self.catalog, &self.table)?.to_array().to_vec())
    }

    fn component_names(&self) -> Vec<String> {
        ElementaryKind::ALL.iter().map(|k| k.symbol().to_string()).collect()
    }

    fn ancilla_stats(&self, x: &[f64]) -> Result<Option<AncillaStats>> {
        ancilla_stats_local(&LocalRates::from_slice(x)?, &self.params, &self.catalog).map(Some)
    }
}
