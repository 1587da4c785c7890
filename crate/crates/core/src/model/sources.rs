use super::ancilla::WAITING_DATA_PER_ROUND;
use super::prob::{FaultSource, SourceKind};
use super::{AncillaStats, Location, NonlocalRates, ProtocolParams, SyndromeCounts};
use crate::error::Result;

/// Fault sources on the data block of a rectangle of type `loc` when the X
/// and Z halves of its error correction collect `sc.s_x` and `sc.s_z`
/// syndromes.
pub fn source_table(
    loc: Location,
    sc: SyndromeCounts,
    rates: &NonlocalRates,
    stats: &AncillaStats,
    params: &ProtocolParams,
) -> Result<Vec<FaultSource>> {
    rates.validate()?;
    let mut rows = ec_sources(sc, rates, stats, params);
    rows.push(FaultSource::single(SourceKind::EncodedGate, rates.get(loc), 7));
    super::prob::check_deltas(&rows)?;
    Ok(rows)
}

/// The seven error-correction rows, without the encoded gate.
pub(crate) fn ec_sources(
    sc: SyndromeCounts,
    rates: &NonlocalRates,
    stats: &AncillaStats,
    params: &ProtocolParams,
) -> Vec<FaultSource> {
    let s = params.s;
    let total = sc.total();
    let repeated = sc.repeated(s);
    let single = sc.single();
    let w = rates.gamma_w;
    vec![
        FaultSource::single(SourceKind::AncillaPropagation, stats.delta_anc(), total),
        FaultSource::single(SourceKind::SyndromeGates, rates.gamma_2, 7 * total),
        FaultSource::single(SourceKind::DataWaitEndOfS, w, 14 * total),
        FaultSource::single(SourceKind::DataWaitDuringR, w, 6 * repeated),
        FaultSource::single(
            SourceKind::RecoveryGate,
            (rates.gamma_1 + params.gamma_ws).min(1.0),
            repeated,
        ),
        FaultSource::single(
            SourceKind::DataWaitSingleSyndrome,
            w,
            WAITING_DATA_PER_ROUND * (s - 1) * single,
        ),
        FaultSource::single(SourceKind::AncillaWait, w, WAITING_DATA_PER_ROUND * s * (s - 1) * repeated / 2),
    ]
}
