use super::ancilla::{pow, AncillaStats};
use super::prob::{failure_from_sources, two_plus, FaultSource, SourceKind};
use super::sources::{ec_sources, source_table};
use super::{clamp_probability, Location, NonlocalRates, ProtocolParams, SyndromeCounts};
use crate::catalog::CircuitCatalog;
use crate::error::{Error, Result};
use crate::flow::RateMap;

/// Mixes the failure probabilities of a one-block rectangle over the
/// syndrome counts of its X and Z halves: each half stops after one zero
/// syndrome with probability `beta`, otherwise collects all `s`.
pub(crate) fn single_block_mixture(beta: f64, s: u32, f: impl Fn(SyndromeCounts) -> f64) -> f64 {
    let one = f(SyndromeCounts::unchecked(1, 1));
    let mixed = f(SyndromeCounts::unchecked(s, 1));
    let full = f(SyndromeCounts::unchecked(s, s));
    clamp_probability(
        beta * beta * one + 2.0 * beta * (1.0 - beta) * mixed + (1.0 - beta) * (1.0 - beta) * full,
        "one-block rectangle",
    )
}

/// Failure probability of a two-block rectangle: error correction on both
/// blocks followed by a transversal two-qubit gate failing with `gate_rate`.
///
/// `ec_rows` yields the error-correction fault sources (no encoded gate row)
/// of one block for the given syndrome counts.
pub(crate) fn two_block_failure(
    beta: f64,
    s: u32,
    gate_rate: f64,
    ec_rows: impl Fn(SyndromeCounts) -> Vec<FaultSource>,
) -> f64 {
    // Index 0: a half that stopped after one syndrome, index 1: repeated.
    let counts = |stopped: bool| if stopped { 1 } else { s };
    let mut rows = Vec::with_capacity(4);
    let mut ec_fail = Vec::with_capacity(4);
    for (x_stopped, z_stopped) in [(true, true), (true, false), (false, true), (false, false)] {
        let r = ec_rows(SyndromeCounts::unchecked(counts(x_stopped), counts(z_stopped)));
        ec_fail.push(failure_from_sources(&r));
        rows.push(r);
    }
    let index = |x_stopped: bool, z_stopped: bool| 2 * usize::from(!x_stopped) + usize::from(!z_stopped);

    let gate_two_plus = two_plus(gate_rate, 7);
    let gate_exactly_one = 7.0 * gate_rate * pow(1.0 - gate_rate, 6);
    let gate_clean = pow(1.0 - gate_rate, 7);

    let mut total = 0.0;
    for mask in 0u32..16 {
        let stopped = |bit: u32| mask & (1 << bit) != 0;
        let (i1, i2) = (index(stopped(0), stopped(1)), index(stopped(2), stopped(3)));
        let m = mask.count_ones() as i32;
        let weight = beta.powi(m) * (1.0 - beta).powi(4 - m);
        if weight == 0.0 {
            continue;
        }
        let any_ec_fault: f64 = rows[i1]
            .iter()
            .zip(&rows[i2])
            .map(|(a, b)| a.merged_with(b).p_one_plus())
            .sum();
        let f = gate_two_plus + gate_exactly_one * any_ec_fault + gate_clean * (ec_fail[i1] + ec_fail[i2]);
        total += weight * f;
    }
    clamp_probability(total, "two-block rectangle")
}

/// Failure probability of a one-block rectangle at fixed syndrome counts.
pub fn rect_failure_single(
    loc: Location,
    sc: SyndromeCounts,
    rates: &NonlocalRates,
    stats: &AncillaStats,
    params: &ProtocolParams,
) -> Result<f64> {
    if !loc.is_single_block() {
        return Err(Error::domain("the two-qubit rectangle acts on two blocks"));
    }
    let rows = source_table(loc, sc, rates, stats, params)?;
    Ok(failure_from_sources(&rows))
}

/// One-block rectangle failure with caller-supplied ancilla statistics.
pub fn gamma_single_with(
    loc: Location,
    rates: &NonlocalRates,
    params: &ProtocolParams,
    stats: &AncillaStats,
) -> Result<f64> {
    if !loc.is_single_block() {
        return Err(Error::domain("the two-qubit rectangle acts on two blocks"));
    }
    rates.validate()?;
    let gate = rates.get(loc);
    Ok(single_block_mixture(stats.beta, params.s, |sc| {
        let mut rows = ec_sources(sc, rates, stats, params);
        rows.push(FaultSource::single(SourceKind::EncodedGate, gate, 7));
        failure_from_sources(&rows)
    }))
}

/// Level-`n + 1` failure probability of a one-block location given the
/// level-`n` rates.
pub fn gamma_single(
    loc: Location,
    rates: &NonlocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<f64> {
    let stats = AncillaStats::compute(rates, params, catalog)?;
    gamma_single_with(loc, rates, params, &stats)
}

pub fn gamma_two_with(rates: &NonlocalRates, params: &ProtocolParams, stats: &AncillaStats) -> Result<f64> {
    rates.validate()?;
    Ok(two_block_failure(stats.beta, params.s, rates.gamma_2, |sc| {
        ec_sources(sc, rates, stats, params)
    }))
}

/// Level-`n + 1` failure probability of the two-qubit gate.
pub fn gamma_two(rates: &NonlocalRates, params: &ProtocolParams, catalog: &CircuitCatalog) -> Result<f64> {
    let stats = AncillaStats::compute(rates, params, catalog)?;
    gamma_two_with(rates, params, &stats)
}

/// One level of concatenation. Preparation rectangles are treated as
/// one-qubit gate rectangles, so `gamma_p` follows `gamma_1`.
pub fn step_map_nonlocal(
    rates: &NonlocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<NonlocalRates> {
    let stats = AncillaStats::compute(rates, params, catalog)?;
    let one = gamma_single_with(Location::One, rates, params, &stats)?;
    Ok(NonlocalRates {
        gamma_1: one,
        gamma_2: gamma_two_with(rates, params, &stats)?,
        gamma_w: gamma_single_with(Location::Wait, rates, params, &stats)?,
        gamma_1m: gamma_single_with(Location::OneMeasure, rates, params, &stats)?,
        gamma_p: one,
    })
}

/// The nonlocal map as a [`RateMap`] over `[gamma_1, gamma_2, gamma_w,
/// gamma_1m, gamma_p]`.
#[derive(Debug, Clone, Default)]
pub struct NonlocalMap {
    pub params: ProtocolParams,
    pub catalog: CircuitCatalog,
}

impl NonlocalMap {
    pub fn new(params: ProtocolParams, catalog: CircuitCatalog) -> Self {
        NonlocalMap { params, catalog }
    }
}

impl RateMap for NonlocalMap {
    fn dim(&self) -> usize {
        NonlocalRates::DIM
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let rates = NonlocalRates::from_slice(x)?;
        Ok(step_map_nonlocal(&rates, &self.params, &self.catalog)?.to_array().to_vec())
    }

    fn component_names(&self) -> Vec<String> {
        Location::ALL.iter().map(|l| l.symbol().to_string()).collect()
    }

    fn ancilla_stats(&self, x: &[f64]) -> Result<Option<AncillaStats>> {
        let rates = NonlocalRates::from_slice(x)?;
        AncillaStats::compute(&rates, &self.params, &self.catalog).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::prob::one_plus;

    fn defaults() -> (ProtocolParams, CircuitCatalog) {
        (ProtocolParams::default(), CircuitCatalog::steane())
    }

    #[test]
    fn origin_is_fixed() {
        let (p, c) = defaults();
        let out = step_map_nonlocal(&NonlocalRates::zero(), &p, &c).unwrap();
        assert_eq!(out, NonlocalRates::zero());
        for loc in [Location::One, Location::Wait, Location::OneMeasure, Location::Prep] {
            assert_eq!(gamma_single(loc, &NonlocalRates::zero(), &p, &c).unwrap(), 0.0);
        }
        assert_eq!(gamma_two(&NonlocalRates::zero(), &p, &c).unwrap(), 0.0);
    }

    #[test]
    fn two_qubit_gate_rejected_for_single_block() {
        let (p, c) = defaults();
        assert!(gamma_single(Location::Two, &NonlocalRates::zero(), &p, &c).is_err());
    }

    #[test]
    fn mixture_degenerates_at_beta_extremes() {
        let (p, c) = defaults();
        let r = NonlocalRates::standard(2e-4, 3e-4, 2e-5, 2e-4).unwrap();
        let stats = AncillaStats::compute(&r, &p, &c).unwrap();
        for loc in [Location::One, Location::Wait, Location::OneMeasure] {
            let f11 = rect_failure_single(loc, SyndromeCounts::unchecked(1, 1), &r, &stats, &p).unwrap();
            let fss = rect_failure_single(loc, SyndromeCounts::unchecked(3, 3), &r, &stats, &p).unwrap();
            let at_one = gamma_single_with(loc, &r, &p, &stats.with_beta(1.0)).unwrap();
            let at_zero = gamma_single_with(loc, &r, &p, &stats.with_beta(0.0)).unwrap();
            assert_eq!(at_one, f11);
            assert_eq!(at_zero, fss);
        }
    }

    #[test]
    fn only_syndrome_gates_active() {
        // With only gamma_2 > 0 and all rates of a one-qubit rectangle zero
        // the single active row is the S couplings: failure = P(2+ of 7(sx+sz)).
        // Enumerate two faults among the 14 S couplings directly.
        let (p, c) = defaults();
        let g = 1e-3;
        let r = NonlocalRates::new(0.0, g, 0.0, 0.0, 0.0).unwrap();
        let mut stats = AncillaStats::compute(&r, &p, &c).unwrap();
        // Silence the ancilla row so only the coupling row remains.
        stats.pass.p_pass_no_x = stats.pass.alpha;
        let f = rect_failure_single(Location::One, SyndromeCounts::unchecked(1, 1), &r, &stats, &p).unwrap();
        let n = 14u32;
        let mut at_least_two = 0.0;
        for k in 2..=n {
            let mut choose = 1.0;
            for i in 0..k {
                choose = choose * f64::from(n - i) / f64::from(i + 1);
            }
            at_least_two += choose * g.powi(k as i32) * (1.0 - g).powi((n - k) as i32);
        }
        assert!((f - at_least_two).abs() < 1e-15, "{f} vs {at_least_two}");
    }

    #[test]
    fn two_qubit_only_gate_rate_with_beta_one() {
        // beta = 1: every half collects one syndrome. With only gamma_2 > 0
        // (and the ancilla row silenced) the EC sources reduce to the 14
        // S couplings per block.
        let (p, c) = defaults();
        let g = 5e-4;
        let r = NonlocalRates::new(0.0, g, 0.0, 0.0, 0.0).unwrap();
        let mut stats = AncillaStats::compute(&r, &p, &c).unwrap().with_beta(1.0);
        stats.pass.p_pass_no_x = stats.pass.alpha;
        let got = gamma_two_with(&r, &p, &stats).unwrap();
        let two_plus_7 = 1.0 - (1.0 - g).powi(7) - 7.0 * g * (1.0 - g).powi(6);
        let one_fault_in_gate = 7.0 * g * (1.0 - g).powi(6);
        let any_s_fault_both_blocks = one_plus(g, 28);
        let f11 = 1.0 - (1.0 - g).powi(14) - 14.0 * g * (1.0 - g).powi(13);
        let expected = two_plus_7 + one_fault_in_gate * any_s_fault_both_blocks + (1.0 - g).powi(7) * 2.0 * f11;
        assert!((got - expected).abs() < 1e-11 * expected, "{got} vs {expected}");
    }

    #[test]
    fn below_threshold_point_contracts() {
        let (p, c) = defaults();
        let r = NonlocalRates::standard(1e-4, 1e-4, 1e-5, 1e-4).unwrap();
        let out = step_map_nonlocal(&r, &p, &c).unwrap();
        // Memory grows under one step (a wait becomes a full EC pass), the
        // gate rates shrink.
        assert!(out.gamma_1 < r.gamma_1);
        assert!(out.gamma_2 < r.gamma_2);
        assert!(out.gamma_1m < r.gamma_1m);
        assert!(out.gamma_p < r.gamma_p);
        assert_eq!(out.gamma_p, out.gamma_1);
    }
}
