use serde::Serialize;

use crate::error::{check_probability, Result};

/// Clamped values further than this outside [0, 1] are logged. The
/// union-bound sums pass one routinely once a flow has diverged.
const CLAMP_LOG: f64 = 1e-3;

pub(crate) fn clamp_probability(x: f64, what: &str) -> f64 {
    if !(-CLAMP_LOG..=1.0 + CLAMP_LOG).contains(&x) {
        log::debug!("{what} = {x:.4e} clamped to [0, 1]");
    }
    x.clamp(0.0, 1.0)
}

fn pow(base: f64, n: u32) -> f64 {
    base.powi(n as i32)
}

pub(crate) fn one_plus(delta: f64, n: u32) -> f64 {
    1.0 - pow(1.0 - delta, n)
}

pub(crate) fn two_plus(delta: f64, n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let q = 1.0 - delta;
    let p = 1.0 - pow(q, n) - f64::from(n) * delta * pow(q, n - 1);
    p.clamp(0.0, 1.0)
}

/// Probability of at least one fault among `n` locations failing
/// independently with probability `delta`.
pub fn p_one_plus(delta: f64, n: u32) -> Result<f64> {
    check_probability("delta", delta)?;
    Ok(one_plus(delta, n))
}

/// Probability of at least two faults among `n` locations.
pub fn p_two_plus(delta: f64, n: u32) -> Result<f64> {
    check_probability("delta", delta)?;
    Ok(two_plus(delta, n))
}

/// Where in a rectangle a fault that reaches the data block originates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SourceKind {
    /// An X error carried in by a verified ancilla.
    AncillaPropagation,
    /// The transversal couplings of syndrome collection.
    SyndromeGates,
    /// Data waiting at the end of syndrome collection.
    DataWaitEndOfS,
    /// Data waiting while the recovery is applied.
    DataWaitDuringR,
    /// The recovery gate itself.
    RecoveryGate,
    /// Data waiting for other blocks that collect all syndromes.
    DataWaitSingleSyndrome,
    /// Prepared ancillas waiting for their syndrome collection.
    AncillaWait,
    /// The transversal encoded operation of the rectangle.
    EncodedGate,
}

impl SourceKind {
    pub fn label(self) -> &'static str {
        match self {
            SourceKind::AncillaPropagation => "propagation from a verified ancilla with X error",
            SourceKind::SyndromeGates => "fault in CZ or CX in S",
            SourceKind::DataWaitEndOfS => "memory faults on data at the end of S",
            SourceKind::DataWaitDuringR => "memory faults on data during R",
            SourceKind::RecoveryGate => "fault in gate of R",
            SourceKind::DataWaitSingleSyndrome => "memory faults on data when s=1",
            SourceKind::AncillaWait => "X errors on ancillas waiting for S",
            SourceKind::EncodedGate => "encoded gate error",
        }
    }
}

/// `count` locations that each fail with probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceTerm {
    pub delta: f64,
    pub count: u32,
}

/// One source of data faults. Most sources are a single homogeneous term;
/// in the local model a memory source can mix both wait kinds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaultSource {
    pub kind: SourceKind,
    pub terms: Vec<SourceTerm>,
}

impl FaultSource {
    pub fn single(kind: SourceKind, delta: f64, count: u32) -> Self {
        FaultSource { kind, terms: vec![SourceTerm { delta, count }] }
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    /// Total number of locations in the source.
    pub fn count(&self) -> u32 {
        self.terms.iter().map(|t| t.count).sum()
    }

    /// Adds the counts of `other` term by term. Both sources must come from
    /// the same table row.
    pub(crate) fn merged_with(&self, other: &FaultSource) -> FaultSource {
        debug_assert_eq!(self.kind, other.kind);
        debug_assert_eq!(self.terms.len(), other.terms.len());
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| SourceTerm { delta: a.delta, count: a.count + b.count })
            .collect();
        FaultSource { kind: self.kind, terms }
    }

    fn none_fail(&self) -> f64 {
        self.terms.iter().map(|t| pow(1.0 - t.delta, t.count)).product()
    }

    pub fn p_one_plus(&self) -> f64 {
        match self.terms.as_slice() {
            [t] => one_plus(t.delta, t.count),
            _ => 1.0 - self.none_fail(),
        }
    }

    pub fn p_two_plus(&self) -> f64 {
        match self.terms.as_slice() {
            [t] => two_plus(t.delta, t.count),
            terms => {
                let exactly_one: f64 = terms
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.count > 0)
                    .map(|(i, t)| {
                        let rest: f64 = terms
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| *k != i)
                            .map(|(_, u)| pow(1.0 - u.delta, u.count))
                            .product();
                        f64::from(t.count) * t.delta * pow(1.0 - t.delta, t.count - 1) * rest
                    })
                    .sum();
                (1.0 - self.none_fail() - exactly_one).clamp(0.0, 1.0)
            }
        }
    }
}

/// Failure probability of a block given its fault sources: one fault from
/// each of two distinct sources, or two faults from the same source.
pub fn failure_from_sources(sources: &[FaultSource]) -> f64 {
    let one: Vec<f64> = sources.iter().map(FaultSource::p_one_plus).collect();
    let mut total: f64 = sources.iter().map(FaultSource::p_two_plus).sum();
    for i in 0..one.len() {
        for j in 0..i {
            total += one[i] * one[j];
        }
    }
    clamp_probability(total, "rectangle failure")
}

/// Checks the raw rate inputs of a source table.
pub(crate) fn check_deltas(sources: &[FaultSource]) -> Result<()> {
    for s in sources {
        for t in &s.terms {
            check_probability(s.label(), t.delta)?;
        }
    }
    Ok(())
}
