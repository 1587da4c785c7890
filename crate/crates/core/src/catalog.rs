//! Location counts of the Steane error-correction networks.
//!
//! Each routine is tallied by location type: one-qubit gates, two-qubit
//! gates, waits during one-qubit steps (`w1`), waits during two-qubit steps
//! (`w2`), one-qubit gate plus measurement (`1m`) and preparations (`p`).
//! The nonlocal model does not distinguish the two wait kinds and uses
//! `w1 + w2`.
//!
//! The counts are data, not derived from a circuit simulation. The exponents
//! in the ancilla statistics and the fault-source tables refer back to them,
//! and [`CircuitCatalog::validate_against_sources`] checks the identities
//! that tie the two together.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProtocolParams;

/// The four networks of one error-correction pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Routine {
    /// Ancilla preparation (encoded |0>).
    G,
    /// Ancilla verification against X errors.
    V,
    /// Syndrome collection.
    S,
    /// Recovery.
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocationCounts {
    pub one: u32,
    pub two: u32,
    pub w1: u32,
    pub w2: u32,
    pub one_m: u32,
    pub prep: u32,
}

impl LocationCounts {
    pub const fn new(one: u32, two: u32, w1: u32, w2: u32, one_m: u32, prep: u32) -> Self {
        LocationCounts { one, two, w1, w2, one_m, prep }
    }

    /// Waits of either kind, the single `w` count of the nonlocal model.
    pub fn waits(&self) -> u32 {
        self.w1 + self.w2
    }

    pub fn total(&self) -> u32 {
        self.one + self.two + self.w1 + self.w2 + self.one_m + self.prep
    }
}

impl std::ops::Add for LocationCounts {
    type Output = LocationCounts;

    fn add(self, rhs: Self) -> Self {
        LocationCounts {
            one: self.one + rhs.one,
            two: self.two + rhs.two,
            w1: self.w1 + rhs.w1,
            w2: self.w2 + rhs.w2,
            one_m: self.one_m + rhs.one_m,
            prep: self.prep + rhs.prep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutineCounts {
    pub routine: Routine,
    pub counts: LocationCounts,
    /// Parallel depth of the network. Recovery is a single transversal layer.
    pub time_steps: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitCatalog {
    pub g: RoutineCounts,
    pub v: RoutineCounts,
    pub s: RoutineCounts,
    pub r: RoutineCounts,
}

impl Default for CircuitCatalog {
    fn default() -> Self {
        Self::steane()
    }
}

/// Waits on the verification qubits inside V. Any error on them spoils a
/// "pass and no Z" ancilla, so they enter that probability with the full
/// rate instead of the 2/3 detection weight.
pub const VERIFY_WAITS_FULL: u32 = 6;

/// Ancilla pass fraction assumed when fixing the ancilla count for reporting.
pub const REPORTING_ALPHA: f64 = 0.9;

impl CircuitCatalog {
    /// Counts for the standard Steane networks.
    pub fn steane() -> Self {
        CircuitCatalog {
            g: RoutineCounts {
                routine: Routine::G,
                counts: LocationCounts::new(3, 9, 4, 3, 0, 7),
                time_steps: 5,
            },
            v: RoutineCounts {
                routine: Routine::V,
                // w2 is 15 + 3 in the tabulated form.
                counts: LocationCounts::new(4, 13, 14, 18, 4, 4),
                time_steps: 6,
            },
            s: RoutineCounts {
                routine: Routine::S,
                counts: LocationCounts::new(0, 7, 14, 0, 7, 0),
                time_steps: 3,
            },
            r: RoutineCounts {
                routine: Routine::R,
                counts: LocationCounts::new(1, 0, 6, 0, 0, 0),
                time_steps: 1,
            },
        }
    }

    pub fn routine(&self, routine: Routine) -> &RoutineCounts {
        match routine {
            Routine::G => &self.g,
            Routine::V => &self.v,
            Routine::S => &self.s,
            Routine::R => &self.r,
        }
    }

    /// Locations of one verified ancilla: preparation plus verification.
    pub fn ancilla_counts(&self) -> LocationCounts {
        self.g.counts + self.v.counts
    }

    /// Cross-checks the counts against the numbers hard-wired in the
    /// fault-source table and the ancilla statistics.
    pub fn validate_against_sources(&self) -> ConsistencyReport {
        let mut checks = Vec::new();
        let mut check = |name: &'static str, expected: u32, actual: u32| {
            checks.push(IdentityCheck { name, expected, actual, passed: expected == actual });
        };
        let (g, v, s, r) = (&self.g, &self.v, &self.s, &self.r);
        check("S two-qubit gates per syndrome = 7 (source N = 7(sx+sz))", 7, s.counts.two);
        check("S data waits per syndrome = 14 (source N = 14(sx+sz))", 14, s.counts.waits());
        check("S measurements per syndrome = 7 (zero-syndrome factor)", 7, s.counts.one_m);
        check("R data waits = 6 (source N = 6(...))", 6, r.counts.waits());
        check("R one-qubit gates = 1 (source N = 1(...))", 1, r.counts.one);
        check("V preparations = 4 (ancilla factor ^4)", 4, v.counts.prep);
        check("V one-qubit gates = 4 (ancilla factor ^4)", 4, v.counts.one);
        check("V gate+measure = 4 (ancilla factor ^4)", 4, v.counts.one_m);
        check("V two-qubit gates = 13 (ancilla factor ^13)", 13, v.counts.two);
        check("V waits = 26 + 6 = 32 (nonlocal ancilla exponents)", 32, v.counts.waits());
        check("V w1 waits = 14 (local ancilla exponent)", 14, v.counts.w1);
        check("V w2 waits = 12 + 6 = 18 (local ancilla exponents)", 18, v.counts.w2);
        check("G time steps = 5", 5, g.time_steps);
        check("V time steps = 6", 6, v.time_steps);
        check("S time steps = 3", 3, s.time_steps);
        ConsistencyReport { checks }
    }

    /// Locations in one elementary rectangle: `n_rep` prepared and verified
    /// ancillas, `2s` syndrome collections (X and Z), one recovery and the
    /// seven transversal gate locations.
    pub fn elementary_rect_locations(&self, s: u32, n_rep: u32) -> u64 {
        let per_ancilla = u64::from(self.ancilla_counts().total());
        let per_syndrome = u64::from(self.s.counts.total());
        u64::from(n_rep) * per_ancilla
            + 2 * u64::from(s) * per_syndrome
            + u64::from(self.r.counts.total())
            + 7
    }

    /// The location count used as the default block size of the analytic
    /// bound, with the ancilla count fixed at `ceil(s / 0.9)`.
    pub fn local_rect_location_count(&self, params: &ProtocolParams) -> u64 {
        let n_rep = params
            .n_rep(REPORTING_ALPHA)
            .expect("reporting alpha is a valid pass fraction");
        self.elementary_rect_locations(params.s, n_rep)
    }
}

/// Qubits tied up by one nonlocal error-correction pass: the data block plus
/// `n_rep` ancillas (7 qubits + 3 verification bits) for each of X and Z.
pub fn ec_footprint(params: &ProtocolParams, alpha: f64) -> Result<u32> {
    let n_rep = params.n_rep(alpha)?;
    Ok(7 + 2 * n_rep * (7 + 3))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub expected: u32,
    pub actual: u32,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub checks: Vec<IdentityCheck>,
}

impl ConsistencyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{tag} {} (expected {}, found {})", c.name, c.expected, c.actual)?;
        }
        Ok(())
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("pass fraction {alpha} must lie in (0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_table() {
        let c = CircuitCatalog::steane();
        assert_eq!(c.s.counts, LocationCounts::new(0, 7, 14, 0, 7, 0));
        assert_eq!(c.g.counts, LocationCounts::new(3, 9, 4, 3, 0, 7));
        assert_eq!(c.v.counts, LocationCounts::new(4, 13, 14, 18, 4, 4));
        assert_eq!(c.r.counts, LocationCounts::new(1, 0, 6, 0, 0, 0));
        assert_eq!((c.g.time_steps, c.v.time_steps, c.s.time_steps), (5, 6, 3));
        assert_eq!(c.g.counts.total(), 26);
        assert_eq!(c.v.counts.total(), 57);
        assert_eq!(c.s.counts.total(), 28);
        assert_eq!(c.r.counts.total(), 7);
    }

    #[test]
    fn checksum() {
        // Weighted sum over every entry, so any single edit moves it.
        let c = CircuitCatalog::steane();
        let mut sum = 0u64;
        for (i, rc) in [c.g, c.v, c.s, c.r].iter().enumerate() {
            let k = &rc.counts;
            for (j, x) in [k.one, k.two, k.w1, k.w2, k.one_m, k.prep, rc.time_steps]
                .iter()
                .enumerate()
            {
                sum += (31 * i as u64 + j as u64 + 1) * u64::from(*x);
            }
        }
        assert_eq!(sum, 5109);
    }

    #[test]
    fn footprint() {
        let p = ProtocolParams::default();
        assert_eq!(ec_footprint(&p, 0.9).unwrap(), 87);
        assert_eq!(ec_footprint(&p, 1.0).unwrap(), 67);
        let p1 = ProtocolParams::new(1, 1, 0.0).unwrap();
        assert_eq!(ec_footprint(&p1, 1.0).unwrap(), 27);
        assert!(matches!(ec_footprint(&p, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn footprint_nonincreasing_in_alpha() {
        let p = ProtocolParams::default();
        let mut last = u32::MAX;
        for i in 1..=100 {
            let k = ec_footprint(&p, i as f64 / 100.0).unwrap();
            assert!(k <= last);
            last = k;
        }
    }

    #[test]
    fn default_catalog_is_consistent() {
        let report = CircuitCatalog::steane().validate_against_sources();
        assert!(report.checks.len() >= 4);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn perturbed_catalog_is_flagged() {
        let mut c = CircuitCatalog::steane();
        c.s.counts.two = 6;
        let report = c.validate_against_sources();
        assert!(!report.all_passed());
        assert_eq!(report.failures().count(), 1);
    }

    #[test]
    fn rect_location_count() {
        let c = CircuitCatalog::steane();
        // 4 * (26 + 57) + 6 * 28 + 7 + 7
        assert_eq!(c.elementary_rect_locations(3, 4), 514);
        assert_eq!(c.local_rect_location_count(&ProtocolParams::default()), 514);
        assert!(c.elementary_rect_locations(1, 1) < 514);
    }

    #[test]
    fn rect_location_count_is_linear_in_entries() {
        let base = CircuitCatalog::steane();
        let n0 = base.elementary_rect_locations(3, 4);
        let mut g = base.clone();
        g.g.counts.two += 1;
        assert_eq!(g.elementary_rect_locations(3, 4) - n0, 4);
        let mut s = base.clone();
        s.s.counts.w1 += 1;
        assert_eq!(s.elementary_rect_locations(3, 4) - n0, 6);
        let mut r = base;
        r.r.counts.one += 1;
        assert_eq!(r.elementary_rect_locations(3, 4) - n0, 1);
    }

    #[test]
    fn json_roundtrip() {
        let c = CircuitCatalog::steane();
        let text = serde_json::to_string(&c).unwrap();
        let back: CircuitCatalog = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
