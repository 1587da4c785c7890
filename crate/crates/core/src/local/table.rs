use serde::Serialize;

use super::{ElementaryKind, GeometryParams, LocalRates};
use crate::model::clamp_probability;

use ElementaryKind::*;

/// For each location type, the elementary rectangles making up its
/// composite rectangle, with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplacementTable {
    entries: [Vec<(ElementaryKind, u32)>; 8],
}

impl ReplacementTable {
    /// The table for a machine that moves blocks a distance `r` with `tau`
    /// error corrections in transit. A two-qubit gate moves one block there
    /// and back while the partner waits, and a `w2` wait is padded by the
    /// same transit time.
    pub fn from_geometry(geometry: &GeometryParams) -> Self {
        let (r, tau) = (geometry.r, geometry.tau);
        ReplacementTable {
            entries: [
                vec![(One, 1)],
                vec![(MoveD, 2 * tau), (WaitD, 2 * tau), (Two, 1)],
                vec![(Wait1, 1)],
                vec![(WaitD, 2 * tau), (Wait2, 1)],
                vec![(MoveD, r)],
                vec![(WaitD, r)],
                vec![(OneMeasure, 1)],
                vec![(Prep, 1)],
            ],
        }
    }

    /// Every location is replaced by its own elementary rectangle and
    /// nothing moves. Transit rates stay at zero and the local map collapses
    /// onto the nonlocal one.
    pub fn in_situ() -> Self {
        ReplacementTable {
            entries: [
                vec![(One, 1)],
                vec![(Two, 1)],
                vec![(Wait1, 1)],
                vec![(Wait2, 1)],
                vec![],
                vec![],
                vec![(OneMeasure, 1)],
                vec![(Prep, 1)],
            ],
        }
    }

    pub fn composite(&self, kind: ElementaryKind) -> &[(ElementaryKind, u32)] {
        &self.entries[kind.index()]
    }

    /// Composite failure rates: a composite rectangle fails when any of
    /// its elementary rectangles does.
    pub fn compose(&self, elementary: &LocalRates) -> LocalRates {
        let mut out = [0.0; 8];
        for kind in ElementaryKind::ALL {
            let log_ok: f64 = self
                .composite(kind)
                .iter()
                .map(|&(j, m)| f64::from(m) * (-elementary.get(j)).ln_1p())
                .sum();
            out[kind.index()] = clamp_probability(-log_ok.exp_m1(), "composite rectangle");
        }
        LocalRates::from_array(out)
    }
}
