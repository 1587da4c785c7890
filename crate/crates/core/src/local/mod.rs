//! The local concatenation map.
//!
//! Before a two-qubit gate at level `n + 1` one encoded block is moved a
//! distance `r` in units of the level-`n` block size, with error correction
//! every `d = ceil(r / tau)` units. A location therefore becomes a sequence of
//! elementary rectangles (moves, waits and the gate itself), the composite
//! rectangle, which fails when any of its parts fails.
//!
//! The map acts on composite failure rates in the order
//! `[1, 2, w1, w2, md, wd, 1m, p]`.

mod rect;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

pub use rect::{
    ancilla_stats_local, elementary_rates, gamma_elementary, gamma_elementary_with, source_table_local,
    step_map_local, LocalMap,
};
pub use table::ReplacementTable;

/// Location types of the local model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryKind {
    One,
    Two,
    /// A one-step wait.
    Wait1,
    /// A two-step wait, the time of a two-qubit gate.
    Wait2,
    /// Moving a qubit over `d` units.
    MoveD,
    /// Waiting for the time it takes to move `d` units.
    WaitD,
    OneMeasure,
    Prep,
}

impl ElementaryKind {
    pub const ALL: [ElementaryKind; 8] = [
        ElementaryKind::One,
        ElementaryKind::Two,
        ElementaryKind::Wait1,
        ElementaryKind::Wait2,
        ElementaryKind::MoveD,
        ElementaryKind::WaitD,
        ElementaryKind::OneMeasure,
        ElementaryKind::Prep,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ElementaryKind::One => "gamma_1",
            ElementaryKind::Two => "gamma_2",
            ElementaryKind::Wait1 => "gamma_w1",
            ElementaryKind::Wait2 => "gamma_w2",
            ElementaryKind::MoveD => "gamma_md",
            ElementaryKind::WaitD => "gamma_wd",
            ElementaryKind::OneMeasure => "gamma_1m",
            ElementaryKind::Prep => "gamma_p",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "1" => ElementaryKind::One,
            "2" => ElementaryKind::Two,
            "w1" => ElementaryKind::Wait1,
            "w2" => ElementaryKind::Wait2,
            "md" => ElementaryKind::MoveD,
            "wd" => ElementaryKind::WaitD,
            "1m" => ElementaryKind::OneMeasure,
            "p" => ElementaryKind::Prep,
            other => return Err(Error::domain(format!("unknown local location type {other:?}"))),
        })
    }

    pub fn is_single_block(self) -> bool {
        self != ElementaryKind::Two
    }
}

/// Failure probabilities of the eight local location types.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalRates {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_w1: f64,
    pub gamma_w2: f64,
    pub gamma_md: f64,
    pub gamma_wd: f64,
    pub gamma_1m: f64,
    pub gamma_p: f64,
}

impl LocalRates {
    pub const DIM: usize = 8;

    pub fn zero() -> Self {
        Self::default()
    }

    /// Base-level wiring of the sweeps: every gate and preparation at
    /// `gamma_else`, measurement doubling the one-qubit rate, short waits at a
    /// tenth of the gate rate, and transit rates growing with the segment
    /// length `d`.
    pub fn base(gamma_else: f64, geometry: &GeometryParams) -> Result<Self> {
        let d = f64::from(geometry.d());
        let rates = LocalRates {
            gamma_1: gamma_else,
            gamma_2: gamma_else,
            gamma_w1: 0.1 * gamma_else,
            gamma_w2: 0.1 * gamma_else,
            gamma_md: geometry.epsilon * d * gamma_else,
            gamma_wd: 0.1 * d * gamma_else,
            gamma_1m: 2.0 * gamma_else,
            gamma_p: gamma_else,
        };
        rates.validate()?;
        Ok(rates)
    }

    /// Direction of the base-level ray, `base(1)` without the range check.
    pub fn base_direction(geometry: &GeometryParams) -> [f64; 8] {
        let d = f64::from(geometry.d());
        [1.0, 1.0, 0.1, 0.1, geometry.epsilon * d, 0.1 * d, 2.0, 1.0]
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in ElementaryKind::ALL.iter().zip(self.to_array()) {
            check_probability(k.symbol(), v)?;
        }
        Ok(())
    }

    pub fn get(&self, kind: ElementaryKind) -> f64 {
        self.to_array()[kind.index()]
    }

    pub fn max_rate(&self) -> f64 {
        self.to_array().into_iter().fold(0.0, f64::max)
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.gamma_1,
            self.gamma_2,
            self.gamma_w1,
            self.gamma_w2,
            self.gamma_md,
            self.gamma_wd,
            self.gamma_1m,
            self.gamma_p,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        LocalRates {
            gamma_1: a[0],
            gamma_2: a[1],
            gamma_w1: a[2],
            gamma_w2: a[3],
            gamma_md: a[4],
            gamma_wd: a[5],
            gamma_1m: a[6],
            gamma_p: a[7],
        }
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        let a: [f64; 8] = x
            .try_into()
            .map_err(|_| Error::domain(format!("expected 8 rates, got {}", x.len())))?;
        let rates = Self::from_array(a);
        rates.validate()?;
        Ok(rates)
    }
}

/// Transport geometry of the local model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    /// Distance a block travels per two-qubit gate, in block sizes.
    pub r: u32,
    /// Number of error-correction rounds in transit.
    pub tau: u32,
    /// Movement noise per unit distance relative to gate noise.
    pub epsilon: f64,
}

impl GeometryParams {
    pub fn new(r: u32, tau: u32, epsilon: f64) -> Result<Self> {
        let g = GeometryParams { r, tau, epsilon };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.tau == 0 {
            return Err(Error::domain("r and tau must be positive"));
        }
        if self.tau > self.r {
            return Err(Error::domain(format!("tau = {} exceeds r = {}", self.tau, self.r)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(format!("epsilon = {} must be finite and nonnegative", self.epsilon)));
        }
        Ok(())
    }

    /// Segment length between transit error corrections, rounded up.
    pub fn d(&self) -> u32 {
        self.r.div_ceil(self.tau)
    }

    pub fn with_tau(self, tau: u32) -> Result<Self> {
        Self::new(self.r, tau, self.epsilon)
    }
}
