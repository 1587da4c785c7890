//! The nonlocal concatenation map.
//!
//! A level-`n` rate vector holds the failure probabilities of the five
//! location types. One application of [`step_map_nonlocal`] replaces every
//! location by its 1-rectangle (error correction followed by the transversal
//! encoded operation) and returns the failure probabilities of those
//! rectangles, which are the rates at level `n + 1`.

mod ancilla;
mod prob;
mod rect;
mod sources;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

pub use ancilla::{ancilla_pass_stats, beta_zero_syndrome, solve_beta, AncillaStats, PassProbabilities};
pub use prob::{
    failure_from_sources, p_one_plus, p_two_plus, FaultSource, SourceKind, SourceTerm,
};
pub use rect::{
    gamma_single, gamma_single_with, gamma_two, gamma_two_with, rect_failure_single,
    step_map_nonlocal, NonlocalMap,
};
pub use sources::source_table;

pub(crate) use ancilla::{beta_from, pass_probabilities, pow, two_thirds, BetaInputs, PassInputs};
pub(crate) use prob::{check_deltas, clamp_probability};
pub(crate) use rect::{single_block_mixture, two_block_failure};

/// Failure probabilities of the nonlocal location types.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NonlocalRates {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_w: f64,
    /// One-qubit gate followed by measurement.
    pub gamma_1m: f64,
    pub gamma_p: f64,
}

impl NonlocalRates {
    pub const DIM: usize = 5;

    pub fn new(gamma_1: f64, gamma_2: f64, gamma_w: f64, gamma_1m: f64, gamma_p: f64) -> Result<Self> {
        let rates = NonlocalRates { gamma_1, gamma_2, gamma_w, gamma_1m, gamma_p };
        rates.validate()?;
        Ok(rates)
    }

    /// Base-level rates with the measurement error equal to the one-qubit
    /// gate error, so `gamma_1m = 2 gamma_1`.
    pub fn standard(gamma_1: f64, gamma_2: f64, gamma_w: f64, gamma_p: f64) -> Result<Self> {
        Self::new(gamma_1, gamma_2, gamma_w, 2.0 * gamma_1, gamma_p)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Location::ALL.iter().zip(self.to_array()) {
            check_probability(name.symbol(), v)?;
        }
        Ok(())
    }

    pub fn get(&self, loc: Location) -> f64 {
        match loc {
            Location::One => self.gamma_1,
            Location::Two => self.gamma_2,
            Location::Wait => self.gamma_w,
            Location::OneMeasure => self.gamma_1m,
            Location::Prep => self.gamma_p,
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.to_array().into_iter().fold(0.0, f64::max)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.gamma_1, self.gamma_2, self.gamma_w, self.gamma_1m, self.gamma_p]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x {
            [a, b, c, d, e] => Self::new(*a, *b, *c, *d, *e),
            _ => Err(Error::domain(format!("expected 5 rates, got {}", x.len()))),
        }
    }
}

/// Location types of the nonlocal model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Location {
    One,
    Two,
    Wait,
    OneMeasure,
    Prep,
}

impl Location {
    pub const ALL: [Location; 5] =
        [Location::One, Location::Two, Location::Wait, Location::OneMeasure, Location::Prep];

    pub fn symbol(self) -> &'static str {
        match self {
            Location::One => "gamma_1",
            Location::Two => "gamma_2",
            Location::Wait => "gamma_w",
            Location::OneMeasure => "gamma_1m",
            Location::Prep => "gamma_p",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Location::One),
            "2" => Ok(Location::Two),
            "w" => Ok(Location::Wait),
            "1m" => Ok(Location::OneMeasure),
            "p" => Ok(Location::Prep),
            other => Err(Error::domain(format!("unknown location type {other:?}"))),
        }
    }

    pub fn is_single_block(self) -> bool {
        self != Location::Two
    }
}

/// Syndrome repetition settings of the error-correction protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Maximum number of syndromes collected after a nonzero first syndrome.
    pub s: u32,
    /// Number of agreeing syndromes required before recovery.
    pub s_prime: u32,
    /// Probability of recovering with a wrong but agreeing syndrome.
    pub gamma_ws: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams { s: 3, s_prime: 2, gamma_ws: 0.0 }
    }
}

impl ProtocolParams {
    pub fn new(s: u32, s_prime: u32, gamma_ws: f64) -> Result<Self> {
        let p = ProtocolParams { s, s_prime, gamma_ws };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s_prime == 0 {
            return Err(Error::domain("s and s' must be positive"));
        }
        if self.s_prime > self.s {
            return Err(Error::domain(format!("s' = {} exceeds s = {}", self.s_prime, self.s)));
        }
        check_probability("gamma_ws", self.gamma_ws)
    }

    /// Ancillas prepared ahead of each error-correction pass, `ceil(s / alpha)`.
    pub fn n_rep(&self, alpha: f64) -> Result<u32> {
        crate::catalog::validate_alpha(alpha)?;
        Ok((f64::from(self.s) / alpha).ceil() as u32)
    }
}

/// Number of syndromes collected in the X and Z halves of one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SyndromeCounts {
    pub s_x: u32,
    pub s_z: u32,
}

impl SyndromeCounts {
    pub fn new(s_x: u32, s_z: u32, params: &ProtocolParams) -> Result<Self> {
        for v in [s_x, s_z] {
            if v != 1 && v != params.s {
                return Err(Error::domain(format!(
                    "syndrome count {v} must be 1 or s = {}",
                    params.s
                )));
            }
        }
        Ok(SyndromeCounts { s_x, s_z })
    }

    pub(crate) const fn unchecked(s_x: u32, s_z: u32) -> Self {
        SyndromeCounts { s_x, s_z }
    }

    pub fn total(&self) -> u32 {
        self.s_x + self.s_z
    }

    /// Number of halves (X, Z) that went on to collect all `s` syndromes.
    pub fn repeated(&self, s: u32) -> u32 {
        u32::from(self.s_x == s) + u32::from(self.s_z == s)
    }

    /// Number of halves that stopped after a single zero syndrome.
    pub fn single(&self) -> u32 {
        u32::from(self.s_x == 1) + u32::from(self.s_z == 1)
    }
}
