//! Closed-form threshold estimate for a local machine and the sparseness
//! recursion behind it.
//!
//! An elementary rectangle with `a_lc` locations tolerates `k` faults. With
//! `r` elementary rectangles per composite one, the composite fails with
//! probability at most `r * C(a_lc, k + 1) * gamma^(k + 1)`, which is below
//! `gamma` as long as `gamma < gamma_crit`.

use serde::{Deserialize, Serialize};

use crate::catalog::CircuitCatalog;
use crate::error::{check_probability, Error, Result};
use crate::model::ProtocolParams;

/// Fraction of the largest admissible margin that is actually used.
pub const DELTA_FRACTION: f64 = 0.99;

/// Below this the recursion is continued in log space.
const LOG_SPACE_CUTOFF: f64 = -30.0;

/// `ln C(n, k)`.
fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub r: u64,
    /// Locations per elementary rectangle.
    pub a_lc: u64,
    /// Faults an elementary rectangle tolerates.
    pub k: u32,
}

impl AnalyticParams {
    pub fn new(r: u64, a_lc: u64, k: u32) -> Result<Self> {
        let p = AnalyticParams { r, a_lc, k };
        p.validate()?;
        Ok(p)
    }

    /// `a_lc` counted from the catalog and `k = 1`.
    pub fn from_catalog(r: u64, catalog: &CircuitCatalog, params: &ProtocolParams) -> Result<Self> {
        Self::new(r, catalog.local_rect_location_count(params), 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::domain("k = 0: no fault is tolerated and the threshold condition has no solution"));
        }
        if self.r == 0 {
            return Err(Error::domain("r must be positive"));
        }
        if self.a_lc < u64::from(self.k) + 1 {
            return Err(Error::domain(format!("a_lc = {} is smaller than k + 1 = {}", self.a_lc, self.k + 1)));
        }
        Ok(())
    }

    /// `ln(r * C(a_lc, k + 1))`.
    fn ln_rc(&self) -> f64 {
        (self.r as f64).ln() + self.ln_c()
    }

    fn ln_c(&self) -> f64 {
        ln_binomial(self.a_lc, u64::from(self.k) + 1)
    }
}

/// `(r * C(a_lc, k + 1))^(-1/k)`.
pub fn gamma_crit(r: u64, a_lc: u64, k: u32) -> Result<f64> {
    let p = AnalyticParams::new(r, a_lc, k)?;
    Ok((-p.ln_rc() / f64::from(k)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseLevel {
    pub level: u32,
    /// Lower bound on the probability that a level-`level` composite
    /// rectangle has sparse faults.
    pub p_sparse: f64,
    /// `ln(1 - p_sparse)`, kept because `1 - p_sparse` underflows quickly.
    pub ln_fail: f64,
    /// `(1 + delta)^level * ln(gamma_0)`, the log of the guaranteed bound.
    pub ln_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseBound {
    pub delta: f64,
    /// Supremum of admissible margins; `delta` is a fixed fraction of it.
    pub delta_sup: f64,
    /// Levels `1..=n`.
    pub levels: Vec<SparseLevel>,
}

impl SparseBound {
    pub fn p_final(&self) -> f64 {
        self.levels.last().map_or(1.0, |l| l.p_sparse)
    }
}

/// `ln(1 - (1 - C q^(k+1))^r)` from `ln q`.
fn next_ln_fail(p: &AnalyticParams, ln_q: f64) -> f64 {
    let t = p.ln_c() + f64::from(p.k + 1) * ln_q;
    if t == f64::NEG_INFINITY {
        return t;
    }
    if t < LOG_SPACE_CUTOFF {
        // 1 - (1 - x)^r = r x (1 - (r - 1) x / 2 + ...) with x = e^t tiny.
        let r = p.r as f64;
        return r.ln() + t + (-(r - 1.0) * t.exp() / 2.0).ln_1p();
    }
    let x = t.exp();
    if x >= 1.0 {
        return 0.0;
    }
    (-((p.r as f64) * (-x).ln_1p()).exp_m1()).ln()
}

/// Iterates the sparseness recursion to level `n` and checks the
/// double-exponential bound at every level.
pub fn sparse_prob_lower_bound(gamma_0: f64, params: &AnalyticParams, n: u32) -> Result<SparseBound> {
    params.validate()?;
    check_probability("gamma_0", gamma_0)?;
    let k = f64::from(params.k);
    let ln_g0 = gamma_0.ln();
    let delta_sup = if gamma_0 == 0.0 { k } else { k + params.ln_rc() / ln_g0 };
    if !(delta_sup > 0.0) || gamma_0 >= 1.0 {
        let crit = (-params.ln_rc() / k).exp();
        return Err(Error::domain(format!(
            "above analytic threshold: gamma_0 = {gamma_0:e} >= gamma_crit = {crit:e}"
        )));
    }
    let delta = DELTA_FRACTION * delta_sup;
    let mut ln_q = ln_g0;
    let mut levels = Vec::with_capacity(n as usize);
    for level in 1..=n {
        ln_q = next_ln_fail(params, ln_q);
        let ln_bound = (1.0 + delta).powi(level as i32) * ln_g0;
        let holds = if gamma_0 == 0.0 { ln_q == f64::NEG_INFINITY } else { ln_q < ln_bound };
        if !holds {
            return Err(Error::Inconsistent(format!(
                "sparseness bound violated at level {level}: ln(1 - P) = {ln_q} >= {ln_bound}"
            )));
        }
        levels.push(SparseLevel { level, p_sparse: -ln_q.exp_m1(), ln_fail: ln_q, ln_bound });
    }
    Ok(SparseBound { delta, delta_sup, levels })
}
