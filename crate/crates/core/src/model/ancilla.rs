//! Ancilla verification statistics: the pass fraction alpha and the
//! zero-syndrome probability beta.
//!
//! A Y error counts as both an X and a Z event, so a location with failure
//! rate `g` produces a detectable X (or Z) event with probability `2g/3`.

use serde::Serialize;

use crate::catalog::{CircuitCatalog, LocationCounts, VERIFY_WAITS_FULL};
use crate::error::{Error, Result};
use crate::model::{NonlocalRates, ProtocolParams};

const BETA_TOL: f64 = 1e-12;
/// Rounding allowance on the pass fraction before it counts as inconsistent.
const ALPHA_SLACK: f64 = 1e-12;
const BETA_MAX_ITER: usize = 1000;

/// Data waits per extra syndrome round: 7 data qubits over the 3 steps of S.
pub(crate) const WAITING_DATA_PER_ROUND: u32 = 21;

pub(crate) fn two_thirds(g: f64) -> f64 {
    1.0 - 2.0 * g / 3.0
}

fn full(g: f64) -> f64 {
    1.0 - g
}

pub(crate) fn pow(base: f64, n: u32) -> f64 {
    base.powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassProbabilities {
    /// P(ancilla passes verification and carries no X error).
    pub p_pass_no_x: f64,
    /// P(passes and carries no Z error).
    pub p_pass_no_z: f64,
    /// P(passes with no error at all).
    pub p_pass_no_xz: f64,
    pub alpha: f64,
}

impl PassProbabilities {
    /// Combines the three estimates into the pass fraction, treating a
    /// passed ancilla with both X and Z errors as negligible.
    pub(crate) fn from_parts(p_pass_no_x: f64, p_pass_no_z: f64, p_pass_no_xz: f64) -> Result<Self> {
        let alpha = p_pass_no_x + p_pass_no_z - p_pass_no_xz;
        if !(-ALPHA_SLACK..=1.0 + ALPHA_SLACK).contains(&alpha) {
            return Err(Error::Inconsistent(format!("pass fraction alpha = {alpha}")));
        }
        Ok(PassProbabilities { p_pass_no_x, p_pass_no_z, p_pass_no_xz, alpha: alpha.clamp(0.0, 1.0) })
    }

    /// P(X error | passed). An ancilla that never passes counts as faulty.
    pub fn delta_anc(&self) -> f64 {
        1.0 - self.no_x_given_pass()
    }

    pub fn no_x_given_pass(&self) -> f64 {
        self.conditional(self.p_pass_no_x)
    }

    pub fn no_z_given_pass(&self) -> f64 {
        self.conditional(self.p_pass_no_z)
    }

    fn conditional(&self, p: f64) -> f64 {
        if self.alpha > 0.0 {
            (p / self.alpha).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AncillaStats {
    pub pass: PassProbabilities,
    pub beta: f64,
}

impl AncillaStats {
    pub fn alpha(&self) -> f64 {
        self.pass.alpha
    }

    pub fn delta_anc(&self) -> f64 {
        self.pass.delta_anc()
    }

    /// The same pass statistics with a different zero-syndrome probability.
    pub fn with_beta(self, beta: f64) -> Self {
        AncillaStats { beta, ..self }
    }

    pub(crate) fn compute(rates: &NonlocalRates, params: &ProtocolParams, catalog: &CircuitCatalog) -> Result<Self> {
        let pass = ancilla_pass_stats(rates, params, catalog)?;
        let beta = beta_zero_syndrome(rates, params, &pass, catalog)?;
        Ok(AncillaStats { pass, beta })
    }
}

/// Per-type rates entering the ancilla formulas. The nonlocal model has a
/// single wait rate, the local model splits it into `w1` and `w2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PassInputs {
    pub one: f64,
    pub two: f64,
    pub w1: f64,
    pub w2: f64,
    pub one_m: f64,
    pub prep: f64,
}

impl PassInputs {
    fn nonlocal(rates: &NonlocalRates) -> Self {
        PassInputs {
            one: rates.gamma_1,
            two: rates.gamma_2,
            w1: rates.gamma_w,
            w2: rates.gamma_w,
            one_m: rates.gamma_1m,
            prep: rates.gamma_p,
        }
    }
}

fn routine_product(counts: &LocationCounts, r: &PassInputs, f: impl Fn(f64) -> f64) -> f64 {
    pow(f(r.one), counts.one)
        * pow(f(r.two), counts.two)
        * pow(f(r.w1), counts.w1)
        * pow(f(r.w2), counts.w2)
        * pow(f(r.one_m), counts.one_m)
        * pow(f(r.prep), counts.prep)
}

/// Shared by both models. The verification network exposes
/// `VERIFY_WAITS_FULL` of its w2 waits to any error (they sit on the
/// ancilla being checked for X), the rest only to X or Z components.
pub(crate) fn pass_probabilities(r: &PassInputs, catalog: &CircuitCatalog) -> Result<PassProbabilities> {
    let g = &catalog.g.counts;
    let v = &catalog.v.counts;
    // Every coupling in V has to be fault free in either case.
    let p_no_z = pow(full(r.prep), v.prep)
        * pow(full(r.one), v.one)
        * pow(two_thirds(r.one_m), v.one_m)
        * routine_product(g, r, full)
        * pow(two_thirds(r.w2), v.w2 - VERIFY_WAITS_FULL)
        * pow(two_thirds(r.w1), v.w1)
        * pow(full(r.w2), VERIFY_WAITS_FULL)
        * pow(full(r.two), v.two);
    let p_no_x = pow(two_thirds(r.prep), v.prep)
        * pow(two_thirds(r.one), v.one)
        * pow(two_thirds(r.one_m), v.one_m)
        * routine_product(g, r, two_thirds)
        * pow(two_thirds(r.w2), v.w2)
        * pow(two_thirds(r.w1), v.w1)
        * pow(full(r.two), v.two);
    let p_no_xz = routine_product(&catalog.ancilla_counts(), r, full);
    PassProbabilities::from_parts(p_no_x, p_no_z, p_no_xz)
}

/// Pass probabilities of a freshly prepared and verified ancilla.
pub fn ancilla_pass_stats(
    rates: &NonlocalRates,
    params: &ProtocolParams,
    catalog: &CircuitCatalog,
) -> Result<PassProbabilities> {
    rates.validate()?;
    params.validate()?;
    pass_probabilities(&PassInputs::nonlocal(rates), catalog)
}

/// Solves `beta = a * (beta * b + (1 - beta) * c)` by fixed-point iteration
/// from `beta = 1`.
pub fn solve_beta(a: f64, b: f64, c: f64) -> Result<f64> {
    let mut beta = 1.0f64;
    for _ in 0..BETA_MAX_ITER {
        let next = (a * (beta * b + (1.0 - beta) * c)).clamp(0.0, 1.0);
        if (next - beta).abs() < BETA_TOL {
            return Ok(next);
        }
        beta = next;
    }
    Err(Error::numerical(format!(
        "zero-syndrome probability did not converge in {BETA_MAX_ITER} iterations (a={a}, b={b}, c={c})"
    )))
}

/// Coefficients of the linear self-consistency equation for beta, shared by
/// the nonlocal and local estimators.
pub(crate) struct BetaInputs {
    pub gamma_2: f64,
    pub gamma_1m: f64,
    pub max_rate: f64,
    /// P(no X error on the data while it waits for other blocks).
    pub waiting_data: f64,
}

pub(crate) fn beta_from(inputs: &BetaInputs, params: &ProtocolParams, pass: &PassProbabilities, catalog: &CircuitCatalog) -> Result<f64> {
    let s_counts = &catalog.s.counts;
    let syndrome_clean =
        pow(two_thirds(inputs.gamma_2), s_counts.two) * pow(two_thirds(inputs.gamma_1m), s_counts.one_m);
    // The block came out of the most error-prone transversal gate.
    let incoming = pow(two_thirds(inputs.max_rate), 7);
    let a = pass.no_z_given_pass() * syndrome_clean * incoming;
    let first_round_clean = pow(two_thirds(inputs.gamma_2), s_counts.two) * pass.no_x_given_pass();
    let b = first_round_clean * inputs.waiting_data;
    let c = pow(first_round_clean, params.s);
    solve_beta(a, b, c)
}

/// Probability that the first syndrome of an X-correction is zero.
pub fn beta_zero_syndrome(
    rates: &NonlocalRates,
    params: &ProtocolParams,
    pass: &PassProbabilities,
    catalog: &CircuitCatalog,
) -> Result<f64> {
    let inputs = BetaInputs {
        gamma_2: rates.gamma_2,
        gamma_1m: rates.gamma_1m,
        max_rate: rates.max_rate(),
        waiting_data: pow(two_thirds(rates.gamma_w), WAITING_DATA_PER_ROUND * (params.s - 1)),
    };
    beta_from(&inputs, params, pass, catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(rates: NonlocalRates) -> AncillaStats {
        AncillaStats::compute(&rates, &ProtocolParams::default(), &CircuitCatalog::steane()).unwrap()
    }

    #[test]
    fn noiseless_ancilla() {
        let s = stats(NonlocalRates::zero());
        assert_eq!(s.alpha(), 1.0);
        assert_eq!(s.pass.p_pass_no_x, 1.0);
        assert_eq!(s.pass.p_pass_no_z, 1.0);
        assert_eq!(s.pass.p_pass_no_xz, 1.0);
        assert_eq!(s.delta_anc(), 0.0);
        assert_eq!(s.beta, 1.0);
    }

    #[test]
    fn alpha_close_to_one_near_threshold() {
        let r = NonlocalRates::standard(3e-4, 3e-4, 3e-5, 3e-4).unwrap();
        let s = stats(r);
        assert!(s.alpha() > 0.9, "{}", s.alpha());
        let p = s.pass;
        assert!(p.p_pass_no_xz <= p.p_pass_no_x.min(p.p_pass_no_z));
        assert!(p.p_pass_no_x.min(p.p_pass_no_z) <= p.alpha);
    }

    #[test]
    fn beta_close_to_one_near_threshold() {
        let r = NonlocalRates::standard(3.4e-4, 3.4e-4, 3.4e-5, 3.4e-4).unwrap();
        assert!(stats(r).beta > 0.9);
    }

    #[test]
    fn two_qubit_only_pass_probability() {
        // With only gamma_2 > 0 the 2/3 factors on other types vanish: both
        // probabilities reduce to (1 - g)^13 (V couplings) times (1 - g)^9 or
        // (1 - 2g/3)^9 over the nine G couplings.
        let g = 1e-3;
        let r = NonlocalRates::new(0.0, g, 0.0, 0.0, 0.0).unwrap();
        let p = ancilla_pass_stats(&r, &ProtocolParams::default(), &CircuitCatalog::steane()).unwrap();
        let v_part = (1.0f64 - g).powi(13);
        assert!((p.p_pass_no_z - v_part * (1.0 - g).powi(9)).abs() < 1e-15);
        assert!((p.p_pass_no_x - v_part * (1.0 - 2.0 * g / 3.0).powi(9)).abs() < 1e-15);
        assert!((p.p_pass_no_xz - (1.0 - g).powi(22)).abs() < 1e-15);
    }

    #[test]
    fn wait_only_beta_closes_analytically() {
        // Only gamma_w > 0. The equation beta = A (beta B + (1 - beta) C) is
        // linear, so beta = A C / (1 - A B + A C); all three coefficients are
        // hand-built from the wait exponents.
        let w = 1e-3;
        let r = NonlocalRates::new(0.0, 0.0, w, 0.0, 0.0).unwrap();
        let s = stats(r);
        let q = 1.0 - 2.0 * w / 3.0;
        // G has 7 waits, V has 32 of which 6 are fully exposed in the no-Z case.
        let no_z = (1.0 - w).powi(7) * q.powi(26) * (1.0 - w).powi(6);
        let no_x = q.powi(7) * q.powi(32);
        let no_xz = (1.0 - w).powi(39);
        let alpha = no_x + no_z - no_xz;
        let a = no_z / alpha * q.powi(7);
        let first = no_x / alpha;
        let b = first * q.powi(42);
        let c = first.powi(3);
        let expected = a * c / (1.0 - a * b + a * c);
        assert!((s.alpha() - alpha).abs() < 1e-15);
        assert!((s.beta - expected).abs() < 1e-12, "{} vs {expected}", s.beta);
    }

    #[test]
    fn solver_reports_divergence() {
        // a (b - c) = -1 flips sign every step and never settles.
        assert!(matches!(solve_beta(1.0, 0.0, 1.0), Err(Error::Numerical(_))));
    }

    #[test]
    fn inconsistent_alpha_is_reported() {
        assert!(matches!(PassProbabilities::from_parts(0.0, 0.0, 0.5), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn saturated_rates_never_pass() {
        let s = stats(NonlocalRates::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(s.alpha(), 0.0);
        assert_eq!(s.delta_anc(), 1.0);
        assert_eq!(s.beta, 0.0);
    }
}
