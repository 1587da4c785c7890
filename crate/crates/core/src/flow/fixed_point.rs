use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use super::{check_vector, RateMap};
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    /// Converged once the max-norm of `map(x) - x` is below this.
    pub tol: f64,
    pub max_steps: usize,
    /// Forward-difference step relative to the coordinate.
    pub rel_step: f64,
    /// Smallest forward-difference step.
    pub abs_step: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { tol: 1e-12, max_steps: 100, rel_step: 1e-4, abs_step: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub location: Vec<f64>,
    /// Max-norm of `map(x) - x` at `location`.
    pub residual: f64,
    /// Jacobian of the map at `location`, row major.
    pub jacobian: Vec<Vec<f64>>,
    /// Eigenvalues of the Jacobian as `(re, im)`, sorted by decreasing magnitude.
    pub eigenvalues: Vec<(f64, f64)>,
    pub eigenvalue_magnitudes: Vec<f64>,
    /// Eigenvalues with magnitude above one.
    pub unstable_count: usize,
    pub newton_steps: usize,
}

fn residual(map: &impl RateMap, x: &[f64]) -> Result<Vec<f64>> {
    Ok(map.apply(x)?.iter().zip(x).map(|(f, v)| f - v).collect())
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn jacobian_matrix(map: &impl RateMap, x: &[f64], opts: &FixedPointOptions) -> Result<DMatrix<f64>> {
    let n = x.len();
    let fx = map.apply(x)?;
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = (opts.rel_step * x[j].abs()).max(opts.abs_step);
        let mut xp = x.to_vec();
        // Step inward at the upper edge of the cube.
        let h = if xp[j] + h > 1.0 { -h } else { h };
        xp[j] += h;
        let fp = map.apply(&xp)?;
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fx[i]) / h;
        }
    }
    Ok(jac)
}

/// Forward-difference Jacobian of `map` at `x`, row major.
pub fn jacobian(map: &impl RateMap, x: &[f64], opts: &FixedPointOptions) -> Result<Vec<Vec<f64>>> {
    check_vector(map, x)?;
    let jac = jacobian_matrix(map, x, opts)?;
    Ok(jac.row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// Solves `map(x) = x` by damped Newton iteration from `guess` and
/// linearizes the map at the solution.
pub fn find_fixed_point(map: &impl RateMap, guess: &[f64], opts: &FixedPointOptions) -> Result<FixedPointReport> {
    check_vector(map, guess)?;
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut r = residual(map, &x)?;
    let mut steps = 0;
    while max_norm(&r) >= opts.tol {
        if steps == opts.max_steps {
            return Err(Error::numerical(format!(
                "Newton iteration stalled at residual {:.3e} after {steps} steps",
                max_norm(&r)
            )));
        }
        steps += 1;
        let jac = jacobian_matrix(map, &x, opts)? - DMatrix::identity(n, n);
        let rhs = -DVector::from_column_slice(&r);
        let dx = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numerical("singular Jacobian in Newton step"))?;
        // Halve the step until it stays in the unit cube and reduces the residual.
        let mut lambda = 1.0;
        let current = max_norm(&r);
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(v, d)| v + lambda * d).collect();
            if trial.iter().all(|v| (0.0..=1.0).contains(v)) {
                let tr = residual(map, &trial)?;
                if max_norm(&tr) < current || lambda < 1e-3 {
                    x = trial;
                    r = tr;
                    break;
                }
            } else if lambda < 1e-3 {
                return Err(Error::numerical("Newton step leaves the unit cube"));
            }
            lambda *= 0.5;
        }
        log::debug!("newton step {steps}: residual {:.3e}, damping {lambda}", max_norm(&r));
    }

    let jac = jacobian_matrix(map, &x, opts)?;
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("Jacobian at the fixed point is not finite"));
    }
    let mut eigenvalues: Vec<(f64, f64)> = if jac.iter().all(|&v| v == 0.0) {
        // Saturated maps are flat; the Schur solver rejects the zero matrix.
        vec![(0.0, 0.0); n]
    } else {
        // complex_eigenvalues() iterates without a cap; bound it.
        let schur = Schur::try_new(jac.clone(), f64::EPSILON, SCHUR_MAX_ITER)
            .ok_or_else(|| Error::numerical("eigenvalue iteration did not converge"))?;
        schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
    };
    eigenvalues.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let eigenvalue_magnitudes: Vec<f64> = eigenvalues.iter().map(|(re, im)| re.hypot(*im)).collect();
    let unstable_count = eigenvalue_magnitudes.iter().filter(|&&m| m > 1.0).count();
    Ok(FixedPointReport {
        residual: max_norm(&r),
        location: x,
        jacobian: jac.row_iter().map(|row| row.iter().copied().collect()).collect(),
        eigenvalues,
        eigenvalue_magnitudes,
        unstable_count,
        newton_steps: steps,
    })
}
