//! Desk-scale sanity oracle for the Hausdorff moment problem: a discrete
//! nonnegative measure on a fixed grid fitted to finitely many moments by
//! nonnegative least squares. This is not a solver for the inverse problem.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 256;

#[derive(Clone, Debug)]
pub struct DiscreteMeasureFit {
    pub nodes: Vec<f64>,
    pub masses: Vec<f64>,
    /// Euclidean norm of the moment residual.
    pub residual: f64,
}

impl DiscreteMeasureFit {
    /// Fitted mass of `[r, 1]`.
    pub fn tail(&self, r: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.masses)
            .filter(|(x, _)| **x >= r)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Fits `Σ_i m_i x_i^n ≈ moments[n]` with `m_i ≥ 0` on a uniform grid of
/// `[0, 1]` (Lawson-Hanson active set).
pub fn fit_discrete_measure(moments: &[f64]) -> Result<DiscreteMeasureFit> {
    if moments.is_empty() {
        return Err(Error::EmptySample);
    }
    let nodes: Vec<f64> = (0..GRID_POINTS)
        .map(|i| (i as f64 + 0.5) / GRID_POINTS as f64)
        .collect();
    let a = DMatrix::from_fn(moments.len(), GRID_POINTS, |n, i| nodes[i].powi(n as i32));
    let b = DVector::from_column_slice(moments);
    let masses = nnls(&a, &b, 3 * GRID_POINTS);
    let residual = (&a * &masses - &b).norm();
    Ok(DiscreteMeasureFit {
        nodes,
        masses: masses.iter().copied().collect(),
        residual,
    })
}

fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm() * b.norm().max(1.0);
    for _ in 0..max_iter {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let z_sub = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if z_sub.iter().all(|v| *v > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z_sub[k];
                }
                break;
            }
            // Step back toward the feasible region and drop hitting columns.
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z_sub[k] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z_sub[k]));
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z_sub[k] - x[j]);
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_moments_give_near_uniform_tails() {
        let moments: Vec<f64> = (0..10).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let fit = fit_discrete_measure(&moments).unwrap();
        assert!(fit.residual < 1e-6, "residual {}", fit.residual);
        assert!(fit.masses.iter().all(|m| *m >= 0.0));
        for r in [0.25, 0.5, 0.75] {
            assert!((fit.tail(r) - (1.0 - r)).abs() < 0.1, "r={r}: {}", fit.tail(r));
        }
    }
}
