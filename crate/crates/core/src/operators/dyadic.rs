use nalgebra::DMatrix;
use num_complex::Complex64;

use super::norms::SymmetricOperator;
use super::PsiProfile;
use crate::disk::{Beta, DiskQuadrature, DyadicInterval, Field};
use crate::error::{Error, Result};

/// `K^β_Ψ(z, ζ) = Σ_{I ∈ D^β, level ≤ l_max} 1_{S(I)}(z) 1_{S(I)}(ζ) Ψ(|I|)/|I|`.
pub fn dyadic_kernel(beta: Beta, psi: &PsiProfile, z: Complex64, zeta: Complex64, l_max: u32) -> f64 {
    (0..=l_max)
        .filter_map(|level| {
            let root = DyadicInterval::root(beta);
            let a = if level == 0 {
                root
            } else {
                DyadicInterval::containing(beta, level, crate::disk::angle_of(z))
            };
            (a.square_contains(z) && a.square_contains(zeta)).then(|| {
                let len = a.length();
                psi.eval(len) / len
            })
        })
        .sum()
}

/// `Σ_I ⟨f, 1_{S(I)}⟩_μ w_{level(I)} 1_{S(I)}`, where `w` holds
/// `Ψ(2^{-ℓ}) 2^ℓ` by level; one pass up and one pass down.
pub fn apply_dyadic(
    quad: &DiskQuadrature,
    mu: &[f64],
    beta: Beta,
    level_weights: &[f64],
    f: &Field<f64>,
    l_max: u32,
) -> Result<Field<f64>> {
    quad.check(f)?;
    if l_max > quad.depth || level_weights.len() <= l_max as usize || mu.len() != quad.len() {
        return Err(Error::Precondition(format!(
            "l_max = {l_max} exceeds depth {} or weight table",
            quad.depth
        )));
    }
    let fm: Vec<f64> = f.values.iter().zip(mu).map(|(v, m)| v * m).collect();
    let values = DyadicOp::new(quad, beta, level_weights, l_max).apply(&fm);
    Ok(Field {
        quad_id: quad.id,
        values,
    })
}

/// Dense `K_{ij} = K^β_Ψ(z_i, z_j)` over cell nodes, built square by square.
pub fn dyadic_kernel_matrix(
    quad: &DiskQuadrature,
    beta: Beta,
    level_weights: &[f64],
    l_max: u32,
) -> DMatrix<f64> {
    let n = quad.len();
    let mut k = DMatrix::zeros(n, n);
    let ids: Vec<Vec<usize>> = (0..n)
        .map(|i| quad.squares_containing(i, beta, l_max))
        .collect();
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (level, (a, b)) in ids[i].iter().zip(&ids[j]).enumerate() {
                if a == b {
                    acc += level_weights[level];
                }
            }
            k[(i, j)] = acc;
        }
    }
    k
}

/// Matrix-free `x ↦ Σ_S c_S (Σ_{j ∈ S} x_j) 1_S` with coefficients given per
/// square id.
#[derive(Clone, Debug)]
pub struct DyadicOp {
    /// Square ids per cell, one per level `0..=min(band, l_max)`.
    membership: Vec<Vec<usize>>,
    coefficients: Vec<f64>,
}

impl DyadicOp {
    pub fn new(quad: &DiskQuadrature, beta: Beta, level_weights: &[f64], l_max: u32) -> Self {
        let slots = DiskQuadrature::square_slots(l_max);
        let coefficients = (0..slots)
            .map(|id| level_weights[DyadicInterval::from_id(beta, id).level as usize])
            .collect();
        Self::with_coefficients(quad, beta, coefficients, l_max)
    }

    pub fn with_coefficients(
        quad: &DiskQuadrature,
        beta: Beta,
        coefficients: Vec<f64>,
        l_max: u32,
    ) -> Self {
        let membership = (0..quad.len())
            .map(|i| quad.squares_containing(i, beta, l_max))
            .collect();
        Self {
            membership,
            coefficients,
        }
    }
}

impl SymmetricOperator for DyadicOp {
    fn dim(&self) -> usize {
        self.membership.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.coefficients.len()];
        for (ids, v) in self.membership.iter().zip(x) {
            for &id in ids {
                sums[id] += v;
            }
        }
        for (s, c) in sums.iter_mut().zip(&self.coefficients) {
            *s *= c;
        }
        self.membership
            .iter()
            .map(|ids| ids.iter().map(|&id| sums[id]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::measures::RadialMeasure;

    fn psi_classical() -> PsiProfile {
        PsiProfile::new(KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap())
    }

    #[test]
    fn origin_only_meets_the_root() {
        let psi = psi_classical();
        let o = Complex64::new(0.0, 0.0);
        let v = dyadic_kernel(Beta::Zero, &psi, o, o, 6);
        assert!((v - psi.eval(1.0)).abs() < 1e-14);
    }

    #[test]
    fn chain_at_point_nine() {
        // Ψ(t) = 1/t: Σ_{ℓ=0}^{3} 4^ℓ.
        let psi = psi_classical();
        let z = Complex64::new(0.9, 0.0);
        let v = dyadic_kernel(Beta::Zero, &psi, z, z, 10);
        assert!((v - 85.0).abs() < 1e-10, "{v}");
    }
}
