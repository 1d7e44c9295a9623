//! Integral operators on the polar quadrature: the Bergman projection, its
//! absolute-kernel version, the dyadic models, norm estimation and the
//! lemmas comparing them.

mod dyadic;
mod lemmas;
mod norms;

pub use dyadic::{apply_dyadic, dyadic_kernel, dyadic_kernel_matrix, DyadicOp};
pub use lemmas::{
    comparability_constants, continuous_kernel, node_comparability, separated_square_lower_bound,
    separation_constants, tail_difference_bound, Comparability, SeparatedSquareReport,
    TailDifferenceReport,
};
pub use norms::{lp_norm_lower, weighted_norm_p2, NormBracket, SymmetricOperator};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::disk::{DiskQuadrature, Field};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Largest quadrature for which kernels are assembled as dense matrices.
pub const ASSEMBLY_THRESHOLD: usize = 4096;

/// `Ψ(t) = t^{1-γ} ∫ dν / (1 - r(1 - t))` on `(0, 2)`.
#[derive(Clone, Debug)]
pub struct PsiProfile {
    pub spec: KernelSpec,
}

impl PsiProfile {
    pub fn new(spec: KernelSpec) -> Self {
        Self { spec }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.spec.psi(t)
    }

    /// `Ψ(2^{-ℓ}) 2^ℓ` for `ℓ = 0..=l_max`.
    pub fn level_weights(&self, l_max: u32) -> Vec<f64> {
        (0..=l_max)
            .map(|l| {
                let len = 0.5f64.powi(l as i32);
                self.eval(len) / len
            })
            .collect()
    }

    /// `(sup_{t1 ≤ t2} Ψ(t2)/Ψ(t1), sup_t Ψ(t)/Ψ(2t))` over `t = 2^{-k}`,
    /// `k ≤ depth`, and the points `2^{-k} · 3/2` in between.
    pub fn diagnostics(&self, depth: u32) -> (f64, f64) {
        let mut ts: Vec<f64> = (0..=depth)
            .flat_map(|k| {
                let t = 0.5f64.powi(k as i32);
                [t, 0.75 * t]
            })
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let vals: Vec<f64> = ts.iter().map(|t| self.eval(*t)).collect();
        let mut decreasing: f64 = 0.0;
        let mut running_min = f64::INFINITY;
        for v in &vals {
            running_min = running_min.min(*v);
            decreasing = decreasing.max(v / running_min);
        }
        let doubling = ts
            .iter()
            .filter(|t| **t < 1.0)
            .map(|t| self.eval(*t) / self.eval(2.0 * t))
            .fold(0.0, f64::max);
        (decreasing, doubling)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// `P_ω`, kernel `B_z(ζ)`.
    Bergman,
    /// `P⁺_ω = P⁺_{Ψ,μ}`, kernel `|B_z(ζ)|`.
    Positive,
}

/// A kernel operator bound to a quadrature, with a dense matrix when the
/// quadrature is small enough.
#[derive(Clone, Debug)]
pub struct OperatorHandle {
    pub kind: OperatorKind,
    pub quad_id: u64,
    pub spec: KernelSpec,
    nodes: Vec<Complex64>,
    masses: Vec<f64>,
    matrix: Option<DMatrix<Complex64>>,
}

impl OperatorHandle {
    pub fn new(kind: OperatorKind, spec: &KernelSpec, quad: &DiskQuadrature) -> Self {
        let nodes: Vec<Complex64> = quad.nodes().collect();
        let matrix = (quad.len() <= ASSEMBLY_THRESHOLD).then(|| kernel_matrix(spec, &nodes));
        Self {
            kind,
            quad_id: quad.id,
            spec: spec.clone(),
            nodes,
            masses: quad.masses.clone(),
            matrix,
        }
    }

    pub fn is_assembled(&self) -> bool {
        self.matrix.is_some()
    }

    /// `K_{ij} = B_{z_i}(z_j)^*`, so `(P f)(z_i) = Σ_j K_{ij} f_j m_j`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.matrix {
            Some(m) => m[(i, j)],
            None => self.spec.eval(self.nodes[i] * self.nodes[j].conj()),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn row_apply<T, F>(&self, f: &[T], combine: F) -> Vec<T>
    where
        T: Copy + Send + Sync + std::iter::Sum<T>,
        F: Fn(Complex64, T, f64) -> T + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|i| match &self.matrix {
                // The kernel is Hermitian, so row i is the conjugate of the
                // contiguous column i.
                Some(m) => m
                    .column(i)
                    .iter()
                    .zip(f.iter().zip(&self.masses))
                    .map(|(k, (v, w))| combine(k.conj(), *v, *w))
                    .sum(),
                None => (0..self.len())
                    .map(|j| combine(self.entry(i, j), f[j], self.masses[j]))
                    .sum(),
            })
            .collect()
    }

    /// Matrix-free application, ignoring any assembled matrix. For
    /// `Positive` the kernel is replaced by its modulus.
    pub fn apply_matrix_free(&self, f: &[Complex64]) -> Vec<Complex64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                (0..self.len())
                    .map(|j| {
                        let k = self.spec.eval(self.nodes[i] * self.nodes[j].conj());
                        let k = match self.kind {
                            OperatorKind::Bergman => k,
                            OperatorKind::Positive => Complex64::new(k.norm(), 0.0),
                        };
                        k * f[j] * self.masses[j]
                    })
                    .sum()
            })
            .collect()
    }

    /// Real symmetric kernel `|K_{ij}|` as a dense matrix.
    pub fn abs_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = self.entry(i, j).norm();
            }
        }
        out
    }
}

fn kernel_matrix(spec: &KernelSpec, nodes: &[Complex64]) -> DMatrix<Complex64> {
    let n = nodes.len();
    let cols: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| spec.eval(nodes[i] * nodes[j].conj()))
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `(P_ω f)(z_i) = Σ_j f(z_j) conj(B_{z_i}(z_j)) m_j`.
pub fn apply_bergman(h: &OperatorHandle, f: &Field<Complex64>) -> Result<Field<Complex64>> {
    if h.quad_id != f.quad_id || f.len() != h.len() {
        return Err(Error::QuadratureMismatch);
    }
    let values = h.row_apply(&f.values, |k, v, m| k * v * m);
    Ok(Field {
        quad_id: h.quad_id,
        values,
    })
}

/// `(P⁺ f)(z_i) = Σ_j f(z_j) |B_{z_i}(z_j)| m_j`.
pub fn apply_positive(h: &OperatorHandle, f: &Field<f64>) -> Result<Field<f64>> {
    if h.quad_id != f.quad_id || f.len() != h.len() {
        return Err(Error::QuadratureMismatch);
    }
    let values = h.row_apply(&f.values, |k, v, m| k.norm() * v * m);
    Ok(Field {
        quad_id: h.quad_id,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::build_quadrature;
    use crate::measures::RadialMeasure;

    #[test]
    fn origin_row_of_classical_kernel_sums_masses() {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 3, 1).unwrap();
        let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap();
        let h = OperatorHandle::new(OperatorKind::Positive, &spec, &q);
        // |B_0| = 1, but no node sits at 0; check B_z(0) = 1 through the kernel.
        assert!((h.spec.eval(Complex64::new(0.0, 0.0)).re - 1.0).abs() < 1e-15);
        let one = Field::constant(&q, 1.0);
        let out = apply_positive(&h, &one).unwrap();
        assert!(out.values.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn mismatch_is_reported() {
        let w = RadialMeasure::lebesgue();
        let q1 = build_quadrature(&w, 2, 1).unwrap();
        let q2 = build_quadrature(&w, 2, 1).unwrap();
        let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap();
        let h = OperatorHandle::new(OperatorKind::Bergman, &spec, &q1);
        let f = Field::constant(&q2, Complex64::new(1.0, 0.0));
        assert_eq!(apply_bergman(&h, &f), Err(Error::QuadratureMismatch));
    }
}
