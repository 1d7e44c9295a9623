//! Norms of kernel operators between weighted spaces.
//!
//! At `p = 2` the norm of `K: L²(σμ) → L²(uμ)` is the top singular value of
//! `D_{uμ}^{1/2} K D_{σμ}^{1/2}`, obtained by Lanczos on its Gram operator.
//! For nonnegative kernels a Collatz–Wielandt bound brackets it from above.
//! For `p ≠ 2` only a lower bound is produced.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A real symmetric kernel acting on node values, without quadrature masses.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self * DVector::from_column_slice(x)).data.into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    /// Present only for nonnegative kernels.
    pub upper: Option<f64>,
    pub iterations: usize,
}

impl NormBracket {
    /// Midpoint of the bracket, or the lower bound alone.
    pub fn estimate(&self) -> f64 {
        self.upper.map_or(self.lower, |u| 0.5 * (self.lower + u))
    }
}

const MAX_LANCZOS: usize = 160;
const COLLATZ_STEPS: usize = 60;

/// Largest eigenvalue and Ritz vector of a symmetric positive semidefinite
/// operator `b` on `R^n`.
pub(crate) fn lanczos_top(n: usize, b: &dyn Fn(&[f64]) -> Vec<f64>, seed: u64) -> (f64, Vec<f64>, usize) {
    if n == 0 {
        return (0.0, Vec::new(), 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| 1.0 + 0.1 * rng.gen::<f64>()).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let steps = n.min(MAX_LANCZOS);
    let mut best = (0.0, basis[0].clone());
    for k in 0..steps {
        let mut w = b(&basis[k]);
        let a = dot(&basis[k], &w);
        alpha.push(a);
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(&mut w, -c, v);
            }
        }
        let (theta, s) = tridiagonal_top(&alpha, &beta);
        let bnorm = dot(&w, &w).sqrt();
        let residual = (bnorm * s[k]).abs();
        let mut y = vec![0.0; n];
        for (si, v) in s.iter().zip(&basis) {
            axpy(&mut y, *si, v);
        }
        best = (theta, y);
        if residual <= 1e-13 * theta.abs().max(f64::MIN_POSITIVE) || bnorm <= 1e-300 || k + 1 == steps {
            return (best.0, best.1, k + 1);
        }
        beta.push(bnorm);
        basis.push(w.iter().map(|x| x / bnorm).collect());
    }
    (best.0, best.1, steps)
}

fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// `‖K‖` from `L²(right)` to `L²(left)`, where `left = u·mass` and
/// `right = σ·mass` per node. `nonnegative` enables the upper bound.
pub fn weighted_norm_p2(
    k: &dyn SymmetricOperator,
    left: &[f64],
    right: &[f64],
    nonnegative: bool,
) -> NormBracket {
    let n = k.dim();
    let dl: Vec<f64> = left.to_vec();
    let dr: Vec<f64> = right.iter().map(|v| v.sqrt()).collect();
    // Gram operator D_r K D_l K D_r.
    let gram = |x: &[f64]| -> Vec<f64> {
        let a: Vec<f64> = x.iter().zip(&dr).map(|(v, d)| v * d).collect();
        let b: Vec<f64> = k.apply(&a).iter().zip(&dl).map(|(v, d)| v * d).collect();
        k.apply(&b).iter().zip(&dr).map(|(v, d)| v * d).collect()
    };
    let (theta, ritz, iterations) = lanczos_top(n, &gram, 0x5eed);
    let lower = theta.max(0.0).sqrt();
    let upper = nonnegative.then(|| collatz_upper(&gram, &ritz).sqrt().max(lower));
    NormBracket {
        lower,
        upper,
        iterations,
    }
}

/// `max_i (Bx)_i / x_i` minimized along power iterates from `|ritz|`.
fn collatz_upper(b: &dyn Fn(&[f64]) -> Vec<f64>, ritz: &[f64]) -> f64 {
    let top = ritz.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let mut x: Vec<f64> = ritz.iter().map(|v| v.abs() + 1e-9 * top).collect();
    let mut best = f64::INFINITY;
    for _ in 0..COLLATZ_STEPS {
        let y = b(&x);
        let ratio = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| yi / xi)
            .fold(0.0f64, f64::max);
        best = best.min(ratio);
        let floor = 1e-12 * y.iter().fold(0.0f64, |m, v| m.max(*v));
        x = y.iter().map(|v| v.max(floor)).collect();
        normalize(&mut x);
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    best
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn duality_map(x: &[f64], p: f64) -> Vec<f64> {
    x.iter().map(|v| v.signum() * v.abs().powf(p - 1.0)).collect()
}

/// Lower bound for `‖K‖_{L^p(right) → L^p(left)}` by a nonlinear power
/// method on `A = D_left^{1/p} K D_right^{1/p'}` from `starts` random
/// nonnegative vectors.
pub fn lp_norm_lower(
    k: &dyn SymmetricOperator,
    left: &[f64],
    right: &[f64],
    p: f64,
    starts: usize,
    seed: u64,
) -> f64 {
    let n = k.dim();
    let q = p / (p - 1.0);
    let dl: Vec<f64> = left.iter().map(|v| v.powf(1.0 / p)).collect();
    let dr: Vec<f64> = right.iter().map(|v| v.powf(1.0 / q)).collect();
    let a = |x: &[f64]| -> Vec<f64> {
        let t: Vec<f64> = x.iter().zip(&dr).map(|(v, d)| v * d).collect();
        k.apply(&t).iter().zip(&dl).map(|(v, d)| v * d).collect()
    };
    let at = |y: &[f64]| -> Vec<f64> {
        let t: Vec<f64> = y.iter().zip(&dl).map(|(v, d)| v * d).collect();
        k.apply(&t).iter().zip(&dr).map(|(v, d)| v * d).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for s in 0..starts.max(1) {
        let mut x: Vec<f64> = if s == 0 {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.gen::<f64>()).collect()
        };
        for _ in 0..60 {
            let nx = lp_norm(&x, p);
            if nx == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = a(&x);
            best = best.max(lp_norm(&y, p));
            let z = at(&duality_map(&y, p));
            let next = duality_map(&z, q);
            if next.iter().all(|v| *v == 0.0) {
                break;
            }
            x = next;
        }
    }
    best
}
