//! Reproducing kernels `B_z(ζ) = K(z̄ζ)`, either as the power series
//! `Σ x^n / (2ω_{2n+1})` or through the representation
//! `K(w) = (1 - w)^{-γ} ∫ dν(r) / (1 - r w)`.

mod hausdorff;
mod lemmas;
mod moments;

pub use hausdorff::{fit_discrete_measure, DiscreteMeasureFit};
pub use lemmas::{
    difference_bound_check, stieltjes_lower_bound, one_minus_rz_equivalence, pointwise_constant,
    tail_stieltjes_ratio, StieltjesBound,
};
pub use moments::{
    check_completely_monotone, construct_omega_from_nu, odd_moments_from_phi, MomentConstruction,
    MonotonicityReport,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::RadialMeasure;

/// Closest admissible approach to the unit circle for the series.
pub const SERIES_RADIUS_LIMIT: f64 = 1.0 - 1.0 / (1u64 << 20) as f64;

const MAX_SERIES_TERMS: usize = 1 << 22;

/// Safety factor on the geometric tail bound; coefficients of doubling
/// weights grow, so the last coefficient underestimates the rest.
const TAIL_SAFETY: f64 = 4.0;

/// The pair `(γ, ν)` defining a kernel, plus an optional cache of the odd
/// moments of the corresponding `ω`.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub gamma: f64,
    pub nu: RadialMeasure,
    /// `ω_{2k+1}` for `k = 0..len`, when constructed.
    pub omega_moments: Option<Vec<f64>>,
    pub series_tolerance: f64,
}

impl KernelSpec {
    pub fn new(gamma: f64, nu: RadialMeasure) -> Result<Self> {
        if !(gamma >= 1.0) {
            return Err(Error::Precondition(format!("gamma = {gamma} < 1")));
        }
        if !nu.is_explicit() {
            return Err(Error::Precondition(format!(
                "nu = {} must be given by a density and atoms",
                nu.name
            )));
        }
        let mass = nu.total_mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Precondition(format!("nu has total mass {mass}")));
        }
        Ok(Self {
            gamma,
            nu,
            omega_moments: None,
            series_tolerance: 1e-12,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.series_tolerance = tol;
        self
    }

    /// Fills the moment cache with `ω_{2k+1}`, `k < count`. Only meaningful
    /// for `γ = 1`, where `1/(2ω_{2k+1}) = Σ_{j ≤ k} ν_j`.
    pub fn with_moments(mut self, count: usize) -> Self {
        let phi: Vec<f64> = (0..count).map(|j| self.nu.moment(j as f64)).collect();
        self.omega_moments = Some(odd_moments_from_phi(&phi));
        self
    }

    /// `K(w)` from the representation; equals `B_z(ζ)` for `w = z̄ζ`.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        kernel_integral(self, w)
    }

    pub fn bergman(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        self.eval(z.conj() * zeta)
    }

    /// `Ψ(t) = t^{1-γ} ∫ dν / (1 - r(1 - t))` for `t ∈ (0, 2)`.
    pub fn psi(&self, t: f64) -> f64 {
        let s = self
            .nu
            .stieltjes_tol(Complex64::new(1.0 - t, 0.0), self.series_tolerance)
            .re;
        t.powf(1.0 - self.gamma) * s
    }
}

/// `Σ_{n ≥ 0} x^n / (2ω_{2n+1})`, summed in ascending order and truncated by
/// the geometric tail bound.
pub fn kernel_series<M: Fn(usize) -> f64>(moments: M, x: Complex64, tol: f64) -> Result<Complex64> {
    let modulus = x.norm();
    if modulus > SERIES_RADIUS_LIMIT {
        return Err(Error::TruncationInfeasible { modulus });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut abs_power = 1.0;
    for n in 0..MAX_SERIES_TERMS {
        let m = moments(n);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidMoments(format!("omega_{} = {m}", 2 * n + 1)));
        }
        let coef = 1.0 / (2.0 * m);
        sum += power * coef;
        power *= x;
        abs_power *= modulus;
        if TAIL_SAFETY * abs_power * coef / (1.0 - modulus) < tol {
            return Ok(sum);
        }
    }
    Err(Error::TruncationInfeasible { modulus })
}

/// `(1 - w)^{-γ} ∫ dν(r) / (1 - r w)` on the principal branch.
pub fn kernel_integral(spec: &KernelSpec, w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let prefactor = if spec.gamma == 1.0 {
        (one - w).inv()
    } else {
        (-(one - w).ln() * spec.gamma).exp()
    };
    prefactor * spec.nu.stieltjes_tol(w, spec.series_tolerance)
}
