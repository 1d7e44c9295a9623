use crate::error::{Error, Result};
use crate::measures::{MeasureKind, RadialMeasure, QUAD_TOL};
use crate::quad::integrate_graded;

/// Cutoff `1 - 2^{-30}` for the divergence proxy of `∫ dν / (1 - r)`.
const PROXY_CUTOFF_LOG2: i32 = 30;

/// The proxy must exceed this multiple of `ν([0, 1])`.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

/// Output of the moment construction with shift `a = 1/2`.
#[derive(Clone, Debug)]
pub struct MomentConstruction {
    pub shift_a: f64,
    /// `F(a + m)` for `m = 0..=m_max`.
    pub f_values: Vec<f64>,
    /// `φ̂(j) = ν_j` for the indices entering the partial-sum identity.
    pub phi_coefficients: Vec<f64>,
    /// `ω_m = 1 / (2 F(a + m))`.
    pub constructed_moments: Vec<f64>,
    /// Largest deviation in `F(a + 2n + 1) = Σ_{j ≤ n} φ̂(j)`.
    pub partial_sum_residual: f64,
    /// `∫_0^{1 - 2^{-30}} dν / (1 - r)`, infinite with an atom at 1.
    pub divergence_proxy: f64,
    /// False when the proxy stays below `DIVERGENCE_FACTOR · ν([0, 1])`.
    pub hypothesis_ok: bool,
}

/// `ω_m = 1 / (2 ∫ (1 - r^{(m+1)/2}) / (1 - r) dν)` for `m = 0..=m_max`.
pub fn construct_omega_from_nu(nu: &RadialMeasure, m_max: usize) -> Result<MomentConstruction> {
    if !nu.is_explicit() {
        return Err(Error::Precondition("nu must be explicit".into()));
    }
    let mass = nu.total_mass();
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Precondition(format!("nu has total mass {mass}")));
    }
    let f_values: Vec<f64> = (0..=m_max)
        .map(|m| nu.harmonic_transform_real(0.5 * (m as f64 + 1.0)))
        .collect();
    let constructed_moments: Vec<f64> = f_values.iter().map(|f| 1.0 / (2.0 * f)).collect();

    let n_max = m_max.saturating_sub(1) / 2;
    let phi_coefficients: Vec<f64> = (0..=n_max).map(|j| nu.moment(j as f64)).collect();
    let mut partial = 0.0;
    let mut residual: f64 = 0.0;
    for n in 0..=n_max {
        partial += phi_coefficients[n];
        if 2 * n + 1 <= m_max {
            residual = residual.max((f_values[2 * n + 1] - partial).abs());
        }
    }

    let divergence_proxy = divergence_proxy(nu);
    Ok(MomentConstruction {
        shift_a: 0.5,
        f_values,
        phi_coefficients,
        constructed_moments,
        partial_sum_residual: residual,
        divergence_proxy,
        hypothesis_ok: divergence_proxy > DIVERGENCE_FACTOR * mass,
    })
}

fn divergence_proxy(nu: &RadialMeasure) -> f64 {
    let cutoff = 1.0 - 0.5f64.powi(PROXY_CUTOFF_LOG2);
    let MeasureKind::Explicit { density, atoms } = &nu.kind else {
        return f64::NAN;
    };
    let mut total = 0.0;
    for a in atoms {
        if a.location >= 1.0 {
            return f64::INFINITY;
        }
        if a.location <= cutoff {
            total += a.mass / (1.0 - a.location);
        }
    }
    total + integrate_graded(&|r| density.eval(r) / (1.0 - r), 0.0, cutoff, QUAD_TOL)
}

/// `ω_{2n+1} = 1 / (2 Σ_{j ≤ n} φ̂(j))`, i.e. the kernel coefficients are the
/// partial sums of `φ̂`.
pub fn odd_moments_from_phi(phi: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    phi.iter()
        .map(|p| {
            acc += p;
            1.0 / (2.0 * acc)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub max_order_checked: usize,
    /// `(k, n, (-1)^k Δ^k m_n)` of the first negative difference.
    pub first_violation: Option<(usize, usize, f64)>,
    pub passed: bool,
}

/// Checks `(-1)^k Δ^k m_n ≥ -1e-12` for all `k ≤ k_max`.
pub fn check_completely_monotone(seq: &[f64], k_max: usize) -> MonotonicityReport {
    let max_order = k_max.min(seq.len().saturating_sub(1));
    let mut diff = seq.to_vec();
    for k in 0..=max_order {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (n, d) in diff.iter().enumerate() {
            let v = sign * d;
            if v < -1e-12 {
                return MonotonicityReport {
                    max_order_checked: max_order,
                    first_violation: Some((k, n, v)),
                    passed: false,
                };
            }
        }
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    MonotonicityReport {
        max_order_checked: max_order,
        first_violation: None,
        passed: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_construction_small_moments() {
        let c = construct_omega_from_nu(&RadialMeasure::lebesgue(), 7).unwrap();
        assert!((c.constructed_moments[1] - 0.5).abs() < 1e-14);
        assert!((c.constructed_moments[3] - 1.0 / 3.0).abs() < 1e-14);
        assert!(c.partial_sum_residual < 1e-12);
        // ∫_0^{1-2^-30} dr/(1-r) = 30 ln 2
        assert!((c.divergence_proxy - 30.0 * 2f64.ln()).abs() < 1e-8);
        assert!(c.hypothesis_ok);
    }

    #[test]
    fn atom_at_one_gives_lebesgue_moments() {
        let c = construct_omega_from_nu(&RadialMeasure::atom(1.0, 1.0), 9).unwrap();
        for (m, w) in c.constructed_moments.iter().enumerate() {
            assert!((w - 1.0 / (m as f64 + 1.0)).abs() < 1e-15);
        }
        assert!(c.divergence_proxy.is_infinite());
    }

    #[test]
    fn bounded_nu_violates_hypothesis() {
        let c = construct_omega_from_nu(&RadialMeasure::atom(0.5, 1.0), 3).unwrap();
        assert!(!c.hypothesis_ok);
    }

    #[test]
    fn monotonicity_checks() {
        let lin: Vec<f64> = (0..10).map(|n| n as f64).collect();
        let r = check_completely_monotone(&lin, 3);
        assert_eq!(r.first_violation.map(|v| (v.0, v.1)), Some((1, 0)));
        assert!(check_completely_monotone(&[2.0; 20], 10).passed);
    }
}
