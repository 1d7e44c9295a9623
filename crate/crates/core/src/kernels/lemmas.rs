use num_complex::Complex64;

use super::{kernel_integral, KernelSpec};
use crate::error::{Error, Result};
use crate::measures::{RadialMeasure, QUAD_TOL};

/// Both sides of `|∫ dν/(1-rz)| ≥ 2^{-1/2} ∫ dν/|1-rz|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StieltjesBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

pub fn stieltjes_lower_bound(nu: &RadialMeasure, z: Complex64) -> Result<StieltjesBound> {
    if z.norm() >= 1.0 {
        return Err(Error::Precondition(format!("|z| = {} ≥ 1", z.norm())));
    }
    let lhs = nu.stieltjes_tol(z, QUAD_TOL).norm();
    let rhs = nu.abs_stieltjes(z, QUAD_TOL) / std::f64::consts::SQRT_2;
    Ok(StieltjesBound {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `[∫ dν/(1-rx)] ω̂(x) / (1-x)^{γ-1}`, which should stay between two
/// positive constants.
pub fn tail_stieltjes_ratio(spec: &KernelSpec, omega: &RadialMeasure, x: f64) -> Result<f64> {
    let tail = omega.tail(x);
    if !(tail > 0.0) {
        return Err(Error::TailVanished(x));
    }
    let s = spec
        .nu
        .stieltjes_tol(Complex64::new(x, 0.0), spec.series_tolerance)
        .re;
    Ok(s * tail / (1.0 - x).powf(spec.gamma - 1.0))
}

/// `C(c, γ) = √2 (2+γ) c^{γ+1} (3c+1) / (c-1)^{γ+2}`.
pub fn pointwise_constant(c: f64, gamma: f64) -> f64 {
    std::f64::consts::SQRT_2 * (2.0 + gamma) * c.powf(gamma + 1.0) * (3.0 * c + 1.0)
        / (c - 1.0).powf(gamma + 2.0)
}

/// `(|B_{z0}(ζ) - B_z(ζ)|, C(c,γ) |z - z0| / |1 - ζ̄z| · |B_z(ζ)|)`.
pub fn difference_bound_check(
    spec: &KernelSpec,
    z0: Complex64,
    z: Complex64,
    zeta: Complex64,
    c: f64,
) -> Result<(f64, f64)> {
    if !(c > 1.0) {
        return Err(Error::Precondition(format!("c = {c} must exceed 1")));
    }
    for p in [z0, z, zeta] {
        if p.norm() >= 1.0 {
            return Err(Error::Precondition(format!("|{p}| ≥ 1")));
        }
    }
    let gap = (Complex64::new(1.0, 0.0) - zeta.conj() * z).norm();
    let dist = (z - z0).norm();
    if gap < c * dist {
        return Err(Error::SeparationViolated {
            gap,
            needed: c * dist,
        });
    }
    let b0 = kernel_integral(spec, z0.conj() * zeta);
    let b = kernel_integral(spec, z.conj() * zeta);
    let lhs = (b0 - b).norm();
    let bound = pointwise_constant(c, spec.gamma) * dist / gap * b.norm();
    Ok((lhs, bound))
}

/// `(|1-rz| / ((1-r) + r|1-z|), |1-rz| / (1 - r(1-|1-z|)))`.
///
/// The two denominators are algebraically equal; both are returned so the
/// comparison with each form stays visible in reports.
pub fn one_minus_rz_equivalence(z: Complex64, r: f64) -> Result<(f64, f64)> {
    if z.norm() >= 1.0 || !(0.0..=1.0).contains(&r) {
        return Err(Error::Precondition(format!("z = {z}, r = {r}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let num = (one - z * r).norm();
    let a = (1.0 - r) + r * (one - z).norm();
    let b = 1.0 - r * (1.0 - (one - z).norm());
    Ok((num / a, num / b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_for_c2_gamma1() {
        let v = pointwise_constant(2.0, 1.0);
        assert!((v - 84.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn real_points_give_sqrt2() {
        let nu = RadialMeasure::lebesgue();
        let b = stieltjes_lower_bound(&nu, Complex64::new(0.6, 0.0)).unwrap();
        assert!((b.ratio - std::f64::consts::SQRT_2).abs() < 1e-10);
        let b = stieltjes_lower_bound(&nu, Complex64::new(0.0, 0.0)).unwrap();
        assert!((b.lhs - 1.0).abs() < 1e-14);
    }

    #[test]
    fn separation_is_enforced() {
        let spec = KernelSpec::new(1.0, RadialMeasure::lebesgue()).unwrap();
        let r = difference_bound_check(
            &spec,
            Complex64::new(0.9, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.9, 0.0),
            2.0,
        );
        assert!(matches!(r, Err(Error::SeparationViolated { .. })));
        let z = Complex64::new(0.3, 0.1);
        let (lhs, bound) = difference_bound_check(&spec, z, z, Complex64::new(0.2, 0.0), 2.0).unwrap();
        assert_eq!((lhs, bound.min(0.0)), (0.0, 0.0));
    }
}
