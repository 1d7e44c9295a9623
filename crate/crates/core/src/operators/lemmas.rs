//! Measured versions of the kernel comparison and lower-bound lemmas.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2, TAU};

use super::dyadic::dyadic_kernel;
use super::PsiProfile;
use crate::disk::{Beta, DiskQuadrature, DyadicInterval, Field};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Range of `K_Ψ / (K⁰_Ψ + K^{1/2}_Ψ)` over a sample of point pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparability {
    pub c_low: f64,
    pub c_high: f64,
    pub samples: usize,
    pub witness_low: (Complex64, Complex64),
    pub witness_high: (Complex64, Complex64),
}

impl Comparability {
    fn new() -> Self {
        let o = Complex64::new(0.0, 0.0);
        Self {
            c_low: f64::INFINITY,
            c_high: 0.0,
            samples: 0,
            witness_low: (o, o),
            witness_high: (o, o),
        }
    }

    fn record(&mut self, ratio: f64, z: Complex64, zeta: Complex64) {
        self.samples += 1;
        if ratio < self.c_low {
            self.c_low = ratio;
            self.witness_low = (z, zeta);
        }
        if ratio > self.c_high {
            self.c_high = ratio;
            self.witness_high = (z, zeta);
        }
    }
}

/// `K_Ψ(z, ζ) = Ψ(|1 - ζ̄z|) / |1 - ζ̄z|`.
pub fn continuous_kernel(psi: &PsiProfile, z: Complex64, zeta: Complex64) -> f64 {
    let t = (Complex64::new(1.0, 0.0) - zeta.conj() * z).norm();
    psi.eval(t) / t
}

fn ratio_at(psi: &PsiProfile, z: Complex64, zeta: Complex64, l_max: u32) -> f64 {
    let d = dyadic_kernel(Beta::Zero, psi, z, zeta, l_max)
        + dyadic_kernel(Beta::Half, psi, z, zeta, l_max);
    continuous_kernel(psi, z, zeta) / d
}

/// Random pairs at every scale: `1 - |z|` and `1 - |ζ|` are `2^{-u}` with
/// `u` uniform on `[0, depth]`, and the angular offset of `ζ` from `z` is
/// `±2^{-u}` with `u` uniform on `[0, depth + 1]`. Half of the radii are
/// snapped just inside `1 - 2^{-k}` and half of the angles just beside a
/// breakpoint of one of the grids, since the extreme ratios sit at these
/// edges. Dyadic sums run to level `depth + 2`.
pub fn comparability_constants(
    psi: &PsiProfile,
    sample_count: usize,
    seed: u64,
    depth: u32,
) -> Result<Comparability> {
    if sample_count == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Comparability::new();
    let d = depth as f64;
    let radius = |rng: &mut ChaCha8Rng| {
        let u = rng.gen_range(0.0..=d);
        if rng.gen::<bool>() {
            1.0 - 2f64.powf(-u)
        } else {
            1.0 - 2f64.powf(-u.round()) * (1.0 + EDGE)
        }
        .max(0.0)
    };
    for _ in 0..sample_count {
        let rz = radius(&mut rng);
        let rw = radius(&mut rng);
        let mut t: f64 = rng.gen();
        if rng.gen::<bool>() {
            let level = rng.gen_range(1..=depth + 1);
            let n = (1u64 << level) as f64;
            let shift = if rng.gen::<bool>() { 0.5 } else { 0.0 };
            let side = if rng.gen::<bool>() { EDGE } else { -EDGE };
            t = (((t * n - shift).floor() + shift) / n + side).rem_euclid(1.0);
        }
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let dt = sign * 2f64.powf(-rng.gen_range(0.0..=d + 1.0)) * 0.5;
        let z = Complex64::from_polar(rz, TAU * t);
        let zeta = Complex64::from_polar(rw, TAU * (t + dt));
        out.record(ratio_at(psi, z, zeta, depth + 2), z, zeta);
    }
    Ok(out)
}

/// Relative offset used to place sample points beside grid edges.
const EDGE: f64 = 1e-9;

/// The same ratio over all pairs of quadrature nodes, with dyadic sums to
/// `l_max`.
pub fn node_comparability(psi: &PsiProfile, quad: &DiskQuadrature, l_max: u32) -> Comparability {
    let nodes: Vec<Complex64> = quad.nodes().collect();
    let mut out = Comparability::new();
    for &z in &nodes {
        for &zeta in &nodes {
            out.record(ratio_at(psi, z, zeta, l_max), z, zeta);
        }
    }
    out
}

fn separation_excess(c1: f64, gamma: f64) -> f64 {
    SQRT_2 * (2.0 + gamma) * c1.powf(gamma) * (3.0 * c1 + 1.0) / (c1 - 1.0).powf(gamma + 2.0)
}

/// `(c₁, D₁, D₂)`: the smallest `c₁ > 1` with
/// `√2(2+γ)c₁^γ(3c₁+1)/(c₁-1)^{γ+2} ≤ 1/2`, `D₁ = √2 c₁ - 1/3`, `D₂ = D₁ + 2`.
pub fn separation_constants(gamma: f64) -> (f64, f64, f64) {
    let mut hi = 2.0;
    while separation_excess(hi, gamma) > 0.5 {
        hi *= 2.0;
    }
    let mut lo = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if separation_excess(mid, gamma) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d1 = SQRT_2 * hi - 1.0 / 3.0;
    (hi, d1, d1 + 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparatedSquareReport {
    pub level: u32,
    /// Index of `S₂` among level squares of `D⁰`; `S₁` has index 0.
    pub partner: u64,
    pub distance: f64,
    pub d1: f64,
    pub d2: f64,
    /// `min_{z ∈ S₂} |P_ω f(z)|` over nodes.
    pub min_projection: f64,
    /// `(ω⊗m)`-average of `f` over `S₁`.
    pub average: f64,
    pub ratio: f64,
}

/// Both sides of the pointwise lower bound for `f ≥ 0` on `S₁`; `f = None`
/// means `1_{S₁}`. Side lengths and distances are normalized so the full
/// circle has length 1.
pub fn separated_square_lower_bound(
    spec: &KernelSpec,
    quad: &DiskQuadrature,
    level: u32,
    f: Option<&Field<f64>>,
) -> Result<SeparatedSquareReport> {
    if level == 0 || level > quad.depth {
        return Err(Error::NoAdmissiblePair(level));
    }
    let (_, d1, d2) = separation_constants(spec.gamma);
    let side = 0.5f64.powi(level as i32);
    let count = 1u64 << level;
    // Squares reach the circle, so the gap between S(I_0) and S(I_k) is the
    // chord over k - 1 empty arcs (or the complementary side).
    let chord = |k: u64| {
        let gap = ((k - 1) as f64 * side).min(1.0 - (k + 1) as f64 * side).max(0.0);
        (2.0 * (PI * gap).sin()).abs() / TAU
    };
    let partner = (2..count)
        .find(|&k| chord(k) >= d1 * side)
        .filter(|&k| chord(k) <= d2 * side)
        .ok_or(Error::NoAdmissiblePair(level))?;
    let s1 = DyadicInterval {
        beta: Beta::Zero,
        level,
        index: 0,
    }
    .id();
    let s2 = DyadicInterval {
        beta: Beta::Zero,
        level,
        index: partner,
    }
    .id();
    let in_s1: Vec<usize> = (0..quad.len())
        .filter(|&i| quad.square_of(i, Beta::Zero, level) == Some(s1))
        .collect();
    let in_s2: Vec<usize> = (0..quad.len())
        .filter(|&i| quad.square_of(i, Beta::Zero, level) == Some(s2))
        .collect();
    let values: Vec<f64> = match f {
        Some(field) => {
            quad.check(field)?;
            let outside = (0..quad.len())
                .any(|i| field.values[i] != 0.0 && quad.square_of(i, Beta::Zero, level) != Some(s1));
            if outside || field.values.iter().any(|v| *v < 0.0) {
                return Err(Error::Precondition(
                    "f must be nonnegative and supported on S1".into(),
                ));
            }
            field.values.clone()
        }
        None => (0..quad.len())
            .map(|i| if quad.square_of(i, Beta::Zero, level) == Some(s1) { 1.0 } else { 0.0 })
            .collect(),
    };
    let mass: f64 = in_s1.iter().map(|&i| quad.masses[i]).sum();
    let average = in_s1.iter().map(|&i| values[i] * quad.masses[i]).sum::<f64>() / mass;
    let min_projection = in_s2
        .iter()
        .map(|&i| {
            let z = quad.cells[i].node;
            in_s1
                .iter()
                .map(|&j| spec.eval(z * quad.cells[j].node.conj()) * values[j] * quad.masses[j])
                .sum::<Complex64>()
                .norm()
        })
        .fold(f64::INFINITY, f64::min);
    let ratio = if average > 0.0 { min_projection / average } else { 0.0 };
    Ok(SeparatedSquareReport {
        level,
        partner,
        distance: chord(partner) / side,
        d1,
        d2,
        min_projection,
        average,
        ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailDifferenceReport {
    /// `Σ |B_{z₀} - B_z| v m` over cells at distance ≥ `2|z - z₀|` from `z₀`.
    pub lhs: f64,
    /// `min M_ω(v)` over nodes in `D(z₀, √2(1 - |z₀|))`.
    pub rhs: f64,
    pub ratio: f64,
}

/// `maximal` holds `M_ω(v)` at the nodes.
pub fn tail_difference_bound(
    spec: &KernelSpec,
    quad: &DiskQuadrature,
    v: &Field<f64>,
    maximal: &Field<f64>,
    z0: Complex64,
    z: Complex64,
    c: f64,
) -> Result<TailDifferenceReport> {
    quad.check(v)?;
    quad.check(maximal)?;
    let dist = (z - z0).norm();
    if z0.norm() < 0.5 || z0.norm() >= 1.0 || dist > c * (1.0 - z0.norm()) {
        return Err(Error::Precondition(format!(
            "need |z0| >= 1/2 and |z - z0| <= c(1 - |z0|), got |z0| = {}, |z - z0| = {dist}",
            z0.norm()
        )));
    }
    let lhs: f64 = quad
        .cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| (cell.node - z0).norm() >= 2.0 * dist)
        .map(|(i, cell)| {
            let d = spec.bergman(z0, cell.node) - spec.bergman(z, cell.node);
            d.norm() * v.values[i] * quad.masses[i]
        })
        .sum();
    let radius = SQRT_2 * (1.0 - z0.norm());
    let rhs = quad
        .cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| (cell.node - z0).norm() < radius)
        .map(|(i, _)| maximal.values[i])
        .fold(f64::INFINITY, f64::min);
    if !rhs.is_finite() {
        return Err(Error::Precondition(
            "no quadrature node near z0; increase depth".into(),
        ));
    }
    Ok(TailDifferenceReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::RadialMeasure;

    #[test]
    fn empty_sample_is_an_error() {
        let psi = PsiProfile::new(KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap());
        assert_eq!(comparability_constants(&psi, 0, 1, 4), Err(Error::EmptySample));
    }

    #[test]
    fn separation_threshold_is_tight() {
        for gamma in [1.0, 2.0] {
            let (c1, d1, d2) = separation_constants(gamma);
            assert!(separation_excess(c1, gamma) <= 0.5);
            assert!(separation_excess(c1 * (1.0 - 1e-9), gamma) > 0.5);
            assert!((d1 - (SQRT_2 * c1 - 1.0 / 3.0)).abs() < 1e-12);
            assert_eq!(d2, d1 + 2.0);
        }
    }
}
