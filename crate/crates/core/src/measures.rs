//! Positive radial measures on `[0, 1]`.
//!
//! A measure is either an explicit density plus atoms, or is defined through
//! its moments from a second measure `ν` (see [`RadialMeasure::from_nu`]).
//! In the second case tails are recovered by numerical Laplace inversion in
//! the variable `t = -ln r`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre, integrate_graded, integrate_graded_scaled};

/// Absolute quadrature tolerance used for all density integrals.
pub const QUAD_TOL: f64 = 1e-12;

const TALBOT_TERMS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Nonnegative density on `[0, 1)`.
#[derive(Clone)]
pub enum Density {
    Zero,
    Constant(f64),
    /// `(α + 1)(1 - r²)^α`, the standard Bergman weight.
    StandardPower { alpha: f64 },
    /// `c (1 - r)^η`.
    OneMinusRPower { scale: f64, eta: f64 },
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Zero => write!(f, "Zero"),
            Density::Constant(c) => write!(f, "Constant({c})"),
            Density::StandardPower { alpha } => write!(f, "StandardPower {{ alpha: {alpha} }}"),
            Density::OneMinusRPower { scale, eta } => {
                write!(f, "OneMinusRPower {{ scale: {scale}, eta: {eta} }}")
            }
            Density::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Density {
    pub fn eval(&self, r: f64) -> f64 {
        if !(0.0..1.0).contains(&r) {
            return 0.0;
        }
        match self {
            Density::Zero => 0.0,
            Density::Constant(c) => *c,
            Density::StandardPower { alpha } => (alpha + 1.0) * (1.0 - r * r).powf(*alpha),
            Density::OneMinusRPower { scale, eta } => scale * (1.0 - r).powf(*eta),
            Density::Custom { f, .. } => f(r),
        }
    }

    /// `∫_a^b density`, closed form where one is available.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        if b <= a {
            return 0.0;
        }
        match self {
            Density::Zero => 0.0,
            Density::Constant(c) => c * (b - a),
            Density::OneMinusRPower { scale, eta } => {
                scale * ((1.0 - a).powf(eta + 1.0) - (1.0 - b).powf(eta + 1.0)) / (eta + 1.0)
            }
            _ => integrate_graded_scaled(&|r| self.eval(r), a, b, QUAD_TOL),
        }
    }

    fn integer_alpha(&self) -> Option<u32> {
        match self {
            Density::StandardPower { alpha } if *alpha >= 0.0 && alpha.fract() == 0.0 => {
                Some(*alpha as u32)
            }
            _ => None,
        }
    }
}

/// The measure `ω` attached to `ν` by `ω_x = 1 / (2 F((x + 1) / 2))`, where
/// `F(s) = ∫ (1 - r^s) / (1 - r) dν(r)`.
#[derive(Clone, Debug)]
pub struct MomentDefined {
    pub nu: RadialMeasure,
}

impl MomentDefined {
    fn laplace(&self, s: Complex64) -> Complex64 {
        (self.nu.harmonic_transform((s + 1.0) * 0.5) * 2.0).inv()
    }

    fn tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.laplace(Complex64::new(0.0, 0.0)).re;
        }
        if x >= 1.0 {
            return 0.0;
        }
        let t = -x.ln();
        let cdf = |s: Complex64| self.laplace(s) / s;
        quad::talbot_inverse(&cdf, t, TALBOT_TERMS).max(0.0)
    }
}

#[derive(Clone, Debug)]
pub enum MeasureKind {
    Explicit { density: Density, atoms: Vec<Atom> },
    Moments(Arc<MomentDefined>),
}

#[derive(Clone, Debug)]
pub struct RadialMeasure {
    pub name: String,
    pub kind: MeasureKind,
}

impl RadialMeasure {
    pub fn new(name: impl Into<String>, density: Density, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.location) || !(a.mass > 0.0) {
                return Err(Error::Precondition(format!(
                    "atom at {} with mass {} is not admissible",
                    a.location, a.mass
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            kind: MeasureKind::Explicit { density, atoms },
        })
    }

    pub fn lebesgue() -> Self {
        Self::explicit("lebesgue", Density::Constant(1.0), vec![])
    }

    /// `(α + 1)(1 - r²)^α dr`.
    pub fn standard(alpha: f64) -> Self {
        Self::explicit(
            format!("standard({alpha})"),
            Density::StandardPower { alpha },
            vec![],
        )
    }

    pub fn atom(location: f64, mass: f64) -> Self {
        Self::explicit(
            format!("atom({location})"),
            Density::Zero,
            vec![Atom { location, mass }],
        )
    }

    fn explicit(name: impl Into<String>, density: Density, atoms: Vec<Atom>) -> Self {
        Self {
            name: name.into(),
            kind: MeasureKind::Explicit { density, atoms },
        }
    }

    /// The measure whose odd moments make `(1-w)^{-1} ∫ dν/(1-rw)` the
    /// reproducing kernel.
    pub fn from_nu(nu: RadialMeasure) -> Self {
        Self {
            name: format!("omega[{}]", nu.name),
            kind: MeasureKind::Moments(Arc::new(MomentDefined { nu })),
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, MeasureKind::Explicit { .. })
    }

    pub fn atoms(&self) -> &[Atom] {
        match &self.kind {
            MeasureKind::Explicit { atoms, .. } => atoms,
            MeasureKind::Moments(_) => &[],
        }
    }

    pub fn density(&self, r: f64) -> Option<f64> {
        match &self.kind {
            MeasureKind::Explicit { density, .. } => Some(density.eval(r)),
            MeasureKind::Moments(_) => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.tail(0.0)
    }

    /// `ω̂(r) = ω([r, 1])`.
    pub fn tail(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms
                    .iter()
                    .filter(|a| a.location >= r)
                    .map(|a| a.mass)
                    .sum();
                density.integral(r, 1.0) + atom_part
            }
            MeasureKind::Moments(m) => m.tail(r),
        }
    }

    /// `ω_x = ∫ r^x dω`, with `0^0 = 1`.
    pub fn moment(&self, x: f64) -> f64 {
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms.iter().map(|a| pow0(a.location, x) * a.mass).sum();
                let dens = if let Some(k) = density.integer_alpha() {
                    // (α+1)/2 · B((x+1)/2, α+1) as a finite product.
                    let h = 0.5 * (x + 1.0);
                    let mut v = 0.5;
                    for j in 0..=k {
                        v *= (j + 1) as f64 / (h + j as f64);
                    }
                    v
                } else {
                    match density {
                        Density::Zero => 0.0,
                        Density::Constant(c) => c / (x + 1.0),
                        _ => integrate_graded_scaled(
                            &|r| pow0(r, x) * density.eval(r),
                            0.0,
                            1.0,
                            QUAD_TOL,
                        ),
                    }
                };
                dens + atom_part
            }
            MeasureKind::Moments(m) => 1.0 / (2.0 * m.nu.harmonic_transform_real(0.5 * (x + 1.0))),
        }
    }

    /// `ω([a, b])`, both ends closed.
    pub fn interval_mass(&self, a: f64, b: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(Error::InvalidRange { a, b });
        }
        Ok(match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms
                    .iter()
                    .filter(|x| x.location >= a && x.location <= b)
                    .map(|x| x.mass)
                    .sum();
                density.integral(a, b) + atom_part
            }
            MeasureKind::Moments(m) => (m.tail(a) - m.tail(b)).max(0.0),
        })
    }

    /// `ω([a, b))`, or `ω([a, 1])` when `b = 1`.
    pub fn half_open_mass(&self, a: f64, b: f64) -> f64 {
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms
                    .iter()
                    .filter(|x| x.location >= a && (x.location < b || b >= 1.0))
                    .map(|x| x.mass)
                    .sum();
                density.integral(a, b) + atom_part
            }
            MeasureKind::Moments(m) => (m.tail(a) - m.tail(b)).max(0.0),
        }
    }

    /// `∫_{[a, b)} r dω(r)`, the radial factor of the area-type measure `ω ⊗ m`.
    pub fn radial_band_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms
                    .iter()
                    .filter(|x| x.location >= a && (x.location < b || b >= 1.0))
                    .map(|x| x.location * x.mass)
                    .sum();
                let dens = match density {
                    Density::Zero => 0.0,
                    Density::Constant(c) => 0.5 * c * (b * b - a * a),
                    _ => integrate_graded_scaled(&|r| r * density.eval(r), a, b, QUAD_TOL),
                };
                dens + atom_part
            }
            MeasureKind::Moments(m) => {
                // Integration by parts: ∫ r dω = a ω̂(a) - b ω̂(b) + ∫ ω̂.
                let (x, w) = gauss_legendre(16);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                let inner: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * m.tail(mid + half * x))
                    .sum::<f64>()
                    * half;
                (a * m.tail(a) - b * m.tail(b) + inner).max(0.0)
            }
        }
    }

    /// `∫ dω(r) / (1 - r w)`.
    ///
    /// # Panics
    /// For moment-defined measures.
    pub fn stieltjes(&self, w: Complex64) -> Complex64 {
        self.stieltjes_tol(w, QUAD_TOL)
    }

    pub fn stieltjes_tol(&self, w: Complex64, tol: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let MeasureKind::Explicit { density, atoms } = &self.kind else {
            unimplemented_moment_stieltjes()
        };
        let mut acc: Complex64 = atoms
            .iter()
            .map(|a| (one - w * a.location).inv() * a.mass)
            .sum();
        acc += match density {
            Density::Zero => Complex64::new(0.0, 0.0),
            Density::Constant(c) => log_ratio(w) * *c,
            _ if w.im == 0.0 => Complex64::new(
                integrate_graded(&|r| density.eval(r) / (1.0 - w.re * r), 0.0, 1.0, tol),
                0.0,
            ),
            _ => quad::integrate_graded_complex(
                &|r| (one - w * r).inv() * density.eval(r),
                0.0,
                1.0,
                tol,
            ),
        };
        acc
    }

    /// `∫ dω(r) / |1 - r z|`.
    pub fn abs_stieltjes(&self, z: Complex64, tol: f64) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let MeasureKind::Explicit { density, atoms } = &self.kind else {
            unimplemented_moment_stieltjes()
        };
        let atom_part: f64 = atoms
            .iter()
            .map(|a| a.mass / (one - z * a.location).norm())
            .sum();
        let dens = match density {
            Density::Zero => 0.0,
            _ => integrate_graded(&|r| density.eval(r) / (one - z * r).norm(), 0.0, 1.0, tol),
        };
        dens + atom_part
    }

    /// `∫ (1 - r^s) / (1 - r) dν(r)` for complex `s` with positive real part.
    ///
    /// # Panics
    /// For moment-defined measures.
    pub fn harmonic_transform(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in atoms {
                    acc += difference_quotient(a.location, s) * a.mass;
                }
                acc += match density {
                    Density::Zero => Complex64::new(0.0, 0.0),
                    Density::Constant(c) => quad::harmonic(s) * *c,
                    _ => quad::integrate_graded_complex(
                        &|r| difference_quotient(r, s) * density.eval(r),
                        0.0,
                        1.0,
                        QUAD_TOL,
                    ),
                };
                acc
            }
            MeasureKind::Moments(_) => unimplemented_moment_stieltjes(),
        }
    }

    pub fn harmonic_transform_real(&self, s: f64) -> f64 {
        match &self.kind {
            MeasureKind::Explicit { density, atoms } => {
                let atom_part: f64 = atoms
                    .iter()
                    .map(|a| difference_quotient_real(a.location, s) * a.mass)
                    .sum();
                let dens = match density {
                    Density::Zero => 0.0,
                    Density::Constant(c) => quad::harmonic(Complex64::new(s, 0.0)).re * c,
                    _ => integrate_graded(
                        &|r| difference_quotient_real(r, s) * density.eval(r),
                        0.0,
                        1.0,
                        QUAD_TOL,
                    ),
                };
                dens + atom_part
            }
            MeasureKind::Moments(_) => unimplemented_moment_stieltjes(),
        }
    }
}

// Only explicit measures play the role of ν; `KernelSpec::new` rejects the
// others, so reaching this is a bug in the caller.
fn unimplemented_moment_stieltjes() -> ! {
    panic!("moment-defined measures cannot be used as the representing measure ν")
}

fn pow0(r: f64, x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        r.powf(x)
    }
}

/// `-log(1 - w) / w`, the Stieltjes transform of Lebesgue measure.
fn log_ratio(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // 1 + w/2 + w²/3 + ...
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=12 {
            acc += term / k as f64;
            term *= w;
        }
        acc
    } else {
        -(Complex64::new(1.0, 0.0) - w).ln() / w
    }
}

/// `(1 - r^s) / (1 - r)` with the limit `s` at `r = 1`.
pub(crate) fn difference_quotient(r: f64, s: Complex64) -> Complex64 {
    let d = 1.0 - r;
    if d <= 0.0 {
        return s;
    }
    if d < 1e-6 {
        // s - s(s-1)d/2 + O(d²)
        return s - s * (s - 1.0) * (0.5 * d);
    }
    if r == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    (Complex64::new(1.0, 0.0) - (s * r.ln()).exp()) / d
}

pub(crate) fn difference_quotient_real(r: f64, s: f64) -> f64 {
    let d = 1.0 - r;
    if d <= 0.0 {
        return s;
    }
    if s.fract() == 0.0 && s >= 1.0 && s <= 64.0 {
        // Finite geometric sum 1 + r + ... + r^{s-1}.
        let mut acc = 0.0;
        let mut p = 1.0;
        for _ in 0..s as u32 {
            acc += p;
            p *= r;
        }
        return acc;
    }
    if d < 1e-6 {
        return s - s * (s - 1.0) * 0.5 * d;
    }
    if r == 0.0 {
        return if s == 0.0 { 0.0 } else { 1.0 };
    }
    -(s * r.ln()).exp_m1() / d
}

/// Finite-depth doubling and regularity diagnostics for a measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    /// Largest `ω̂(r) / ω̂((1 + r)/2)` over `r = 1 - 2^{-k}`.
    pub constant_hat: f64,
    /// Power envelope `(γ, β, C)`; `γ ≤ β`.
    pub regular_fit: (f64, f64, f64),
    /// Least-squares slope of `log ω̂` against `log(1 - r)`.
    pub fitted_slope: f64,
    /// Largest ratio of an interval's mass to one of its halves.
    pub interval_doubling: f64,
    /// False when the tail vanished at a probed node before `depth`.
    pub supported_near_one: bool,
}

pub fn doubling_report(omega: &RadialMeasure, depth: u32) -> Result<DoublingReport> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if omega.tail(0.0) <= 0.0 {
        return Err(Error::TailVanished(0.0));
    }
    let nodes: Vec<f64> = (0..=depth).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect();
    let mut supported = true;
    let mut constant_hat: f64 = 1.0;
    for &r in &nodes {
        let (num, den) = (omega.tail(r), omega.tail(0.5 * (1.0 + r)));
        if den <= 0.0 {
            supported = false;
            break;
        }
        constant_hat = constant_hat.max(num / den);
    }

    let tails: Vec<f64> = nodes.iter().map(|&r| omega.tail(r)).collect();
    let usable = tails.iter().take_while(|t| **t > 0.0).count();
    let xs: Vec<f64> = nodes[..usable].iter().map(|r| (1.0 - r).ln()).collect();
    let ys: Vec<f64> = tails[..usable].iter().map(|t| t.ln()).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 1..usable {
        let s = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if usable < 2 {
        lo = 0.0;
        hi = 0.0;
    }
    let fitted_slope = least_squares_slope(&xs, &ys);

    // Envelope constant on nodes and the midpoints between them.
    let mut probes: Vec<f64> = nodes[..usable].to_vec();
    for w in nodes[..usable].windows(2) {
        probes.push(0.5 * (w[0] + w[1]));
    }
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pt: Vec<(f64, f64)> = probes
        .iter()
        .map(|&r| ((1.0 - r).ln(), omega.tail(r).ln()))
        .collect();
    let mut log_c: f64 = 0.0;
    for i in 0..pt.len() {
        for j in i + 1..pt.len() {
            // r = probes[i] ≤ t = probes[j]; ρ = (1-r)/(1-t) ≥ 1.
            let lrho = pt[i].0 - pt[j].0;
            let lratio = pt[i].1 - pt[j].1;
            log_c = log_c.max(lratio - hi * lrho).max(lo * lrho - lratio);
        }
    }

    let mut interval_doubling: f64 = 1.0;
    for k in 0..depth {
        let n = 1u64 << k;
        for m in 0..n {
            let a = m as f64 / n as f64;
            let b = (m + 1) as f64 / n as f64;
            let mid = 0.5 * (a + b);
            let whole = omega.interval_mass(a, b)?;
            if whole <= 0.0 {
                continue;
            }
            let left = omega.interval_mass(a, mid)?;
            let right = omega.interval_mass(mid, b)?;
            let worst = left.min(right);
            interval_doubling = interval_doubling.max(if worst > 0.0 {
                whole / worst
            } else {
                f64::INFINITY
            });
        }
    }

    Ok(DoublingReport {
        constant_hat,
        regular_fit: (lo, hi, log_c.exp()),
        fitted_slope,
        interval_doubling,
        supported_near_one: supported,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Named densities available from configuration files.
pub fn catalog_density(name: &str) -> Option<Density> {
    let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match name {
        // exp(-1/(1-r)): rapidly decreasing, not doubling.
        "exp-decay" => Arc::new(|r: f64| (-1.0 / (1.0 - r)).exp()),
        // 1/((1-r) log²(e/(1-r))): integrable with a slowly vanishing tail.
        "log-critical" => Arc::new(|r: f64| {
            let d = 1.0 - r;
            let l = 1.0 - d.ln();
            1.0 / (d * l * l)
        }),
        // (1-r) log(e/(1-r)): a logarithmic perturbation of a power weight.
        "log-power" => Arc::new(|r: f64| {
            let d = 1.0 - r;
            d * (1.0 - d.ln())
        }),
        _ => return None,
    };
    Some(Density::Custom {
        name: name.to_string(),
        f,
    })
}

pub const CATALOG_DENSITIES: [&str; 3] = ["exp-decay", "log-critical", "log-power"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_of_simple_measures() {
        assert!((RadialMeasure::lebesgue().tail(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(RadialMeasure::atom(1.0, 2.0).tail(0.9), 2.0);
        let w = RadialMeasure::new("p", Density::Constant(1.0), vec![]).unwrap();
        assert_eq!(w.tail(1.0), 0.0);
    }

    #[test]
    fn moment_defined_from_atom_is_lebesgue() {
        // F(s) = s for ν = δ₁, so ω_x = 1/(x+1).
        let w = RadialMeasure::from_nu(RadialMeasure::atom(1.0, 1.0));
        for x in [0.05, 0.3, 0.7, 0.99, 1.0 - 1e-6] {
            assert!((w.tail(x) - (1.0 - x)).abs() < 1e-9, "x={x}: {}", w.tail(x));
        }
        assert!((w.moment(3.0) - 0.25).abs() < 1e-14);
        let band = w.radial_band_mass(0.5, 0.75);
        assert!((band - 0.5 * (0.75f64.powi(2) - 0.25)).abs() < 1e-10);
    }

    #[test]
    fn difference_quotient_branches_agree() {
        for s in [0.5, 1.0, 2.0, 3.5, 7.0] {
            for r in [0.0, 0.3, 0.9, 1.0 - 2e-6, 1.0 - 5e-7] {
                let a = difference_quotient_real(r, s);
                let b = difference_quotient(r, Complex64::new(s, 0.0)).re;
                let direct = if r == 0.0 { 1.0 } else { (1.0 - r.powf(s)) / (1.0 - r) };
                assert!((a - b).abs() < 1e-8, "{r} {s}");
                assert!((a - direct).abs() < 1e-6 * direct.max(1.0), "{r} {s}");
            }
        }
    }

    #[test]
    fn half_open_and_closed_masses() {
        let m = RadialMeasure::atom(0.5, 1.0);
        assert_eq!(m.interval_mass(0.5, 0.5).unwrap(), 1.0);
        assert_eq!(m.half_open_mass(0.25, 0.5), 0.0);
        assert_eq!(m.half_open_mass(0.5, 0.75), 1.0);
        assert!(matches!(
            m.interval_mass(0.6, 0.2),
            Err(Error::InvalidRange { .. })
        ));
    }
}
