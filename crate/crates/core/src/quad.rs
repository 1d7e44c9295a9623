//! One-dimensional quadrature and the handful of special functions the
//! measure and kernel code needs.

use num_complex::Complex64;

const MAX_DEPTH: u32 = 26;
const GRADED_LEVELS: i32 = 52;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Adaptive Simpson quadrature with Richardson correction on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // The second test stops refinement once roundoff dominates the estimate.
    if depth == 0
        || !delta.is_finite()
        || delta.abs() <= 15.0 * tol
        || delta.abs() <= 64.0 * f64::EPSILON * (left + right).abs()
    {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Complex-valued adaptive Simpson.
pub fn simpson_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    simpson_complex_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_complex_step<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if depth == 0
        || !delta.is_finite()
        || delta.norm() <= 15.0 * tol
        || delta.norm() <= 64.0 * f64::EPSILON * (left + right).norm()
    {
        return left + right + delta / 15.0;
    }
    simpson_complex_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_complex_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Breakpoints `lo = t_0 < ... < t_n = hi` including every `1 - 2^{-k}`
/// inside the range, so that integrands peaked near `r = 1` are resolved.
fn graded_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    for k in 1..=GRADED_LEVELS {
        let t = 1.0 - (0.5f64).powi(k);
        if t > lo && t < hi {
            breaks.push(t);
        }
    }
    breaks.push(hi);
    breaks
}

/// Integral over `[lo, hi] ⊂ [0, 1]`, graded toward 1.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let breaks = graded_breaks(lo, hi);
    let panels = (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .map(|w| simpson(f, w[0], w[1], tol / panels))
        .sum()
}

/// Like [`integrate_graded`], but the tolerance is scaled down for small
/// integrals so that tiny tails and high moments keep their relative accuracy.
pub fn integrate_graded_scaled<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let rough = integrate_graded(f, lo, hi, tol.max(1e-9));
    if rough == 0.0 {
        return 0.0;
    }
    integrate_graded(f, lo, hi, tol * rough.abs().min(1.0))
}

pub fn integrate_graded_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Complex64 {
    let breaks = graded_breaks(lo, hi);
    let panels = (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .map(|w| simpson_complex(f, w[0], w[1], tol / panels))
        .sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Digamma function for complex arguments with positive real part.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    // Bernoulli tail B_{2k} / (2k).
    const COEF: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for c in COEF {
        series += pow * c;
        pow *= inv2;
    }
    acc + z.ln() - inv * 0.5 - series
}

/// Harmonic number `H_s = ψ(s + 1) + γ`, analytic in `s`.
pub fn harmonic(s: Complex64) -> Complex64 {
    digamma(s + 1.0) + EULER_GAMMA
}

/// Inverse Laplace transform at `t > 0` by the fixed Talbot contour.
pub fn talbot_inverse<F: Fn(Complex64) -> Complex64>(transform: &F, t: f64, terms: usize) -> f64 {
    let m = terms as f64;
    let r = 2.0 * m / (5.0 * t);
    let mut sum = 0.5 * (transform(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..terms {
        let theta = k as f64 * std::f64::consts::PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * transform(s) * Complex64::new(1.0, sigma);
        sum += term.re;
    }
    r / m * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_peaks() {
        let v = simpson(&|x: f64| x * x, 0.0, 1.0, 1e-13);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        // ∫_0^1 dr / (1 - 0.999999 r)
        let w = 0.999_999;
        let v = integrate_graded(&|r: f64| 1.0 / (1.0 - w * r), 0.0, 1.0, 1e-12);
        let exact = -(1.0f64 - w).ln() / w;
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn digamma_known_values() {
        let one = digamma(Complex64::new(1.0, 0.0));
        assert!((one.re + EULER_GAMMA).abs() < 1e-14);
        let half = digamma(Complex64::new(0.5, 0.0));
        assert!((half.re - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-13);
        // ψ(1 + i) imaginary part = -1/2 + (π/2) coth(π) ... compare via recurrence
        let z = Complex64::new(0.3, 1.7);
        let lhs = digamma(z + 1.0);
        let rhs = digamma(z) + z.inv();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn talbot_recovers_simple_functions() {
        // L[1 - e^{-t}](s) = 1/s - 1/(s+1)
        let f = |s: Complex64| s.inv() - (s + 1.0).inv();
        for t in [0.01, 0.5, 3.0] {
            let v = talbot_inverse(&f, t, 24);
            assert!((v - (1.0 - (-t as f64).exp())).abs() < 1e-9, "t={t}: {v}");
        }
    }
}
