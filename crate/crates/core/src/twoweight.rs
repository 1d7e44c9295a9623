//! Sparse dyadic operators, stopping squares, Sawyer testing constants and
//! the norm experiments built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disk::{Beta, DiskQuadrature, DyadicInterval, Field};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operators::{
    lp_norm_lower, weighted_norm_p2, DyadicOp, NormBracket, OperatorHandle, OperatorKind,
    PsiProfile, SymmetricOperator,
};
use crate::weights::{bp_characteristic, dual_weight, dyadic_maximal, WeightField};

/// `T f = Σ_S τ_S (E^μ_S f) 1_S` over the squares of one grid with level
/// `≤ l_max`.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    pub beta: Beta,
    pub l_max: u32,
    pub quad_id: u64,
    /// Indexed by square id.
    pub tau: Vec<f64>,
    /// Cell masses of `μ`.
    pub mu: Vec<f64>,
    kernel: DyadicOp,
}

impl SparseOperator {
    pub fn new(quad: &DiskQuadrature, mu: Vec<f64>, beta: Beta, tau: Vec<f64>, l_max: u32) -> Result<Self> {
        let l_max = l_max.min(quad.depth);
        if tau.len() != DiskQuadrature::square_slots(l_max) || mu.len() != quad.len() {
            return Err(Error::QuadratureMismatch);
        }
        if tau.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Precondition("coefficients must be nonnegative".into()));
        }
        let mass = quad.square_sums(&mu, beta, l_max);
        let coefficients = tau
            .iter()
            .zip(&mass)
            .map(|(t, m)| if *m > 0.0 { t / m } else { 0.0 })
            .collect();
        let kernel = DyadicOp::with_coefficients(quad, beta, coefficients, l_max);
        Ok(Self {
            beta,
            l_max,
            quad_id: quad.id,
            tau,
            mu,
            kernel,
        })
    }

    /// `τ_{S(I)} = Ψ(|I|) μ(S(I)) / |I|`, which makes `T` the dyadic model
    /// of the positive Bergman operator.
    pub fn default_tau(quad: &DiskQuadrature, mu: &[f64], beta: Beta, psi: &PsiProfile, l_max: u32) -> Vec<f64> {
        let l_max = l_max.min(quad.depth);
        let w = psi.level_weights(l_max);
        quad.square_sums(mu, beta, l_max)
            .iter()
            .enumerate()
            .map(|(id, m)| w[DyadicInterval::from_id(beta, id).level as usize] * m)
            .collect()
    }

    /// The symmetric kernel `K` with `T f = K (f μ)`.
    pub fn kernel(&self) -> &DyadicOp {
        &self.kernel
    }
}

pub fn apply_sparse(t: &SparseOperator, f: &Field<f64>) -> Result<Field<f64>> {
    if f.quad_id != t.quad_id || f.len() != t.mu.len() {
        return Err(Error::QuadratureMismatch);
    }
    let fm: Vec<f64> = f.values.iter().zip(&t.mu).map(|(a, b)| a * b).collect();
    Ok(Field {
        quad_id: t.quad_id,
        values: t.kernel.apply(&fm),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingSquare {
    pub interval: DyadicInterval,
    /// `E^{σμ}_L |f|`.
    pub expectation: f64,
    /// `σμ(L)`.
    pub mass: f64,
    pub parent: Option<usize>,
    pub generation: usize,
}

/// Stopping squares in `D^0` under `S₀`, with threshold factor 4.
#[derive(Clone, Debug, PartialEq)]
pub struct StoppingFamily {
    pub root: DyadicInterval,
    pub l_max: u32,
    pub squares: Vec<StoppingSquare>,
    /// `λ(S)` by square id: index into `squares` of the smallest stopping
    /// square containing `S`, for `S` under the root.
    pub lambda: Vec<Option<usize>>,
}

pub const STOPPING_FACTOR: f64 = 4.0;

impl StoppingFamily {
    /// `D(L)`: square ids whose minimal stopping ancestor is `squares[k]`.
    pub fn collection(&self, k: usize) -> Vec<usize> {
        (0..self.lambda.len())
            .filter(|&id| self.lambda[id] == Some(k))
            .collect()
    }

    /// `Σ_L E_L 1_L` at every node.
    pub fn linearized(&self, quad: &DiskQuadrature) -> Vec<f64> {
        (0..quad.len())
            .map(|i| {
                quad.squares_containing(i, Beta::Zero, self.l_max)
                    .into_iter()
                    .filter_map(|id| {
                        let k = self.lambda[id]?;
                        (self.squares[k].interval.id() == id).then(|| self.squares[k].expectation)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Breadth-first stopping construction: the children of a stopping square
/// `P` are the maximal squares `L ⊊ P` with `E_L > 4 E_P`.
pub fn stopping_family(
    quad: &DiskQuadrature,
    f: &Field<f64>,
    sigma_mu: &[f64],
    root: DyadicInterval,
    l_max: u32,
) -> Result<StoppingFamily> {
    quad.check(f)?;
    if root.beta != Beta::Zero || sigma_mu.len() != quad.len() {
        return Err(Error::Precondition("stopping squares live in D^0".into()));
    }
    let l_max = l_max.min(quad.depth);
    let fm: Vec<f64> = f.values.iter().zip(sigma_mu).map(|(a, w)| a.abs() * w).collect();
    let s = quad.square_sums(&fm, Beta::Zero, l_max);
    let w = quad.square_sums(sigma_mu, Beta::Zero, l_max);
    let e = |id: usize| if w[id] > 0.0 { s[id] / w[id] } else { 0.0 };
    if root.level > l_max || e(root.id()) <= 0.0 {
        return Err(Error::Precondition("root expectation must be positive".into()));
    }
    let mut squares = vec![StoppingSquare {
        interval: root,
        expectation: e(root.id()),
        mass: w[root.id()],
        parent: None,
        generation: 0,
    }];
    let mut lambda = vec![None; DiskQuadrature::square_slots(l_max)];
    let mut head = 0;
    while head < squares.len() {
        let threshold = STOPPING_FACTOR * squares[head].expectation;
        let generation = squares[head].generation + 1;
        let mut stack: Vec<DyadicInterval> = if squares[head].interval.level < l_max {
            squares[head].interval.children().to_vec()
        } else {
            Vec::new()
        };
        lambda[squares[head].interval.id()] = Some(head);
        while let Some(sq) = stack.pop() {
            let id = sq.id();
            if w[id] <= 0.0 {
                continue;
            }
            if e(id) > threshold {
                squares.push(StoppingSquare {
                    interval: sq,
                    expectation: e(id),
                    mass: w[id],
                    parent: Some(head),
                    generation,
                });
                continue;
            }
            lambda[id] = Some(head);
            if sq.level < l_max {
                stack.extend(sq.children());
            }
        }
        head += 1;
    }
    Ok(StoppingFamily {
        root,
        l_max,
        squares,
        lambda,
    })
}

/// `Σ_L (E^{σμ}_L |f|)^p σμ(L)`.
pub fn carleson_embedding_sum(family: &StoppingFamily, p: f64) -> f64 {
    family
        .squares
        .iter()
        .map(|s| s.expectation.powf(p) * s.mass)
        .sum()
}

/// `M_{σμ, D^0} f` at the depth of the family, for the pointwise bound.
pub fn stopping_maximal(
    quad: &DiskQuadrature,
    f: &Field<f64>,
    sigma_mu: &[f64],
    family: &StoppingFamily,
) -> Result<Field<f64>> {
    dyadic_maximal(quad, sigma_mu, Beta::Zero, f, family.l_max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestingReport {
    /// `max_S ‖T(σ1_S)‖^p_{L^p(uμ)} / σμ(S)`.
    pub c0: f64,
    /// `max_S ‖T(u1_S)‖^{p'}_{L^{p'}(σμ)} / uμ(S)`.
    pub c0_star: f64,
    pub witness: String,
    pub witness_star: String,
    pub norm: NormBracket,
    /// `norm / (C0^{1/p} + C0*^{1/p'})`.
    pub c1: f64,
}

fn testing_sup(
    t: &SparseOperator,
    quad: &DiskQuadrature,
    w_in: &[f64],
    w_out: &[f64],
    p: f64,
) -> (f64, String) {
    let in_mu: Vec<f64> = w_in.iter().zip(&t.mu).map(|(a, b)| a * b).collect();
    let out_mu: Vec<f64> = w_out.iter().zip(&t.mu).map(|(a, b)| a * b).collect();
    let masses = quad.square_sums(&in_mu, t.beta, t.l_max);
    let mut best = (0.0, String::new());
    for (id, m) in masses.iter().enumerate() {
        if *m <= 0.0 {
            continue;
        }
        let x: Vec<f64> = (0..quad.len())
            .map(|i| {
                if quad.squares_containing(i, t.beta, t.l_max).get(DyadicInterval::from_id(t.beta, id).level as usize)
                    == Some(&id)
                {
                    in_mu[i]
                } else {
                    0.0
                }
            })
            .collect();
        let y = t.kernel.apply(&x);
        let v: f64 = y.iter().zip(&out_mu).map(|(a, w)| a.abs().powf(p) * w).sum::<f64>() / m;
        if v > best.0 {
            best = (v, DyadicInterval::from_id(t.beta, id).label());
        }
    }
    best
}

/// Testing constants and the norm of `T(σ ·): L^p(σμ) → L^p(uμ)`; exact
/// (bracketed) at `p = 2`, a lower bound otherwise.
pub fn testing_constants(
    t: &SparseOperator,
    quad: &DiskQuadrature,
    sigma: &WeightField,
    u: &WeightField,
    p: f64,
    seed: u64,
) -> Result<TestingReport> {
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("exponent p = {p} outside (1, inf)")));
    }
    quad.check(&sigma.field)?;
    quad.check(&u.field)?;
    let q = p / (p - 1.0);
    let (c0, witness) = testing_sup(t, quad, sigma.values(), u.values(), p);
    let (c0_star, witness_star) = testing_sup(t, quad, u.values(), sigma.values(), q);
    let left: Vec<f64> = u.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
    let right: Vec<f64> = sigma.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
    let norm = if p == 2.0 {
        weighted_norm_p2(&t.kernel, &left, &right, true)
    } else {
        NormBracket {
            lower: lp_norm_lower(&t.kernel, &left, &right, p, 16, seed),
            upper: None,
            iterations: 0,
        }
    };
    let c1 = norm.lower / (c0.powf(1.0 / p) + c0_star.powf(1.0 / q));
    Ok(TestingReport {
        c0,
        c0_star,
        witness,
        witness_star,
        norm,
        c1,
    })
}

/// Square ids split by `(E^{μσ}_S f)^p μσ(S) ≥ (E^{μu}_S g)^{p'} μu(S)`.
#[allow(clippy::too_many_arguments)]
pub fn split_by_criterion(
    quad: &DiskQuadrature,
    mu: &[f64],
    beta: Beta,
    f: &Field<f64>,
    g: &Field<f64>,
    sigma: &WeightField,
    u: &WeightField,
    p: f64,
    l_max: u32,
) -> Result<(Vec<usize>, Vec<usize>)> {
    quad.check(f)?;
    quad.check(g)?;
    let l_max = l_max.min(quad.depth);
    let q = p / (p - 1.0);
    let side = |h: &Field<f64>, w: &WeightField, e: f64| {
        let wm: Vec<f64> = w.values().iter().zip(mu).map(|(a, b)| a * b).collect();
        let hw: Vec<f64> = h.values.iter().zip(&wm).map(|(a, b)| a * b).collect();
        let m = quad.square_sums(&wm, beta, l_max);
        let s = quad.square_sums(&hw, beta, l_max);
        m.iter()
            .zip(&s)
            .map(|(m, s)| if *m > 0.0 { (s / m).powf(e) * m } else { 0.0 })
            .collect::<Vec<f64>>()
    };
    let a = side(f, sigma, p);
    let b = side(g, u, q);
    let (mut s1, mut s2) = (Vec::new(), Vec::new());
    for id in 0..a.len() {
        if a[id] >= b[id] {
            s1.push(id);
        } else {
            s2.push(id);
        }
    }
    Ok((s1, s2))
}

/// A random nonnegative weight: power law times an angular bump.
pub fn random_weight(quad: &DiskQuadrature, rng: &mut ChaCha8Rng, name: &str) -> Result<WeightField> {
    let eta = rng.gen_range(-0.5..0.5);
    let center: f64 = rng.gen();
    let width = rng.gen_range(0.05..0.3);
    let height = rng.gen_range(0.0..4.0);
    let field = Field::from_fn(quad, |c| {
        let d = (c.t_node - center).rem_euclid(1.0);
        let d = d.min(1.0 - d);
        (1.0 - c.r_node).powf(eta) * (1.0 + height * (-(d / width).powi(2)).exp())
    });
    WeightField::new(name, field)
}

/// A two-weight instance: `σ`, `u`, and the default coefficients scaled by
/// independent log-uniform factors in `[1/4, 4]`.
pub fn random_instance(
    quad: &DiskQuadrature,
    psi: &PsiProfile,
    beta: Beta,
    l_max: u32,
    seed: u64,
) -> Result<(SparseOperator, WeightField, WeightField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = random_weight(quad, &mut rng, "sigma")?;
    let u = random_weight(quad, &mut rng, "u")?;
    let mu = quad.masses.clone();
    let tau: Vec<f64> = SparseOperator::default_tau(quad, &mu, beta, psi, l_max)
        .into_iter()
        .map(|t| t * 4f64.powf(rng.gen_range(-1.0..1.0)))
        .collect();
    Ok((SparseOperator::new(quad, mu, beta, tau, l_max)?, sigma, u))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneWeightReport {
    pub b_characteristic: f64,
    pub norm: NormBracket,
    /// `norm / B^{max(1, 1/(p-1))}`.
    pub ratio: f64,
    /// Range of `Ψ(|I|) μ(S(I)) / |I|` over levels `0..=depth`.
    pub psi_mass_band: (f64, f64),
    /// `max_I μ(S(I)) / μ(T(I))`.
    pub top_half_ratio: f64,
}

/// `‖P⁺_ω‖` on `L^p_ω(v)` against `B_{p,ω}(v)`, with `μ = ω⊗m`.
pub fn one_weight_norm_experiment(
    spec: &KernelSpec,
    quad: &DiskQuadrature,
    v: &WeightField,
    p: f64,
    seed: u64,
) -> Result<OneWeightReport> {
    let b = bp_characteristic(quad, v, p, quad.depth)?.value;
    let sigma = dual_weight(v, p)?;
    let handle = OperatorHandle::new(OperatorKind::Positive, spec, quad);
    let k = handle.abs_matrix();
    let left: Vec<f64> = v.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let right: Vec<f64> = sigma.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let norm = if p == 2.0 {
        weighted_norm_p2(&k, &left, &right, true)
    } else {
        NormBracket {
            lower: lp_norm_lower(&k, &left, &right, p, 16, seed),
            upper: None,
            iterations: 0,
        }
    };
    let psi = PsiProfile::new(spec.clone());
    let omega = &quad.omega;
    let mut band = (f64::INFINITY, 0.0f64);
    let mut top = 0.0f64;
    for level in 0..=quad.depth {
        let len = 0.5f64.powi(level as i32);
        let s = omega.radial_band_mass(1.0 - len, 1.0) * 2.0 * len;
        let t = omega.radial_band_mass(1.0 - len, 1.0 - 0.5 * len) * 2.0 * len;
        let x = psi.eval(len) * s / len;
        band = (band.0.min(x), band.1.max(x));
        if t > 0.0 {
            top = top.max(s / t);
        }
    }
    Ok(OneWeightReport {
        b_characteristic: b,
        ratio: norm.estimate() / b.powf(1f64.max(1.0 / (p - 1.0))),
        norm,
        psi_mass_band: band,
        top_half_ratio: top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::build_quadrature;
    use crate::measures::RadialMeasure;

    #[test]
    fn root_only_operator_tests_to_mass() {
        // τ = 1 on the root only: T(1_{S0}) = 1 and C0 = μ(S0)/μ(S0) = 1.
        let q = build_quadrature(&RadialMeasure::lebesgue(), 3, 0).unwrap();
        let mut tau = vec![0.0; DiskQuadrature::square_slots(3)];
        tau[0] = 1.0;
        let t = SparseOperator::new(&q, q.masses.clone(), Beta::Zero, tau, 3).unwrap();
        let one = WeightField::new("1", Field::constant(&q, 1.0)).unwrap();
        let r = testing_constants(&t, &q, &one, &one, 2.0, 1).unwrap();
        assert!((r.c0 - 1.0).abs() < 1e-12, "{}", r.c0);
        assert!((r.norm.lower - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_function_stops_at_root() {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 4, 0).unwrap();
        let f = Field::constant(&q, 1.0);
        let fam = stopping_family(&q, &f, &q.masses, DyadicInterval::root(Beta::Zero), 4).unwrap();
        assert_eq!(fam.squares.len(), 1);
    }
}
