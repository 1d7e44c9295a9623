use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bergman_core::disk::{build_quadrature, Beta, DiskQuadrature, DyadicInterval, Field};
use bergman_core::kernels::KernelSpec;
use bergman_core::measures::RadialMeasure;
use bergman_core::operators::{apply_dyadic, weighted_norm_p2, PsiProfile, SymmetricOperator};
use bergman_core::twoweight::{
    apply_sparse, carleson_embedding_sum, one_weight_norm_experiment, random_instance,
    random_weight, split_by_criterion, stopping_family, stopping_maximal, testing_constants,
    SparseOperator,
};
use bergman_core::weights::{WeightField, WeightSpec};

fn quad(depth: u32) -> DiskQuadrature {
    build_quadrature(&RadialMeasure::lebesgue(), depth, 0).unwrap()
}

fn psi() -> PsiProfile {
    PsiProfile::new(KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap())
}

fn nonnegative(q: &DiskQuadrature, seed: u64) -> Field<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field {
        quad_id: q.id,
        values: (0..q.len()).map(|_| rng.gen_range(1e-3f64..1.0).powf(-0.8) - 1.0).collect(),
    }
}

fn dense(op: &dyn SymmetricOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for (i, v) in op.apply(&e).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

#[test]
fn default_coefficients_give_the_dyadic_model() {
    let q = quad(5);
    let p = psi();
    let f = nonnegative(&q, 2);
    for beta in Beta::BOTH {
        let tau = SparseOperator::default_tau(&q, &q.masses, beta, &p, 5);
        let t = SparseOperator::new(&q, q.masses.clone(), beta, tau, 5).unwrap();
        let a = apply_sparse(&t, &f).unwrap();
        let b = apply_dyadic(&q, &q.masses, beta, &p.level_weights(5), &f, 5).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}

#[test]
fn sparse_operator_is_self_adjoint_and_positive() {
    let q = quad(5);
    let (t, _, _) = random_instance(&q, &psi(), Beta::Half, 5, 9).unwrap();
    let (f, g) = (nonnegative(&q, 1), nonnegative(&q, 2));
    let (tf, tg) = (apply_sparse(&t, &f).unwrap(), apply_sparse(&t, &g).unwrap());
    assert!(tf.values.iter().all(|v| *v >= 0.0));
    let inner = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&t.mu).map(|((x, y), m)| x * y * m).sum::<f64>();
    let (l, r) = (inner(&tf.values, &g.values), inner(&f.values, &tg.values));
    assert!((l - r).abs() <= 1e-10 * l.abs());
}

#[test]
fn testing_norm_matches_dense_singular_value() {
    let q = quad(4);
    let (t, sigma, u) = random_instance(&q, &psi(), Beta::Zero, 4, 3).unwrap();
    let r = testing_constants(&t, &q, &sigma, &u, 2.0, 1).unwrap();
    let k = dense(t.kernel());
    let n = q.len();
    let a = DMatrix::from_fn(n, n, |i, j| {
        (u.values()[i] * t.mu[i]).sqrt() * k[(i, j)] * (sigma.values()[j] * t.mu[j]).sqrt()
    });
    let exact = a.singular_values().max();
    assert!((r.norm.lower - exact).abs() <= 1e-8 * exact);
    // Testing against indicators of squares is a special case of the norm.
    assert!(r.c0.sqrt() <= exact * (1.0 + 1e-8));
    assert!(r.c0_star.sqrt() <= exact * (1.0 + 1e-8));
}

#[test]
fn one_weight_with_constant_weight() {
    let q = quad(5);
    let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap();
    let v = WeightSpec::Power { eta: 0.0 }.build(&q).unwrap();
    let r = one_weight_norm_experiment(&spec, &q, &v, 2.0, 1).unwrap();
    assert!((r.b_characteristic - 1.0).abs() < 1e-12);
    assert!(r.norm.lower >= 1.0, "P+ is at least as large as P on constants");
    assert!((r.ratio - r.norm.estimate()).abs() < 1e-12);
}

#[test]
fn symmetric_split_is_all_first_kind() {
    let q = quad(5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_weight(&q, &mut rng, "w").unwrap();
    let f = nonnegative(&q, 5);
    let (s1, s2) = split_by_criterion(&q, &q.masses, Beta::Zero, &f, &f, &w, &w, 2.0, 5).unwrap();
    assert!(s2.is_empty());
    assert_eq!(s1.len(), DiskQuadrature::square_slots(5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn testing_is_necessary_and_norms_are_dual(seed in 0u64..10_000) {
        let q = quad(5);
        let (t, sigma, u) = random_instance(&q, &psi(), Beta::Zero, 5, seed).unwrap();
        let r = testing_constants(&t, &q, &sigma, &u, 2.0, seed).unwrap();
        prop_assert!(r.c0.sqrt() <= r.norm.lower * (1.0 + 1e-8));
        prop_assert!(r.c0_star.sqrt() <= r.norm.lower * (1.0 + 1e-8));
        let sm: Vec<f64> = sigma.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
        let um: Vec<f64> = u.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
        let back = weighted_norm_p2(t.kernel(), &sm, &um, true).lower;
        prop_assert!((back / r.norm.lower - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn stopping_squares_grow_and_control_the_linearization(seed in 0u64..10_000) {
        let q = quad(6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma: WeightField = random_weight(&q, &mut rng, "sigma").unwrap();
        let sm: Vec<f64> = sigma.values().iter().zip(&q.masses).map(|(a, m)| a * m).collect();
        let f = nonnegative(&q, seed);
        let fam = stopping_family(&q, &f, &sm, DyadicInterval::root(Beta::Zero), 6).unwrap();
        for s in &fam.squares {
            if let Some(parent) = s.parent {
                prop_assert!(s.expectation > 4.0 * fam.squares[parent].expectation);
                prop_assert!(fam.squares[parent].interval.arc().contains_arc(&s.interval.arc()));
            }
        }
        let m = stopping_maximal(&q, &f, &sm, &fam).unwrap();
        for (l, mv) in fam.linearized(&q).iter().zip(&m.values) {
            prop_assert!(*l <= 4.0 / 3.0 * mv * (1.0 + 1e-10));
        }
        // Σ_L E_L^2 σμ(L) ≤ (4/3)^2 ‖M f‖^2 since the linearization dominates
        // each term pointwise on L.
        let mf: f64 = m.values.iter().zip(&sm).map(|(a, w)| a * a * w).sum();
        prop_assert!(carleson_embedding_sum(&fam, 2.0) <= (4.0f64 / 3.0).powi(2) * mf * (1.0 + 1e-10));
    }
}
