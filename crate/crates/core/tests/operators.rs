use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use bergman_core::disk::{angle_of, build_quadrature, Beta, DiskQuadrature, DyadicInterval, Field};
use bergman_core::kernels::KernelSpec;
use bergman_core::measures::RadialMeasure;
use bergman_core::operators::{
    apply_bergman, apply_dyadic, apply_positive, dyadic_kernel, dyadic_kernel_matrix,
    lp_norm_lower, separated_square_lower_bound, weighted_norm_p2, DyadicOp, OperatorHandle,
    OperatorKind, PsiProfile, SymmetricOperator,
};

fn classical() -> KernelSpec {
    KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0)).unwrap()
}

fn lebesgue_quad(depth: u32) -> DiskQuadrature {
    build_quadrature(&RadialMeasure::lebesgue(), depth, 0).unwrap()
}

fn complex(field: &Field<f64>) -> Field<Complex64> {
    Field {
        quad_id: field.quad_id,
        values: field.values.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
    }
}

fn random_real(q: &DiskQuadrature, seed: u64) -> Field<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field {
        quad_id: q.id,
        values: (0..q.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}

/// Brute-force dyadic kernel straight from the definition of a Carleson
/// square: `1 - |I| ≤ |z| < 1` and the angle of `z` in `I`.
fn dyadic_oracle(beta: Beta, psi: &PsiProfile, z: Complex64, w: Complex64, l_max: u32) -> f64 {
    let mut acc = 0.0;
    for level in 0..=l_max {
        let len = 0.5f64.powi(level as i32);
        if z.norm() < 1.0 - len || w.norm() < 1.0 - len {
            continue;
        }
        let same = level == 0
            || DyadicInterval::index_of(beta, level, angle_of(z)) == DyadicInterval::index_of(beta, level, angle_of(w));
        if same {
            acc += psi.eval(len) / len;
        }
    }
    acc
}

#[test]
fn dyadic_kernel_matches_definition() {
    let psi = PsiProfile::new(classical());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let z = Complex64::from_polar(1.0 - 2f64.powf(-rng.gen_range(0.0..9.0)), TAU * rng.gen::<f64>());
        let w = Complex64::from_polar(1.0 - 2f64.powf(-rng.gen_range(0.0..9.0)), TAU * (z.arg() / TAU + rng.gen_range(-0.1..0.1)));
        for beta in Beta::BOTH {
            let a = dyadic_kernel(beta, &psi, z, w, 8);
            let b = dyadic_oracle(beta, &psi, z, w, 8);
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{beta:?} {z} {w}: {a} vs {b}");
        }
    }
}

#[test]
fn dyadic_apply_matches_dense_matrix() {
    let q = lebesgue_quad(5);
    let psi = PsiProfile::new(classical());
    let lw = psi.level_weights(5);
    let f = random_real(&q, 11);
    for beta in Beta::BOTH {
        let k = dyadic_kernel_matrix(&q, beta, &lw, 5);
        let fast = apply_dyadic(&q, &q.masses, beta, &lw, &f, 5).unwrap();
        for i in 0..q.len() {
            let dense: f64 = (0..q.len()).map(|j| k[(i, j)] * f.values[j] * q.masses[j]).sum();
            assert!((fast.values[i] - dense).abs() <= 1e-10 * dense.abs().max(1.0));
        }
        // The dense matrix agrees with pointwise evaluation at the nodes.
        let nodes: Vec<Complex64> = q.nodes().collect();
        for (i, j) in [(0, 0), (5, 300), (q.len() - 1, q.len() - 2)] {
            let direct = dyadic_kernel(beta, &psi, nodes[i], nodes[j], 5);
            assert!((k[(i, j)] - direct).abs() <= 1e-12 * direct.max(1.0));
        }
    }
}

#[test]
fn assembled_and_matrix_free_agree() {
    let q = lebesgue_quad(4);
    let f = complex(&random_real(&q, 5));
    for kind in [OperatorKind::Bergman, OperatorKind::Positive] {
        let h = OperatorHandle::new(kind, &classical(), &q);
        assert!(h.is_assembled());
        let assembled: Vec<Complex64> = match kind {
            OperatorKind::Bergman => apply_bergman(&h, &f).unwrap().values,
            OperatorKind::Positive => {
                let abs = Field {
                    quad_id: q.id,
                    values: f.values.iter().map(|z| z.norm()).collect(),
                };
                apply_positive(&h, &abs).unwrap().values.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
            }
        };
        let input: Vec<Complex64> = match kind {
            OperatorKind::Bergman => f.values.clone(),
            OperatorKind::Positive => f.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
        };
        let free = h.apply_matrix_free(&input);
        let scale = assembled.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        for (a, b) in assembled.iter().zip(&free) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn projection_reproduces_constants_and_monomials() {
    // Node-to-node sums keep an O(1) diagonal contribution in every band
    // whose size is set by the angular resolution, so P(1) = 1 and
    // P(z^n) = z^n are approached as j0 grows, not as J grows.
    let spec = classical();
    let mut errors = Vec::new();
    for j0 in [0, 1, 2] {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 5, j0).unwrap();
        let h = OperatorHandle::new(OperatorKind::Bergman, &spec, &q);
        let mut worst: f64 = 0.0;
        for n in [0u32, 1, 3] {
            let f = Field::from_fn(&q, |c| c.node.powu(n));
            let pf = apply_bergman(&h, &f).unwrap();
            let err: f64 = pf
                .values
                .iter()
                .zip(&f.values)
                .zip(&q.masses)
                .map(|((a, b), m)| (a - b).norm_sqr() * m)
                .sum::<f64>()
                .sqrt();
            worst = worst.max(err);
        }
        errors.push(worst);
    }
    assert!(errors[0] < 0.25, "{errors:?}");
    // The radial resolution is fixed, so the decrease levels off.
    assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    assert!(errors[2] < 0.5 * errors[0], "{errors:?}");
}

#[test]
fn projection_is_self_adjoint_in_l2_omega() {
    let q = lebesgue_quad(5);
    let h = OperatorHandle::new(OperatorKind::Bergman, &classical(), &q);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut draw = || Field {
        quad_id: q.id,
        values: (0..q.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect::<Vec<_>>(),
    };
    let (f, g) = (draw(), draw());
    let inner = |a: &Field<Complex64>, b: &Field<Complex64>| -> Complex64 {
        a.values.iter().zip(&b.values).zip(&q.masses).map(|((x, y), m)| x * y.conj() * m).sum()
    };
    let lhs = inner(&apply_bergman(&h, &f).unwrap(), &g);
    let rhs = inner(&f, &apply_bergman(&h, &g).unwrap());
    assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
}

#[test]
fn positive_operator_dominates_projection() {
    let q = lebesgue_quad(5);
    let h = OperatorHandle::new(OperatorKind::Bergman, &classical(), &q);
    let f = random_real(&q, 21);
    let abs = Field {
        quad_id: q.id,
        values: f.values.iter().map(|v| v.abs()).collect(),
    };
    let p = apply_bergman(&h, &complex(&f)).unwrap();
    let pp = apply_positive(&h, &abs).unwrap();
    for (a, b) in p.values.iter().zip(&pp.values) {
        assert!(*b >= 0.0);
        assert!(a.norm() <= b * (1.0 + 1e-12) + 1e-14);
    }
}

fn svd_norm(k: &DMatrix<f64>, left: &[f64], right: &[f64]) -> f64 {
    let n = k.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| left[i].sqrt() * k[(i, j)] * right[j].sqrt());
    a.singular_values().max()
}

#[test]
fn weighted_norm_matches_singular_values() {
    let q = lebesgue_quad(3);
    let h = OperatorHandle::new(OperatorKind::Positive, &classical(), &q);
    let k = h.abs_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let left: Vec<f64> = q.masses.iter().map(|m| m * rng.gen_range(0.2..5.0)).collect();
    let right: Vec<f64> = q.masses.iter().map(|m| m * rng.gen_range(0.2..5.0)).collect();
    let exact = svd_norm(&k, &left, &right);
    let b = weighted_norm_p2(&k, &left, &right, true);
    assert!((b.lower - exact).abs() <= 1e-8 * exact, "{} vs {exact}", b.lower);
    let upper = b.upper.unwrap();
    assert!(upper >= exact * (1.0 - 1e-10) && upper <= exact * (1.0 + 1e-6), "{upper} vs {exact}");
    // The p = 2 case of the nonlinear power method cannot beat the exact norm.
    let lp = lp_norm_lower(&k, &left, &right, 2.0, 4, 1);
    assert!(lp <= exact * (1.0 + 1e-10) && lp >= 0.99 * exact);
}

#[test]
fn dyadic_operator_norm_matches_dense() {
    let q = lebesgue_quad(4);
    let psi = PsiProfile::new(classical());
    let lw = psi.level_weights(4);
    let k = dyadic_kernel_matrix(&q, Beta::Half, &lw, 4);
    let op = DyadicOp::new(&q, Beta::Half, &lw, 4);
    let x: Vec<f64> = (0..q.len()).map(|i| (i as f64).sin()).collect();
    let (a, b) = (op.apply(&x), k.apply(&x));
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).abs() <= 1e-10 * v.abs().max(1.0));
    }
    let w: Vec<f64> = q.masses.iter().enumerate().map(|(i, m)| m * (1.0 + (i % 3) as f64)).collect();
    let n1 = weighted_norm_p2(&op, &w, &q.masses, true).lower;
    let n2 = svd_norm(&k, &w, &q.masses);
    assert!((n1 - n2).abs() <= 1e-8 * n2);
}

#[test]
fn separated_squares_give_a_positive_lower_bound() {
    let spec = classical();
    let q = lebesgue_quad(9);
    let r = separated_square_lower_bound(&spec, &q, 8, None).unwrap();
    // Distances are in units of the side length.
    assert!(r.distance >= r.d1 && r.distance <= r.d2);
    assert!(r.min_projection > 0.0 && r.average > 0.0);
    assert!(r.ratio.is_finite() && r.ratio > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let q = lebesgue_quad(3);
        let h = OperatorHandle::new(OperatorKind::Bergman, &classical(), &q);
        let (f, g) = (complex(&random_real(&q, seed)), complex(&random_real(&q, seed + 1)));
        let combo = Field {
            quad_id: q.id,
            values: f.values.iter().zip(&g.values).map(|(x, y)| x * a + y * b).collect(),
        };
        let (pf, pg, pc) = (
            apply_bergman(&h, &f).unwrap(),
            apply_bergman(&h, &g).unwrap(),
            apply_bergman(&h, &combo).unwrap(),
        );
        for i in 0..q.len() {
            let expect = pf.values[i] * a + pg.values[i] * b;
            prop_assert!((pc.values[i] - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn dyadic_kernel_is_symmetric_and_positive(
        r1 in 0.0f64..0.999, r2 in 0.0f64..0.999, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0,
    ) {
        let psi = PsiProfile::new(classical());
        let z = Complex64::from_polar(r1, TAU * t1);
        let w = Complex64::from_polar(r2, TAU * t2);
        for beta in Beta::BOTH {
            let a = dyadic_kernel(beta, &psi, z, w, 10);
            prop_assert_eq!(a, dyadic_kernel(beta, &psi, w, z, 10));
            prop_assert!(a >= psi.eval(1.0) * (1.0 - 1e-12) || beta == Beta::Half);
        }
    }
}

