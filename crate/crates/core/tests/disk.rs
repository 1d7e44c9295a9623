use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

use bergman_core::disk::{
    build_quadrature, cell_count, containing_dyadic, minimal_common_square, Arc, Beta,
    DiskQuadrature, DyadicInterval, CELL_BUDGET, MAX_DEPTH,
};
use bergman_core::measures::{doubling_report, RadialMeasure};
use bergman_core::Error;

/// A core of one 8-sector ring and three 32-sector rings, then two radial
/// sub-bands per dyadic band with `2^max(j + j0, 5)` sectors each.
fn count_oracle(depth: u32, j0: u32) -> usize {
    104 + (1..=depth).map(|j| 2usize << (j + j0).max(5)).sum::<usize>()
}

#[test]
fn cell_counts() {
    for (depth, j0, expect) in [(6, 0, 552), (6, 1, 744), (7, 0, 808), (8, 0, 1320)] {
        assert_eq!(cell_count(depth, j0), expect);
        assert_eq!(count_oracle(depth, j0), expect);
        assert_eq!(build_quadrature(&RadialMeasure::lebesgue(), depth, j0).unwrap().len(), expect);
    }
    for depth in 1..=MAX_DEPTH {
        assert_eq!(cell_count(depth, 2), count_oracle(depth, 2));
    }
}

#[test]
fn depth_limits() {
    assert!(build_quadrature(&RadialMeasure::lebesgue(), 0, 0).is_err());
    assert!(build_quadrature(&RadialMeasure::lebesgue(), MAX_DEPTH + 1, 0).is_err());
    assert!(matches!(
        build_quadrature(&RadialMeasure::lebesgue(), 12, 30),
        Err(Error::BudgetExceeded { limit: CELL_BUDGET, .. })
    ));
}

#[test]
fn lebesgue_masses_are_normalized_area() {
    // ω = Lebesgue gives the normalized area of the truncated disk r < R.
    for depth in [3, 6, 9] {
        let q = build_quadrature(&RadialMeasure::lebesgue(), depth, 0).unwrap();
        let r = 1.0 - 0.5f64.powi(depth as i32 + 1);
        assert!((q.total_mass() - r * r).abs() < 1e-12);
        assert!((q.outer_radius() - r).abs() < 1e-15);
    }
}

#[test]
fn carleson_square_masses_in_closed_form() {
    let depth = 7;
    let q = build_quadrature(&RadialMeasure::lebesgue(), depth, 0).unwrap();
    let big_r = q.outer_radius();
    for beta in Beta::BOTH {
        let sums = q.square_sums(&q.masses, beta, depth);
        for (id, s) in sums.iter().enumerate() {
            let len = DyadicInterval::from_id(beta, id).length();
            let lo = 1.0 - len;
            let exact = (big_r * big_r - lo * lo) * len;
            assert!((s - exact).abs() <= 1e-12, "{beta:?} {id}: {s} vs {exact}");
            // S(I) = T(I) ∪ S(I₁) ∪ S(I₂).
            let sq = DyadicInterval::from_id(beta, id);
            if sq.level < depth {
                let top = (1.0 - len / 2.0).powi(2) - lo * lo;
                let kids: f64 = sq.children().iter().map(|c| sums[c.id()]).sum();
                assert!((s - (top * len + kids)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn grids_partition_and_nest() {
    for beta in Beta::BOTH {
        for level in 0..10u32 {
            let total: f64 = (0..1u64 << level)
                .map(|m| DyadicInterval { beta, level, index: m }.length())
                .sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
    }
    // D^0 is nested; D^{1/2} is not.
    let child = DyadicInterval { beta: Beta::Zero, level: 5, index: 17 };
    assert!(child.parent().unwrap().arc().contains_arc(&child.arc()));
    let straddles = (0..32u64).any(|m| {
        let c = DyadicInterval { beta: Beta::Half, level: 5, index: m };
        let p = DyadicInterval::containing(Beta::Half, 4, c.start());
        !p.arc().contains_arc(&c.arc())
    });
    assert!(straddles);
}

#[test]
fn cell_table_has_one_row_per_cell() {
    let q: DiskQuadrature = build_quadrature(&RadialMeasure::lebesgue(), 4, 0).unwrap();
    let rows = q.cell_table();
    assert_eq!(rows.len(), q.len());
    assert_eq!(rows[3][0], "3");
}

#[test]
fn doubling_of_standard_weights() {
    let r = doubling_report(&RadialMeasure::standard(1.0), 12).unwrap();
    // ω̂(r) ∝ (1 - r)^2, so ω̂(r)/ω̂((1+r)/2) tends to 4.
    assert!(r.constant_hat > 3.5 && r.constant_hat <= 4.0 + 1e-9, "{}", r.constant_hat);
    assert!(r.supported_near_one);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn containing_dyadic_is_within_four(start in 0.0f64..1.0, k in 2.0f64..30.0) {
        let arc = Arc::new(start, 2f64.powf(-k));
        let d = containing_dyadic(&arc).unwrap();
        prop_assert!(d.arc().contains_arc(&arc));
        prop_assert!(d.length() <= 4.0 * arc.length);
    }

    #[test]
    fn common_square_controls_the_kernel_distance(
        r1 in 0.0f64..0.9999, r2 in 0.0f64..0.9999, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0,
    ) {
        let z = Complex64::from_polar(r1, TAU * t1);
        let w = Complex64::from_polar(r2, TAU * t2);
        for beta in Beta::BOTH {
            let i0 = minimal_common_square(z, w, beta);
            prop_assert!(i0.contains_angle(t1) || r1 == 0.0);
            let gap = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
            prop_assert!(gap <= 2.0 * TAU * i0.length(), "gap {} for |I0| {}", gap, i0.length());
        }
    }
}
