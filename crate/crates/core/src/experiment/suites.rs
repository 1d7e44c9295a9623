use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{SQRT_2, TAU};

use super::{ExperimentConfig, Recorder, SuiteReport};
use crate::czd::{cz_decompose, cz_reconstruct_weak11_bound};
use crate::disk::{build_quadrature, containing_dyadic, Arc, Beta, DiscFamily, DiskQuadrature, DyadicInterval, Field};
use crate::error::{Error, Result};
use crate::kernels::{
    check_completely_monotone, construct_omega_from_nu, difference_bound_check, kernel_series,
    stieltjes_lower_bound, odd_moments_from_phi, pointwise_constant, tail_stieltjes_ratio, KernelSpec,
};
use crate::measures::{Atom, Density, RadialMeasure};
use crate::operators::{comparability_constants, weighted_norm_p2, OperatorHandle, OperatorKind, PsiProfile};
use crate::quad::harmonic;
use crate::twoweight::{
    carleson_embedding_sum, one_weight_norm_experiment, random_instance, random_weight,
    split_by_criterion, stopping_family, stopping_maximal, testing_constants,
};
use crate::weights::{
    b1_characteristic, bp_characteristic, weak11_maximal_check, weak11_projection_check,
    WeightField, WeightSpec,
};

pub const SUITES: [&str; 17] = [
    "kernel-standard",
    "kernel-lebesgue",
    "kernel-example3",
    "kernel-identities",
    "monotone",
    "stieltjes",
    "pointwise",
    "tail-stieltjes",
    "kernel-lemmas",
    "containment",
    "comparability",
    "maximal",
    "czd",
    "stopping",
    "twoweight",
    "oneweight",
    "weak11",
];

pub(super) fn run(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new();
    match cfg.suite.as_str() {
        "kernel-standard" => kernel_standard(&mut rec)?,
        "kernel-lebesgue" => kernel_lebesgue(&mut rec)?,
        "kernel-example3" => kernel_example3(&mut rec)?,
        "kernel-identities" => {
            kernel_standard(&mut rec)?;
            kernel_lebesgue(&mut rec)?;
            kernel_example3(&mut rec)?;
        }
        "monotone" => monotone(&mut rec),
        "stieltjes" => stieltjes(cfg, &mut rec)?,
        "pointwise" => pointwise(cfg, &mut rec)?,
        "tail-stieltjes" => tail_stieltjes(&mut rec)?,
        "kernel-lemmas" => {
            monotone(&mut rec);
            stieltjes(cfg, &mut rec)?;
            pointwise(cfg, &mut rec)?;
            tail_stieltjes(&mut rec)?;
        }
        "containment" => containment(cfg, &mut rec)?,
        "comparability" => comparability(cfg, &mut rec)?,
        "maximal" => maximal(cfg, &mut rec)?,
        "czd" => czd(cfg, &mut rec)?,
        "stopping" => stopping(cfg, &mut rec)?,
        "twoweight" => twoweight(cfg, &mut rec)?,
        "oneweight" => oneweight(cfg, &mut rec)?,
        "weak11" => weak11(cfg, &mut rec)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(rec.finish(&cfg.suite))
}

fn x_grid() -> impl Iterator<Item = f64> {
    (0..10).map(|k| k as f64 / 10.0)
}

fn rel_err(a: Complex64, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

fn kernel_standard(rec: &mut Recorder) -> Result<()> {
    for alpha in [0.0, 1.0, 2.0] {
        let omega = RadialMeasure::standard(alpha);
        let mut worst: f64 = 0.0;
        for x in x_grid() {
            let s = kernel_series(|n| omega.moment(2.0 * n as f64 + 1.0), Complex64::new(x, 0.0), 1e-15)?;
            worst = worst.max(rel_err(s, (1.0 - x).powf(-(alpha + 2.0))));
        }
        rec.at_most(&format!("standard({alpha})"), "max relative error", None, worst, 1e-8);
    }
    Ok(())
}

fn kernel_lebesgue(rec: &mut Recorder) -> Result<()> {
    let terms = 700;
    let c = construct_omega_from_nu(&RadialMeasure::lebesgue(), 2 * terms + 1)?;
    let m = &c.constructed_moments;
    let mut worst: f64 = 0.0;
    for x in x_grid() {
        let s = kernel_series(
            |n| m.get(2 * n + 1).copied().unwrap_or(f64::NAN),
            Complex64::new(x, 0.0),
            1e-15,
        )?;
        let exact = if x == 0.0 {
            1.0
        } else {
            (1.0 / (1.0 - x)).ln() / (x * (1.0 - x))
        };
        worst = worst.max(rel_err(s, exact));
    }
    rec.at_most("nu=lebesgue", "max relative error", None, worst, 1e-6);
    rec.at_most("nu=lebesgue", "|omega_1 - 1/2|", None, (m[1] - 0.5).abs(), 1e-10);
    rec.at_most("nu=lebesgue", "|omega_3 - 1/3|", None, (m[3] - 1.0 / 3.0).abs(), 1e-10);
    rec.info("nu=lebesgue", "partial sum residual", None, c.partial_sum_residual);
    rec.check("nu=lebesgue", "divergence hypothesis", None, c.divergence_proxy, c.hypothesis_ok);
    Ok(())
}

fn kernel_example3(rec: &mut Recorder) -> Result<()> {
    let count = 4000;
    let phi: Vec<f64> = (0..count)
        .map(|j| 1.0 + harmonic(Complex64::new(j as f64, 0.0)).re)
        .collect();
    let moments = odd_moments_from_phi(&phi);
    // Coefficients of (1 + log(1/(1-x))) / (1-x)^2 by convolution of
    // a_0 = 1, a_k = 1/k with (n + 1).
    let oracle = |n: usize| -> f64 {
        (0..=n)
            .map(|k| {
                let a = if k == 0 { 1.0 } else { 1.0 / k as f64 };
                a * (n - k + 1) as f64
            })
            .sum()
    };
    let worst = (0..64)
        .map(|n| {
            let c = 1.0 / (2.0 * moments[n]);
            (c - oracle(n)).abs() / oracle(n)
        })
        .fold(0.0, f64::max);
    rec.at_most("example-3", "max coefficient relative error (n < 64)", None, worst, 1e-8);
    let mut worst_fn: f64 = 0.0;
    for x in x_grid() {
        let s = kernel_series(
            |n| moments.get(n).copied().unwrap_or(f64::NAN),
            Complex64::new(x, 0.0),
            1e-15,
        )?;
        let exact = (1.0 + (1.0 / (1.0 - x)).ln()) / ((1.0 - x) * (1.0 - x));
        worst_fn = worst_fn.max(rel_err(s, exact));
    }
    rec.at_most("example-3", "max relative error of the sum", None, worst_fn, 1e-8);
    Ok(())
}

fn monotone(rec: &mut Recorder) {
    let harmonic_seq: Vec<f64> = (0..=50).map(|n| 1.0 / (n as f64 + 1.0)).collect();
    let r = check_completely_monotone(&harmonic_seq, 10);
    rec.check("1/(n+1)", "completely monotone to order 10", None, r.max_order_checked as f64, r.passed);
    let linear: Vec<f64> = (0..=50).map(|n| n as f64).collect();
    let r = check_completely_monotone(&linear, 10);
    let at = r.first_violation.map(|(k, n, _)| (k, n));
    rec.check("n", "first violation at (k=1, n=0)", None, r.first_violation.map_or(f64::NAN, |v| v.2), at == Some((1, 0)));
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = if rng.gen::<bool>() {
        rng.gen::<f64>().sqrt()
    } else {
        1.0 - 2f64.powf(-rng.gen_range(1.0..30.0))
    };
    Complex64::from_polar(r, TAU * rng.gen::<f64>())
}

fn stieltjes(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let n = cfg.samples_or(10_000);
    let nus = [
        RadialMeasure::lebesgue(),
        RadialMeasure::atom(1.0, 1.0),
        RadialMeasure::new("atom(0.5)+lebesgue", Density::Constant(1.0), vec![Atom { location: 0.5, mass: 1.0 }])?,
    ];
    for nu in &nus {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut violations = 0usize;
        let mut min_ratio = f64::INFINITY;
        for _ in 0..n {
            let b = stieltjes_lower_bound(nu, random_point(&mut rng))?;
            min_ratio = min_ratio.min(b.ratio);
            if b.ratio < 1.0 - 1e-12 {
                violations += 1;
            }
        }
        rec.at_most(&nu.name, "violations", None, violations as f64, 0.0);
        rec.info(&nu.name, "min ratio", None, min_ratio);
    }
    Ok(())
}

fn pointwise(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let n = cfg.samples_or(10_000);
    rec.at_most(
        "c=2,gamma=1",
        "|C - 84 sqrt 2|",
        None,
        (pointwise_constant(2.0, 1.0) - 84.0 * SQRT_2).abs(),
        1e-10,
    );
    for (c, gamma) in [(2.0, 1.0), (4.0, 1.0), (2.0, 2.0)] {
        let specs = [
            KernelSpec::new(gamma, RadialMeasure::atom(1.0, 1.0))?,
            KernelSpec::new(gamma, RadialMeasure::lebesgue())?,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (mut accepted, mut attempts, mut violations) = (0usize, 0usize, 0usize);
        let mut worst: f64 = 0.0;
        while accepted < n && attempts < 50 * n {
            attempts += 1;
            let h0 = 2f64.powf(-rng.gen_range(0.2..12.0));
            let t0 = rng.gen::<f64>();
            let z0 = Complex64::from_polar(1.0 - h0, TAU * t0);
            let z = z0 + Complex64::from_polar(h0 * rng.gen::<f64>(), TAU * rng.gen::<f64>());
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let dt = sign * 0.5 * 2f64.powf(-rng.gen_range(0.0..12.0));
            let zeta = Complex64::from_polar(1.0 - 2f64.powf(-rng.gen_range(0.0..12.0)), TAU * (t0 + dt));
            if z.norm() >= 1.0 {
                continue;
            }
            match difference_bound_check(&specs[accepted % 2], z0, z, zeta, c) {
                Ok((lhs, bound)) => {
                    accepted += 1;
                    worst = worst.max(lhs / bound);
                    if lhs > bound * (1.0 + 1e-12) {
                        violations += 1;
                    }
                }
                Err(Error::SeparationViolated { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let case = format!("c={c},gamma={gamma}");
        rec.at_least(&case, "admissible triples", None, accepted as f64, n as f64);
        rec.at_most(&case, "violations", None, violations as f64, 0.0);
        rec.info(&case, "max lhs/bound", None, worst);
    }
    Ok(())
}

fn tail_stieltjes(rec: &mut Recorder) -> Result<()> {
    let instances = [
        ("gamma=1,nu=atom(1),omega=lebesgue", 1.0, RadialMeasure::atom(1.0, 1.0), RadialMeasure::lebesgue()),
        (
            "gamma=1,nu=lebesgue,omega=from-nu",
            1.0,
            RadialMeasure::lebesgue(),
            RadialMeasure::from_nu(RadialMeasure::lebesgue()),
        ),
        ("gamma=2,nu=atom(1),omega=standard(1)", 2.0, RadialMeasure::atom(1.0, 1.0), RadialMeasure::standard(1.0)),
    ];
    for (case, gamma, nu, omega) in instances {
        let band = |tol: f64| -> Result<(f64, f64)> {
            let spec = KernelSpec::new(gamma, nu.clone())?.with_tolerance(tol);
            let mut b = (f64::INFINITY, 0.0f64);
            for k in 0..=12 {
                let r = tail_stieltjes_ratio(&spec, &omega, 1.0 - 0.5f64.powi(k))?;
                b = (b.0.min(r), b.1.max(r));
            }
            Ok(b)
        };
        let (lo, hi) = band(1e-9)?;
        let (lo2, hi2) = band(1e-10)?;
        rec.info(case, "c_low", None, lo);
        rec.info(case, "c_high", None, hi);
        rec.at_most(case, "c_high / c_low", None, hi / lo, 10.0);
        let drift = ((lo2 / lo - 1.0).abs()).max((hi2 / hi - 1.0).abs());
        rec.at_most(case, "endpoint drift under 10x tolerance", None, drift, 0.1);
    }
    Ok(())
}

fn containment(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let n = cfg.samples_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..n {
        let arc = Arc::new(rng.gen(), 2f64.powf(-rng.gen_range(2.0..30.0)));
        let k = containing_dyadic(&arc)?;
        let ratio = k.length() / arc.length;
        worst = worst.max(ratio);
        if !k.arc().contains_arc(&arc) || ratio > 4.0 {
            violations += 1;
        }
    }
    rec.at_most("random arcs", "violations", None, violations as f64, 0.0);
    rec.at_most("random arcs", "max |K| / |I|", None, worst, 4.0);
    Ok(())
}

fn comparability(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let n = cfg.samples_or(10_000);
    let depth = cfg.depth_or(8);
    for (case, nu) in [("nu=atom(1)", RadialMeasure::atom(1.0, 1.0)), ("nu=lebesgue", RadialMeasure::lebesgue())] {
        let psi = PsiProfile::new(KernelSpec::new(1.0, nu)?);
        let (dec, dbl) = psi.diagnostics(depth + 2);
        rec.info(case, "essentially decreasing constant", None, dec);
        rec.info(case, "doubling constant", None, dbl);
        let a = comparability_constants(&psi, n, cfg.seed, depth)?;
        let b = comparability_constants(&psi, n, cfg.seed, depth + 2)?;
        for (c, d) in [(&a, depth), (&b, depth + 2)] {
            rec.at_least(case, "c_low", Some(d), c.c_low, f64::MIN_POSITIVE);
            rec.at_most(case, "c_high", Some(d), c.c_high, f64::MAX);
        }
        rec.at_most(case, "c_low drift", None, (b.c_low / a.c_low - 1.0).abs(), 0.2);
        rec.at_most(case, "c_high drift", None, (b.c_high / a.c_high - 1.0).abs(), 0.2);
    }
    Ok(())
}

/// Nonnegative test functions: heavy-tailed cell values, indicators of
/// random polar rectangles, and single-cell spikes (half of them in the
/// outermost band).
pub(crate) fn random_field(quad: &DiskQuadrature, rng: &mut ChaCha8Rng, kind: usize) -> Field<f64> {
    match kind % 3 {
        0 => {
            let values = (0..quad.len())
                .map(|_| rng.gen_range(1e-3f64..1.0).powf(-0.7) - 1.0)
                .collect();
            Field {
                quad_id: quad.id,
                values,
            }
        }
        1 => {
            let t0: f64 = rng.gen();
            let len = rng.gen_range(0.01..0.5);
            let r0 = rng.gen_range(0.0..0.95);
            let r1 = r0 + rng.gen_range(0.02..(1.0 - r0));
            let amp = rng.gen_range(0.1..10.0);
            Field::from_fn(quad, |c| {
                let dt = (c.t_node - t0).rem_euclid(1.0);
                if dt < len && c.r_node >= r0 && c.r_node < r1 {
                    amp
                } else {
                    0.0
                }
            })
        }
        _ => {
            let outer = rng.gen::<bool>();
            let t: f64 = rng.gen();
            let candidates: Vec<usize> = (0..quad.len())
                .filter(|&i| {
                    let c = &quad.cells[i];
                    c.t_lo <= t && t < c.t_lo + c.t_len && (!outer || c.r_hi >= quad.outer_radius())
                })
                .collect();
            let pick = candidates[rng.gen_range(0..candidates.len())];
            let amp = rng.gen_range(0.1..10.0);
            Field::from_fn(quad, |_| 0.0).map_index(pick, amp)
        }
    }
}

trait MapIndex {
    fn map_index(self, i: usize, v: f64) -> Self;
}

impl MapIndex for Field<f64> {
    fn map_index(mut self, i: usize, v: f64) -> Self {
        self.values[i] = v;
        self
    }
}

fn maximal(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let depth = cfg.depth_or(8);
    let quad = build_quadrature(&RadialMeasure::lebesgue(), depth, cfg.j0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = cfg.samples_or(100);
    let mut worst = [0.0f64; 2];
    let mut lp = [0.0f64; 2];
    for i in 0..count {
        let f = random_field(&quad, &mut rng, i);
        for (k, beta) in Beta::BOTH.into_iter().enumerate() {
            worst[k] = worst[k].max(weak11_maximal_check(&quad, &quad.masses, beta, &f, depth)?);
            let m = crate::weights::dyadic_maximal(&quad, &quad.masses, beta, &f, depth)?;
            let num: f64 = m.values.iter().zip(&quad.masses).map(|(a, w)| a * a * w).sum();
            let den: f64 = f.values.iter().zip(&quad.masses).map(|(a, w)| a * a * w).sum();
            if den > 0.0 {
                lp[k] = lp[k].max((num / den).sqrt());
            }
        }
    }
    for (k, beta) in Beta::BOTH.into_iter().enumerate() {
        let case = format!("beta={}", beta.label());
        rec.at_most(&case, "sup weak (1,1) ratio", Some(depth), worst[k], 2.0 + 1e-10);
        rec.info(&case, "sup L2 ratio", Some(depth), lp[k]);
    }
    Ok(())
}

fn czd(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let depth = cfg.depth_or(7);
    let quad = build_quadrature(&RadialMeasure::lebesgue(), depth, cfg.j0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = cfg.samples_or(50);
    let mut violations = [0usize; 6];
    let mut parent_constant: f64 = 1.0;
    let mut unresolved = 0usize;
    let mut decompositions = Vec::new();
    for i in 0..count {
        let f = random_field(&quad, &mut rng, i);
        let norm: f64 = f.values.iter().zip(&quad.masses).map(|(a, m)| a.abs() * m).sum();
        if norm == 0.0 {
            continue;
        }
        let lambda = norm * rng.gen_range(0.01f64..50f64.ln()).exp();
        let region = 1 + i % 2;
        let cz = cz_decompose(&quad, &f, lambda, region)?;
        let rect = crate::disk::level_one_regions()[region - 1].region();
        let fmax = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Disjointness.
        let mut seen = vec![false; quad.len()];
        for q in &cz.selected {
            for &c in &q.cells {
                if std::mem::replace(&mut seen[c], true) {
                    violations[0] += 1;
                }
            }
        }
        // g + b = f 1_R.
        for j in 0..quad.len() {
            let target = if quad.masses[j] > 0.0 && rect.contains(quad.cells[j].node) { f.values[j] } else { 0.0 };
            if (cz.g.values[j] + cz.b.values[j] - target).abs() > 1e-12 * fmax {
                violations[1] += 1;
            }
        }
        for q in &cz.selected {
            let mean: f64 = q.cells.iter().map(|&c| cz.b.values[c] * quad.masses[c]).sum();
            let scale: f64 = q.cells.iter().map(|&c| f.values[c].abs() * quad.masses[c]).sum();
            if mean.abs() > 1e-12 * scale {
                violations[2] += 1;
            }
            if q.average < lambda {
                violations[4] += 1;
            }
            if q.average > cz.parent_constant * lambda * (1.0 + 1e-12) {
                violations[5] += 1;
            }
        }
        if cz.exceptional_mass * lambda > cz.local_norm * (1.0 + 1e-12) {
            violations[3] += 1;
        }
        parent_constant = parent_constant.max(cz.parent_constant);
        unresolved += cz.unresolved;
        if decompositions.len() < 4 && !cz.selected.is_empty() {
            decompositions.push(cz);
        }
    }
    let names = [
        "overlapping cells",
        "g + b != f 1_R",
        "b not mean zero",
        "omega(Omega) lambda > |f 1_R|_1",
        "average below lambda",
        "average above C lambda",
    ];
    for (name, v) in names.iter().zip(violations) {
        rec.at_most("random (f, lambda)", name, Some(depth), v as f64, 0.0);
    }
    rec.info("random (f, lambda)", "parent constant C", Some(depth), parent_constant);
    rec.info("random (f, lambda)", "unresolved cells", Some(depth), unresolved as f64);

    let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0))?;
    let handle = OperatorHandle::new(OperatorKind::Bergman, &spec, &quad);
    let family = DiscFamily::build(&quad);
    let v = WeightSpec::Power { eta: -0.25 }.build(&quad)?;
    let b1 = b1_characteristic(&quad, &family, &v)?.value;
    for (k, cz) in decompositions.iter().enumerate() {
        let r = cz_reconstruct_weak11_bound(&handle, &quad, &v, b1, cz)?;
        let case = format!("weak-type pieces {k}");
        rec.info(&case, "good part ratio", Some(depth), r.good_ratio);
        rec.info(&case, "bad tail ratio", Some(depth), r.bad_tail_ratio);
        rec.info(&case, "exceptional set ratio", Some(depth), r.exceptional_ratio);
    }
    Ok(())
}

fn stopping(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let depth = cfg.depth_or(8);
    let p = cfg.p;
    let quad = build_quadrature(&RadialMeasure::lebesgue(), depth, cfg.j0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sigma = random_weight(&quad, &mut rng, "sigma")?;
    let sm: Vec<f64> = sigma.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let count = cfg.samples_or(50);
    let (mut growth, mut pointwise, mut partition) = (0usize, 0usize, 0usize);
    let mut runs = Vec::new();
    let mut max_generations = 0usize;
    for i in 0..count {
        let f = random_field(&quad, &mut rng, i);
        let root = DyadicInterval::root(Beta::Zero);
        let fam = match stopping_family(&quad, &f, &sm, root, depth) {
            Ok(fam) => fam,
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        for s in &fam.squares {
            if let Some(parent) = s.parent {
                if !(s.expectation > 4.0 * fam.squares[parent].expectation) {
                    growth += 1;
                }
            }
            max_generations = max_generations.max(s.generation);
        }
        let w = quad.square_sums(&sm, Beta::Zero, depth);
        partition += (0..w.len()).filter(|&id| w[id] > 0.0 && fam.lambda[id].is_none()).count();
        let m = stopping_maximal(&quad, &f, &sm, &fam)?;
        let lin = fam.linearized(&quad);
        pointwise += lin
            .iter()
            .zip(&m.values)
            .filter(|(l, m)| **l > 4.0 / 3.0 * (1.0 + 1e-10) * **m)
            .count();
        let norm: f64 = f.values.iter().zip(&sm).map(|(a, w)| a.abs().powf(p) * w).sum();
        let max_norm: f64 = m.values.iter().zip(&sm).map(|(a, w)| a.powf(p) * w).sum();
        runs.push((carleson_embedding_sum(&fam, p), norm, max_norm / norm));
    }
    let cmax = runs.iter().map(|r| r.2).fold(0.0, f64::max);
    let k = (4.0f64 / 3.0).powf(p) * cmax;
    let worst = runs.iter().map(|r| r.0 / (k * r.1)).fold(0.0, f64::max);
    rec.at_most("random f", "factor-4 growth violations", Some(depth), growth as f64, 0.0);
    rec.at_most("random f", "unassigned squares", Some(depth), partition as f64, 0.0);
    rec.at_most("random f", "pointwise 4/3 M f violations", Some(depth), pointwise as f64, 0.0);
    rec.info("random f", "maximal L^p constant", Some(depth), cmax);
    rec.info("random f", "embedding constant K", Some(depth), k);
    rec.at_most("random f", "max embedding sum / (K |f|^p)", Some(depth), worst, 1.0);
    rec.info("random f", "deepest generation", Some(depth), max_generations as f64);
    Ok(())
}

fn twoweight(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let depth = cfg.depth_or(6);
    let quad = build_quadrature(&RadialMeasure::lebesgue(), depth, 1)?;
    if quad.len() > crate::operators::ASSEMBLY_THRESHOLD {
        return Err(Error::BudgetExceeded {
            cells: quad.len(),
            limit: crate::operators::ASSEMBLY_THRESHOLD,
        });
    }
    let psi = PsiProfile::new(KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0))?);
    let p = cfg.p;
    let q = p / (p - 1.0);
    let count = cfg.samples_or(20);
    let mut ratios = Vec::new();
    let (mut necessity, mut duality) = (0usize, 0.0f64);
    for i in 0..count {
        let (t, sigma, u) = random_instance(&quad, &psi, Beta::Zero, depth, cfg.seed + i as u64)?;
        let r = testing_constants(&t, &quad, &sigma, &u, p, cfg.seed)?;
        let tol = 1.0 + 1e-8;
        if r.c0.powf(1.0 / p) > r.norm.lower * tol || r.c0_star.powf(1.0 / q) > r.norm.lower * tol {
            necessity += 1;
        }
        if p == 2.0 {
            let sm: Vec<f64> = sigma.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
            let um: Vec<f64> = u.values().iter().zip(&t.mu).map(|(a, b)| a * b).collect();
            let back = weighted_norm_p2(t.kernel(), &sm, &um, true);
            duality = duality.max((back.lower / r.norm.lower - 1.0).abs());
        }
        ratios.push(r.c1);
        rec.info(&format!("instance {i}"), "norm", Some(depth), r.norm.lower);
        rec.info(&format!("instance {i}"), "C0", Some(depth), r.c0);
        rec.info(&format!("instance {i}"), "C0*", Some(depth), r.c0_star);
    }
    rec.at_most("all instances", "necessity violations", Some(depth), necessity as f64, 0.0);
    if p == 2.0 {
        rec.at_most("all instances", "duality mismatch", Some(depth), duality, 1e-8);
    }
    let c1 = ratios.iter().copied().fold(0.0, f64::max);
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.is_empty() {
        f64::NAN
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    rec.info("all instances", "C1", Some(depth), c1);
    rec.at_most("all instances", "C1 / median ratio", Some(depth), c1 / median, 10.0);

    // The splitting criterion on a symmetric instance puts everything in S1.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = random_weight(&quad, &mut rng, "w")?;
    let f = random_field(&quad, &mut rng, 0);
    let (_, s2) = split_by_criterion(&quad, &quad.masses, Beta::Zero, &f, &f, &w, &w, 2.0, depth)?;
    rec.at_most("symmetric split", "squares in S2", Some(depth), s2.len() as f64, 0.0);
    Ok(())
}

fn oneweight(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let norm_depth = cfg.depth_or(7);
    let p = cfg.p;
    let omega = RadialMeasure::lebesgue();
    let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0))?;
    let mut ratios = Vec::new();
    for eta in [-0.5, 0.0, 0.5] {
        let case = format!("eta={eta}");
        let w = WeightSpec::Power { eta };
        let mut b = Vec::new();
        for j in [8, 10] {
            let quad = build_quadrature(&omega, j, 0)?;
            let v = w.build(&quad)?;
            let c = bp_characteristic(&quad, &v, p, j)?.value;
            rec.info(&case, "B characteristic", Some(j), c);
            b.push(c);
        }
        rec.at_most(&case, "B drift from J=8 to J=10", None, (b[1] / b[0] - 1.0).abs(), 0.1);
        let quad = build_quadrature(&omega, norm_depth, 0)?;
        let v = w.build(&quad)?;
        let r = one_weight_norm_experiment(&spec, &quad, &v, p, cfg.seed)?;
        rec.info(&case, "norm lower", Some(norm_depth), r.norm.lower);
        if let Some(u) = r.norm.upper {
            rec.info(&case, "norm upper", Some(norm_depth), u);
        }
        rec.info(&case, "norm / B^max(1,1/(p-1))", Some(norm_depth), r.ratio);
        rec.info(&case, "Psi(|I|) mu(S(I)) / |I| spread", Some(norm_depth), r.psi_mass_band.1 / r.psi_mass_band.0);
        rec.info(&case, "mu(S) / mu(T) max", Some(norm_depth), r.top_half_ratio);
        ratios.push(r.ratio);
    }
    let spread = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    rec.at_most("eta in {-1/2, 0, 1/2}", "ratio spread", Some(norm_depth), spread, 3.0);

    let w = WeightSpec::Power { eta: 1.0 };
    let mut prev = 0.0;
    let mut increasing = true;
    let mut values = Vec::new();
    for j in [6, 8, 10, 12] {
        let quad = build_quadrature(&omega, j, 0)?;
        let c = bp_characteristic(&quad, &w.build(&quad)?, p, j)?.value;
        rec.info("eta=1", "B characteristic", Some(j), c);
        increasing &= c > prev;
        prev = c;
        values.push(c);
    }
    rec.check("eta=1", "B grows with depth", None, values[3] / values[0], increasing && values[3] > 1.2 * values[0]);
    Ok(())
}

fn weak11(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let spec = KernelSpec::new(1.0, RadialMeasure::atom(1.0, 1.0))?;
    let omega = RadialMeasure::lebesgue();
    let count = cfg.samples_or(20);
    let weights = [("v=(1-|z|)^(-1/4)", WeightSpec::Power { eta: -0.25 }), ("v=(1-|z|)^3", WeightSpec::Power { eta: 3.0 })];
    let depths = [6u32, 7, 8];
    let mut sups = vec![Vec::new(); weights.len()];
    for &j in &depths {
        let quad = build_quadrature(&omega, j, 0)?;
        let handle = OperatorHandle::new(OperatorKind::Bergman, &spec, &quad);
        let family = DiscFamily::build(&quad);
        for (k, (name, w)) in weights.iter().enumerate() {
            let v: WeightField = w.build(&quad)?;
            let b1 = b1_characteristic(&quad, &family, &v)?.value;
            rec.info(name, "B1 on disc family", Some(j), b1);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let (mut sup, mut sup_plus) = (0.0f64, 0.0f64);
            for i in 0..count {
                // Alternate single-cell spikes with the other random families.
                let f = random_field(&quad, &mut rng, if i % 2 == 0 { 2 } else { i / 2 });
                let r = weak11_projection_check(&handle, &quad, &v, &f)?;
                sup = sup.max(r.bergman);
                sup_plus = sup_plus.max(r.positive);
            }
            rec.info(name, "sup weak ratio P", Some(j), sup);
            rec.info(name, "sup weak ratio P+", Some(j), sup_plus);
            sups[k].push(sup);
        }
    }
    let good = &sups[0];
    let spread = good.iter().copied().fold(0.0, f64::max) / good.iter().copied().fold(f64::INFINITY, f64::min);
    rec.at_most(weights[0].0, "spread of sup ratio across J", None, spread, 2.0);
    let bad = &sups[1];
    let grows = bad.windows(2).all(|w| w[1] > w[0]) && bad[2] > 2.0 * bad[0];
    rec.check(weights[1].0, "sup ratio grows with J", None, bad[2] / bad[0], grows);
    Ok(())
}
