//! One-off measurements behind the command line subcommands. Each returns a
//! [`SuiteReport`] so that it is written with the same CSV layout as the
//! suites.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{resolve_measure, suites::random_field, ExperimentConfig, Recorder, SuiteReport};
use crate::czd::{cz_decompose, cz_reconstruct_weak11_bound};
use crate::disk::{build_quadrature, Beta, DiscFamily, DiskQuadrature, Field};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operators::{
    apply_bergman, apply_positive, comparability_constants, lp_norm_lower, node_comparability,
    weighted_norm_p2, DyadicOp, NormBracket, OperatorHandle, OperatorKind, PsiProfile,
    ASSEMBLY_THRESHOLD,
};
use crate::twoweight::{one_weight_norm_experiment, SparseOperator, testing_constants};
use crate::weights::{
    b1_characteristic, bp_characteristic, dual_weight, weak11_maximal_check,
    weak11_projection_check, WeightSpec,
};

/// Test functions accepted by `proj apply` and `czd run`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    One,
    /// `z^n`.
    Monomial(u32),
    /// Indicator of one cell.
    Spike(usize),
    /// One of the random families (heavy-tailed, rectangle, spike).
    Random(usize),
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `one`, `z^n`, `spike:i` or `random:k`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnresolvedReference(s.to_string());
        if s == "one" {
            return Ok(Self::One);
        }
        if let Some(n) = s.strip_prefix("z^") {
            return n.parse().map(Self::Monomial).map_err(|_| bad());
        }
        if let Some(i) = s.strip_prefix("spike:") {
            return i.parse().map(Self::Spike).map_err(|_| bad());
        }
        if let Some(k) = s.strip_prefix("random:") {
            return k.parse().map(Self::Random).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl TestFunction {
    fn build(self, quad: &DiskQuadrature, seed: u64) -> Result<Field<Complex64>> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match self {
            Self::One => Field::constant(quad, c(1.0)),
            Self::Monomial(n) => Field::from_fn(quad, |cell| cell.node.powu(n)),
            Self::Spike(i) => {
                if i >= quad.len() {
                    return Err(Error::Precondition(format!("cell {i} of {}", quad.len())));
                }
                let mut f = Field::constant(quad, c(0.0));
                f.values[i] = c(1.0);
                f
            }
            Self::Random(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = random_field(quad, &mut rng, k);
                Field {
                    quad_id: f.quad_id,
                    values: f.values.into_iter().map(c).collect(),
                }
            }
        })
    }

    /// `P_ω f` when it is known in closed form.
    fn projection(self) -> Option<Self> {
        match self {
            Self::One | Self::Monomial(_) => Some(self),
            _ => None,
        }
    }
}

fn setup(cfg: &ExperimentConfig, default_depth: u32) -> Result<(KernelSpec, DiskQuadrature)> {
    cfg.validate()?;
    let spec = KernelSpec::new(cfg.gamma, resolve_measure(&cfg.nu)?)?;
    let quad = build_quadrature(&resolve_measure(&cfg.omega)?, cfg.depth_or(default_depth), cfg.j0)?;
    Ok((spec, quad))
}

fn dense_budget(quad: &DiskQuadrature) -> Result<()> {
    if quad.len() > ASSEMBLY_THRESHOLD {
        return Err(Error::BudgetExceeded {
            cells: quad.len(),
            limit: ASSEMBLY_THRESHOLD,
        });
    }
    Ok(())
}

fn l2(values: impl Iterator<Item = f64>, masses: &[f64]) -> f64 {
    values.zip(masses).map(|(a, m)| a * a * m).sum::<f64>().sqrt()
}

fn record_norm(rec: &mut Recorder, case: &str, depth: u32, norm: &NormBracket) {
    rec.info(case, "norm lower", Some(depth), norm.lower);
    if let Some(u) = norm.upper {
        rec.at_least(case, "norm upper", Some(depth), u, norm.lower * (1.0 - 1e-8));
    }
}

/// Applies `P_ω` (or `P⁺_ω`) to `f` and reports norms, the error against
/// the closed form when there is one, and assembled against matrix-free.
pub fn proj_apply(cfg: &ExperimentConfig, kind: OperatorKind, f: TestFunction) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 6)?;
    let depth = quad.depth;
    let handle = OperatorHandle::new(kind, &spec, &quad);
    let fv = f.build(&quad, cfg.seed)?;
    let out: Vec<Complex64> = match kind {
        OperatorKind::Bergman => apply_bergman(&handle, &fv)?.values,
        OperatorKind::Positive => {
            let abs = Field {
                quad_id: quad.id,
                values: fv.values.iter().map(|z| z.norm()).collect(),
            };
            apply_positive(&handle, &abs)?
                .values
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect()
        }
    };
    let mut rec = Recorder::new();
    let case = format!("{kind:?} {f:?}");
    rec.info(&case, "|f|_2", Some(depth), l2(fv.values.iter().map(|z| z.norm()), &quad.masses));
    rec.info(&case, "|Tf|_2", Some(depth), l2(out.iter().map(|z| z.norm()), &quad.masses));
    if let (OperatorKind::Bergman, Some(exact)) = (kind, f.projection()) {
        let e = exact.build(&quad, cfg.seed)?;
        let err = l2(out.iter().zip(&e.values).map(|(a, b)| (a - b).norm()), &quad.masses);
        rec.info(&case, "|Tf - Pf|_2 against closed form", Some(depth), err);
    }
    if handle.is_assembled() {
        let free = match kind {
            OperatorKind::Bergman => handle.apply_matrix_free(&fv.values),
            OperatorKind::Positive => {
                let abs: Vec<Complex64> = fv.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
                handle.apply_matrix_free(&abs)
            }
        };
        let scale = out.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
        let diff = out
            .iter()
            .zip(&free)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        rec.at_most(&case, "assembled vs matrix-free", Some(depth), diff / scale, 1e-12);
    }
    Ok(rec.finish("proj-apply"))
}

/// `‖P⁺_ω‖` and the dyadic model norms on `L^p_ω(v)`, exact at `p = 2` and
/// lower bounds otherwise.
pub fn proj_norm(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 6)?;
    dense_budget(&quad)?;
    let depth = quad.depth;
    let v = cfg.weight.build(&quad)?;
    let sigma = dual_weight(&v, cfg.p)?;
    let left: Vec<f64> = v.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let right: Vec<f64> = sigma.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let norm_of = |op: &dyn crate::operators::SymmetricOperator| -> NormBracket {
        if cfg.p == 2.0 {
            weighted_norm_p2(op, &left, &right, true)
        } else {
            NormBracket {
                lower: lp_norm_lower(op, &left, &right, cfg.p, 16, cfg.seed),
                upper: None,
                iterations: 0,
            }
        }
    };
    let mut rec = Recorder::new();
    let case = cfg.weight.label();
    rec.info(&case, "B characteristic", Some(depth), bp_characteristic(&quad, &v, cfg.p, depth)?.value);
    let k = OperatorHandle::new(OperatorKind::Positive, &spec, &quad).abs_matrix();
    record_norm(&mut rec, &format!("{case} P+"), depth, &norm_of(&k));
    let psi = PsiProfile::new(spec);
    let weights = psi.level_weights(depth + 1);
    for beta in Beta::BOTH {
        let op = DyadicOp::new(&quad, beta, &weights, depth + 1);
        record_norm(&mut rec, &format!("{case} dyadic beta={}", beta.label()), depth, &norm_of(&op));
    }
    Ok(rec.finish("proj-norm"))
}

/// Range of `K_Ψ / (K⁰_Ψ + K^{1/2}_Ψ)` on node pairs and on random pairs.
pub fn proj_compare_dyadic(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 5)?;
    let depth = quad.depth;
    let psi = PsiProfile::new(spec);
    let mut rec = Recorder::new();
    let nodes = node_comparability(&psi, &quad, depth + 2);
    rec.at_least("node pairs", "c_low", Some(depth), nodes.c_low, f64::MIN_POSITIVE);
    rec.at_most("node pairs", "c_high", Some(depth), nodes.c_high, f64::MAX);
    let sampled = comparability_constants(&psi, cfg.samples_or(10_000), cfg.seed, depth)?;
    rec.at_least("random pairs", "c_low", Some(depth), sampled.c_low, f64::MIN_POSITIVE);
    rec.at_most("random pairs", "c_high", Some(depth), sampled.c_high, f64::MAX);
    Ok(rec.finish("proj-compare-dyadic"))
}

/// `B_{p,ω}(v)` per dyadic depth, with the witness square in the case
/// column, and `B_{1,ω}(v)` on the disc family.
pub fn weights_char(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let (_, quad) = setup(cfg, 8)?;
    let depth = quad.depth;
    let v = cfg.weight.build(&quad)?;
    let report = bp_characteristic(&quad, &v, cfg.p, depth)?;
    let mut rec = Recorder::new();
    let case = format!("{} witness {}", cfg.weight.label(), report.witness);
    for (l, value) in report.per_depth.iter().enumerate() {
        rec.at_least(&case, "B_p up to level", Some(l as u32), *value, 1.0 - 1e-12);
    }
    let b1 = b1_characteristic(&quad, &DiscFamily::build(&quad), &v)?;
    rec.at_least(&format!("{} witness {}", cfg.weight.label(), b1.witness), "B_1 on disc family", Some(depth), b1.value, 1.0 - 1e-12);
    Ok(rec.finish("weights-char"))
}

/// Weak-type ratios of the dyadic maximal functions and of `P_ω`, `P⁺_ω` in
/// `L¹_ω(v)` over random test functions.
pub fn weights_weak11(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 6)?;
    let depth = quad.depth;
    let v = cfg.weight.build(&quad)?;
    let handle = OperatorHandle::new(OperatorKind::Bergman, &spec, &quad);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut maximal, mut p, mut pp) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..cfg.samples_or(20) {
        let f = random_field(&quad, &mut rng, i);
        for beta in Beta::BOTH {
            maximal = maximal.max(weak11_maximal_check(&quad, &quad.masses, beta, &f, depth)?);
        }
        let r = weak11_projection_check(&handle, &quad, &v, &f)?;
        p = p.max(r.bergman);
        pp = pp.max(r.positive);
    }
    let mut rec = Recorder::new();
    let case = cfg.weight.label();
    rec.at_most(&case, "sup weak ratio dyadic maximal", Some(depth), maximal, 2.0 + 1e-10);
    rec.info(&case, "sup weak ratio P", Some(depth), p);
    rec.info(&case, "sup weak ratio P+", Some(depth), pp);
    Ok(rec.finish("weights-weak11"))
}

/// Decomposes `f` at height `λ` in both level-one regions; one row per
/// selected rectangle plus the weak-type ratios for the weight.
pub fn czd_run(cfg: &ExperimentConfig, lambda: f64, f: TestFunction) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 6)?;
    let depth = quad.depth;
    let fc = f.build(&quad, cfg.seed)?;
    let fv = Field {
        quad_id: quad.id,
        values: fc.values.iter().map(|z| z.norm()).collect(),
    };
    let v = cfg.weight.build(&quad)?;
    let b1 = b1_characteristic(&quad, &DiscFamily::build(&quad), &v)?.value;
    let handle = OperatorHandle::new(OperatorKind::Bergman, &spec, &quad);
    let mut rec = Recorder::new();
    for region in 1..=2 {
        let cz = cz_decompose(&quad, &fv, lambda, region)?;
        let case = format!("R{region}");
        for q in &cz.selected {
            let label = format!(
                "{case} [{:.6},{:.6})x[{:.6},+{:.6})",
                q.rect.r_lo, q.rect.r_hi, q.rect.arc.start, q.rect.arc.length
            );
            rec.at_least(&label, "average", Some(depth), q.average, lambda);
            rec.at_most(&label, "average / C lambda", Some(depth), q.average / (cz.parent_constant * lambda), 1.0 + 1e-12);
            rec.info(&label, "parent ratio", Some(depth), q.parent_ratio);
        }
        rec.at_most(&case, "omega(Omega) lambda / |f 1_R|_1", Some(depth), cz.exceptional_mass * lambda / cz.local_norm.max(f64::MIN_POSITIVE), 1.0 + 1e-12);
        rec.info(&case, "unresolved cells", Some(depth), cz.unresolved as f64);
        let w = cz_reconstruct_weak11_bound(&handle, &quad, &v, b1, &cz)?;
        rec.info(&case, "good part ratio", Some(depth), w.good_ratio);
        rec.info(&case, "bad tail ratio", Some(depth), w.bad_tail_ratio);
        rec.info(&case, "exceptional set ratio", Some(depth), w.exceptional_ratio);
    }
    Ok(rec.finish("czd-run"))
}

/// Testing constants against the norm for the sparse model with weights
/// `σ`, `u`; `tau_scale` multiplies the default coefficients.
pub fn twoweight_test(
    cfg: &ExperimentConfig,
    sigma: &WeightSpec,
    u: &WeightSpec,
    tau_scale: f64,
) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 6)?;
    dense_budget(&quad)?;
    let depth = quad.depth;
    let psi = PsiProfile::new(spec);
    let mu = quad.masses.clone();
    let tau: Vec<f64> = SparseOperator::default_tau(&quad, &mu, Beta::Zero, &psi, depth)
        .into_iter()
        .map(|t| t * tau_scale)
        .collect();
    let t = SparseOperator::new(&quad, mu, Beta::Zero, tau, depth)?;
    let (s, w) = (sigma.build(&quad)?, u.build(&quad)?);
    let r = testing_constants(&t, &quad, &s, &w, cfg.p, cfg.seed)?;
    let q = cfg.p / (cfg.p - 1.0);
    let mut rec = Recorder::new();
    rec.at_most(&format!("witness {}", r.witness), "C0^(1/p)", Some(depth), r.c0.powf(1.0 / cfg.p), r.norm.lower * (1.0 + 1e-8));
    rec.at_most(&format!("witness {}", r.witness_star), "C0*^(1/p')", Some(depth), r.c0_star.powf(1.0 / q), r.norm.lower * (1.0 + 1e-8));
    record_norm(&mut rec, "sparse operator", depth, &r.norm);
    rec.info("sparse operator", "norm / (C0^(1/p) + C0*^(1/p'))", Some(depth), r.c1);
    Ok(rec.finish("twoweight-test"))
}

/// `‖P⁺_ω‖` on `L^p_ω((1-|z|)^η)` against its `B_p` characteristic.
pub fn oneweight_norm(cfg: &ExperimentConfig, eta: f64) -> Result<SuiteReport> {
    let (spec, quad) = setup(cfg, 7)?;
    dense_budget(&quad)?;
    let depth = quad.depth;
    let v = WeightSpec::Power { eta }.build(&quad)?;
    let r = one_weight_norm_experiment(&spec, &quad, &v, cfg.p, cfg.seed)?;
    let mut rec = Recorder::new();
    let case = format!("eta={eta}");
    rec.at_least(&case, "B characteristic", Some(depth), r.b_characteristic, 1.0 - 1e-12);
    record_norm(&mut rec, &case, depth, &r.norm);
    rec.info(&case, "norm / B^max(1,1/(p-1))", Some(depth), r.ratio);
    Ok(rec.finish("oneweight-norm"))
}
