//! Weights on the disk, Bekollé–Bonami type characteristics, the dyadic and
//! disc maximal functions, and weak-type checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::{Beta, DiscFamily, DiskQuadrature, DyadicInterval, Field};
use crate::error::{Error, Result};
use crate::operators::{apply_bergman, apply_positive, OperatorHandle};

/// A positive weight sampled at the nodes of one quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    pub name: String,
    pub field: Field<f64>,
}

impl WeightField {
    pub fn new(name: impl Into<String>, field: Field<f64>) -> Result<Self> {
        if field.values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Precondition("weights must be positive and finite".into()));
        }
        Ok(Self {
            name: name.into(),
            field,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.field.values
    }

    /// `c · v`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let values = self.field.values.iter().map(|v| c * v).collect();
        Self::new(
            format!("{c}*{}", self.name),
            Field {
                quad_id: self.field.quad_id,
                values,
            },
        )
    }
}

/// Weight families available from configuration, all in terms of `1 - |z|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `(1 - |z|)^η`.
    Power { eta: f64 },
    /// `(1 - |z|)^η (1 + log(1/(1 - |z|)))^κ`.
    LogPower { eta: f64, kappa: f64 },
    /// `(1 - |z|)^η (1 + h exp(-(d/w)^2))` with `d` the angular distance (in
    /// turns) from `center`.
    Bump {
        eta: f64,
        center: f64,
        width: f64,
        height: f64,
    },
    /// One value per cell.
    Table { values: Vec<f64> },
}

impl WeightSpec {
    pub fn label(&self) -> String {
        match self {
            WeightSpec::Power { eta } => format!("power({eta})"),
            WeightSpec::LogPower { eta, kappa } => format!("log-power({eta},{kappa})"),
            WeightSpec::Bump {
                eta,
                center,
                width,
                height,
            } => format!("bump({eta},{center},{width},{height})"),
            WeightSpec::Table { values } => format!("table({})", values.len()),
        }
    }

    pub fn build(&self, quad: &DiskQuadrature) -> Result<WeightField> {
        let field = match self {
            WeightSpec::Power { eta } => Field::from_fn(quad, |c| (1.0 - c.r_node).powf(*eta)),
            WeightSpec::LogPower { eta, kappa } => Field::from_fn(quad, |c| {
                let h = 1.0 - c.r_node;
                h.powf(*eta) * (1.0 - h.ln()).powf(*kappa)
            }),
            WeightSpec::Bump {
                eta,
                center,
                width,
                height,
            } => Field::from_fn(quad, |c| {
                let d = (c.t_node - center).rem_euclid(1.0);
                let d = d.min(1.0 - d);
                (1.0 - c.r_node).powf(*eta) * (1.0 + height * (-(d / width).powi(2)).exp())
            }),
            WeightSpec::Table { values } => {
                if values.len() != quad.len() {
                    return Err(Error::QuadratureMismatch);
                }
                Field {
                    quad_id: quad.id,
                    values: values.clone(),
                }
            }
        };
        WeightField::new(self.label(), field)
    }
}

impl std::str::FromStr for WeightSpec {
    type Err = Error;

    /// An inline TOML table such as `{ kind = "power", eta = 0.5 }`.
    fn from_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wrap {
            w: WeightSpec,
        }
        toml::from_str::<Wrap>(&format!("w = {text}"))
            .map(|w| w.w)
            .map_err(|e| Error::Config(format!("weight `{text}`: {e}")))
    }
}

/// `σ = v^{1 - p'}`.
pub fn dual_weight(v: &WeightField, p: f64) -> Result<WeightField> {
    check_exponent(p)?;
    let e = 1.0 - p / (p - 1.0);
    WeightField::new(
        format!("dual({},{p})", v.name),
        Field {
            quad_id: v.field.quad_id,
            values: v.values().iter().map(|x| x.powf(e)).collect(),
        },
    )
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("exponent p = {p} outside (1, inf)")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicReport {
    pub value: f64,
    pub witness: String,
    pub depth: u32,
    /// Entry `ℓ` is the supremum over squares (or nodes) of level (band) ≤ `ℓ`.
    pub per_depth: Vec<f64>,
    /// Squares skipped for having zero mass.
    pub skipped: usize,
}

/// `sup_S [(vω)(S)/ω(S)] [(v^{-p'/p}ω)(S)/ω(S)]^{p/p'}` over the Carleson
/// squares of both grids with level ≤ `depth`.
pub fn bp_characteristic(
    quad: &DiskQuadrature,
    v: &WeightField,
    p: f64,
    depth: u32,
) -> Result<CharacteristicReport> {
    bp_with_masses(quad, &quad.masses, v, p, depth)
}

/// The classical `B_{p,α}` over the same squares, with cell masses of
/// `dA_α = (α + 1)(1 - |z|²)^α dA` computed in closed form.
pub fn classical_bp_characteristic(
    quad: &DiskQuadrature,
    v: &WeightField,
    p: f64,
    alpha: f64,
    depth: u32,
) -> Result<CharacteristicReport> {
    if alpha <= -1.0 {
        return Err(Error::Precondition(format!("alpha = {alpha} must exceed -1")));
    }
    let masses: Vec<f64> = quad
        .cells
        .iter()
        .map(|c| {
            let e = alpha + 1.0;
            ((1.0 - c.r_lo * c.r_lo).powf(e) - (1.0 - c.r_hi * c.r_hi).powf(e)) * c.t_len
        })
        .collect();
    bp_with_masses(quad, &masses, v, p, depth)
}

fn bp_with_masses(
    quad: &DiskQuadrature,
    masses: &[f64],
    v: &WeightField,
    p: f64,
    depth: u32,
) -> Result<CharacteristicReport> {
    check_exponent(p)?;
    quad.check(&v.field)?;
    let depth = depth.min(quad.depth);
    let q = p / (p - 1.0);
    let vm: Vec<f64> = v.values().iter().zip(masses).map(|(x, m)| x * m).collect();
    let sm: Vec<f64> = v
        .values()
        .iter()
        .zip(masses)
        .map(|(x, m)| x.powf(-q / p) * m)
        .collect();
    let mut per_level = vec![(0.0f64, String::new()); depth as usize + 1];
    let mut skipped = 0;
    for beta in Beta::BOTH {
        let w = quad.square_sums(masses, beta, depth);
        let a = quad.square_sums(&vm, beta, depth);
        let b = quad.square_sums(&sm, beta, depth);
        for id in 0..w.len() {
            if w[id] <= 0.0 {
                skipped += 1;
                continue;
            }
            let value = (a[id] / w[id]) * (b[id] / w[id]).powf(p / q);
            let sq = DyadicInterval::from_id(beta, id);
            let slot = &mut per_level[sq.level as usize];
            if value > slot.0 {
                *slot = (value, sq.label());
            }
        }
    }
    Ok(running_max(per_level, depth, skipped))
}

fn running_max(per_level: Vec<(f64, String)>, depth: u32, skipped: usize) -> CharacteristicReport {
    let mut best = (0.0f64, String::new());
    let mut per_depth = Vec::with_capacity(per_level.len());
    for (v, w) in per_level {
        if v > best.0 {
            best = (v, w);
        }
        per_depth.push(best.0);
    }
    CharacteristicReport {
        value: best.0,
        witness: best.1,
        depth,
        per_depth,
        skipped,
    }
}

/// `M_ω f(z_i) = max` over family discs containing `z_i` of the
/// `(ω⊗m)`-average of `|f|` on the disc.
pub fn disc_maximal(quad: &DiskQuadrature, family: &DiscFamily, f: &Field<f64>) -> Result<Field<f64>> {
    quad.check(f)?;
    if family.quad_id != quad.id {
        return Err(Error::QuadratureMismatch);
    }
    let mut out = vec![0.0f64; quad.len()];
    for members in &family.members {
        let (s, w) = members.iter().fold((0.0, 0.0), |(s, w), &i| {
            let i = i as usize;
            (s + f.values[i].abs() * quad.masses[i], w + quad.masses[i])
        });
        if w <= 0.0 {
            continue;
        }
        let avg = s / w;
        for &i in members {
            let o = &mut out[i as usize];
            *o = o.max(avg);
        }
    }
    Ok(Field {
        quad_id: quad.id,
        values: out,
    })
}

/// `max_i M_ω(v)(z_i) / v(z_i)` on the disc family; per-depth entries are
/// maxima over bands `≤ j`.
pub fn b1_characteristic(
    quad: &DiskQuadrature,
    family: &DiscFamily,
    v: &WeightField,
) -> Result<CharacteristicReport> {
    let m = disc_maximal(quad, family, &v.field)?;
    let mut per_level = vec![(0.0f64, String::new()); quad.depth as usize + 1];
    for (i, cell) in quad.cells.iter().enumerate() {
        if quad.masses[i] <= 0.0 {
            continue;
        }
        let r = m.values[i] / v.values()[i];
        let slot = &mut per_level[cell.band as usize];
        if r > slot.0 {
            *slot = (r, format!("cell{i}"));
        }
    }
    Ok(running_max(per_level, quad.depth, 0))
}

/// `M_{ν,D^β} f(z_i) = max_{S(I) ∋ z_i} ν(S)^{-1} Σ_S |f| ν`, over levels
/// `≤ l_max`; squares of zero `ν`-mass are ignored.
pub fn dyadic_maximal(
    quad: &DiskQuadrature,
    nu: &[f64],
    beta: Beta,
    f: &Field<f64>,
    l_max: u32,
) -> Result<Field<f64>> {
    quad.check(f)?;
    if nu.len() != quad.len() {
        return Err(Error::QuadratureMismatch);
    }
    let l_max = l_max.min(quad.depth);
    let fm: Vec<f64> = f.values.iter().zip(nu).map(|(x, w)| x.abs() * w).collect();
    let s = quad.square_sums(&fm, beta, l_max);
    let w = quad.square_sums(nu, beta, l_max);
    let values = (0..quad.len())
        .map(|i| {
            quad.squares_containing(i, beta, l_max)
                .into_iter()
                .filter(|&id| w[id] > 0.0)
                .map(|id| s[id] / w[id])
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(Field {
        quad_id: quad.id,
        values,
    })
}

/// `sup_λ λ · μ({|g| > λ})`, attained as `λ` increases to a value of `|g|`.
pub fn weak_type_sup(values: &[f64], measure: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .zip(measure)
        .map(|(v, m)| (v.abs(), *m))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    let mut k = 0;
    while k < pairs.len() {
        let level = pairs[k].0;
        while k < pairs.len() && pairs[k].0 == level {
            acc += pairs[k].1;
            k += 1;
        }
        best = best.max(level * acc);
    }
    best
}

/// `sup_λ λ ν({M_{ν,D^β} f > λ}) / ‖f‖_{L¹_ν}`.
pub fn weak11_maximal_check(
    quad: &DiskQuadrature,
    nu: &[f64],
    beta: Beta,
    f: &Field<f64>,
    l_max: u32,
) -> Result<f64> {
    let m = dyadic_maximal(quad, nu, beta, f, l_max)?;
    let norm: f64 = f.values.iter().zip(nu).map(|(x, w)| x.abs() * w).sum();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(weak_type_sup(&m.values, nu) / norm)
}

/// Weak-type ratios `sup_λ λ (vω)({|Tf| > λ}) / ‖f‖_{L¹_ω(v)}` for
/// `T = P_ω` and `T = P⁺_ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weak11Ratios {
    pub bergman: f64,
    pub positive: f64,
}

pub fn weak11_projection_check(
    handle: &OperatorHandle,
    quad: &DiskQuadrature,
    v: &WeightField,
    f: &Field<f64>,
) -> Result<Weak11Ratios> {
    quad.check(f)?;
    quad.check(&v.field)?;
    let vm: Vec<f64> = v.values().iter().zip(&quad.masses).map(|(a, b)| a * b).collect();
    let norm: f64 = f.values.iter().zip(&vm).map(|(x, w)| x.abs() * w).sum();
    if norm == 0.0 {
        return Ok(Weak11Ratios {
            bergman: 0.0,
            positive: 0.0,
        });
    }
    let fc = Field {
        quad_id: f.quad_id,
        values: f.values.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    let pf: Vec<f64> = apply_bergman(handle, &fc)?
        .values
        .iter()
        .map(|z| z.norm())
        .collect();
    let abs_f = Field {
        quad_id: f.quad_id,
        values: f.values.iter().map(|x| x.abs()).collect(),
    };
    let pp = apply_positive(handle, &abs_f)?;
    Ok(Weak11Ratios {
        bergman: weak_type_sup(&pf, &vm) / norm,
        positive: weak_type_sup(&pp.values, &vm) / norm,
    })
}
