//! Calderón–Zygmund decomposition over the level-one Carleson squares.

use num_complex::Complex64;

use crate::disk::{level_one_regions, DiskQuadrature, Field, PolarRectangle};
use crate::error::{Error, Result};
use crate::operators::{apply_bergman, OperatorHandle};
use crate::weights::WeightField;

/// Rectangles are split at most this many times.
const MAX_SPLITS: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SelectedRectangle {
    pub rect: PolarRectangle,
    pub cells: Vec<usize>,
    pub mass: f64,
    /// `(ω⊗m)`-average of `|f|`.
    pub average: f64,
    /// `ω(parent) / ω(Q)`, or `1 / ω(R)` when the region itself is selected.
    pub parent_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CZDecomposition {
    /// 1 or 2.
    pub region: usize,
    pub lambda: f64,
    pub selected: Vec<SelectedRectangle>,
    /// Cells of `R` outside every selected rectangle.
    pub good_cells: Vec<usize>,
    pub g: Field<f64>,
    pub b: Field<f64>,
    pub parent_constant: f64,
    /// `ω(Ω)`.
    pub exceptional_mass: f64,
    /// `‖f 1_R‖_{L¹_ω}`.
    pub local_norm: f64,
    /// Cells of `F` with `|f| > λ`.
    pub unresolved: usize,
}

/// Greedy top-down selection in `R_region`: a rectangle is selected when the
/// average of `|f|` on it is at least `λ`, otherwise its nonempty children
/// are examined. Requires `λ > ‖f‖_{L¹_ω}`.
pub fn cz_decompose(
    quad: &DiskQuadrature,
    f: &Field<f64>,
    lambda: f64,
    region: usize,
) -> Result<CZDecomposition> {
    quad.check(f)?;
    if !(1..=2).contains(&region) {
        return Err(Error::Precondition(format!("region {region} is not 1 or 2")));
    }
    let norm: f64 = f.values.iter().zip(&quad.masses).map(|(v, m)| v.abs() * m).sum();
    if !(lambda > norm) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} must exceed the L1 norm {norm}"
        )));
    }
    let rect = level_one_regions()[region - 1].region();
    let cells: Vec<usize> = (0..quad.len())
        .filter(|&i| quad.masses[i] > 0.0 && rect.contains(quad.cells[i].node))
        .collect();
    let mass_of = |cs: &[usize]| cs.iter().map(|&i| quad.masses[i]).sum::<f64>();
    let integral = |cs: &[usize]| cs.iter().map(|&i| f.values[i].abs() * quad.masses[i]).sum::<f64>();

    let region_mass = mass_of(&cells);
    let mut selected = Vec::new();
    let mut stack = vec![(rect, cells.clone(), 1.0 / region_mass.max(f64::MIN_POSITIVE), 0u32)];
    while let Some((r, cs, parent_ratio, splits)) = stack.pop() {
        let mass = mass_of(&cs);
        let average = integral(&cs) / mass;
        if average >= lambda {
            selected.push(SelectedRectangle {
                rect: r,
                cells: cs,
                mass,
                average,
                parent_ratio,
            });
            continue;
        }
        if cs.len() <= 1 || splits >= MAX_SPLITS {
            continue;
        }
        // Reverse so that children are visited in their natural order.
        for child in r.cz_children().into_iter().rev() {
            let sub: Vec<usize> = cs
                .iter()
                .copied()
                .filter(|&i| child.contains(quad.cells[i].node))
                .collect();
            let m = mass_of(&sub);
            if m > 0.0 {
                stack.push((child, sub, mass / m, splits + 1));
            }
        }
    }

    let mut g = vec![0.0; quad.len()];
    let mut b = vec![0.0; quad.len()];
    let mut in_omega = vec![false; quad.len()];
    for q in &selected {
        let avg = q.cells.iter().map(|&i| f.values[i] * quad.masses[i]).sum::<f64>() / q.mass;
        for &i in &q.cells {
            in_omega[i] = true;
            g[i] = avg;
            b[i] = f.values[i] - avg;
        }
    }
    let good_cells: Vec<usize> = cells.iter().copied().filter(|&i| !in_omega[i]).collect();
    for &i in &good_cells {
        g[i] = f.values[i];
    }
    let unresolved = good_cells
        .iter()
        .filter(|&&i| f.values[i].abs() > lambda)
        .count();
    Ok(CZDecomposition {
        region,
        lambda,
        parent_constant: selected.iter().map(|q| q.parent_ratio).fold(1.0, f64::max),
        exceptional_mass: selected.iter().map(|q| q.mass).sum(),
        local_norm: integral(&cells),
        selected,
        good_cells,
        g: Field {
            quad_id: quad.id,
            values: g,
        },
        b: Field {
            quad_id: quad.id,
            values: b,
        },
        unresolved,
    })
}

/// Center and diameter of a polar rectangle.
fn center_and_diameter(r: &PolarRectangle) -> (Complex64, f64) {
    let t = r.arc.midpoint();
    let c = Complex64::from_polar(0.5 * (r.r_lo + r.r_hi), std::f64::consts::TAU * t);
    let chord = 2.0 * r.r_hi * (std::f64::consts::PI * r.arc.length.min(0.5)).sin();
    let d = if r.arc.length > 0.5 { 2.0 * r.r_hi } else { chord };
    (c, (r.r_hi - r.r_lo).hypot(d))
}

/// Ratios of the quantities in the weak-type argument built on the
/// decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzWeakReport {
    /// `‖g‖²_{L²_ω(v)} / (λ B₁ ‖f 1_R‖_{L¹_ω(v)})`.
    pub good_ratio: f64,
    /// `∫_{D∖Ω'} |P_ω b| v dω / (B₁² ‖f 1_R‖_{L¹_ω(v)})`.
    pub bad_tail_ratio: f64,
    /// `(vω)(Ω') / (‖f 1_R‖_{L¹_ω(v)} / λ)`.
    pub exceptional_ratio: f64,
}

/// `b1` is the measured `B_{1,ω}(v)`.
pub fn cz_reconstruct_weak11_bound(
    handle: &OperatorHandle,
    quad: &DiskQuadrature,
    v: &WeightField,
    b1: f64,
    cz: &CZDecomposition,
) -> Result<CzWeakReport> {
    quad.check(&v.field)?;
    quad.check(&cz.g)?;
    let vm: Vec<f64> = v.values().iter().zip(&quad.masses).map(|(a, m)| a * m).collect();
    let in_r: Vec<usize> = cz
        .good_cells
        .iter()
        .copied()
        .chain(cz.selected.iter().flat_map(|q| q.cells.iter().copied()))
        .collect();
    let f_local: f64 = in_r
        .iter()
        .map(|&i| (cz.g.values[i] + cz.b.values[i]).abs() * vm[i])
        .sum();
    if f_local == 0.0 {
        return Ok(CzWeakReport {
            good_ratio: 0.0,
            bad_tail_ratio: 0.0,
            exceptional_ratio: 0.0,
        });
    }
    let g2: f64 = cz.g.values.iter().zip(&vm).map(|(g, w)| g * g * w).sum();
    let mut near = vec![false; quad.len()];
    for q in &cz.selected {
        let (c, d) = center_and_diameter(&q.rect);
        for (i, cell) in quad.cells.iter().enumerate() {
            if (cell.node - c).norm() <= 2.0 * d {
                near[i] = true;
            }
        }
    }
    let bc = Field {
        quad_id: quad.id,
        values: cz.b.values.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    let pb = apply_bergman(handle, &bc)?;
    let tail: f64 = (0..quad.len())
        .filter(|&i| !near[i])
        .map(|i| pb.values[i].norm() * vm[i])
        .sum();
    let exceptional: f64 = (0..quad.len()).filter(|&i| near[i]).map(|i| vm[i]).sum();
    Ok(CzWeakReport {
        good_ratio: g2 / (cz.lambda * b1 * f_local),
        bad_tail_ratio: tail / (b1 * b1 * f_local),
        exceptional_ratio: exceptional * cz.lambda / f_local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::build_quadrature;
    use crate::measures::RadialMeasure;

    #[test]
    fn small_constant_selects_nothing() {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 4, 0).unwrap();
        let f = Field::constant(&q, 0.5);
        let cz = cz_decompose(&q, &f, 1.0, 1).unwrap();
        assert!(cz.selected.is_empty());
        assert!(cz.b.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lambda_below_norm_is_rejected() {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 2, 0).unwrap();
        let f = Field::constant(&q, 2.0);
        assert!(matches!(cz_decompose(&q, &f, 1.0, 1), Err(Error::Precondition(_))));
    }
}
