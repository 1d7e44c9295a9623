//! Polar cell decomposition of the truncated disk `{r < 1 - 2^{-J-1}}`.
//!
//! Layout: the core `{r < 1/2}` is four rings of width 1/8 (8 sectors in the
//! innermost, 32 in the others). Band `j = 1..J` is
//! `[1 - 2^{-j}, 1 - 2^{-j-1})`, split radially into two sub-bands and
//! angularly into `2^{max(j + j0, 5)}` arcs. Cell masses are
//! `[∫_band r dω] · Δθ / π`, so Lebesgue `ω` gives normalized area.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use super::grid::{Beta, DyadicInterval};
use crate::error::{Error, Result};
use crate::measures::RadialMeasure;

pub const CELL_BUDGET: usize = 1 << 20;
pub const MAX_DEPTH: u32 = 12;

const CORE_RINGS: usize = 4;
const MIN_ANGULAR_LOG2: u32 = 5;
const RADIAL_LOG2: u32 = 1;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Normalized angular start and width.
    pub t_lo: f64,
    pub t_len: f64,
    /// 0 for the core, otherwise the band index `j`.
    pub band: u32,
    pub r_node: f64,
    pub t_node: f64,
    pub node: Complex64,
}

#[derive(Clone, Debug)]
pub struct DiskQuadrature {
    pub id: u64,
    pub depth: u32,
    pub j0: u32,
    pub omega: RadialMeasure,
    pub cells: Vec<Cell>,
    pub masses: Vec<f64>,
}

/// Values at cell nodes of one quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T = f64> {
    pub quad_id: u64,
    pub values: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn from_fn(quad: &DiskQuadrature, f: impl Fn(&Cell) -> T) -> Self {
        Self {
            quad_id: quad.id,
            values: quad.cells.iter().map(f).collect(),
        }
    }

    pub fn constant(quad: &DiskQuadrature, v: T) -> Self {
        Self {
            quad_id: quad.id,
            values: vec![v; quad.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn cell_count(depth: u32, j0: u32) -> usize {
    let core = 8 + 32 * (CORE_RINGS - 1);
    let bands: usize = (1..=depth)
        .map(|j| (1usize << (j + j0).max(MIN_ANGULAR_LOG2)) << RADIAL_LOG2)
        .sum();
    core + bands
}

pub fn build_quadrature(omega: &RadialMeasure, depth: u32, j0: u32) -> Result<DiskQuadrature> {
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(Error::Precondition(format!(
            "depth J = {depth} outside 1..={MAX_DEPTH}"
        )));
    }
    if j0 > 20 {
        return Err(Error::BudgetExceeded {
            cells: usize::MAX,
            limit: CELL_BUDGET,
        });
    }
    let count = cell_count(depth, j0);
    if count > CELL_BUDGET {
        return Err(Error::BudgetExceeded {
            cells: count,
            limit: CELL_BUDGET,
        });
    }
    let mut cells = Vec::with_capacity(count);
    let mut masses = Vec::with_capacity(count);
    let mut push_ring = |r_lo: f64, r_hi: f64, band: u32, sectors: usize| {
        let radial = omega.radial_band_mass(r_lo, r_hi);
        let t_len = 1.0 / sectors as f64;
        // Δθ/π = 2 t_len.
        let mass = radial * 2.0 * t_len;
        let r_node = 0.5 * (r_lo + r_hi);
        for k in 0..sectors {
            let t_lo = k as f64 * t_len;
            let t_node = t_lo + 0.5 * t_len;
            cells.push(Cell {
                r_lo,
                r_hi,
                t_lo,
                t_len,
                band,
                r_node,
                t_node,
                node: Complex64::from_polar(r_node, std::f64::consts::TAU * t_node),
            });
            masses.push(mass);
        }
    };
    for ring in 0..CORE_RINGS {
        let r_lo = ring as f64 / (2 * CORE_RINGS) as f64;
        let r_hi = (ring + 1) as f64 / (2 * CORE_RINGS) as f64;
        push_ring(r_lo, r_hi, 0, if ring == 0 { 8 } else { 32 });
    }
    for j in 1..=depth {
        let lo = 1.0 - 0.5f64.powi(j as i32);
        let width = 0.5f64.powi(j as i32 + 1);
        let sub = 1usize << RADIAL_LOG2;
        let sectors = 1usize << (j + j0).max(MIN_ANGULAR_LOG2);
        for s in 0..sub {
            let r_lo = lo + width * s as f64 / sub as f64;
            let r_hi = lo + width * (s + 1) as f64 / sub as f64;
            push_ring(r_lo, r_hi, j, sectors);
        }
    }
    Ok(DiskQuadrature {
        id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        depth,
        j0,
        omega: omega.clone(),
        cells,
        masses,
    })
}

impl DiskQuadrature {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.cells.iter().map(|c| c.node)
    }

    /// Outer radius of the truncated disk.
    pub fn outer_radius(&self) -> f64 {
        1.0 - 0.5f64.powi(self.depth as i32 + 1)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn check<T>(&self, field: &Field<T>) -> Result<()> {
        if field.quad_id != self.id || field.values.len() != self.len() {
            return Err(Error::QuadratureMismatch);
        }
        Ok(())
    }

    /// Id of the level-`level` square of `D^β` containing cell `i`, if any.
    pub fn square_of(&self, i: usize, beta: Beta, level: u32) -> Option<usize> {
        let c = &self.cells[i];
        (c.band >= level).then(|| DyadicInterval::containing(beta, level, c.t_node).id())
    }

    /// Number of square ids for levels `0..=l_max`.
    pub fn square_slots(l_max: u32) -> usize {
        (1usize << (l_max + 1)) - 1
    }

    /// `Σ_{i ∈ S} values[i]` for every square of `D^β` with level ≤ `l_max`.
    pub fn square_sums(&self, values: &[f64], beta: Beta, l_max: u32) -> Vec<f64> {
        let mut out = vec![0.0; Self::square_slots(l_max)];
        for (i, v) in values.iter().enumerate() {
            let top = self.cells[i].band.min(l_max);
            for level in 0..=top {
                out[DyadicInterval::containing(beta, level, self.cells[i].t_node).id()] += v;
            }
        }
        out
    }

    /// Ids of all squares of `D^β` (level ≤ `l_max`) containing cell `i`,
    /// ordered by level.
    pub fn squares_containing(&self, i: usize, beta: Beta, l_max: u32) -> Vec<usize> {
        let c = &self.cells[i];
        (0..=c.band.min(l_max))
            .map(|level| DyadicInterval::containing(beta, level, c.t_node).id())
            .collect()
    }

    /// CSV rows: id, r_lo, r_hi, t_lo, t_hi, node_re, node_im, mass.
    pub fn cell_table(&self) -> Vec<[String; 8]> {
        self.cells
            .iter()
            .zip(&self.masses)
            .enumerate()
            .map(|(i, (c, m))| {
                [
                    i.to_string(),
                    format!("{:.12}", c.r_lo),
                    format!("{:.12}", c.r_hi),
                    format!("{:.12}", c.t_lo),
                    format!("{:.12}", c.t_lo + c.t_len),
                    format!("{:.12}", c.node.re),
                    format!("{:.12}", c.node.im),
                    format!("{:.15e}", m),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_total_mass_j1() {
        let q = build_quadrature(&RadialMeasure::lebesgue(), 1, 0).unwrap();
        assert!((q.total_mass() - 9.0 / 16.0).abs() < 1e-14);
        assert_eq!(q.len(), cell_count(1, 0));
    }

    #[test]
    fn atom_lands_in_one_ring() {
        let q = build_quadrature(&RadialMeasure::atom(0.6, 1.0), 2, 1).unwrap();
        for (c, m) in q.cells.iter().zip(&q.masses) {
            assert_eq!(*m > 0.0, c.r_lo <= 0.6 && 0.6 < c.r_hi);
        }
        assert!((q.total_mass() - 2.0 * 0.6).abs() < 1e-14);
    }

    #[test]
    fn depth_and_budget_checks() {
        let w = RadialMeasure::lebesgue();
        assert!(build_quadrature(&w, 0, 1).is_err());
        assert!(matches!(
            build_quadrature(&w, 12, 12),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
