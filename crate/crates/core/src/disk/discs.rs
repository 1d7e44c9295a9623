//! Finite disc families standing in for the supremum over all discs in the
//! weighted maximal function.

use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::DiskQuadrature;

/// Multiples of `1 - |a|` used for node-centered discs.
pub const RADIUS_FACTORS: [f64; 4] = [1.0, std::f64::consts::SQRT_2, 2.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// Cells whose nodes lie in `D(a, r)`.
pub fn disc_family(quad: &DiskQuadrature, a: Complex64, r: f64) -> Vec<usize> {
    let d = Disc {
        center: a,
        radius: r,
    };
    quad.nodes()
        .enumerate()
        .filter(|(_, z)| d.contains(*z))
        .map(|(i, _)| i)
        .collect()
}

/// Discs together with their member cells.
#[derive(Clone, Debug)]
pub struct DiscFamily {
    pub quad_id: u64,
    pub discs: Vec<Disc>,
    pub members: Vec<Vec<u32>>,
}

impl DiscFamily {
    /// `D(a, k(1 - |a|))` for every node `a` and `k` in [`RADIUS_FACTORS`],
    /// boundary-centered discs of radius `2^{-ℓ}` for `ℓ = 1..=J+1`, and
    /// `D(0, 2)`.
    pub fn build(quad: &DiskQuadrature) -> Self {
        let mut discs = Vec::new();
        for c in &quad.cells {
            for k in RADIUS_FACTORS {
                discs.push(Disc {
                    center: c.node,
                    radius: k * (1.0 - c.r_node),
                });
            }
        }
        for level in 1..=quad.depth + 1 {
            let radius = 0.5f64.powi(level as i32);
            let count = 1usize << (level + 2);
            for m in 0..count {
                discs.push(Disc {
                    center: Complex64::from_polar(
                        1.0,
                        std::f64::consts::TAU * m as f64 / count as f64,
                    ),
                    radius,
                });
            }
        }
        discs.push(Disc {
            center: Complex64::new(0.0, 0.0),
            radius: 2.0,
        });
        let nodes: Vec<Complex64> = quad.nodes().collect();
        let members = discs
            .par_iter()
            .map(|d| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| d.contains(**z))
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect();
        Self {
            quad_id: quad.id,
            discs,
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }
}
