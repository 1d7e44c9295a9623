//! The two shifted dyadic grids on the circle. Angles are normalized to
//! `t = θ / 2π ∈ [0, 1)`, so arcs at level `ℓ` have length `2^{-ℓ}` and the
//! grid `D^β` is shifted by `β 2^{-ℓ}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ARC_EPS: f64 = 1e-12;

/// Deepest level representable without losing the index in an `f64` angle.
pub const MAX_LEVEL: u32 = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Beta {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1/2")]
    Half,
}

impl Beta {
    pub const BOTH: [Beta; 2] = [Beta::Zero, Beta::Half];

    pub fn value(self) -> f64 {
        match self {
            Beta::Zero => 0.0,
            Beta::Half => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Beta::Zero => "0",
            Beta::Half => "1/2",
        }
    }
}

/// Normalized angle of a point in `[0, 1)`; the origin maps to 0.
pub fn angle_of(z: Complex64) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    let t = z.arg() / std::f64::consts::TAU;
    let t = if t < 0.0 { t + 1.0 } else { t };
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Half-open arc `[start, start + length)` of the circle, in turns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Self {
        Self {
            start: start.rem_euclid(1.0),
            length,
        }
    }

    pub fn full() -> Self {
        Self {
            start: 0.0,
            length: 1.0,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.length >= 1.0 || (t - self.start).rem_euclid(1.0) < self.length
    }

    pub fn contains_arc(&self, other: &Arc) -> bool {
        if self.length >= 1.0 {
            return true;
        }
        let offset = (other.start - self.start).rem_euclid(1.0);
        let offset = if offset > 1.0 - ARC_EPS { 0.0 } else { offset };
        offset + other.length <= self.length + ARC_EPS
    }

    pub fn midpoint(&self) -> f64 {
        (self.start + 0.5 * self.length).rem_euclid(1.0)
    }

    pub fn halves(&self) -> [Arc; 2] {
        let h = 0.5 * self.length;
        [Arc::new(self.start, h), Arc::new(self.start + h, h)]
    }
}

/// `I^β_{ℓ,m}`: the arc `[(m + β) 2^{-ℓ}, (m + 1 + β) 2^{-ℓ})` mod 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub beta: Beta,
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn root(beta: Beta) -> Self {
        Self {
            beta,
            level: 0,
            index: 0,
        }
    }

    pub fn length(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn start(&self) -> f64 {
        ((self.index as f64 + self.beta.value()) * self.length()).rem_euclid(1.0)
    }

    pub fn arc(&self) -> Arc {
        Arc::new(self.start(), self.length())
    }

    /// Index of the level-`level` arc of `D^β` containing angle `t`.
    pub fn index_of(beta: Beta, level: u32, t: f64) -> u64 {
        let n = 1u64 << level;
        let x = t * n as f64 - beta.value();
        (x.floor() as i64).rem_euclid(n as i64) as u64
    }

    pub fn containing(beta: Beta, level: u32, t: f64) -> Self {
        Self {
            beta,
            level,
            index: Self::index_of(beta, level, t),
        }
    }

    /// Flat id `2^ℓ - 1 + m`, unique within one grid.
    pub fn id(&self) -> usize {
        (1usize << self.level) - 1 + self.index as usize
    }

    pub fn from_id(beta: Beta, id: usize) -> Self {
        let level = (usize::BITS - (id + 1).leading_zeros() - 1) as u32;
        Self {
            beta,
            level,
            index: (id + 1 - (1usize << level)) as u64,
        }
    }

    /// The arcs `2m` and `2m + 1` one level down. In `D^0` they split this
    /// arc; in `D^{1/2}` they are offset by a quarter of its length.
    pub fn children(&self) -> [Self; 2] {
        let c = |index| Self {
            beta: self.beta,
            level: self.level + 1,
            index,
        };
        [c(2 * self.index), c(2 * self.index + 1)]
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self {
            beta: self.beta,
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    pub fn contains_angle(&self, t: f64) -> bool {
        self.level == 0 || Self::index_of(self.beta, self.level, t) == self.index
    }

    /// Whether `z` lies in the Carleson square `S(I)`.
    pub fn square_contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= 1.0 - self.length() && r < 1.0 && self.contains_angle(angle_of(z))
    }

    pub fn label(&self) -> String {
        format!("b{}:l{}:m{}", self.beta.label(), self.level, self.index)
    }
}

/// Smallest `K ∈ D^0 ∪ D^{1/2}` containing `arc`, preferring `β = 0` on ties.
pub fn containing_dyadic(arc: &Arc) -> Result<DyadicInterval> {
    if arc.length > 0.25 {
        return Err(Error::ArcTooLong(arc.length));
    }
    let finest = if arc.length <= 0.0 {
        MAX_LEVEL
    } else {
        ((1.0 / arc.length).log2().floor() as u32).min(MAX_LEVEL)
    };
    for level in (0..=finest).rev() {
        for beta in Beta::BOTH {
            // Only the arc containing the start can contain the whole arc.
            let k = DyadicInterval::containing(beta, level, arc.start);
            if k.arc().contains_arc(arc) {
                return Ok(k);
            }
        }
    }
    Ok(DyadicInterval::root(Beta::Zero))
}

/// Smallest `I ∈ D^β` whose arc contains both arguments and whose length is
/// at least `max(1 - |z|, 1 - |ζ|)`; the root when either point is 0.
pub fn minimal_common_square(z: Complex64, zeta: Complex64, beta: Beta) -> DyadicInterval {
    let zero = Complex64::new(0.0, 0.0);
    if z == zero || zeta == zero {
        return DyadicInterval::root(beta);
    }
    let h = (1.0 - z.norm()).max(1.0 - zeta.norm());
    let top = if h >= 1.0 {
        0
    } else {
        ((1.0 / h).log2().floor() as u32).min(MAX_LEVEL)
    };
    let (tz, tw) = (angle_of(z), angle_of(zeta));
    for level in (0..=top).rev() {
        let a = DyadicInterval::containing(beta, level, tz);
        if a.contains_angle(tw) {
            return a;
        }
    }
    DyadicInterval::root(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in 0..200 {
            let i = DyadicInterval::from_id(Beta::Half, id);
            assert_eq!(i.id(), id);
            assert!(i.index < 1 << i.level);
        }
    }

    #[test]
    fn half_grid_arcs_wrap() {
        let i = DyadicInterval {
            beta: Beta::Half,
            level: 2,
            index: 3,
        };
        assert_eq!(i.start(), 0.875);
        assert!(i.contains_angle(0.95) && i.contains_angle(0.05) && !i.contains_angle(0.2));
    }

    #[test]
    fn containing_dyadic_of_dyadic_arc_is_itself() {
        let i = DyadicInterval {
            beta: Beta::Zero,
            level: 5,
            index: 7,
        };
        assert_eq!(containing_dyadic(&i.arc()).unwrap(), i);
        assert!(matches!(
            containing_dyadic(&Arc::new(0.0, 0.3)),
            Err(Error::ArcTooLong(_))
        ));
    }

    #[test]
    fn common_square_of_point_with_itself() {
        let z = Complex64::new(0.9, 0.0);
        let i = minimal_common_square(z, z, Beta::Zero);
        assert_eq!(i.level, 3);
        assert_eq!(i.index, 0);
        assert_eq!(minimal_common_square(Complex64::new(0.0, 0.0), z, Beta::Half).level, 0);
    }
}
