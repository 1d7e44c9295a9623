use num_complex::Complex64;

use super::grid::{angle_of, Arc, Beta, DyadicInterval};
use crate::error::{Error, Result};

/// `{r e^{iθ}: r_lo ≤ r < r_hi, θ/2π ∈ arc}`. A Carleson square is the case
/// `r_hi = 1`, `r_lo = max(0, 1 - |arc|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarRectangle {
    pub arc: Arc,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl PolarRectangle {
    pub fn new(arc: Arc, r_lo: f64, r_hi: f64) -> Result<Self> {
        if !(0.0 <= r_lo && r_lo < r_hi && r_hi <= 1.0) || !(arc.length > 0.0) {
            return Err(Error::Precondition(format!(
                "degenerate rectangle [{r_lo}, {r_hi}) x {arc:?}"
            )));
        }
        Ok(Self { arc, r_lo, r_hi })
    }

    pub fn carleson(arc: Arc) -> Self {
        Self {
            arc,
            r_lo: (1.0 - arc.length).max(0.0),
            r_hi: 1.0,
        }
    }

    pub fn is_carleson(&self) -> bool {
        self.r_hi >= 1.0
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_polar(z.norm(), angle_of(z))
    }

    pub fn contains_polar(&self, r: f64, t: f64) -> bool {
        r >= self.r_lo && r < self.r_hi && self.arc.contains(t)
    }

    /// Arc halves times radial halves. For a Carleson square over `I` this is
    /// `S(I_1)`, `S(I_2)` and the two halves of `T(I)`.
    pub fn cz_children(&self) -> [PolarRectangle; 4] {
        let [a1, a2] = self.arc.halves();
        if self.is_carleson() && self.r_lo > 0.0 {
            let split = 1.0 - 0.5 * (1.0 - self.r_lo);
            return [
                PolarRectangle::carleson(a1),
                PolarRectangle::carleson(a2),
                Self {
                    arc: a1,
                    r_lo: self.r_lo,
                    r_hi: split,
                },
                Self {
                    arc: a2,
                    r_lo: self.r_lo,
                    r_hi: split,
                },
            ];
        }
        let mid = 0.5 * (self.r_lo + self.r_hi);
        let mk = |arc, r_lo, r_hi| Self { arc, r_lo, r_hi };
        [
            mk(a1, mid, self.r_hi),
            mk(a2, mid, self.r_hi),
            mk(a1, self.r_lo, mid),
            mk(a2, self.r_lo, mid),
        ]
    }

    pub fn label(&self) -> String {
        format!(
            "t[{:.6},{:.6})r[{:.6},{:.6})",
            self.arc.start,
            self.arc.start + self.arc.length,
            self.r_lo,
            self.r_hi
        )
    }
}

/// `S(I)` for a dyadic or arbitrary arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarlesonSquare {
    pub arc: Arc,
    pub interval: Option<DyadicInterval>,
}

impl CarlesonSquare {
    pub fn dyadic(interval: DyadicInterval) -> Self {
        Self {
            arc: interval.arc(),
            interval: Some(interval),
        }
    }

    pub fn from_arc(arc: Arc) -> Self {
        Self {
            arc,
            interval: None,
        }
    }

    pub fn side_length(&self) -> f64 {
        self.arc.length.min(1.0)
    }

    pub fn radial_lo(&self) -> f64 {
        (1.0 - self.side_length()).max(0.0)
    }

    pub fn region(&self) -> PolarRectangle {
        PolarRectangle::carleson(self.arc)
    }

    /// `T(I)`: the band `[1 - |I|, 1 - |I|/2)` over `I`.
    pub fn top_half(&self) -> PolarRectangle {
        PolarRectangle {
            arc: self.arc,
            r_lo: self.radial_lo(),
            r_hi: 1.0 - 0.5 * self.side_length(),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.region().contains(z)
    }
}

/// `R_1` and `R_2`: the two level-one squares of `D^0`.
pub fn level_one_regions() -> [CarlesonSquare; 2] {
    let mk = |index| {
        CarlesonSquare::dyadic(DyadicInterval {
            beta: Beta::Zero,
            level: 1,
            index,
        })
    };
    [mk(0), mk(1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_of_half_circle_square() {
        let [r1, _] = level_one_regions();
        let kids = r1.region().cz_children();
        assert!(kids[0].is_carleson() && kids[1].is_carleson());
        assert_eq!(kids[0].r_lo, 0.75);
        assert_eq!((kids[2].r_lo, kids[2].r_hi), (0.5, 0.75));
        assert_eq!(kids[3].arc.start, 0.25);
    }

    #[test]
    fn top_half_band() {
        let s = CarlesonSquare::dyadic(DyadicInterval {
            beta: Beta::Half,
            level: 3,
            index: 2,
        });
        let t = s.top_half();
        assert_eq!((t.r_lo, t.r_hi), (0.875, 0.9375));
    }
}
