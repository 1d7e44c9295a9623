//! Dyadic grids on the circle, Carleson squares and polar rectangles, disc
//! families, and the polar quadrature of the disk.

mod discs;
mod geometry;
mod grid;
mod quadrature;

pub use discs::{disc_family, Disc, DiscFamily, RADIUS_FACTORS};
pub use geometry::{level_one_regions, CarlesonSquare, PolarRectangle};
pub use grid::{
    angle_of, containing_dyadic, minimal_common_square, Arc, Beta, DyadicInterval, MAX_LEVEL,
};
pub use quadrature::{
    build_quadrature, cell_count, Cell, DiskQuadrature, Field, CELL_BUDGET, MAX_DEPTH,
};
