//! Pixel-basis concentrations, the disc phantom and line profiles.

mod disc;
mod grid;
mod io;
mod profile;

pub use disc::{build_disc_phantom, build_disc_phantom_with_ring, rasterize_discs, ring_layout, validate_discs, Disc};
pub use grid::{ConcentrationGrid, GridSpec, Quadrature};
pub use io::{load_grid, read_grid, save_grid, save_pgm, write_grid, write_pgm, write_profile_csv};
pub use profile::{line_profile, ProfileAxis};
