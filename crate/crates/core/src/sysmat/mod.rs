//! Model-based system matrices: assembly, coil stacking, filtering, files.

mod build;
mod hash;
mod io;
mod matrix;

pub use build::{build_system_matrix, kernel, stack_coils, uniform_rate, BuildOptions, DEFAULT_NNZ_CAP};
pub use hash::{system_matrix_hash, ConfigHasher};
pub use io::{load_system_matrix, read_system_matrix, save_system_matrix, write_system_matrix};
pub use matrix::{apply_highpass_rows, FilteredOperator, RowBlock, SystemMatrix};
