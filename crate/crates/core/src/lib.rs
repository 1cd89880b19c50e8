//! Field-free-line magnetic particle imaging with spherical-harmonic field
//! models.
//!
//! The crate covers the whole chain from field description to image:
//!
//! * [`fields`]: harmonic expansions, ideal FFP/FFL topologies, perturbed
//!   "realistic" fields, low-field volumes.
//! * [`magnetization`]: Langevin model and piecewise-constant approximations
//!   of `m̄′` with node selection.
//! * [`phantom`]: pixel grids, the disc phantom, profiles and image I/O.
//! * [`forward`]: general, parallel-field and piecewise signal simulators,
//!   high-pass filtering and noise.
//! * [`sysmat`]: sparse system-matrix assembly and persistence.
//! * [`recon`]: LSQR and error metrics.
//! * [`fbp`]: Radon transform, sinogram extraction and filtered back projection.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`). The aliases below
//! fix the scalar to `f64`, which is what the tolerances in the tests assume.

pub mod error;
pub mod fbp;
pub mod fields;
pub mod forward;
pub mod magnetization;
pub mod phantom;
pub mod recon;
pub mod scalar;
pub mod sysmat;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::{mu0, Real};
pub use vec3::Vec3;

pub type Vector3 = vec3::Vec3<f64>;
pub type Field = fields::FieldModel<f64>;
pub type Grid = phantom::ConcentrationGrid<f64>;
pub type GridSpec = phantom::GridSpec<f64>;
pub type Langevin = magnetization::LangevinParams<f64>;
pub type Approx = magnetization::MagnetizationApprox<f64>;

pub type Field32 = fields::FieldModel<f32>;
pub type Grid32 = phantom::ConcentrationGrid<f32>;
