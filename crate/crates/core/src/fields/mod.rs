//! Time-varying magnetic fields as spherical-harmonic expansions.
//!
//! A field is a list of [`SHTerm`]s. Each term contributes
//! `c · p_{l,m}(r) · modulation(t)` to one Cartesian component, so every
//! component is a finite sum of harmonic polynomials and hence harmonic.

mod coeffs;
mod harmonics;
mod lfv;
mod model;
mod modulation;
mod perturb;
mod topology;

pub use coeffs::{load_field_coefficients, parse_field_coefficients, write_field_coefficients, format_field_coefficients};
pub use harmonics::{
    assoc_legendre, harmonic_polynomial, sh_count, sh_index, spherical_harmonic, SolidHarmonics,
};
pub use lfv::lfv_mask;
pub use model::{eval_field, eval_field_dt, CompiledField, FieldModel, SHTerm, DEFAULT_VALIDITY_RADIUS};
pub use modulation::{ModulationKind, TimeModulation};
pub use perturb::{perturb_field, MAX_PERTURBATION};
pub use topology::{build_topology, ffl_locus, ffp_position, LineLocus, Topology};

/// Alias matching the operation name used in experiment descriptions.
pub fn eval_spherical_harmonic<T: crate::Real>(l: u32, m: i32, theta: T, phi: T) -> crate::Result<T> {
    spherical_harmonic(l, m, theta, phi)
}

/// Alias matching the operation name used in experiment descriptions.
pub fn eval_harmonic_polynomial<T: crate::Real>(l: u32, m: i32, r: crate::Vec3<T>) -> crate::Result<T> {
    harmonic_polynomial(l, m, r)
}
