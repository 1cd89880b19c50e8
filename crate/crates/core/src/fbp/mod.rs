//! Radon-domain baseline: sinograms from FFL traces and filtered back projection.

mod extract;
mod radon;
mod reconstruct;
mod sinogram;

pub use extract::{signal_to_sinogram, wiener_deconvolve, SinogramOptions};
pub use radon::{half_circle_angles, radon_transform};
pub use reconstruct::{fbp_reconstruct, fbp_reconstruct_with, ramp_filter, FbpWindow};
pub use sinogram::{uniform_displacements, zero_pad, Sinogram, SinogramMeta};
