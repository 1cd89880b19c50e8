use rayon::prelude::*;

use super::sinogram::Sinogram;
use crate::phantom::ConcentrationGrid;
use crate::scalar::Real;

/// Line integrals of the center layer of `grid` along `⟨r, (cos θ, sin θ)⟩ = s`.
///
/// Sampled summation with step half the smaller in-plane cell size over
/// bilinear interpolation of the cell values.
pub fn radon_transform<T: Real>(grid: &ConcentrationGrid<T>, angles: &[T], displacements: &[T]) -> Sinogram<T> {
    let spec = &grid.spec;
    let step = spec.spacing[0].min(spec.spacing[1]) * T::of(0.5);
    let (x0, x1) = spec.extent(0);
    let (y0, y1) = spec.extent(1);
    let rx = x0.abs().max(x1.abs());
    let ry = y0.abs().max(y1.abs());
    let reach = (rx * rx + ry * ry).sqrt() + spec.spacing[0].max(spec.spacing[1]);
    let half = (reach / step).ceil().to_usize().unwrap_or(0);
    let nd = displacements.len();
    let values: Vec<T> = angles
        .par_iter()
        .flat_map_iter(|&theta| {
            let (sn, cs) = theta.sin_cos();
            displacements.iter().map(move |&s| {
                let (px, py) = (s * cs, s * sn);
                let mut acc = T::zero();
                for j in 0..=2 * half {
                    let h = (T::of_usize(j) - T::of_usize(half)) * step;
                    acc += grid.sample_bilinear(px - h * sn, py + h * cs);
                }
                acc * step
            })
        })
        .collect();
    debug_assert_eq!(values.len(), angles.len() * nd);
    Sinogram { values, angles: angles.to_vec(), displacements: displacements.to_vec(), meta: None }
}

/// `k` angles evenly covering `[0, π)`.
pub fn half_circle_angles<T: Real>(k: usize) -> Vec<T> {
    (0..k).map(|i| T::PI() * T::of_usize(i) / T::of_usize(k)).collect()
}
