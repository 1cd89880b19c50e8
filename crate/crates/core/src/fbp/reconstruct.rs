use std::str::FromStr;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::sinogram::{interpolate, Sinogram};
use crate::error::{Error, Result};
use crate::phantom::{ConcentrationGrid, GridSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FbpWindow {
    #[default]
    RamLak,
    Hann,
}

impl FromStr for FbpWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ram-lak" | "ramlak" | "ram_lak" | "none" => Ok(Self::RamLak),
            "hann" => Ok(Self::Hann),
            other => Err(Error::Config(format!("unknown FBP window '{other}'"))),
        }
    }
}

/// Ramp-filters every projection.
///
/// Discrete Ram-Lak kernel `h(0) = 1/4Δ²`, `h(n odd) = −1/(πnΔ)²`, applied by
/// zero-padded DFT convolution.
pub fn ramp_filter<T: Real>(sino: &Sinogram<T>, window: FbpWindow) -> Sinogram<T> {
    let n = sino.n_displacements();
    let m = (2 * n).next_power_of_two();
    let ds = sino.step();
    let pi2 = T::PI() * T::PI();
    let mut h = vec![Complex::new(T::zero(), T::zero()); m];
    for (j, v) in h.iter_mut().enumerate() {
        let k = j.min(m - j);
        let val = if k == 0 {
            T::of(0.25) / (ds * ds)
        } else if k % 2 == 1 {
            -T::one() / (pi2 * T::of_usize(k * k) * ds * ds)
        } else {
            T::zero()
        };
        *v = Complex::new(val * ds, T::zero());
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut h);
    if window == FbpWindow::Hann {
        for (j, v) in h.iter_mut().enumerate() {
            let f = T::of_usize(2 * j.min(m - j)) / T::of_usize(m);
            *v = *v * (T::of(0.5) * (T::one() + (T::PI() * f).cos()));
        }
    }
    let scale = T::of_usize(m).recip();
    let mut out = sino.clone();
    out.values.par_chunks_mut(n.max(1)).for_each(|row| {
        let mut buf: Vec<Complex<T>> = (0..m).map(|j| Complex::new(if j < n { row[j] } else { T::zero() }, T::zero())).collect();
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&h) {
            *b = *b * *k;
        }
        inv.process(&mut buf);
        for (r, b) in row.iter_mut().zip(&buf) {
            *r = b.re * scale;
        }
    });
    out
}

/// Filtered back projection with the Ram-Lak filter.
pub fn fbp_reconstruct<T: Real>(sino: &Sinogram<T>, spec: &GridSpec<T>) -> Result<ConcentrationGrid<T>> {
    fbp_reconstruct_with(sino, spec, FbpWindow::RamLak)
}

/// Filtered back projection; assumes the angles cover a half circle evenly.
///
/// Every layer of `spec` receives the same slice.
pub fn fbp_reconstruct_with<T: Real>(sino: &Sinogram<T>, spec: &GridSpec<T>, window: FbpWindow) -> Result<ConcentrationGrid<T>> {
    let k = sino.n_angles();
    if k < 2 {
        return Err(Error::Domain(format!("filtered back projection needs at least 2 angles, got {k}")));
    }
    let q = ramp_filter(sino, window);
    let trig: Vec<(T, T)> = q.angles.iter().map(|a| a.sin_cos()).collect();
    let s0 = q.displacements[0];
    let ds = q.step();
    let scale = T::PI() / T::of_usize(k);
    let per_layer = spec.dims[0] * spec.dims[1];
    let layer: Vec<T> = (0..per_layer)
        .into_par_iter()
        .map(|idx| {
            let r = spec.center(idx);
            let mut acc = T::zero();
            for (i, &(sn, cs)) in trig.iter().enumerate() {
                acc += interpolate(q.projection(i), s0, ds, r.x * cs + r.y * sn);
            }
            acc * scale
        })
        .collect();
    let values = layer.iter().copied().cycle().take(spec.len()).collect();
    ConcentrationGrid::from_values(*spec, values)
}
