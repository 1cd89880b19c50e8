use super::grid::{ConcentrationGrid, GridSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A disc of constant concentration in the `z = 0` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc<T> {
    pub center: [T; 2],
    pub diameter: T,
    pub value: T,
}

/// Places discs on a ring: the smallest at angle 0, the others following
/// counter-clockwise in order of increasing diameter at equal angular steps.
/// A single disc goes to the origin.
pub fn ring_layout<T: Real>(diameters: &[T], ring_radius: T) -> Vec<Disc<T>> {
    let mut d: Vec<T> = diameters.to_vec();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if d.len() == 1 {
        return vec![Disc { center: [T::zero(); 2], diameter: d[0], value: T::one() }];
    }
    let n = T::of_usize(d.len());
    d.iter()
        .enumerate()
        .map(|(i, &diameter)| {
            let a = T::of(2.0) * T::PI() * T::of_usize(i) / n;
            Disc { center: [ring_radius * a.cos(), ring_radius * a.sin()], diameter, value: T::one() }
        })
        .collect()
}

/// Checks containment in the FOV circle and pairwise disjointness.
pub fn validate_discs<T: Real>(fov_diameter: T, discs: &[Disc<T>]) -> Result<()> {
    let half = T::of(0.5);
    for d in discs {
        if !(d.diameter > T::zero()) {
            return Err(Error::Config("disc diameter must be positive".into()));
        }
        let reach = d.center[0].hypot(d.center[1]) + half * d.diameter;
        if reach > half * fov_diameter {
            return Err(Error::Config(format!("disc of diameter {} does not fit into the FOV", d.diameter)));
        }
    }
    for (i, a) in discs.iter().enumerate() {
        for b in &discs[i + 1..] {
            let dist = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
            if dist < half * (a.diameter + b.diameter) {
                return Err(Error::Config(format!("discs of diameter {} and {} overlap", a.diameter, b.diameter)));
            }
        }
    }
    Ok(())
}

/// Sets each cell whose center lies in a disc (boundary included) to the
/// disc value. Only the layer through `z = 0` is filled.
pub fn rasterize_discs<T: Real>(spec: GridSpec<T>, discs: &[Disc<T>]) -> ConcentrationGrid<T> {
    let mut grid = ConcentrationGrid::zeros(spec);
    let half_z = spec.spacing[2] * T::of(0.5);
    for (k, v) in grid.values.iter_mut().enumerate() {
        let c = spec.center(k);
        if c.z.abs() > half_z && spec.dims[2] > 1 {
            continue;
        }
        for d in discs {
            let r = d.diameter * T::of(0.5);
            if (c.x - d.center[0]).powi(2) + (c.y - d.center[1]).powi(2) <= r * r {
                *v = d.value;
            }
        }
    }
    grid
}

/// The disc phantom: discs on a ring of radius `fov_diameter / 4`.
pub fn build_disc_phantom<T: Real>(fov_diameter: T, disc_diameters: &[T], spec: GridSpec<T>) -> Result<ConcentrationGrid<T>> {
    build_disc_phantom_with_ring(fov_diameter, disc_diameters, fov_diameter / T::of(4.0), spec)
}

pub fn build_disc_phantom_with_ring<T: Real>(
    fov_diameter: T,
    disc_diameters: &[T],
    ring_radius: T,
    spec: GridSpec<T>,
) -> Result<ConcentrationGrid<T>> {
    let discs = ring_layout(disc_diameters, ring_radius);
    validate_discs(fov_diameter, &discs)?;
    Ok(rasterize_discs(spec, &discs))
}
