use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Regular cell grid. `origin` is the center of cell `(0, 0, 0)`; cells are
/// numbered x-fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub dims: [usize; 3],
    pub spacing: [T; 3],
    pub origin: [T; 3],
}

impl<T: Real> GridSpec<T> {
    pub fn new(dims: [usize; 3], spacing: [T; 3], origin: [T; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Config(format!("grid dimensions must be positive, got {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s > T::zero() && s.is_finite())) {
            return Err(Error::Config("grid spacing must be positive".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self { dims, spacing, origin })
    }

    /// Grid centered on the origin; a single layer sits at `z = 0`.
    pub fn centered(dims: [usize; 3], spacing: [T; 3]) -> Result<Self> {
        let half = T::of(0.5);
        let origin = [0, 1, 2].map(|a| -half * T::of_usize(dims[a].max(1) - 1) * spacing[a]);
        Self::new(dims, spacing, origin)
    }

    /// Planar `n × n` grid covering a square field of view of side `fov`.
    pub fn planar_square(n: usize, fov: T, thickness: T) -> Result<Self> {
        let h = fov / T::of_usize(n.max(1));
        Self::centered([n, n, 1], [h, h, thickness])
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_planar(&self) -> bool {
        self.dims[2] == 1
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    pub fn axis_coordinate(&self, axis: usize, i: usize) -> T {
        self.origin[axis] + T::of_usize(i) * self.spacing[axis]
    }

    #[inline]
    pub fn center(&self, idx: usize) -> Vec3<T> {
        let [i, j, k] = self.coords(idx);
        Vec3::new(self.axis_coordinate(0, i), self.axis_coordinate(1, j), self.axis_coordinate(2, k))
    }

    pub fn centers(&self) -> Vec<Vec3<T>> {
        (0..self.len()).map(|k| self.center(k)).collect()
    }

    pub fn cell_volume(&self) -> T {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// Nearest cell index along `axis` for coordinate `x`, if inside the grid.
    pub fn nearest_index(&self, axis: usize, x: T) -> Option<usize> {
        let u = (x - self.origin[axis]) / self.spacing[axis];
        let half = T::of(0.5);
        if u < -half || u > T::of_usize(self.dims[axis] - 1) + half {
            return None;
        }
        Some(u.round().max(T::zero()).to_usize().unwrap_or(0).min(self.dims[axis] - 1))
    }

    /// Lower and upper extent (cell faces) along `axis`.
    pub fn extent(&self, axis: usize) -> (T, T) {
        let half = self.spacing[axis] * T::of(0.5);
        (self.origin[axis] - half, self.axis_coordinate(axis, self.dims[axis] - 1) + half)
    }

    /// Sub-sample offsets from a cell center: `s` points along every axis
    /// with more than one cell, the center along singleton axes.
    pub fn quadrature_offsets(&self, subsampling: usize) -> Vec<Vec3<T>> {
        let s = subsampling.max(1);
        let per_axis = [0, 1, 2].map(|a| if self.dims[a] > 1 { s } else { 1 });
        let off = |a: usize, q: usize| {
            let n = per_axis[a];
            (T::of_usize(2 * q + 1) / T::of_usize(2 * n) - T::of(0.5)) * self.spacing[a]
        };
        let mut v = Vec::with_capacity(per_axis.iter().product());
        for qz in 0..per_axis[2] {
            for qy in 0..per_axis[1] {
                for qx in 0..per_axis[0] {
                    v.push(Vec3::new(off(0, qx), off(1, qy), off(2, qz)));
                }
            }
        }
        v
    }

    pub fn quadrature(&self, subsampling: usize) -> Quadrature<T> {
        let offsets = self.quadrature_offsets(subsampling);
        let per_cell = offsets.len();
        let mut points = Vec::with_capacity(self.len() * per_cell);
        for k in 0..self.len() {
            let c = self.center(k);
            points.extend(offsets.iter().map(|&o| c + o));
        }
        Quadrature { points, per_cell, weight: self.cell_volume() / T::of_usize(per_cell) }
    }
}

/// Midpoint quadrature nodes: `per_cell` consecutive points per cell.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    pub points: Vec<Vec3<T>>,
    pub per_cell: usize,
    pub weight: T,
}

/// Pixel-basis particle concentration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationGrid<T> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Real> ConcentrationGrid<T> {
    pub fn zeros(spec: GridSpec<T>) -> Self {
        Self { values: vec![T::zero(); spec.len()], spec }
    }

    pub fn from_values(spec: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Config(format!("{} values for a grid of {} cells", values.len(), spec.len())));
        }
        Ok(Self { spec, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|&v| v * a).collect() }
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.values[self.spec.index(i, j, k)]
    }

    /// Values on the layer nearest `z = 0`.
    pub fn center_layer(&self) -> (usize, &[T]) {
        let k = self.spec.nearest_index(2, T::zero()).unwrap_or(self.spec.dims[2] / 2);
        let n = self.spec.dims[0] * self.spec.dims[1];
        (k, &self.values[k * n..(k + 1) * n])
    }

    /// Bilinear interpolation on the center layer; zero outside the grid.
    pub fn sample_bilinear(&self, x: T, y: T) -> T {
        let (_, layer) = self.center_layer();
        let [nx, ny, _] = self.spec.dims;
        let u = (x - self.spec.origin[0]) / self.spec.spacing[0];
        let v = (y - self.spec.origin[1]) / self.spec.spacing[1];
        let (u0, v0) = (u.floor(), v.floor());
        let (fu, fv) = (u - u0, v - v0);
        let (Some(i0), Some(j0)) = (u0.to_i64(), v0.to_i64()) else {
            return T::zero();
        };
        let at = |i: i64, j: i64| -> T {
            if i < 0 || j < 0 || i >= nx as i64 || j >= ny as i64 {
                T::zero()
            } else {
                layer[i as usize + nx * j as usize]
            }
        };
        let one = T::one();
        at(i0, j0) * (one - fu) * (one - fv)
            + at(i0 + 1, j0) * fu * (one - fv)
            + at(i0, j0 + 1) * (one - fu) * fv
            + at(i0 + 1, j0 + 1) * fu * fv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_grid_geometry() {
        let g = GridSpec::centered([4, 3, 1], [1.0f64, 2.0, 0.5]).unwrap();
        assert_eq!(g.center(0), Vec3::new(-1.5, -2.0, 0.0));
        assert_eq!(g.center(g.len() - 1), Vec3::new(1.5, 2.0, 0.0));
        for k in 0..g.len() {
            let [i, j, l] = g.coords(k);
            assert_eq!(g.index(i, j, l), k);
        }
        assert_eq!(g.extent(0), (-2.0, 2.0));
        assert_eq!(g.nearest_index(0, 1.9), Some(3));
        assert_eq!(g.nearest_index(0, 2.1), None);
    }

    #[test]
    fn planar_quadrature_keeps_z_at_center() {
        let g = GridSpec::centered([2, 2, 1], [1.0f64, 1.0, 1.0]).unwrap();
        let q = g.quadrature(3);
        assert_eq!(q.per_cell, 9);
        assert!(q.points.iter().all(|p| p.z == 0.0));
        assert!((q.weight * 9.0 - 1.0).abs() < 1e-15);
        let c0 = g.center(0);
        let mean = q.points[..9].iter().fold(Vec3::zero(), |a, &p| a + p) * (1.0 / 9.0);
        assert!((mean - c0).norm() < 1e-15);
    }

    #[test]
    fn bad_specs() {
        assert!(GridSpec::centered([0, 1, 1], [1.0f64; 3]).is_err());
        assert!(GridSpec::centered([1, 1, 1], [1.0f64, 0.0, 1.0]).is_err());
    }
}
