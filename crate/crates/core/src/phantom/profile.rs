use super::grid::ConcentrationGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAxis {
    /// Along x at fixed y.
    Horizontal,
    /// Along y at fixed x.
    Vertical,
}

/// Positions and values along the nearest grid row/column on the center layer.
pub fn line_profile<T: Real>(grid: &ConcentrationGrid<T>, axis: ProfileAxis, offset: T) -> Result<(Vec<T>, Vec<T>)> {
    let spec = &grid.spec;
    let (along, across) = match axis {
        ProfileAxis::Horizontal => (0, 1),
        ProfileAxis::Vertical => (1, 0),
    };
    let fixed = spec
        .nearest_index(across, offset)
        .ok_or_else(|| Error::Domain(format!("profile offset {offset} outside the grid")))?;
    let (k, _) = grid.center_layer();
    let n = spec.dims[along];
    let mut pos = Vec::with_capacity(n);
    let mut val = Vec::with_capacity(n);
    for i in 0..n {
        let idx = match axis {
            ProfileAxis::Horizontal => spec.index(i, fixed, k),
            ProfileAxis::Vertical => spec.index(fixed, i, k),
        };
        pos.push(spec.axis_coordinate(along, i));
        val.push(grid.values[idx]);
    }
    Ok((pos, val))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{rasterize_discs, Disc, GridSpec};

    #[test]
    fn zero_grid_profile() {
        let g = ConcentrationGrid::zeros(GridSpec::centered([8, 6, 1], [1.0f64; 3]).unwrap());
        let (p, v) = line_profile(&g, ProfileAxis::Vertical, 0.2).unwrap();
        assert_eq!(p.len(), 6);
        assert!(v.iter().all(|&x| x == 0.0));
        assert!(line_profile(&g, ProfileAxis::Horizontal, 10.0).is_err());
    }

    #[test]
    fn plateau_through_disc() {
        let spec = GridSpec::centered([41, 41, 1], [1e-3f64; 3]).unwrap();
        let g = rasterize_discs(spec, &[Disc { center: [0.0, 0.0], diameter: 0.01, value: 1.0 }]);
        let (_, v) = line_profile(&g, ProfileAxis::Horizontal, 0.0).unwrap();
        let ones = v.iter().filter(|&&x| x == 1.0).count();
        assert!((9..=11).contains(&ones), "{ones}");
    }
}
