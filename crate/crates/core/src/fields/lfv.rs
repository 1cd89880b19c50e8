use super::model::FieldModel;
use crate::error::{Error, Result};
use crate::phantom::ConcentrationGrid;
use crate::scalar::Real;

/// Cells whose center field magnitude lies in `[lo, hi)` at time `t`.
pub fn lfv_mask<T: Real>(model: &FieldModel<T>, t: T, grid: &ConcentrationGrid<T>, lo: T, hi: T) -> Result<Vec<usize>> {
    if !(lo >= T::zero() && lo < hi) {
        return Err(Error::Domain(format!("invalid field band [{lo}, {hi})")));
    }
    Ok((0..grid.spec.len())
        .filter(|&k| {
            let b = model.eval(grid.spec.center(k), t).norm();
            b >= lo && b < hi
        })
        .collect())
}
