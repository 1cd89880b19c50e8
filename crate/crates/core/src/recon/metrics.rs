use crate::error::{Error, Result};
use crate::phantom::{line_profile, ConcentrationGrid, ProfileAxis};
use crate::scalar::Real;

/// `‖a − b‖₂ / ‖b‖₂`.
pub fn nrmse<T: Real>(reconstruction: &ConcentrationGrid<T>, reference: &ConcentrationGrid<T>) -> Result<T> {
    if reconstruction.spec != reference.spec {
        return Err(Error::Config("reconstruction and reference grids differ".into()));
    }
    nrmse_values(&reconstruction.values, &reference.values)
}

pub fn nrmse_values<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::Config(format!("length mismatch {} vs {}", a.len(), b.len())));
    }
    let num: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    let den: T = b.iter().map(|&y| y * y).sum();
    if den == T::zero() {
        return Err(Error::Domain("reference has zero norm".into()));
    }
    Ok((num / den).sqrt())
}

/// Reconstruction and reference sampled along the same grid line.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePair<T> {
    pub positions: Vec<T>,
    pub reconstruction: Vec<T>,
    pub reference: Vec<T>,
}

impl<T: Real> ProfilePair<T> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("position,reconstruction,reference\n");
        for i in 0..self.positions.len() {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.positions[i].f64(),
                self.reconstruction[i].f64(),
                self.reference[i].f64()
            ));
        }
        s
    }
}

pub fn profile_compare<T: Real>(
    reconstruction: &ConcentrationGrid<T>,
    reference: &ConcentrationGrid<T>,
    axis: ProfileAxis,
    offset: T,
) -> Result<ProfilePair<T>> {
    if reconstruction.spec != reference.spec {
        return Err(Error::Config("reconstruction and reference grids differ".into()));
    }
    let (positions, rec) = line_profile(reconstruction, axis, offset)?;
    let (_, refv) = line_profile(reference, axis, offset)?;
    Ok(ProfilePair { positions, reconstruction: rec, reference: refv })
}
