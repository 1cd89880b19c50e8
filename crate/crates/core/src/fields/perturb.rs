use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{FieldModel, SHTerm};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest accepted relative perturbation magnitude.
pub const MAX_PERTURBATION: f64 = 0.2;

/// Adds seeded pseudo-random degree 2..=4 terms to the x and y components.
///
/// Each modulation group receives its own terms, sharing the group's time
/// modulation. A group's reference amplitude is `max |c| R^l` over its
/// terms (`R` the validity radius), and every added term has amplitude at
/// most `magnitude` times that reference on the validity sphere. Schmidt
/// semi-normalized harmonics are bounded by one, so `|c'| R^l'` is the
/// term's maximum there. z-components stay untouched.
pub fn perturb_field<T: Real>(model: &FieldModel<T>, seed: u64, magnitude: T) -> Result<FieldModel<T>> {
    if !(magnitude >= T::zero() && magnitude <= T::of(MAX_PERTURBATION)) {
        return Err(Error::Domain(format!("perturbation magnitude {magnitude} outside [0, {MAX_PERTURBATION}]")));
    }
    if magnitude == T::zero() {
        return Ok(model.clone());
    }
    let r = model.radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = model.terms().to_vec();
    for modulation in model.modulations() {
        let reference = model
            .terms()
            .iter()
            .filter(|t| t.modulation == modulation)
            .map(|t| t.coefficient.abs() * r.powi(t.degree as i32))
            .fold(T::zero(), T::max);
        if reference == T::zero() {
            continue;
        }
        for component in 0..2 {
            for l in 2u32..=4 {
                let bound = magnitude * reference / r.powi(l as i32);
                for m in -(l as i32)..=(l as i32) {
                    let u: f64 = rng.random_range(-1.0..=1.0);
                    terms.push(SHTerm::new(component, l, m, bound * T::of(u), modulation));
                }
            }
        }
    }
    Ok(FieldModel::with_topology(terms, r, *model.topology(), false)?.mark_perturbed())
}
