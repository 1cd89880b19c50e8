use crate::error::{Error, Result};
use crate::scalar::Real;

// Below this |x| the closed forms lose digits to cancellation.
const SERIES_CUTOFF: f64 = 0.05;

/// Langevin function `L(x) = coth x − 1/x`.
pub fn langevin<T: Real>(x: T) -> T {
    if x.abs() < T::of(SERIES_CUTOFF) {
        let x2 = x * x;
        // x/3 − x³/45 + 2x⁵/945 − x⁷/4725 + 2x⁹/93555
        return x
            * (T::of(1.0 / 3.0)
                + x2 * (T::of(-1.0 / 45.0) + x2 * (T::of(2.0 / 945.0) + x2 * (T::of(-1.0 / 4725.0) + x2 * T::of(2.0 / 93555.0)))));
    }
    x.tanh().recip() - x.recip()
}

/// `L′(x) = 1/x² − 1/sinh² x`, with `L′(0) = 1/3`.
pub fn langevin_derivative<T: Real>(x: T) -> T {
    if x == T::zero() {
        return T::of(1.0 / 3.0);
    }
    if x.abs() < T::of(SERIES_CUTOFF) {
        let x2 = x * x;
        return T::of(1.0 / 3.0)
            + x2 * (T::of(-1.0 / 15.0) + x2 * (T::of(2.0 / 189.0) + x2 * (T::of(-1.0 / 675.0) + x2 * T::of(2.0 / 10395.0))));
    }
    let s = x.sinh();
    (x * x).recip() - (s * s).recip()
}

/// `L″(x) = −2/x³ + 2 cosh x / sinh³ x`.
pub fn langevin_second_derivative<T: Real>(x: T) -> T {
    if x.abs() < T::of(SERIES_CUTOFF) {
        let x2 = x * x;
        return x
            * (T::of(-2.0 / 15.0) + x2 * (T::of(8.0 / 189.0) + x2 * (T::of(-6.0 / 675.0) + x2 * T::of(16.0 / 10395.0))));
    }
    let s = x.sinh();
    let two = T::of(2.0);
    -two / (x * x * x) + two / (x.tanh() * s * s)
}

/// Mean magnetic moment as a function of the field magnitude, together with
/// its first two derivatives.
pub trait MagnetizationCurve<T: Real>: Sync {
    fn mbar(&self, x: T) -> T;
    fn mbar_prime(&self, x: T) -> T;
    fn mbar_second(&self, x: T) -> T;
}

/// `m̄(|B|) = m0 L(λ|B|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinParams<T> {
    /// Particle moment (A·m²).
    pub m0: T,
    /// `μ0 m0 / (k_B T)` (1/T).
    pub lambda: T,
}

impl<T: Real> LangevinParams<T> {
    pub fn new(m0: T, lambda: T) -> Result<Self> {
        if !(m0 > T::zero() && lambda > T::zero() && m0.is_finite() && lambda.is_finite()) {
            return Err(Error::Config(format!("Langevin parameters must be positive (m0 = {m0}, lambda = {lambda})")));
        }
        Ok(Self { m0, lambda })
    }

    /// Low-field susceptibility `m̄′(0) = m0 λ / 3`.
    pub fn susceptibility(&self) -> T {
        self.m0 * self.lambda / T::of(3.0)
    }
}

impl<T: Real> MagnetizationCurve<T> for LangevinParams<T> {
    fn mbar(&self, x: T) -> T {
        self.m0 * langevin(self.lambda * x)
    }

    fn mbar_prime(&self, x: T) -> T {
        self.m0 * self.lambda * langevin_derivative(self.lambda * x)
    }

    fn mbar_second(&self, x: T) -> T {
        self.m0 * self.lambda * self.lambda * langevin_second_derivative(self.lambda * x)
    }
}

pub fn mbar<T: Real>(params: &LangevinParams<T>, b_mag: T) -> T {
    params.mbar(b_mag)
}

pub fn mbar_prime<T: Real>(params: &LangevinParams<T>, b_mag: T) -> T {
    params.mbar_prime(b_mag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        assert_eq!(langevin_derivative(0.0f64), 1.0 / 3.0);
        assert_eq!(langevin(0.0f64), 0.0);
        assert_eq!(langevin_second_derivative(0.0f64), 0.0);
        let p = LangevinParams::new(1.0f64, 3.0).unwrap();
        assert_eq!(mbar_prime(&p, 0.0), 1.0);
        assert_eq!(mbar(&p, 0.0), 0.0);
    }

    #[test]
    fn series_and_closed_form_agree_at_cutoff() {
        for x in [0.0499999f64, 0.05, 0.0500001] {
            let x2 = x * x;
            let l = x / 3.0 - x * x2 / 45.0 + 2.0 * x * x2 * x2 / 945.0;
            assert!((langevin(x) - l).abs() < 1e-12);
            let lp = 1.0 / 3.0 - x2 / 15.0 + 2.0 * x2 * x2 / 189.0 - x2 * x2 * x2 / 675.0;
            assert!((langevin_derivative(x) - lp).abs() < 1e-11);
            let lpp = -2.0 * x / 15.0 + 8.0 * x * x2 / 189.0 - 6.0 * x * x2 * x2 / 675.0;
            assert!((langevin_second_derivative(x) - lpp).abs() < 1e-8);
        }
    }

    #[test]
    fn large_arguments() {
        assert!((langevin(1e4f64) - (1.0 - 1e-4)).abs() < 1e-15);
        assert_eq!(langevin_derivative(1e3f64), 1e-6);
        assert!(langevin_second_derivative(800.0f64).is_finite());
        assert!((langevin(-7.0f64) + langevin(7.0)).abs() < 1e-16);
    }

    #[test]
    fn invalid_params() {
        assert!(LangevinParams::new(0.0f64, 1.0).is_err());
        assert!(LangevinParams::new(1.0f64, -1.0).is_err());
    }

    #[test]
    fn works_in_f32() {
        assert_eq!(langevin_derivative(0.0f32), 1.0 / 3.0);
        let want = (1.0 / 5.0f64.tanh() - 0.2) as f32;
        assert!((langevin(5.0f32) - want).abs() < 1e-6);
    }
}
