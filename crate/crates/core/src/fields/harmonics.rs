//! Real Schmidt semi-normalized spherical harmonics and the matching solid
//! (homogeneous harmonic) polynomials `p_{l,m}(r) = r^l Y_{l,m}(θ, φ)`.
//!
//! The associated Legendre functions carry no Condon–Shortley phase, so
//! `P_1^1(cos θ) = sin θ` and `p_{1,1} = x`.
//!
//! Two independent evaluation paths are provided: the angular form
//! ([`spherical_harmonic`]) works with `(θ, φ)` and trigonometric factors,
//! while [`SolidHarmonics`] uses a purely Cartesian recurrence that is
//! regular at the origin and on the z-axis.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Flat index of `(l, m)` in a table holding all orders of degrees `0..=l_max`.
#[inline]
pub fn sh_index(l: u32, m: i32) -> usize {
    let l = l as i64;
    (l * l + l + m as i64) as usize
}

/// Number of `(l, m)` pairs with degree at most `l_max`.
#[inline]
pub fn sh_count(l_max: u32) -> usize {
    let n = l_max as usize + 1;
    n * n
}

pub(crate) fn check_order(l: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!("order |m| = {} exceeds degree l = {l}", m.abs())));
    }
    Ok(())
}

/// Schmidt factor `sqrt(2 (l-m)! / (l+m)!)` for `m > 0`, 1 for `m = 0`.
fn schmidt_factor<T: Real>(l: u32, m: u32) -> T {
    if m == 0 {
        return T::one();
    }
    // (l-m)!/(l+m)! = 1 / prod_{k=l-m+1}^{l+m} k
    let mut ratio = 1.0f64;
    for k in (l - m + 1)..=(l + m) {
        ratio /= k as f64;
    }
    T::of((2.0 * ratio).sqrt())
}

/// Associated Legendre function `P_l^m(x)` without Condon–Shortley phase,
/// computed by the upward recurrence in `l` at fixed `m`.
pub fn assoc_legendre<T: Real>(l: u32, m: u32, x: T) -> T {
    debug_assert!(m <= l);
    let one = T::one();
    let s = (one - x * x).max(T::zero()).sqrt();
    // P_m^m = (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = one;
    for k in 1..=m {
        pmm = pmm * T::of_usize(2 * k as usize - 1) * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p_curr = x * T::of_usize(2 * m as usize + 1) * pmm;
    for ll in (m + 2)..=l {
        let a = T::of_usize(2 * ll as usize - 1);
        let b = T::of_usize((ll + m - 1) as usize);
        let p_next = (a * x * p_curr - b * p_prev) / T::of_usize((ll - m) as usize);
        p_prev = p_curr;
        p_curr = p_next;
    }
    p_curr
}

/// Real Schmidt semi-normalized spherical harmonic `Y_{l,m}(θ, φ)`.
///
/// Positive orders pair with `cos(mφ)`, negative orders with `sin(|m|φ)`.
pub fn spherical_harmonic<T: Real>(l: u32, m: i32, theta: T, phi: T) -> Result<T> {
    check_order(l, m)?;
    let am = m.unsigned_abs();
    let p = assoc_legendre(l, am, theta.cos());
    let n: T = schmidt_factor(l, am);
    let mm = T::of(am as f64);
    Ok(match m.signum() {
        0 => p,
        1 => n * p * (mm * phi).cos(),
        _ => n * p * (mm * phi).sin(),
    })
}

/// Homogeneous harmonic polynomial `p_{l,m}(r)`.
pub fn harmonic_polynomial<T: Real>(l: u32, m: i32, r: Vec3<T>) -> Result<T> {
    check_order(l, m)?;
    let table = SolidHarmonics::new(l, r);
    Ok(table.get(l, m))
}

/// All solid harmonics `p_{l,m}(r)` for `l ≤ l_max` at one point.
///
/// Uses `r^l P_l^m(cos θ) e^{imφ} = (x + iy)^m Π_l^m(z, r²)` where `Π`
/// obeys the Legendre recurrence with `r²` in place of `1`.
#[derive(Debug, Clone)]
pub struct SolidHarmonics<T> {
    l_max: u32,
    values: Vec<T>,
}

impl<T: Real> SolidHarmonics<T> {
    pub fn new(l_max: u32, r: Vec3<T>) -> Self {
        let mut values = vec![T::zero(); sh_count(l_max)];
        Self::fill(l_max, r, &mut values);
        Self { l_max, values }
    }

    /// Writes the table for point `r` into `out` (length `sh_count(l_max)`).
    pub fn fill(l_max: u32, r: Vec3<T>, out: &mut [T]) {
        debug_assert!(out.len() >= sh_count(l_max));
        let (x, y, z) = (r.x, r.y, r.z);
        let r2 = x * x + y * y + z * z;
        // Re/Im of (x + iy)^m
        let mut re = T::one();
        let mut im = T::zero();
        let mut double_fact = T::one(); // (2m-1)!!
        for m in 0..=l_max {
            if m > 0 {
                let nre = re * x - im * y;
                let nim = re * y + im * x;
                re = nre;
                im = nim;
                double_fact = double_fact * T::of_usize(2 * m as usize - 1);
            }
            let norm: T = schmidt_factor(m, m);
            let mut pi_prev = T::zero();
            let mut pi_curr = double_fact;
            for l in m..=l_max {
                if l == m + 1 {
                    pi_prev = pi_curr;
                    pi_curr = T::of_usize(2 * m as usize + 1) * z * pi_prev;
                } else if l > m + 1 {
                    let a = T::of_usize(2 * l as usize - 1);
                    let b = T::of_usize((l + m - 1) as usize);
                    let next = (a * z * pi_curr - b * r2 * pi_prev) / T::of_usize((l - m) as usize);
                    pi_prev = pi_curr;
                    pi_curr = next;
                }
                let n = if l == m { norm } else { schmidt_factor(l, m) };
                if m == 0 {
                    out[sh_index(l, 0)] = pi_curr;
                } else {
                    out[sh_index(l, m as i32)] = n * pi_curr * re;
                    out[sh_index(l, -(m as i32))] = n * pi_curr * im;
                }
            }
        }
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    #[inline]
    pub fn get(&self, l: u32, m: i32) -> T {
        self.values[sh_index(l, m)]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
}
