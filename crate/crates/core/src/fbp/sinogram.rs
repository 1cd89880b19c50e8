use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radon data: row `i` holds the projection at normal angle `angles[i]`,
/// sampled at `displacements`. The line of projection `(θ, s)` is
/// `{ r : ⟨r, (cos θ, sin θ)⟩ = s }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram<T> {
    pub values: Vec<T>,
    pub angles: Vec<T>,
    pub displacements: Vec<T>,
    pub meta: Option<SinogramMeta<T>>,
}

/// Acquisition parameters a sinogram was extracted from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramMeta<T> {
    pub f_d: T,
    pub f_rot: T,
    pub g: T,
    pub d: T,
}

/// `n` points with spacing `2 half_width / n`, centered on zero.
pub fn uniform_displacements<T: Real>(n: usize, half_width: T) -> Vec<T> {
    let step = T::of(2.0) * half_width / T::of_usize(n);
    (0..n).map(|i| (T::of_usize(i) + T::of(0.5)) * step - half_width).collect()
}

impl<T: Real> Sinogram<T> {
    pub fn new(values: Vec<T>, angles: Vec<T>, displacements: Vec<T>) -> Result<Self> {
        if values.len() != angles.len() * displacements.len() {
            return Err(Error::Config("sinogram values do not match its axes".into()));
        }
        if displacements.len() >= 2 {
            let step = displacements[1] - displacements[0];
            let tol = step.abs() * T::of(1e-6);
            if !(step > T::zero()) || displacements.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > tol) {
                return Err(Error::Config("displacements must be uniform and increasing".into()));
            }
        }
        Ok(Self { values, angles, displacements, meta: None })
    }

    pub fn zeros(angles: Vec<T>, displacements: Vec<T>) -> Self {
        Self { values: vec![T::zero(); angles.len() * displacements.len()], angles, displacements, meta: None }
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_displacements(&self) -> usize {
        self.displacements.len()
    }

    pub fn step(&self) -> T {
        if self.displacements.len() >= 2 {
            self.displacements[1] - self.displacements[0]
        } else {
            T::one()
        }
    }

    /// Distance from zero to the outer edge of the last bin.
    pub fn half_width(&self) -> T {
        let last = *self.displacements.last().unwrap_or(&T::zero());
        last.abs().max(self.displacements.first().map_or(T::zero(), |f| f.abs())) + self.step() * T::of(0.5)
    }

    pub fn projection(&self, i: usize) -> &[T] {
        let n = self.n_displacements();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn projection_mut(&mut self, i: usize) -> &mut [T] {
        let n = self.n_displacements();
        &mut self.values[i * n..(i + 1) * n]
    }

    pub fn energy(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    /// Linear interpolation in projection `i`, zero outside the axis.
    pub fn sample(&self, i: usize, s: T) -> T {
        interpolate(self.projection(i), self.displacements[0], self.step(), s)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle,displacement,value\n");
        for (i, &a) in self.angles.iter().enumerate() {
            for (j, &s) in self.displacements.iter().enumerate() {
                out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", a.f64(), s.f64(), self.projection(i)[j].f64()));
            }
        }
        out
    }
}

pub(crate) fn interpolate<T: Real>(p: &[T], s0: T, ds: T, s: T) -> T {
    let u = (s - s0) / ds;
    let f = u.floor();
    let Some(i) = f.to_i64() else { return T::zero() };
    let w = u - f;
    let at = |k: i64| if k < 0 || k >= p.len() as i64 { T::zero() } else { p[k as usize] };
    at(i) * (T::one() - w) + at(i + 1) * w
}

/// Extends the displacement axis symmetrically with zero bins so that it
/// reaches at least `new_half_width`.
pub fn zero_pad<T: Real>(sino: &Sinogram<T>, new_half_width: T) -> Result<Sinogram<T>> {
    let hw = sino.half_width();
    let ds = sino.step();
    if new_half_width < hw * (T::one() - T::of(1e-9)) {
        return Err(Error::Domain(format!("zero padding cannot shrink the half width {hw} to {new_half_width}")));
    }
    let extra = ((new_half_width - hw) / ds - T::of(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    if extra == 0 {
        return Ok(sino.clone());
    }
    let n = sino.n_displacements();
    let m = n + 2 * extra;
    let s0 = sino.displacements[0] - T::of_usize(extra) * ds;
    let displacements = (0..m).map(|i| s0 + T::of_usize(i) * ds).collect();
    let mut values = vec![T::zero(); sino.n_angles() * m];
    for i in 0..sino.n_angles() {
        values[i * m + extra..i * m + extra + n].copy_from_slice(sino.projection(i));
    }
    Ok(Sinogram { values, angles: sino.angles.clone(), displacements, meta: sino.meta })
}
