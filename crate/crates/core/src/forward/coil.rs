use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

type SensitivityFn<T> = Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>;

/// Receive coil with sensitivity `ρ(r)`.
///
/// The simulators and the system matrix use [`ReceiveCoil::sensitivity_at`];
/// a spatially varying profile can be attached with
/// [`ReceiveCoil::with_profile`], otherwise the constant vector is used.
#[derive(Clone)]
pub struct ReceiveCoil<T> {
    pub sensitivity: Vec3<T>,
    /// Index written into traces produced with this coil.
    pub index: usize,
    profile: Option<SensitivityFn<T>>,
}

impl<T: Real> fmt::Debug for ReceiveCoil<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReceiveCoil")
            .field("sensitivity", &self.sensitivity)
            .field("index", &self.index)
            .field("profile", &self.profile.is_some())
            .finish()
    }
}

impl<T: Real> ReceiveCoil<T> {
    pub fn new(sensitivity: Vec3<T>) -> Result<Self> {
        if !(sensitivity.norm() > T::zero()) || !sensitivity.is_finite() {
            return Err(Error::Config("receive coil sensitivity must be a nonzero finite vector".into()));
        }
        Ok(Self { sensitivity, index: 0, profile: None })
    }

    /// Unit coil along the Cartesian axis `j` (0 = x, 1 = y, 2 = z).
    pub fn axis(j: usize) -> Self {
        let mut v = [T::zero(); 3];
        v[j] = T::one();
        Self { sensitivity: Vec3::new(v[0], v[1], v[2]), index: j, profile: None }
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn with_profile(mut self, f: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static) -> Self {
        self.profile = Some(Arc::new(f));
        self
    }

    pub fn is_constant(&self) -> bool {
        self.profile.is_none()
    }

    #[inline]
    pub fn sensitivity_at(&self, r: Vec3<T>) -> Vec3<T> {
        match &self.profile {
            None => self.sensitivity,
            Some(f) => f(r),
        }
    }

    pub fn flipped(&self) -> Self {
        let mut c = self.clone();
        c.sensitivity = -c.sensitivity;
        if let Some(f) = self.profile.clone() {
            c.profile = Some(Arc::new(move |r| -f(r)));
        }
        c
    }
}
