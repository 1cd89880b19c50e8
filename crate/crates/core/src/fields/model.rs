use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use super::harmonics::{check_order, sh_count, sh_index, SolidHarmonics};
use super::modulation::TimeModulation;
use super::topology::Topology;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Radius of the sphere on which expansions are assumed valid (m).
pub const DEFAULT_VALIDITY_RADIUS: f64 = 0.05;

static OUTSIDE_WARNED: AtomicBool = AtomicBool::new(false);

/// One spherical-harmonic contribution to a single field component.
///
/// `component` is 0-based (0 = B_x, 1 = B_y, 2 = B_z); coefficient files use
/// 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SHTerm<T> {
    pub component: usize,
    pub degree: u32,
    pub order: i32,
    pub coefficient: T,
    pub modulation: TimeModulation<T>,
}

impl<T: Real> SHTerm<T> {
    pub fn new(component: usize, degree: u32, order: i32, coefficient: T, modulation: TimeModulation<T>) -> Self {
        Self { component, degree, order, coefficient, modulation }
    }

    pub fn validate(&self) -> Result<()> {
        if self.component > 2 {
            return Err(Error::Domain(format!("component index {} out of range", self.component)));
        }
        check_order(self.degree, self.order)?;
        if !self.coefficient.is_finite() || !self.modulation.is_finite() {
            return Err(Error::Domain("non-finite term coefficient or modulation".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct TermGroup<T> {
    modulation: TimeModulation<T>,
    // (component, flat (l,m) index, coefficient)
    entries: Vec<(usize, usize, T)>,
}

/// Immutable field model: terms grouped by shared time modulation.
#[derive(Debug, Clone)]
pub struct FieldModel<T> {
    terms: Vec<SHTerm<T>>,
    groups: Vec<TermGroup<T>>,
    l_max: u32,
    radius: T,
    topology: Topology<T>,
    ideal: bool,
}

impl<T: Real> FieldModel<T> {
    /// Builds a model from arbitrary terms (topology [`Topology::Custom`]).
    pub fn new(terms: Vec<SHTerm<T>>, radius: T) -> Result<Self> {
        Self::with_topology(terms, radius, Topology::Custom, false)
    }

    pub(crate) fn with_topology(terms: Vec<SHTerm<T>>, radius: T, topology: Topology<T>, ideal: bool) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::Config("validity radius must be positive".into()));
        }
        for t in &terms {
            t.validate()?;
        }
        let l_max = terms.iter().map(|t| t.degree).max().unwrap_or(0);
        let mut groups: Vec<TermGroup<T>> = Vec::new();
        for t in &terms {
            let entry = (t.component, sh_index(t.degree, t.order), t.coefficient);
            match groups.iter_mut().find(|g| g.modulation == t.modulation) {
                Some(g) => g.entries.push(entry),
                None => groups.push(TermGroup { modulation: t.modulation, entries: vec![entry] }),
            }
        }
        Ok(Self { terms, groups, l_max, radius, topology, ideal })
    }

    pub fn terms(&self) -> &[SHTerm<T>] {
        &self.terms
    }

    pub fn max_degree(&self) -> u32 {
        self.l_max
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Topology the model was built from. Perturbed models keep the nominal
    /// parameters of their source but report `is_ideal() == false`.
    pub fn topology(&self) -> &Topology<T> {
        &self.topology
    }

    /// True when the terms are exactly those of [`Self::topology`].
    pub fn is_ideal(&self) -> bool {
        self.ideal
    }

    pub(crate) fn mark_perturbed(mut self) -> Self {
        self.ideal = false;
        self
    }

    /// Distinct time modulations, in first-appearance order.
    pub fn modulations(&self) -> Vec<TimeModulation<T>> {
        self.groups.iter().map(|g| g.modulation).collect()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    fn check_radius(&self, r: Vec3<T>) {
        if r.norm() > self.radius && !OUTSIDE_WARNED.swap(true, Ordering::Relaxed) {
            log::warn!(
                "field evaluated at |r| = {:e} m outside the validity radius {:e} m",
                r.norm(),
                self.radius
            );
        }
    }

    /// Spatial vector of each modulation group at `r`, written into `out`.
    pub fn spatial_parts_into(&self, r: Vec3<T>, scratch: &mut Vec<T>, out: &mut [Vec3<T>]) {
        self.check_radius(r);
        scratch.resize(sh_count(self.l_max), T::zero());
        SolidHarmonics::fill(self.l_max, r, scratch);
        for (g, o) in self.groups.iter().zip(out.iter_mut()) {
            let mut v = [T::zero(); 3];
            for &(j, idx, c) in &g.entries {
                v[j] += c * scratch[idx];
            }
            *o = Vec3::new(v[0], v[1], v[2]);
        }
    }

    pub fn spatial_parts(&self, r: Vec3<T>) -> Vec<Vec3<T>> {
        let mut out = vec![Vec3::zero(); self.groups.len()];
        let mut scratch = Vec::new();
        self.spatial_parts_into(r, &mut scratch, &mut out);
        out
    }

    /// Field and its analytic time derivative at `(r, t)`.
    pub fn eval_with_dt(&self, r: Vec3<T>, t: T) -> (Vec3<T>, Vec3<T>) {
        let parts = self.spatial_parts(r);
        let mut b = Vec3::zero();
        let mut db = Vec3::zero();
        for (g, v) in self.groups.iter().zip(parts) {
            let (m, dm) = g.modulation.eval_with_derivative(t);
            b += v * m;
            db += v * dm;
        }
        (b, db)
    }

    pub fn eval(&self, r: Vec3<T>, t: T) -> Vec3<T> {
        self.eval_with_dt(r, t).0
    }

    pub fn eval_dt(&self, r: Vec3<T>, t: T) -> Vec3<T> {
        self.eval_with_dt(r, t).1
    }

    /// Precomputes the spatial parts at a fixed point set.
    pub fn compile(&self, points: &[Vec3<T>]) -> CompiledField<T> {
        CompiledField::new(self, points)
    }
}

/// `B(r, t)` for a field model.
pub fn eval_field<T: Real>(model: &FieldModel<T>, r: Vec3<T>, t: T) -> Vec3<T> {
    model.eval(r, t)
}

/// Analytic `dB/dt (r, t)`.
pub fn eval_field_dt<T: Real>(model: &FieldModel<T>, r: Vec3<T>, t: T) -> Vec3<T> {
    model.eval_dt(r, t)
}

/// A field model evaluated once at a fixed point set.
///
/// Since `B(r, t) = Σ_g mod_g(t) V_g(r)`, storing `V_g` per point reduces
/// every later evaluation to a short dot product over groups.
#[derive(Debug, Clone)]
pub struct CompiledField<T> {
    modulations: Vec<TimeModulation<T>>,
    parts: Vec<Vec3<T>>,
    n_points: usize,
}

impl<T: Real> CompiledField<T> {
    pub fn new(model: &FieldModel<T>, points: &[Vec3<T>]) -> Self {
        let g = model.group_count();
        let mut parts = vec![Vec3::zero(); points.len() * g];
        if g > 0 {
            parts.par_chunks_mut(g).zip(points.par_iter()).for_each_init(Vec::new, |scratch, (out, &p)| {
                model.spatial_parts_into(p, scratch, out)
            });
        }
        Self { modulations: model.modulations(), parts, n_points: points.len() }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn group_count(&self) -> usize {
        self.modulations.len()
    }

    /// Modulation values and derivatives at `t`, one entry per group.
    pub fn time_factors(&self, t: T) -> (Vec<T>, Vec<T>) {
        self.modulations.iter().map(|m| m.eval_with_derivative(t)).unzip()
    }

    #[inline]
    pub fn combine(&self, point: usize, factors: &[T]) -> Vec3<T> {
        let g = self.modulations.len();
        let mut acc = Vec3::zero();
        for (v, &f) in self.parts[point * g..(point + 1) * g].iter().zip(factors) {
            acc += *v * f;
        }
        acc
    }
}
