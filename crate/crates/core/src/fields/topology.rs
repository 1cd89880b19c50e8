use super::model::{FieldModel, SHTerm, DEFAULT_VALIDITY_RADIUS};
use super::modulation::TimeModulation;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Ideal scanner topologies with their parameters (SI units).
///
/// `g` is the selection gradient strength (T/m), `d` drive amplitudes (T),
/// frequencies in Hz, `alpha` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology<T> {
    /// Field-free point on a 3D Lissajous trajectory.
    LissajousFfp { g: T, d: [T; 3], f: [T; 3] },
    /// Field-free point oscillating on a line segment along `v = (d_x/g, d_y/g, -d_z/2g)`.
    LineFfp { g: T, d: [T; 3], f_d: T },
    /// Continuously rotating field-free line in the xy-plane.
    RotatingFfl { g: T, d: T, f_d: T, f_rot: T },
    /// Field-free line at a fixed angle, translated by the drive field.
    StaticFfl { g: T, d: T, f_d: T, alpha: T },
    /// Arbitrary coefficients with no closed-form zero set.
    Custom,
}

/// A straight line `{ point + h · direction }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineLocus<T> {
    pub direction: Vec3<T>,
    pub point: Vec3<T>,
}

impl<T: Real> LineLocus<T> {
    /// In-plane unit normal `(dir_y, -dir_x, 0)`.
    pub fn normal(&self) -> Vec3<T> {
        Vec3::new(self.direction.y, -self.direction.x, T::zero())
    }

    /// Signed distance of the line from the origin along [`Self::normal`].
    pub fn signed_distance(&self) -> T {
        self.point.dot(self.normal())
    }

    pub fn at(&self, h: T) -> Vec3<T> {
        self.point + self.direction * h
    }

    /// Euclidean distance from `r` to the line.
    pub fn distance_to(&self, r: Vec3<T>) -> T {
        let v = r - self.point;
        (v - self.direction * v.dot(self.direction)).norm()
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn finite<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite")))
    }
}

fn selection<T: Real>(g: T) -> [SHTerm<T>; 3] {
    let c = TimeModulation::constant();
    [SHTerm::new(0, 1, 1, -g, c), SHTerm::new(1, 1, -1, -g, c), SHTerm::new(2, 1, 0, g + g, c)]
}

impl<T: Real> Topology<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Topology::LissajousFfp { g, d, f } => {
                positive("g", g)?;
                for i in 0..3 {
                    finite("d", d[i])?;
                    positive("drive frequency", f[i])?;
                }
            }
            Topology::LineFfp { g, d, f_d } => {
                positive("g", g)?;
                for v in d {
                    finite("d", v)?;
                }
                positive("f_d", f_d)?;
            }
            Topology::RotatingFfl { g, d, f_d, f_rot } => {
                positive("g", g)?;
                finite("d", d)?;
                positive("f_d", f_d)?;
                positive("f_rot", f_rot)?;
            }
            Topology::StaticFfl { g, d, f_d, alpha } => {
                positive("g", g)?;
                finite("d", d)?;
                positive("f_d", f_d)?;
                finite("alpha", alpha)?;
            }
            Topology::Custom => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Topology::LissajousFfp { .. } => "lissajous_ffp",
            Topology::LineFfp { .. } => "line_ffp",
            Topology::RotatingFfl { .. } => "rotating_ffl",
            Topology::StaticFfl { .. } => "static_ffl",
            Topology::Custom => "custom",
        }
    }

    /// Term list of the ideal topology.
    pub fn terms(&self) -> Result<Vec<SHTerm<T>>> {
        self.validate()?;
        let two = T::of(2.0);
        Ok(match *self {
            Topology::LissajousFfp { g, d, f } => {
                let mut t = selection(g).to_vec();
                for j in 0..3 {
                    t.push(SHTerm::new(j, 0, 0, d[j], TimeModulation::sin(f[j])));
                }
                t
            }
            Topology::LineFfp { g, d, f_d } => {
                let mut t = selection(g).to_vec();
                for j in 0..3 {
                    t.push(SHTerm::new(j, 0, 0, d[j], TimeModulation::sin(f_d)));
                }
                t
            }
            Topology::RotatingFfl { g, d, f_d, f_rot } => {
                let mut t = selection(g).to_vec();
                let q0 = TimeModulation::cos(f_rot);
                let q45 = TimeModulation::sin(f_rot);
                t.push(SHTerm::new(0, 1, 1, g, q0));
                t.push(SHTerm::new(1, 1, -1, -g, q0));
                t.push(SHTerm::new(0, 1, -1, g, q45));
                t.push(SHTerm::new(1, 1, 1, g, q45));
                t.push(SHTerm::new(0, 0, 0, d, TimeModulation::sin_sin(f_d, f_rot)));
                t.push(SHTerm::new(1, 0, 0, d, TimeModulation::sin_cos(f_d, f_rot).with_scale(-T::one())));
                t
            }
            Topology::StaticFfl { g, d, f_d, alpha } => {
                // rotating table with 2π f_rot t replaced by alpha
                let c = TimeModulation::constant();
                let (sa, ca) = alpha.sin_cos();
                let (sh, ch) = (alpha / two).sin_cos();
                let drive = TimeModulation::sin(f_d);
                vec![
                    SHTerm::new(0, 1, 1, g * (ca - T::one()), c),
                    SHTerm::new(0, 1, -1, g * sa, c),
                    SHTerm::new(1, 1, -1, -g * (T::one() + ca), c),
                    SHTerm::new(1, 1, 1, g * sa, c),
                    SHTerm::new(2, 1, 0, two * g, c),
                    SHTerm::new(0, 0, 0, d * sh, drive),
                    SHTerm::new(1, 0, 0, -d * ch, drive),
                ]
            }
            Topology::Custom => return Err(Error::Unsupported("custom topology has no built-in terms".into())),
        })
    }

    /// `(g, d, f_d)` for FFL topologies.
    pub fn ffl_parameters(&self) -> Option<(T, T, T)> {
        match *self {
            Topology::RotatingFfl { g, d, f_d, .. } | Topology::StaticFfl { g, d, f_d, .. } => Some((g, d, f_d)),
            _ => None,
        }
    }

    /// Half-angle `θ(t)` so that the FFL direction is `(cos θ, sin θ, 0)`.
    pub fn ffl_half_angle(&self, t: T) -> Option<T> {
        match *self {
            Topology::RotatingFfl { f_rot, .. } => Some(T::PI() * f_rot * t),
            Topology::StaticFfl { alpha, .. } => Some(alpha / T::of(2.0)),
            _ => None,
        }
    }

    pub fn is_ffl(&self) -> bool {
        self.ffl_parameters().is_some()
    }

    /// Closed-form FFP position.
    pub fn ffp_position(&self, t: T) -> Result<Vec3<T>> {
        let two_pi = T::PI() + T::PI();
        let two = T::of(2.0);
        match *self {
            Topology::LissajousFfp { g, d, f } => Ok(Vec3::new(
                d[0] / g * (two_pi * f[0] * t).sin(),
                d[1] / g * (two_pi * f[1] * t).sin(),
                -d[2] / (two * g) * (two_pi * f[2] * t).sin(),
            )),
            Topology::LineFfp { g, d, f_d } => {
                let v = Vec3::new(d[0] / g, d[1] / g, -d[2] / (two * g));
                Ok(v * (two_pi * f_d * t).sin())
            }
            _ => Err(Error::Unsupported(format!("{} has no field-free point", self.name()))),
        }
    }

    /// Closed-form FFL at time `t`.
    pub fn ffl_locus(&self, t: T) -> Result<LineLocus<T>> {
        let (g, d, f_d) = self
            .ffl_parameters()
            .ok_or_else(|| Error::Unsupported(format!("{} has no field-free line", self.name())))?;
        let theta = self.ffl_half_angle(t).expect("FFL topology");
        let (s, c) = theta.sin_cos();
        let offset = d / (T::of(2.0) * g) * (T::of(2.0) * T::PI() * f_d * t).sin();
        Ok(LineLocus { direction: Vec3::new(c, s, T::zero()), point: Vec3::new(s, -c, T::zero()) * offset })
    }
}

/// Builds the exact term set of an ideal topology.
pub fn build_topology<T: Real>(topology: Topology<T>) -> Result<FieldModel<T>> {
    FieldModel::from_topology(topology, T::of(DEFAULT_VALIDITY_RADIUS))
}

impl<T: Real> FieldModel<T> {
    pub fn from_topology(topology: Topology<T>, radius: T) -> Result<Self> {
        let terms = topology.terms()?;
        Self::with_topology(terms, radius, topology, true)
    }
}

/// FFP position of an unperturbed FFP model.
pub fn ffp_position<T: Real>(model: &FieldModel<T>, t: T) -> Result<Vec3<T>> {
    if !model.is_ideal() {
        return Err(Error::Unsupported("field-free point is only closed-form for ideal models".into()));
    }
    model.topology().ffp_position(t)
}

/// FFL of an unperturbed FFL model.
pub fn ffl_locus<T: Real>(model: &FieldModel<T>, t: T) -> Result<LineLocus<T>> {
    if !model.is_ideal() {
        return Err(Error::Unsupported("field-free line is only closed-form for ideal models".into()));
    }
    model.topology().ffl_locus(t)
}
