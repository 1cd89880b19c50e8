use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::scalar::Real;

/// Shape of a term's time dependence.
///
/// With `ω₁ = 2π f1` and `ω₂ = π f2`:
///
/// | kind     | value                                 |
/// |----------|---------------------------------------|
/// | `Const`  | `scale`                               |
/// | `Sin`    | `scale · sin(ω₁ t + phase)`           |
/// | `Cos`    | `scale · cos(ω₁ t + phase)`           |
/// | `SinSin` | `scale · sin(ω₁ t + phase) sin(ω₂ t)` |
/// | `SinCos` | `scale · sin(ω₁ t + phase) cos(ω₂ t)` |
///
/// The product kinds take the drive frequency as `f1` and the rotation
/// frequency as `f2`; the half-angle `π f2 t` makes the line direction turn
/// by `π` per rotation period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationKind {
    Const,
    Sin,
    Cos,
    SinSin,
    SinCos,
}

impl ModulationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Const => "const",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::SinSin => "sinsin",
            Self::SinCos => "sincos",
        }
    }
}

impl fmt::Display for ModulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModulationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "const" => Self::Const,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "sinsin" => Self::SinSin,
            "sincos" => Self::SinCos,
            other => return Err(Error::Config(format!("unknown modulation kind '{other}'"))),
        })
    }
}

/// Scalar time factor multiplying one spherical-harmonic term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeModulation<T> {
    pub kind: ModulationKind,
    pub f1: T,
    pub f2: T,
    pub phase: T,
    pub scale: T,
}

impl<T: Real> TimeModulation<T> {
    pub fn constant() -> Self {
        Self { kind: ModulationKind::Const, f1: T::zero(), f2: T::zero(), phase: T::zero(), scale: T::one() }
    }

    pub fn sin(f: T) -> Self {
        Self { kind: ModulationKind::Sin, f1: f, ..Self::constant() }
    }

    pub fn cos(f: T) -> Self {
        Self { kind: ModulationKind::Cos, f1: f, ..Self::constant() }
    }

    pub fn sin_sin(f_drive: T, f_rot: T) -> Self {
        Self { kind: ModulationKind::SinSin, f1: f_drive, f2: f_rot, ..Self::constant() }
    }

    pub fn sin_cos(f_drive: T, f_rot: T) -> Self {
        Self { kind: ModulationKind::SinCos, f1: f_drive, f2: f_rot, ..Self::constant() }
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_phase(mut self, phase: T) -> Self {
        self.phase = phase;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.kind == ModulationKind::Const
    }

    /// Value and time derivative at `t`.
    pub fn eval_with_derivative(&self, t: T) -> (T, T) {
        let two_pi = T::PI() + T::PI();
        let w1 = two_pi * self.f1;
        let w2 = T::PI() * self.f2;
        let a = w1 * t + self.phase;
        let (sa, ca) = a.sin_cos();
        let (v, dv) = match self.kind {
            ModulationKind::Const => (T::one(), T::zero()),
            ModulationKind::Sin => (sa, w1 * ca),
            ModulationKind::Cos => (ca, -w1 * sa),
            ModulationKind::SinSin => {
                let (sb, cb) = (w2 * t).sin_cos();
                (sa * sb, w1 * ca * sb + w2 * sa * cb)
            }
            ModulationKind::SinCos => {
                let (sb, cb) = (w2 * t).sin_cos();
                (sa * cb, w1 * ca * cb - w2 * sa * sb)
            }
        };
        (self.scale * v, self.scale * dv)
    }

    #[inline]
    pub fn value(&self, t: T) -> T {
        self.eval_with_derivative(t).0
    }

    #[inline]
    pub fn derivative(&self, t: T) -> T {
        self.eval_with_derivative(t).1
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite() && self.phase.is_finite() && self.scale.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<TimeModulation<f64>> {
        vec![
            TimeModulation::constant().with_scale(0.3),
            TimeModulation::sin(25e3).with_phase(0.4),
            TimeModulation::cos(25e3).with_scale(-2.0),
            TimeModulation::sin_sin(25e3, 2e3),
            TimeModulation::sin_cos(25e3, 2e3).with_scale(-1.0).with_phase(1.1),
        ]
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-10;
        for m in all_kinds() {
            for i in 0..50 {
                let t = 1.3e-5 * i as f64 + 2.1e-7;
                let fd = (m.value(t + h) - m.value(t - h)) / (2.0 * h);
                let an = m.derivative(t);
                let scale = 2.0 * std::f64::consts::PI * 27e3 * m.scale.abs();
                assert!((fd - an).abs() < 1e-4 * scale, "{:?} at {t}: {fd} vs {an}", m.kind);
            }
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        assert_eq!(TimeModulation::<f64>::constant().derivative(3.7), 0.0);
    }

    #[test]
    fn kind_round_trips_through_text() {
        for m in all_kinds() {
            assert_eq!(m.kind.as_str().parse::<ModulationKind>().unwrap(), m.kind);
        }
        assert!("tan".parse::<ModulationKind>().is_err());
    }
}
