use std::fmt;
use std::str::FromStr;

use super::langevin::MagnetizationCurve;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the constant slope on each interval is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxScheme {
    /// Chord slope of `m̄` over the interval.
    Secant,
    /// `m̄′(0)` on the first interval, `m̄′` at the midpoint elsewhere.
    Tangent,
    /// `m̄′` at the midpoint on every interval, including the first.
    Midpoint,
}

impl ApproxScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Secant => "secant",
            Self::Tangent => "tangent",
            Self::Midpoint => "midpoint",
        }
    }
}

impl fmt::Display for ApproxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ApproxScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "secant" => Ok(Self::Secant),
            "tangent" => Ok(Self::Tangent),
            "midpoint" => Ok(Self::Midpoint),
            _ => Err(Error::Config(format!("unknown approximation scheme '{s}'"))),
        }
    }
}

/// Piecewise-constant approximation `m̄′_N` of `m̄′` on `[0, b)`, extended
/// evenly and set to zero for `|x| ≥ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationApprox<T> {
    nodes: Vec<T>,
    slopes: Vec<T>,
    cumulative: Vec<T>,
    scheme: ApproxScheme,
}

fn full_nodes<T: Real>(interior: &[T], b: T) -> Result<Vec<T>> {
    if !(b > T::zero() && b.is_finite()) {
        return Err(Error::Domain(format!("threshold b must be positive, got {b}")));
    }
    let mut nodes = Vec::with_capacity(interior.len() + 2);
    nodes.push(T::zero());
    nodes.extend_from_slice(interior);
    nodes.push(b);
    for w in nodes.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(format!("nodes must be strictly increasing in (0, b): {} then {}", w[0], w[1])));
        }
    }
    Ok(nodes)
}

impl<T: Real> MagnetizationApprox<T> {
    /// Builds slopes from `m̄` for the given interior nodes and threshold.
    pub fn build<M: MagnetizationCurve<T>>(curve: &M, interior: &[T], b: T, scheme: ApproxScheme) -> Result<Self> {
        let nodes = full_nodes(interior, b)?;
        let half = T::of(0.5);
        let slopes = nodes
            .windows(2)
            .enumerate()
            .map(|(n, w)| match scheme {
                ApproxScheme::Secant => (curve.mbar(w[1]) - curve.mbar(w[0])) / (w[1] - w[0]),
                ApproxScheme::Tangent if n == 0 => curve.mbar_prime(T::zero()),
                ApproxScheme::Tangent | ApproxScheme::Midpoint => curve.mbar_prime(half * (w[0] + w[1])),
            })
            .collect();
        Self::from_parts(nodes, slopes, scheme)
    }

    /// Assembles an approximation from full node list `0 = x_0 < … < x_{N+1} = b`
    /// and `N + 1` slopes.
    pub fn from_parts(nodes: Vec<T>, slopes: Vec<T>, scheme: ApproxScheme) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != T::zero() {
            return Err(Error::Domain("node list must start at 0 and contain b".into()));
        }
        let b = *nodes.last().unwrap();
        full_nodes(&nodes[1..nodes.len() - 1], b)?;
        if slopes.len() + 1 != nodes.len() {
            return Err(Error::Domain(format!("{} slopes for {} intervals", slopes.len(), nodes.len() - 1)));
        }
        if slopes.iter().any(|s| !s.is_finite()) {
            return Err(Error::Domain("non-finite slope".into()));
        }
        let mut cumulative = Vec::with_capacity(nodes.len());
        cumulative.push(T::zero());
        for (w, &s) in nodes.windows(2).zip(&slopes) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + s * (w[1] - w[0]));
        }
        Ok(Self { nodes, slopes, cumulative, scheme })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn interior_nodes(&self) -> &[T] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn scheme(&self) -> ApproxScheme {
        self.scheme
    }

    pub fn threshold(&self) -> T {
        *self.nodes.last().unwrap()
    }

    /// Number of interior nodes `N`.
    pub fn n(&self) -> usize {
        self.slopes.len() - 1
    }

    /// Index `n` with `|x| ∈ [x_n, x_{n+1})`, `None` for `|x| ≥ b`.
    #[inline]
    pub fn interval(&self, x: T) -> Option<usize> {
        let a = x.abs();
        if !(a < self.threshold()) {
            return None;
        }
        Some(self.nodes.partition_point(|&v| v <= a) - 1)
    }

    /// `m̄′_N(x)`.
    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.interval(x).map_or(T::zero(), |n| self.slopes[n])
    }

    /// `m̄_N(x) = ∫_0^x m̄′_N`, odd in `x`.
    pub fn antiderivative(&self, x: T) -> T {
        let a = x.abs();
        let v = match self.interval(a) {
            Some(n) => self.cumulative[n] + self.slopes[n] * (a - self.nodes[n]),
            None => *self.cumulative.last().unwrap(),
        };
        if x < T::zero() {
            -v
        } else {
            v
        }
    }

    pub fn max_gap(&self) -> T {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max)
    }

    pub fn sum_squared_gaps(&self) -> T {
        self.nodes.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum()
    }
}

pub fn build_approx<T: Real, M: MagnetizationCurve<T>>(
    curve: &M,
    interior: &[T],
    b: T,
    scheme: ApproxScheme,
) -> Result<MagnetizationApprox<T>> {
    MagnetizationApprox::build(curve, interior, b, scheme)
}

pub fn eval_approx<T: Real>(approx: &MagnetizationApprox<T>, x: T) -> T {
    approx.eval(x)
}

pub fn eval_approx_antiderivative<T: Real>(approx: &MagnetizationApprox<T>, x: T) -> T {
    approx.antiderivative(x)
}

/// `sup |m̄″|` on `[0, b]` from `samples` equispaced points.
pub fn sup_second_derivative<T: Real, M: MagnetizationCurve<T>>(curve: &M, b: T, samples: usize) -> T {
    let n = samples.max(2);
    (0..n)
        .map(|i| curve.mbar_second(b * T::of_usize(i) / T::of_usize(n - 1)).abs())
        .fold(T::zero(), T::max)
}

/// Right-hand side of the derivative bound: `sup|m̄″| · max gap`.
pub fn derivative_error_bound<T: Real>(approx: &MagnetizationApprox<T>, sup_second: T) -> T {
    sup_second * approx.max_gap()
}

/// Right-hand side of the antiderivative bound: `sup|m̄″| · Σ gap²`.
pub fn antiderivative_error_bound<T: Real>(approx: &MagnetizationApprox<T>, sup_second: T) -> T {
    sup_second * approx.sum_squared_gaps()
}

/// Exact `∫_0^b |m̄′ − m̄′_N|` for a curve whose `m̄′` strictly decreases on
/// `[0, b]`. On each interval the integrand changes sign at most once, at
/// the point `ξ` with `m̄′(ξ) = s_n`.
pub fn l1_error<T: Real, M: MagnetizationCurve<T>>(curve: &M, approx: &MagnetizationApprox<T>) -> T {
    approx
        .nodes()
        .windows(2)
        .zip(approx.slopes())
        .map(|(w, &s)| interval_l1(curve, w[0], w[1], s))
        .sum()
}

pub(crate) fn interval_l1<T: Real, M: MagnetizationCurve<T>>(curve: &M, a: T, c: T, s: T) -> T {
    let (ma, mc) = (curve.mbar(a), curve.mbar(c));
    if s >= curve.mbar_prime(a) {
        return s * (c - a) - (mc - ma);
    }
    if s <= curve.mbar_prime(c) {
        return (mc - ma) - s * (c - a);
    }
    let (mut lo, mut hi) = (a, c);
    for _ in 0..200 {
        let mid = T::of(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve.mbar_prime(mid) > s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = T::of(0.5) * (lo + hi);
    let mx = curve.mbar(xi);
    (mx - ma - s * (xi - a)) + (s * (c - xi) - (mc - mx))
}
