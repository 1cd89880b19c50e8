use rayon::prelude::*;

use super::coil::ReceiveCoil;
use super::trace::{AcquisitionConfig, SignalTrace};
use crate::error::{Error, Result};
use crate::fields::{CompiledField, FieldModel};
use crate::magnetization::{LangevinParams, MagnetizationApprox, MagnetizationCurve};
use crate::phantom::{ConcentrationGrid, GridSpec};
use crate::scalar::{mu0, Real};
use crate::vec3::Vec3;

/// Quadrature settings shared by the simulators and the system matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions<T> {
    /// Sub-samples per cell along each non-singleton axis.
    pub subsampling: usize,
    /// Step of the central difference in the general model; defaults to
    /// the sample spacing.
    pub fd_step: Option<T>,
}

impl<T> Default for ForwardOptions<T> {
    fn default() -> Self {
        Self { subsampling: 1, fd_step: None }
    }
}

/// Quadrature nodes of a subset of cells with the field pre-evaluated.
#[derive(Debug, Clone)]
pub struct CellQuadrature<T> {
    cells: Vec<usize>,
    field: CompiledField<T>,
    // per-point sensitivity, empty for constant coils
    sensitivity: Vec<Vec3<T>>,
    constant_sensitivity: Vec3<T>,
    per_cell: usize,
    weight: T,
}

impl<T: Real> CellQuadrature<T> {
    pub fn new(model: &FieldModel<T>, spec: &GridSpec<T>, cells: Vec<usize>, coil: &ReceiveCoil<T>, subsampling: usize) -> Self {
        let q = spec.quadrature_offsets(subsampling);
        let mut points = Vec::with_capacity(cells.len() * q.len());
        for &k in &cells {
            let c = spec.center(k);
            for o in &q {
                points.push(c + *o);
            }
        }
        let sensitivity = if coil.is_constant() { Vec::new() } else { points.iter().map(|&p| coil.sensitivity_at(p)).collect() };
        let per_cell = q.len();
        Self {
            cells,
            field: model.compile(&points),
            sensitivity,
            constant_sensitivity: coil.sensitivity,
            per_cell,
            weight: spec.cell_volume() / T::of_usize(per_cell),
        }
    }

    /// All cells of the grid.
    pub fn all(model: &FieldModel<T>, spec: &GridSpec<T>, coil: &ReceiveCoil<T>, subsampling: usize) -> Self {
        Self::new(model, spec, (0..spec.len()).collect(), coil, subsampling)
    }

    /// Cells with nonzero concentration.
    pub fn support(model: &FieldModel<T>, grid: &ConcentrationGrid<T>, coil: &ReceiveCoil<T>, subsampling: usize) -> Self {
        let cells = grid.values.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(|(k, _)| k).collect();
        Self::new(model, &grid.spec, cells, coil, subsampling)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn time_factors(&self, t: T) -> (Vec<T>, Vec<T>) {
        self.field.time_factors(t)
    }

    #[inline]
    fn rho(&self, q: usize) -> Vec3<T> {
        if self.sensitivity.is_empty() {
            self.constant_sensitivity
        } else {
            self.sensitivity[q]
        }
    }

    /// `Σ_q w s_n(q) K(q, t)` over the sub-samples of local cell `i`, where
    /// `n(q)` is the interval containing `|B(q, t)|`. This is one system
    /// matrix entry.
    #[inline]
    pub fn piecewise_entry(&self, i: usize, f: &[T], df: &[T], approx: &MagnetizationApprox<T>) -> T {
        let m = mu0::<T>();
        let mut acc = T::zero();
        for q in i * self.per_cell..(i + 1) * self.per_cell {
            let b = self.field.combine(q, f);
            if let Some(n) = approx.interval(b.norm()) {
                let db = self.field.combine(q, df);
                let k = -m * self.rho(q).dot(db);
                acc += approx.slopes()[n] * k * self.weight;
            }
        }
        acc
    }

    /// `Σ_q w m̄′(|B|) K(q, t)` over local cell `i`.
    #[inline]
    fn parallel_entry<M: MagnetizationCurve<T>>(&self, i: usize, f: &[T], df: &[T], curve: &M) -> T {
        let m = mu0::<T>();
        let mut acc = T::zero();
        for q in i * self.per_cell..(i + 1) * self.per_cell {
            let b = self.field.combine(q, f);
            let db = self.field.combine(q, df);
            acc += curve.mbar_prime(b.norm()) * (-m * self.rho(q).dot(db)) * self.weight;
        }
        acc
    }

    /// `Σ_q w ⟨ρ, m̄(|B|) B/|B|⟩` over local cell `i`.
    #[inline]
    fn moment_entry<M: MagnetizationCurve<T>>(&self, i: usize, f: &[T], curve: &M) -> T {
        let mut acc = T::zero();
        for q in i * self.per_cell..(i + 1) * self.per_cell {
            let b = self.field.combine(q, f);
            let nb = b.norm();
            if nb > T::zero() {
                acc += curve.mbar(nb) / nb * self.rho(q).dot(b) * self.weight;
            }
        }
        acc
    }
}

fn values_on<T: Real>(grid: &ConcentrationGrid<T>, cq: &CellQuadrature<T>) -> Vec<T> {
    cq.cells().iter().map(|&k| grid.values[k]).collect()
}

fn trace_from<T: Real>(samples: Vec<T>, acq: &AcquisitionConfig<T>, coil: &ReceiveCoil<T>) -> Result<SignalTrace<T>> {
    SignalTrace::new(samples, acq.sample_rate, acq.t0, coil.index)
}

/// Faraday model `u = −μ0 d/dt Σ_k c_k ∫_{Q_k} ⟨ρ, m̄(|B|) B/|B|⟩`, with the
/// time derivative taken by central differences.
pub fn simulate_general<T: Real>(
    model: &FieldModel<T>,
    grid: &ConcentrationGrid<T>,
    coil: &ReceiveCoil<T>,
    acq: &AcquisitionConfig<T>,
    params: &LangevinParams<T>,
    opts: &ForwardOptions<T>,
) -> Result<SignalTrace<T>> {
    acq.validate()?;
    let cq = CellQuadrature::support(model, grid, coil, opts.subsampling);
    let c = values_on(grid, &cq);
    let moment = |t: T| -> T {
        let (f, _) = cq.time_factors(t);
        let mut acc = T::zero();
        for (i, &ci) in c.iter().enumerate() {
            acc += ci * cq.moment_entry(i, &f, params);
        }
        acc
    };
    let n = acq.sample_count();
    let dt = acq.sample_rate.recip();
    let m = mu0::<T>();
    let samples: Vec<T> = match opts.fd_step {
        None => {
            // moments at t_{-1} .. t_n, reused by neighbouring samples
            let mom: Vec<T> = (0..n + 2).into_par_iter().map(|i| moment(acq.t0 + (T::of_usize(i) - T::one()) * dt)).collect();
            (0..n).map(|i| -m * (mom[i + 2] - mom[i]) / (dt + dt)).collect()
        }
        Some(h) => {
            if !(h > T::zero()) {
                return Err(Error::Config("finite-difference step must be positive".into()));
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let t = acq.t0 + T::of_usize(i) * dt;
                    -m * (moment(t + h) - moment(t - h)) / (h + h)
                })
                .collect()
        }
    };
    trace_from(samples, acq, coil)
}

/// Parallel-field model `u = −μ0 Σ_k c_k ∫_{Q_k} ⟨ρ, dB/dt⟩ m̄′(|B|)`.
pub fn simulate_parallel<T: Real>(
    model: &FieldModel<T>,
    grid: &ConcentrationGrid<T>,
    coil: &ReceiveCoil<T>,
    acq: &AcquisitionConfig<T>,
    params: &LangevinParams<T>,
    opts: &ForwardOptions<T>,
) -> Result<SignalTrace<T>> {
    acq.validate()?;
    let cq = CellQuadrature::support(model, grid, coil, opts.subsampling);
    let c = values_on(grid, &cq);
    let samples = acq
        .sample_times()
        .into_par_iter()
        .map(|t| {
            let (f, df) = cq.time_factors(t);
            let mut acc = T::zero();
            for (i, &ci) in c.iter().enumerate() {
                acc += ci * cq.parallel_entry(i, &f, &df, params);
            }
            acc
        })
        .collect();
    trace_from(samples, acq, coil)
}

/// Parallel-field model with `m̄′` replaced by the approximation `m̄′_N`.
///
/// Accumulates `S_{jk} c_k` over cells in ascending order with the same
/// per-entry arithmetic as the system matrix, so `S c` reproduces it exactly.
pub fn simulate_piecewise<T: Real>(
    model: &FieldModel<T>,
    grid: &ConcentrationGrid<T>,
    coil: &ReceiveCoil<T>,
    acq: &AcquisitionConfig<T>,
    approx: &MagnetizationApprox<T>,
    opts: &ForwardOptions<T>,
) -> Result<SignalTrace<T>> {
    acq.validate()?;
    let samples = simulate_piecewise_at(model, grid, coil, &acq.sample_times(), approx, opts.subsampling);
    trace_from(samples, acq, coil)
}

/// [`simulate_piecewise`] at arbitrary times, returning raw samples.
pub fn simulate_piecewise_at<T: Real>(
    model: &FieldModel<T>,
    grid: &ConcentrationGrid<T>,
    coil: &ReceiveCoil<T>,
    times: &[T],
    approx: &MagnetizationApprox<T>,
    subsampling: usize,
) -> Vec<T> {
    let cq = CellQuadrature::support(model, grid, coil, subsampling);
    let c = values_on(grid, &cq);
    times
        .par_iter()
        .map(|&t| {
            let (f, df) = cq.time_factors(t);
            let mut acc = T::zero();
            for (i, &ci) in c.iter().enumerate() {
                let e = cq.piecewise_entry(i, &f, &df, approx);
                if e != T::zero() {
                    acc += e * ci;
                }
            }
            acc
        })
        .collect()
}
