use rayon::prelude::*;

use super::hash::{system_matrix_hash, ConfigHasher};
use super::matrix::{RowBlock, SystemMatrix};
use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::forward::{CellQuadrature, ReceiveCoil, SignalTrace};
use crate::magnetization::MagnetizationApprox;
use crate::phantom::GridSpec;
use crate::scalar::{mu0, Real};
use crate::vec3::Vec3;

/// Default cap on stored nonzeros (about 0.6 GB with the transpose copy).
pub const DEFAULT_NNZ_CAP: usize = 50_000_000;

/// `K_ν(r, t) = −μ0 ⟨ρ_ν(r), dB/dt (r, t)⟩`.
pub fn kernel<T: Real>(model: &FieldModel<T>, coil: &ReceiveCoil<T>, r: Vec3<T>, t: T) -> T {
    -mu0::<T>() * coil.sensitivity_at(r).dot(model.eval_dt(r, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub subsampling: usize,
    pub nnz_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { subsampling: 1, nnz_cap: DEFAULT_NNZ_CAP }
    }
}

/// Sample rate if `times` are uniformly spaced.
pub fn uniform_rate<T: Real>(times: &[T]) -> Option<T> {
    if times.len() < 2 {
        return None;
    }
    let dt = (times[times.len() - 1] - times[0]) / T::of_usize(times.len() - 1);
    let tol = dt.abs() * T::of(1e-6);
    if dt > T::zero() && times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= tol) {
        Some(dt.recip())
    } else {
        None
    }
}

fn row_entries<T: Real>(cq: &CellQuadrature<T>, approx: &MagnetizationApprox<T>, t: T) -> Vec<(u32, T)> {
    let (f, df) = cq.time_factors(t);
    let mut row = Vec::new();
    for (i, &k) in cq.cells().iter().enumerate() {
        let e = cq.piecewise_entry(i, &f, &df, approx);
        if e != T::zero() {
            row.push((k as u32, e));
        }
    }
    row
}

/// Single-coil system matrix: entry `(j, k)` is `Σ_q w s_n(q) K(q, t_j)`
/// over the sub-samples `q` of cell `k` with `|B(q, t_j)| ∈ I_n`.
pub fn build_system_matrix<T: Real>(
    model: &FieldModel<T>,
    approx: &MagnetizationApprox<T>,
    coil: &ReceiveCoil<T>,
    times: &[T],
    grid: &GridSpec<T>,
    opts: &BuildOptions,
) -> Result<SystemMatrix<T>> {
    if times.is_empty() {
        return Err(Error::Config("system matrix needs at least one sample time".into()));
    }
    let cq = CellQuadrature::all(model, grid, coil, opts.subsampling);

    let probes = times.len().min(32);
    let probe_nnz: usize = (0..probes)
        .into_par_iter()
        .map(|p| row_entries(&cq, approx, times[p * times.len() / probes]).len())
        .sum();
    let estimate = probe_nnz as f64 / probes as f64 * times.len() as f64;
    if estimate > opts.nnz_cap as f64 {
        return Err(Error::ResourceCap(format!(
            "estimated {estimate:.3e} nonzeros exceeds the cap of {} ({} rows x {} cells)",
            opts.nnz_cap,
            times.len(),
            grid.len()
        )));
    }
    log::debug!("system matrix: {} rows, {} cells, ~{estimate:.3e} nonzeros", times.len(), grid.len());

    let rows: Vec<Vec<(u32, T)>> = times.par_iter().map(|&t| row_entries(&cq, approx, t)).collect();
    let hash = system_matrix_hash(model, approx, coil, times, grid, opts.subsampling);
    let block = RowBlock { rows: times.len(), coil: coil.index, sample_rate: uniform_rate(times) };
    SystemMatrix::from_rows(rows, *grid, hash, vec![block])
}

/// Vertical concatenation of per-coil matrices and their traces.
pub fn stack_coils<T: Real>(matrices: &[SystemMatrix<T>], traces: &[SignalTrace<T>]) -> Result<(SystemMatrix<T>, Vec<T>)> {
    if matrices.is_empty() || matrices.len() != traces.len() {
        return Err(Error::Config(format!("{} matrices for {} traces", matrices.len(), traces.len())));
    }
    let grid = matrices[0].grid;
    let mut rows = Vec::new();
    let mut data = Vec::new();
    let mut blocks = Vec::new();
    let mut h = ConfigHasher::new();
    h.str("stack");
    for (m, tr) in matrices.iter().zip(traces) {
        if m.grid != grid || m.cols() != matrices[0].cols() {
            return Err(Error::Config("stacked matrices must share the reconstruction grid".into()));
        }
        if m.rows() != tr.len() {
            return Err(Error::Config(format!("matrix has {} rows but trace has {} samples", m.rows(), tr.len())));
        }
        for r in 0..m.rows() {
            rows.push(m.row(r).map(|(c, v)| (c as u32, v)).collect());
        }
        data.extend_from_slice(&tr.samples);
        blocks.extend_from_slice(&m.blocks);
        h.u64(m.hash);
    }
    let hash = if matrices.len() == 1 { matrices[0].hash } else { h.finish() };
    Ok((SystemMatrix::from_rows(rows, grid, hash, blocks)?, data))
}
