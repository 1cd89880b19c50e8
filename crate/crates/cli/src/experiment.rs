use mpi3d::fbp::{fbp_reconstruct_with, signal_to_sinogram, zero_pad, FbpWindow, Sinogram, SinogramOptions};
use mpi3d::fields::{load_field_coefficients, perturb_field, FieldModel, Topology};
use mpi3d::forward::{
    add_noise, apply_highpass, simulate_general, simulate_parallel, simulate_piecewise, AcquisitionConfig, ForwardOptions,
    ReceiveCoil, SignalTrace,
};
use mpi3d::magnetization::{approx_from_strategy, ApproxScheme, LangevinParams, MagnetizationApprox, NodeStrategy};
use mpi3d::phantom::{build_disc_phantom, ConcentrationGrid, GridSpec};
use mpi3d::recon::{lsqr_solve, nrmse, LsqrOptions, LsqrResult};
use mpi3d::sysmat::{build_system_matrix, stack_coils, system_matrix_hash, BuildOptions, FilteredOperator, SystemMatrix};

use crate::config::ExperimentConfig;
use crate::error::CliError;

const MM: f64 = 1e-3;
const MT: f64 = 1e-3;

/// Everything a pipeline stage needs, resolved to SI units.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    /// Nominal geometry; FBP only knows this.
    pub topology: Topology<f64>,
    /// The field the scanner actually produces.
    pub model: FieldModel<f64>,
    pub tracer: LangevinParams<f64>,
    pub acq: AcquisitionConfig<f64>,
    pub coils: Vec<ReceiveCoil<f64>>,
    /// Phantom on the signal grid.
    pub phantom: ConcentrationGrid<f64>,
    /// Phantom on the reconstruction grid.
    pub truth: ConcentrationGrid<f64>,
}

/// Algebraic reconstruction with its residual history.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub image: ConcentrationGrid<f64>,
    pub lsqr: LsqrResult<f64>,
}

pub fn coil_name(index: usize) -> &'static str {
    ["x", "y", "z"][index]
}

fn parse_coil(s: &str) -> Result<ReceiveCoil<f64>, CliError> {
    match s {
        "x" => Ok(ReceiveCoil::axis(0)),
        "y" => Ok(ReceiveCoil::axis(1)),
        "z" => Ok(ReceiveCoil::axis(2)),
        _ => Err(CliError::Config(format!("unknown coil '{s}' (expected x, y or z)"))),
    }
}

pub fn parse_topology(c: &ExperimentConfig) -> Result<Topology<f64>, CliError> {
    let f = &c.field;
    let a = &c.acquisition;
    let g = f.gradient_t_per_m;
    let vec_t = f.drive_vector_mt.map(|v| v * MT);
    let t = match f.topology.as_str() {
        "rotating_ffl" => Topology::RotatingFfl { g, d: f.drive_mt * MT, f_d: a.drive_hz, f_rot: a.rotation_hz },
        "static_ffl" => Topology::StaticFfl { g, d: f.drive_mt * MT, f_d: a.drive_hz, alpha: f.alpha_deg.to_radians() },
        "line_ffp" => Topology::LineFfp { g, d: vec_t, f_d: a.drive_hz },
        "lissajous_ffp" => Topology::LissajousFfp { g, d: vec_t, f: f.lissajous_hz },
        other => return Err(CliError::Config(format!("unknown topology '{other}'"))),
    };
    t.validate()?;
    Ok(t)
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, CliError> {
        let topology = parse_topology(&config)?;
        let radius = config.field.radius_mm * MM;
        let base = match &config.field.coefficients {
            Some(path) => {
                if !path.exists() {
                    return Err(CliError::Missing(format!("coefficient file {}", path.display())));
                }
                load_field_coefficients(path)?
            }
            None => FieldModel::from_topology(topology, radius)?,
        };
        let model = if config.field.perturbation_magnitude > 0.0 {
            perturb_field(&base, config.field.perturbation_seed, config.field.perturbation_magnitude)?
        } else {
            base
        };
        let tracer = LangevinParams::new(config.tracer.m0, config.tracer.lambda_per_t)?;

        let a = &config.acquisition;
        let f_rot = if matches!(topology, Topology::RotatingFfl { .. }) { a.rotation_hz } else { 0.0 };
        let duration = a.duration_s.unwrap_or(if f_rot > 0.0 { 1.0 / f_rot } else { 4.0 / a.drive_hz });
        let mut acq = AcquisitionConfig::new(a.drive_hz, f_rot, a.sample_rate_hz, duration)?;
        acq.highpass_cutoff = a.highpass_factor * a.drive_hz;
        acq.validate()?;
        if a.coils.is_empty() {
            return Err(CliError::Config("at least one receive coil is required".into()));
        }
        let coils = a.coils.iter().map(|s| parse_coil(s)).collect::<Result<Vec<_>, _>>()?;
        if !(a.noise_relative >= 0.0) {
            return Err(CliError::Config("noise_relative must be nonnegative".into()));
        }

        let gr = &config.grid;
        if gr.subsampling == 0 {
            return Err(CliError::Config("subsampling must be at least 1".into()));
        }
        let fov = gr.fov_mm * MM;
        let diameters: Vec<f64> = gr.disc_diameters_mm.iter().map(|d| d * MM).collect();
        let signal = GridSpec::planar_square(gr.signal_n, fov, gr.thickness_mm * MM)?;
        let recon = GridSpec::planar_square(gr.recon_n, fov, gr.thickness_mm * MM)?;
        let phantom = build_disc_phantom(fov, &diameters, signal)?;
        let truth = build_disc_phantom(fov, &diameters, recon)?;

        if config.solver.iterations == 0 {
            return Err(CliError::Config("solver needs at least one iteration".into()));
        }
        config.approx.scheme.parse::<ApproxScheme>()?;
        config.approx.strategy.parse::<NodeStrategy>()?;
        config.fbp.window.parse::<FbpWindow>()?;
        Ok(Self { config, topology, model, tracer, acq, coils, phantom, truth })
    }

    pub fn recon_spec(&self) -> GridSpec<f64> {
        self.truth.spec
    }

    pub fn approx(&self) -> Result<MagnetizationApprox<f64>, CliError> {
        let a = &self.config.approx;
        self.approx_with(a.nodes, a.threshold_mt * MT, a.strategy.parse()?, a.scheme.parse()?)
    }

    pub fn approx_with(
        &self,
        n: usize,
        b: f64,
        strategy: NodeStrategy,
        scheme: ApproxScheme,
    ) -> Result<MagnetizationApprox<f64>, CliError> {
        Ok(approx_from_strategy(&self.tracer, n, b, strategy, scheme)?)
    }

    /// Noisy traces of the phantom, one per coil, before the high-pass.
    pub fn simulate(&self) -> Result<Vec<SignalTrace<f64>>, CliError> {
        let a = &self.config.acquisition;
        let opts = ForwardOptions::default();
        self.coils
            .iter()
            .map(|coil| {
                let u = match a.simulator.as_str() {
                    "parallel" => simulate_parallel(&self.model, &self.phantom, coil, &self.acq, &self.tracer, &opts)?,
                    "general" => simulate_general(&self.model, &self.phantom, coil, &self.acq, &self.tracer, &opts)?,
                    "piecewise" => simulate_piecewise(&self.model, &self.phantom, coil, &self.acq, &self.approx()?, &opts)?,
                    other => return Err(CliError::Config(format!("unknown simulator '{other}'"))),
                };
                let sigma = a.noise_relative * u.rms();
                Ok(add_noise(&u, sigma, a.noise_seed + coil.index as u64))
            })
            .collect()
    }

    pub fn filter(&self, traces: &[SignalTrace<f64>]) -> Vec<SignalTrace<f64>> {
        traces.iter().map(|t| apply_highpass(t, self.acq.highpass_cutoff)).collect()
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions { subsampling: self.config.grid.subsampling, nnz_cap: self.config.solver.nnz_cap }
    }

    pub fn system_matrices(&self, approx: &MagnetizationApprox<f64>) -> Result<Vec<SystemMatrix<f64>>, CliError> {
        let times = self.acq.sample_times();
        let spec = self.recon_spec();
        self.coils
            .iter()
            .map(|c| Ok(build_system_matrix(&self.model, approx, c, &times, &spec, &self.build_options())?))
            .collect()
    }

    /// Expected hash of each coil's matrix under the current configuration.
    pub fn matrix_hashes(&self, approx: &MagnetizationApprox<f64>) -> Vec<u64> {
        let times = self.acq.sample_times();
        let spec = self.recon_spec();
        self.coils
            .iter()
            .map(|c| system_matrix_hash(&self.model, approx, c, &times, &spec, self.config.grid.subsampling))
            .collect()
    }

    /// LSQR on the high-passed operator against high-passed data.
    pub fn reconstruct(&self, matrices: &[SystemMatrix<f64>], filtered: &[SignalTrace<f64>]) -> Result<Reconstruction, CliError> {
        let (s, data) = stack_coils(matrices, filtered)?;
        let op = FilteredOperator::new(&s, self.acq.highpass_cutoff)?;
        let opts = LsqrOptions { max_iterations: self.config.solver.iterations, record_residuals: true, ..Default::default() };
        let lsqr = lsqr_solve(&op, &data, &opts)?;
        if let Some(w) = &lsqr.warning {
            log::warn!("{w}");
        }
        let image = ConcentrationGrid::from_values(s.grid, lsqr.x.clone())?;
        Ok(Reconstruction { image, lsqr })
    }

    pub fn sinogram_options(&self) -> SinogramOptions<f64> {
        let f = &self.config.fbp;
        SinogramOptions {
            n_displacements: f.displacements,
            deconvolve: f.deconvolve,
            nsr: f.nsr,
            cos_guard: f.cos_guard,
            decimation: f.decimation,
            thickness: self.config.grid.thickness_mm * MM,
        }
    }

    /// Sinogram from the filtered traces, zero padded as configured.
    pub fn sinogram(&self, filtered: &[SignalTrace<f64>]) -> Result<Sinogram<f64>, CliError> {
        let sino = signal_to_sinogram(filtered, &self.coils, &self.topology, &self.tracer, &self.sinogram_options())?;
        let pad = self.config.fbp.pad_half_width_mm * MM;
        if pad > sino.half_width() {
            Ok(zero_pad(&sino, pad)?)
        } else {
            Ok(sino)
        }
    }

    pub fn fbp(&self, sino: &Sinogram<f64>) -> Result<ConcentrationGrid<f64>, CliError> {
        Ok(fbp_reconstruct_with(sino, &self.recon_spec(), self.config.fbp.window.parse()?)?)
    }

    pub fn nrmse(&self, image: &ConcentrationGrid<f64>) -> Result<f64, CliError> {
        Ok(nrmse(image, &self.truth)?)
    }
}

/// Algebraic and FBP errors of one complete in-memory run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub algebraic: f64,
    pub fbp: f64,
}

pub fn compare_methods(exp: &Experiment) -> Result<Comparison, CliError> {
    let filtered = exp.filter(&exp.simulate()?);
    let matrices = exp.system_matrices(&exp.approx()?)?;
    let rec = exp.reconstruct(&matrices, &filtered)?;
    let fbp = exp.fbp(&exp.sinogram(&filtered)?)?;
    Ok(Comparison { algebraic: exp.nrmse(&rec.image)?, fbp: exp.nrmse(&fbp)? })
}
