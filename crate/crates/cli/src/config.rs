//! Experiment configuration. Lengths are given in mm and fields in mT in the
//! file; everything is converted to SI when the experiment is set up.

use std::path::{Path, PathBuf};

use mpi3d::sysmat::{ConfigHasher, DEFAULT_NNZ_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: FieldSection,
    pub acquisition: AcquisitionSection,
    pub tracer: TracerSection,
    pub approx: ApproxSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub fbp: FbpSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    /// `rotating_ffl`, `static_ffl`, `line_ffp` or `lissajous_ffp`.
    pub topology: String,
    /// Coefficient file replacing the built-in topology; the topology is
    /// still used for FBP geometry.
    pub coefficients: Option<PathBuf>,
    pub gradient_t_per_m: f64,
    /// Drive amplitude of the FFL topologies.
    pub drive_mt: f64,
    /// Per-axis drive amplitudes of the FFP topologies.
    pub drive_vector_mt: [f64; 3],
    /// Lissajous frequencies.
    pub lissajous_hz: [f64; 3],
    /// Orientation of the static FFL.
    pub alpha_deg: f64,
    pub radius_mm: f64,
    pub perturbation_seed: u64,
    /// Zero keeps the ideal field.
    pub perturbation_magnitude: f64,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            topology: "rotating_ffl".into(),
            coefficients: None,
            gradient_t_per_m: 1.0,
            drive_mt: 120.0,
            drive_vector_mt: [12.0, 0.0, 0.0],
            lissajous_hz: [25e3, 24e3, 23e3],
            alpha_deg: 0.0,
            radius_mm: 50.0,
            perturbation_seed: 7,
            perturbation_magnitude: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionSection {
    pub drive_hz: f64,
    pub rotation_hz: f64,
    pub sample_rate_hz: f64,
    /// Defaults to one rotation, or four drive periods without rotation.
    pub duration_s: Option<f64>,
    /// Coil axes, any of `x`, `y`, `z`.
    pub coils: Vec<String>,
    /// Noise standard deviation relative to the per-coil signal RMS.
    pub noise_relative: f64,
    pub noise_seed: u64,
    /// High-pass cutoff as a multiple of the drive frequency.
    pub highpass_factor: f64,
    /// Forward model for the data: `parallel`, `general` or `piecewise`.
    pub simulator: String,
}

impl Default for AcquisitionSection {
    fn default() -> Self {
        Self {
            drive_hz: 25e3,
            rotation_hz: 2000.0,
            sample_rate_hz: 8e6,
            duration_s: None,
            coils: vec!["x".into(), "y".into()],
            noise_relative: 1e-3,
            noise_seed: 11,
            highpass_factor: 1.4,
            simulator: "parallel".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TracerSection {
    pub m0: f64,
    pub lambda_per_t: f64,
}

impl Default for TracerSection {
    fn default() -> Self {
        Self { m0: 1.0, lambda_per_t: 1500.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxSection {
    pub threshold_mt: f64,
    pub nodes: usize,
    /// `secant`, `tangent` or `midpoint`.
    pub scheme: String,
    /// `equidistant` or `l1_optimal`.
    pub strategy: String,
}

impl Default for ApproxSection {
    fn default() -> Self {
        Self { threshold_mt: 10.0, nodes: 30, scheme: "secant".into(), strategy: "equidistant".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub fov_mm: f64,
    /// Pixels per side of the grid the data are simulated on.
    pub signal_n: usize,
    /// Pixels per side of the reconstruction grid.
    pub recon_n: usize,
    pub thickness_mm: f64,
    pub disc_diameters_mm: Vec<f64>,
    /// Quadrature points per cell and axis in the system matrix.
    pub subsampling: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            fov_mm: 100.0,
            signal_n: 100,
            recon_n: 64,
            thickness_mm: 1.0,
            disc_diameters_mm: vec![4.0, 6.0, 8.0, 10.0],
            subsampling: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub iterations: usize,
    pub nnz_cap: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { iterations: 20, nnz_cap: DEFAULT_NNZ_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FbpSection {
    pub displacements: usize,
    pub deconvolve: bool,
    pub nsr: f64,
    pub cos_guard: f64,
    pub decimation: usize,
    /// Sinogram half width after zero padding; zero disables padding.
    pub pad_half_width_mm: f64,
    /// `ram-lak` or `hann`.
    pub window: String,
}

impl Default for FbpSection {
    fn default() -> Self {
        Self {
            displacements: 128,
            deconvolve: false,
            nsr: 1e-2,
            cos_guard: 0.05,
            decimation: 1,
            pad_half_width_mm: 75.0,
            window: "ram-lak".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Missing(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The full configuration, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> u64 {
        ConfigHasher::new().str(&self.to_toml()).finish()
    }

    /// Hash of the sections that determine the simulated data.
    pub fn data_hash(&self) -> u64 {
        ConfigHasher::new()
            .str(&section_text(&self.field))
            .str(&section_text(&self.acquisition))
            .str(&section_text(&self.tracer))
            .str(&section_text(&self.grid))
            .finish()
    }
}

fn section_text<S: Serialize>(s: &S) -> String {
    toml::to_string(s).expect("section serializes")
}
