//! File-based pipeline. Every stage reads its inputs from and writes its
//! artifacts to the output directory; each artifact gets a `.meta` sidecar
//! with the config hash and the full configuration.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mpi3d::fbp::Sinogram;
use mpi3d::forward::{load_trace, save_trace, write_trace_csv, SignalTrace};
use mpi3d::phantom::{load_grid, save_grid, save_pgm, ConcentrationGrid, GridSpec, ProfileAxis};
use mpi3d::recon::{nrmse, profile_compare};
use mpi3d::sysmat::{load_system_matrix, save_system_matrix, SystemMatrix};

use crate::error::CliError;
use crate::experiment::{coil_name, Experiment};
use crate::sweep::{run_sweep, SweepParameter, SweepPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Phantom,
    Simulate,
    Filter,
    Sysmat,
    Lsqr,
    Fbp,
    Compare,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Phantom, Stage::Simulate, Stage::Filter, Stage::Sysmat, Stage::Lsqr, Stage::Fbp, Stage::Compare];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Phantom => "phantom",
            Self::Simulate => "simulate",
            Self::Filter => "filter",
            Self::Sysmat => "sysmat",
            Self::Lsqr => "lsqr",
            Self::Fbp => "fbp",
            Self::Compare => "compare",
        }
    }
}

impl FromStr for Stage {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown stage '{s}'")))
    }
}

/// Output directory bound to one experiment.
pub struct Workspace<'a> {
    pub exp: &'a Experiment,
    pub dir: PathBuf,
    /// Load matrices and traces even when their hashes do not match.
    pub force: bool,
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl<'a> Workspace<'a> {
    pub fn new(exp: &'a Experiment) -> Result<Self, CliError> {
        let dir = exp.config.output.dir.clone();
        fs::create_dir_all(&dir)?;
        let ws = Self { exp, dir, force: false };
        let hash = exp.config.hash();
        fs::write(ws.path("config.toml"), format!("# config_hash {hash:016x}\n{}", exp.config.to_toml()))?;
        Ok(ws)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn meta(&self, artifact: &Path) -> Result<(), CliError> {
        let c = &self.exp.config;
        let text = format!("config_hash = \"{:016x}\"\ndata_hash = \"{:016x}\"\n\n{}", c.hash(), c.data_hash(), c.to_toml());
        fs::write(meta_path(artifact), text)?;
        Ok(())
    }

    /// Rejects data files simulated under different field, acquisition,
    /// tracer or grid settings.
    fn check_data_hash(&self, artifact: &Path) -> Result<(), CliError> {
        if self.force {
            return Ok(());
        }
        let expected = format!("{:016x}", self.exp.config.data_hash());
        let found = fs::read_to_string(meta_path(artifact))
            .ok()
            .and_then(|t| t.parse::<toml::Table>().ok())
            .and_then(|t| t.get("data_hash").and_then(|v| v.as_str()).map(str::to_string));
        match found {
            Some(h) if h == expected => Ok(()),
            Some(h) => Err(CliError::HashMismatch(format!(
                "{} was simulated with data hash {h}, current configuration is {expected}; rerun `simulate` or pass --force",
                artifact.display()
            ))),
            None => {
                log::warn!("{} has no metadata; cannot verify its configuration", artifact.display());
                Ok(())
            }
        }
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        fs::write(&p, text)?;
        self.meta(&p)?;
        Ok(p)
    }

    fn write_image(&self, stem: &str, g: &ConcentrationGrid<f64>) -> Result<(), CliError> {
        let p = self.path(&format!("{stem}.grid"));
        save_grid(g, &p)?;
        self.meta(&p)?;
        let p = self.path(&format!("{stem}.pgm"));
        save_pgm(g, &p)?;
        self.meta(&p)?;
        Ok(())
    }

    fn write_traces(&self, prefix: &str, traces: &[SignalTrace<f64>]) -> Result<(), CliError> {
        for t in traces {
            let stem = format!("{prefix}_{}", coil_name(t.coil_index));
            let p = self.path(&format!("{stem}.bin"));
            save_trace(t, &p)?;
            self.meta(&p)?;
            let p = self.path(&format!("{stem}.csv"));
            let mut w = BufWriter::new(fs::File::create(&p)?);
            write_trace_csv(t, &mut w)?;
            w.flush()?;
            self.meta(&p)?;
        }
        Ok(())
    }

    fn read_traces(&self, prefix: &str, producer: Stage) -> Result<Vec<SignalTrace<f64>>, CliError> {
        self.exp
            .coils
            .iter()
            .map(|c| {
                let p = self.path(&format!("{prefix}_{}.bin", coil_name(c.index)));
                if !p.exists() {
                    return Err(CliError::Missing(format!("{} (run `{}` first)", p.display(), producer.as_str())));
                }
                self.check_data_hash(&p)?;
                let t: SignalTrace<f64> = load_trace(&p)?;
                if t.len() != self.exp.acq.sample_count() || t.coil_index != c.index {
                    return Err(CliError::Config(format!("{} does not match the acquisition settings", p.display())));
                }
                Ok(t)
            })
            .collect()
    }

    fn write_profiles(&self, stem: &str, g: &ConcentrationGrid<f64>) -> Result<(), CliError> {
        for (axis, tag) in [(ProfileAxis::Horizontal, "h"), (ProfileAxis::Vertical, "v")] {
            let pair = profile_compare(g, &self.exp.truth, axis, 0.0)?;
            self.write_text(&format!("{stem}_profile_{tag}.csv"), &pair.to_csv())?;
        }
        Ok(())
    }

    pub fn phantom(&self) -> Result<(), CliError> {
        self.write_image("phantom", &self.exp.phantom)?;
        self.write_image("truth", &self.exp.truth)
    }

    pub fn simulate(&self) -> Result<Vec<SignalTrace<f64>>, CliError> {
        let traces = self.exp.simulate()?;
        for t in &traces {
            log::info!("coil {}: {} samples, RMS {:.3e} V", coil_name(t.coil_index), t.len(), t.rms());
        }
        self.write_traces("trace", &traces)?;
        Ok(traces)
    }

    pub fn filter(&self) -> Result<Vec<SignalTrace<f64>>, CliError> {
        let filtered = self.exp.filter(&self.read_traces("trace", Stage::Simulate)?);
        self.write_traces("filtered", &filtered)?;
        Ok(filtered)
    }

    pub fn sysmat(&self) -> Result<Vec<SystemMatrix<f64>>, CliError> {
        let matrices = self.exp.system_matrices(&self.exp.approx()?)?;
        for (m, c) in matrices.iter().zip(&self.exp.coils) {
            log::info!("coil {}: {}x{} matrix, {} nonzeros", coil_name(c.index), m.rows(), m.cols(), m.nnz());
            let p = self.path(&format!("sysmat_{}.bin", coil_name(c.index)));
            save_system_matrix(m, &p)?;
            self.meta(&p)?;
        }
        Ok(matrices)
    }

    fn read_matrices(&self) -> Result<Vec<SystemMatrix<f64>>, CliError> {
        let hashes = self.exp.matrix_hashes(&self.exp.approx()?);
        self.exp
            .coils
            .iter()
            .zip(hashes)
            .map(|(c, h)| {
                let p = self.path(&format!("sysmat_{}.bin", coil_name(c.index)));
                if !p.exists() {
                    return Err(CliError::Missing(format!("{} (run `sysmat` first)", p.display())));
                }
                let expected = if self.force { None } else { Some(h) };
                load_system_matrix(&p, expected).map_err(|e| match e {
                    mpi3d::Error::HashMismatch { .. } => {
                        CliError::HashMismatch(format!("{}: {e}; rebuild it or pass --force", p.display()))
                    }
                    e => e.into(),
                })
            })
            .collect()
    }

    pub fn lsqr(&self) -> Result<f64, CliError> {
        let filtered = self.read_traces("filtered", Stage::Filter)?;
        let matrices = self.read_matrices()?;
        let rec = self.exp.reconstruct(&matrices, &filtered)?;
        let mut csv = String::from("iteration,residual\n");
        for (i, r) in rec.lsqr.residuals.iter().enumerate() {
            csv.push_str(&format!("{i},{}\n", fmt17(*r)));
        }
        self.write_text("residuals.csv", &csv)?;
        self.write_image("recon", &rec.image)?;
        self.write_profiles("recon", &rec.image)?;
        let e = self.exp.nrmse(&rec.image)?;
        log::info!("lsqr: {} iterations ({:?}), NRMSE {e:.4}", rec.lsqr.iterations, rec.lsqr.stop);
        Ok(e)
    }

    pub fn fbp(&self) -> Result<f64, CliError> {
        let filtered = self.read_traces("filtered", Stage::Filter)?;
        let sino = self.exp.sinogram(&filtered)?;
        self.write_text("sinogram.csv", &sino.to_csv())?;
        let p = self.path("sinogram.pgm");
        save_pgm(&sinogram_image(&sino)?, &p)?;
        self.meta(&p)?;
        let image = self.exp.fbp(&sino)?;
        self.write_image("fbp", &image)?;
        self.write_profiles("fbp", &image)?;
        let e = self.exp.nrmse(&image)?;
        log::info!("fbp: {} projections, NRMSE {e:.4}", sino.n_angles());
        Ok(e)
    }

    /// NRMSE of every available reconstruction against the phantom.
    pub fn compare(&self) -> Result<Vec<(String, f64)>, CliError> {
        let truth = self.exp.truth.clone();
        let mut rows = Vec::new();
        for name in ["recon", "fbp"] {
            let p = self.path(&format!("{name}.grid"));
            if p.exists() {
                let g: ConcentrationGrid<f64> = load_grid(&p)?;
                rows.push((name.to_string(), nrmse(&g, &truth)?));
            }
        }
        if rows.is_empty() {
            return Err(CliError::Missing("no reconstruction to compare (run `lsqr` or `fbp` first)".into()));
        }
        let mut csv = String::from("method,nrmse\n");
        for (m, e) in &rows {
            csv.push_str(&format!("{m},{}\n", fmt17(*e)));
        }
        self.write_text("compare.csv", &csv)?;
        Ok(rows)
    }

    /// Runs a sweep on the filtered traces and writes one image, two profiles
    /// and a summary line per value.
    pub fn sweep(&self, param: SweepParameter, values: &[String]) -> Result<Vec<SweepPoint>, CliError> {
        let filtered = self.read_traces("filtered", Stage::Filter)?;
        let points = run_sweep(self.exp, &filtered, param, values)?;
        let sub = format!("sweep_{}", param.as_str());
        fs::create_dir_all(self.path(&sub))?;
        let mut csv = format!("{},nrmse\n", param.as_str());
        for p in &points {
            let stem = format!("{sub}/{}", p.value);
            self.write_image(&stem, &p.image)?;
            self.write_profiles(&stem, &p.image)?;
            csv.push_str(&format!("{},{}\n", p.value, fmt17(p.nrmse)));
        }
        self.write_text(&format!("{sub}/summary.csv"), &csv)?;
        Ok(points)
    }

    pub fn run(&self, stage: Stage) -> Result<(), CliError> {
        log::info!("stage {}", stage.as_str());
        match stage {
            Stage::Phantom => self.phantom(),
            Stage::Simulate => self.simulate().map(|_| ()),
            Stage::Filter => self.filter().map(|_| ()),
            Stage::Sysmat => self.sysmat().map(|_| ()),
            Stage::Lsqr => self.lsqr().map(|_| ()),
            Stage::Fbp => self.fbp().map(|_| ()),
            Stage::Compare => self.compare().map(|_| ()),
        }
    }
}

fn meta_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Sinogram as an image: displacement along x, angle along y.
pub fn sinogram_image(sino: &Sinogram<f64>) -> Result<ConcentrationGrid<f64>, CliError> {
    let da = if sino.n_angles() > 1 { (sino.angles[1] - sino.angles[0]).abs().max(1e-12) } else { 1.0 };
    let spec = GridSpec::new(
        [sino.n_displacements(), sino.n_angles(), 1],
        [sino.step(), da, 1.0],
        [sino.displacements[0], sino.angles[0], 0.0],
    )?;
    Ok(ConcentrationGrid::from_values(spec, sino.values.clone())?)
}

/// Runs the stages in order, stopping at the first failure.
pub fn run_pipeline(exp: &Experiment, stages: &[Stage], force: bool) -> Result<(), CliError> {
    let mut ws = Workspace::new(exp)?;
    ws.force = force;
    for &s in stages {
        ws.run(s)?;
    }
    Ok(())
}

/// NRMSE between two grid files.
pub fn compare_files(reconstruction: &Path, reference: &Path) -> Result<f64, CliError> {
    for p in [reconstruction, reference] {
        if !p.exists() {
            return Err(CliError::Missing(p.display().to_string()));
        }
    }
    let a: ConcentrationGrid<f64> = load_grid(reconstruction)?;
    let b: ConcentrationGrid<f64> = load_grid(reference)?;
    Ok(nrmse(&a, &b)?)
}
