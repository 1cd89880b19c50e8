#![allow(dead_code)]

use mpi3d::fields::*;
use mpi3d::forward::*;
use mpi3d::magnetization::*;
use mpi3d::phantom::*;
use mpi3d::sysmat::*;

pub const FOV: f64 = 0.1;
pub const DISCS: [f64; 4] = [0.004, 0.006, 0.008, 0.010];

/// Rotating-FFL desk scenario: 64×64 recon grid, 25 projections of 160 samples.
pub struct Desk {
    pub topology: Topology<f64>,
    pub ideal: FieldModel<f64>,
    pub perturbed: FieldModel<f64>,
    pub tracer: LangevinParams<f64>,
    pub acq: AcquisitionConfig<f64>,
    pub coils: Vec<ReceiveCoil<f64>>,
    pub phantom: ConcentrationGrid<f64>,
    pub truth: ConcentrationGrid<f64>,
    pub recon: GridSpec<f64>,
}

impl Desk {
    pub fn new() -> Self {
        let topology = Topology::RotatingFfl { g: 1.0, d: 0.12, f_d: 25e3, f_rot: 2000.0 };
        let ideal = FieldModel::from_topology(topology, 0.05).unwrap();
        let perturbed = perturb_field(&ideal, 7, 0.2).unwrap();
        let signal = GridSpec::planar_square(100, FOV, 1e-3).unwrap();
        let recon = GridSpec::planar_square(64, FOV, 1e-3).unwrap();
        Self {
            topology,
            ideal,
            perturbed,
            tracer: LangevinParams::new(1.0, 1500.0).unwrap(),
            acq: AcquisitionConfig::one_rotation(25e3, 2000.0, 8e6).unwrap(),
            coils: vec![ReceiveCoil::axis(0), ReceiveCoil::axis(1)],
            phantom: build_disc_phantom(FOV, &DISCS, signal).unwrap(),
            truth: build_disc_phantom(FOV, &DISCS, recon).unwrap(),
            recon,
        }
    }

    pub fn approx(&self, n: usize, b: f64, strategy: NodeStrategy, scheme: ApproxScheme) -> MagnetizationApprox<f64> {
        approx_from_strategy(&self.tracer, n, b, strategy, scheme).unwrap()
    }

    pub fn default_approx(&self) -> MagnetizationApprox<f64> {
        self.approx(30, 0.01, NodeStrategy::Equidistant, ApproxScheme::Secant)
    }

    /// Noisy, high-passed traces of the parallel-field model on the signal grid.
    pub fn traces(&self, model: &FieldModel<f64>) -> Vec<SignalTrace<f64>> {
        self.coils
            .iter()
            .map(|c| {
                let u = simulate_parallel(model, &self.phantom, c, &self.acq, &self.tracer, &ForwardOptions::default()).unwrap();
                let noisy = add_noise(&u, default_noise_sigma(&u), 11 + c.index as u64);
                apply_highpass(&noisy, self.acq.highpass_cutoff)
            })
            .collect()
    }

    pub fn system(&self, model: &FieldModel<f64>, approx: &MagnetizationApprox<f64>) -> Vec<SystemMatrix<f64>> {
        let times = self.acq.sample_times();
        self.coils
            .iter()
            .map(|c| build_system_matrix(model, approx, c, &times, &self.recon, &BuildOptions::default()).unwrap())
            .collect()
    }
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
