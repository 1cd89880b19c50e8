mod common;

use common::{rel_l2, Desk};
use mpi3d::fields::*;
use mpi3d::forward::*;
use mpi3d::magnetization::*;
use mpi3d::phantom::*;
use mpi3d::recon::LinearOperator;
use mpi3d::sysmat::*;
use mpi3d::{Error, Vec3};
use proptest::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const F_D: f64 = 25e3;
const FS: f64 = 8e6;

fn static_ffl() -> FieldModel<f64> {
    build_topology(Topology::StaticFfl { g: 1.0, d: 5e-3, f_d: F_D, alpha: 0.6 }).unwrap()
}

fn times(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / FS).collect()
}

fn tracer() -> LangevinParams<f64> {
    LangevinParams::new(1.0, 500.0).unwrap()
}

fn approx(n: usize, b: f64) -> MagnetizationApprox<f64> {
    approx_from_strategy(&tracer(), n, b, NodeStrategy::Equidistant, ApproxScheme::Secant).unwrap()
}

fn small_spec() -> GridSpec<f64> {
    GridSpec::planar_square(12, 12e-3, 1e-3).unwrap()
}

fn disc(spec: GridSpec<f64>) -> ConcentrationGrid<f64> {
    rasterize_discs(spec, &[Disc { center: [1e-3, 0.0], diameter: 8e-3, value: 1.5 }])
}

#[test]
fn kernel_properties() {
    let m = static_ffl();
    let coil = ReceiveCoil::axis(0);
    let r = Vec3::new(2e-3, -1e-3, 0.0);
    let k = kernel(&m, &coil, r, 3e-6);
    assert!(k != 0.0);
    assert_eq!(kernel(&m, &coil.flipped(), r, 3e-6), -k);
    // dB/dt is along the FFL normal here, so a coil along the line sees nothing
    let dir = m.topology().ffl_locus(0.0).unwrap().direction;
    let along = ReceiveCoil::new(dir).unwrap();
    assert!(kernel(&m, &along, r, 3e-6).abs() < 1e-12 * k.abs());
    let c = TimeModulation::constant();
    let stat = FieldModel::new(vec![SHTerm::new(2, 1, 0, 2.0, c)], 0.05).unwrap();
    assert_eq!(kernel(&stat, &coil, r, 1e-6), 0.0);
}

#[test]
fn matrix_reproduces_piecewise_trace_exactly() {
    let m = static_ffl();
    let spec = small_spec();
    let c = disc(spec);
    let a = approx(30, 0.01);
    let coil = ReceiveCoil::new(Vec3::new(0.2, 1.0, 0.0)).unwrap();
    let t = times(320);
    for sub in [1, 3] {
        let s = build_system_matrix(&m, &a, &coil, &t, &spec, &BuildOptions { subsampling: sub, ..Default::default() }).unwrap();
        let u = simulate_piecewise_at(&m, &c, &coil, &t, &a, sub);
        assert_eq!(s.matvec(&c.values), u);
    }
}

#[test]
fn single_cell_grid() {
    let m = static_ffl();
    let spec = GridSpec::new([1, 1, 1], [1e-3; 3], [1e-3, 0.0, 0.0]).unwrap();
    let c = ConcentrationGrid::from_values(spec, vec![0.7]).unwrap();
    let a = approx(8, 0.01);
    let coil = ReceiveCoil::axis(1);
    let t = times(320);
    let s = build_system_matrix(&m, &a, &coil, &t, &spec, &BuildOptions::default()).unwrap();
    assert_eq!(s.matvec(&c.values), simulate_piecewise_at(&m, &c, &coil, &t, &a, 1));
}

#[test]
fn threshold_below_field_gives_empty_matrix() {
    let m = static_ffl();
    let spec = GridSpec::new([4, 4, 1], [1e-3; 3], [0.02, 0.02, 0.0]).unwrap();
    let s = build_system_matrix(&m, &approx(4, 1e-3), &ReceiveCoil::axis(0), &times(320), &spec, &BuildOptions::default()).unwrap();
    assert_eq!(s.nnz(), 0);
}

#[test]
fn build_errors() {
    let m = static_ffl();
    let spec = small_spec();
    let a = approx(8, 0.01);
    let coil = ReceiveCoil::axis(0);
    assert!(matches!(build_system_matrix(&m, &a, &coil, &[], &spec, &BuildOptions::default()), Err(Error::Config(_))));
    let capped = BuildOptions { nnz_cap: 10, ..Default::default() };
    assert!(matches!(build_system_matrix(&m, &a, &coil, &times(320), &spec, &capped), Err(Error::ResourceCap(_))));
}

#[test]
fn partition_with_unit_slopes_is_band_integral() {
    let m = static_ffl();
    let spec = small_spec();
    let c = disc(spec);
    let a = approx(6, 0.004);
    let ones = MagnetizationApprox::from_parts(a.nodes().to_vec(), vec![1.0; a.slopes().len()], a.scheme()).unwrap();
    let coil = ReceiveCoil::axis(0);
    let t = times(200);
    let s = build_system_matrix(&m, &ones, &coil, &t, &spec, &BuildOptions { subsampling: 2, ..Default::default() }).unwrap();
    let got = s.matvec(&c.values);
    let offsets = spec.quadrature_offsets(2);
    let w = spec.cell_volume() / offsets.len() as f64;
    for (j, &tj) in t.iter().enumerate() {
        let mut direct = 0.0;
        for k in 0..spec.len() {
            for o in &offsets {
                let r = spec.center(k) + *o;
                if m.eval(r, tj).norm() < 0.004 {
                    direct += c.values[k] * kernel(&m, &coil, r, tj) * w;
                }
            }
        }
        assert!((got[j] - direct).abs() <= 1e-12 * direct.abs().max(1e-18), "row {j}: {} vs {direct}", got[j]);
    }
}

#[test]
fn stacking() {
    let m = static_ffl();
    let spec = small_spec();
    let c = disc(spec);
    let a = approx(8, 0.01);
    let t = times(320);
    let coils = [ReceiveCoil::axis(0), ReceiveCoil::axis(1)];
    let mats: Vec<_> = coils.iter().map(|co| build_system_matrix(&m, &a, co, &t, &spec, &BuildOptions::default()).unwrap()).collect();
    let traces: Vec<_> = coils
        .iter()
        .map(|co| SignalTrace::new(simulate_piecewise_at(&m, &c, co, &t, &a, 1), FS, 0.0, co.index).unwrap())
        .collect();

    let (one, y1) = stack_coils(&mats[..1], &traces[..1]).unwrap();
    assert_eq!(one, mats[0]);
    assert_eq!(y1, traces[0].samples);

    let (both, y) = stack_coils(&mats, &traces).unwrap();
    assert_eq!(both.rows(), 640);
    assert_eq!(both.matvec(&c.values), y);

    let (twice, _) = stack_coils(&[mats[0].clone(), mats[0].clone()], &[traces[0].clone(), traces[0].clone()]).unwrap();
    let x: Vec<f64> = (0..spec.len()).map(|i| (i as f64 * 0.37).sin()).collect();
    let n1 = mats[0].rmatvec(&mats[0].matvec(&x));
    let n2 = twice.rmatvec(&twice.matvec(&x));
    assert!(rel_l2(&n2, &n1.iter().map(|v| 2.0 * v).collect::<Vec<_>>()) < 1e-14);

    assert!(stack_coils(&mats, &traces[..1]).is_err());
}

fn low_band_energy(col: &[f64], cutoff: f64) -> (f64, f64) {
    let n = col.len();
    let mut buf: Vec<Complex<f64>> = col.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut low = 0.0;
    let mut total = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let f = k.min(n - k) as f64 * FS / n as f64;
        total += c.norm_sqr();
        if f < cutoff {
            low += c.norm_sqr();
        }
    }
    (low, total)
}

#[test]
fn highpass_rows() {
    let m = static_ffl();
    let spec = small_spec();
    let c = disc(spec);
    let a = approx(8, 0.01);
    let s = build_system_matrix(&m, &a, &ReceiveCoil::axis(0), &times(640), &spec, &BuildOptions::default()).unwrap();
    assert_eq!(apply_highpass_rows(&s, 0.0).unwrap(), s);
    let cutoff = 1.4 * F_D;
    let hs = apply_highpass_rows(&s, cutoff).unwrap();
    let mut direct = s.matvec(&c.values);
    HighPass::new(640, FS, cutoff).apply(&mut direct);
    assert!(rel_l2(&hs.matvec(&c.values), &direct) < 1e-10);
    let dense = hs.to_dense();
    for k in (0..spec.len()).step_by(7) {
        let col: Vec<f64> = dense.iter().map(|row| row[k]).collect();
        let (low, total) = low_band_energy(&col, cutoff);
        assert!(low <= 1e-20 * total.max(1e-300));
    }
    // the lazy operator agrees with the materialized one and with its adjoint
    let op = FilteredOperator::new(&s, cutoff).unwrap();
    let mut y = vec![0.0; 640];
    op.apply(&c.values, &mut y);
    assert!(rel_l2(&y, &direct) < 1e-10);
    let z: Vec<f64> = (0..640).map(|i| (i as f64 * 0.013).cos()).collect();
    let mut x = vec![0.0; spec.len()];
    op.apply_transpose(&z, &mut x);
    let lhs: f64 = y.iter().zip(&z).map(|(a, b)| a * b).sum();
    let rhs: f64 = x.iter().zip(&c.values).map(|(a, b)| a * b).sum();
    assert!((lhs - rhs).abs() < 1e-10 * lhs.abs());
}

#[test]
fn persistence_and_hash() {
    let m = static_ffl();
    let spec = small_spec();
    let a = approx(8, 0.01);
    let coil = ReceiveCoil::axis(0);
    let t = times(320);
    let s = build_system_matrix(&m, &a, &coil, &t, &spec, &BuildOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    save_system_matrix(&s, &path).unwrap();
    assert_eq!(load_system_matrix::<f64>(&path, Some(s.hash)).unwrap(), s);
    assert_eq!(load_system_matrix::<f64>(&path, None).unwrap(), s);
    assert!(matches!(load_system_matrix::<f64>(&path, Some(s.hash ^ 1)), Err(Error::HashMismatch { .. })));

    let base = system_matrix_hash(&m, &a, &coil, &t, &spec, 1);
    assert_eq!(base, s.hash);
    assert_ne!(base, system_matrix_hash(&m, &approx(9, 0.01), &coil, &t, &spec, 1));
    assert_ne!(base, system_matrix_hash(&m, &a, &ReceiveCoil::axis(1), &t, &spec, 1));
    assert_ne!(base, system_matrix_hash(&m, &a, &coil, &t[1..], &spec, 1));
    assert_ne!(base, system_matrix_hash(&m, &a, &coil, &t, &spec, 2));
    assert_ne!(base, system_matrix_hash(&perturb_field(&m, 1, 0.1).unwrap(), &a, &coil, &t, &spec, 1));
}

#[test]
fn desk_scale_sparsity_and_refinement() {
    let desk = Desk::new();
    let a = desk.default_approx();
    let times = desk.acq.sample_times();
    assert_eq!(times.len(), 4000);
    let coil = &desk.coils[0];
    let s1 = build_system_matrix(&desk.ideal, &a, coil, &times, &desk.recon, &BuildOptions::default()).unwrap();
    assert!(s1.density() < 0.3, "density {}", s1.density());
    let c = &desk.truth.values;
    let sc = |sub| {
        build_system_matrix(&desk.ideal, &a, coil, &times, &desk.recon, &BuildOptions { subsampling: sub, ..Default::default() })
            .unwrap()
            .matvec(c)
    };
    let (u4, u8) = (sc(4), sc(8));
    let change = rel_l2(&u4, &u8);
    assert!(change < 0.01, "subsampling 4 → 8 changes S·c by {change}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn matrix_matches_simulation_on_random_phantoms(
        values in proptest::collection::vec(0.0f64..2.0, 64),
        sub in 1usize..3,
        n in 2usize..20,
    ) {
        let m = perturb_field(&static_ffl(), 5, 0.1).unwrap();
        let spec = GridSpec::planar_square(8, 8e-3, 1e-3).unwrap();
        let c = ConcentrationGrid::from_values(spec, values).unwrap();
        let a = approx(n, 0.01);
        let coil = ReceiveCoil::axis(0);
        let t = times(160);
        let s = build_system_matrix(&m, &a, &coil, &t, &spec, &BuildOptions { subsampling: sub, ..Default::default() }).unwrap();
        prop_assert_eq!(s.matvec(&c.values), simulate_piecewise_at(&m, &c, &coil, &t, &a, sub));
    }
}
