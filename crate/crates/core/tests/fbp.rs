mod common;

use std::f64::consts::PI;

use mpi3d::fbp::*;
use mpi3d::fields::*;
use mpi3d::forward::*;
use mpi3d::magnetization::*;
use mpi3d::phantom::*;
use mpi3d::recon::nrmse;
use proptest::prelude::*;

fn centered_disc(n: usize, fov: f64, radius: f64) -> ConcentrationGrid<f64> {
    let spec = GridSpec::planar_square(n, fov, 1e-3).unwrap();
    rasterize_discs(spec, &[Disc { center: [0.0, 0.0], diameter: 2.0 * radius, value: 1.0 }])
}

fn disc_phantom(n: usize) -> ConcentrationGrid<f64> {
    let spec = GridSpec::planar_square(n, 0.1, 1e-3).unwrap();
    build_disc_phantom_with_ring(0.1, &[0.012, 0.016, 0.02, 0.024], 0.025, spec).unwrap()
}

#[test]
fn centered_disc_chords() {
    let r = 0.02;
    let g = centered_disc(200, 0.1, r);
    let d = uniform_displacements(100, 0.03);
    let sino = radon_transform(&g, &half_circle_angles(12), &d);
    for i in 0..12 {
        let p = sino.projection(i);
        for (j, &s) in d.iter().enumerate() {
            if s.abs() < 0.8 * r {
                let chord = 2.0 * (r * r - s * s).sqrt();
                assert!((p[j] - chord).abs() < 0.02 * chord, "θ#{i} s={s}: {} vs {chord}", p[j]);
            }
        }
        // rotational symmetry; mass is conserved at every angle even where
        // the pixelated rim makes single bins differ
        let p0 = sino.projection(0);
        let (m, m0): (f64, f64) = (p.iter().sum(), p0.iter().sum());
        assert!((m - m0).abs() < 1e-3 * m0, "mass {m} vs {m0}");
        let l2 = common::rel_l2(p, p0);
        assert!(l2 < 0.02, "θ#{i}: {l2}");
    }
}

#[test]
fn fbp_of_radon_data() {
    let g = disc_phantom(128);
    let d = uniform_displacements(256, 0.075);
    let rec = |k| {
        let sino = radon_transform(&g, &half_circle_angles(k), &d);
        nrmse(&fbp_reconstruct(&sino, &g.spec).unwrap(), &g).unwrap()
    };
    let e180 = rec(180);
    assert!(e180 < 0.15, "{e180}");
    let (e25, e250) = (rec(25), rec(250));
    assert!(e25 > e250, "{e25} vs {e250}");
    let hann = fbp_reconstruct_with(&radon_transform(&g, &half_circle_angles(180), &d), &g.spec, FbpWindow::Hann).unwrap();
    assert!(nrmse(&hann, &g).unwrap() < 0.3);
}

#[test]
fn padding_keeps_the_common_region() {
    let g = centered_disc(64, 0.064, 0.012);
    let d = uniform_displacements(64, 0.032);
    let sino = radon_transform(&g, &half_circle_angles(90), &d);
    let plain = fbp_reconstruct(&sino, &g.spec).unwrap();
    let padded_sino = zero_pad(&sino, 0.08).unwrap();
    assert!((padded_sino.energy() - sino.energy()).abs() <= 1e-12 * sino.energy());
    let padded = fbp_reconstruct(&padded_sino, &g.spec).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..g.spec.len() {
        let c = g.spec.center(k);
        if c.x.hypot(c.y) < 0.03 {
            num += (padded.values[k] - plain.values[k]).powi(2);
            den += plain.values[k].powi(2);
        }
    }
    assert!((num / den).sqrt() < 0.01, "{}", (num / den).sqrt());
}

#[test]
fn zero_trace_gives_zero_sinogram() {
    let topo = Topology::RotatingFfl { g: 1.0, d: 0.02, f_d: 25e3, f_rot: 2000.0 };
    let lp = LangevinParams::new(1.0, 1500.0).unwrap();
    let tr = SignalTrace::new(vec![0.0; 4000], 8e6, 0.0, 0).unwrap();
    let s = signal_to_sinogram(&[tr], &[ReceiveCoil::axis(0)], &topo, &lp, &SinogramOptions::default()).unwrap();
    assert!(s.values.iter().all(|&v| v == 0.0));
    assert_eq!(s.n_angles(), 25);
    assert!(s.displacements.iter().all(|x: &f64| x.abs() <= 0.01));
    let meta = s.meta.unwrap();
    assert_eq!((meta.g, meta.d, meta.f_d, meta.f_rot), (1.0, 0.02, 25e3, 2000.0));
    // uniform half-circle coverage
    let mut a: Vec<f64> = s.angles.iter().map(|x: &f64| x.rem_euclid(PI)).collect();
    a.sort_by(f64::total_cmp);
    for w in a.windows(2) {
        assert!((w[1] - w[0] - PI / 25.0).abs() < 1e-9);
    }
}

#[test]
fn static_ffl_point_gives_shifted_kernel() {
    let (g, d, f_d) = (1.0f64, 0.01f64, 25e3f64);
    let alpha = 0.7;
    let topo = Topology::StaticFfl { g, d, f_d, alpha };
    let model = FieldModel::from_topology(topo, 0.05).unwrap();
    let spec = GridSpec::planar_square(81, 0.02, 1e-3).unwrap();
    let mut c = ConcentrationGrid::zeros(spec);
    let cell = spec.index(45, 38, 0);
    c.values[cell] = 1.0;
    let lp = LangevinParams::new(1.0, 1000.0).unwrap();
    let acq = AcquisitionConfig::new(f_d, 0.0, 8e6, 4.0 / f_d).unwrap();
    let coils = [ReceiveCoil::axis(0), ReceiveCoil::axis(1)];
    let traces: Vec<_> = coils
        .iter()
        .map(|co| simulate_parallel(&model, &c, co, &acq, &lp, &ForwardOptions { subsampling: 4, fd_step: None }).unwrap())
        .collect();
    let opts = SinogramOptions { n_displacements: 200, thickness: 1e-3, ..Default::default() };
    let sino = signal_to_sinogram(&traces, &coils, &topo, &lp, &opts).unwrap();
    // the end sweeps are partial and dropped
    assert_eq!(sino.n_angles(), 7);
    let normal = topo.ffl_locus(0.0).unwrap().normal();
    let s0 = spec.center(cell).dot(normal);
    let mass = spec.spacing[0] * spec.spacing[1];
    let area = lp.mbar(1e3) / g;
    for i in 0..sino.n_angles() {
        let p = sino.projection(i);
        let expect: Vec<f64> = sino.displacements.iter().map(|&s| mass * lp.mbar_prime((2.0 * g * (s - s0)).abs()) / area).collect();
        let err = common::rel_l2(p, &expect);
        assert!(err < 0.1, "projection {i}: {err}");
        let peak = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        assert!((sino.displacements[peak] - s0).abs() <= sino.step());
    }
}

#[test]
fn rotating_chain_resembles_radon_data() {
    // noiseless, unfiltered desk data: the sinogram is the Radon transform
    // blurred by a unit-area kernel
    let desk = common::Desk::new();
    let traces: Vec<_> = desk
        .coils
        .iter()
        .map(|co| simulate_parallel(&desk.ideal, &desk.phantom, co, &desk.acq, &desk.tracer, &ForwardOptions::default()).unwrap())
        .collect();
    let opts = SinogramOptions { n_displacements: 120, thickness: 1e-3, ..Default::default() };
    let sino = signal_to_sinogram(&traces, &desk.coils, &desk.topology, &desk.tracer, &opts).unwrap();
    let reference = radon_transform(&desk.phantom, &sino.angles, &sino.displacements);
    let err = common::rel_l2(&sino.values, &reference.values);
    assert!(err < 0.35, "{err}");
    let rec = fbp_reconstruct(&zero_pad(&sino, 0.075).unwrap(), &desk.recon).unwrap();
    assert!(nrmse(&rec, &desk.truth).unwrap() < 0.6);
}

fn random_phantom(values: &[f64]) -> ConcentrationGrid<f64> {
    ConcentrationGrid::from_values(GridSpec::planar_square(10, 0.01, 1e-3).unwrap(), values.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radon_is_linear(
        a in proptest::collection::vec(-1.0f64..1.0, 100),
        b in proptest::collection::vec(-1.0f64..1.0, 100),
        s in -3.0f64..3.0,
        theta in 0.0f64..PI,
    ) {
        let d = uniform_displacements(30, 0.008);
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| s * x + y).collect();
        let ra = radon_transform(&random_phantom(&a), &[theta], &d);
        let rb = radon_transform(&random_phantom(&b), &[theta], &d);
        let rab = radon_transform(&random_phantom(&ab), &[theta], &d);
        let comb: Vec<f64> = ra.values.iter().zip(&rb.values).map(|(x, y)| s * x + y).collect();
        let scale = comb.iter().chain(&rab.values).map(|v| v.abs()).fold(1e-300, f64::max);
        for (x, y) in rab.values.iter().zip(&comb) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn radon_shift(shift in -4i64..=4, theta in 0.0f64..PI, seed in 0u64..100) {
        // phantom supported in the middle of a 24×24 grid, shifted by whole pixels along x
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let spec = GridSpec::planar_square(24, 0.024, 1e-3).unwrap();
        let mut base = ConcentrationGrid::zeros(spec);
        let mut moved = ConcentrationGrid::zeros(spec);
        for j in 8..16 {
            for i in 8..16 {
                let v: f64 = rng.random_range(0.0..1.0);
                base.values[spec.index(i, j, 0)] = v;
                moved.values[spec.index((i as i64 + shift) as usize, j, 0)] = v;
            }
        }
        let d = uniform_displacements(240, 0.018);
        let centroid = |g: &ConcentrationGrid<f64>| {
            let r = radon_transform(g, &[theta], &d);
            let p = r.projection(0);
            p.iter().zip(&d).map(|(v, s)| v * s).sum::<f64>() / p.iter().sum::<f64>()
        };
        let delta = shift as f64 * 1e-3;
        let moved_by = centroid(&moved) - centroid(&base);
        prop_assert!((moved_by - delta * theta.cos()).abs() < 0.1e-3, "{} vs {}", moved_by, delta * theta.cos());
    }
}
