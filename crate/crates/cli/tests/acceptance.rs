//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the report is always
//! printed.

use std::f64::consts::PI;
use std::time::Instant;

use mpi3d::fbp::{fbp_reconstruct, half_circle_angles, radon_transform, uniform_displacements};
use mpi3d::fields::*;
use mpi3d::forward::*;
use mpi3d::magnetization::*;
use mpi3d::phantom::*;
use mpi3d::recon::{lsqr_solve, nrmse, DenseMatrix, LinearOperator, LsqrOptions};
use mpi3d::sysmat::{build_system_matrix, BuildOptions};
use mpi3d::{mu0, Vec3};
use mpi3d_cli::{run_sweep, Experiment, ExperimentConfig, SweepParameter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Algebraic NRMSE of the 20-iteration desk runs (ideal, perturbed), fixed
/// from the reference run of criterion 8.
const REGRESSION_NRMSE: [f64; 2] = [0.404_152_069_770_358_8, 0.428_458_878_478_902_3];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn monotone(res: &[f64]) -> bool {
    res.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}

fn langevin_criterion() -> Outcome {
    let exact = langevin_derivative(0.0f64) == 1.0 / 3.0;
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let mut x: f64 = rng.random_range(-50.0..50.0);
        if x == 0.0 {
            x = 1e-3;
        }
        let fd = (langevin(x + h) - langevin(x - h)) / (2.0 * h);
        worst = worst.max((langevin_derivative(x) - fd).abs());
    }
    check(exact && worst < 1e-6, format!("L'(0) = 1/3: {exact}, max |L' - FD| = {worst:.2e}"))
}

fn zero_field_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let liss = Topology::LissajousFfp { g: 1.0, d: [12e-3, 10e-3, 8e-3], f: [25e3, 24.5e3, 24e3] };
    let m = build_topology(liss).unwrap();
    let mut ffp = 0.0f64;
    for _ in 0..100 {
        let t = rng.random_range(0.0..1e-3);
        ffp = ffp.max(m.eval(liss.ffp_position(t).unwrap(), t).norm());
    }
    let mut ffl = 0.0f64;
    for topo in [
        Topology::RotatingFfl { g: 1.0, d: 0.012, f_d: 25e3, f_rot: 2000.0 },
        Topology::StaticFfl { g: 1.0, d: 0.012, f_d: 25e3, alpha: 0.3 },
    ] {
        let m = build_topology(topo).unwrap();
        for _ in 0..1000 {
            let t = rng.random_range(0.0..1e-3);
            let p = topo.ffl_locus(t).unwrap().at(rng.random_range(-0.04..0.04));
            ffl = ffl.max(m.eval(p, t).norm());
        }
    }
    check(ffp < 1e-12 && ffl < 1e-12, format!("max |B| at FFP {ffp:.1e} T, on FFL {ffl:.1e} T"))
}

fn laplacian(m: &FieldModel<f64>, r: Vec3<f64>, t: f64, h: f64, j: usize) -> f64 {
    let f = |p: Vec3<f64>| m.eval(p, t).component(j);
    let mut acc = -6.0 * f(r);
    for axis in 0..3 {
        let mut e = [0.0; 3];
        e[axis] = h;
        let e = Vec3::from_f64(e);
        acc += f(r + e) + f(r - e);
    }
    acc / (h * h)
}

fn harmonicity_criterion() -> Outcome {
    let rotating = build_topology(Topology::RotatingFfl { g: 1.0, d: 0.012, f_d: 25e3, f_rot: 2000.0 }).unwrap();
    let models = [
        build_topology(Topology::LissajousFfp { g: 1.0, d: [12e-3, 10e-3, 8e-3], f: [25e3, 24.5e3, 24e3] }).unwrap(),
        build_topology(Topology::LineFfp { g: 1.0, d: [12e-3, 0.0, 0.0], f_d: 25e3 }).unwrap(),
        build_topology(Topology::StaticFfl { g: 1.0, d: 0.012, f_d: 25e3, alpha: 0.3 }).unwrap(),
        perturb_field(&rotating, 3, 0.2).unwrap(),
        rotating,
    ];
    // The 7-point stencil is exact up to degree 3, so the degree ≤ 2 ideal
    // fields leave only rounding; their residual must vanish instead.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut lo, mut hi, mut measured, mut floor) = (f64::INFINITY, 0.0f64, 0, 0.0f64);
    for m in &models {
        for _ in 0..100 {
            let r = Vec3::new(rng.random_range(-0.03..0.03), rng.random_range(-0.03..0.03), rng.random_range(-0.03..0.03));
            let t = rng.random_range(0.0..1e-3);
            for j in 0..3 {
                let a = laplacian(m, r, t, 1e-3, j);
                let b = laplacian(m, r, t, 0.5e-3, j);
                if a.abs() > 1e-7 {
                    lo = lo.min(a / b);
                    hi = hi.max(a / b);
                    measured += 1;
                } else {
                    floor = floor.max(b.abs());
                }
            }
        }
    }
    let ok = measured > 100 && (lo - 4.0).abs() < 0.5 && (hi - 4.0).abs() < 0.5 && floor < 1e-6;
    check(ok, format!("{measured} ratios in [{lo:.3}, {hi:.3}], exact-degree residual ≤ {floor:.1e}"))
}

fn error_bound_criterion() -> Outcome {
    let curve = LangevinParams::new(1.0, 1500.0).unwrap();
    let b = 0.01;
    let sup2 = sup_second_derivative(&curve, b, 100_000);
    let mut worst = 0.0f64;
    for scheme in [ApproxScheme::Secant, ApproxScheme::Tangent] {
        for strategy in [NodeStrategy::Equidistant, NodeStrategy::L1Optimal] {
            for n in [4, 8, 16, 32] {
                let a = approx_from_strategy(&curve, n, b, strategy, scheme).unwrap();
                let (mut e1, mut e2) = (0.0f64, 0.0f64);
                for i in 0..20_000 {
                    let x = b * i as f64 / 20_000.0;
                    e1 = e1.max((curve.mbar_prime(x) - a.eval(x)).abs());
                    e2 = e2.max((curve.mbar(x) - a.antiderivative(x)).abs());
                }
                worst = worst
                    .max(e1 / derivative_error_bound(&a, sup2))
                    .max(e2 / antiderivative_error_bound(&a, sup2));
            }
        }
    }
    let opt = l1_functional(&curve, &nodes_l1_optimal(8, b, &curve, ApproxScheme::Tangent).unwrap(), b);
    let eq = l1_functional(&curve, &nodes_equidistant(8, b), b);
    check(worst <= 1.0 && opt <= eq, format!("max error/bound {worst:.3}, F(L1) = {opt:.4e} ≤ F(eq) = {eq:.4e}"))
}

fn model_chain_criterion() -> Outcome {
    let f_d = 25e3;
    let model = build_topology(Topology::StaticFfl { g: 1.0, d: 5e-3, f_d, alpha: 0.6 }).unwrap();
    let spec = GridSpec::planar_square(16, 16e-3, 1e-3).unwrap();
    let c = rasterize_discs(spec, &[Disc { center: [0.5e-3, -1e-3], diameter: 8e-3, value: 1.0 }]);
    let lp = LangevinParams::new(1.0, 500.0).unwrap();
    let acq = AcquisitionConfig::new(f_d, 0.0, 8e6, 1.0 / f_d).unwrap();
    let coil = ReceiveCoil::new(Vec3::new(0.3, 1.0, 0.0)).unwrap();
    let opts = ForwardOptions { subsampling: 3, fd_step: None };
    let general = simulate_general(&model, &c, &coil, &acq, &lp, &opts).unwrap();
    let parallel = simulate_parallel(&model, &c, &coil, &acq, &lp, &opts).unwrap();
    let approx = approx_from_strategy(&lp, 30, 0.01, NodeStrategy::Equidistant, ApproxScheme::Secant).unwrap();
    let piecewise = simulate_piecewise(&model, &c, &coil, &acq, &approx, &opts).unwrap();
    let s = build_system_matrix(&model, &approx, &coil, &acq.sample_times(), &spec, &BuildOptions { subsampling: 3, ..Default::default() })
        .unwrap();
    let sc = s.matvec(&c.values);
    let e1 = rel_l2(&general.samples, &parallel.samples);
    let e2 = rel_l2(&piecewise.samples, &parallel.samples);
    let e3 = rel_l2(&sc, &piecewise.samples);
    check(
        e1 < 0.01 && e2 < 0.02 && e3 <= 1e-12,
        format!("general/parallel {e1:.2e}, piecewise/parallel {e2:.2e}, S·c/piecewise {e3:.1e}"),
    )
}

/// Static FFL: `u(t) = −μ0 2g ṡ ⟨ρ, e⟩ Δz (m̄′(|2g·|) ∗ Rc(θ, ·))(s(t))`.
fn ffl_identity(c: &ConcentrationGrid<f64>) -> f64 {
    let (g, f_d) = (1.0, 25e3);
    let topo = Topology::StaticFfl { g, d: 0.01, f_d, alpha: 0.7 };
    let model = build_topology(topo).unwrap();
    let lp = LangevinParams::new(1.0, 1000.0).unwrap();
    let acq = AcquisitionConfig::new(f_d, 0.0, 8e6, 1.0 / f_d).unwrap();
    let coil = ReceiveCoil::new(Vec3::new(1.0, 0.4, 0.0)).unwrap();
    let u = simulate_parallel(&model, c, &coil, &acq, &lp, &ForwardOptions { subsampling: 4, fd_step: None }).unwrap();
    let e = topo.ffl_locus(0.0).unwrap().normal();
    let ds = 2e-5;
    let sd: Vec<f64> = (0..2000).map(|i| (i as f64 - 1000.0) * ds).collect();
    let radon = radon_transform(c, &[e.y.atan2(e.x)], &sd);
    let h = 1e-9;
    let oracle: Vec<f64> = (0..u.len())
        .map(|i| {
            let t = u.time(i);
            let s = topo.ffl_locus(t).unwrap().signed_distance();
            let sdot = (topo.ffl_locus(t + h).unwrap().signed_distance() - topo.ffl_locus(t - h).unwrap().signed_distance()) / (2.0 * h);
            let conv: f64 = sd.iter().zip(radon.projection(0)).map(|(&sp, &rc)| lp.mbar_prime((2.0 * g * (s - sp)).abs()) * rc * ds).sum();
            -mu0::<f64>() * 2.0 * g * sdot * coil.sensitivity.dot(e) * c.spec.spacing[2] * conv
        })
        .collect();
    rel_l2(&u.samples, &oracle)
}

/// Line FFP, `B = G r + d sin(2π f_d t)`, `G = diag(−g, −g, 2g)`:
/// `u(t) = −2π μ0 f_d cos(2π f_d t) ⟨ρ, d⟩ (c ∗ m̄′(|G·|))(r_FFP(t))`,
/// the convolution summed by brute force over a finer quadrature.
fn ffp_identity(c: &ConcentrationGrid<f64>) -> f64 {
    let (g, f_d) = (1.0, 25e3);
    let d = [6e-3, 2e-3, 4e-3];
    let model = build_topology(Topology::LineFfp { g, d, f_d }).unwrap();
    let lp = LangevinParams::new(1.0, 300.0).unwrap();
    let acq = AcquisitionConfig::new(f_d, 0.0, 4e6, 1.0 / f_d).unwrap();
    let coil = ReceiveCoil::new(Vec3::new(1.0, -0.5, 0.25)).unwrap();
    let u = simulate_parallel(&model, c, &coil, &acq, &lp, &ForwardOptions { subsampling: 3, fd_step: None }).unwrap();
    let spec = &c.spec;
    let q = 6;
    let w = spec.cell_volume() / (q * q * q) as f64;
    let mut points = Vec::new();
    for k in 0..spec.len() {
        if c.values[k] == 0.0 {
            continue;
        }
        let center = spec.center(k);
        for a in 0..q {
            for b in 0..q {
                for l in 0..q {
                    let off = |i: usize, ax: usize| ((i as f64 + 0.5) / q as f64 - 0.5) * spec.spacing[ax];
                    points.push((center + Vec3::new(off(a, 0), off(b, 1), off(l, 2)), c.values[k] * w));
                }
            }
        }
    }
    let dv = Vec3::from_f64(d);
    let oracle: Vec<f64> = (0..u.len())
        .map(|i| {
            let wt = 2.0 * PI * f_d * u.time(i);
            // G r_FFP = −d sin(2π f_d t)
            let r_ffp = Vec3::new(d[0] / g, d[1] / g, -d[2] / (2.0 * g)).scale(wt.sin());
            let conv: f64 = points
                .iter()
                .map(|&(p, m)| {
                    let x = r_ffp - p;
                    m * lp.mbar_prime(Vec3::new(-g * x.x, -g * x.y, 2.0 * g * x.z).norm())
                })
                .sum();
            -2.0 * PI * mu0::<f64>() * f_d * wt.cos() * coil.sensitivity.dot(dv) * conv
        })
        .collect();
    rel_l2(&u.samples, &oracle)
}

fn convolution_criterion() -> Outcome {
    let plane = GridSpec::planar_square(81, 0.02, 1e-3).unwrap();
    let mut point = ConcentrationGrid::zeros(plane);
    point.values[plane.index(45, 38, 0)] = 1.0;
    let mut pair = point.clone();
    pair.values[plane.index(30, 50, 0)] = 0.5;

    let vol = GridSpec::centered([9, 9, 9], [1e-3; 3]).unwrap();
    let mut p3 = ConcentrationGrid::zeros(vol);
    p3.values[vol.index(5, 3, 4)] = 1.0;
    let mut pair3 = p3.clone();
    pair3.values[vol.index(2, 6, 5)] = 2.0;

    let errs = [ffl_identity(&point), ffl_identity(&pair), ffp_identity(&p3), ffp_identity(&pair3)];
    check(
        errs.iter().all(|&e| e < 0.02),
        format!("FFL point {:.2e}, FFL pair {:.2e}, FFP point {:.2e}, FFP pair {:.2e}", errs[0], errs[1], errs[2], errs[3]),
    )
}

fn fbp_baseline_criterion() -> Outcome {
    let spec = GridSpec::planar_square(128, 0.1, 1e-3).unwrap();
    let phantom = build_disc_phantom_with_ring(0.1, &[0.012, 0.016, 0.02, 0.024], 0.025, spec).unwrap();
    let d = uniform_displacements(256, 0.075);
    let err = |k| nrmse(&fbp_reconstruct(&radon_transform(&phantom, &half_circle_angles(k), &d), &spec).unwrap(), &phantom).unwrap();
    let (e25, e180, e250) = (err(25), err(180), err(250));
    check(e180 < 0.15 && e25 > e250, format!("NRMSE 180 angles {e180:.4}, 25 angles {e25:.4} > 250 angles {e250:.4}"))
}

fn desk(perturbed: bool) -> Experiment {
    let mut c = ExperimentConfig::default();
    if perturbed {
        c.field.perturbation_magnitude = 0.2;
    }
    Experiment::new(c).unwrap()
}

fn headline_criterion(results: &mut Vec<(f64, Vec<f64>)>) -> Outcome {
    let mut nr = Vec::new();
    for perturbed in [false, true] {
        let exp = desk(perturbed);
        let filtered = exp.filter(&exp.simulate().unwrap());
        let rec = exp.reconstruct(&exp.system_matrices(&exp.approx().unwrap()).unwrap(), &filtered).unwrap();
        let fbp = exp.fbp(&exp.sinogram(&filtered).unwrap()).unwrap();
        let pair = (exp.nrmse(&rec.image).unwrap(), exp.nrmse(&fbp).unwrap());
        results.push((pair.0, rec.lsqr.residuals));
        nr.push(pair);
    }
    let ((ia, ib), (pa, pb)) = (nr[0], nr[1]);
    let gap = (ia - ib).abs() / ia.min(ib);
    check(
        pa < pb && gap < 0.3,
        format!("perturbed: algebraic {pa:.4} < FBP {pb:.4}; ideal: algebraic {ia:.4}, FBP {ib:.4}, gap {:.1}%", 100.0 * gap),
    )
}

fn sweep_criterion(residuals: &mut Vec<Vec<f64>>) -> Outcome {
    let exp = desk(false);
    let filtered = exp.filter(&exp.simulate().unwrap());
    let mut sweep = |p: SweepParameter, values: &[&str]| {
        let values: Vec<String> = values.iter().map(|s| s.to_string()).collect();
        let pts = run_sweep(&exp, &filtered, p, &values).unwrap();
        residuals.extend(pts.iter().map(|p| p.residuals.clone()));
        pts.iter().map(|p| p.nrmse).collect::<Vec<f64>>()
    };
    let b = sweep(SweepParameter::Threshold, &["1", "2", "3", "4", "5", "10"]);
    let plateau = &b[3..];
    let spread = plateau.iter().cloned().fold(0.0, f64::max) / plateau.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let falling = b[..4].windows(2).all(|w| w[1] <= w[0]);
    let n = sweep(SweepParameter::Nodes, &["3", "4", "8", "30"]);
    let n_gap = (n[2] - n[3]).abs() / n[3];
    let s = sweep(SweepParameter::Scheme, &["secant-equidistant", "tangent-equidistant", "tangent-l1"]);
    let s_gap = s.iter().cloned().fold(0.0, f64::max) / s.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join("/");
    check(
        spread <= 0.05 && falling && n_gap < 0.1 && s_gap < 0.1,
        format!(
            "b 1..10 mT {} (4-10 spread {:.1}%, 1-4 non-increasing {falling}); N {} (8 vs 30 {:.1}%); schemes {} ({:.1}%)",
            fmt(&b),
            100.0 * spread,
            fmt(&n),
            100.0 * n_gap,
            fmt(&s),
            100.0 * s_gap
        ),
    )
}

/// Least-squares solution by Householder QR.
fn qr_solve(rows: usize, cols: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    for k in 0..cols {
        let norm: f64 = (k..rows).map(|i| r[i * cols + k].powi(2)).sum::<f64>().sqrt();
        let alpha = if r[k * cols + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| r[i * cols + k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * r[i * cols + j]).sum();
            for i in k..rows {
                r[i * cols + j] -= 2.0 * dot / vv * v[i - k];
            }
        }
        let dot: f64 = (k..rows).map(|i| v[i - k] * y[i]).sum();
        for i in k..rows {
            y[i] -= 2.0 * dot / vv * v[i - k];
        }
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| r[k * cols + j] * x[j]).sum();
        x[k] = (y[k] - s) / r[k * cols + k];
    }
    x
}

fn lsqr_criterion(desk_runs: &[(f64, Vec<f64>)], sweep_residuals: &[Vec<f64>]) -> Outcome {
    let (rows, cols) = (200, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut data = vec![0.0; rows * cols];
    for k in 0..cols {
        data[k * cols + k] = rng.random_range(1.0..3.0);
    }
    for v in data.iter_mut() {
        if rng.random_bool(0.05) {
            *v += rng.random_range(-0.3..0.3);
        }
    }
    let a = DenseMatrix::new(rows, cols, data.clone()).unwrap();
    let truth: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut b = vec![0.0; rows];
    a.apply(&truth, &mut b);
    let opts = LsqrOptions { max_iterations: 200, atol: 1e-15, btol: 1e-15, record_residuals: true, ..Default::default() };
    let res = lsqr_solve(&a, &b, &opts).unwrap();
    let direct = qr_solve(rows, cols, &data, &b);
    let e_qr = rel_l2(&res.x, &direct);
    let e_truth = rel_l2(&res.x, &truth);
    let all_monotone = monotone(&res.residuals)
        && desk_runs.iter().all(|r| monotone(&r.1))
        && sweep_residuals.iter().all(|r| monotone(r));
    let drift: Vec<f64> = desk_runs.iter().zip(REGRESSION_NRMSE).map(|(r, reference)| (r.0 - reference).abs() / reference).collect();
    check(
        e_qr < 1e-8 && e_truth < 1e-8 && all_monotone && drift.len() == 2 && drift.iter().all(|&d| d < 0.02),
        format!(
            "vs QR {e_qr:.1e}, vs truth {e_truth:.1e}; {} residual histories monotone: {all_monotone}; regression drift {:.2e}/{:.2e}",
            1 + desk_runs.len() + sweep_residuals.len(),
            drift.first().copied().unwrap_or(f64::NAN),
            drift.get(1).copied().unwrap_or(f64::NAN)
        ),
    )
}

fn main() {
    let mut desk_runs = Vec::new();
    let mut sweep_residuals = Vec::new();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n:>2} {tag} {name} ({secs:.1} s): {detail}");
        if outcome.is_err() {
            failed += 1;
        }
    };
    report(1, "langevin", &mut langevin_criterion);
    report(2, "zero-field loci", &mut zero_field_criterion);
    report(3, "harmonicity", &mut harmonicity_criterion);
    report(4, "approximation bounds", &mut error_bound_criterion);
    report(5, "model chain", &mut model_chain_criterion);
    report(6, "convolution identities", &mut convolution_criterion);
    report(7, "fbp baseline", &mut fbp_baseline_criterion);
    report(8, "algebraic vs fbp", &mut || headline_criterion(&mut desk_runs));
    report(9, "sweeps", &mut || sweep_criterion(&mut sweep_residuals));
    report(10, "lsqr", &mut || lsqr_criterion(&desk_runs, &sweep_residuals));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
