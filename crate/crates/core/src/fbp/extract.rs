use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::sinogram::{uniform_displacements, Sinogram, SinogramMeta};
use crate::error::{Error, Result};
use crate::fields::Topology;
use crate::forward::{ReceiveCoil, SignalTrace};
use crate::magnetization::MagnetizationCurve;
use crate::scalar::{mu0, Real};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramOptions<T> {
    /// Bins on `[−d/2g, d/2g]`.
    pub n_displacements: usize,
    pub deconvolve: bool,
    /// Noise-to-signal ratio of the Wiener filter, relative to the peak kernel power.
    pub nsr: T,
    /// Samples with `|cos(2π f_d t)|` below this are dropped.
    pub cos_guard: T,
    /// Keep every `decimation`-th sample.
    pub decimation: usize,
    /// Slice thickness of the imaged layer (m).
    pub thickness: T,
}

impl<T: Real> Default for SinogramOptions<T> {
    fn default() -> Self {
        Self {
            n_displacements: 64,
            deconvolve: false,
            nsr: T::of(1e-2),
            cos_guard: T::of(0.05),
            decimation: 1,
            thickness: T::one(),
        }
    }
}

fn ffl_normal<T: Real>(topology: &Topology<T>, t: T) -> Vec3<T> {
    let (s, c) = topology.ffl_half_angle(t).expect("FFL topology").sin_cos();
    Vec3::new(s, -c, T::zero())
}

/// Turns FFL voltage traces into Radon data.
///
/// Each sweep between two turning points of the drive (a half drive period
/// centred on a zero of `sin(2π f_d t)`) becomes one projection at the normal
/// angle of its midpoint. Samples are divided by the velocity and
/// sensitivity factor `−2π d μ0 f_d cos(2π f_d t) ⟨ρ_ν, e_α⟩` (least squares
/// over the coils), mapped to `s = (d/2g) sin(2π f_d t)` and bin-averaged.
///
/// For rotating acquisitions the partial sweeps at both ends are joined into
/// one projection when they describe the same line. Other partial sweeps are
/// dropped.
pub fn signal_to_sinogram<T: Real, C: MagnetizationCurve<T>>(
    traces: &[SignalTrace<T>],
    coils: &[ReceiveCoil<T>],
    topology: &Topology<T>,
    curve: &C,
    opts: &SinogramOptions<T>,
) -> Result<Sinogram<T>> {
    let (g, d, f_d) = topology
        .ffl_parameters()
        .ok_or_else(|| Error::Unsupported(format!("{} acquisitions cannot be turned into a sinogram", topology.name())))?;
    if traces.is_empty() || traces.len() != coils.len() {
        return Err(Error::Config("need one receive coil per trace".into()));
    }
    let len = traces[0].len();
    let fs = traces[0].sample_rate;
    let t0 = traces[0].t0;
    if traces.iter().any(|tr| tr.len() != len || tr.sample_rate != fs || tr.t0 != t0) {
        return Err(Error::Config("traces must share their time base".into()));
    }
    if opts.n_displacements < 2 || opts.decimation == 0 {
        return Err(Error::Config("need at least 2 displacement bins and a positive decimation".into()));
    }
    let two_pi = T::PI() + T::PI();
    let half_width = d / (g + g);
    let nd = opts.n_displacements;
    let displacements = uniform_displacements(nd, half_width);
    let ds = displacements[1] - displacements[0];

    // sweep k is centred on t = k / 2f_d
    let period = (f_d + f_d).recip();
    let duration = T::of_usize(len) / fs;
    let eps = T::of(1e-9);
    let k_first = (t0 / period + T::of(0.5) - eps).ceil().to_i64().unwrap_or(0);
    let k_last = ((t0 + duration) / period - T::of(0.5) + eps).floor().to_i64().unwrap_or(0);
    let k_start = (t0 / period).round().to_i64().unwrap_or(0);
    let halves = duration / period;
    let wrapped = matches!(topology, Topology::RotatingFfl { .. })
        && k_start < k_first
        && (halves - halves.round()).abs() < T::of(1e-6)
        && halves.round().to_i64().unwrap_or(0) % 2 == 1;
    let mut sweeps: Vec<i64> = (k_first..=k_last).collect();
    if wrapped {
        sweeps.insert(0, k_start);
    }
    let offset = usize::from(wrapped);
    let sweep_index = |t: T| -> Option<usize> {
        let k = (t / period).round().to_i64()?;
        if (k_first..=k_last).contains(&k) {
            Some((k - k_first) as usize + offset)
        } else if wrapped && (k == k_start || ((t - duration) / period).round().to_i64() == Some(k_start)) {
            Some(0)
        } else {
            None
        }
    };

    let coil_norm = coils.iter().map(|c| c.sensitivity.norm()).fold(T::zero(), |a, b| a.max(b));
    let full_scale = two_pi * d * mu0::<T>() * f_d * coil_norm * opts.thickness;
    let mut sums = vec![T::zero(); sweeps.len() * nd];
    let mut counts = vec![0usize; sweeps.len() * nd];
    for i in (0..len).step_by(opts.decimation) {
        let t = t0 + T::of_usize(i) / fs;
        let Some(p) = sweep_index(t) else { continue };
        let (sn, cs) = (two_pi * f_d * t).sin_cos();
        if cs.abs() < opts.cos_guard {
            continue;
        }
        let n = ffl_normal(topology, t);
        let mut num = T::zero();
        let mut den = T::zero();
        for (tr, coil) in traces.iter().zip(coils) {
            let w = -two_pi * d * mu0::<T>() * f_d * cs * coil.sensitivity.dot(n) * opts.thickness;
            num += w * tr.samples[i];
            den += w * w;
        }
        if den <= (full_scale * T::of(1e-3)).powi(2) {
            continue;
        }
        let mut s = half_width * sn;
        // wrapped samples see the same line with the opposite normal
        if n.dot(ffl_normal(topology, T::of(sweeps[p] as f64) * period)) < T::zero() {
            s = -s;
        }
        let j = ((s + half_width) / ds).floor().to_usize().unwrap_or(0).min(nd - 1);
        sums[p * nd + j] += num / den;
        counts[p * nd + j] += 1;
    }

    let mut values = vec![T::zero(); sweeps.len() * nd];
    for p in 0..sweeps.len() {
        fill_bins(&sums[p * nd..(p + 1) * nd], &counts[p * nd..(p + 1) * nd], &mut values[p * nd..(p + 1) * nd]);
    }
    let angles: Vec<T> = sweeps
        .iter()
        .map(|&k| topology.ffl_half_angle(T::of(k as f64) * period).unwrap() - T::FRAC_PI_2())
        .collect();
    let mut sino = Sinogram { values, angles, displacements, meta: None };
    if opts.deconvolve {
        wiener_deconvolve(&mut sino, g, curve, opts.nsr);
    } else {
        // unit-area kernel: ∫ m̄′(2g|s|) ds = m̄(∞)/g
        let area = curve.mbar(T::of(2.0) * g * half_width * T::of(1e3)) / g;
        for v in &mut sino.values {
            *v /= area;
        }
    }
    let f_rot = match *topology {
        Topology::RotatingFfl { f_rot, .. } => f_rot,
        _ => T::zero(),
    };
    sino.meta = Some(SinogramMeta { f_d, f_rot, g, d });
    coverage_check(&sino);
    Ok(sino)
}

/// Averages bins; empty bins are interpolated from their neighbours, empty
/// bins at the ends are zero.
fn fill_bins<T: Real>(sums: &[T], counts: &[usize], out: &mut [T]) {
    let filled: Vec<usize> = (0..sums.len()).filter(|&j| counts[j] > 0).collect();
    for &j in &filled {
        out[j] = sums[j] / T::of_usize(counts[j]);
    }
    for w in filled.windows(2) {
        let (a, b) = (w[0], w[1]);
        for j in a + 1..b {
            let f = T::of_usize(j - a) / T::of_usize(b - a);
            out[j] = out[a] * (T::one() - f) + out[b] * f;
        }
    }
}

fn coverage_check<T: Real>(sino: &Sinogram<T>) {
    let k = sino.n_angles();
    if k < 2 {
        log::warn!("sinogram has {k} projection(s)");
        return;
    }
    let mut a: Vec<f64> = sino.angles.iter().map(|x| x.f64().rem_euclid(std::f64::consts::PI)).collect();
    a.sort_by(|x, y| x.total_cmp(y));
    // largest gap on the half circle; coverage is what remains
    let mut gap = a[0] + std::f64::consts::PI - a[k - 1];
    for w in a.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let span = std::f64::consts::PI - gap + std::f64::consts::PI / k as f64;
    if span.to_degrees() < 150.0 {
        log::warn!("angular coverage of {:.1}° is below 150°", span.to_degrees());
    }
}

/// Wiener deconvolution of every projection with `m̄′(|2g·s|)`.
pub fn wiener_deconvolve<T: Real, C: MagnetizationCurve<T>>(sino: &mut Sinogram<T>, g: T, curve: &C, nsr: T) {
    let n = sino.n_displacements();
    let m = (2 * n).next_power_of_two();
    let ds = sino.step();
    let mut kernel = vec![Complex::new(T::zero(), T::zero()); m];
    for (j, k) in kernel.iter_mut().enumerate() {
        let off = if j <= m / 2 { T::of_usize(j) } else { -T::of_usize(m - j) };
        *k = Complex::new(curve.mbar_prime((T::of(2.0) * g * off * ds).abs()) * ds, T::zero());
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut kernel);
    let peak = kernel.iter().map(|k| k.norm_sqr()).fold(T::zero(), |a, b| a.max(b));
    let reg = nsr * peak;
    let scale = T::of_usize(m).recip();
    for i in 0..sino.n_angles() {
        let row = sino.projection_mut(i);
        let mut buf: Vec<Complex<T>> = (0..m).map(|j| Complex::new(if j < n { row[j] } else { T::zero() }, T::zero())).collect();
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&kernel) {
            *b = *b * k.conj() / (k.norm_sqr() + reg);
        }
        inv.process(&mut buf);
        for (r, b) in row.iter_mut().zip(&buf) {
            *r = b.re * scale;
        }
    }
}
