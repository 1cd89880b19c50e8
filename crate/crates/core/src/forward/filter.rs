use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::trace::SignalTrace;
use crate::scalar::Real;

/// Brick-wall high-pass: DFT, zero every bin with `|f| < cutoff` (both
/// signs), inverse DFT, keep the real part.
#[derive(Clone)]
pub struct HighPass<T: Real> {
    len: usize,
    keep: Vec<bool>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for HighPass<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let removed = self.keep.iter().filter(|k| !**k).count();
        f.debug_struct("HighPass").field("len", &self.len).field("removed_bins", &removed).finish()
    }
}

impl<T: Real> HighPass<T> {
    pub fn new(len: usize, sample_rate: T, cutoff: T) -> Self {
        let n = T::of_usize(len);
        let keep = (0..len)
            .map(|k| {
                let kk = if 2 * k <= len { T::of_usize(k) } else { T::of_usize(len - k) };
                !(kk * sample_rate / n < cutoff)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Self { len, keep, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// True when no bin is removed.
    pub fn is_identity(&self) -> bool {
        self.keep.iter().all(|&k| k)
    }

    pub fn removes_bin(&self, k: usize) -> bool {
        !self.keep[k]
    }

    pub fn apply(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.len, "high-pass length mismatch");
        if self.is_identity() {
            return;
        }
        let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward.process(&mut buf);
        for (c, &k) in buf.iter_mut().zip(&self.keep) {
            if !k {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        self.inverse.process(&mut buf);
        let scale = T::of_usize(self.len).recip();
        for (v, c) in x.iter_mut().zip(&buf) {
            *v = c.re * scale;
        }
    }
}

pub fn apply_highpass<T: Real>(trace: &SignalTrace<T>, cutoff: T) -> SignalTrace<T> {
    let mut s = trace.samples.clone();
    HighPass::new(s.len(), trace.sample_rate, cutoff).apply(&mut s);
    trace.with_samples(s)
}

/// Adds i.i.d. Gaussian noise with standard deviation `sigma`.
pub fn add_noise<T: Real>(trace: &SignalTrace<T>, sigma: T, seed: u64) -> SignalTrace<T> {
    if sigma == T::zero() {
        return trace.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.f64()).expect("finite nonnegative sigma");
    trace.with_samples(trace.samples.iter().map(|&v| v + T::of(normal.sample(&mut rng))).collect())
}

/// Default noise level: `1e-3` times the RMS of the clean signal.
pub fn default_noise_sigma<T: Real>(trace: &SignalTrace<T>) -> T {
    T::of(1e-3) * trace.rms()
}
