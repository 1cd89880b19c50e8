use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniformly sampled receive-coil voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTrace<T> {
    pub samples: Vec<T>,
    pub sample_rate: T,
    pub t0: T,
    pub coil_index: usize,
}

impl<T: Real> SignalTrace<T> {
    pub fn new(samples: Vec<T>, sample_rate: T, t0: T, coil_index: usize) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config("a trace needs at least two samples".into()));
        }
        if !(sample_rate > T::zero()) {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        Ok(Self { samples, sample_rate, t0, coil_index })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + T::of_usize(i) / self.sample_rate
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn norm(&self) -> T {
        self.samples.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn rms(&self) -> T {
        self.norm() / T::of_usize(self.len()).sqrt()
    }

    pub fn with_samples(&self, samples: Vec<T>) -> Self {
        Self { samples, ..self.clone() }
    }
}

/// Acquisition timing and post-processing parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionConfig<T> {
    pub f_d: T,
    /// Rotation frequency; zero for non-rotating scans.
    pub f_rot: T,
    pub sample_rate: T,
    pub duration: T,
    pub t0: T,
    /// High-pass cutoff in Hz; zero disables filtering.
    pub highpass_cutoff: T,
    /// Noise standard deviation in volts; `None` means relative default.
    pub noise_sigma: Option<T>,
}

impl<T: Real> AcquisitionConfig<T> {
    /// Cutoff `1.4 f_d`, no explicit noise level, `t0 = 0`.
    pub fn new(f_d: T, f_rot: T, sample_rate: T, duration: T) -> Result<Self> {
        let c = Self {
            f_d,
            f_rot,
            sample_rate,
            duration,
            t0: T::zero(),
            highpass_cutoff: T::of(1.4) * f_d,
            noise_sigma: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Duration covering exactly one rotation period `1 / f_rot`.
    pub fn one_rotation(f_d: T, f_rot: T, sample_rate: T) -> Result<Self> {
        Self::new(f_d, f_rot, sample_rate, f_rot.recip())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_d > T::zero()) {
            return Err(Error::Config("f_d must be positive".into()));
        }
        if !(self.sample_rate > T::of(2.0) * self.f_d) {
            return Err(Error::Config("sample rate must exceed 2 f_d".into()));
        }
        if !(self.duration > T::zero()) || self.sample_count() < 2 {
            return Err(Error::Config("duration must cover at least two samples".into()));
        }
        if self.f_rot < T::zero() || !self.f_rot.is_finite() {
            return Err(Error::Config("f_rot must be nonnegative".into()));
        }
        if self.f_rot > T::zero() {
            let periods = self.duration * self.f_rot;
            if (periods - periods.round()).abs() > T::of(1e-6) * periods.max(T::one()) || periods.round() < T::one() {
                return Err(Error::Config(format!(
                    "duration {} s is not an integer number of rotation periods",
                    self.duration
                )));
            }
        }
        if self.highpass_cutoff < T::zero() {
            return Err(Error::Config("high-pass cutoff must be nonnegative".into()));
        }
        if let Some(s) = self.noise_sigma {
            if s < T::zero() {
                return Err(Error::Config("noise sigma must be nonnegative".into()));
            }
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round().to_usize().unwrap_or(0)
    }

    pub fn sample_times(&self) -> Vec<T> {
        (0..self.sample_count()).map(|i| self.t0 + T::of_usize(i) / self.sample_rate).collect()
    }

    /// Samples per half drive period.
    pub fn samples_per_projection(&self) -> T {
        self.sample_rate / (T::of(2.0) * self.f_d)
    }
}

pub fn write_trace_csv<T: Real, W: Write>(trace: &SignalTrace<T>, mut w: W) -> Result<()> {
    writeln!(w, "t,volts")?;
    for (i, v) in trace.samples.iter().enumerate() {
        writeln!(w, "{:.16e},{:.16e}", trace.time(i).f64(), v.f64())?;
    }
    Ok(())
}

/// Header line `T sample_rate t0 coil`, then little-endian f64 samples.
pub fn write_trace_binary<T: Real, W: Write>(trace: &SignalTrace<T>, mut w: W) -> Result<()> {
    writeln!(w, "{} {} {} {}", trace.len(), trace.sample_rate, trace.t0, trace.coil_index)?;
    let mut buf = Vec::with_capacity(trace.len() * 8);
    for v in &trace.samples {
        buf.extend_from_slice(&v.f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_trace_binary<T: Real, R: Read>(r: R) -> Result<SignalTrace<T>> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let bad = |m: &str| Error::Parse { line: 1, msg: m.to_string() };
    if toks.len() != 4 {
        return Err(bad("trace header needs 4 fields"));
    }
    let n: usize = toks[0].parse().map_err(|_| bad("bad sample count"))?;
    let fs: f64 = toks[1].parse().map_err(|_| bad("bad sample rate"))?;
    let t0: f64 = toks[2].parse().map_err(|_| bad("bad t0"))?;
    let coil: usize = toks[3].parse().map_err(|_| bad("bad coil index"))?;
    let mut bytes = vec![0u8; n * 8];
    r.read_exact(&mut bytes)?;
    let samples = bytes.chunks_exact(8).map(|c| T::of(f64::from_le_bytes(c.try_into().unwrap()))).collect();
    SignalTrace::new(samples, T::of(fs), T::of(t0), coil)
}

pub fn read_trace_csv<T: Real, R: Read>(r: R) -> Result<Vec<(T, T)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let mut num = |what: &str| -> Result<T> {
            it.next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .map(T::of)
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad {what}") })
        };
        out.push((num("time")?, num("voltage")?));
    }
    Ok(out)
}

pub fn save_trace<T: Real>(trace: &SignalTrace<T>, path: impl AsRef<Path>) -> Result<()> {
    write_trace_binary(trace, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load_trace<T: Real>(path: impl AsRef<Path>) -> Result<SignalTrace<T>> {
    read_trace_binary(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let t = SignalTrace::new(vec![0.5f64, -1.25, 3e-9], 8e6, 1e-7, 1).unwrap();
        let mut buf = Vec::new();
        write_trace_binary(&t, &mut buf).unwrap();
        assert_eq!(read_trace_binary::<f64, _>(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn csv_round_trip() {
        let t = SignalTrace::new(vec![0.1f64, 0.2, -0.3], 4.0, 0.0, 0).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        let rows: Vec<(f64, f64)> = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(rows, vec![(0.0, 0.1), (0.25, 0.2), (0.5, -0.3)]);
    }

    #[test]
    fn acquisition_validation() {
        let a = AcquisitionConfig::one_rotation(25e3f64, 2e3, 8e6).unwrap();
        assert_eq!(a.sample_count(), 4000);
        assert_eq!(a.samples_per_projection(), 160.0);
        assert!(AcquisitionConfig::new(25e3f64, 2e3, 8e6, 0.7e-3).is_err());
        assert!(AcquisitionConfig::new(25e3f64, 0.0, 40e3, 1e-3).is_err());
        assert!(AcquisitionConfig::new(25e3f64, 0.0, 8e6, 0.3e-3).is_ok());
    }
}
