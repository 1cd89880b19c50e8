use sha2::{Digest, Sha256};

use crate::fields::FieldModel;
use crate::forward::ReceiveCoil;
use crate::magnetization::MagnetizationApprox;
use crate::phantom::GridSpec;
use crate::scalar::Real;

/// Incremental SHA-256 over tagged binary fields, reduced to 64 bits.
#[derive(Debug, Clone, Default)]
pub struct ConfigHasher {
    inner: Sha256,
}

impl ConfigHasher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.u64(s.len() as u64);
        self.inner.update(s.as_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.inner.update(v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.inner.update(v.to_bits().to_le_bytes());
        self
    }

    pub fn real<T: Real>(&mut self, v: T) -> &mut Self {
        self.f64(v.f64())
    }

    pub fn field<T: Real>(&mut self, model: &FieldModel<T>) -> &mut Self {
        self.str("field").real(model.radius()).u64(model.terms().len() as u64);
        for t in model.terms() {
            let m = &t.modulation;
            self.u64(t.component as u64).u64(t.degree as u64).u64(t.order as i64 as u64).real(t.coefficient);
            self.str(m.kind.as_str()).real(m.f1).real(m.f2).real(m.phase).real(m.scale);
        }
        self
    }

    pub fn approx<T: Real>(&mut self, a: &MagnetizationApprox<T>) -> &mut Self {
        self.str("approx").str(a.scheme().as_str()).u64(a.nodes().len() as u64);
        for &x in a.nodes() {
            self.real(x);
        }
        for &s in a.slopes() {
            self.real(s);
        }
        self
    }

    pub fn grid<T: Real>(&mut self, g: &GridSpec<T>) -> &mut Self {
        self.str("grid");
        for a in 0..3 {
            self.u64(g.dims[a] as u64).real(g.spacing[a]).real(g.origin[a]);
        }
        self
    }

    pub fn coil<T: Real>(&mut self, c: &ReceiveCoil<T>) -> &mut Self {
        self.str("coil").u64(c.index as u64).u64(c.is_constant() as u64);
        self.real(c.sensitivity.x).real(c.sensitivity.y).real(c.sensitivity.z)
    }

    pub fn times<T: Real>(&mut self, times: &[T]) -> &mut Self {
        self.str("times").u64(times.len() as u64);
        for &t in times {
            self.real(t);
        }
        self
    }

    pub fn finish(&self) -> u64 {
        let d = self.inner.clone().finalize();
        u64::from_le_bytes(d[..8].try_into().unwrap())
    }
}

/// Hash identifying a single-coil system matrix.
pub fn system_matrix_hash<T: Real>(
    model: &FieldModel<T>,
    approx: &MagnetizationApprox<T>,
    coil: &ReceiveCoil<T>,
    times: &[T],
    grid: &GridSpec<T>,
    subsampling: usize,
) -> u64 {
    ConfigHasher::new().field(model).approx(approx).coil(coil).times(times).grid(grid).u64(subsampling as u64).finish()
}
