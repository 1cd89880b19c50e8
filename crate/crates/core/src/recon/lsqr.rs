use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real linear map `A: R^cols → R^rows` with its transpose.
pub trait LinearOperator<T>: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[T], y: &mut [T]);
    /// `x = Aᵀ y`.
    fn apply_transpose(&self, y: &[T], x: &mut [T]);
}

/// Row-major dense matrix, mainly for small systems and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Config("dense matrix data has wrong length".into()));
        }
        Ok(Self { rows, cols, data })
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.data[r * self.cols..(r + 1) * self.cols].iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }

    fn apply_transpose(&self, y: &[T], x: &mut [T]) {
        x.iter_mut().for_each(|v| *v = T::zero());
        for (r, &yr) in y.iter().enumerate() {
            for (xc, &a) in x.iter_mut().zip(&self.data[r * self.cols..(r + 1) * self.cols]) {
                *xc += a * yr;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqrOptions<T> {
    pub max_iterations: usize,
    pub atol: T,
    pub btol: T,
    /// Tikhonov damping; zero (the default) means plain least squares.
    pub damp: T,
    /// Record the true residual `‖A x_i − b‖` (one extra product per
    /// iteration) instead of the recursive estimate.
    pub record_residuals: bool,
}

impl<T: Real> Default for LsqrOptions<T> {
    fn default() -> Self {
        Self { max_iterations: 20, atol: T::of(1e-8), btol: T::of(1e-8), damp: T::zero(), record_residuals: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `b = 0`, so `x = 0` is exact.
    ZeroRhs,
    /// `Aᵀ b = 0`; `x = 0` is a least-squares solution.
    ZeroOperator,
    /// `‖r‖ ≤ btol ‖b‖ + atol ‖A‖ ‖x‖`.
    ResidualTolerance,
    /// `‖Aᵀ r‖ ≤ atol ‖A‖ ‖r‖`.
    NormalTolerance,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqrResult<T> {
    pub x: Vec<T>,
    /// Residual norm before the first iteration and after each iteration.
    pub residuals: Vec<T>,
    pub iterations: usize,
    pub stop: StopReason,
    /// Set when the data are nonzero but `Aᵀ b` vanishes.
    pub warning: Option<String>,
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&a| a * a).sum::<T>().sqrt()
}

fn scale<T: Real>(v: &mut [T], s: T) {
    v.iter_mut().for_each(|a| *a = *a * s);
}

/// LSQR (Paige–Saunders) from `x = 0`.
pub fn lsqr_solve<T: Real, A: LinearOperator<T> + ?Sized>(a: &A, b: &[T], opts: &LsqrOptions<T>) -> Result<LsqrResult<T>> {
    lsqr_solve_with(a, b, opts, |_, _| {})
}

/// [`lsqr_solve`] calling `callback(i, x_i)` after each iteration.
pub fn lsqr_solve_with<T: Real, A: LinearOperator<T> + ?Sized>(
    a: &A,
    b: &[T],
    opts: &LsqrOptions<T>,
    mut callback: impl FnMut(usize, &[T]),
) -> Result<LsqrResult<T>> {
    if b.len() != a.rows() {
        return Err(Error::Config(format!("operator has {} rows but data has {} entries", a.rows(), b.len())));
    }
    if opts.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be at least 1".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    let zero = T::zero();
    let mut x = vec![zero; n];
    let mut u = b.to_vec();
    let bnorm = norm(&u);
    let mut beta = bnorm;
    let mut residuals = vec![bnorm];
    let done = |x: Vec<T>, residuals: Vec<T>, it, stop, warning| Ok(LsqrResult { x, residuals, iterations: it, stop, warning });
    if beta == zero {
        return done(x, residuals, 0, StopReason::ZeroRhs, None);
    }
    scale(&mut u, beta.recip());
    let mut v = vec![zero; n];
    a.apply_transpose(&u, &mut v);
    let mut alpha = norm(&v);
    if alpha == zero {
        let w = "operator is zero on the data (Aᵀ b = 0); returning x = 0".to_string();
        log::warn!("{w}");
        return done(x, residuals, 0, StopReason::ZeroOperator, Some(w));
    }
    scale(&mut v, alpha.recip());
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;
    let mut anorm2 = zero;
    let damp = opts.damp;
    let mut tmp_m = vec![zero; m];
    let mut tmp_n = vec![zero; n];
    let mut stop = StopReason::IterationLimit;
    let mut it = 0;
    while it < opts.max_iterations {
        it += 1;
        // bidiagonalization step
        a.apply(&v, &mut tmp_m);
        for (ui, &t) in u.iter_mut().zip(&tmp_m) {
            *ui = t - alpha * *ui;
        }
        beta = norm(&u);
        anorm2 = anorm2 + alpha * alpha + beta * beta + damp * damp;
        if beta > zero {
            scale(&mut u, beta.recip());
            a.apply_transpose(&u, &mut tmp_n);
            for (vi, &t) in v.iter_mut().zip(&tmp_n) {
                *vi = t - beta * *vi;
            }
            alpha = norm(&v);
            if alpha > zero {
                scale(&mut v, alpha.recip());
            }
        }
        // eliminate the damping parameter
        let rhobar1 = (rhobar * rhobar + damp * damp).sqrt();
        let c1 = rhobar / rhobar1;
        phibar = c1 * phibar;
        // plane rotation
        let rho = (rhobar1 * rhobar1 + beta * beta).sqrt();
        let c = rhobar1 / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar = s * phibar;
        let t1 = phi / rho;
        let t2 = -theta / rho;
        for ((xi, wi), &vi) in x.iter_mut().zip(w.iter_mut()).zip(&v) {
            *xi += t1 * *wi;
            *wi = vi + t2 * *wi;
        }
        let rnorm = if opts.record_residuals {
            a.apply(&x, &mut tmp_m);
            tmp_m.iter().zip(b).map(|(&ax, &bi)| (ax - bi) * (ax - bi)).sum::<T>().sqrt()
        } else {
            phibar.abs()
        };
        residuals.push(rnorm);
        callback(it, &x);
        let anorm = anorm2.sqrt();
        let arnorm = (phibar * alpha * c).abs();
        let xnorm = norm(&x);
        if phibar.abs() <= opts.btol * bnorm + opts.atol * anorm * xnorm {
            stop = StopReason::ResidualTolerance;
            break;
        }
        if arnorm <= opts.atol * anorm * phibar.abs() {
            stop = StopReason::NormalTolerance;
            break;
        }
        if beta == zero || alpha == zero {
            stop = StopReason::ResidualTolerance;
            break;
        }
    }
    done(x, residuals, it, stop, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero() {
        let a = DenseMatrix::new(3, 2, vec![1.0f64, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let r = lsqr_solve(&a, &[0.0; 3], &LsqrOptions::default()).unwrap();
        assert_eq!(r.x, vec![0.0, 0.0]);
        assert_eq!(r.stop, StopReason::ZeroRhs);
    }

    #[test]
    fn zero_operator_warns() {
        let a = DenseMatrix::new(2, 2, vec![0.0f64; 4]).unwrap();
        let r = lsqr_solve(&a, &[1.0, 2.0], &LsqrOptions::default()).unwrap();
        assert_eq!(r.x, vec![0.0, 0.0]);
        assert!(r.warning.is_some());
    }

    #[test]
    fn small_exact_system() {
        let a = DenseMatrix::new(3, 2, vec![2.0f64, 1.0, 1.0, 3.0, 0.0, 1.0]).unwrap();
        let xt = [0.5, -1.5];
        let mut b = vec![0.0; 3];
        a.apply(&xt, &mut b);
        let opts = LsqrOptions { max_iterations: 10, ..Default::default() };
        let r = lsqr_solve(&a, &b, &opts).unwrap();
        assert!((r.x[0] - xt[0]).abs() < 1e-10 && (r.x[1] - xt[1]).abs() < 1e-10);
    }

    #[test]
    fn mismatched_lengths() {
        let a = DenseMatrix::new(2, 2, vec![1.0f64; 4]).unwrap();
        assert!(lsqr_solve(&a, &[1.0], &LsqrOptions::default()).is_err());
    }
}
