use super::approx::{interval_l1, ApproxScheme};
use super::langevin::MagnetizationCurve;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Interior nodes `x_k = b k / (N + 1)`, `k = 1..=N`.
pub fn nodes_equidistant<T: Real>(n: usize, b: T) -> Vec<T> {
    let d = T::of_usize(n + 1);
    (1..=n).map(|k| b * T::of_usize(k) / d).collect()
}

fn with_ends<T: Real>(interior: &[T], b: T) -> Vec<T> {
    let mut v = Vec::with_capacity(interior.len() + 2);
    v.push(T::zero());
    v.extend_from_slice(interior);
    v.push(b);
    v
}

/// `F(x_1..x_N) = Σ_k 2 m̄((x_k + x_{k+1})/2) − m̄(x_{k+1}) − m̄(x_k)` over
/// all intervals of `[0, b]`. It equals the L1 error of the approximation
/// that uses midpoint slopes on every interval.
pub fn l1_functional<T: Real, M: MagnetizationCurve<T>>(curve: &M, interior: &[T], b: T) -> T {
    let half = T::of(0.5);
    let two = T::of(2.0);
    with_ends(interior, b)
        .windows(2)
        .map(|w| two * curve.mbar(half * (w[0] + w[1])) - curve.mbar(w[0]) - curve.mbar(w[1]))
        .sum()
}

/// `∂F/∂x_k = m̄′(mid_{k−1}) + m̄′(mid_k) − 2 m̄′(x_k)`.
pub fn l1_functional_gradient<T: Real, M: MagnetizationCurve<T>>(curve: &M, interior: &[T], b: T) -> Vec<T> {
    let x = with_ends(interior, b);
    let half = T::of(0.5);
    (1..x.len() - 1)
        .map(|k| {
            curve.mbar_prime(half * (x[k - 1] + x[k])) + curve.mbar_prime(half * (x[k] + x[k + 1]))
                - T::of(2.0) * curve.mbar_prime(x[k])
        })
        .collect()
}

fn check_monotone<T: Real, M: MagnetizationCurve<T>>(curve: &M, b: T) -> Result<()> {
    let n = 4096;
    let mut prev = curve.mbar_prime(T::zero());
    if !(prev > T::zero()) {
        return Err(Error::Unsupported("m̄′(0) must be positive for L1-optimal nodes".into()));
    }
    for i in 1..=n {
        let v = curve.mbar_prime(b * T::of_usize(i) / T::of_usize(n));
        if !(v < prev) || !(v > T::zero()) {
            return Err(Error::Unsupported("m̄′ is not positive and strictly decreasing on [0, b]".into()));
        }
        prev = v;
    }
    Ok(())
}

fn golden_section<T: Real>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> T {
    let invphi = T::of((5f64.sqrt() - 1.0) / 2.0);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo <= T::epsilon() * T::of(4.0) * hi.abs().max(T::min_positive_value()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    T::of(0.5) * (lo + hi)
}

/// Local part of the objective that depends on `x_k` (intervals k−1 and k).
fn local_cost<T: Real, M: MagnetizationCurve<T>>(curve: &M, scheme: ApproxScheme, a: T, x: T, c: T) -> T {
    let half = T::of(0.5);
    let two = T::of(2.0);
    match scheme {
        ApproxScheme::Secant => {
            let s0 = (curve.mbar(x) - curve.mbar(a)) / (x - a);
            let s1 = (curve.mbar(c) - curve.mbar(x)) / (c - x);
            interval_l1(curve, a, x, s0) + interval_l1(curve, x, c, s1)
        }
        _ => {
            two * curve.mbar(half * (a + x)) + two * curve.mbar(half * (x + c)) - two * curve.mbar(x)
        }
    }
}

/// Coordinate descent sweeps with a golden-section search per coordinate,
/// keeping every node strictly between its neighbours.
fn coordinate_descent<T: Real, M: MagnetizationCurve<T>>(curve: &M, x: &mut [T], scheme: ApproxScheme, sweeps: usize) {
    let b = *x.last().unwrap();
    let tol = b * T::of(1e-13);
    for _ in 0..sweeps {
        let mut moved = T::zero();
        for k in 1..x.len() - 1 {
            let (a, c) = (x[k - 1], x[k + 1]);
            let margin = (c - a) * T::of(1e-9);
            let new = golden_section(a + margin, c - margin, |v| local_cost(curve, scheme, a, v, c));
            moved = moved.max((new - x[k]).abs());
            x[k] = new;
        }
        if moved < tol {
            break;
        }
    }
}

/// Newton iterations on the tridiagonal Hessian of `F`, with step halving so
/// that ordering is kept and the gradient norm decreases.
fn newton_polish<T: Real, M: MagnetizationCurve<T>>(curve: &M, x: &mut Vec<T>, rel_tol: T) -> T {
    let b = *x.last().unwrap();
    let scale = curve.mbar_prime(T::zero());
    let grad_norm = |x: &[T]| -> T {
        l1_functional_gradient(curve, &x[1..x.len() - 1], b).iter().map(|g| *g * *g).sum::<T>().sqrt() / scale
    };
    let half = T::of(0.5);
    let mut gn = grad_norm(x);
    for _ in 0..100 {
        if gn < rel_tol {
            break;
        }
        let n = x.len() - 2;
        let g = l1_functional_gradient(curve, &x[1..n + 1], b);
        let mid: Vec<T> = x.windows(2).map(|w| curve.mbar_second(half * (w[0] + w[1]))).collect();
        let diag: Vec<T> = (1..=n).map(|k| half * (mid[k - 1] + mid[k]) - T::of(2.0) * curve.mbar_second(x[k])).collect();
        let off: Vec<T> = (1..n).map(|k| half * mid[k]).collect();
        let Some(step) = solve_tridiagonal(&off, &diag, &off, &g) else { break };
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = x.clone();
            for k in 0..n {
                trial[k + 1] = x[k + 1] - t * step[k];
            }
            if trial.windows(2).all(|w| w[1] > w[0]) {
                let gt = grad_norm(&trial);
                if gt < gn {
                    *x = trial;
                    gn = gt;
                    accepted = true;
                    break;
                }
            }
            t = t * half;
        }
        if !accepted {
            break;
        }
    }
    gn
}

/// Thomas algorithm for `lower[i-1] y[i-1] + diag[i] y[i] + upper[i] y[i+1] = rhs[i]`.
fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut denom = diag[0];
    if denom == T::zero() {
        return None;
    }
    if n > 1 {
        c[0] = upper[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom == T::zero() || !denom.is_finite() {
            return None;
        }
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Some(d)
}

/// Interior nodes minimizing the L1 distance between `m̄′` and its
/// piecewise-constant approximation.
///
/// For the tangent and midpoint schemes the objective is [`l1_functional`]
/// (descent, then Newton until the relative gradient norm drops below
/// 1e-10). For the secant scheme the exact L1 error of the chord slopes is
/// minimized by coordinate descent alone.
pub fn nodes_l1_optimal<T: Real, M: MagnetizationCurve<T>>(n: usize, b: T, curve: &M, scheme: ApproxScheme) -> Result<Vec<T>> {
    if !(b > T::zero()) {
        return Err(Error::Domain(format!("threshold b must be positive, got {b}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    check_monotone(curve, b)?;
    let mut x = with_ends(&nodes_equidistant(n, b), b);
    match scheme {
        ApproxScheme::Secant => coordinate_descent(curve, &mut x, scheme, 500),
        _ => {
            coordinate_descent(curve, &mut x, scheme, 50);
            let gn = newton_polish(curve, &mut x, T::of(1e-10));
            if gn >= T::of(1e-10) {
                coordinate_descent(curve, &mut x, scheme, 500);
                let gn = newton_polish(curve, &mut x, T::of(1e-10));
                if gn >= T::of(1e-10) {
                    log::warn!("L1-optimal nodes: relative gradient norm {gn:e} above 1e-10");
                }
            }
        }
    }
    Ok(x[1..=n].to_vec())
}
