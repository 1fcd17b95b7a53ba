//! Least-squares fits used by the analysis routines.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves `min ‖A x − y‖₂` by SVD.
pub fn linear_least_squares<T: Real>(design: &DMatrix<T>, y: &DVector<T>) -> Result<DVector<T>> {
    if design.nrows() != y.len() || design.nrows() < design.ncols() {
        return Err(Error::Fit("underdetermined or mismatched least-squares problem".into()));
    }
    let svd = design.clone().svd(true, true);
    let eps = T::eps() * T::lit(design.nrows() as f64) * svd.singular_values.max();
    svd.solve(y, eps).map_err(|e| Error::Fit(e.to_string()))
}

/// Fourier components `y ≈ a0 + Σ_k (a_k cos kθ + b_k sin kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonics<T> {
    pub offset: T,
    /// `(order, cos coefficient, sin coefficient)`.
    pub terms: Vec<(usize, T, T)>,
}

impl<T: Real> Harmonics<T> {
    pub fn amplitude(&self, order: usize) -> T {
        self.terms
            .iter()
            .find(|(k, _, _)| *k == order)
            .map_or(T::zero(), |(_, a, b)| (*a * *a + *b * *b).sqrt())
    }

    /// Phase `ϕ` such that the order-`k` term is `A cos(kθ − ϕ)`.
    pub fn phase(&self, order: usize) -> T {
        self.terms.iter().find(|(k, _, _)| *k == order).map_or(T::zero(), |(_, a, b)| b.atan2(*a))
    }

    pub fn eval(&self, theta: T) -> T {
        self.terms.iter().fold(self.offset, |acc, (k, a, b)| {
            let x = T::lit(*k as f64) * theta;
            acc + *a * x.cos() + *b * x.sin()
        })
    }
}

/// Linear fit of an offset plus the given harmonic orders.
pub fn fit_harmonics<T: Real>(theta: &[T], y: &[T], orders: &[usize]) -> Result<Harmonics<T>> {
    let cols = 1 + 2 * orders.len();
    if theta.len() != y.len() || theta.len() < cols {
        return Err(Error::Fit(format!("need at least {cols} samples for the harmonic fit")));
    }
    let a = DMatrix::from_fn(theta.len(), cols, |i, j| {
        if j == 0 {
            return T::one();
        }
        let k = T::lit(orders[(j - 1) / 2] as f64);
        if (j - 1) % 2 == 0 {
            (k * theta[i]).cos()
        } else {
            (k * theta[i]).sin()
        }
    });
    let x = linear_least_squares(&a, &DVector::from_column_slice(y))?;
    Ok(Harmonics {
        offset: x[0],
        terms: orders.iter().enumerate().map(|(i, k)| (*k, x[1 + 2 * i], x[2 + 2 * i])).collect(),
    })
}

/// Result of a nonlinear least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LmFit<T: Real> {
    pub params: DVector<T>,
    pub residual_norm: T,
    pub iterations: usize,
}

/// Levenberg–Marquardt with a forward-difference Jacobian.
pub fn levenberg_marquardt<T, F>(model: F, x: &[T], y: &[T], p0: DVector<T>, max_iter: usize) -> Result<LmFit<T>>
where
    T: Real,
    F: Fn(T, &DVector<T>) -> T,
{
    let m = x.len();
    let np = p0.len();
    if m != y.len() || m < np {
        return Err(Error::Fit("not enough samples for the nonlinear fit".into()));
    }
    let residuals = |p: &DVector<T>| DVector::from_fn(m, |i, _| model(x[i], p) - y[i]);
    let mut p = p0;
    let mut r = residuals(&p);
    let mut cost = r.norm_squared();
    let mut lambda = T::lit(1e-3);
    let h_rel = T::eps().sqrt();
    for it in 0..max_iter {
        let mut jac = DMatrix::zeros(m, np);
        for k in 0..np {
            let step = h_rel * p[k].abs().max(T::one());
            let mut q = p.clone();
            q[k] += step;
            let rq = residuals(&q);
            jac.set_column(k, &((rq - &r) / step));
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(T::eps());
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= T::lit(10.0);
                continue;
            };
            let cand = &p + &delta;
            let rc = residuals(&cand);
            let c = rc.norm_squared();
            if c.is_finite_value() && c < cost {
                let rel = (cost - c) / cost.max(T::eps());
                p = cand;
                r = rc;
                cost = c;
                lambda = (lambda * T::lit(0.3)).max(T::lit(1e-12));
                improved = true;
                if rel < T::lit(1e-14) || delta.norm() < T::lit(1e-13) * p.norm().max(T::one()) {
                    return Ok(LmFit { params: p, residual_norm: cost.sqrt(), iterations: it + 1 });
                }
                break;
            }
            lambda *= T::lit(10.0);
        }
        if !improved {
            return Ok(LmFit { params: p, residual_norm: cost.sqrt(), iterations: it + 1 });
        }
    }
    Ok(LmFit { params: p, residual_norm: cost.sqrt(), iterations: max_iter })
}

/// `y = offset + drift·t − amplitude · e^{−decay·t} cos(ω t + phase)
///      + overtone · e^{−2 decay·t} cos(2ω t + overtone_phase)`.
///
/// The linear drift absorbs slow population loss into states outside the
/// oscillating pair, which otherwise biases the fitted frequency when only
/// a period or two is sampled. The overtone is zero unless requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedCosine<T> {
    pub offset: T,
    pub drift: T,
    pub amplitude: T,
    pub decay: T,
    pub omega: T,
    pub phase: T,
    pub overtone: T,
    pub overtone_phase: T,
}

impl<T: Real> DampedCosine<T> {
    pub fn eval(&self, t: T) -> T {
        self.offset + self.drift * t - self.amplitude * (-self.decay * t).exp() * (self.omega * t + self.phase).cos()
            + self.overtone * (-T::lit(2.0) * self.decay * t).exp() * (T::lit(2.0) * self.omega * t + self.overtone_phase).cos()
    }
}

/// Fits a damped cosine. `omega_guess` seeds a coarse scan over
/// `[0.5, 2] × omega_guess` before the nonlinear refinement.
pub fn fit_damped_cosine<T: Real>(t: &[T], y: &[T], omega_guess: T) -> Result<DampedCosine<T>> {
    fit_damped(t, y, omega_guess, false)
}

/// As [`fit_damped_cosine`], with a free second harmonic. Suited to signals
/// such as `1 − cos⁴(Ωt/2)` whose fundamental is not a pure cosine.
/// Refines the plain fit, so a pure cosine at ω is not mistaken for the
/// overtone of ω/2.
pub fn fit_damped_cosine_with_overtone<T: Real>(t: &[T], y: &[T], omega_guess: T) -> Result<DampedCosine<T>> {
    fit_damped(t, y, omega_guess, true)
}

/// Linear fit of offset + drift + cosine + sine at each of 301 trial
/// frequencies in `[lo, hi]`; returns the best frequency and coefficients.
fn coarse_scan<T: Real>(t: &[T], y: &[T], lo: T, hi: T) -> Result<(T, DVector<T>)> {
    let yv = DVector::from_column_slice(y);
    let mut best = (T::max_value().unwrap_or_else(|| T::lit(1e300)), lo, DVector::zeros(4));
    let trials = 301;
    for i in 0..trials {
        let w = lo + (hi - lo) * T::lit(i as f64 / (trials - 1) as f64);
        let a = DMatrix::from_fn(t.len(), 4, |r, c| match c {
            0 => T::one(),
            1 => t[r],
            2 => (w * t[r]).cos(),
            _ => (w * t[r]).sin(),
        });
        let x = linear_least_squares(&a, &yv)?;
        let res = (&a * &x - &yv).norm_squared();
        if res < best.0 {
            best = (res, w, x);
        }
    }
    Ok((best.1, best.2))
}

fn fit_damped<T: Real>(t: &[T], y: &[T], omega_guess: T, overtone: bool) -> Result<DampedCosine<T>> {
    if t.len() != y.len() || t.len() < 10 {
        return Err(Error::Fit("need at least 10 samples for a damped-cosine fit".into()));
    }
    if !(omega_guess > T::zero()) {
        return Err(Error::Fit("frequency guess must be positive".into()));
    }
    let base = |tt: T, p: &DVector<T>| p[0] + p[5] * tt - p[1] * (-p[2] * tt).exp() * (p[3] * tt + p[4]).cos();
    let p = if overtone {
        // Start from the plain fit, with the overtone seeded by a linear fit
        // to its residual; b₁ cos 2ωt + b₂ sin 2ωt keeps the overtone linear.
        let f = fit_damped(t, y, omega_guess, false)?;
        let two = T::lit(2.0);
        let a = DMatrix::from_fn(t.len(), 2, |r, c| {
            let e = (-two * f.decay * t[r]).exp();
            let arg = two * f.omega * t[r];
            e * if c == 0 { arg.cos() } else { arg.sin() }
        });
        let resid = DVector::from_iterator(t.len(), t.iter().zip(y).map(|(&tt, &yy)| yy - f.eval(tt)));
        let b = linear_least_squares(&a, &resid)?;
        let model = |tt: T, p: &DVector<T>| {
            let e = (-two * p[2] * tt).exp();
            base(tt, p) + e * (p[6] * (two * p[3] * tt).cos() + p[7] * (two * p[3] * tt).sin())
        };
        let p0 = DVector::from_vec(vec![f.offset, f.amplitude, f.decay, f.omega, f.phase, f.drift, b[0], b[1]]);
        levenberg_marquardt(model, t, y, p0, 200)?.params
    } else {
        let (w0, x) = coarse_scan(t, y, omega_guess * T::lit(0.5), omega_guess * T::lit(2.0))?;
        // offset + a cos + b sin  =  offset − A cos(ωt + φ) with A cos φ = −a, A sin φ = b.
        let amp = (x[2] * x[2] + x[3] * x[3]).sqrt();
        let phase = x[3].atan2(-x[2]);
        let p0 = DVector::from_vec(vec![x[0], amp, T::zero(), w0, phase, x[1]]);
        levenberg_marquardt(base, t, y, p0, 200)?.params
    };
    if !(p[3] > T::zero()) || !p.iter().all(|v| v.is_finite_value()) {
        return Err(Error::Fit("damped-cosine fit diverged".into()));
    }
    let (overtone, overtone_phase) = if p.len() > 6 {
        ((p[6] * p[6] + p[7] * p[7]).sqrt(), (-p[7]).atan2(p[6]))
    } else {
        (T::zero(), T::zero())
    };
    let mut out =
        DampedCosine { offset: p[0], drift: p[5], amplitude: p[1], decay: p[2], omega: p[3], phase: p[4], overtone, overtone_phase };
    if out.amplitude < T::zero() {
        out.amplitude = -out.amplitude;
        out.phase += T::pi();
    }
    Ok(out)
}

/// Composite Simpson rule on a uniform grid with spacing `h`. An even number
/// of intervals is required; otherwise the last interval is handled with
/// the 3/8 rule.
pub fn simpson<T: Real>(y: &[T], h: T) -> T {
    let n = y.len();
    if n < 2 {
        return T::zero();
    }
    if n == 2 {
        return h * (y[0] + y[1]) * T::lit(0.5);
    }
    let intervals = n - 1;
    let (main_end, tail) = if intervals.is_multiple_of(2) { (n - 1, false) } else { (n - 4, true) };
    let mut acc = T::zero();
    if main_end > 0 {
        acc = y[0] + y[main_end];
        for (i, v) in y.iter().enumerate().take(main_end).skip(1) {
            acc += if i % 2 == 1 { T::lit(4.0) * *v } else { T::lit(2.0) * *v };
        }
        acc = acc * h / T::lit(3.0);
    }
    if tail {
        let k = n - 4;
        acc += T::lit(3.0) * h / T::lit(8.0) * (y[k] + T::lit(3.0) * y[k + 1] + T::lit(3.0) * y[k + 2] + y[k + 3]);
    }
    acc
}
