//! Adaptive Dormand–Prince 5(4) integrator for complex-valued ODEs with
//! cubic Hermite dense output.

use crate::error::{Error, Result};
use crate::scalar::{cabs, Real, C};

/// Step-size control settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on the step size, if any.
    pub max_step: Option<T>,
    /// First trial step; estimated from the right-hand side when absent.
    pub initial_step: Option<T>,
    /// Hard cap on the number of attempted steps.
    pub max_steps: usize,
    /// Times the integrator must land on exactly (kinks in the drive).
    pub tstops: Vec<T>,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            max_step: None,
            initial_step: None,
            max_steps: 2_000_000,
            tstops: Vec::new(),
        }
    }
}

impl<T: Real> IntegratorOptions<T> {
    pub fn with_tolerances(rtol: T, atol: T) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

/// Counters reported after a successful integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Tableau<T> {
    c: [T; 4],
    a: [[T; 5]; 5],
    b: [T; 5],
    e: [T; 6],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        Self {
            c: [l(C2), l(C3), l(C4), l(C5)],
            a: [
                [l(A21), z, z, z, z],
                [l(A31), l(A32), z, z, z],
                [l(A41), l(A42), l(A43), z, z],
                [l(A51), l(A52), l(A53), l(A54), z],
                [l(A61), l(A62), l(A63), l(A64), l(A65)],
            ],
            b: [l(B1), l(B3), l(B4), l(B5), l(B6)],
            e: [l(E1), l(E3), l(E4), l(E5), l(E6), l(E7)],
        }
    }
}

// Max norm: density-matrix coherences are few and small, and an RMS norm
// lets their error hide behind thousands of near-zero entries.
fn scaled_norm<T: Real>(v: &[C<T>], scale: &[T]) -> T {
    v.iter().zip(scale).fold(T::zero(), |acc, (z, s)| acc.max(cabs(*z) / *s))
}

/// Integrates `y' = f(t, y)` from `t0` and reports the solution at each time
/// in `t_out` (nondecreasing, all `>= t0`) through `output(index, t, y)`.
///
/// Output points inside a step are filled by cubic Hermite interpolation;
/// the final point is always an exact step endpoint.
pub fn integrate<T, F, O>(
    mut f: F,
    t0: T,
    y0: &[C<T>],
    t_out: &[T],
    opts: &IntegratorOptions<T>,
    mut output: O,
) -> Result<IntegratorStats>
where
    T: Real,
    F: FnMut(T, &[C<T>], &mut [C<T>]),
    O: FnMut(usize, T, &[C<T>]),
{
    let n = y0.len();
    let mut stats = IntegratorStats::default();
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|t| *t < t0) {
        return Err(Error::Config("output times must be nondecreasing and start at or after t0".into()));
    }
    let Some(&t_end) = t_out.last() else {
        return Ok(stats);
    };
    let tab = Tableau::<T>::new();
    let zero = C::new(T::zero(), T::zero());

    let mut y = y0.to_vec();
    let mut y_new = vec![zero; n];
    let mut y_stage = vec![zero; n];
    let mut err = vec![zero; n];
    let mut scale = vec![T::zero(); n];
    let mut k: Vec<Vec<C<T>>> = (0..7).map(|_| vec![zero; n]).collect();

    let mut t = t0;
    let mut next_out = 0;
    while next_out < t_out.len() && t_out[next_out] == t0 {
        output(next_out, t0, &y);
        next_out += 1;
    }
    if next_out == t_out.len() {
        return Ok(stats);
    }

    let mut stops: Vec<T> = opts.tstops.iter().copied().filter(|s| *s > t0 && *s < t_end).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    stops.push(t_end);
    let mut stop_idx = 0;

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;

    let span = t_end - t0;
    let max_step = opts.max_step.unwrap_or(span).min(span);
    let mut h = match opts.initial_step {
        Some(h0) => h0,
        None => {
            for (s, yi) in scale.iter_mut().zip(&y) {
                *s = opts.atol + opts.rtol * cabs(*yi);
            }
            let d0 = scaled_norm(&y, &scale);
            let d1 = scaled_norm(&k[0], &scale);
            if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
                T::lit(1e-6) * span
            } else {
                T::lit(0.01) * d0 / d1
            }
        }
    }
    .min(max_step);
    let tiny = T::eps() * T::lit(16.0) * (t0.abs().max(t_end.abs()).max(T::one()));
    let safety = T::lit(0.8);
    let mut last_err = T::zero();

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integrator {
                t: t.to_f64_lossy(),
                reason: format!("exceeded {} steps", opts.max_steps),
                error_estimate: last_err.to_f64_lossy(),
            });
        }
        while stops[stop_idx] <= t {
            stop_idx += 1;
        }
        let target = stops[stop_idx];
        let mut landing = false;
        if t + h >= target || target - (t + h) < tiny {
            h = target - t;
            landing = true;
        }
        if h < tiny {
            return Err(Error::Integrator {
                t: t.to_f64_lossy(),
                reason: "step size underflow".into(),
                error_estimate: last_err.to_f64_lossy(),
            });
        }

        // Stages 2..6.
        for s in 0..5 {
            let ts = if s < 4 { t + tab.c[s] * h } else { t + h };
            for i in 0..n {
                let mut acc = zero;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = tab.a[s][j];
                    if a != T::zero() {
                        acc += kj[i] * a;
                    }
                }
                y_stage[i] = y[i] + acc * h;
            }
            f(ts, &y_stage, &mut k[s + 1]);
        }
        for i in 0..n {
            let acc = k[0][i] * tab.b[0] + k[2][i] * tab.b[1] + k[3][i] * tab.b[2] + k[4][i] * tab.b[3] + k[5][i] * tab.b[4];
            y_new[i] = y[i] + acc * h;
        }
        let t_new = if landing { target } else { t + h };
        f(t_new, &y_new, &mut k[6]);
        stats.evaluations += 6;

        let mut finite = true;
        for i in 0..n {
            let e = k[0][i] * tab.e[0]
                + k[2][i] * tab.e[1]
                + k[3][i] * tab.e[2]
                + k[4][i] * tab.e[3]
                + k[5][i] * tab.e[4]
                + k[6][i] * tab.e[5];
            err[i] = e * h;
            scale[i] = opts.atol + opts.rtol * cabs(y[i]).max(cabs(y_new[i]));
            finite &= y_new[i].re.is_finite_value() && y_new[i].im.is_finite_value();
        }
        let en = if finite { scaled_norm(&err, &scale) } else { T::max_value().unwrap_or_else(|| T::lit(1e30)) };
        last_err = en;

        if en <= T::one() {
            stats.accepted += 1;
            while next_out < t_out.len() && t_out[next_out] <= t_new {
                let to = t_out[next_out];
                if to == t_new {
                    output(next_out, to, &y_new);
                } else {
                    let th = (to - t) / h;
                    let th2 = th * th;
                    let th3 = th2 * th;
                    let two = T::lit(2.0);
                    let three = T::lit(3.0);
                    let h00 = two * th3 - three * th2 + T::one();
                    let h10 = (th3 - two * th2 + th) * h;
                    let h01 = three * th2 - two * th3;
                    let h11 = (th3 - th2) * h;
                    for i in 0..n {
                        y_stage[i] = y[i] * h00 + k[0][i] * h10 + y_new[i] * h01 + k[6][i] * h11;
                    }
                    output(next_out, to, &y_stage);
                }
                next_out += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            let fac = if en == T::zero() { T::lit(5.0) } else { (safety * en.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2)) };
            h = (h * fac).min(max_step);
        } else {
            stats.rejected += 1;
            let fac = if finite { (safety * en.powf(T::lit(-0.2))).max(T::lit(0.1)) } else { T::lit(0.1) };
            h *= fac;
        }
    }
    Ok(stats)
}
