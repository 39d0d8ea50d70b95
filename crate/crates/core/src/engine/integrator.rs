//! Dormand–Prince 5(4) with step-size control and the fourth-order dense
//! output, specialised to complex matrix states.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_step: None, max_steps: 10_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// `out = y + h * sum_i c_i k_i`.
fn combine(out: &mut DMatrix<C64>, y: &DMatrix<C64>, h: f64, terms: &[(f64, &DMatrix<C64>)]) {
    let o = out.as_mut_slice();
    o.copy_from_slice(y.as_slice());
    for &(c, k) in terms {
        if c == 0.0 {
            continue;
        }
        let w = h * c;
        for (oi, ki) in o.iter_mut().zip(k.as_slice()) {
            *oi += ki * w;
        }
    }
}

/// Largest scaled error component. A max norm keeps the accuracy independent
/// of how many entries of the state are negligible.
fn err_norm(e: &DMatrix<C64>, y: &DMatrix<C64>, y1: &DMatrix<C64>, opts: &Dopri5Options) -> f64 {
    e.iter()
        .zip(y.iter().zip(y1.iter()))
        .map(|(ei, (a, b))| ei.norm() / (opts.abs_tol + opts.rel_tol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

fn scaled_norm(v: &DMatrix<C64>, y: &DMatrix<C64>, opts: &Dopri5Options) -> f64 {
    v.iter()
        .zip(y.iter())
        .map(|(vi, yi)| vi.norm() / (opts.abs_tol + opts.rel_tol * yi.norm()))
        .fold(0.0, f64::max)
}

/// Integrates `dy/dt = f(t, y)` and hands the solution at every point of
/// `t_grid` to `emit`, starting with `y0` at `t_grid[0]`.
pub fn integrate<F, O>(
    mut f: F,
    t_grid: &[f64],
    y0: DMatrix<C64>,
    opts: &Dopri5Options,
    mut emit: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &DMatrix<C64>, &mut DMatrix<C64>),
    O: FnMut(usize, f64, &DMatrix<C64>) -> Result<()>,
{
    let mut stats = StepStats::default();
    if t_grid.is_empty() {
        return Ok(stats);
    }
    let (nr, nc) = y0.shape();
    let zeros = || DMatrix::<C64>::zeros(nr, nc);
    let mut t = t_grid[0];
    let t_end = *t_grid.last().unwrap();
    let mut y = y0;
    emit(0, t, &y)?;
    if t_grid.len() == 1 {
        return Ok(stats);
    }

    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zeros(), zeros(), zeros(), zeros(), zeros(), zeros(), zeros());
    let (mut ys, mut y1, mut err) = (zeros(), zeros(), zeros());
    let mut dense = zeros();
    let zero = zeros();

    f(t, &y, &mut k1);
    stats.rhs_evals += 1;

    let hmax = opts.max_step.unwrap_or(f64::INFINITY).min(t_end - t);
    // initial step from the local scale of the problem
    let mut h = {
        let d0 = scaled_norm(&y, &y, opts);
        let d1 = scaled_norm(&k1, &y, opts);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(hmax);
        combine(&mut ys, &y, h0, &[(1.0, &k1)]);
        f(t + h0, &ys, &mut k2);
        stats.rhs_evals += 1;
        let mut diff = k2.clone();
        diff -= &k1;
        let d2 = scaled_norm(&diff, &y, opts) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(hmax)
    };

    let mut k = 1;
    let mut last_rejected = false;
    while k < t_grid.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                time: t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let remaining = t_end - t;
        if h >= remaining {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { time: t });
        }

        combine(&mut ys, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &ys, &mut k2);
        combine(&mut ys, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &ys, &mut k3);
        combine(&mut ys, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &ys, &mut k4);
        combine(&mut ys, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &ys, &mut k5);
        combine(&mut ys, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + h, &ys, &mut k6);
        combine(&mut y1, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        f(t + h, &y1, &mut k7);
        stats.rhs_evals += 6;

        combine(
            &mut err,
            &zero,
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let e = err_norm(&err, &y, &y1, opts);
        if !e.is_finite() {
            return Err(Error::IntegrationFailure { time: t, reason: "non-finite error estimate".into() });
        }

        if e <= 1.0 {
            stats.accepted += 1;
            let t_new = t + h;
            let at_end = (t_end - t_new).abs() <= 1e-12 * t_end.abs().max(1.0);
            let mut dense_ready = false;
            while k < t_grid.len() && (t_grid[k] <= t_new || (at_end && k == t_grid.len() - 1)) {
                let tk = t_grid[k];
                if tk == t_new || (at_end && k == t_grid.len() - 1) {
                    emit(k, tk, &y1)?;
                } else {
                    if !dense_ready {
                        combine(&mut dense, &zero, h, &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
                        dense_ready = true;
                    }
                    let th = (tk - t) / h;
                    let th1 = 1.0 - th;
                    // y + th (dy + th1 (bspl + th (dy - h k7 - bspl + th1 dense)))
                    let out = &mut ys;
                    let ys_s = out.as_mut_slice();
                    for (i, o) in ys_s.iter_mut().enumerate() {
                        let y0 = y.as_slice()[i];
                        let dy = y1.as_slice()[i] - y0;
                        let bspl = k1.as_slice()[i] * h - dy;
                        let r4 = dy - k7.as_slice()[i] * h - bspl;
                        let r5 = dense.as_slice()[i];
                        *o = y0 + (dy + (bspl + (r4 + r5 * th1) * th) * th1) * th;
                    }
                    emit(k, tk, out)?;
                }
                k += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            let mut fac = 0.9 * e.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h = (h * fac).min(opts.max_step.unwrap_or(f64::INFINITY));
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= (0.9 * e.powf(-0.2)).max(0.2);
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: C64) -> DMatrix<C64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn exponential_decay_on_dense_grid() {
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let mut got = vec![C64::new(0.0, 0.0); grid.len()];
        let lambda = C64::new(-0.7, 3.0);
        let opts = Dopri5Options { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() };
        integrate(
            |_, y, dy| dy[(0, 0)] = lambda * y[(0, 0)],
            &grid,
            scalar(C64::new(1.0, 0.0)),
            &opts,
            |k, _, y| {
                got[k] = y[(0, 0)];
                Ok(())
            },
        )
        .unwrap();
        for (t, g) in grid.iter().zip(&got) {
            let exact = (lambda * t).exp();
            assert!((g - exact).norm() < 1e-8, "t = {t}: {g} vs {exact}");
        }
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = 2 t y  =>  y = exp(t^2)
        let grid = [0.0, 0.3, 0.9, 1.5];
        let mut last = C64::new(0.0, 0.0);
        integrate(
            |t, y, dy| dy[(0, 0)] = y[(0, 0)] * (2.0 * t),
            &grid,
            scalar(C64::new(1.0, 0.0)),
            &Dopri5Options::default(),
            |_, _, y| {
                last = y[(0, 0)];
                Ok(())
            },
        )
        .unwrap();
        assert!((last.re - 1.5f64.powi(2).exp()).abs() < 1e-6);
    }

    #[test]
    fn stiff_blowup_reports_failure_time() {
        let opts = Dopri5Options { max_steps: 50, ..Default::default() };
        let r = integrate(
            |_, y, dy| dy[(0, 0)] = y[(0, 0)] * y[(0, 0)] * 50.0,
            &[0.0, 10.0],
            scalar(C64::new(1.0, 0.0)),
            &opts,
            |_, _, _| Ok(()),
        );
        let e = r.unwrap_err();
        assert!(e.failure_time().unwrap() < 0.03);
    }
}
