//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when the largest gradient component falls below this.
    pub gradient_tolerance: f64,
    pub c1: f64,
    pub c2: f64,
    /// Length of the very first trial step along the steepest-descent ray.
    pub initial_step: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            c1: 1e-4,
            c2: 0.9,
            initial_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    /// No step satisfying the Wolfe conditions was found; the result is the
    /// best point seen.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimized {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: Status,
    /// Objective value before the first and after every accepted step.
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Objective<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> Objective<F> {
    fn eval(&mut self, x: &[f64], g: &mut [f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x, g);
        if v.is_finite() && g.iter().all(|c| c.is_finite()) {
            v
        } else {
            f64::INFINITY
        }
    }
}

/// Minimises `f`, which returns the objective and writes the gradient into
/// its second argument.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LbfgsOptions) -> Minimized
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Objective { f, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = obj.eval(&x, &mut g);
    let mut trace = vec![fx];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut status = Status::MaxIterations;
    let mut iterations = 0;

    if n == 0 || inf_norm(&g) <= opts.gradient_tolerance {
        return Minimized {
            x,
            f: fx,
            iterations: 0,
            evaluations: obj.evaluations,
            status: Status::Converged,
            trace,
        };
    }

    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    while iterations < opts.max_iterations {
        let mut d = two_loop(&g, &history);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|c| -c).collect();
            slope = dot(&g, &d);
        }
        let alpha0 = if history.is_empty() {
            opts.initial_step / dot(&d, &d).sqrt()
        } else {
            1.0
        };
        let step = line_search(&mut obj, &x, fx, slope, &d, alpha0, opts, &mut xn, &mut gn);
        let Some((_, fnew)) = step else {
            if history.is_empty() {
                status = Status::LineSearchFailed;
                break;
            }
            history.clear();
            continue;
        };
        iterations += 1;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut xn);
        std::mem::swap(&mut g, &mut gn);
        fx = fnew;
        trace.push(fx);
        if inf_norm(&g) <= opts.gradient_tolerance {
            status = Status::Converged;
            break;
        }
    }
    Minimized {
        x,
        f: fx,
        iterations,
        evaluations: obj.evaluations,
        status,
        trace,
    }
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.iter().map(|c| -c).collect();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|c| *c *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

/// Strong-Wolfe bracketing and zoom. On success `xn`/`gn` hold the accepted
/// point. If the conditions cannot be met but some trial decreased the
/// objective sufficiently, that trial is accepted instead.
#[allow(clippy::too_many_arguments)]
fn line_search<F: FnMut(&[f64], &mut [f64]) -> f64>(
    obj: &mut Objective<F>,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    alpha0: f64,
    opts: &LbfgsOptions,
    xn: &mut [f64],
    gn: &mut [f64],
) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let trial = |obj: &mut Objective<F>, alpha: f64, xn: &mut [f64], gn: &mut [f64]| -> (f64, f64) {
        for ((xi, &x0), &di) in xn.iter_mut().zip(x).zip(d) {
            *xi = x0 + alpha * di;
        }
        let fa = obj.eval(xn, gn);
        (fa, dot(gn, d))
    };
    let armijo = |alpha: f64, fa: f64| fa <= f0 + opts.c1 * alpha * slope0;
    let curvature = |da: f64| da.abs() <= -opts.c2 * slope0;

    let (mut a_prev, mut f_prev, mut d_prev) = (0.0, f0, slope0);
    let mut alpha = alpha0;
    let mut bracket = None;
    for i in 0..25 {
        let (fa, da) = trial(obj, alpha, xn, gn);
        if armijo(alpha, fa) && fa < f0 && best.is_none_or(|(_, fb)| fa < fb) {
            best = Some((alpha, fa));
        }
        if !armijo(alpha, fa) || (i > 0 && fa >= f_prev) {
            bracket = Some(((a_prev, f_prev, d_prev), (alpha, fa, da)));
            break;
        }
        if curvature(da) {
            return Some((alpha, fa));
        }
        if da >= 0.0 {
            bracket = Some(((alpha, fa, da), (a_prev, f_prev, d_prev)));
            break;
        }
        a_prev = alpha;
        f_prev = fa;
        d_prev = da;
        alpha *= 2.0;
    }

    if let Some((mut lo, mut hi)) = bracket {
        for _ in 0..40 {
            let aj = interpolate(lo, hi);
            let (fj, dj) = trial(obj, aj, xn, gn);
            if armijo(aj, fj) && fj < f0 && best.is_none_or(|(_, fb)| fj < fb) {
                best = Some((aj, fj));
            }
            if !armijo(aj, fj) || fj >= lo.1 {
                hi = (aj, fj, dj);
            } else {
                if curvature(dj) {
                    return Some((aj, fj));
                }
                if dj * (hi.0 - lo.0) >= 0.0 {
                    hi = lo;
                }
                lo = (aj, fj, dj);
            }
            if (hi.0 - lo.0).abs() <= 1e-16 * lo.0.abs().max(1e-300) {
                break;
            }
        }
    }

    let (alpha, _) = best?;
    let (fa, _) = trial(obj, alpha, xn, gn);
    Some((alpha, fa))
}

/// Minimiser of the cubic through both bracket ends, kept well inside the
/// bracket; falls back to bisection.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, d0) = lo;
    let (a1, f1, d1) = hi;
    let mid = 0.5 * (a0 + a1);
    if !(f1.is_finite() && d1.is_finite()) {
        return mid;
    }
    let d1_ = d0 + d1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = d1_ * d1_ - d0 * d1;
    if disc < 0.0 {
        return mid;
    }
    let d2 = (a1 - a0).signum() * disc.sqrt();
    let a = a1 - (a1 - a0) * (d1 + d2 - d1_) / (d1 - d0 + 2.0 * d2);
    let (l, h) = (a0.min(a1), a0.max(a1));
    let margin = 0.1 * (h - l);
    if a.is_finite() && a > l + margin && a < h - margin {
        a
    } else {
        mid
    }
}
