//! Maximization of the scalar curvature on `M_T = {g : tr_g T = 1}`.
//!
//! A maximizer of `S` on `M_T` satisfies `Ric g = cT` with `c = S(g)`. The
//! constraint `Σ d_i z_i / x_i = 1` is removed by writing `u_i = d_i z_i / x_i`
//! with `u` on the open simplex, and `u = softmax(w)` for unconstrained
//! `w ∈ R^s`. In these coordinates `∂S/∂u_i = r_i / z_i`, so `S` is
//! stationary exactly when `r = cz`.
//!
//! The ascent runs BFGS in `w` with Armijo backtracking. A run whose iterates
//! approach the boundary of the simplex (some `u_i → 0`, i.e. `x_i → ∞`)
//! while `S` stops increasing is reported as diverged: the supremum of `S`
//! on `M_T` is then approached but not attained along that direction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chains::{check_theorem, Analysis, ConditionReport};
use crate::curvature::scalar_and_ricci;
use crate::form::DiagonalForm;
use crate::model::SpaceModel;

/// Largest allowed spread `max w − min w`; keeps `x` and `x²` finite.
const W_RANGE: f64 = 300.0;
/// Largest step in `w` per iteration, in the max norm.
const MAX_STEP: f64 = 20.0;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Newton polishing only starts from points already this close to critical.
const POLISH_ENTRY: f64 = 1e-5;
const POLISH_STEPS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub seed: u64,
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop once `max_i |r_i − c z_i| / max z` falls to this level.
    pub gradient_tolerance: f64,
    /// Certification threshold for the same quantity.
    pub residual_tolerance: f64,
    /// `u_i` below this counts as collapsed onto the boundary.
    pub collapse_threshold: f64,
    /// Number of iterations over which `S` must grow to avoid stagnation.
    pub stagnation_window: usize,
    /// Half-width of the uniform perturbation of `w` for random starts.
    pub spread: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            starts: 16,
            max_iterations: 10_000,
            gradient_tolerance: 1e-10,
            residual_tolerance: 1e-8,
            collapse_threshold: 1e-12,
            stagnation_window: 100,
            spread: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("T has {found} coefficients, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("at least one start is required")]
    NoStarts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    Stagnated,
    LineSearchFailed,
    MaxIterations,
    /// `s = 1`: `M_T` is a single point.
    SinglePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    /// Metric coefficients `x_i` of the best point found.
    pub x: Vec<f64>,
    /// Least-squares fit `c = Σ d_i r_i z_i / Σ d_i z_i²`.
    pub c: f64,
    /// `max_i |r_i − c z_i| / max_i z_i`, evaluated for `T` rescaled to
    /// `max_i z_i = 1`; equivalently `max_i |r_i − c z_i|` in the units of `Ric`.
    pub residual: f64,
    pub s_value: f64,
    pub status: SolveStatus,
    pub termination: Termination,
    pub starts_used: usize,
    /// Iterations of the best start.
    pub iterations: usize,
    /// `|Σ d_i z_i / x_i − 1|`.
    pub constraint_error: f64,
    /// Norm of the gradient of `S` projected onto the tangent space of `M_T`.
    pub tangent_gradient: f64,
    /// 1-based indices `i` with `u_i` below the collapse threshold, i.e. the
    /// directions along which `x_i` runs off to infinity.
    pub collapsed: Vec<usize>,
    /// Starts whose final `S` lies within 1e-6 of the best, with `T` rescaled
    /// to `max_i z_i = 1`.
    pub starts_agreeing: usize,
    /// Other certified solutions with the same `S` but a different metric.
    pub alternatives: Vec<Vec<f64>>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<ConditionReport>,
}

impl SolveReport {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

/// Ricci tensor fit against `T`: `(c, max_i |r_i − c z_i| / max z)`.
pub fn fit_proportionality(model: &SpaceModel, r: &[f64], z: &[f64]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..z.len() {
        let d = model.dim(i) as f64;
        num += d * r[i] * z[i];
        den += d * z[i] * z[i];
    }
    let c = num / den;
    let zmax = z.iter().cloned().fold(0.0, f64::max);
    let res = r
        .iter()
        .zip(z)
        .map(|(r, z)| (r - c * z).abs())
        .fold(0.0, f64::max)
        / zmax;
    (c, res)
}

/// Norm of `∇S` minus its component along `∇(tr_g T)`.
fn tangent_gradient(model: &SpaceModel, r: &[f64], z: &[f64], x: &[f64]) -> f64 {
    let grad: Vec<f64> = (0..x.len())
        .map(|i| -(model.dim(i) as f64) * r[i] / (x[i] * x[i]))
        .collect();
    let normal: Vec<f64> = (0..x.len())
        .map(|i| -(model.dim(i) as f64) * z[i] / (x[i] * x[i]))
        .collect();
    let gn: f64 = grad.iter().zip(&normal).map(|(a, b)| a * b).sum();
    let nn: f64 = normal.iter().map(|a| a * a).sum();
    grad.iter()
        .zip(&normal)
        .map(|(g, n)| (g - gn / nn * n).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct Objective<'a> {
    model: &'a SpaceModel,
    z: Vec<f64>,
    dz: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Point {
    w: Vec<f64>,
    u: Vec<f64>,
    x: Vec<f64>,
    value: f64,
    ricci: Vec<f64>,
    /// `∂S/∂w`.
    grad: Vec<f64>,
}

impl Objective<'_> {
    fn point(&self, mut w: Vec<f64>) -> Point {
        let top = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in w.iter_mut() {
            *v = v.max(top - W_RANGE);
        }
        let e: Vec<f64> = w.iter().map(|v| (v - top).exp()).collect();
        let total: f64 = e.iter().sum();
        let u: Vec<f64> = e.iter().map(|v| v / total).collect();
        let x: Vec<f64> = self.dz.iter().zip(&u).map(|(dz, u)| dz / u).collect();
        let (value, ricci) = scalar_and_ricci(self.model, &x);
        let g: Vec<f64> = ricci.iter().zip(&self.z).map(|(r, z)| r / z).collect();
        let mean: f64 = u.iter().zip(&g).map(|(u, g)| u * g).sum();
        let grad = u.iter().zip(&g).map(|(u, g)| u * (g - mean)).collect();
        Point {
            w,
            u,
            x,
            value,
            ricci,
            grad,
        }
    }

    fn residual(&self, p: &Point) -> f64 {
        fit_proportionality(self.model, &p.ricci, &self.z).1
    }
}

#[derive(Clone, Debug)]
struct StartOutcome {
    point: Point,
    iterations: usize,
    termination: Termination,
    /// `S` at every accepted ascent iterate.
    #[cfg_attr(not(test), allow(dead_code))]
    history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn identity(s: usize) -> Vec<f64> {
    let mut h = vec![0.0; s * s];
    for i in 0..s {
        h[i * s + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64]) -> Vec<f64> {
    let s = v.len();
    (0..s).map(|i| dot(&h[i * s..(i + 1) * s], v)).collect()
}

/// Inverse BFGS update `H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ`.
fn bfgs_update(h: &mut [f64], step: &[f64], y: &[f64], sy: f64) {
    let s = step.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..s {
        for j in 0..s {
            h[i * s + j] += -rho * (step[i] * hy[j] + hy[i] * step[j])
                + (rho * rho * yhy + rho) * step[i] * step[j];
        }
    }
}

fn ascend(obj: &Objective, w0: Vec<f64>, opts: &SolveOptions) -> StartOutcome {
    let s = w0.len();
    let mut cur = obj.point(w0);
    let mut h = identity(s);
    let mut fresh = true;
    let mut history = vec![cur.value];
    for iter in 0..opts.max_iterations {
        if obj.residual(&cur) <= opts.gradient_tolerance {
            return StartOutcome {
                point: cur,
                iterations: iter,
                termination: Termination::Converged,
                history,
            };
        }
        if history.len() > opts.stagnation_window {
            let old = history[history.len() - 1 - opts.stagnation_window];
            if cur.value - old <= 1e-12 * cur.value.abs().max(1.0) {
                return finish(obj, cur, iter, Termination::Stagnated, history, opts);
            }
        }

        let mut accepted = None;
        for attempt in 0..2 {
            if attempt == 1 {
                if fresh {
                    break;
                }
                h = identity(s);
                fresh = true;
            }
            let mut p = mat_vec(&h, &cur.grad);
            let mut slope = dot(&cur.grad, &p);
            if !(slope > 0.0) {
                h = identity(s);
                fresh = true;
                p = cur.grad.clone();
                slope = dot(&p, &p);
            }
            if !(slope > 0.0) {
                break;
            }
            let longest = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if longest > MAX_STEP {
                let scale = MAX_STEP / longest;
                p.iter_mut().for_each(|v| *v *= scale);
                slope *= scale;
            }
            let mut alpha = 1.0;
            for _ in 0..MAX_BACKTRACKS {
                let w: Vec<f64> = cur.w.iter().zip(&p).map(|(w, p)| w + alpha * p).collect();
                let trial = obj.point(w);
                if trial.value.is_finite() && trial.value >= cur.value + ARMIJO * alpha * slope {
                    accepted = Some(trial);
                    break;
                }
                alpha /= 2.0;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some(next) = accepted else {
            return finish(obj, cur, iter, Termination::LineSearchFailed, history, opts);
        };

        // Curvature pair for minimizing −S.
        let step: Vec<f64> = next.w.iter().zip(&cur.w).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = cur.grad.iter().zip(&next.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &y);
        let yy = dot(&y, &y);
        if sy > 1e-12 * dot(&step, &step).sqrt() * yy.sqrt() && sy > 0.0 {
            if fresh {
                let scale = sy / yy;
                h.iter_mut().for_each(|v| *v *= scale);
                fresh = false;
            }
            bfgs_update(&mut h, &step, &y, sy);
        }
        cur = next;
        history.push(cur.value);
    }
    StartOutcome {
        iterations: opts.max_iterations,
        point: cur,
        termination: Termination::MaxIterations,
        history,
    }
}

/// Once `S` can no longer be resolved in floating point (its gap to the
/// maximum is of order residual²), finishes with Newton steps on the
/// stationarity equations `r_j / z_j = r_m / z_m`, where `m` is the largest
/// `u` component and stays fixed as the gauge.
fn finish(
    obj: &Objective,
    cur: Point,
    iterations: usize,
    termination: Termination,
    history: Vec<f64>,
    opts: &SolveOptions,
) -> StartOutcome {
    let start = obj.residual(&cur);
    if !(start > opts.gradient_tolerance && start <= POLISH_ENTRY) {
        return StartOutcome {
            point: cur,
            iterations,
            termination,
            history,
        };
    }
    let mut best = cur;
    let mut best_res = start;
    for _ in 0..POLISH_STEPS {
        let Some(next) = newton_step(obj, &best) else {
            break;
        };
        let res = obj.residual(&next);
        if !(res < best_res) {
            break;
        }
        best = next;
        best_res = res;
        if best_res <= opts.gradient_tolerance {
            return StartOutcome {
                point: best,
                iterations,
                termination: Termination::Converged,
                history,
            };
        }
    }
    StartOutcome {
        point: best,
        iterations,
        termination,
        history,
    }
}

fn stationarity(obj: &Objective, p: &Point, m: usize) -> Vec<f64> {
    let g: Vec<f64> = p.ricci.iter().zip(&obj.z).map(|(r, z)| r / z).collect();
    (0..g.len()).filter(|&j| j != m).map(|j| g[j] - g[m]).collect()
}

fn newton_step(obj: &Objective, p: &Point) -> Option<Point> {
    let s = p.w.len();
    let m = (0..s).max_by(|&a, &b| p.u[a].total_cmp(&p.u[b]))?;
    let free: Vec<usize> = (0..s).filter(|&j| j != m).collect();
    let f0 = stationarity(obj, p, m);
    let h = 1e-6;
    let mut jac = DMatrix::<f64>::zeros(s - 1, s - 1);
    for (col, &j) in free.iter().enumerate() {
        let mut plus = p.w.clone();
        let mut minus = p.w.clone();
        plus[j] += h;
        minus[j] -= h;
        let fp = stationarity(obj, &obj.point(plus), m);
        let fm = stationarity(obj, &obj.point(minus), m);
        for row in 0..s - 1 {
            jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    let delta = jac.lu().solve(&DVector::from_vec(f0))?;
    let mut w = p.w.clone();
    for (col, &j) in free.iter().enumerate() {
        w[j] -= delta[col];
    }
    let next = obj.point(w);
    next.value.is_finite().then_some(next)
}

fn start_point(obj: &Objective, index: usize, opts: &SolveOptions) -> Vec<f64> {
    // Start 0 is the normal metric direction, x ∝ Q.
    let base: Vec<f64> = obj.dz.iter().map(|v| v.ln()).collect();
    if index == 0 {
        return base;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    base.into_iter()
        .map(|w| w + rng.gen_range(-opts.spread..=opts.spread))
        .collect()
}

fn normalized(x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    x.iter().map(|v| v / total).collect()
}

fn far_apart(a: &[f64], b: &[f64]) -> bool {
    let (a, b) = (normalized(a), normalized(b));
    a.iter().zip(&b).any(|(a, b)| (a - b).abs() > 1e-6 * a.abs().max(b.abs()).max(1e-300))
}

/// Maximizes `S` over `M_T` and certifies the result against `Ric g = cT`.
pub fn maximize_scalar_on_mt(
    model: &SpaceModel,
    t: &DiagonalForm,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if t.len() != model.s() {
        return Err(SolveError::LengthMismatch {
            expected: model.s(),
            found: t.len(),
        });
    }
    if opts.starts == 0 {
        return Err(SolveError::NoStarts);
    }
    // Solutions scale with T (x(λT) = λx(T), c(λT) = c(T)/λ), so the ascent
    // runs on T normalized to max z_i = 1 and the result is scaled back.
    let z_in = t.to_f64();
    let zmax = z_in.iter().cloned().fold(0.0, f64::max);
    let z: Vec<f64> = z_in.iter().map(|v| v / zmax).collect();
    let dz: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(i, z)| model.dim(i) as f64 * z)
        .collect();
    let obj = Objective { model, z, dz };

    let outcomes: Vec<StartOutcome> = if model.s() == 1 {
        vec![StartOutcome {
            point: obj.point(vec![0.0]),
            iterations: 0,
            termination: Termination::SinglePoint,
            history: Vec::new(),
        }]
    } else {
        (0..opts.starts)
            .into_par_iter()
            .map(|i| ascend(&obj, start_point(&obj, i, opts), opts))
            .collect()
    };

    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.point.value.is_finite())
        .fold(None::<usize>, |acc, (i, o)| match acc {
            Some(b) if outcomes[b].point.value >= o.point.value => Some(b),
            _ => Some(i),
        })
        .unwrap_or(0);
    let winner = &outcomes[best];
    let p = &winner.point;
    let (c_unit, residual) = fit_proportionality(model, &p.ricci, &obj.z);
    let c = c_unit / zmax;
    let x: Vec<f64> = p.x.iter().map(|v| v * zmax).collect();
    let constraint_error = (p.u.iter().sum::<f64>() - 1.0).abs();
    let collapsed: Vec<usize> = p
        .u
        .iter()
        .enumerate()
        .filter(|(_, u)| **u < opts.collapse_threshold)
        .map(|(i, _)| i + 1)
        .collect();
    let certified = |r: f64, c: f64, err: f64| {
        r <= opts.residual_tolerance && c > 0.0 && err <= opts.residual_tolerance
    };
    let status = if certified(residual, c_unit, constraint_error) {
        SolveStatus::Solved
    } else if !collapsed.is_empty()
        && matches!(
            winner.termination,
            Termination::Stagnated | Termination::LineSearchFailed
        )
    {
        SolveStatus::Diverged
    } else {
        SolveStatus::Inconclusive
    };

    let starts_agreeing = outcomes
        .iter()
        .filter(|o| (o.point.value - p.value).abs() <= 1e-6)
        .count();
    let mut alternatives: Vec<Vec<f64>> = Vec::new();
    if status == SolveStatus::Solved {
        for o in &outcomes {
            let (c_o, res_o) = fit_proportionality(model, &o.point.ricci, &obj.z);
            let same_value = (o.point.value - p.value).abs() <= 1e-9 * p.value.abs().max(1.0);
            if same_value
                && certified(res_o, c_o, 0.0)
                && far_apart(&o.point.x, &p.x)
                && alternatives.iter().all(|a| far_apart(a, &o.point.x))
            {
                alternatives.push(o.point.x.iter().map(|v| v * zmax).collect());
            }
        }
    }

    Ok(SolveReport {
        tangent_gradient: tangent_gradient(model, &p.ricci, &z_in, &x),
        x,
        c,
        residual,
        s_value: p.value / zmax,
        status,
        termination: winner.termination,
        starts_used: outcomes.len(),
        iterations: winner.iterations,
        constraint_error,
        collapsed,
        starts_agreeing,
        alternatives,
        seed: opts.seed,
        theorem: None,
    })
}

/// Runs the sufficient condition as an advisory check, then maximizes `S`
/// on `M_T`. The report carries the condition check when chains are
/// available for the model.
pub fn solve_prescribed_ricci(
    analysis: &Analysis,
    t: &DiagonalForm,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let mut report = maximize_scalar_on_mt(analysis.model(), t, opts)?;
    report.theorem = check_theorem(analysis, t).ok();
    Ok(report)
}
