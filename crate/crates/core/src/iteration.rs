//! Ricci iteration: a sequence `g_1, g_2, …` with `Ric g_i = g_{i−1}`.
//!
//! Given `ḡ_i`, solving `Ric g = c_i ḡ_i` on `M_{ḡ_i}` produces `ḡ_{i+1}`.
//! Setting `g_i = c_i ḡ_i`, scale invariance of the Ricci tensor gives
//! `Ric g_{i+1} = Ric ḡ_{i+1} = c_i ḡ_i = g_i`.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::chains::check_theorem;
use crate::chains::Analysis;
use crate::curvature::ricci;
use crate::form::DiagonalForm;
use crate::solver::{maximize_scalar_on_mt, SolveError, SolveOptions, SolveStatus};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum IterationError {
    #[error("at least one step is required")]
    NoSteps,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremCheck {
    Pass,
    Fail,
    /// The space has the structure under which every `T` is solvable.
    Skipped,
    /// No chain data (the hypothesis fails or η is undefined).
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStep {
    /// 1-based step number `i`.
    pub step: usize,
    /// `ḡ_i`, used as the prescribed tensor of this step.
    pub g_bar: Vec<f64>,
    pub c: f64,
    /// `g_i = c_i ḡ_i`.
    pub g: Vec<f64>,
    /// `ḡ_{i+1}`, the solution of `Ric ḡ_{i+1} = c_i ḡ_i`.
    pub next: Vec<f64>,
    /// `‖Ric ḡ_{i+1} − g_i‖∞ / ‖g_i‖∞`.
    pub residual: f64,
    pub status: SolveStatus,
    pub theorem: TheoremCheck,
    /// Largest relative change between volume-normalized `ḡ_i` and
    /// `ḡ_{i+1}`.
    pub change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub requested: usize,
    pub completed: bool,
}

impl IterationTrace {
    /// Writes one JSON object per step.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> io::Result<()> {
        for step in &self.steps {
            serde_json::to_writer(&mut out, step)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_json_lines(&self) -> String {
        let mut buf = Vec::new();
        self.write_json_lines(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn max_residual(&self) -> f64 {
        self.steps.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

/// Rescales `x` so that `Π x_i^{d_i} = 1`, i.e. to unit volume relative to `Q`.
fn volume_normalized(dims: &[u32], x: &[f64]) -> Vec<f64> {
    let n: f64 = dims.iter().map(|&d| d as f64).sum();
    let log_vol: f64 = dims.iter().zip(x).map(|(&d, v)| d as f64 * v.ln()).sum();
    let scale = (-log_vol / n).exp();
    x.iter().map(|v| v * scale).collect()
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
        .fold(0.0, f64::max)
}

/// Runs `steps` steps of the Ricci iteration from `ḡ_1 = start`. Stops early,
/// returning the partial trace, when a step fails to produce a certified
/// solution.
pub fn ricci_iterate(
    analysis: &Analysis,
    start: &DiagonalForm,
    steps: usize,
    opts: &SolveOptions,
) -> Result<IterationTrace, IterationError> {
    if steps == 0 {
        return Err(IterationError::NoSteps);
    }
    let model = analysis.model();
    let mut g_bar = start.clone();
    let mut trace = Vec::with_capacity(steps);
    for step in 1..=steps {
        let theorem = if analysis.solvable_for_every_t() {
            TheoremCheck::Skipped
        } else {
            match check_theorem(analysis, &g_bar) {
                Ok(r) if r.pass => TheoremCheck::Pass,
                Ok(_) => TheoremCheck::Fail,
                Err(_) => TheoremCheck::Unavailable,
            }
        };
        let report = maximize_scalar_on_mt(model, &g_bar, opts)?;
        let current = g_bar.to_f64();
        let g: Vec<f64> = current.iter().map(|v| report.c * v).collect();
        let residual = match ricci(model, &report.x) {
            Ok(r) => {
                let norm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                r.iter().zip(&g).map(|(r, g)| (r - g).abs()).fold(0.0, f64::max) / norm
            }
            Err(_) => f64::INFINITY,
        };
        let change = relative_change(
            &volume_normalized(model.dims(), &current),
            &volume_normalized(model.dims(), &report.x),
        );
        let status = report.status;
        trace.push(IterationStep {
            step,
            g_bar: current,
            c: report.c,
            g,
            next: report.x.clone(),
            residual,
            status,
            theorem,
            change,
        });
        if status != SolveStatus::Solved {
            break;
        }
        g_bar = match DiagonalForm::from_f64(&report.x) {
            Ok(f) => f,
            Err(_) => break,
        };
    }
    let completed = trace.len() == steps && trace.iter().all(|s| s.status == SolveStatus::Solved);
    Ok(IterationTrace {
        steps: trace,
        requested: steps,
        completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelInput, SpaceModel, Triple};
    use crate::scalar::Scalar;

    fn line_model() -> SpaceModel {
        // d = (1, 4), ζ_1 = 0: every T is solvable.
        SpaceModel::from_input(ModelInput {
            name: "line".into(),
            dims: vec![1, 4],
            casimir: Some(vec![Scalar::zero(), Scalar::ratio(1, 3)]),
            killing: None,
            triples: vec![Triple::new(1, 2, 2, Scalar::one())],
            pairwise_inequivalent: true,
        })
        .unwrap()
    }

    #[test]
    fn iterates_on_line_model() {
        let analysis = Analysis::new(line_model()).unwrap();
        let start = DiagonalForm::from_f64(&[1.0, 1.0]).unwrap();
        let trace = ricci_iterate(&analysis, &start, 10, &SolveOptions::default()).unwrap();
        assert!(trace.completed);
        assert_eq!(trace.steps.len(), 10);
        for step in &trace.steps {
            assert!(step.residual < 1e-7, "{step:?}");
            assert!(step.c > 0.0);
            assert_eq!(step.theorem, TheoremCheck::Skipped);
        }
        let lines = trace.to_json_lines();
        assert_eq!(lines.lines().count(), 10);
        let again = ricci_iterate(&analysis, &start, 10, &SolveOptions::default()).unwrap();
        assert_eq!(lines, again.to_json_lines());
    }

    #[test]
    fn single_summand_keeps_the_ray() {
        let model = SpaceModel::from_input(ModelInput {
            name: "sphere".into(),
            dims: vec![3],
            casimir: None,
            killing: Some(vec![Scalar::one()]),
            triples: vec![],
            pairwise_inequivalent: true,
        })
        .unwrap();
        let analysis = Analysis::new(model).unwrap();
        let start = DiagonalForm::from_f64(&[1.0]).unwrap();
        let trace = ricci_iterate(&analysis, &start, 4, &SolveOptions::default()).unwrap();
        assert!(trace.completed);
        // ḡ_{i+1} = 3 ḡ_i and c_i = 1/(2 ḡ_i).
        let mut expected = 1.0;
        for step in &trace.steps {
            assert!((step.g_bar[0] - expected).abs() < 1e-12 * expected);
            assert!((step.c * expected - 0.5).abs() < 1e-12);
            assert!((step.g[0] - 0.5).abs() < 1e-12);
            assert!(step.change < 1e-12);
            expected *= 3.0;
        }
    }

    #[test]
    fn zero_steps_is_an_error() {
        let analysis = Analysis::new(line_model()).unwrap();
        let start = DiagonalForm::from_f64(&[1.0, 1.0]).unwrap();
        assert_eq!(
            ricci_iterate(&analysis, &start, 0, &SolveOptions::default()),
            Err(IterationError::NoSteps)
        );
    }
}
