//! RMSE metrics and the vanilla-versus-refined ablation.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::{Dataset, Protocol};
use crate::error::{Error, Result};
use crate::gaussian::Vec2;
use crate::goal::GoalModelParams;
use crate::rollout::{rollout_refined, rollout_vanilla, PredictorParams, RefineConfig};

/// RMSE in meters over all predicted future steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub rmse_overall: f64,
    /// One value per future step `1..=T`.
    pub rmse_per_step: Vec<f64>,
    /// Values at whole-second steps (5, 10, … at 0.2 s).
    pub rmse_at_seconds: Vec<f64>,
}

/// Computes metrics from per-segment predicted means against ground-truth
/// futures. The overall value is `sqrt(Σₙ Σₖ ‖ŷ − y‖² / (N·T))`.
pub fn rmse_paths(predictions: &[Vec<Vec2>], truth: &[&[Vec2]], dt: f64) -> Result<Metrics> {
    if predictions.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} ground-truth segments",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Shape("no segments to evaluate".into()));
    }
    let horizon = truth[0].len();
    if horizon == 0 {
        return Err(Error::Shape("ground truth has no future steps".into()));
    }
    let mut sq = vec![0.0f64; horizon];
    for (n, (pred, gt)) in predictions.iter().zip(truth).enumerate() {
        if pred.len() != horizon || gt.len() != horizon {
            return Err(Error::Shape(format!(
                "segment {n}: {} predicted steps, {} ground-truth steps, expected {horizon}",
                pred.len(),
                gt.len()
            )));
        }
        for (acc, (p, g)) in sq.iter_mut().zip(pred.iter().zip(gt.iter())) {
            *acc += (*p - *g).norm_sq();
        }
    }
    let n = predictions.len() as f64;
    let mse_per_step: Vec<f64> = sq.iter().map(|s| s / n).collect();
    let rmse_per_step: Vec<f64> = mse_per_step.iter().map(|m| m.sqrt()).collect();
    let rmse_overall = (mse_per_step.iter().sum::<f64>() / horizon as f64).sqrt();
    let seconds = Protocol {
        dt,
        tau: 0,
        horizon,
    }
    .second_steps();
    let rmse_at_seconds = seconds.iter().map(|&k| rmse_per_step[k - 1]).collect();
    Ok(Metrics {
        rmse_overall,
        rmse_per_step,
        rmse_at_seconds,
    })
}

/// Metrics for predictions ordered like `ground_truth.segments`.
pub fn rmse(predictions: &[Vec<Vec2>], ground_truth: &Dataset) -> Result<Metrics> {
    let protocol = ground_truth
        .protocol()?
        .ok_or_else(|| Error::Shape("ground truth is empty".into()))?;
    let truth: Vec<&[Vec2]> = ground_truth.segments.iter().map(|s| s.future.as_slice()).collect();
    rmse_paths(predictions, &truth, protocol.dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub backbone: String,
    pub refine: bool,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn row(&self, backbone: &str, refine: bool) -> Option<&AblationRow> {
        self.rows
            .iter()
            .find(|r| r.backbone == backbone && r.refine == refine)
    }

    /// `vanilla − refined` at each whole second; positive means refinement helped.
    pub fn deltas(&self, backbone: &str) -> Option<Vec<f64>> {
        let v = self.row(backbone, false)?;
        let r = self.row(backbone, true)?;
        Some(
            v.metrics
                .rmse_at_seconds
                .iter()
                .zip(&r.metrics.rmse_at_seconds)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Metrics columns followed by `delta_overall, delta_1s, …` (vanilla −
    /// refined, zero on vanilla rows), 6 decimals.
    pub fn to_csv(&self) -> String {
        let seconds = self.rows.first().map_or(0, |r| r.metrics.rmse_at_seconds.len());
        let mut out = metrics_csv_header(seconds);
        out.push_str(",delta_overall");
        for s in 1..=seconds {
            let _ = write!(out, ",delta_{s}s");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&metrics_csv_row(&row.backbone, row.refine, &row.metrics));
            let vanilla = self.row(&row.backbone, false).filter(|_| row.refine);
            let delta_overall = vanilla.map_or(0.0, |v| v.metrics.rmse_overall - row.metrics.rmse_overall);
            let _ = write!(out, ",{delta_overall:.6}");
            for (i, value) in row.metrics.rmse_at_seconds.iter().enumerate() {
                let d = vanilla.map_or(0.0, |v| v.metrics.rmse_at_seconds[i] - value);
                let _ = write!(out, ",{d:.6}");
            }
            out.push('\n');
        }
        out
    }
}

/// `backbone,refine,rmse_overall,rmse_1s,…` for `seconds` horizons.
pub fn metrics_csv_header(seconds: usize) -> String {
    let mut h = String::from("backbone,refine,rmse_overall");
    for s in 1..=seconds {
        let _ = write!(h, ",rmse_{s}s");
    }
    h
}

pub fn metrics_csv_row(backbone: &str, refine: bool, m: &Metrics) -> String {
    let mut line = format!(
        "{backbone},{},{:.6}",
        if refine { "on" } else { "off" },
        m.rmse_overall
    );
    for v in &m.rmse_at_seconds {
        let _ = write!(line, ",{v:.6}");
    }
    line
}

/// Evaluates vanilla and refined rollouts of every model on every test
/// segment. Rows come in model order, vanilla first.
pub fn run_ablation(
    test: &Dataset,
    models: &[(String, PredictorParams)],
    goal_model: &GoalModelParams,
    cfg: &RefineConfig,
) -> Result<AblationReport> {
    let protocol = test
        .protocol()?
        .ok_or_else(|| Error::EmptyData("ablation test set is empty".into()))?;
    let horizon = protocol.horizon;
    let mut rows = Vec::with_capacity(2 * models.len());
    for (name, params) in models {
        for refine in [false, true] {
            let preds: Vec<Vec<Vec2>> = test
                .segments
                .par_iter()
                .map(|s| {
                    let est = if refine {
                        rollout_refined(params, goal_model, &s.history, horizon, cfg)?
                    } else {
                        rollout_vanilla(params, &s.history, horizon)?
                    };
                    Ok(est.into_iter().map(|e| e.mean).collect())
                })
                .collect::<Result<_>>()?;
            rows.push(AblationRow {
                backbone: name.clone(),
                refine,
                metrics: rmse(&preds, test)?,
            });
        }
    }
    Ok(AblationReport { rows })
}
