//! Rollout backbones and the refinement loop.
//!
//! A backbone predicts one step at a time from a short buffer of recent
//! positions and appends its own prediction to that buffer, so errors feed
//! forward. Three closed-form backbones are provided:
//!
//! * `cv`: constant velocity from the first and last buffered points;
//! * `ca`: least-squares quadratic through the buffer, extrapolated one step;
//! * `ar`: linear autoregression on the last `p` displacements.
//!
//! Every backbone carries one covariance per horizon step; the rollout's
//! Gaussian at step `k` is `(mean_k, cov_k)`.
//!
//! [`rollout_refined`] predicts goals once, then at each step fuses the raw
//! estimate with the goal pseudo-measurement and writes the fused mean back
//! into the buffer before the next step.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::fusion::{fuse, Estimate};
use crate::gaussian::{is_psd, Cov2, Vec2, PSD_TOL};
use crate::goal::{goal_measurement_at, GoalPredictor, GoalSet, InterpConfig};
use crate::lsq::{fit_ar_rls, NormalEquations};

/// Added to every fitted step covariance, m².
pub const COV_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backbone {
    Cv { window: usize },
    Ca { window: usize },
    Ar {
        lag: usize,
        /// `2·lag × 2`; feature rows ordered most recent displacement first.
        weights: Vec<[f64; 2]>,
    },
}

impl Backbone {
    pub fn name(&self) -> &'static str {
        match self {
            Backbone::Cv { .. } => "cv",
            Backbone::Ca { .. } => "ca",
            Backbone::Ar { .. } => "ar",
        }
    }

    /// Number of buffered positions the backbone reads.
    pub fn buffer_len(&self) -> usize {
        match self {
            Backbone::Cv { window } | Backbone::Ca { window } => *window,
            Backbone::Ar { lag, .. } => lag + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Backbone::Cv { window } if *window < 2 => {
                Err(Error::Config("cv window must be >= 2".into()))
            }
            Backbone::Ca { window } if *window < 3 => {
                Err(Error::Config("ca window must be >= 3".into()))
            }
            Backbone::Ar { lag, .. } if *lag == 0 => Err(Error::Config("ar lag must be >= 1".into())),
            Backbone::Ar { lag, weights } if weights.len() != 2 * lag => Err(Error::Dimension {
                expected: 2 * lag,
                got: weights.len(),
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorParams {
    pub dt: f64,
    pub backbone: Backbone,
    /// Covariance of the rollout at steps `1..=horizon`, m².
    pub step_covs: Vec<Cov2>,
}

impl PredictorParams {
    pub fn new(dt: f64, backbone: Backbone, step_covs: Vec<Cov2>) -> Result<Self> {
        let p = PredictorParams {
            dt,
            backbone,
            step_covs,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn horizon(&self) -> usize {
        self.step_covs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        self.backbone.validate()?;
        for (k, c) in self.step_covs.iter().enumerate() {
            if !is_psd(c, PSD_TOL) {
                return Err(Error::Config(format!("step {} covariance is not PSD", k + 1)));
            }
        }
        for (k, w) in self.step_covs.windows(2).enumerate() {
            let (a, b) = (w[0].trace(), w[1].trace());
            if b < a - 1e-12 * a.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "step covariance trace decreases at step {} ({a} -> {b})",
                    k + 2
                )));
            }
        }
        Ok(())
    }

    /// Primes a rollout state with the tail of `history`.
    pub fn init(&self, history: &[Vec2]) -> Result<PredictorState> {
        let need = self.backbone.buffer_len();
        if history.len() < need {
            return Err(Error::InsufficientHistory {
                need,
                got: history.len(),
            });
        }
        Ok(PredictorState {
            buffer: history[history.len() - need..].to_vec(),
            step: 0,
        })
    }
}

/// Per-rollout buffer of recent positions and the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorState {
    buffer: Vec<Vec2>,
    step: usize,
}

impl PredictorState {
    pub fn buffer(&self) -> &[Vec2] {
        &self.buffer
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Buffered displacements, most recent first.
    pub fn displacements(&self) -> Vec<Vec2> {
        self.buffer.windows(2).rev().map(|w| w[1] - w[0]).collect()
    }

    /// Endpoint finite-difference velocity over the buffer, m/s.
    pub fn velocity(&self, dt: f64) -> Vec2 {
        let n = self.buffer.len();
        (self.buffer[n - 1] - self.buffer[0]) * (1.0 / ((n - 1) as f64 * dt))
    }

    fn last(&self) -> Vec2 {
        *self.buffer.last().expect("buffer is never empty")
    }

    fn next_mean(&self, backbone: &Backbone, dt: f64) -> Vec2 {
        let last = self.last();
        match backbone {
            Backbone::Cv { .. } => last + self.velocity(dt) * dt,
            Backbone::Ca { window } => {
                let c = quadratic_extrapolation_weights(*window);
                self.buffer
                    .iter()
                    .zip(c)
                    .fold(Vec2::ZERO, |acc, (p, w)| acc + *p * w)
            }
            Backbone::Ar { weights, .. } => {
                let d = self.displacements();
                let step = d.iter().enumerate().fold(Vec2::ZERO, |acc, (i, di)| {
                    let (wx, wy) = (weights[2 * i], weights[2 * i + 1]);
                    acc + Vec2::new(wx[0] * di.x + wy[0] * di.y, wx[1] * di.x + wy[1] * di.y)
                });
                last + step
            }
        }
    }

    fn advance(&mut self, p: Vec2) {
        self.buffer.remove(0);
        self.buffer.push(p);
        self.step += 1;
    }

    /// Predicts the next step and appends the raw mean to the buffer.
    pub fn step(&mut self, params: &PredictorParams) -> Result<Estimate> {
        if self.step >= params.horizon() {
            return Err(Error::HorizonExceeded {
                horizon: params.horizon(),
            });
        }
        let mean = self.next_mean(&params.backbone, params.dt);
        let cov = params.step_covs[self.step];
        self.advance(mean);
        Ok(Estimate { mean, cov })
    }

    /// Replaces the most recent buffered position with `fused_mean`.
    pub fn feedback(&mut self, fused_mean: Vec2) -> Result<()> {
        if self.step == 0 {
            return Err(Error::FeedbackBeforeStep);
        }
        *self.buffer.last_mut().expect("buffer is never empty") = fused_mean;
        Ok(())
    }
}

/// Weights `c` with `Σ cᵢ pᵢ` = least-squares quadratic through `w` equally
/// spaced points, evaluated one step past the last.
fn quadratic_extrapolation_weights(w: usize) -> Vec<f64> {
    let mut vtv = Matrix3::<f64>::zeros();
    for i in 0..w {
        let t = i as f64;
        let row = Vector3::new(1.0, t, t * t);
        vtv += row * row.transpose();
    }
    let t = w as f64;
    let target = Vector3::new(1.0, t, t * t);
    // Vandermonde on >= 3 distinct nodes has full column rank.
    let z = vtv.lu().solve(&target).expect("quadratic fit is well-posed");
    (0..w)
        .map(|i| {
            let t = i as f64;
            z[0] + z[1] * t + z[2] * t * t
        })
        .collect()
}

/// Which position the backbone sees after a refined step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackMode {
    Fused,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub refine_enabled: bool,
    pub interp: InterpConfig,
    pub feedback: FeedbackMode,
    /// Multiplies every goal pseudo-measurement covariance.
    pub goal_cov_scale: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            refine_enabled: true,
            interp: InterpConfig::default(),
            feedback: FeedbackMode::Fused,
            goal_cov_scale: 1.0,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        self.interp.validate()?;
        if !(self.goal_cov_scale > 0.0 && self.goal_cov_scale.is_finite()) {
            return Err(Error::Config(format!(
                "goal covariance scale must be > 0, got {}",
                self.goal_cov_scale
            )));
        }
        Ok(())
    }
}

/// `horizon` raw steps with no fusion and no feedback.
pub fn rollout_vanilla(params: &PredictorParams, history: &[Vec2], horizon: usize) -> Result<Vec<Estimate>> {
    let mut state = params.init(history)?;
    (0..horizon).map(|_| state.step(params)).collect()
}

/// Refined rollout: goals are predicted exactly once, then every step is
/// fused with its goal pseudo-measurement.
pub fn rollout_refined<G: GoalPredictor + ?Sized>(
    params: &PredictorParams,
    goal_model: &G,
    history: &[Vec2],
    horizon: usize,
    cfg: &RefineConfig,
) -> Result<Vec<Estimate>> {
    if !cfg.refine_enabled {
        return rollout_vanilla(params, history, horizon);
    }
    let goals = goal_model.predict_goals(history)?;
    refine_with_goals(params, &goals, history, horizon, cfg)
}

/// The refinement loop for an already predicted goal set.
pub fn refine_with_goals(
    params: &PredictorParams,
    goals: &GoalSet,
    history: &[Vec2],
    horizon: usize,
    cfg: &RefineConfig,
) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    let mut state = params.init(history)?;
    let last_obs = *history.last().expect("init checked history length");
    let mut out = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let raw = state.step(params)?;
        let mut meas = goal_measurement_at(goals, k, last_obs, &cfg.interp)?;
        meas.cov = meas.cov.scale(cfg.goal_cov_scale);
        let fused = fuse(&raw, &meas).map_err(|e| Error::FusionAtStep {
            step: k,
            source: Box::new(e),
        })?;
        if cfg.feedback == FeedbackMode::Fused {
            state.feedback(fused.mean)?;
        }
        out.push(fused);
    }
    Ok(out)
}

/// How autoregressive weights are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArSolver {
    /// Ridge normal equations.
    Batch,
    /// Recursive least squares with forgetting; the ridge value seeds the
    /// initial information matrix.
    Rls { forgetting: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackboneKind {
    Cv,
    Ca,
    Ar,
}

impl std::str::FromStr for BackboneKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cv" => Ok(BackboneKind::Cv),
            "ca" => Ok(BackboneKind::Ca),
            "ar" => Ok(BackboneKind::Ar),
            other => Err(Error::Config(format!("unknown predictor `{other}` (valid: cv, ca, ar)"))),
        }
    }
}

impl std::fmt::Display for BackboneKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackboneKind::Cv => "cv",
            BackboneKind::Ca => "ca",
            BackboneKind::Ar => "ar",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorFitConfig {
    /// Window for cv (>= 2) and ca (>= 3); `None` uses the whole history.
    pub window: Option<usize>,
    pub lag: usize,
    pub ridge_lambda: f64,
    pub solver: ArSolver,
}

impl Default for PredictorFitConfig {
    fn default() -> Self {
        PredictorFitConfig {
            window: None,
            lag: 3,
            ridge_lambda: 1e-3,
            solver: ArSolver::Batch,
        }
    }
}

/// One-step displacement regression pairs `(φ, target)` over every point of
/// every segment.
fn ar_samples(ds: &Dataset, lag: usize) -> Vec<(Vec<f64>, [f64; 2])> {
    let mut out = Vec::new();
    for s in &ds.segments {
        let pts: Vec<Vec2> = s.points().collect();
        let disp: Vec<Vec2> = pts.windows(2).map(|w| w[1] - w[0]).collect();
        // disp[j] = pts[j+1] - pts[j]; predict disp[j] from disp[j-1], ..., disp[j-lag]
        for j in lag..disp.len() {
            let feats = (1..=lag)
                .flat_map(|i| {
                    let d = disp[j - i];
                    [d.x, d.y]
                })
                .collect();
            out.push((feats, [disp[j].x, disp[j].y]));
        }
    }
    out
}

/// Fits a backbone and calibrates its per-step covariances.
///
/// The covariance at step `k` is the second moment of the backbone's own
/// vanilla-rollout error at `k` on `val` (on `train` when `val` is empty),
/// plus [`COV_FLOOR`]·I, with traces made non-decreasing by adding isotropic
/// variance where needed.
pub fn fit_predictor(
    kind: BackboneKind,
    train: &Dataset,
    val: &Dataset,
    cfg: &PredictorFitConfig,
) -> Result<PredictorParams> {
    let protocol = train
        .protocol()?
        .ok_or_else(|| Error::EmptyData("predictor training set is empty".into()))?;
    if let Some(p) = val.protocol()? {
        if !p.matches(&protocol) {
            return Err(Error::Protocol(format!(
                "validation protocol {p:?} differs from training {protocol:?}"
            )));
        }
    }

    let backbone = match kind {
        BackboneKind::Cv => Backbone::Cv {
            window: cfg.window.unwrap_or(protocol.history_len()),
        },
        BackboneKind::Ca => Backbone::Ca {
            window: cfg.window.unwrap_or(protocol.history_len()),
        },
        BackboneKind::Ar => {
            let lag = cfg.lag;
            if lag == 0 {
                return Err(Error::Config("ar lag must be >= 1".into()));
            }
            let samples = ar_samples(train, lag);
            if samples.is_empty() {
                return Err(Error::EmptyData(format!(
                    "segments too short for an ar({lag}) fit"
                )));
            }
            let w = match cfg.solver {
                ArSolver::Batch => {
                    let mut ne = NormalEquations::new(2 * lag, 2);
                    for (x, y) in &samples {
                        ne.add(x, y);
                    }
                    ne.solve(cfg.ridge_lambda)?
                }
                ArSolver::Rls { forgetting } => fit_ar_rls(
                    samples.iter().map(|(x, y)| (x.as_slice(), &y[..])),
                    2 * lag,
                    2,
                    cfg.ridge_lambda,
                    forgetting,
                )?,
            };
            Backbone::Ar {
                lag,
                weights: (0..2 * lag).map(|i| [w[(i, 0)], w[(i, 1)]]).collect(),
            }
        }
    };
    backbone.validate()?;
    if protocol.history_len() < backbone.buffer_len() {
        return Err(Error::InsufficientHistory {
            need: backbone.buffer_len(),
            got: protocol.history_len(),
        });
    }

    let calib = if val.is_empty() { train } else { val };
    let horizon = protocol.horizon;
    let step_covs = calibrate_step_covs(&backbone, protocol.dt, calib, horizon)?;
    PredictorParams::new(protocol.dt, backbone, step_covs)
}

fn calibrate_step_covs(backbone: &Backbone, dt: f64, calib: &Dataset, horizon: usize) -> Result<Vec<Cov2>> {
    let probe = PredictorParams {
        dt,
        backbone: backbone.clone(),
        step_covs: vec![Cov2::IDENTITY; horizon],
    };
    let errors: Vec<Vec<Vec2>> = calib
        .segments
        .par_iter()
        .map(|s| {
            let est = rollout_vanilla(&probe, &s.history, horizon)?;
            Ok(est.iter().zip(&s.future).map(|(e, y)| e.mean - *y).collect())
        })
        .collect::<Result<_>>()?;

    let n = errors.len() as f64;
    let mut covs = vec![Cov2::ZERO; horizon];
    for seg in &errors {
        for (c, e) in covs.iter_mut().zip(seg) {
            *c = *c + Cov2::new(e.x * e.x, e.x * e.y, e.y * e.y);
        }
    }
    let mut running = 0.0f64;
    for c in covs.iter_mut() {
        *c = c.scale(1.0 / n) + Cov2::isotropic(COV_FLOOR);
        let tr = c.trace();
        if tr < running {
            *c = *c + Cov2::isotropic(0.5 * (running - tr));
        }
        running = running.max(c.trace());
    }
    Ok(covs)
}
