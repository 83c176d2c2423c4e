//! Goal points: once-per-segment Gaussian predictions of future positions at a
//! few anchor steps, and their conversion into a pseudo-measurement for every
//! rollout step.
//!
//! The predictor is a linear-Gaussian regressor. Each anchor `a` owns its own
//! weight matrix `W_a` and residual covariance, so anchors never influence one
//! another. Features are the history displacements expressed in an ego frame
//! whose origin is the last observed point and whose +x axis follows the mean
//! history heading (rotation can be disabled).

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::fusion::Estimate;
use crate::gaussian::{is_psd, Cov2, Gaussian2D, Vec2, PSD_TOL};
use crate::lsq::NormalEquations;

/// Added to every fitted residual covariance, m².
pub const COV_FLOOR: f64 = 1e-6;

/// Translation to the last observed point plus an optional heading rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgoFrame {
    pub origin: Vec2,
    /// World heading of the ego +x axis, radians.
    pub heading: f64,
}

impl EgoFrame {
    pub fn from_history(history: &[Vec2], rotate: bool) -> Self {
        let origin = *history.last().expect("history must be non-empty");
        let heading = if rotate {
            let span = origin - history[0];
            if span.norm() > 1e-9 {
                span.y.atan2(span.x)
            } else {
                0.0
            }
        } else {
            0.0
        };
        EgoFrame { origin, heading }
    }

    pub fn to_ego(&self, p: Vec2) -> Vec2 {
        self.vec_to_ego(p - self.origin)
    }

    pub fn vec_to_ego(&self, v: Vec2) -> Vec2 {
        if self.heading == 0.0 {
            v
        } else {
            v.rotate(-self.heading)
        }
    }

    pub fn to_world(&self, v: Vec2) -> Vec2 {
        let v = if self.heading == 0.0 { v } else { v.rotate(self.heading) };
        self.origin + v
    }

    pub fn cov_to_world(&self, c: Cov2) -> Cov2 {
        if self.heading == 0.0 {
            c
        } else {
            c.rotate(self.heading)
        }
    }
}

/// Ego-frame displacement features: `[d₁.x, d₁.y, …, d_τ.x, d_τ.y]`, oldest first.
pub fn history_features(history: &[Vec2], frame: &EgoFrame) -> Vec<f64> {
    history
        .windows(2)
        .flat_map(|w| {
            let d = frame.vec_to_ego(w[1] - w[0]);
            [d.x, d.y]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalAnchor {
    pub step: usize,
    pub gaussian: Gaussian2D,
}

/// Goal anchors ordered by strictly increasing step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSet {
    anchors: Vec<GoalAnchor>,
}

impl GoalSet {
    pub fn new(anchors: Vec<GoalAnchor>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::domain("goal set must contain at least one anchor"));
        }
        if anchors[0].step == 0 {
            return Err(Error::domain("anchor steps start at 1"));
        }
        if anchors.windows(2).any(|w| w[1].step <= w[0].step) {
            return Err(Error::domain("anchor steps must be strictly increasing"));
        }
        Ok(GoalSet { anchors })
    }

    pub fn anchors(&self) -> &[GoalAnchor] {
        &self.anchors
    }

    /// Multiplies every anchor covariance by `s` (standard deviations by √s).
    pub fn scaled(&self, s: f64) -> Result<GoalSet> {
        let root = s.sqrt();
        let anchors = self
            .anchors
            .iter()
            .map(|a| {
                let g = &a.gaussian;
                Ok(GoalAnchor {
                    step: a.step,
                    gaussian: Gaussian2D::new(g.mean, g.sigma_x * root, g.sigma_y * root, g.rho)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(GoalSet { anchors })
    }
}

/// Anything that can produce the goal set for a history.
pub trait GoalPredictor {
    fn predict_goals(&self, history: &[Vec2]) -> Result<GoalSet>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorModel {
    pub step: usize,
    /// `2τ × 2` regression weights, one row per feature.
    pub weights: Vec<[f64; 2]>,
    /// Ego-frame residual covariance, m².
    pub residual_cov: Cov2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalModelParams {
    /// Number of history points (`τ + 1`) the features are built from.
    pub history_len: usize,
    /// Rotate the ego frame to the mean history heading.
    pub rotate: bool,
    pub anchors: Vec<AnchorModel>,
}

impl GoalModelParams {
    pub fn feature_dim(&self) -> usize {
        2 * self.history_len.saturating_sub(1)
    }

    pub fn anchor_steps(&self) -> Vec<usize> {
        self.anchors.iter().map(|a| a.step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.history_len < 2 {
            return Err(Error::Config("goal model needs at least 2 history points".into()));
        }
        if self.anchors.is_empty() {
            return Err(Error::Config("goal model has no anchors".into()));
        }
        if self.anchors[0].step == 0 || self.anchors.windows(2).any(|w| w[1].step <= w[0].step) {
            return Err(Error::Config("anchor steps must be >= 1 and strictly increasing".into()));
        }
        for a in &self.anchors {
            if a.weights.len() != self.feature_dim() {
                return Err(Error::Dimension {
                    expected: self.feature_dim(),
                    got: a.weights.len(),
                });
            }
            if !is_psd(&a.residual_cov, PSD_TOL) {
                return Err(Error::Config(format!("anchor {} residual covariance not PSD", a.step)));
            }
        }
        Ok(())
    }
}

impl GoalPredictor for GoalModelParams {
    fn predict_goals(&self, history: &[Vec2]) -> Result<GoalSet> {
        predict_goals(self, history)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalFitConfig {
    pub anchor_steps: Vec<usize>,
    pub ridge_lambda: f64,
    pub rotate: bool,
}

impl Default for GoalFitConfig {
    fn default() -> Self {
        GoalFitConfig {
            anchor_steps: vec![5, 10, 15, 20, 25],
            ridge_lambda: 1e-3,
            rotate: true,
        }
    }
}

/// Fits one ridge regressor per anchor on ego-frame displacements.
///
/// Residual covariances are the second moment of ego-frame residuals on
/// `val` (on `train` when `val` is empty), plus [`COV_FLOOR`]·I.
pub fn fit_goal_model(train: &Dataset, val: &Dataset, cfg: &GoalFitConfig) -> Result<GoalModelParams> {
    let protocol = train
        .protocol()?
        .ok_or_else(|| Error::EmptyData("goal model training set is empty".into()))?;
    if let Some(p) = val.protocol()? {
        if !p.matches(&protocol) {
            return Err(Error::Protocol(format!(
                "validation protocol {p:?} differs from training {protocol:?}"
            )));
        }
    }
    let mut steps = cfg.anchor_steps.clone();
    steps.sort_unstable();
    steps.dedup();
    if steps.is_empty() || steps[0] == 0 || *steps.last().unwrap() > protocol.horizon {
        return Err(Error::Config(format!(
            "anchor steps {:?} must lie in 1..={}",
            cfg.anchor_steps, protocol.horizon
        )));
    }

    let history_len = protocol.history_len();
    let dim = 2 * protocol.tau;
    if dim == 0 {
        return Err(Error::Config("goal model needs at least 2 history points".into()));
    }

    let calib = if val.is_empty() { train } else { val };
    let mut anchors = Vec::with_capacity(steps.len());
    for &step in &steps {
        let mut ne = NormalEquations::new(dim, 2);
        for s in &train.segments {
            let frame = EgoFrame::from_history(&s.history, cfg.rotate);
            let target = frame.to_ego(s.future[step - 1]);
            ne.add(&history_features(&s.history, &frame), &[target.x, target.y]);
        }
        let w = ne.solve(cfg.ridge_lambda).map_err(|e| match e {
            Error::SingularSystem(m) => Error::SingularSystem(format!("goal anchor {step}: {m}")),
            other => other,
        })?;
        let weights: Vec<[f64; 2]> = (0..dim).map(|i| [w[(i, 0)], w[(i, 1)]]).collect();

        let mut second = Cov2::ZERO;
        for s in &calib.segments {
            let frame = EgoFrame::from_history(&s.history, cfg.rotate);
            let pred = apply_weights(&weights, &history_features(&s.history, &frame));
            let r = frame.to_ego(s.future[step - 1]) - pred;
            second = second + Cov2::new(r.x * r.x, r.x * r.y, r.y * r.y);
        }
        let residual_cov = second.scale(1.0 / calib.len() as f64) + Cov2::isotropic(COV_FLOOR);
        anchors.push(AnchorModel {
            step,
            weights,
            residual_cov,
        });
    }

    Ok(GoalModelParams {
        history_len,
        rotate: cfg.rotate,
        anchors,
    })
}

fn apply_weights(weights: &[[f64; 2]], features: &[f64]) -> Vec2 {
    weights
        .iter()
        .zip(features)
        .fold(Vec2::ZERO, |acc, (w, f)| acc + Vec2::new(w[0] * f, w[1] * f))
}

/// Predicts the goal set for one history. Pure in `(params, history)`.
pub fn predict_goals(params: &GoalModelParams, history: &[Vec2]) -> Result<GoalSet> {
    if history.len() != params.history_len {
        return Err(Error::Dimension {
            expected: params.history_len,
            got: history.len(),
        });
    }
    let frame = EgoFrame::from_history(history, params.rotate);
    let features = history_features(history, &frame);
    let anchors = params
        .anchors
        .iter()
        .map(|a| {
            let mean = frame.to_world(apply_weights(&a.weights, &features));
            let cov = frame.cov_to_world(a.residual_cov);
            Ok(GoalAnchor {
                step: a.step,
                gaussian: Gaussian2D::from_cov(mean, cov)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GoalSet::new(anchors)
}

/// Interpolation of anchors into per-step pseudo-measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpConfig {
    /// Variance of the virtual step-0 anchor at the last observation, m².
    pub epsilon: f64,
    /// Variance growth per step past the last anchor, m²/step.
    pub beta: f64,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            epsilon: 0.05,
            beta: 0.5,
        }
    }
}

impl InterpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Pseudo-measurement `(Z_k, R_k)` for future step `k` (1-based).
///
/// Anchor steps return the anchor exactly. Between anchors, mean and
/// covariance are interpolated linearly; a virtual anchor at step 0 with mean
/// `last_obs` and covariance `ε·I` brackets steps before the first anchor.
/// Past the last anchor, its mean is held and its covariance grows by
/// `β·(k − k_last)·I`.
pub fn goal_measurement_at(goals: &GoalSet, k: usize, last_obs: Vec2, cfg: &InterpConfig) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::domain("future steps are 1-based"));
    }
    let anchors = goals.anchors();
    let idx = anchors.partition_point(|a| a.step < k);

    if let Some(hi) = anchors.get(idx) {
        if hi.step == k {
            return Ok(hi.gaussian.into());
        }
        let (lo_step, lo_mean, lo_cov) = match idx.checked_sub(1).map(|i| &anchors[i]) {
            Some(lo) => (lo.step, lo.gaussian.mean, lo.gaussian.cov()),
            None => (0, last_obs, Cov2::isotropic(cfg.epsilon)),
        };
        let w = (k - lo_step) as f64 / (hi.step - lo_step) as f64;
        return Ok(Estimate {
            mean: lo_mean * (1.0 - w) + hi.gaussian.mean * w,
            cov: lo_cov * (1.0 - w) + hi.gaussian.cov() * w,
        });
    }

    let last = anchors.last().expect("goal sets are non-empty");
    Ok(Estimate {
        mean: last.gaussian.mean,
        cov: last.gaussian.cov() + Cov2::isotropic(cfg.beta * (k - last.step) as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_synthetic, Scenario};
    use proptest::prelude::*;

    fn anchor(step: usize, x: f64, y: f64, var: f64) -> GoalAnchor {
        GoalAnchor {
            step,
            gaussian: Gaussian2D::new(Vec2::new(x, y), var.sqrt(), var.sqrt(), 0.0).unwrap(),
        }
    }

    fn zero_model(history_len: usize, steps: &[usize]) -> GoalModelParams {
        GoalModelParams {
            history_len,
            rotate: true,
            anchors: steps
                .iter()
                .map(|&step| AnchorModel {
                    step,
                    weights: vec![[0.0; 2]; 2 * (history_len - 1)],
                    residual_cov: Cov2::IDENTITY,
                })
                .collect(),
        }
    }

    fn cv_model() -> GoalModelParams {
        let train = gen_synthetic(Scenario::ConstantVelocity, 100, 0.0, 21).unwrap();
        let cfg = GoalFitConfig {
            ridge_lambda: 1e-8,
            ..GoalFitConfig::default()
        };
        fit_goal_model(&train, &Dataset::default(), &cfg).unwrap()
    }

    #[test]
    fn cv_corpus_is_fit_exactly() {
        let model = cv_model();
        let test = gen_synthetic(Scenario::ConstantVelocity, 20, 0.0, 22).unwrap();
        for s in &test.segments {
            let goals = model.predict_goals(&s.history).unwrap();
            for a in goals.anchors() {
                assert!((a.gaussian.mean - s.future[a.step - 1]).norm() < 1e-8);
            }
        }
        for a in &model.anchors {
            assert!((a.residual_cov.sxx - COV_FLOOR).abs() < 1e-9);
            assert!((a.residual_cov.syy - COV_FLOOR).abs() < 1e-9);
            assert!(a.residual_cov.sxy.abs() < 1e-9);
        }
    }

    #[test]
    fn straight_history_extrapolates_five_seconds() {
        let model = cv_model();
        let v = 17.0;
        let history: Vec<Vec2> = (0..16).map(|i| Vec2::new(3.0 + v * 0.2 * i as f64, -2.0)).collect();
        let goals = model.predict_goals(&history).unwrap();
        let last = *history.last().unwrap();
        let a25 = goals.anchors().iter().find(|a| a.step == 25).unwrap();
        assert!((a25.gaussian.mean - (last + Vec2::new(5.0 * v, 0.0))).norm() < 1e-6);
    }

    #[test]
    fn infinite_ridge_predicts_last_position() {
        let train = gen_synthetic(Scenario::LaneChange, 50, 0.2, 2).unwrap();
        let cfg = GoalFitConfig {
            ridge_lambda: 1e18,
            ..GoalFitConfig::default()
        };
        let model = fit_goal_model(&train, &Dataset::default(), &cfg).unwrap();
        let h = &train.segments[0].history;
        for a in model.predict_goals(h).unwrap().anchors() {
            assert!((a.gaussian.mean - h[15]).norm() < 1e-9);
        }
    }

    #[test]
    fn single_segment_without_ridge_is_singular() {
        let train = gen_synthetic(Scenario::Turn, 1, 0.1, 2).unwrap();
        let cfg = GoalFitConfig {
            ridge_lambda: 0.0,
            ..GoalFitConfig::default()
        };
        assert!(matches!(
            fit_goal_model(&train, &Dataset::default(), &cfg),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(fit_goal_model(&Dataset::default(), &Dataset::default(), &GoalFitConfig::default()).is_err());
    }

    #[test]
    fn zero_weights_predict_last_observation() {
        let model = zero_model(4, &[2, 5]);
        let history = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.5), Vec2::new(2.0, 1.5), Vec2::new(4.0, 2.0)];
        for a in model.predict_goals(&history).unwrap().anchors() {
            assert_eq!(a.gaussian.mean, history[3]);
        }
    }

    #[test]
    fn wrong_history_length_is_rejected() {
        let model = zero_model(4, &[1]);
        assert!(matches!(
            model.predict_goals(&[Vec2::ZERO; 3]),
            Err(Error::Dimension { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn anchors_are_independent() {
        let train = gen_synthetic(Scenario::LaneChange, 200, 0.2, 5).unwrap();
        let val = gen_synthetic(Scenario::LaneChange, 50, 0.2, 6).unwrap();
        let full = fit_goal_model(&train, &val, &GoalFitConfig::default()).unwrap();
        let sparse = fit_goal_model(
            &train,
            &val,
            &GoalFitConfig {
                anchor_steps: vec![10, 25],
                ..GoalFitConfig::default()
            },
        )
        .unwrap();
        let h = &val.segments[3].history;
        let a = full.predict_goals(h).unwrap();
        let b = sparse.predict_goals(h).unwrap();
        for anchor in b.anchors() {
            let twin = a.anchors().iter().find(|x| x.step == anchor.step).unwrap();
            assert_eq!(twin, anchor);
        }
        assert_eq!(full.predict_goals(h).unwrap(), a);
    }

    #[test]
    fn measurement_at_anchor_is_exact() {
        let goals = GoalSet::new(vec![anchor(10, 0.0, 0.0, 1.0), anchor(20, 10.0, 0.0, 9.0)]).unwrap();
        let m = goal_measurement_at(&goals, 20, Vec2::ZERO, &InterpConfig::default()).unwrap();
        assert_eq!(m, Estimate::from(goals.anchors()[1].gaussian));
    }

    #[test]
    fn measurement_midpoint() {
        let goals = GoalSet::new(vec![anchor(10, 0.0, 0.0, 1.0), anchor(20, 10.0, 0.0, 9.0)]).unwrap();
        let m = goal_measurement_at(&goals, 15, Vec2::ZERO, &InterpConfig::default()).unwrap();
        assert_eq!(m.mean, Vec2::new(5.0, 0.0));
        assert_eq!(m.cov, Cov2::isotropic(5.0));
    }

    #[test]
    fn measurement_before_first_anchor_uses_last_observation() {
        let goals = GoalSet::new(vec![anchor(5, 1.0, 6.0, 1.0), anchor(10, 1.0, 11.0, 1.0)]).unwrap();
        let cfg = InterpConfig {
            epsilon: 0.05,
            beta: 0.5,
        };
        let m = goal_measurement_at(&goals, 2, Vec2::new(1.0, 1.0), &cfg).unwrap();
        assert!((m.mean - Vec2::new(1.0, 3.0)).norm() < 1e-12);
        assert!((m.cov.sxx - 0.43).abs() < 1e-12 && (m.cov.syy - 0.43).abs() < 1e-12);
        assert_eq!(m.cov.sxy, 0.0);
    }

    #[test]
    fn measurement_past_last_anchor_inflates() {
        let goals = GoalSet::new(vec![anchor(5, 1.0, 6.0, 1.0)]).unwrap();
        let m = goal_measurement_at(&goals, 8, Vec2::ZERO, &InterpConfig::default()).unwrap();
        assert_eq!(m.mean, Vec2::new(1.0, 6.0));
        assert_eq!(m.cov, Cov2::isotropic(1.0 + 0.5 * 3.0));
        assert!(goal_measurement_at(&goals, 0, Vec2::ZERO, &InterpConfig::default()).is_err());
    }

    #[test]
    fn goal_set_validation() {
        assert!(GoalSet::new(vec![]).is_err());
        assert!(GoalSet::new(vec![anchor(0, 0.0, 0.0, 1.0)]).is_err());
        assert!(GoalSet::new(vec![anchor(5, 0.0, 0.0, 1.0), anchor(5, 0.0, 0.0, 1.0)]).is_err());
    }

    #[test]
    fn measurement_continuous_at_anchors() {
        let goals = GoalSet::new(vec![
            anchor(3, 2.0, 0.5, 0.4),
            anchor(7, 9.0, -1.0, 2.0),
        ])
        .unwrap();
        let cfg = InterpConfig::default();
        // Linear pieces meet the anchor value as the fractional weight reaches 1 or 0.
        for a in goals.anchors() {
            let at = goal_measurement_at(&goals, a.step, Vec2::ZERO, &cfg).unwrap();
            assert_eq!(at.mean, a.gaussian.mean);
        }
        let left = goal_measurement_at(&goals, 6, Vec2::ZERO, &cfg).unwrap();
        let right = goal_measurement_at(&goals, 7, Vec2::ZERO, &cfg).unwrap();
        let slope = right.mean - goal_measurement_at(&goals, 5, Vec2::ZERO, &cfg).unwrap().mean;
        assert!(((right.mean - left.mean) * 2.0 - slope).norm() < 1e-12);
    }

    fn fitted_lane_model() -> GoalModelParams {
        let train = gen_synthetic(Scenario::Turn, 150, 0.1, 31).unwrap();
        fit_goal_model(&train, &Dataset::default(), &GoalFitConfig::default()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rotation_equivariance(alpha in -3.1f64..3.1, idx in 0usize..20) {
            let model = fitted_lane_model();
            let test = gen_synthetic(Scenario::Turn, 20, 0.1, 32).unwrap();
            let h = &test.segments[idx].history;
            let pivot = Vec2::new(-40.0, 12.0);
            let rotated: Vec<Vec2> = h.iter().map(|p| pivot + (*p - pivot).rotate(alpha)).collect();
            let a = model.predict_goals(h).unwrap();
            let b = model.predict_goals(&rotated).unwrap();
            for (ga, gb) in a.anchors().iter().zip(b.anchors()) {
                let expected = rotated[15] + (ga.gaussian.mean - h[15]).rotate(alpha);
                prop_assert!((gb.gaussian.mean - expected).norm() < 1e-9);
            }
        }

        #[test]
        fn translation_equivariance(tx in -1e3f64..1e3, ty in -1e3f64..1e3, idx in 0usize..20) {
            let model = fitted_lane_model();
            let test = gen_synthetic(Scenario::Turn, 20, 0.1, 33).unwrap();
            let h = &test.segments[idx].history;
            let t = Vec2::new(tx, ty);
            let shifted: Vec<Vec2> = h.iter().map(|p| *p + t).collect();
            let a = model.predict_goals(h).unwrap();
            let b = model.predict_goals(&shifted).unwrap();
            for (ga, gb) in a.anchors().iter().zip(b.anchors()) {
                prop_assert!((gb.gaussian.mean - (ga.gaussian.mean + t)).norm() < 1e-9);
            }
        }

        #[test]
        fn interpolated_cov_is_psd(k in 1usize..40, eps in 1e-3f64..1.0, beta in 0.0f64..2.0) {
            let goals = GoalSet::new(vec![
                GoalAnchor { step: 5, gaussian: Gaussian2D::new(Vec2::new(1.0, 0.0), 0.3, 2.0, 0.9).unwrap() },
                GoalAnchor { step: 12, gaussian: Gaussian2D::new(Vec2::new(8.0, 1.0), 3.0, 0.2, -0.95).unwrap() },
                GoalAnchor { step: 25, gaussian: Gaussian2D::new(Vec2::new(20.0, 3.0), 1.0, 1.0, 0.0).unwrap() },
            ]).unwrap();
            let m = goal_measurement_at(&goals, k, Vec2::ZERO, &InterpConfig { epsilon: eps, beta }).unwrap();
            prop_assert!(is_psd(&m.cov, 0.0));
        }
    }

    #[test]
    fn exact_translation_with_dyadic_coordinates() {
        let model = zero_model(3, &[1]);
        let mut m = model.clone();
        m.anchors[0].weights = vec![[0.5, 0.25], [1.0, -0.5], [0.75, 0.0], [2.0, 1.0]];
        m.rotate = false;
        let h = [Vec2::new(0.5, 0.25), Vec2::new(1.0, 0.75), Vec2::new(2.0, 1.0)];
        let t = Vec2::new(64.0, -32.0);
        let shifted: Vec<Vec2> = h.iter().map(|p| *p + t).collect();
        let a = m.predict_goals(&h).unwrap().anchors()[0].gaussian.mean;
        let b = m.predict_goals(&shifted).unwrap().anchors()[0].gaussian.mean;
        assert_eq!(b, a + t);
    }
}
