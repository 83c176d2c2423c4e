//! Goal-point refinement of rollout trajectory predictors.
//!
//! A rollout predictor forecasts a trajectory one step at a time, feeding each
//! prediction back as input, so its errors accumulate with the horizon. This
//! crate corrects each step with a recursive least squares update against a
//! pseudo-measurement derived from goal points. The goal points are Gaussian
//! predictions of where the agent will be at a few future steps, and they are
//! made once per trajectory from the observed history.
//!
//! Module map:
//!
//! * [`gaussian`]: 2-D positions, covariances, `N(x, y, σx, σy, ρ)`;
//! * [`fusion`]: gain-form update and its information-form oracle;
//! * [`goal`]: goal-point regression and per-step pseudo-measurements;
//! * [`rollout`]: cv / ca / ar backbones, vanilla and refined rollouts;
//! * [`data`]: NGSIM ingestion, synthetic corpora, JSONL, splits;
//! * [`eval`]: RMSE metrics and the ablation runner;
//! * [`lsq`]: ridge and recursive least squares solvers.
//!
//! ```
//! use rls_refine::fusion::{fuse, Estimate};
//! use rls_refine::gaussian::{Cov2, Vec2};
//!
//! let rollout = Estimate::new(Vec2::new(0.0, 0.0), Cov2::IDENTITY)?;
//! let goal = Estimate::new(Vec2::new(2.0, 0.0), Cov2::IDENTITY)?;
//! let refined = fuse(&rollout, &goal)?;
//! assert_eq!(refined.mean, Vec2::new(1.0, 0.0));
//! assert_eq!(refined.cov, Cov2::isotropic(0.5));
//! # Ok::<(), rls_refine::Error>(())
//! ```

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod gaussian;
pub mod goal;
pub mod lsq;
pub mod rollout;

pub use error::{Error, Result};
