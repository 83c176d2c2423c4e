//! Least-squares solvers shared by the goal model and the autoregressive
//! backbone: batch ridge regression through the normal equations, and the
//! recursive form with exponential forgetting.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Smallest admissible eigenvalue of an unregularized `XᵀX`, relative to the largest.
const RANK_TOL: f64 = 1e-12;

/// Accumulated `XᵀX` and `XᵀY` for a multi-output linear regression.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    xtx: DMatrix<f64>,
    xty: DMatrix<f64>,
    samples: usize,
}

impl NormalEquations {
    pub fn new(features: usize, outputs: usize) -> Self {
        NormalEquations {
            xtx: DMatrix::zeros(features, features),
            xty: DMatrix::zeros(features, outputs),
            samples: 0,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn add(&mut self, x: &[f64], y: &[f64]) {
        self.add_weighted(x, y, 1.0);
    }

    pub fn add_weighted(&mut self, x: &[f64], y: &[f64], weight: f64) {
        debug_assert_eq!(x.len(), self.xtx.nrows());
        debug_assert_eq!(y.len(), self.xty.ncols());
        let d = x.len();
        for i in 0..d {
            let wxi = weight * x[i];
            if wxi == 0.0 {
                continue;
            }
            for (j, xj) in x.iter().enumerate() {
                self.xtx[(i, j)] += wxi * xj;
            }
            for (k, yk) in y.iter().enumerate() {
                self.xty[(i, k)] += wxi * yk;
            }
        }
        self.samples += 1;
    }

    /// Solves `(XᵀX + λI) W = XᵀY`; the result is `features × outputs`.
    pub fn solve(&self, ridge: f64) -> Result<DMatrix<f64>> {
        if !(ridge >= 0.0) {
            return Err(Error::Config(format!("ridge lambda must be >= 0, got {ridge}")));
        }
        if self.samples == 0 {
            return Err(Error::EmptyData("no samples in least-squares system".into()));
        }
        let d = self.xtx.nrows();
        let a = &self.xtx + DMatrix::identity(d, d) * ridge;
        if ridge == 0.0 {
            let eig = SymmetricEigen::new(a.clone());
            let max = eig.eigenvalues.max();
            let min = eig.eigenvalues.min();
            if !(min > RANK_TOL * max.max(f64::MIN_POSITIVE)) {
                return Err(Error::SingularSystem(format!(
                    "{d}×{d} normal matrix has eigenvalue range [{min:e}, {max:e}] ({} samples)",
                    self.samples
                )));
            }
        }
        let chol = a
            .cholesky()
            .ok_or_else(|| Error::SingularSystem("normal matrix not positive definite".into()))?;
        Ok(chol.solve(&self.xty))
    }
}

/// Recursive least squares with forgetting factor.
///
/// Minimizes `Σᵢ λ^(n−i) ‖yᵢ − Wᵀxᵢ‖² + λⁿ δ ‖W‖²` after `n` updates, where
/// `δ` is the initial information (`P₀ = δ⁻¹ I`).
#[derive(Debug, Clone)]
pub struct RecursiveLeastSquares {
    weights: DMatrix<f64>,
    p: DMatrix<f64>,
    forgetting: f64,
    updates: usize,
}

impl RecursiveLeastSquares {
    pub fn new(features: usize, outputs: usize, delta: f64, forgetting: f64) -> Result<Self> {
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::Config(format!(
                "forgetting factor must lie in (0, 1], got {forgetting}"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("initial information must be > 0, got {delta}")));
        }
        Ok(RecursiveLeastSquares {
            weights: DMatrix::zeros(features, outputs),
            p: DMatrix::identity(features, features) / delta,
            forgetting,
            updates: 0,
        })
    }

    pub fn update(&mut self, x: &[f64], y: &[f64]) {
        let x = DVector::from_column_slice(x);
        let px = &self.p * &x;
        let denom = self.forgetting + x.dot(&px);
        let gain = px / denom;
        let pred = self.weights.tr_mul(&x);
        let err = DVector::from_column_slice(y) - pred;
        self.weights += &gain * err.transpose();
        let pxt = self.p.tr_mul(&x);
        self.p = (&self.p - &gain * pxt.transpose()) / self.forgetting;
        // keep P symmetric against rounding drift
        self.p = (&self.p + self.p.transpose()) * 0.5;
        self.updates += 1;
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn updates(&self) -> usize {
        self.updates
    }
}

/// Runs the recursion over a stream of `(features, targets)` pairs and
/// returns the final `features × outputs` weight matrix.
pub fn fit_ar_rls<'a, I>(
    samples: I,
    features: usize,
    outputs: usize,
    delta: f64,
    forgetting: f64,
) -> Result<DMatrix<f64>>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let mut rls = RecursiveLeastSquares::new(features, outputs, delta, forgetting)?;
    for (x, y) in samples {
        if x.len() != features {
            return Err(Error::Dimension {
                expected: features,
                got: x.len(),
            });
        }
        if y.len() != outputs {
            return Err(Error::Dimension {
                expected: outputs,
                got: y.len(),
            });
        }
        rls.update(x, y);
    }
    Ok(rls.weights)
}
