//! Recursive least squares fusion of a rollout prior with a pseudo-measurement.
//!
//! The update is the classical gain form
//!
//! ```text
//! K  = P Hᵀ (H P Hᵀ + R)⁻¹
//! x' = x + K (z − H x)
//! P' = (I − K H) P
//! ```
//!
//! [`fuse`] fixes `H = I`. [`info_fuse`] computes the same posterior through
//! the precision-weighted product of the two Gaussians and exists as an
//! independent cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{is_psd, Cov2, Gaussian2D, Mat2, Vec2, PSD_TOL};

/// Innovation determinant threshold, relative to `max(1, trace²)`.
pub const SINGULARITY_REL: f64 = 1e-15;

/// A mean with its covariance. Used for both the rollout prior and the goal
/// pseudo-measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: Vec2,
    pub cov: Cov2,
}

impl Estimate {
    pub fn new(mean: Vec2, cov: Cov2) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::domain("estimate mean must be finite"));
        }
        if !is_psd(&cov, PSD_TOL) {
            return Err(Error::domain(format!(
                "estimate covariance is not PSD: {cov:?}"
            )));
        }
        Ok(Estimate { mean, cov })
    }

    pub fn to_gaussian(&self) -> Result<Gaussian2D> {
        Gaussian2D::from_cov(self.mean, self.cov)
    }
}

impl From<Gaussian2D> for Estimate {
    fn from(g: Gaussian2D) -> Self {
        Estimate {
            mean: g.mean,
            cov: g.cov(),
        }
    }
}

/// Observation matrix `H` mapping state to measurement space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationMatrix(pub Mat2);

impl ObservationMatrix {
    pub const IDENTITY: ObservationMatrix = ObservationMatrix(Mat2::IDENTITY);

    pub fn new(h11: f64, h12: f64, h21: f64, h22: f64) -> Result<Self> {
        let m = Mat2::new(h11, h12, h21, h22);
        if !m.is_finite() {
            return Err(Error::domain("observation matrix entries must be finite"));
        }
        Ok(ObservationMatrix(m))
    }
}

/// Gain matrix `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain(pub Mat2);

impl Gain {
    /// Real parts of the eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        self.0.eigenvalues_real()
    }
}

/// `K = P Hᵀ (H P Hᵀ + R)⁻¹`.
pub fn rls_gain(prior_cov: Cov2, meas_cov: Cov2, h: ObservationMatrix) -> Result<Gain> {
    let h = h.0;
    let p = prior_cov.as_mat();
    let innovation = (h * p * h.transpose()).symmetrize() + meas_cov;
    let det = innovation.det();
    let tr = innovation.trace();
    let threshold = SINGULARITY_REL * f64::max(1.0, tr * tr);
    if !(det > threshold) {
        return Err(Error::Singular { det, threshold });
    }
    // det > threshold > 0, so the inverse exists.
    let s_inv = innovation.inverse().expect("checked determinant");
    Ok(Gain(p * h.transpose() * s_inv.as_mat()))
}

/// One gain-form update of `prior` by `measurement` through `h`.
pub fn rls_update(prior: &Estimate, measurement: &Estimate, h: ObservationMatrix) -> Result<Estimate> {
    let k = rls_gain(prior.cov, measurement.cov, h)?;
    let innovation = measurement.mean - h.0.mul_vec(prior.mean);
    let mean = prior.mean + k.0.mul_vec(innovation);
    let cov = ((Mat2::IDENTITY - k.0 * h.0) * prior.cov.as_mat()).symmetrize();
    Ok(Estimate { mean, cov })
}

/// Gain-form fusion with `H = I`.
pub fn fuse(prior: &Estimate, measurement: &Estimate) -> Result<Estimate> {
    rls_update(prior, measurement, ObservationMatrix::IDENTITY)
}

/// Precision-weighted fusion: `Σ' = (P⁻¹ + R⁻¹)⁻¹`, `μ' = Σ'(P⁻¹x + R⁻¹z)`.
pub fn info_fuse(prior: &Estimate, measurement: &Estimate) -> Result<Estimate> {
    let p_inv = prior
        .cov
        .inverse()
        .ok_or_else(|| Error::domain("prior covariance is singular"))?;
    let r_inv = measurement
        .cov
        .inverse()
        .ok_or_else(|| Error::domain("measurement covariance is singular"))?;
    let cov = (p_inv + r_inv)
        .inverse()
        .ok_or_else(|| Error::domain("summed information matrix is singular"))?;
    let info_mean = p_inv.mul_vec(prior.mean) + r_inv.mul_vec(measurement.mean);
    Ok(Estimate {
        mean: cov.mul_vec(info_mean),
        cov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn est(x: f64, y: f64, c: Cov2) -> Estimate {
        Estimate::new(Vec2::new(x, y), c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * f64::max(1.0, a.abs().max(b.abs()))
    }

    #[test]
    fn gain_examples() {
        let k = rls_gain(Cov2::IDENTITY, Cov2::IDENTITY, ObservationMatrix::IDENTITY).unwrap();
        assert_eq!(k.0, Mat2::diag(0.5, 0.5));
        let k = rls_gain(Cov2::ZERO, Cov2::IDENTITY, ObservationMatrix::IDENTITY).unwrap();
        assert_eq!(k.0, Mat2::ZERO);
        let k = rls_gain(Cov2::diag(4.0, 1.0), Cov2::IDENTITY, ObservationMatrix::IDENTITY).unwrap();
        assert!((k.0.m11 - 0.8).abs() < 1e-15 && (k.0.m22 - 0.5).abs() < 1e-15);
        assert_eq!((k.0.m12, k.0.m21), (0.0, 0.0));
    }

    #[test]
    fn gain_singular_when_both_degenerate() {
        let p = Cov2::diag(1.0, 0.0);
        let r = Cov2::diag(1.0, 0.0);
        assert!(matches!(
            rls_gain(p, r, ObservationMatrix::IDENTITY),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn update_examples() {
        let post = fuse(&est(0.0, 0.0, Cov2::IDENTITY), &est(2.0, 0.0, Cov2::IDENTITY)).unwrap();
        assert_eq!(post.mean, Vec2::new(1.0, 0.0));
        assert_eq!(post.cov, Cov2::isotropic(0.5));

        let prior = est(1.0, 1.0, Cov2::diag(4.0, 1.0));
        let post = fuse(&prior, &est(5.0, 1.0, Cov2::IDENTITY)).unwrap();
        assert!((post.mean.x - 4.2).abs() < 1e-12 && (post.mean.y - 1.0).abs() < 1e-15);
        assert!((post.cov.sxx - 0.8).abs() < 1e-12 && (post.cov.syy - 0.5).abs() < 1e-12);
        assert_eq!(post.cov.sxy, 0.0);
    }

    #[test]
    fn zero_innovation_keeps_mean() {
        let prior = est(3.0, -2.0, Cov2::new(2.0, 0.3, 1.0));
        let meas = est(3.0, -2.0, Cov2::new(0.5, -0.1, 0.7));
        assert_eq!(fuse(&prior, &meas).unwrap().mean, prior.mean);
    }

    #[test]
    fn axis_swap_observation() {
        // z observes (y, x). Prior diag(4, 1), R = I, z = (1, 5).
        let h = ObservationMatrix::new(0.0, 1.0, 1.0, 0.0).unwrap();
        let prior = est(1.0, 1.0, Cov2::diag(4.0, 1.0));
        let post = rls_update(&prior, &est(1.0, 5.0, Cov2::IDENTITY), h).unwrap();
        // x is observed through z.y with gain 4/5, y through z.x (zero innovation).
        assert!((post.mean.x - 4.2).abs() < 1e-12);
        assert!((post.mean.y - 1.0).abs() < 1e-12);
        assert!((post.cov.sxx - 0.8).abs() < 1e-12);
        assert!((post.cov.syy - 0.5).abs() < 1e-12);
    }

    #[test]
    fn info_form_examples() {
        let post = info_fuse(&est(0.0, 0.0, Cov2::IDENTITY), &est(2.0, 0.0, Cov2::IDENTITY)).unwrap();
        assert_eq!(post.mean, Vec2::new(1.0, 0.0));
        assert_eq!(post.cov, Cov2::isotropic(0.5));
        let post = info_fuse(
            &est(0.0, 0.0, Cov2::diag(4.0, 1.0)),
            &est(0.0, 0.0, Cov2::IDENTITY),
        )
        .unwrap();
        assert!((post.cov.sxx - 0.8).abs() < 1e-12 && (post.cov.syy - 0.5).abs() < 1e-12);
        assert!(info_fuse(&est(0.0, 0.0, Cov2::ZERO), &est(0.0, 0.0, Cov2::IDENTITY)).is_err());
    }

    #[test]
    fn limits() {
        let prior = est(1.0, 2.0, Cov2::new(2.0, 0.5, 1.0));
        let meas = est(-4.0, 7.0, Cov2::new(1.0, -0.2, 3.0));

        let far = Estimate { cov: meas.cov.scale(1e12), ..meas };
        let post = fuse(&prior, &far).unwrap();
        assert!(close(post.mean.x, prior.mean.x, 1e-6) && close(post.mean.y, prior.mean.y, 1e-6));
        assert!(close(post.cov.sxx, prior.cov.sxx, 1e-6));

        let certain_prior = Estimate { cov: prior.cov.scale(1e-12), ..prior };
        let post = fuse(&certain_prior, &meas).unwrap();
        assert!((post.mean - prior.mean).norm() < 1e-9);

        let exact = Estimate { cov: meas.cov.scale(1e-12), ..meas };
        let post = fuse(&prior, &exact).unwrap();
        assert!((post.mean - meas.mean).norm() < 1e-9);
    }

    fn pd_cov() -> impl Strategy<Value = Cov2> {
        (0.05f64..10.0, 0.05f64..10.0, -0.95f64..0.95)
            .prop_map(|(a, b, r)| crate::gaussian::cov_from_params(a, b, r).unwrap())
    }

    fn estimate() -> impl Strategy<Value = Estimate> {
        (-50.0f64..50.0, -50.0f64..50.0, pd_cov()).prop_map(|(x, y, c)| est(x, y, c))
    }

    proptest! {
        #[test]
        fn commutative(a in estimate(), b in estimate()) {
            let ab = fuse(&a, &b).unwrap();
            let ba = fuse(&b, &a).unwrap();
            prop_assert!(close(ab.mean.x, ba.mean.x, 1e-12) && close(ab.mean.y, ba.mean.y, 1e-12));
            prop_assert!(close(ab.cov.sxx, ba.cov.sxx, 1e-12));
            prop_assert!(close(ab.cov.sxy, ba.cov.sxy, 1e-12));
            prop_assert!(close(ab.cov.syy, ba.cov.syy, 1e-12));
        }

        #[test]
        fn gain_spectrum_in_unit_interval(a in pd_cov(), b in pd_cov()) {
            let k = rls_gain(a, b, ObservationMatrix::IDENTITY).unwrap();
            let (lo, hi) = k.eigenvalues();
            prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        }

        #[test]
        fn posterior_never_exceeds_inputs(a in estimate(), b in estimate()) {
            let post = fuse(&a, &b).unwrap();
            prop_assert!((a.cov - post.cov).eigenvalues().0 >= -1e-12);
            prop_assert!((b.cov - post.cov).eigenvalues().0 >= -1e-12);
        }

        #[test]
        fn isotropic_fusion_is_convex(
            a in (-50.0f64..50.0, -50.0f64..50.0, 0.01f64..10.0),
            b in (-50.0f64..50.0, -50.0f64..50.0, 0.01f64..10.0),
        ) {
            let pa = est(a.0, a.1, Cov2::isotropic(a.2));
            let pb = est(b.0, b.1, Cov2::isotropic(b.2));
            let post = fuse(&pa, &pb).unwrap();
            let w = a.2 / (a.2 + b.2);
            let expected = pa.mean + (pb.mean - pa.mean) * w;
            prop_assert!((post.mean - expected).norm() < 1e-9);
        }
    }
}
