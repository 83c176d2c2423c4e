//! Bivariate Gaussian primitives.
//!
//! Positions are [`Vec2`] in meters. Covariances are stored as the three free
//! entries of a symmetric 2×2 matrix ([`Cov2`]); the `(σx, σy, ρ)` form used
//! for I/O lives in [`Gaussian2D`] and the two conversion functions
//! [`cov_from_params`] / [`params_from_cov`].

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for positive-semidefinite checks.
pub const PSD_TOL: f64 = 1e-9;

/// A 2-D position or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Counter-clockwise rotation by `angle` radians about the origin.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// General (not necessarily symmetric) 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, b)
    }

    /// Rotation matrix for a counter-clockwise angle in radians.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Inverse, or `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.m22 / d,
            -self.m12 / d,
            -self.m21 / d,
            self.m11 / d,
        ))
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m11 * v.x + self.m12 * v.y,
            self.m21 * v.x + self.m22 * v.y,
        )
    }

    /// Real parts of the two eigenvalues, ascending.
    pub fn eigenvalues_real(&self) -> (f64, f64) {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        let r = disc.max(0.0).sqrt();
        (half_tr - r, half_tr + r)
    }

    /// `(M + Mᵀ) / 2` as a covariance.
    pub fn symmetrize(&self) -> Cov2 {
        Cov2::new(self.m11, 0.5 * (self.m12 + self.m21), self.m22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 + o.m11,
            self.m12 + o.m12,
            self.m21 + o.m21,
            self.m22 + o.m22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - o.m11,
            self.m12 - o.m12,
            self.m21 - o.m21,
            self.m22 - o.m22,
        )
    }
}

/// Symmetric 2×2 covariance in m², stored by its three free entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cov2 {
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

impl Cov2 {
    pub const IDENTITY: Cov2 = Cov2::new(1.0, 0.0, 1.0);
    pub const ZERO: Cov2 = Cov2::new(0.0, 0.0, 0.0);

    pub const fn new(sxx: f64, sxy: f64, syy: f64) -> Self {
        Cov2 { sxx, sxy, syy }
    }

    pub fn diag(sxx: f64, syy: f64) -> Self {
        Cov2::new(sxx, 0.0, syy)
    }

    pub fn isotropic(var: f64) -> Self {
        Cov2::new(var, 0.0, var)
    }

    pub fn det(&self) -> f64 {
        self.sxx * self.syy - self.sxy * self.sxy
    }

    pub fn trace(&self) -> f64 {
        self.sxx + self.syy
    }

    pub fn is_finite(&self) -> bool {
        self.sxx.is_finite() && self.sxy.is_finite() && self.syy.is_finite()
    }

    pub fn scale(&self, s: f64) -> Cov2 {
        Cov2::new(self.sxx * s, self.sxy * s, self.syy * s)
    }

    pub fn as_mat(&self) -> Mat2 {
        Mat2::new(self.sxx, self.sxy, self.sxy, self.syy)
    }

    pub fn inverse(&self) -> Option<Cov2> {
        let d = self.det();
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        Some(Cov2::new(self.syy / d, -self.sxy / d, self.sxx / d))
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        self.as_mat().mul_vec(v)
    }

    /// Eigenvalues, ascending. Exact closed form for the symmetric case.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * self.trace();
        let half_diff = 0.5 * (self.sxx - self.syy);
        let r = half_diff.hypot(self.sxy);
        (half_tr - r, half_tr + r)
    }

    /// `R C Rᵀ` for a rotation by `angle` radians.
    pub fn rotate(&self, angle: f64) -> Cov2 {
        let r = Mat2::rotation(angle);
        (r * self.as_mat() * r.transpose()).symmetrize()
    }
}

impl Add for Cov2 {
    type Output = Cov2;
    fn add(self, o: Cov2) -> Cov2 {
        Cov2::new(self.sxx + o.sxx, self.sxy + o.sxy, self.syy + o.syy)
    }
}

impl Sub for Cov2 {
    type Output = Cov2;
    fn sub(self, o: Cov2) -> Cov2 {
        Cov2::new(self.sxx - o.sxx, self.sxy - o.sxy, self.syy - o.syy)
    }
}

impl Mul<f64> for Cov2 {
    type Output = Cov2;
    fn mul(self, s: f64) -> Cov2 {
        self.scale(s)
    }
}

/// Bivariate Gaussian `N(x, y, σx, σy, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian2D {
    pub mean: Vec2,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub rho: f64,
}

impl Gaussian2D {
    pub fn new(mean: Vec2, sigma_x: f64, sigma_y: f64, rho: f64) -> Result<Self> {
        check_params(sigma_x, sigma_y, rho)?;
        if !mean.is_finite() {
            return Err(Error::domain("mean must be finite"));
        }
        Ok(Gaussian2D {
            mean,
            sigma_x,
            sigma_y,
            rho,
        })
    }

    /// Builds a Gaussian from a positive-definite covariance.
    pub fn from_cov(mean: Vec2, cov: Cov2) -> Result<Self> {
        let (sx, sy, rho) = params_from_cov(cov)?;
        Gaussian2D::new(mean, sx, sy, rho)
    }

    pub fn standard() -> Self {
        Gaussian2D {
            mean: Vec2::ZERO,
            sigma_x: 1.0,
            sigma_y: 1.0,
            rho: 0.0,
        }
    }

    pub fn cov(&self) -> Cov2 {
        Cov2::new(
            self.sigma_x * self.sigma_x,
            self.rho * self.sigma_x * self.sigma_y,
            self.sigma_y * self.sigma_y,
        )
    }

    pub fn log_density(&self, p: Vec2) -> f64 {
        log_density(self, p)
    }
}

fn check_params(sigma_x: f64, sigma_y: f64, rho: f64) -> Result<()> {
    if !(sigma_x > 0.0 && sigma_x.is_finite()) {
        return Err(Error::domain(format!("sigma_x must be > 0, got {sigma_x}")));
    }
    if !(sigma_y > 0.0 && sigma_y.is_finite()) {
        return Err(Error::domain(format!("sigma_y must be > 0, got {sigma_y}")));
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("|rho| must be < 1, got {rho}")));
    }
    Ok(())
}

/// Covariance `[[σx², ρσxσy], [ρσxσy, σy²]]`.
pub fn cov_from_params(sigma_x: f64, sigma_y: f64, rho: f64) -> Result<Cov2> {
    check_params(sigma_x, sigma_y, rho)?;
    Ok(Cov2::new(
        sigma_x * sigma_x,
        rho * sigma_x * sigma_y,
        sigma_y * sigma_y,
    ))
}

/// Inverse of [`cov_from_params`]; requires a positive-definite input.
pub fn params_from_cov(c: Cov2) -> Result<(f64, f64, f64)> {
    if !c.is_finite() {
        return Err(Error::domain("covariance must be finite"));
    }
    if c.sxx <= 0.0 || c.syy <= 0.0 {
        return Err(Error::domain(format!(
            "covariance diagonal must be positive (sxx = {}, syy = {})",
            c.sxx, c.syy
        )));
    }
    if c.det() <= 0.0 {
        return Err(Error::domain(format!(
            "covariance is not positive definite (det = {:e})",
            c.det()
        )));
    }
    let sx = c.sxx.sqrt();
    let sy = c.syy.sqrt();
    let rho = c.sxy / (sx * sy);
    // det > 0 implies |rho| < 1 mathematically; rounding can land on the boundary.
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("correlation {rho} out of (-1, 1)")));
    }
    Ok((sx, sy, rho))
}

/// Positive-semidefinite test with relative tolerance on the determinant.
pub fn is_psd(c: &Cov2, tol: f64) -> bool {
    if !c.is_finite() {
        return false;
    }
    c.sxx >= -tol && c.syy >= -tol && c.det() >= -tol * f64::max(1.0, c.sxx * c.syy)
}

/// Log-density in nats.
pub fn log_density(g: &Gaussian2D, p: Vec2) -> f64 {
    let one_m_rho2 = 1.0 - g.rho * g.rho;
    let zx = (p.x - g.mean.x) / g.sigma_x;
    let zy = (p.y - g.mean.y) / g.sigma_y;
    let quad = (zx * zx - 2.0 * g.rho * zx * zy + zy * zy) / one_m_rho2;
    -(2.0 * PI).ln() - (g.sigma_x * g.sigma_y).ln() - 0.5 * one_m_rho2.ln() - 0.5 * quad
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cov_from_params_examples() {
        assert_eq!(cov_from_params(1.0, 2.0, 0.0).unwrap(), Cov2::new(1.0, 0.0, 4.0));
        assert_eq!(cov_from_params(1.0, 1.0, 0.5).unwrap(), Cov2::new(1.0, 0.5, 1.0));
        assert_eq!(
            cov_from_params(2.0, 3.0, -0.25).unwrap(),
            Cov2::new(4.0, -1.5, 9.0)
        );
    }

    #[test]
    fn cov_from_params_rejects_bad_domain() {
        assert!(cov_from_params(0.0, 1.0, 0.0).is_err());
        assert!(cov_from_params(1.0, -1.0, 0.0).is_err());
        assert!(cov_from_params(1.0, 1.0, 1.0).is_err());
        assert!(cov_from_params(1.0, 1.0, -1.0).is_err());
        assert!(cov_from_params(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn params_from_cov_examples() {
        assert_eq!(params_from_cov(Cov2::new(1.0, 0.0, 4.0)).unwrap(), (1.0, 2.0, 0.0));
        assert_eq!(
            params_from_cov(Cov2::new(4.0, -1.5, 9.0)).unwrap(),
            (2.0, 3.0, -0.25)
        );
        assert!(matches!(
            params_from_cov(Cov2::new(1.0, 1.001, 1.0)),
            Err(Error::Domain(_))
        ));
        assert!(params_from_cov(Cov2::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn is_psd_examples() {
        assert!(is_psd(&Cov2::IDENTITY, 0.0));
        assert!(!is_psd(&Cov2::new(1.0, 2.0, 1.0), 1e-9));
        assert!(is_psd(&Cov2::ZERO, 0.0));
        assert!(!is_psd(&Cov2::new(-1.0, 0.0, 1.0), 1e-9));
    }

    #[test]
    fn log_density_closed_form() {
        let g = Gaussian2D::standard();
        let ln2pi = (2.0 * PI).ln();
        assert!((log_density(&g, Vec2::ZERO) + ln2pi).abs() < 1e-12);
        assert!((log_density(&g, Vec2::ZERO) - (-1.8378770664)).abs() < 1e-10);
        assert!((log_density(&g, Vec2::new(1.0, 0.0)) - (-ln2pi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn log_density_integrates_to_one() {
        // Midpoint quadrature on [-8, 8]^2.
        let g = Gaussian2D::new(Vec2::new(0.3, -0.2), 1.2, 0.8, 0.4).unwrap();
        let n = 800;
        let h = 16.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let x = -8.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -8.0 + (j as f64 + 0.5) * h;
                total += log_density(&g, Vec2::new(x, y)).exp();
            }
        }
        total *= h * h;
        assert!((total - 1.0).abs() < 1e-3, "integral = {total}");
    }

    #[test]
    fn rotate_preserves_spectrum() {
        let c = Cov2::new(4.0, 1.0, 2.0);
        let r = c.rotate(0.7);
        let (a, b) = c.eigenvalues();
        let (ra, rb) = r.eigenvalues();
        assert!((a - ra).abs() < 1e-12 && (b - rb).abs() < 1e-12);
        assert!((r.rotate(-0.7).sxy - c.sxy).abs() < 1e-12);
    }

    fn params() -> impl Strategy<Value = (f64, f64, f64)> {
        (1e-3f64..1e3, 1e-3f64..1e3, -0.999f64..0.999)
    }

    proptest! {
        #[test]
        fn cov_is_positive_definite((sx, sy, rho) in params()) {
            let c = cov_from_params(sx, sy, rho).unwrap();
            prop_assert!(c.det() > 0.0);
            prop_assert!(is_psd(&c, 0.0));
        }

        #[test]
        fn params_round_trip((sx, sy, rho) in params()) {
            let (a, b, r) = params_from_cov(cov_from_params(sx, sy, rho).unwrap()).unwrap();
            prop_assert!((a - sx).abs() <= 1e-12 * sx.max(1.0));
            prop_assert!((b - sy).abs() <= 1e-12 * sy.max(1.0));
            prop_assert!((r - rho).abs() <= 1e-12);
        }

        #[test]
        fn density_peaks_at_mean(
            (sx, sy, rho) in params(),
            mx in -100.0f64..100.0, my in -100.0f64..100.0,
            dx in -10.0f64..10.0, dy in -10.0f64..10.0,
        ) {
            let g = Gaussian2D::new(Vec2::new(mx, my), sx, sy, rho).unwrap();
            let at_mean = log_density(&g, g.mean);
            prop_assert!(at_mean >= log_density(&g, g.mean + Vec2::new(dx, dy)));
        }
    }
}
