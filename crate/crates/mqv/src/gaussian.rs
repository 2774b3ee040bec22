//! Single-mode Gaussian phase-space algebra in SI units.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::params::HBAR;

/// Plain 2x2 matrix, row major.
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Symmetric 2x2 covariance over (x, p).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cov2 {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

impl Cov2 {
    pub const fn new(xx: f64, xp: f64, pp: f64) -> Self {
        Cov2 { xx, xp, pp }
    }

    pub const fn diag(xx: f64, pp: f64) -> Self {
        Cov2 { xx, xp: 0.0, pp }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.xx, self.xp], [self.xp, self.pp]]
    }

    /// Symmetric part of `m`.
    pub fn from_matrix(m: &Mat2) -> Self {
        Cov2 {
            xx: m[0][0],
            xp: 0.5 * (m[0][1] + m[1][0]),
            pp: m[1][1],
        }
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.xx - self.pp);
        let r = half_diff.hypot(self.xp);
        (mean - r, mean + r)
    }

    /// Angle of the major axis from the x axis, in (-pi/2, pi/2].
    pub fn major_axis_angle(&self) -> f64 {
        0.5 * (2.0 * self.xp).atan2(self.xx - self.pp)
    }

    /// Positive semidefinite up to `1e-12 * trace`.
    pub fn check_psd(&self) -> Result<()> {
        if !(self.xx.is_finite() && self.xp.is_finite() && self.pp.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let (lo, _) = self.eigenvalues();
        let tol = 1e-12 * self.trace().abs();
        if lo < -tol {
            return Err(Error::InvalidCovariance(format!(
                "smallest eigenvalue {lo:e} below tolerance -{tol:e}"
            )));
        }
        Ok(())
    }

    /// Congruence `M^T V M`.
    pub fn congruence(&self, m: &Mat2) -> Cov2 {
        let v = self.matrix();
        Cov2::from_matrix(&mat_mul(&transpose(m), &mat_mul(&v, m)))
    }

    /// Variance of `x cos(zeta) + y sin(zeta)` where `y = p * (x_scale / p_scale)`,
    /// i.e. the rotated quadrature in units where both axes are commensurate.
    pub fn quadrature_variance(&self, zeta: f64) -> f64 {
        let (s, c) = zeta.sin_cos();
        self.xx * c * c + 2.0 * self.xp * c * s + self.pp * s * s
    }

    /// Entries divided by the zero-point scales.
    pub fn normalized(&self, dx: f64, dp: f64) -> Cov2 {
        Cov2 {
            xx: self.xx / (dx * dx),
            xp: self.xp / (dx * dp),
            pp: self.pp / (dp * dp),
        }
    }

    pub fn denormalized(&self, dx: f64, dp: f64) -> Cov2 {
        Cov2 {
            xx: self.xx * dx * dx,
            xp: self.xp * dx * dp,
            pp: self.pp * dp * dp,
        }
    }
}

impl Add for Cov2 {
    type Output = Cov2;
    fn add(self, o: Cov2) -> Cov2 {
        Cov2::new(self.xx + o.xx, self.xp + o.xp, self.pp + o.pp)
    }
}

impl Mul<Cov2> for f64 {
    type Output = Cov2;
    fn mul(self, c: Cov2) -> Cov2 {
        Cov2::new(self * c.xx, self * c.xp, self * c.pp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaussianState {
    /// (x, p)
    pub mean: [f64; 2],
    pub cov: Cov2,
}

impl GaussianState {
    pub fn centered(cov: Cov2) -> Self {
        GaussianState { mean: [0.0; 2], cov }
    }

    /// Ground state of an oscillator with zero-point scales `dx`, `dp`.
    pub fn heisenberg(dx: f64, dp: f64) -> Self {
        Self::centered(Cov2::diag(dx * dx, dp * dp))
    }

    /// True when `det V >= hbar^2/4` up to rounding.
    pub fn is_physical(&self) -> bool {
        self.cov.det() >= HBAR * HBAR / 4.0 * (1.0 - 1e-9)
    }
}

/// Added-noise or reconstruction ellipse; strictly positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseEllipse {
    pub cov: Cov2,
}

impl NoiseEllipse {
    pub fn new(cov: Cov2) -> Result<Self> {
        cov.check_psd()?;
        if cov.det() <= 0.0 {
            return Err(Error::DegenerateState { det: cov.det() });
        }
        Ok(NoiseEllipse { cov })
    }

    /// The zero ellipse, an identity filter for [`convolve`].
    pub fn zero() -> Self {
        NoiseEllipse { cov: Cov2::default() }
    }
}

pub fn wigner(state: &GaussianState, x: f64, p: f64) -> Result<f64> {
    let det = state.cov.det();
    if !(det > 0.0) {
        return Err(Error::DegenerateState { det });
    }
    let dx = x - state.mean[0];
    let dp = p - state.mean[1];
    let c = &state.cov;
    let quad = (c.pp * dx * dx - 2.0 * c.xp * dx * dp + c.xx * dp * dp) / det;
    Ok((-0.5 * quad).exp() / (2.0 * PI * det.sqrt()))
}

/// `(2/hbar) sqrt(det V)`.
pub fn uncertainty_product(cov: &Cov2) -> Result<f64> {
    uncertainty_product_with(cov, HBAR)
}

/// Same with an arbitrary action unit, for covariances in normalized coordinates
/// (`hbar_unit = 2` when both axes are scaled by their zero-point spread).
pub fn uncertainty_product_with(cov: &Cov2, hbar_unit: f64) -> Result<f64> {
    cov.check_psd()?;
    let det = cov.det();
    if det < 0.0 {
        // inside the PSD tolerance
        if det < -1e-12 * cov.trace().powi(2) {
            return Err(Error::InvalidCovariance(format!("negative determinant {det:e}")));
        }
        return Ok(0.0);
    }
    Ok(2.0 / hbar_unit * det.sqrt())
}

pub fn convolve(state: &GaussianState, ellipse: &NoiseEllipse) -> GaussianState {
    GaussianState {
        mean: state.mean,
        cov: state.cov + ellipse.cov,
    }
}

/// Applies `cov -> M^T V M` and, consistently, `mean -> M^T mean`.
///
/// Non-unit determinant is rejected unless `general` is set.
pub fn symplectic_transform(state: &GaussianState, m: &Mat2, general: bool) -> Result<GaussianState> {
    let d = det2(m);
    if !general && (d - 1.0).abs() > 1e-12 {
        return Err(Error::param("transform", format!("determinant {d} is not 1")));
    }
    let mt = transpose(m);
    let mean = [
        mt[0][0] * state.mean[0] + mt[0][1] * state.mean[1],
        mt[1][0] * state.mean[0] + mt[1][1] * state.mean[1],
    ];
    Ok(GaussianState {
        mean,
        cov: state.cov.congruence(m),
    })
}

/// One-sigma ellipse as (center, semi-axes, tilt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseExport {
    pub center: [f64; 2],
    /// major, minor
    pub semi_axes: [f64; 2],
    /// Radians from the first axis to the major axis.
    pub tilt: f64,
}

pub fn ellipse(state: &GaussianState) -> EllipseExport {
    let (lo, hi) = state.cov.eigenvalues();
    EllipseExport {
        center: state.mean,
        semi_axes: [hi.max(0.0).sqrt(), lo.max(0.0).sqrt()],
        tilt: state.cov.major_axis_angle(),
    }
}
