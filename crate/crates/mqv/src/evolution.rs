//! Free evolution of the conditional state with the measurement switched off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{uncertainty_product, Cov2, GaussianState, Mat2};
use crate::params::{NoiseBudget, HBAR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub tau: f64,
    pub state: GaussianState,
    /// `omega_m * tau`, radians.
    pub phase: f64,
    pub u: f64,
    /// Growth of the uncertainty product caused by the bath.
    pub u_thermal: f64,
    pub advisories: Vec<String>,
}

/// Free propagator: `(x, p)(tau) = R^T (x, p)(0)`, so covariances map as `R^T V R`.
pub fn rotation(budget: &NoiseBudget, tau: f64) -> Mat2 {
    let m = budget.mass;
    let w = budget.omega_m;
    let phi = w * tau;
    let (s, c) = phi.sin_cos();
    [[c, -m * w * s], [tau * sinc(phi) / m, c]]
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// `(y - sin y) / y^3`, stable near zero.
fn cubic_remainder(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        // alternating series 1/3! - y^2/5! + y^4/7! - ...
        let mut term = 1.0 / 6.0;
        let mut acc = term;
        for k in 1..6 {
            let n = (2 * k + 2) as f64;
            term *= -y2 / (n * (n + 1.0));
            acc += term;
        }
        acc
    } else {
        (y - y.sin()) / (y * y * y)
    }
}

/// Covariance added by the thermal force over `tau` (undamped propagation).
pub fn thermal_diffusion(budget: &NoiseBudget, s_f_th: f64, tau: f64) -> Cov2 {
    let m = budget.mass;
    let phi = budget.omega_m * tau;
    let sc = sinc(phi);
    Cov2::new(
        s_f_th * tau.powi(3) * cubic_remainder(2.0 * phi) / (m * m),
        s_f_th * tau * tau * sc * sc / (4.0 * m),
        s_f_th * tau / 8.0 * (2.0 + 2.0 * sinc(2.0 * phi)),
    )
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::param("tau_e", format!("must be >= 0, got {tau}")));
    }
    Ok(())
}

/// Rotation plus thermal diffusion, valid for any `omega_m * tau`.
pub fn evolve_exact(state: &GaussianState, budget: &NoiseBudget, tau: f64) -> Result<EvolutionResult> {
    check_tau(tau)?;
    let d = budget.derive()?;
    let r = rotation(budget, tau);
    let rot = state.cov.congruence(&r);
    let cov = rot + thermal_diffusion(budget, d.s_f_th, tau);
    let mean = [
        r[0][0] * state.mean[0] + r[1][0] * state.mean[1],
        r[0][1] * state.mean[0] + r[1][1] * state.mean[1],
    ];
    let u0 = uncertainty_product(&state.cov)?;
    let u = uncertainty_product(&cov)?;
    let mut advisories = Vec::new();
    if budget.gamma_m * tau > 0.1 {
        advisories.push(format!(
            "gamma_m tau = {:.3} is not small; damping is neglected during evolution",
            budget.gamma_m * tau
        ));
    }
    Ok(EvolutionResult {
        tau,
        state: GaussianState { mean, cov },
        phase: budget.omega_m * tau,
        u,
        u_thermal: u - u0,
        advisories,
    })
}

/// Free-mass series to leading order in `omega_q tau`; requires `omega_m tau < 0.1`.
///
/// `u_thermal` is the estimate `(V_xx / dx_q^2)(tau / tau_F)^2`, while `u` is computed
/// from the expanded matrix.
pub fn evolve_leading_order(state: &GaussianState, budget: &NoiseBudget, tau: f64) -> Result<EvolutionResult> {
    check_tau(tau)?;
    let phase = budget.omega_m * tau;
    if phase >= 0.1 {
        return Err(Error::param("tau_e", format!("omega_m tau = {phase} is not < 0.1")));
    }
    let d = budget.derive()?;
    let v = &state.cov;
    let wt = budget.omega_q * tau;
    let dx2 = d.dx_q * d.dx_q;
    let dp2 = d.dp_q * d.dp_q;
    let zf2 = d.zeta_f * d.zeta_f;
    let cov = Cov2::new(
        v.xx + 4.0 * dx2 / HBAR * v.xp * wt + dx2 / dp2 * v.pp * wt * wt + 2.0 * dx2 * zf2 * wt.powi(3) / 3.0,
        v.xp + HBAR / (2.0 * dp2) * v.pp * wt + HBAR / 2.0 * zf2 * wt * wt,
        v.pp + 2.0 * dp2 * zf2 * wt,
    );
    let mean = [state.mean[0] + state.mean[1] * tau / budget.mass, state.mean[1]];
    Ok(EvolutionResult {
        tau,
        state: GaussianState { mean, cov },
        phase,
        u: uncertainty_product(&cov)?,
        u_thermal: v.xx / dx2 * (tau / d.tau_f).powi(2),
        advisories: Vec::new(),
    })
}

/// Coarse thermal growth `(tau / tau_F)^2`.
pub fn thermal_growth_estimate(budget: &NoiseBudget, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau_e", format!("must be > 0, got {tau}")));
    }
    budget.validate()?;
    Ok((budget.omega_f * tau).powi(2))
}

/// Causal position response to a unit force impulse, `e^{-gamma t} sin(omega_m t) / (m omega_m)`.
pub fn green_x(budget: &NoiseBudget, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let w = budget.omega_m;
    (-budget.gamma_m * t).exp() * t * sinc(w * t) / budget.mass
}
