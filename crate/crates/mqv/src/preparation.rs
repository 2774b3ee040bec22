//! Conditional state left behind by the continuous position measurement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{uncertainty_product, Cov2, GaussianState};
use crate::params::{NoiseBudget, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Riccati,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalState {
    pub state: GaussianState,
    pub provenance: Provenance,
    pub budget: NoiseBudget,
    /// Regime warnings; empty when the free-mass assumptions hold.
    pub advisories: Vec<String>,
}

impl ConditionalState {
    pub fn uncertainty(&self) -> Result<f64> {
        uncertainty_product(&self.state.cov)
    }
}

fn free_mass_advisory(b: &NoiseBudget) -> Vec<String> {
    if b.omega_m > 0.1 * b.omega_q {
        vec![format!(
            "omega_m = {:.3e} exceeds 0.1 omega_q = {:.3e}; free-mass covariance is approximate",
            b.omega_m,
            0.1 * b.omega_q
        )]
    } else {
        Vec::new()
    }
}

/// Steady-state conditional covariance in the free-mass regime.
///
/// Input squeezing is folded in by measuring with `omega_q e^q` (see
/// [`NoiseBudget::squeeze_absorbed`]); readout loss is not part of this stage.
pub fn conditional_covariance(budget: &NoiseBudget) -> Result<ConditionalState> {
    let eff = budget.squeeze_absorbed();
    let d = eff.derive()?;
    let (nf, nx) = (d.n_f, d.n_x);
    let s2 = std::f64::consts::SQRT_2;
    let cov = Cov2::new(
        nf.powf(0.25) * nx.powf(0.75) * s2 * d.dx_q * d.dx_q,
        (nf * nx).sqrt() * HBAR / 2.0,
        nf.powf(0.75) * nx.powf(0.25) * s2 * d.dp_q * d.dp_q,
    );
    Ok(ConditionalState {
        state: GaussianState::centered(cov),
        provenance: Provenance::ClosedForm,
        budget: *budget,
        advisories: free_mass_advisory(budget),
    })
}

/// `N_x N_F`, the coarse purity estimate quoted alongside the closed form.
/// The closed form itself gives `sqrt(N_x N_F)`; both are reported.
pub fn coarse_purity(budget: &NoiseBudget) -> Result<f64> {
    let d = budget.squeeze_absorbed().derive()?;
    Ok(d.n_x * d.n_f)
}

/// Noise intensities as seen by the filter: force on p and white readout noise on x,
/// each already halved for the `S delta / 2` correlator convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterNoise {
    pub force: f64,
    pub readout: f64,
}

impl FilterNoise {
    pub fn from_budget(b: &NoiseBudget) -> Result<Self> {
        let d = b.derive()?;
        Ok(FilterNoise {
            force: 0.5 * (d.s_f_th + d.s_f_ba),
            readout: 0.5 * (d.s_x_th + d.s_x_sh),
        })
    }
}

/// Occupation factors implied by the literal noise densities, `(N_F, N_x)`.
///
/// `N_F` matches `1 + 2 zeta_F^2`; the sensing factor comes out as `1 + zeta_x^2`.
pub fn literal_occupations(b: &NoiseBudget) -> Result<(f64, f64)> {
    let eff = b.squeeze_absorbed();
    let d = eff.derive()?;
    let n = FilterNoise::from_budget(&eff)?;
    let n_f = n.force / (0.5 * d.alpha * d.alpha);
    let n_x = n.readout / (0.5 * HBAR * HBAR / (d.alpha * d.alpha));
    Ok((n_f, n_x))
}

/// Riccati residual matrix `A P + P A^T + Q - P C^T R^-1 C P` for the oscillator.
fn riccati_residual(b: &NoiseBudget, n: &FilterNoise, p: &Cov2) -> Cov2 {
    let m = b.mass;
    let w2 = b.omega_m * b.omega_m;
    let g = b.gamma_m;
    let r = n.readout;
    Cov2::new(
        2.0 * p.xp / m - p.xx * p.xx / r,
        p.pp / m - m * w2 * p.xx - 2.0 * g * p.xp - p.xx * p.xp / r,
        -2.0 * m * w2 * p.xp - 4.0 * g * p.pp + n.force - p.xp * p.xp / r,
    )
}

/// Independent steady-state Kalman covariance from the equations of motion.
///
/// Two of the three Riccati equations are linear in `P_xp`, `P_pp` once `P_xx` is fixed;
/// the third becomes a scalar equation in `P_xx` that is strictly decreasing on
/// `P_xx > 0`, so a safeguarded Newton iteration finds its unique positive root.
pub fn riccati_steady_state(budget: &NoiseBudget) -> Result<ConditionalState> {
    let eff = budget.squeeze_absorbed();
    let n = FilterNoise::from_budget(&eff)?;
    let m = eff.mass;
    let w2 = eff.omega_m * eff.omega_m;
    let g = eff.gamma_m;
    let r = n.readout;

    let complete = |xx: f64| {
        let xp = m * xx * xx / (2.0 * r);
        let pp = m * (m * w2 * xx + 2.0 * g * xp + xx * xp / r);
        Cov2::new(xx, xp, pp)
    };
    // f(P_xx) and its derivative
    let f = |xx: f64| {
        let c = complete(xx);
        let val = n.force - 2.0 * m * w2 * c.xp - 4.0 * g * c.pp - c.xp * c.xp / r;
        let dxp = m * xx / r;
        let dpp = m * (m * w2 + 2.0 * g * dxp + (c.xp + xx * dxp) / r);
        let der = -2.0 * m * w2 * dxp - 4.0 * g * dpp - 2.0 * c.xp * dxp / r;
        (val, der)
    };

    // Free-mass root as the starting point, then bracket.
    let p_xp0 = (n.force * r).sqrt();
    let mut x = (2.0 * r * p_xp0 / m).sqrt();
    let mut lo = 0.0;
    let mut hi = x;
    while f(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::RiccatiNonConvergence {
                residual: f64::INFINITY,
                iterations: 0,
            });
        }
    }
    let max_iter = 200;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let (val, der) = f(x);
        if val > 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let mut next = x - val / der;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x {
            x = next;
            break;
        }
        x = next;
    }
    let cov = complete(x);
    let res = riccati_residual(&eff, &n, &cov);
    // each equation measured against its largest term
    let rel = (res.xx.abs() / (2.0 * cov.xp / m))
        .max(res.xp.abs() / (cov.pp / m))
        .max(res.pp.abs() / n.force);
    if !(rel < 1e-9) || iterations == max_iter {
        return Err(Error::RiccatiNonConvergence {
            residual: rel,
            iterations,
        });
    }
    Ok(ConditionalState {
        state: GaussianState::centered(cov),
        provenance: Provenance::Riccati,
        budget: *budget,
        advisories: Vec::new(),
    })
}

/// Coarse variances after measuring for a time `tau`, with the estimated purity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparedEstimate {
    pub var_x: f64,
    pub var_p: f64,
    /// `(2/hbar) sqrt(var_x var_p)` of the two estimates above.
    pub product: f64,
    /// `N_x N_F`, the scale the estimate approaches at `tau ~ tau_q`.
    pub u_est: f64,
}

pub fn order_of_magnitude_prepared(budget: &NoiseBudget, tau: f64) -> Result<PreparedEstimate> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", format!("must be > 0, got {tau}")));
    }
    let d = budget.derive()?;
    let m = budget.mass;
    let sx = d.s_x_th + d.s_x_sh;
    let sf = d.s_f_th + d.s_f_ba;
    let var_x = sx / tau + tau.powi(3) * sf / (m * m);
    let var_p = m * m * sx / tau.powi(3) + tau * sf;
    Ok(PreparedEstimate {
        var_x,
        var_p,
        product: 2.0 / HBAR * (var_x * var_p).sqrt(),
        u_est: d.n_x * d.n_f,
    })
}
