//! Two mirrors `E` and `N` seen through their common and differential modes.
//!
//! With `x_c = x_E + x_N` and `x_d = x_E - x_N` each mode carries half the mirror mass, and
//! `x_E = (x_c + x_d)/2`, `p_E = p_c + p_d`. The mirror blocks follow from that map, which
//! is why position entries are quartered while momentum entries are not.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::evolve_exact;
use crate::gaussian::{Cov2, Mat2};
use crate::params::{hz, squeeze_from_db, NoiseBudget, G_NEWTON, HBAR};
use crate::preparation::conditional_covariance;
use crate::verification::added_noise_covariance;

/// Covariance over `(x_E, p_E, x_N, p_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteState {
    pub v: [[f64; 4]; 4],
}

impl BipartiteState {
    fn block(&self, r: usize, c: usize) -> Mat2 {
        [
            [self.v[r][c], self.v[r][c + 1]],
            [self.v[r + 1][c], self.v[r + 1][c + 1]],
        ]
    }

    pub fn v_ee(&self) -> Mat2 {
        self.block(0, 0)
    }

    pub fn v_nn(&self) -> Mat2 {
        self.block(2, 2)
    }

    pub fn v_en(&self) -> Mat2 {
        self.block(0, 2)
    }

    pub fn v_ne(&self) -> Mat2 {
        self.block(2, 0)
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.v[i][j])
    }

    pub fn from_blocks(ee: &Mat2, nn: &Mat2, en: &Mat2) -> Self {
        let mut v = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                v[i][j] = ee[i][j];
                v[i + 2][j + 2] = nn[i][j];
                v[i][j + 2] = en[i][j];
                v[j + 2][i] = en[i][j];
            }
        }
        BipartiteState { v }
    }

    /// Applies the same 2x2 map `M` to both mirrors: `V -> (M (+) M)^T V (M (+) M)`.
    pub fn local_congruence(&self, m: &Mat2) -> Self {
        let mut s = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                s[(i, j)] = m[i][j];
                s[(i + 2, j + 2)] = m[i][j];
            }
        }
        let out = s.transpose() * self.matrix() * s;
        BipartiteState { v: std::array::from_fn(|i| std::array::from_fn(|j| out[(i, j)])) }
    }
}

/// Mirror covariance from the mode covariances.
pub fn assemble_bipartite(common: &Cov2, differential: &Cov2) -> Result<BipartiteState> {
    common.check_psd()?;
    differential.check_psd()?;
    let (c, d) = (common, differential);
    let ee = [
        [(c.xx + d.xx) / 4.0, (c.xp + d.xp) / 2.0],
        [(c.xp + d.xp) / 2.0, c.pp + d.pp],
    ];
    let en = [
        [(c.xx - d.xx) / 4.0, (c.xp - d.xp) / 2.0],
        [(c.xp - d.xp) / 2.0, c.pp - d.pp],
    ];
    let state = BipartiteState::from_blocks(&ee, &ee, &en);
    let eig = state.matrix().symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if eig.iter().any(|e| *e < -1e-12 * scale) {
        return Err(Error::InvalidCovariance(format!("bipartite eigenvalues {:?}", eig.as_slice())));
    }
    Ok(state)
}

fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Smallest symplectic eigenvalue of the partial transpose.
pub fn sigma_minus(state: &BipartiteState) -> Result<f64> {
    let sigma = det(&state.v_nn()) + det(&state.v_ee()) - 2.0 * det(&state.v_ne());
    let det_v = state.matrix().determinant();
    let disc = sigma * sigma - 4.0 * det_v;
    let disc = if disc < 0.0 {
        if disc < -1e-12 * sigma * sigma {
            return Err(Error::NumericalDomain(format!(
                "Sigma^2 - 4 det V = {disc:e} is negative"
            )));
        }
        0.0
    } else {
        disc
    };
    let sq = 0.5 * (sigma - disc.sqrt());
    if sq < 0.0 {
        return Err(Error::NumericalDomain(format!("sigma_minus^2 = {sq:e}")));
    }
    Ok(sq.sqrt())
}

/// Smallest symplectic eigenvalue of the partial transpose from the spectrum of
/// `Omega V~`, for cross-checking [`sigma_minus`].
pub fn sigma_minus_from_spectrum(state: &BipartiteState) -> f64 {
    let mut v = state.matrix();
    for i in 0..4 {
        v[(3, i)] = -v[(3, i)];
        v[(i, 3)] = -v[(i, 3)];
    }
    let mut omega = Matrix4::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    (omega * v).complex_eigenvalues().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// `max(0, -log2(2 sigma_minus / hbar))`.
pub fn log_negativity(state: &BipartiteState) -> Result<f64> {
    log_negativity_with(state, HBAR)
}

/// Same for covariances expressed with an action unit other than `hbar`.
pub fn log_negativity_with(state: &BipartiteState, hbar_unit: f64) -> Result<f64> {
    Ok(negativity_exponent(state, hbar_unit)?.max(0.0))
}

/// `-log2(2 sigma_minus / hbar)` without the clamp; crosses zero where entanglement ends.
pub fn negativity_exponent(state: &BipartiteState, hbar_unit: f64) -> Result<f64> {
    let s = sigma_minus(state)?;
    if s == 0.0 {
        return Err(Error::NumericalDomain("sigma_minus vanishes".into()));
    }
    Ok(-(2.0 * s / hbar_unit).log2())
}

/// Budgets for one mode: the state is prepared with one and verified with the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSchedule {
    pub preparation: NoiseBudget,
    pub verification: NoiseBudget,
}

impl ModeSchedule {
    /// Conditional state evolved for `tau` plus the verification noise.
    pub fn total_covariance(&self, tau: f64) -> Result<Cov2> {
        let cond = conditional_covariance(&self.preparation)?;
        let evolved = evolve_exact(&cond.state, &self.preparation, tau)?;
        let added = added_noise_covariance(&self.verification)?;
        Ok(evolved.state.cov + added.ellipse.cov)
    }
}

pub fn state_at(common: &ModeSchedule, differential: &ModeSchedule, tau: f64) -> Result<BipartiteState> {
    assemble_bipartite(&common.total_covariance(tau)?, &differential.total_covariance(tau)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub tau: Vec<f64>,
    pub e_n: Vec<f64>,
    /// First zero of the log negativity; `None` when it stays positive over the scan.
    pub survival: Option<f64>,
}

/// Samples `E_N` at `taus` (ascending) and locates the first zero crossing by bisection.
pub fn survival_curve(common: &ModeSchedule, differential: &ModeSchedule, taus: &[f64]) -> Result<SurvivalCurve> {
    if taus.windows(2).any(|w| w[1] <= w[0]) || taus.iter().any(|t| *t < 0.0) {
        return Err(Error::param("tau", "sample times must be non-negative and increasing"));
    }
    let exponent = |t: f64| negativity_exponent(&state_at(common, differential, t)?, HBAR);
    let raw: Vec<f64> = taus.par_iter().map(|&t| exponent(t)).collect::<Result<_>>()?;
    let mut survival = None;
    if let Some(k) = raw.iter().position(|e| *e <= 0.0) {
        survival = Some(if k == 0 {
            taus[0]
        } else {
            let (mut lo, mut hi) = (taus[k - 1], taus[k]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if exponent(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-13 * hi {
                    break;
                }
            }
            0.5 * (lo + hi)
        });
    }
    Ok(SurvivalCurve {
        tau: taus.to_vec(),
        e_n: raw.iter().map(|e| e.max(0.0)).collect(),
        survival,
    })
}

/// Two-mirror setup with the mirrors' thermal noise at `omega_f_hz`: measurement at 100 Hz,
/// free 10 kg mirrors, no sensing noise and no readout loss. Both modes are verified with 10 dB of
/// phase squeezing; the common mode is also prepared that way, the differential mode with
/// 10 dB of amplitude squeezing.
pub fn fig9_schedules(omega_f_hz: f64) -> (ModeSchedule, ModeSchedule) {
    let omega_q = hz(100.0);
    let q = squeeze_from_db(10.0);
    let mode = |q: f64| NoiseBudget::from_ratios(5.0, omega_q, hz(omega_f_hz) / omega_q, 0.0, 0.0, q);
    (
        ModeSchedule { preparation: mode(q), verification: mode(q) },
        ModeSchedule { preparation: mode(-q), verification: mode(q) },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityDecoherenceParams {
    /// kg/m^3
    pub density: f64,
    /// m
    pub separation: f64,
    /// kg
    pub mass: f64,
    /// rad/s
    pub omega_q: f64,
    /// m
    pub spread: f64,
}

impl GravityDecoherenceParams {
    /// Fused-silica 10 kg mirrors 10 m apart, measured at 100 Hz.
    pub fn mirrors() -> Self {
        let omega_q = hz(100.0);
        let mass = 10.0;
        GravityDecoherenceParams {
            density: 2200.0,
            separation: 10.0,
            mass,
            omega_q,
            spread: (HBAR / (2.0 * mass * omega_q)).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("density", self.density),
            ("separation", self.separation),
            ("mass", self.mass),
            ("omega_q", self.omega_q),
            ("spread", self.spread),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityTimescales {
    /// Self-energy model.
    pub tau_a: f64,
    /// Mutual-energy model.
    pub tau_b: f64,
}

pub fn gravity_timescales(p: &GravityDecoherenceParams) -> Result<GravityTimescales> {
    p.validate()?;
    Ok(GravityTimescales {
        tau_a: p.omega_q / (G_NEWTON * p.density),
        tau_b: HBAR.sqrt() * p.separation.powi(2) * p.omega_q.sqrt() / (G_NEWTON * p.mass.powf(1.5)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Testable,
    Untestable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestabilityReport {
    pub timescales: GravityTimescales,
    pub omega_q_tau_b: f64,
    pub survival: f64,
    pub model_a: Verdict,
    pub model_b: Verdict,
}

/// A model counts as testable when entanglement outlives its decoherence time tenfold.
pub fn testability_report(p: &GravityDecoherenceParams, survival: f64) -> Result<TestabilityReport> {
    let ts = gravity_timescales(p)?;
    let judge = |tau_g: f64| {
        if !(survival > 0.0) {
            Verdict::Inconclusive
        } else if survival > 10.0 * tau_g {
            Verdict::Testable
        } else {
            Verdict::Untestable
        }
    };
    Ok(TestabilityReport {
        timescales: ts,
        omega_q_tau_b: p.omega_q * ts.tau_b,
        survival,
        model_a: judge(ts.tau_a),
        model_b: judge(ts.tau_b),
    })
}
