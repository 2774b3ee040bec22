//! Optimal verification filters from the Wiener-Hopf equations.
//!
//! Everything here runs in scaled units: frequencies in `Omega_q`, time in `1/Omega_q`,
//! unit mass and `alpha^2/hbar = 1`. The oscillator response is
//! `G(Omega) = -1 / ((Omega + i gamma)^2 - omega^2)`, and the quadrature targets carry the
//! same `e^{-gamma t}` envelope as the response so that the regularized problem stays
//! self-consistent; both reduce to the undamped forms as `gamma -> 0`.
//!
//! Eliminating `g1` leaves a single equation for `g2` whose kernel has the spectrum
//! `Lambda^2/4 + zeta_F'^2 |G|^2 = psi_plus psi_minus`. Its causal solutions are
//! `g2 = R(Omega) / (psi_plus D_plus)` with `R` of degree one; the two coefficients of
//! `R` are fixed by the quadrature constraints, and the Lagrange multipliers follow from
//! the causal part of `G* g2`. This avoids the constants at the anticausal poles of
//! `G*`, which blow up as `gamma -> 0`; they are still reported.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::factorize::spectral_factorize;
use super::spectrum::{Pole, RationalSpectrum};
use super::split::{causal_split, inverse_transform};
use crate::error::{Error, Result};
use crate::gaussian::{uncertainty_product, Cov2};
use crate::params::NoiseBudget;
use crate::verification::{FilterGrid, FilterPair, FilterSource};

/// Damping used to move the free-mass double pole off the real axis, in units of `Omega_q`.
pub const FREE_MASS_DAMPING: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WHSolution {
    pub zeta: f64,
    pub omega_q: f64,
    /// `omega_m / Omega_q`
    pub detuning: f64,
    /// `gamma_m / Omega_q`
    pub damping: f64,
    pub lambda: f64,
    pub zeta_f_eff: f64,
    /// Filters as functions of `Omega / Omega_q`.
    pub g1: RationalSpectrum,
    pub g2: RationalSpectrum,
    pub psi_plus: RationalSpectrum,
    /// Causal part of `G* g2`.
    pub j_plus: RationalSpectrum,
    /// Multipliers of the two targets for this `zeta`.
    pub multipliers: [f64; 2],
    /// `(f_i | M | f_j)`.
    pub moments: [[f64; 2]; 2],
    pub v_add: Cov2,
    pub v_add_normalized: Cov2,
    pub u_add: f64,
    /// Residues of `G* g2` at the anticausal poles of `G*`.
    pub anticausal_constants: Vec<C>,
    /// `|V_xp - V_px| / sqrt(V_xx V_pp)` before symmetrizing; of order `gamma`.
    pub asymmetry: f64,
}

fn pole_pair(w: f64, im: f64) -> Vec<Pole> {
    if w == 0.0 {
        vec![Pole { at: C::new(0.0, im), mult: 2 }]
    } else {
        vec![Pole { at: C::new(w, im), mult: 1 }, Pole { at: C::new(-w, im), mult: 1 }]
    }
}

/// `(int F e^{sigma t} cos(wt), int F e^{sigma t} sin(wt)/w)` from the transform evaluated
/// at `+-w + i shift_im` with `shift_im = -sigma`.
fn functionals(f: &RationalSpectrum, shift_im: f64, w: f64) -> Result<(C, C)> {
    let c0 = C::new(0.0, shift_im);
    if w < 1e-3 {
        let t = f.taylor(c0, 5)?;
        let w2 = w * w;
        let phi1 = t[0] + t[2] * w2 + t[4] * w2 * w2;
        let phi2 = C::new(0.0, -1.0) * (t[1] + t[3] * w2 + t[5] * w2 * w2);
        Ok((phi1, phi2))
    } else {
        let a = f.eval(c0 + w);
        let b = f.eval(c0 - w);
        Ok((0.5 * (a + b), (a - b) / C::new(0.0, 2.0 * w)))
    }
}

fn solve2(a: [[C; 2]; 2], rhs: [C; 2]) -> Result<[C; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a.iter().flatten().map(|v| v.norm()).fold(0.0f64, f64::max);
    if det.norm() <= 1e-13 * scale * scale {
        return Err(Error::DegenerateQuadrature(format!("constraint determinant {det}")));
    }
    Ok([
        (rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ])
}

struct Quadrature {
    g2: RationalSpectrum,
    j: RationalSpectrum,
    minus: RationalSpectrum,
    mu: [C; 2],
}

pub fn solve_optimal_filters(budget: &NoiseBudget, zeta: f64, omega_m: f64, gamma_m: f64) -> Result<WHSolution> {
    let d = budget.derive()?;
    if !(omega_m >= 0.0 && omega_m.is_finite()) {
        return Err(Error::param("omega_m", format!("must be >= 0, got {omega_m}")));
    }
    if !(gamma_m > 0.0 && gamma_m.is_finite()) {
        return Err(Error::param(
            "gamma_m",
            "must be > 0; use FREE_MASS_DAMPING * omega_q for a free mass",
        ));
    }
    let wq = budget.omega_q;
    let (w, g) = (omega_m / wq, gamma_m / wq);
    let (lam, zp, eta) = (d.lambda, d.zeta_f_eff, budget.eta);
    let e2q = (2.0 * budget.q).exp();
    let s11 = 0.5 * (eta + (1.0 - eta) * e2q);
    let s12 = 0.5 * (1.0 - eta) * e2q;

    let one = C::new(1.0, 0.0);
    let response = RationalSpectrum::new(vec![-one], pole_pair(w, -g));
    let response_conj = RationalSpectrum::new(vec![-one], pole_pair(w, g));
    let kernel = RationalSpectrum::constant(C::new(lam * lam / 4.0, 0.0))
        .add(&response.mul(&response_conj).scale(C::new(zp * zp, 0.0)));
    let (psi_plus, _) = spectral_factorize(&kernel)?;

    // g2 = (r0 + r1 Omega) / (lead * prod (Omega - z_k)) over the zeros of psi_plus
    let lead = psi_plus.numerator()[psi_plus.num_degree()];
    let zeros = psi_plus.zeros()?;
    let basis_poles: Vec<Pole> = zeros.iter().map(|z| Pole { at: *z, mult: 1 }).collect();
    let basis = |r: [C; 2]| RationalSpectrum::new(vec![r[0] / lead, r[1] / lead], basis_poles.clone());

    let b0 = functionals(&basis([one, C::new(0.0, 0.0)]), g, w)?;
    let b1 = functionals(&basis([C::new(0.0, 0.0), one]), g, w)?;
    let a = [[b0.0, b1.0], [b0.1, b1.1]];

    let solve_for = |rhs: [C; 2]| -> Result<Quadrature> {
        let r = solve2(a, rhs)?;
        let g2 = basis(r);
        let split = causal_split(&response_conj.mul(&g2))?;
        let (p1, p2) = functionals(&split.plus, -g, w)?;
        let z2 = C::new(zp * zp, 0.0);
        Ok(Quadrature {
            g2,
            j: split.plus,
            minus: split.minus,
            mu: [-z2 * p2, z2 * p1],
        })
    };
    let qx = solve_for([one, C::new(0.0, 0.0)])?;
    let qp = solve_for([C::new(0.0, 0.0), one])?;

    let k = 2.0 / (1.0 - eta);
    let raw = [
        [k * qx.mu[0].re, k * qp.mu[0].re],
        [k * qx.mu[1].re, k * qp.mu[1].re],
    ];
    let asymmetry = (raw[0][1] - raw[1][0]).abs() / (raw[0][0] * raw[1][1]).abs().sqrt();
    let v_norm = Cov2::new(raw[0][0], 0.5 * (raw[0][1] + raw[1][0]), raw[1][1]);
    let mu_mat = [
        [qx.mu[0].re, qp.mu[0].re],
        [qx.mu[1].re, qp.mu[1].re],
    ];
    let det = mu_mat[0][0] * mu_mat[1][1] - mu_mat[0][1] * mu_mat[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::DegenerateQuadrature("singular multiplier matrix".into()));
    }
    let moments = [
        [mu_mat[1][1] / det, -mu_mat[0][1] / det],
        [-mu_mat[1][0] / det, mu_mat[0][0] / det],
    ];

    let (sz, cz) = zeta.sin_cos();
    let (cx, cp) = (C::new(cz, 0.0), C::new(sz, 0.0));
    let g2 = qx.g2.scale(cx).add(&qp.g2.scale(cp));
    let j_plus = qx.j.scale(cx).add(&qp.j.scale(cp));
    let minus = qx.minus.scale(cx).add(&qp.minus.scale(cp));
    let g1 = j_plus.scale(C::new(-s12 / s11, 0.0));
    let anticausal_constants = minus
        .partial_fractions()?
        .terms
        .into_iter()
        .flat_map(|(_, c)| c)
        .collect();
    let v_add = v_norm.denormalized(d.dx_q, d.dp_q);
    Ok(WHSolution {
        zeta,
        omega_q: wq,
        detuning: w,
        damping: g,
        lambda: lam,
        zeta_f_eff: zp,
        g1,
        g2,
        psi_plus,
        j_plus,
        multipliers: [
            cz * qx.mu[0].re + sz * qp.mu[0].re,
            cz * qx.mu[1].re + sz * qp.mu[1].re,
        ],
        moments,
        v_add,
        v_add_normalized: v_norm,
        u_add: uncertainty_product(&v_add)?,
        anticausal_constants,
        asymmetry,
    })
}

impl WHSolution {
    /// Samples both filters in SI time on `grid`.
    pub fn filter_pair(&self, grid: FilterGrid) -> Result<FilterPair> {
        let scaled: Vec<f64> = grid.times().iter().map(|t| t * self.omega_q).collect();
        let g1 = inverse_transform(&self.g1, &scaled)?;
        let g2 = inverse_transform(&self.g2, &scaled)?;
        let to_si = |v: Vec<f64>| v.into_iter().map(|x| x * self.omega_q).collect();
        Ok(FilterPair {
            zeta: self.zeta,
            step: grid.step,
            g1: to_si(g1.values),
            g2: to_si(g2.values),
            source: FilterSource::WienerHopf,
        })
    }

    /// Largest deviation of the reduced filter equation on the real frequencies `omegas`
    /// (scaled), relative to the largest direct term.
    pub fn frequency_residual(&self, omegas: &[f64]) -> f64 {
        let (w, g) = (self.detuning, self.damping);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for &om in omegas {
            let z = C::new(om, g);
            let d_plus = z * z - w * w;
            let z_axis = C::new(om, 0.0);
            let direct = self.lambda * self.lambda / 4.0 * d_plus * self.g2.eval(z_axis);
            let r = direct - self.zeta_f_eff * self.zeta_f_eff * self.j_plus.eval(z_axis)
                - C::new(0.0, self.multipliers[0]) * z
                + self.multipliers[1];
            worst = worst.max(r.norm());
            scale = scale.max(direct.norm());
        }
        worst / scale
    }
}
