//! Optimal time-dependent homodyne readout of a mechanical quadrature.
//!
//! The estimator weighs the amplitude output quadrature with `g1(t)` and the phase
//! quadrature with `g2(t)`; both are sampled on `t >= 0`, the start of the verification
//! window.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::gaussian::{uncertainty_product, Cov2, GaussianState, NoiseEllipse};
use crate::params::{NoiseBudget, HBAR};
use crate::quadrature::{simpson_product, tail_integral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterSource {
    ClosedForm,
    WienerHopf,
}

/// Uniform sampling of the verification window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterGrid {
    pub step: f64,
    pub length: f64,
}

impl FilterGrid {
    /// Step `tau_q / 200`, length `30 tau_V`.
    ///
    /// The window has to be this long for the `f2 ~ Omega_q t` moment to converge below
    /// 1e-6; at `12 tau_V` its truncated tail is still of order 1e-4.
    pub fn default_for(budget: &NoiseBudget) -> Result<Self> {
        let d = budget.derive()?;
        Ok(FilterGrid {
            step: d.tau_q / 200.0,
            length: 30.0 / (budget.omega_q * d.chi),
        })
    }

    /// Same window, step divided by `factor`.
    pub fn refined(self, factor: f64) -> Self {
        FilterGrid {
            step: self.step / factor,
            ..self
        }
    }

    pub fn len(&self) -> usize {
        (self.length / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    pub zeta: f64,
    pub step: f64,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub source: FilterSource,
}

impl FilterPair {
    pub fn times(&self) -> Vec<f64> {
        (0..self.g1.len()).map(|i| i as f64 * self.step).collect()
    }

    /// Homodyne weight `sqrt(g1^2 + g2^2)`.
    pub fn weight(&self) -> Vec<f64> {
        self.g1.iter().zip(&self.g2).map(|(a, b)| a.hypot(*b)).collect()
    }

    /// Local-oscillator phase `atan2(g2, g1)`.
    pub fn lo_phase(&self) -> Vec<f64> {
        self.g1.iter().zip(&self.g2).map(|(a, b)| b.atan2(*a)).collect()
    }
}

/// Target functions `f1 = cos(omega_m t)` and `f2 = (Omega_q/omega_m) sin(omega_m t)`.
pub fn target_functions(budget: &NoiseBudget, times: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w = budget.omega_m;
    let f1 = times.iter().map(|t| (w * t).cos()).collect();
    let f2 = times
        .iter()
        .map(|&t| {
            let ph = w * t;
            if ph < 1e-4 {
                budget.omega_q * t * (1.0 - ph * ph / 6.0)
            } else {
                budget.omega_q * ph.sin() / w
            }
        })
        .collect();
    (f1, f2)
}

/// Markovian closed-form filters, `g^zeta = g^X cos(zeta) + g^P sin(zeta)`.
pub fn closed_form_filters(budget: &NoiseBudget, zeta: f64, grid: FilterGrid) -> Result<FilterPair> {
    let d = budget.derive()?;
    if !(grid.step > 0.0 && grid.length > grid.step) {
        return Err(Error::param("grid", "step must be positive and shorter than the window"));
    }
    let wq = budget.omega_q;
    let chi = d.chi;
    let a = wq * chi;
    if grid.length * a < 10.0 {
        // relative size of the dropped tail of the slowest moment
        let estimate = (-a * grid.length).exp() * (1.0 + a * grid.length);
        return Err(Error::GridTooShort { estimate });
    }
    let (sz, cz) = zeta.sin_cos();
    let n = grid.len();
    let mut g1 = Vec::with_capacity(n);
    let mut g2 = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * grid.step;
        let env = (-a * t).exp();
        let at = a * t;
        let g2x = 2.0 * a * env * at.cos();
        let g2p = 2.0 * SQRT_2 * wq * chi * chi * env * (at - FRAC_PI_4).sin();
        let g1x = wq / chi * env * at.sin();
        let g1p = -SQRT_2 * wq * env * (at + FRAC_PI_4).sin();
        g1.push(g1x * cz + g1p * sz);
        g2.push(g2x * cz + g2p * sz);
    }
    Ok(FilterPair {
        zeta,
        step: grid.step,
        g1,
        g2,
        source: FilterSource::ClosedForm,
    })
}

/// `((g2|f1), (g2|f2))`; should equal `(cos zeta, sin zeta)`.
pub fn normalization(pair: &FilterPair, budget: &NoiseBudget) -> (f64, f64) {
    let (f1, f2) = target_functions(budget, &pair.times());
    (
        simpson_product(&pair.g2, &f1, pair.step),
        simpson_product(&pair.g2, &f2, pair.step),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaeResidual {
    pub residual: Vec<f64>,
    /// `max|r| / max|g1|`
    pub relative: f64,
}

/// Residual of the back-action-evasion condition tying `g1` to `g2`.
pub fn bae_residual(pair: &FilterPair, budget: &NoiseBudget) -> Result<BaeResidual> {
    let d = budget.derive()?;
    let limit = 0.01 / (budget.omega_q * d.chi);
    if pair.step > limit * (1.0 + 1e-12) {
        return Err(Error::Resolution { step: pair.step, limit });
    }
    let e2q = (2.0 * budget.q).exp();
    let eta = budget.eta;
    let weight = (1.0 - eta) * e2q / (eta + (1.0 - eta) * e2q);
    let coupling = d.alpha * d.alpha / HBAR;
    let tail = response_tail(budget, &pair.g2, pair.step);
    let residual: Vec<f64> = pair
        .g1
        .iter()
        .zip(&tail)
        .map(|(g1, r)| g1 + weight * coupling * r)
        .collect();
    let peak = pair.g1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(BaeResidual {
        residual,
        relative: worst / peak,
    })
}

/// `int_t^T G_x(t' - t) g(t') dt'` for every grid time, using the separable form of the
/// damped response so the cost stays linear.
fn response_tail(budget: &NoiseBudget, g: &[f64], h: f64) -> Vec<f64> {
    let m = budget.mass;
    let w = budget.omega_m;
    let gam = budget.gamma_m;
    let n = g.len();
    let t = |i: usize| i as f64 * h;
    let damp: Vec<f64> = (0..n).map(|i| (-gam * t(i)).exp()).collect();
    if w == 0.0 {
        let a: Vec<f64> = (0..n).map(|i| damp[i] * t(i) * g[i]).collect();
        let b: Vec<f64> = (0..n).map(|i| damp[i] * g[i]).collect();
        let (ta, tb) = (tail_integral(&a, h), tail_integral(&b, h));
        (0..n).map(|i| (ta[i] - t(i) * tb[i]) / (m * damp[i])).collect()
    } else {
        let s: Vec<f64> = (0..n).map(|i| damp[i] * (w * t(i)).sin() * g[i]).collect();
        let c: Vec<f64> = (0..n).map(|i| damp[i] * (w * t(i)).cos() * g[i]).collect();
        let (ts, tc) = (tail_integral(&s, h), tail_integral(&c, h));
        (0..n)
            .map(|i| {
                let (sn, cs) = (w * t(i)).sin_cos();
                (ts[i] * cs - tc[i] * sn) / (m * w * damp[i])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddedNoise {
    pub ellipse: NoiseEllipse,
    /// Same matrix in units of the zero-point scales.
    pub normalized: Cov2,
    pub u_add: f64,
    pub lambda: f64,
    pub zeta_f_eff: f64,
    pub chi: f64,
}

/// Added-noise covariance of the optimal Markovian verifier (free-mass regime).
pub fn added_noise_covariance(budget: &NoiseBudget) -> Result<AddedNoise> {
    let d = budget.derive()?;
    let (l, z) = (d.lambda, d.zeta_f_eff);
    let k = 1.0 / (1.0 - budget.eta);
    let normalized = Cov2::new(k * l.powf(1.5) * z.sqrt(), -k * l * z, k * 2.0 * l.sqrt() * z.powf(1.5));
    let cov = normalized.denormalized(d.dx_q, d.dp_q);
    let ellipse = NoiseEllipse::new(cov)?;
    Ok(AddedNoise {
        ellipse,
        normalized,
        u_add: uncertainty_product(&cov)?,
        lambda: l,
        zeta_f_eff: z,
        chi: d.chi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tradeoff {
    pub q: Vec<f64>,
    pub u_add: Vec<f64>,
    /// Readout without back-action evasion, `e^{-q}`.
    pub no_bae: Vec<f64>,
    /// Sensing-limited reference `zeta_x`.
    pub sensing: f64,
    /// Scaling estimate of the large-squeezing floor, `zeta_x zeta_F`.
    pub limit_estimate: f64,
    /// Exact large-squeezing floor of the closed form at `eta = 0`, `2 zeta_x zeta_F`.
    pub limit: f64,
}

pub fn squeezing_tradeoff(budget: &NoiseBudget, qs: &[f64]) -> Result<Tradeoff> {
    budget.validate()?;
    let mut u = Vec::with_capacity(qs.len());
    for &q in qs {
        u.push(added_noise_covariance(&NoiseBudget { q, ..*budget })?.u_add);
    }
    let (zx, zf) = (budget.zeta_x(), budget.zeta_f());
    Ok(Tradeoff {
        q: qs.to_vec(),
        u_add: u,
        no_bae: qs.iter().map(|q| (-q).exp()).collect(),
        sensing: zx,
        limit_estimate: zx * zf,
        limit: 2.0 * zx * zf,
    })
}

/// Variance of the measured normalized quadrature `x/dx_q cos(zeta) + p/dp_q sin(zeta)`:
/// the state's own spread plus the verifier's added noise.
pub fn estimator_signal_noise(pair: &FilterPair, state: &GaussianState, added: &AddedNoise, budget: &NoiseBudget) -> Result<f64> {
    let d = budget.derive()?;
    let own = state.cov.normalized(d.dx_q, d.dp_q).quadrature_variance(pair.zeta);
    Ok(own + added.normalized.quadrature_variance(pair.zeta))
}

/// Exponential decay rate of a damped oscillation, from a log-linear fit through the
/// local maxima of `|g|` above `floor * peak`.
pub fn envelope_decay_rate(g: &[f64], step: f64, floor: f64) -> Option<f64> {
    let peak = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut pts = Vec::new();
    for i in 1..g.len().saturating_sub(1) {
        let (a, b, c) = (g[i - 1].abs(), g[i].abs(), g[i + 1].abs());
        if b > a && b >= c && b > floor * peak {
            // parabolic refinement of the extremum
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let val = b - 0.25 * (a - c) * shift;
            pts.push(((i as f64 + shift) * step, val.ln()));
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{hz, squeeze_from_db};
    use crate::preparation::conditional_covariance;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fig7(q: f64) -> NoiseBudget {
        NoiseBudget::from_ratios(10.0, hz(100.0), 0.2, 0.2, 0.01, q)
    }

    fn lossless(q: f64) -> NoiseBudget {
        NoiseBudget::from_ratios(10.0, hz(100.0), 0.2, 0.2, 0.0, q)
    }

    #[test]
    fn initial_values() {
        let b = fig7(0.0);
        let d = b.derive().unwrap();
        let p = closed_form_filters(&b, 0.0, FilterGrid::default_for(&b).unwrap()).unwrap();
        assert!((p.g2[0] - 2.0 * b.omega_q * d.chi).abs() < 1e-12 * p.g2[0]);
        assert_eq!(p.g1[0], 0.0);
    }

    #[test]
    fn short_grid_rejected() {
        let b = fig7(0.0);
        let mut g = FilterGrid::default_for(&b).unwrap();
        g.length /= 4.0;
        assert!(matches!(closed_form_filters(&b, 0.0, g), Err(Error::GridTooShort { .. })));
    }

    #[test]
    fn unit_normalization_both_quadratures() {
        let b = fig7(0.0);
        let g = FilterGrid::default_for(&b).unwrap();
        let (a, c) = normalization(&closed_form_filters(&b, 0.0, g).unwrap(), &b);
        assert!((a - 1.0).abs() < 1e-8 && c.abs() < 1e-8, "{a} {c}");
        let (a, c) = normalization(&closed_form_filters(&b, PI / 2.0, g).unwrap(), &b);
        assert!(a.abs() < 1e-8 && (c - 1.0).abs() < 1e-8, "{a} {c}");
    }

    #[test]
    fn bae_holds_without_loss() {
        for q in [0.0, squeeze_from_db(10.0)] {
            let b = lossless(q);
            let g = FilterGrid::default_for(&b).unwrap();
            for zeta in [0.0, PI / 2.0, 1.0] {
                let r = bae_residual(&closed_form_filters(&b, zeta, g).unwrap(), &b).unwrap();
                assert!(r.relative < 1e-3, "q={q} zeta={zeta} {}", r.relative);
            }
        }
    }

    #[test]
    fn bae_refines_quadratically() {
        let b = lossless(0.0);
        let g = FilterGrid::default_for(&b).unwrap();
        let coarse = bae_residual(&closed_form_filters(&b, 0.0, g).unwrap(), &b).unwrap().relative;
        let fine = bae_residual(&closed_form_filters(&b, 0.0, g.refined(4.0)).unwrap(), &b).unwrap().relative;
        assert!(fine < 1e-5 && fine < coarse / 10.0, "{coarse} {fine}");
    }

    #[test]
    fn loss_breaks_plain_bae() {
        let mut b = lossless(0.0);
        b.eta = 0.5;
        let g = FilterGrid::default_for(&b).unwrap();
        let r = bae_residual(&closed_form_filters(&b, 0.0, g).unwrap(), &b).unwrap();
        assert!(r.relative > 1e-2);
    }

    #[test]
    fn coarse_step_rejected() {
        let b = lossless(0.0);
        let g = FilterGrid::default_for(&b).unwrap().refined(0.1);
        let p = closed_form_filters(&b, 0.0, g).unwrap();
        assert!(matches!(bae_residual(&p, &b), Err(Error::Resolution { .. })));
    }

    #[test]
    fn bae_with_oscillator_response() {
        // a slow resonance leaves the free-mass identity nearly intact
        let mut b = lossless(0.0);
        b.omega_m = 1e-3 * b.omega_q;
        let g = FilterGrid::default_for(&b).unwrap();
        let r = bae_residual(&closed_form_filters(&b, 0.0, g).unwrap(), &b).unwrap();
        assert!(r.relative < 1e-3, "{}", r.relative);
    }

    #[test]
    fn added_noise_values() {
        let v = added_noise_covariance(&fig7(0.0)).unwrap();
        assert!((v.u_add - 0.3132).abs() < 1e-3, "{}", v.u_add);
        let s = added_noise_covariance(&fig7(squeeze_from_db(10.0))).unwrap();
        assert!((s.u_add - 0.1309).abs() < 1e-3, "{}", s.u_add);
        let plain = NoiseBudget::from_ratios(1.0, 1.0, 0.3, 0.0, 0.0, 0.0);
        let p = added_noise_covariance(&plain).unwrap();
        assert!((p.u_add - SQRT_2 * 0.3).abs() < 1e-12);
        assert!(p.ellipse.cov.xp < 0.0);
    }

    #[test]
    fn tradeoff_floor() {
        let b = NoiseBudget::from_ratios(1.0, 1.0, 0.1, 0.1, 0.0, 0.0);
        let t = squeezing_tradeoff(&b, &[0.0, 2.0, 10.0]).unwrap();
        assert!((t.u_add[0] - added_noise_covariance(&b).unwrap().u_add).abs() < 1e-15);
        assert!(t.u_add[1] < t.u_add[0]);
        assert!((t.u_add[2] - t.limit).abs() < 1e-6);
        assert!((t.limit_estimate - 0.01).abs() < 1e-15);
    }

    #[test]
    fn estimator_variance() {
        let b = fig7(0.0);
        let d = b.derive().unwrap();
        let g = FilterGrid::default_for(&b).unwrap();
        let add = added_noise_covariance(&b).unwrap();
        let st = conditional_covariance(&b).unwrap().state;
        let p0 = closed_form_filters(&b, 0.0, g).unwrap();
        let v = estimator_signal_noise(&p0, &st, &add, &b).unwrap();
        let want = st.cov.xx / (d.dx_q * d.dx_q) + d.lambda.powf(1.5) * d.zeta_f_eff.sqrt() / 0.99;
        assert!((v - want).abs() < 1e-12 * want);
        let iso = AddedNoise {
            normalized: Cov2::diag(0.4, 0.4),
            ..add
        };
        let pz = closed_form_filters(&b, 0.7, g).unwrap();
        let base = st.cov.normalized(d.dx_q, d.dp_q).quadrature_variance(0.7);
        assert!((estimator_signal_noise(&pz, &st, &iso, &b).unwrap() - base - 0.4).abs() < 1e-12);
    }

    #[test]
    fn decay_time_matches_verification_scale() {
        let b = fig7(0.0);
        let d = b.derive().unwrap();
        let g = FilterGrid::default_for(&b).unwrap();
        for zeta in [0.0, PI / 2.0] {
            let p = closed_form_filters(&b, zeta, g).unwrap();
            let rate = envelope_decay_rate(&p.g2, p.step, 1e-9).unwrap();
            let want = b.omega_q * d.chi;
            assert!((rate / want - 1.0).abs() < 0.02, "{rate} {want}");
        }
    }

    #[test]
    fn weight_and_phase() {
        let b = fig7(0.0);
        let p = closed_form_filters(&b, 0.0, FilterGrid::default_for(&b).unwrap()).unwrap();
        assert!((p.weight()[0] - p.g2[0]).abs() < 1e-15);
        assert!((p.lo_phase()[0] - PI / 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn product_matches_identity(zf in 0.01f64..1.0, zx in 0.0f64..1.0, eta in 0.0f64..0.9, q in -1.0f64..2.0) {
            let b = NoiseBudget::from_ratios(5.0, 20.0, zf, zx, eta, q);
            let a = added_noise_covariance(&b).unwrap();
            let want = a.lambda * a.zeta_f_eff / (1.0 - eta);
            prop_assert!((a.u_add - want).abs() < 1e-12 * want);
            if a.lambda * a.zeta_f_eff < 1.0 - eta {
                prop_assert!(a.u_add < 1.0);
            }
        }

        #[test]
        fn normalization_on_circle(k in 0usize..16, zf in 0.05f64..0.5, q in 0.0f64..1.2) {
            let b = NoiseBudget::from_ratios(10.0, hz(100.0), zf, 0.2, 0.01, q);
            let zeta = 2.0 * PI * k as f64 / 16.0;
            let p = closed_form_filters(&b, zeta, FilterGrid::default_for(&b).unwrap()).unwrap();
            let (a, c) = normalization(&p, &b);
            prop_assert!((a - zeta.cos()).abs() < 1e-6 && (c - zeta.sin()).abs() < 1e-6);
        }
    }
}
