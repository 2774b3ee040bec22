//! Causal/anticausal decomposition and the residue-sum inverse transform.
//!
//! Transform convention `f(Omega) = int f(t) e^{i Omega t} dt`: causal functions have
//! their poles in the lower half plane.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::spectrum::{HalfPlane, PartialFractions, Pole, RationalSpectrum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalSplit {
    /// Lower-half-plane poles plus the constant at infinity.
    pub plus: RationalSpectrum,
    /// Upper-half-plane poles.
    pub minus: RationalSpectrum,
    /// The value at infinity, included in `plus`.
    pub constant: C,
}

pub fn causal_split(f: &RationalSpectrum) -> Result<CausalSplit> {
    let pf = f.partial_fractions()?;
    let mut plus: Vec<(Pole, Vec<C>)> = Vec::new();
    let mut minus: Vec<(Pole, Vec<C>)> = Vec::new();
    for (p, coeffs) in pf.terms {
        match HalfPlane::of(p.at)? {
            HalfPlane::Lower => plus.push((p, coeffs)),
            HalfPlane::Upper => minus.push((p, coeffs)),
        }
    }
    Ok(CausalSplit {
        plus: PartialFractions::assemble(pf.constant, &plus),
        minus: PartialFractions::assemble(C::new(0.0, 0.0), &minus),
        constant: pf.constant,
    })
}

/// Time samples of a causal spectrum at `t >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Largest imaginary part dropped from the residue sum.
    pub max_imag: f64,
    /// Weight of the delta at `t = 0` carried by the constant at infinity.
    pub delta_weight: f64,
}

/// `g(t) = -i sum_{LHP} Res[g(Omega) e^{-i Omega t}]` for each `t` in `times`.
pub fn inverse_transform(g: &RationalSpectrum, times: &[f64]) -> Result<TimeSeries> {
    for p in g.poles() {
        if HalfPlane::of(p.at)? == HalfPlane::Upper {
            return Err(Error::CausalityViolation { re: p.at.re, im: p.at.im });
        }
    }
    let pf = g.partial_fractions()?;
    let mut values = Vec::with_capacity(times.len());
    let mut max_imag = 0.0f64;
    for &t in times {
        if t < 0.0 {
            values.push(0.0);
            continue;
        }
        let mut acc = C::new(0.0, 0.0);
        for (p, coeffs) in &pf.terms {
            // a_k/(z-p)^k e^{-izt}: residue a_k (-it)^{k-1}/(k-1)! e^{-ipt}
            let mut poly = C::new(0.0, 0.0);
            let mut pow = C::new(1.0, 0.0);
            let mut fact = 1.0;
            for (k, a) in coeffs.iter().enumerate() {
                if k > 0 {
                    pow *= C::new(0.0, -t);
                    fact *= k as f64;
                }
                poly += a * pow / fact;
            }
            acc += (C::new(0.0, -1.0) * p.at * t).exp() * poly;
        }
        let v = C::new(0.0, -1.0) * acc;
        max_imag = max_imag.max(v.im.abs());
        values.push(v.re);
    }
    Ok(TimeSeries {
        values,
        max_imag,
        delta_weight: pf.constant.re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn two_sided_exponential() {
        // 2a/(a^2 + w^2) = 2a / ((w - ia)(w + ia))
        let a = 0.7;
        let f = RationalSpectrum::from_real_coeffs(&[2.0 * a], &[a * a, 0.0, 1.0]).unwrap();
        let s = causal_split(&f).unwrap();
        for w in [-3.0, -0.2, 0.0, 1.5] {
            let z = c(w, 0.0);
            let want_plus = c(0.0, 1.0) / (z + c(0.0, a));
            let want_minus = c(0.0, -1.0) / (z - c(0.0, a));
            assert!((s.plus.eval(z) - want_plus).norm() < 1e-12);
            assert!((s.minus.eval(z) - want_minus).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_goes_to_plus() {
        let s = causal_split(&RationalSpectrum::constant(c(2.5, 0.0))).unwrap();
        assert!((s.plus.eval_real(1.0) - c(2.5, 0.0)).norm() < 1e-15);
        assert!(s.minus.is_zero());
    }

    #[test]
    fn axis_pole_rejected() {
        let f = RationalSpectrum::from_real_coeffs(&[1.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(causal_split(&f), Err(Error::NotFactorizable(_))));
    }

    #[test]
    fn exponential_decay() {
        let a = 1.3;
        let g = RationalSpectrum::new(vec![c(0.0, 1.0)], vec![Pole { at: c(0.0, -a), mult: 1 }]);
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let out = inverse_transform(&g, &ts).unwrap();
        for (t, v) in ts.iter().zip(&out.values) {
            assert!((v - (-a * t).exp()).abs() < 1e-14);
        }
        assert!(out.max_imag < 1e-15);
    }

    #[test]
    fn damped_sinusoid_is_real() {
        // -1/((w + i g)^2 - w0^2) <-> e^{-g t} sin(w0 t)/w0
        let (g0, w0) = (0.2, 1.7);
        let f = RationalSpectrum::new(
            vec![c(-1.0, 0.0)],
            vec![Pole { at: c(w0, -g0), mult: 1 }, Pole { at: c(-w0, -g0), mult: 1 }],
        );
        let ts: Vec<f64> = (0..100).map(|i| i as f64 * 0.05).collect();
        let out = inverse_transform(&f, &ts).unwrap();
        assert!(out.max_imag < 1e-12);
        for (t, v) in ts.iter().zip(&out.values) {
            assert!((v - (-g0 * t).exp() * (w0 * t).sin() / w0).abs() < 1e-13);
        }
    }

    #[test]
    fn double_pole_gives_t_exponential() {
        // i^2/(w + ia)^2 <-> -t e^{-at}... check sign through the residue formula
        let a = 0.5;
        let f = RationalSpectrum::new(vec![c(-1.0, 0.0)], vec![Pole { at: c(0.0, -a), mult: 2 }]);
        let out = inverse_transform(&f, &[0.0, 1.0, 2.0]).unwrap();
        // FT of t e^{-at} is 1/(a - i w)^2 = -1/(w + i a)^2
        for (t, v) in [0.0, 1.0, 2.0].iter().zip(&out.values) {
            assert!((v - t * (-a * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn anticausal_rejected() {
        let g = RationalSpectrum::new(vec![c(1.0, 0.0)], vec![Pole { at: c(0.0, 1.0), mult: 1 }]);
        assert!(matches!(inverse_transform(&g, &[0.0]), Err(Error::CausalityViolation { .. })));
    }

    fn random_spectrum() -> impl Strategy<Value = RationalSpectrum> {
        (
            proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..4),
            proptest::collection::vec((-3.0f64..3.0, 0.2f64..3.0, any::<bool>(), 1usize..3), 1..5),
        )
            .prop_map(|(num, poles)| {
                let num: Vec<C> = num.iter().map(|(a, b)| c(*a, *b)).collect();
                let mut ps: Vec<Pole> = Vec::new();
                for (re, im, up, mult) in poles {
                    let at = c(re, if up { im } else { -im });
                    if ps.iter().all(|p| (p.at - at).norm() > 0.3) {
                        ps.push(Pole { at, mult });
                    }
                }
                RationalSpectrum::new(num, ps)
            })
            .prop_filter("proper", |f| f.at_infinity().is_some())
    }

    proptest! {
        #[test]
        fn split_reconstructs(f in random_spectrum()) {
            let s = causal_split(&f).unwrap();
            for i in 0..41 {
                let z = c(-10.0 + 0.5 * i as f64, 0.0);
                let v = f.eval(z);
                prop_assert!((s.plus.eval(z) + s.minus.eval(z) - v).norm() <= 1e-10 * v.norm().max(1e-3));
            }
        }

        #[test]
        fn plus_part_is_idempotent(f in random_spectrum()) {
            let s = causal_split(&f).unwrap();
            let again = causal_split(&s.plus).unwrap();
            prop_assert!(again.minus.is_zero() || (0..5).all(|i| again.minus.eval_real(i as f64).norm() < 1e-10));
            for i in 0..5 {
                let z = c(i as f64 - 2.0, 0.0);
                prop_assert!((again.plus.eval(z) - s.plus.eval(z)).norm() < 1e-10 * s.plus.eval(z).norm().max(1.0));
            }
        }
    }
}
