//! Spectral factorization `S = psi_plus * psi_minus` of a positive rational spectrum.

use num_complex::Complex64 as C;

use super::spectrum::{HalfPlane, Pole, RationalSpectrum};
use crate::error::{Error, Result};

/// Splits zeros and poles by half plane. `psi_plus` carries the lower-half-plane ones and
/// a positive leading coefficient; `psi_minus` is its reflection.
pub fn spectral_factorize(s: &RationalSpectrum) -> Result<(RationalSpectrum, RationalSpectrum)> {
    let lead = s.numerator()[s.num_degree()];
    if s.is_zero() {
        return Err(Error::NotFactorizable("spectrum vanishes identically".into()));
    }
    if lead.im.abs() > 1e-12 * lead.norm() || lead.re <= 0.0 {
        return Err(Error::NotFactorizable(format!(
            "leading coefficient {lead} is not real and positive"
        )));
    }
    let (nd, dd) = (s.num_degree(), s.den_degree());
    if nd % 2 != 0 || dd % 2 != 0 {
        return Err(Error::NotFactorizable(format!(
            "odd order: numerator degree {nd}, denominator degree {dd}"
        )));
    }
    let mut zeros_lower = Vec::new();
    let mut n_upper = 0;
    for z in s.zeros()? {
        match HalfPlane::of(z).map_err(|_| {
            Error::NotFactorizable(format!("zero {:e}{:+e}i on the real axis", z.re, z.im))
        })? {
            HalfPlane::Lower => zeros_lower.push(z),
            HalfPlane::Upper => n_upper += 1,
        }
    }
    let mut poles_lower = Vec::new();
    let mut p_upper = 0;
    for p in s.poles() {
        match HalfPlane::of(p.at)? {
            HalfPlane::Lower => poles_lower.push(*p),
            HalfPlane::Upper => p_upper += p.mult,
        }
    }
    let p_lower: usize = poles_lower.iter().map(|p| p.mult).sum();
    if zeros_lower.len() != n_upper || p_lower != p_upper {
        return Err(Error::NotFactorizable(
            "roots are not in conjugate pairs; spectrum is not real on the axis".into(),
        ));
    }
    let num = super::poly::scale(&super::poly::from_roots(&zeros_lower), C::new(lead.re.sqrt(), 0.0));
    let plus = RationalSpectrum::new(num, poles_lower.into_iter().map(|p| Pole { at: p.at, mult: p.mult }).collect());
    let minus = plus.reflect();
    Ok((plus, minus))
}
