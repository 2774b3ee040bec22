//! Rational functions of frequency with factored, monic denominators.
//!
//! Coefficients are complex: plus and minus factors of a real spectrum are not real
//! polynomials, and the solver multiplies them freely.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// Relative distance under which two roots are treated as one repeated root.
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    /// Classifies a root; anything within `1e-10 (1 + |z|)` of the real axis is an error.
    pub fn of(z: C) -> Result<HalfPlane> {
        if z.im.abs() < 1e-10 * (1.0 + z.norm()) {
            return Err(Error::NotFactorizable(format!(
                "root {:e}{:+e}i lies on the real axis",
                z.re, z.im
            )));
        }
        Ok(if z.im > 0.0 { HalfPlane::Upper } else { HalfPlane::Lower })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub at: C,
    pub mult: usize,
}

/// `num(z) / prod (z - p)^mult`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalSpectrum {
    num: Vec<C>,
    poles: Vec<Pole>,
}

/// Principal parts: `constant + sum_p sum_k coeffs[k-1] / (z - p)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    pub constant: C,
    pub terms: Vec<(Pole, Vec<C>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub upper_poles: Vec<Pole>,
    pub lower_poles: Vec<Pole>,
    pub upper_zeros: Vec<C>,
    pub lower_zeros: Vec<C>,
    pub axis_zeros: Vec<C>,
}

fn cluster(roots: &[C]) -> Vec<Pole> {
    let mut out: Vec<(C, usize)> = Vec::new();
    for r in roots {
        match out
            .iter_mut()
            .find(|(c, _)| (c - r).norm() < CLUSTER_TOL * (1.0 + r.norm()))
        {
            Some(entry) => {
                let n = entry.1 as f64;
                entry.0 = (entry.0 * n + r) / (n + 1.0);
                entry.1 += 1;
            }
            None => out.push((*r, 1)),
        }
    }
    out.into_iter().map(|(at, mult)| Pole { at, mult }).collect()
}

impl RationalSpectrum {
    pub fn new(num: Vec<C>, poles: Vec<Pole>) -> Self {
        let mut merged: Vec<Pole> = Vec::new();
        for p in poles {
            match merged.iter_mut().find(|q| q.at == p.at) {
                Some(q) => q.mult += p.mult,
                None => merged.push(p),
            }
        }
        RationalSpectrum {
            num: poly::trim(&num),
            poles: merged,
        }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c], Vec::new())
    }

    /// From coefficient lists; the denominator is factored here.
    pub fn from_coeffs(num: &[C], den: &[C]) -> Result<Self> {
        let den = poly::trim(den);
        if poly::is_zero(&den) {
            return Err(Error::NumericalDomain("zero denominator".into()));
        }
        let lead = den[den.len() - 1];
        let roots = poly::roots(&den)?;
        Ok(Self::new(poly::scale(num, 1.0 / lead), cluster(&roots)))
    }

    pub fn from_real_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|x| C::new(*x, 0.0)).collect::<Vec<_>>();
        Self::from_coeffs(&c(num), &c(den))
    }

    pub fn numerator(&self) -> &[C] {
        &self.num
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// Monic denominator coefficients.
    pub fn denominator(&self) -> Vec<C> {
        let mut d = vec![C::new(1.0, 0.0)];
        for p in &self.poles {
            for _ in 0..p.mult {
                d = poly::mul(&d, &[-p.at, C::new(1.0, 0.0)]);
            }
        }
        d
    }

    pub fn num_degree(&self) -> usize {
        poly::degree(&self.num)
    }

    pub fn den_degree(&self) -> usize {
        self.poles.iter().map(|p| p.mult).sum()
    }

    pub fn is_zero(&self) -> bool {
        poly::is_zero(&self.num)
    }

    /// Limit at infinity; `None` when the function grows there.
    pub fn at_infinity(&self) -> Option<C> {
        let (n, d) = (self.num_degree(), self.den_degree());
        if self.is_zero() || n < d {
            Some(C::new(0.0, 0.0))
        } else if n == d {
            Some(self.num[n])
        } else {
            None
        }
    }

    pub fn eval(&self, z: C) -> C {
        let mut v = poly::eval(&self.num, z);
        for p in &self.poles {
            v /= (z - p.at).powu(p.mult as u32);
        }
        v
    }

    pub fn eval_real(&self, omega: f64) -> C {
        self.eval(C::new(omega, 0.0))
    }

    fn den_series(&self, z0: C, skip: Option<usize>) -> Vec<C> {
        let mut d = vec![C::new(1.0, 0.0)];
        for (i, p) in self.poles.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            for _ in 0..p.mult {
                d = poly::mul(&d, &[z0 - p.at, C::new(1.0, 0.0)]);
            }
        }
        d
    }

    /// Taylor coefficients at `z0` up to `order`.
    pub fn taylor(&self, z0: C, order: usize) -> Result<Vec<C>> {
        if let Some(p) = self
            .poles
            .iter()
            .find(|p| (z0 - p.at).norm() <= 1e-14 * (1.0 + p.at.norm()))
        {
            return Err(Error::NumericalDomain(format!(
                "Taylor expansion requested at pole {:e}{:+e}i",
                p.at.re, p.at.im
            )));
        }
        Ok(poly::series_div(&poly::shift(&self.num, z0), &self.den_series(z0, None), order))
    }

    pub fn scale(&self, s: C) -> Self {
        RationalSpectrum {
            num: poly::trim(&poly::scale(&self.num, s)),
            poles: self.poles.clone(),
        }
    }

    pub fn mul(&self, other: &RationalSpectrum) -> Self {
        let mut poles = self.poles.clone();
        for p in &other.poles {
            match poles
                .iter_mut()
                .find(|q| (q.at - p.at).norm() <= 1e-13 * (1.0 + p.at.norm()))
            {
                Some(q) => q.mult += p.mult,
                None => poles.push(*p),
            }
        }
        RationalSpectrum {
            num: poly::trim(&poly::mul(&self.num, &other.num)),
            poles,
        }
    }

    /// `conj(f(conj z))`: for a spectrum real on the axis this maps the plus factor to
    /// the minus factor.
    pub fn reflect(&self) -> Self {
        RationalSpectrum {
            num: self.num.iter().map(|c| c.conj()).collect(),
            poles: self
                .poles
                .iter()
                .map(|p| Pole { at: p.at.conj(), mult: p.mult })
                .collect(),
        }
    }

    /// Sum of two spectra over the union of their poles.
    pub fn add(&self, other: &RationalSpectrum) -> Self {
        let mut poles = self.poles.clone();
        for p in &other.poles {
            match poles.iter_mut().find(|q| q.at == p.at) {
                Some(q) => q.mult = q.mult.max(p.mult),
                None => poles.push(*p),
            }
        }
        let lift = |f: &RationalSpectrum| {
            let mut n = f.num.clone();
            for q in &poles {
                let have = f.poles.iter().find(|p| p.at == q.at).map_or(0, |p| p.mult);
                for _ in have..q.mult {
                    n = poly::mul(&n, &[-q.at, C::new(1.0, 0.0)]);
                }
            }
            n
        };
        let num = poly::add(&lift(self), &lift(other));
        RationalSpectrum {
            num: poly::trim(&num),
            poles,
        }
    }

    pub fn zeros(&self) -> Result<Vec<C>> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        poly::roots(&self.num)
    }

    pub fn partial_fractions(&self) -> Result<PartialFractions> {
        let constant = self.at_infinity().ok_or_else(|| {
            Error::NotFactorizable(format!(
                "numerator degree {} exceeds denominator degree {}",
                self.num_degree(),
                self.den_degree()
            ))
        })?;
        let mut terms = Vec::with_capacity(self.poles.len());
        for (i, p) in self.poles.iter().enumerate() {
            let h = poly::series_div(
                &poly::shift(&self.num, p.at),
                &self.den_series(p.at, Some(i)),
                p.mult - 1,
            );
            // coefficient of (z-p)^{-k} is h_{mult-k}
            let coeffs = (1..=p.mult).map(|k| h[p.mult - k]).collect();
            terms.push((*p, coeffs));
        }
        Ok(PartialFractions { constant, terms })
    }

    pub fn constellation(&self) -> Result<Constellation> {
        let mut c = Constellation {
            upper_poles: Vec::new(),
            lower_poles: Vec::new(),
            upper_zeros: Vec::new(),
            lower_zeros: Vec::new(),
            axis_zeros: Vec::new(),
        };
        for p in &self.poles {
            match HalfPlane::of(p.at)? {
                HalfPlane::Upper => c.upper_poles.push(*p),
                HalfPlane::Lower => c.lower_poles.push(*p),
            }
        }
        for z in self.zeros()? {
            match HalfPlane::of(z) {
                Ok(HalfPlane::Upper) => c.upper_zeros.push(z),
                Ok(HalfPlane::Lower) => c.lower_zeros.push(z),
                Err(_) => c.axis_zeros.push(z),
            }
        }
        Ok(c)
    }
}

impl PartialFractions {
    /// Rebuilds a single fraction over the product of the kept poles.
    pub fn assemble(constant: C, terms: &[(Pole, Vec<C>)]) -> RationalSpectrum {
        let poles: Vec<Pole> = terms.iter().map(|(p, _)| *p).collect();
        let full = |skip: usize, keep: usize| {
            let mut d = vec![C::new(1.0, 0.0)];
            for (i, p) in poles.iter().enumerate() {
                let m = if i == skip { keep } else { p.mult };
                for _ in 0..m {
                    d = poly::mul(&d, &[-p.at, C::new(1.0, 0.0)]);
                }
            }
            d
        };
        let mut num = poly::scale(&full(usize::MAX, 0), constant);
        for (i, (p, coeffs)) in terms.iter().enumerate() {
            for (k, a) in coeffs.iter().enumerate() {
                // a / (z-p)^{k+1} over the common denominator
                let part = poly::scale(&full(i, p.mult - (k + 1)), *a);
                num = poly::add(&num, &part);
            }
        }
        RationalSpectrum::new(num, poles)
    }

    pub fn eval(&self, z: C) -> C {
        let mut v = self.constant;
        for (p, coeffs) in &self.terms {
            for (k, a) in coeffs.iter().enumerate() {
                v += a / (z - p.at).powu(k as u32 + 1);
            }
        }
        v
    }
}
