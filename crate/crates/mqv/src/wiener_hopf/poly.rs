//! Complex polynomials, coefficients in ascending order.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

use crate::error::{Error, Result};

pub fn trim(p: &[C]) -> Vec<C> {
    let mut v = p.to_vec();
    while v.len() > 1 && v[v.len() - 1] == C::new(0.0, 0.0) {
        v.pop();
    }
    if v.is_empty() {
        v.push(C::new(0.0, 0.0));
    }
    v
}

pub fn degree(p: &[C]) -> usize {
    trim(p).len() - 1
}

pub fn is_zero(p: &[C]) -> bool {
    p.iter().all(|c| *c == C::new(0.0, 0.0))
}

pub fn eval(p: &[C], z: C) -> C {
    p.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub fn derivative(p: &[C]) -> Vec<C> {
    if p.len() <= 1 {
        return vec![C::new(0.0, 0.0)];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

pub fn mul(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

pub fn scale(a: &[C], s: C) -> Vec<C> {
    a.iter().map(|c| c * s).collect()
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[C]) -> Vec<C> {
    roots
        .iter()
        .fold(vec![C::new(1.0, 0.0)], |acc, r| mul(&acc, &[-r, C::new(1.0, 0.0)]))
}

/// Coefficients of `p(z0 + d)` in powers of `d`.
pub fn shift(p: &[C], z0: C) -> Vec<C> {
    // repeated synthetic division
    let mut a = p.to_vec();
    let n = a.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let t = a[j + 1] * z0;
            a[j] += t;
        }
    }
    a
}

/// First `order + 1` series coefficients of `num / den`, both given as series.
pub fn series_div(num: &[C], den: &[C], order: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut s = num.get(k).copied().unwrap_or_default();
        for j in 0..k {
            s -= out[j] * den.get(k - j).copied().unwrap_or_default();
        }
        out.push(s / den[0]);
    }
    out
}

/// All roots, from companion-matrix eigenvalues polished by Aberth iterations.
pub fn roots(p: &[C]) -> Result<Vec<C>> {
    let p = trim(p);
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::RootFinding { degree: n });
    }
    // exact zeros at the origin
    let lead_zeros = p.iter().take_while(|c| **c == C::new(0.0, 0.0)).count();
    let core = &p[lead_zeros..];
    let m = core.len() - 1;
    let mut out = vec![C::new(0.0, 0.0); lead_zeros];
    if m == 0 {
        return Ok(out);
    }
    if m == 1 {
        out.push(-core[0] / core[1]);
        return Ok(out);
    }
    let lead = core[m];
    let mut comp = DMatrix::<C>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..m {
        comp[(i, m - 1)] = -core[i] / lead;
    }
    let mut z: Vec<C> = match nalgebra::linalg::Schur::try_new(comp, 1e-15, 10_000) {
        Some(s) => {
            let (_, t) = s.unpack();
            (0..m).map(|i| t[(i, i)]).collect()
        }
        None => {
            // Aberth's usual starting circle
            let r = core.iter().map(|c| (c / lead).norm()).fold(0.0f64, f64::max).max(1.0);
            (0..m)
                .map(|k| C::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64))
                .collect()
        }
    };
    aberth(core, &mut z);
    if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::RootFinding { degree: n });
    }
    out.extend(z);
    Ok(out)
}

fn aberth(p: &[C], z: &mut [C]) {
    let dp = derivative(p);
    let resid = |z: &[C]| z.iter().map(|r| eval(p, *r).norm()).sum::<f64>();
    let start = resid(z);
    let saved = z.to_vec();
    for _ in 0..100 {
        let mut worst = 0.0f64;
        for k in 0..z.len() {
            let pv = eval(p, z[k]);
            if pv == C::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / eval(&dp, z[k]);
            let mut s = C::new(0.0, 0.0);
            for j in 0..z.len() {
                if j != k {
                    let d = z[k] - z[j];
                    if d != C::new(0.0, 0.0) {
                        s += 1.0 / d;
                    }
                }
            }
            let step = ratio / (C::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    if !(resid(z) <= start) {
        z.copy_from_slice(&saved);
    }
}
