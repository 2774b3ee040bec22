//! Wigner-function reconstruction with Gaussian verification noise.
//!
//! Grids live in `u = x/dx_q`, `v = p/dp_q`, where the ground state has unit variance per
//! axis and the Heisenberg-limited noise is the identity. The Fock-state formulas are
//! usually written in `X = u/sqrt(2)`, `P = v/sqrt(2)` (variance 1/2); [`FockWigner::eval_xp`]
//! uses that scaling and [`FockWigner::eval`] the grid one, `W_uv = W_XP / 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::gaussian::{wigner, Cov2, GaussianState};

/// Kernel truncation in standard deviations; the dropped mass is below 1e-9.
const KERNEL_SIGMAS: f64 = 6.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockWigner {
    pub n: u8,
}

impl FockWigner {
    pub fn new(n: u8) -> Result<Self> {
        if n > 1 {
            return Err(Error::param("n", "only n = 0 and n = 1 are supported"));
        }
        Ok(FockWigner { n })
    }

    /// In quadratures with variance 1/2 per axis.
    pub fn eval_xp(&self, x: f64, p: f64) -> f64 {
        let r2 = x * x + p * p;
        let g = (-r2).exp() / PI;
        match self.n {
            0 => g,
            _ => (2.0 * r2 - 1.0) * g,
        }
    }

    /// In grid units.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        0.5 * self.eval_xp(u / SQRT_2, v / SQRT_2)
    }
}

/// Analytic phase-space densities in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WignerSource {
    Gaussian(GaussianState),
    Fock(FockWigner),
}

impl WignerSource {
    pub fn vacuum() -> Self {
        WignerSource::Fock(FockWigner { n: 0 })
    }

    pub fn single_photon() -> Self {
        WignerSource::Fock(FockWigner { n: 1 })
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            WignerSource::Gaussian(s) => wigner(s, u, v).unwrap_or(0.0),
            WignerSource::Fock(f) => f.eval(u, v),
        }
    }

    /// Closed form of the source convolved with a centered Gaussian of covariance `noise`.
    pub fn smoothed(&self, noise: &Cov2, u: f64, v: f64) -> Result<f64> {
        match self {
            WignerSource::Gaussian(s) => wigner(
                &GaussianState {
                    mean: s.mean,
                    cov: s.cov + *noise,
                },
                u,
                v,
            ),
            WignerSource::Fock(f) => {
                // W1 = (Laplacian + 1) N_I, so W1 * N_V = (Laplacian + 1) N_{I+V}
                let sigma = Cov2::new(1.0 + noise.xx, noise.xp, 1.0 + noise.pp);
                let det = sigma.det();
                let g = wigner(&GaussianState::centered(sigma), u, v)?;
                if f.n == 0 {
                    return Ok(g);
                }
                let inv = Cov2::new(sigma.pp / det, -sigma.xp / det, sigma.xx / det);
                let a = inv.xx * u + inv.xp * v;
                let b = inv.xp * u + inv.pp * v;
                Ok(g * (1.0 + a * a + b * b - inv.trace()))
            }
        }
    }
}

/// Square grid `[-half_width, half_width]^2` with `points` samples per axis. Values are
/// row major with `v` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub half_width: f64,
    pub points: usize,
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    pub fn at(&self, iu: usize, iv: usize) -> f64 {
        self.values[iv * self.points + iu]
    }

    /// The `v = 0` row (the middle one for an odd number of points).
    pub fn slice_v0(&self) -> Vec<(f64, f64)> {
        let mid = self.points / 2;
        (0..self.points).map(|i| (self.coord(i), self.at(i, mid))).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Two-dimensional trapezoid integral.
    pub fn integral(&self) -> f64 {
        let n = self.points;
        let h = self.step();
        let w = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += w(i) * w(j) * self.values[j * n + i];
            }
        }
        acc * h * h
    }

    /// Grid with the axes exchanged.
    pub fn transposed(&self) -> PhaseSpaceGrid {
        let n = self.points;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                values[i * n + j] = self.values[j * n + i];
            }
        }
        PhaseSpaceGrid { values, ..*self }
    }

    /// Point samples of `source`.
    pub fn sample(source: &WignerSource, layout: GridLayout) -> Result<PhaseSpaceGrid> {
        layout.check()?;
        let n = layout.points;
        let grid = PhaseSpaceGrid { half_width: layout.half_width, points: n, values: Vec::new() };
        let coords = grid.coords();
        let values = (0..n * n)
            .into_par_iter()
            .map(|k| source.eval(coords[k % n], coords[k / n]))
            .collect();
        Ok(PhaseSpaceGrid { values, ..grid })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridLayout {
    fn default() -> Self {
        GridLayout { half_width: 5.0, points: 401 }
    }
}

impl GridLayout {
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Same window with the step divided by `factor`.
    pub fn refined(&self, factor: f64) -> GridLayout {
        let intervals = ((self.points - 1) as f64 * factor).round().max(2.0) as usize;
        GridLayout { half_width: self.half_width, points: intervals + 1 }
    }

    fn check(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) || self.points < 3 {
            return Err(Error::param("grid", "needs a positive half width and at least 3 points"));
        }
        Ok(())
    }
}

fn kernel(var: f64, h: f64) -> Vec<f64> {
    let reach = (KERNEL_SIGMAS * var.sqrt() / h).ceil() as usize;
    let mut k: Vec<f64> = (0..=2 * reach)
        .map(|i| {
            let s = (i as f64 - reach as f64) * h;
            (-0.5 * s * s / var).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= total);
    k
}

/// Convolves `source` with the Gaussian of covariance `noise` (grid units) on `layout`.
///
/// The noise is split as a `v` spread of variance `V_pp` along the sheared direction
/// `(V_xp/V_pp, 1)` followed by a `u` spread of variance `V_xx - V_xp^2/V_pp`; the first pass
/// is summed over exact source values and the second over the resulting grid rows.
/// A zero `noise` returns plain samples.
pub fn reconstruct(source: &WignerSource, noise: &Cov2, layout: GridLayout) -> Result<PhaseSpaceGrid> {
    layout.check()?;
    if *noise == Cov2::default() {
        return PhaseSpaceGrid::sample(source, layout);
    }
    let (lmin, _) = noise.eigenvalues();
    if !(lmin > 0.0) {
        return Err(Error::InvalidCovariance(format!(
            "verification noise must be positive definite, smallest eigenvalue {lmin:e}"
        )));
    }
    let h = layout.step();
    let limit = lmin.sqrt() / 4.0;
    if h > limit * (1.0 + 1e-12) {
        return Err(Error::Resolution { step: h, limit });
    }
    let n = layout.points;
    let shear = noise.xp / noise.pp;
    let cond = noise.xx - noise.xp * noise.xp / noise.pp;
    let kv = kernel(noise.pp, h);
    let ku = kernel(cond, h);
    let (rv, ru) = (kv.len() / 2, ku.len() / 2);
    let x0 = -layout.half_width;
    let coord = |i: isize| x0 + i as f64 * h;

    let padded = n + 2 * ru;
    // rows[j][m] holds the v pass at (u_{m - ru}, v_j)
    let rows: Vec<Vec<f64>> = if shear == 0.0 {
        // separable: both passes over one sampled block
        let rows_src = n + 2 * rv;
        let block: Vec<Vec<f64>> = (0..rows_src)
            .into_par_iter()
            .map(|jj| {
                let v = coord(jj as isize - rv as isize);
                (0..padded).map(|m| source.eval(coord(m as isize - ru as isize), v)).collect()
            })
            .collect();
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut acc = vec![0.0; padded];
                for (k, w) in kv.iter().enumerate() {
                    // offset s = (k - rv) h, sample at v_j - s
                    let src = &block[j + 2 * rv - k];
                    acc.iter_mut().zip(src).for_each(|(a, s)| *a += w * s);
                }
                acc
            })
            .collect()
    } else {
        (0..n)
            .into_par_iter()
            .map(|j| {
                let v = coord(j as isize);
                (0..padded)
                    .map(|m| {
                        let u = coord(m as isize - ru as isize);
                        kv.iter()
                            .enumerate()
                            .map(|(k, w)| {
                                let s = (k as f64 - rv as f64) * h;
                                w * source.eval(u - shear * s, v - s)
                            })
                            .sum::<f64>()
                    })
                    .collect()
            })
            .collect()
    };
    let values: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|row| {
            let ku = &ku;
            (0..n).map(move |i| ku.iter().enumerate().map(|(k, w)| w * row[i + 2 * ru - k]).sum::<f64>())
        })
        .collect();
    Ok(PhaseSpaceGrid { half_width: layout.half_width, points: n, values })
}

/// Husimi function: smoothing by the Heisenberg-limited noise.
pub fn q_function(source: &WignerSource, layout: GridLayout) -> Result<PhaseSpaceGrid> {
    reconstruct(source, &Cov2::diag(1.0, 1.0), layout)
}

/// `int max(0, -W)` over the grid.
pub fn negativity_volume(grid: &PhaseSpaceGrid) -> f64 {
    let h = grid.step();
    grid.values.iter().map(|w| (-w).max(0.0)).sum::<f64>() * h * h
}

/// Extent and depth of the negative dip on the `v = 0` slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipShape {
    /// Half width of the negative region along `u`, by linear interpolation.
    pub half_width: f64,
    /// `W(0, 0)` divided by the reference peak.
    pub depth: f64,
}

pub fn dip_shape(grid: &PhaseSpaceGrid, reference_peak: f64) -> DipShape {
    let slice = grid.slice_v0();
    let mid = grid.points / 2;
    let centre = slice[mid].1;
    let mut half_width = 0.0;
    if centre < 0.0 {
        for i in mid..grid.points - 1 {
            let (u0, w0) = slice[i];
            let (u1, w1) = slice[i + 1];
            if w1 >= 0.0 {
                half_width = u0 + (u1 - u0) * (-w0) / (w1 - w0);
                break;
            }
        }
    }
    DipShape {
        half_width,
        depth: centre / reference_peak,
    }
}
