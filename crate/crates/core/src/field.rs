//! Uniform-grid sampled fields and the integral Fourier transform
//! `f̂(ξ) = ∫ f(x) e^{-2πi⟨x,ξ⟩} dx`.
//!
//! A grid with `n` samples per axis and half-width `L` has space nodes
//! `x_j = (j - n/2)·Δx`, `Δx = 2L/n`, and frequency nodes
//! `ξ_k = c + (k - n/2)·Δξ`, `Δξ = 1/(2L)`, where `c` is the (usually zero)
//! frequency-box center. Both `x = 0` and `ξ = c` are nodes. A sampled
//! field stands for the band-limited function whose spectrum lies inside
//! the frequency box.

use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;
use crate::profile::mollifier;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MAX_SAMPLES: [usize; 3] = [4096, 1024, 256];

/// Boundary/peak ratio that generators guarantee.
pub const GENERATOR_DECAY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_widths: Vec<f64>,
    n: usize,
    freq_center: Vec<f64>,
}

impl Grid {
    /// Isotropic grid in dimension `dim`.
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        Self::anisotropic(&vec![half_width; dim], n)
    }

    /// Grid with a separate half-width per axis and the same sample count.
    pub fn anisotropic(half_widths: &[f64], n: usize) -> Result<Self> {
        let dim = half_widths.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} is not a power of two")));
        }
        if n < 8 || n > MAX_SAMPLES[dim - 1] {
            return Err(Error::InvalidGrid(format!(
                "n = {n} outside 8..={} for d = {dim}",
                MAX_SAMPLES[dim - 1]
            )));
        }
        if let Some(h) = half_widths.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidGrid(format!("half-width {h} must be positive")));
        }
        Ok(Self { half_widths: half_widths.to_vec(), n, freq_center: vec![0.0; dim] })
    }

    /// Moves the center of the frequency box.
    pub fn with_freq_center(mut self, center: &[f64]) -> Result<Self> {
        if center.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: center.len() });
        }
        self.freq_center = center.to_vec();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self, axis: usize) -> f64 {
        self.half_widths[axis]
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn freq_center(&self) -> &[f64] {
        &self.freq_center
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / self.n as f64
    }

    pub fn dual_spacing(&self, axis: usize) -> f64 {
        0.5 / self.half_widths[axis]
    }

    /// Half-width of the frequency box, `n·Δξ/2`.
    pub fn freq_half_width(&self, axis: usize) -> f64 {
        self.n as f64 * self.dual_spacing(axis) / 2.0
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn dual_cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.dual_spacing(a)).product()
    }

    /// True when all axes share one half-width and the frequency box is centered.
    pub fn is_cube(&self) -> bool {
        self.half_widths.iter().all(|h| *h == self.half_widths[0])
            && self.freq_center.iter().all(|c| *c == 0.0)
    }

    pub fn space_coord(&self, axis: usize, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing(axis)
    }

    pub fn freq_coord(&self, axis: usize, k: usize) -> f64 {
        self.freq_center[axis] + (k as f64 - (self.n / 2) as f64) * self.dual_spacing(axis)
    }

    pub fn coord(&self, domain: Domain, axis: usize, j: usize) -> f64 {
        match domain {
            Domain::Space => self.space_coord(axis, j),
            Domain::Frequency => self.freq_coord(axis, j),
        }
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unravel(&self, mut index: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim()).rev() {
            out[a] = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn point(&self, domain: Domain, index: usize) -> Vec<f64> {
        let idx = self.unravel(index);
        (0..self.dim()).map(|a| self.coord(domain, a, idx[a])).collect()
    }

    /// Whether `point` lies in the frequency box `[c - n·Δξ/2, c + n·Δξ/2)`.
    pub fn contains_freq(&self, point: &[f64]) -> bool {
        (0..self.dim()).all(|a| {
            let lo = self.freq_coord(a, 0);
            point[a] >= lo && point[a] < lo + self.n as f64 * self.dual_spacing(a)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    grid: Grid,
    domain: Domain,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn from_values(grid: Grid, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { grid, domain, values })
    }

    pub fn zeros(grid: Grid, domain: Domain) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, domain, values }
    }

    /// Samples `f` at every node of `grid` in the given domain.
    pub fn from_fn<F>(grid: Grid, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(domain, i)))
            .collect();
        Self { grid, domain, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn node(&self, index: usize) -> Vec<f64> {
        self.grid.point(self.domain, index)
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&[f64], Complex64) -> Complex64 + Sync,
    {
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| f(&self.node(i), *v))
            .collect();
        Self { grid: self.grid.clone(), domain: self.domain, values }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v * c)
    }

    /// Pointwise `self - other`; grids and domains must match.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid || self.domain != other.domain {
            return Err(invalid("fields live on different grids or domains"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { grid: self.grid.clone(), domain: self.domain, values })
    }

    /// Reinterprets the samples on another grid with the same shape.
    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        if grid.len() != self.grid.len() || grid.dim() != self.grid.dim() {
            return Err(invalid("replacement grid has a different shape"));
        }
        Ok(Self { grid, domain: self.domain, values: self.values.clone() })
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the box faces divided by the peak modulus.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.n;
        let d = self.grid.dim();
        let edge = (0..self.values.len())
            .filter(|&i| {
                let idx = self.grid.unravel(i);
                (0..d).any(|a| idx[a] == 0 || idx[a] == n - 1)
            })
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    pub fn check_decay(&self, limit: f64) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > limit {
            return Err(Error::BoundaryDecay { ratio, limit });
        }
        Ok(())
    }

    /// Tensor Lagrange interpolation with `order` points per axis.
    pub fn interpolate_with_order(&self, point: &[f64], order: usize) -> Result<Complex64> {
        let g = &self.grid;
        let d = g.dim();
        if point.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: point.len() });
        }
        let mut bases = [0usize; 3];
        let mut weights = [[0.0f64; 8]; 3];
        for a in 0..d {
            let h = match self.domain {
                Domain::Space => g.spacing(a),
                Domain::Frequency => g.dual_spacing(a),
            };
            let x0 = g.coord(self.domain, a, 0);
            let u = (point[a] - x0) / h;
            if !(u >= 0.0 && u <= (g.n - 1) as f64) {
                return Err(Error::OutsideBox { point: point.to_vec() });
            }
            let base = (u.floor() as isize - (order as isize / 2 - 1))
                .clamp(0, (g.n - order) as isize) as usize;
            bases[a] = base;
            for (m, w) in weights[a].iter_mut().enumerate().take(order) {
                let xm = (base + m) as f64;
                *w = (0..order)
                    .filter(|&l| l != m)
                    .map(|l| {
                        let xl = (base + l) as f64;
                        (u - xl) / (xm - xl)
                    })
                    .product();
            }
        }
        let n = g.n;
        let mut acc = Complex64::new(0.0, 0.0);
        let combos = order.pow(d as u32);
        for c in 0..combos {
            let mut rem = c;
            let mut flat = 0usize;
            let mut w = 1.0;
            for a in 0..d {
                let m = rem % order;
                rem /= order;
                w *= weights[a][m];
                flat = flat * n + bases[a] + m;
            }
            acc += self.values[flat] * w;
        }
        Ok(acc)
    }

    /// Order-4 local interpolation at an off-grid point of the field's domain.
    pub fn interpolate(&self, point: &[f64]) -> Result<Complex64> {
        self.interpolate_with_order(point, 4)
    }
}

/// Applies a 1-D FFT along every axis of a row-major `n^d` array.
pub(crate) fn fft_all_axes(values: &mut [Complex64], n: usize, dim: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    for axis in 0..dim {
        let inner = n.pow((dim - 1 - axis) as u32);
        values.par_chunks_mut(n * inner).for_each(|block| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for i in 0..inner {
                for j in 0..n {
                    line[j] = block[j * inner + i];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    block[j * inner + i] = line[j];
                }
            }
        });
    }
}

fn checkerboard(values: &mut [Complex64], grid: &Grid) {
    let d = grid.dim();
    values.par_iter_mut().enumerate().for_each(|(i, v)| {
        let idx = grid.unravel(i);
        if (0..d).map(|a| idx[a]).sum::<usize>() % 2 == 1 {
            *v = -*v;
        }
    });
}

fn modulate(values: &mut [Complex64], grid: &Grid, sign: f64) {
    if grid.freq_center.iter().all(|c| *c == 0.0) {
        return;
    }
    values.par_iter_mut().enumerate().for_each(|(i, v)| {
        let x = grid.point(Domain::Space, i);
        let phase: f64 = x.iter().zip(&grid.freq_center).map(|(a, b)| a * b).sum();
        *v *= Complex64::from_polar(1.0, sign * 2.0 * PI * phase);
    });
}

/// Riemann-sum approximation of `f̂` on the dual grid.
pub fn fourier_transform(f: &SampledField) -> Result<SampledField> {
    if f.domain != Domain::Space {
        return Err(Error::WrongDomain { expected: Domain::Space, found: f.domain });
    }
    let grid = &f.grid;
    let mut v = f.values.clone();
    modulate(&mut v, grid, -1.0);
    checkerboard(&mut v, grid);
    fft_all_axes(&mut v, grid.n, grid.dim(), FftDirection::Forward);
    checkerboard(&mut v, grid);
    let vol = grid.cell_volume();
    v.par_iter_mut().for_each(|x| *x *= vol);
    Ok(SampledField { grid: grid.clone(), domain: Domain::Frequency, values: v })
}

/// Inverse of [`fourier_transform`]: `f(x) = ∫ F(ξ) e^{2πi⟨x,ξ⟩} dξ` at the space nodes.
pub fn inverse_fourier_transform(big_f: &SampledField) -> Result<SampledField> {
    if big_f.domain != Domain::Frequency {
        return Err(Error::WrongDomain { expected: Domain::Frequency, found: big_f.domain });
    }
    let grid = &big_f.grid;
    let mut v = big_f.values.clone();
    checkerboard(&mut v, grid);
    fft_all_axes(&mut v, grid.n, grid.dim(), FftDirection::Inverse);
    checkerboard(&mut v, grid);
    let vol = grid.dual_cell_volume();
    v.par_iter_mut().for_each(|x| *x *= vol);
    modulate(&mut v, grid, 1.0);
    Ok(SampledField { grid: grid.clone(), domain: Domain::Space, values: v })
}

/// `(∫|f|^p)^{1/p}` by Riemann sum in the field's own domain; `p = ∞` is the max norm.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.peak());
    }
    let vol = match f.domain {
        Domain::Space => f.grid.cell_volume(),
        Domain::Frequency => f.grid.dual_cell_volume(),
    };
    let peak = f.peak();
    if peak == 0.0 {
        return Ok(0.0);
    }
    // Scale by the peak so large p does not overflow.
    let sum: f64 = f.values.par_iter().map(|v| (v.norm() / peak).powf(p)).sum();
    Ok(peak * (sum * vol).powf(1.0 / p))
}

/// Schwartz-class test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `exp(-π|x - center|²/width²)`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// Gaussian times `exp(2πi⟨frequency, x⟩)`.
    ModulatedGaussian { center: Vec<f64>, width: f64, frequency: Vec<f64> },
    /// Compactly supported mollifier of the given radius times a polynomial.
    HatTimesPoly { center: Vec<f64>, radius: f64, poly: Polynomial },
}

impl TestFunction {
    pub fn gaussian(dim: usize) -> Self {
        TestFunction::Gaussian { center: vec![0.0; dim], width: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Gaussian { center, .. }
            | TestFunction::ModulatedGaussian { center, .. }
            | TestFunction::HatTimesPoly { center, .. } => center.len(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            TestFunction::Gaussian { center, width } => {
                Complex64::new((-PI * dist2(x, center) / (width * width)).exp(), 0.0)
            }
            TestFunction::ModulatedGaussian { center, width, frequency } => {
                let phase: f64 = x.iter().zip(frequency).map(|(a, b)| a * b).sum();
                Complex64::from_polar((-PI * dist2(x, center) / (width * width)).exp(), 2.0 * PI * phase)
            }
            TestFunction::HatTimesPoly { center, radius, poly } => {
                let r = dist2(x, center).sqrt() / radius;
                let shifted: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                Complex64::new(mollifier(r) * poly.eval(&shifted), 0.0)
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim() });
        }
        match self {
            TestFunction::Gaussian { width, .. } | TestFunction::ModulatedGaussian { width, .. }
                if !(*width > 0.0) =>
            {
                Err(invalid("width must be positive"))
            }
            TestFunction::ModulatedGaussian { frequency, .. } if frequency.len() != dim => {
                Err(Error::DimensionMismatch { expected: dim, found: frequency.len() })
            }
            TestFunction::HatTimesPoly { radius, poly, .. } => {
                if !(*radius > 0.0) {
                    Err(invalid("radius must be positive"))
                } else if poly.dim() != dim {
                    Err(Error::DimensionMismatch { expected: dim, found: poly.dim() })
                } else if poly.degree() > 6 {
                    Err(invalid("polynomial factor degree exceeds 6"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Samples a test function on `grid`, rejecting inputs that do not decay
/// below [`GENERATOR_DECAY`] of the peak at the box boundary.
pub fn schwartz_generator(grid: &Grid, kind: &TestFunction) -> Result<SampledField> {
    kind.validate(grid.dim())?;
    let f = SampledField::from_fn(grid.clone(), Domain::Space, |x| kind.eval(x));
    f.check_decay(GENERATOR_DECAY)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_l2(a: &SampledField, b: &SampledField) -> f64 {
        let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn grid_spacing() {
        let g = Grid::new(1, 8.0, 16).unwrap();
        assert_eq!(g.spacing(0), 1.0);
        assert_eq!(g.dual_spacing(0), 1.0 / 16.0);

        let g = Grid::new(2, 4.0, 8).unwrap();
        assert_eq!(g.spacing(1), 1.0);
        assert_eq!(g.dual_spacing(0), 0.125);
        assert_eq!(g.freq_half_width(0), 0.5);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(matches!(Grid::new(1, 8.0, 12), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(1, 8.0, 4).is_err());
        assert!(Grid::new(2, 8.0, 2048).is_err());
        assert!(Grid::new(3, 8.0, 512).is_err());
        assert!(Grid::new(1, 0.0, 16).is_err());
        assert!(Grid::new(4, 1.0, 16).is_err());
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = Grid::new(1, 6.0, 128).unwrap();
        let f = schwartz_generator(&g, &TestFunction::gaussian(1)).unwrap();
        let ft = fourier_transform(&f).unwrap();
        for (i, v) in ft.values().iter().enumerate() {
            let xi = ft.node(i)[0];
            let exact = (-PI * xi * xi).exp();
            assert!((v - exact).norm() <= 1e-8 * exact.max(1e-300) || (v - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn modulation_shifts_spectrum() {
        let g = Grid::new(1, 8.0, 256).unwrap();
        let f = schwartz_generator(
            &g,
            &TestFunction::ModulatedGaussian { center: vec![0.0], width: 1.0, frequency: vec![3.0] },
        )
        .unwrap();
        let ft = fourier_transform(&f).unwrap();
        for (i, v) in ft.values().iter().enumerate() {
            let xi = ft.node(i)[0];
            let exact = (-PI * (xi - 3.0) * (xi - 3.0)).exp();
            assert!((v - exact).norm() < 1e-12, "at {xi}: {v} vs {exact}");
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = Grid::new(2, 4.0, 16).unwrap();
        let f = SampledField::zeros(g, Domain::Space);
        let ft = fourier_transform(&f).unwrap();
        assert_eq!(ft.peak(), 0.0);
        assert!(matches!(fourier_transform(&ft), Err(Error::WrongDomain { .. })));
        assert!(inverse_fourier_transform(&f).is_err());
    }

    #[test]
    fn inverse_of_gaussian_and_shifted_center() {
        let g = Grid::new(2, 5.0, 64).unwrap().with_freq_center(&[0.5, -0.25]).unwrap();
        let big_f = SampledField::from_fn(g.clone(), Domain::Frequency, |xi| {
            Complex64::new((-PI * ((xi[0] - 0.5).powi(2) + (xi[1] + 0.25).powi(2))).exp(), 0.0)
        });
        let f = inverse_fourier_transform(&big_f).unwrap();
        for i in (0..g.len()).step_by(97) {
            let x = f.node(i);
            let expect = Complex64::from_polar(
                (-PI * (x[0] * x[0] + x[1] * x[1])).exp(),
                2.0 * PI * (0.5 * x[0] - 0.25 * x[1]),
            );
            assert!((f.values()[i] - expect).norm() < 1e-12);
        }
        let back = fourier_transform(&f).unwrap();
        assert!(rel_l2(&back, &big_f) < 1e-12);
    }

    #[test]
    fn lp_norms_of_gaussians() {
        let g = Grid::new(1, 6.0, 256).unwrap();
        let f = schwartz_generator(&g, &TestFunction::gaussian(1)).unwrap();
        let v = lp_norm(&f, 2.0).unwrap();
        assert!((v - 2f64.powf(-0.25)).abs() < 1e-6 * v);

        let g2 = Grid::new(2, 6.0, 128).unwrap();
        let f2 = schwartz_generator(&g2, &TestFunction::gaussian(2)).unwrap();
        let v4 = lp_norm(&f2, 4.0).unwrap();
        assert!((v4 - 0.25f64.powf(0.25)).abs() < 1e-6);
        assert_eq!(lp_norm(&f2, f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(lp_norm(&f2, 0.5), Err(Error::InvalidExponent(_))));
        assert_eq!(lp_norm(&SampledField::zeros(g2, Domain::Space), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn generator_rejects_wide_gaussian() {
        let g = Grid::new(1, 4.0, 64).unwrap();
        let wide = TestFunction::Gaussian { center: vec![0.0], width: 3.0 };
        assert!(matches!(schwartz_generator(&g, &wide), Err(Error::BoundaryDecay { .. })));
    }

    #[test]
    fn hat_times_odd_poly_has_zero_mean() {
        let g = Grid::new(2, 4.0, 64).unwrap();
        let kind = TestFunction::HatTimesPoly {
            center: vec![0.0, 0.0],
            radius: 2.0,
            poly: Polynomial::coordinate(2, 0),
        };
        let f = schwartz_generator(&g, &kind).unwrap();
        let ft = fourier_transform(&f).unwrap();
        let zero = g.len() / 2 + g.n() / 2;
        assert_eq!(ft.node(zero), vec![0.0, 0.0]);
        assert!(ft.values()[zero].norm() < 1e-14);
        assert!(ft.peak() > 0.1);
    }

    #[test]
    fn modulated_gaussian_in_2d_peaks_at_frequency() {
        let g = Grid::new(2, 6.0, 64).unwrap();
        let xi0 = [0.6, 0.8];
        let kind =
            TestFunction::ModulatedGaussian { center: vec![0.0, 0.0], width: 1.0, frequency: xi0.to_vec() };
        let ft = fourier_transform(&schwartz_generator(&g, &kind).unwrap()).unwrap();
        let at = ft.interpolate(&xi0).unwrap();
        assert!((at.norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = Grid::new(2, 2.0, 16).unwrap();
        let f = SampledField::from_fn(g, Domain::Space, |x| {
            Complex64::new(x[0].powi(3) - 2.0 * x[0] * x[1] * x[1] + 1.0, x[1])
        });
        let p = [0.37, -0.81];
        let v = f.interpolate(&p).unwrap();
        let exact = Complex64::new(p[0].powi(3) - 2.0 * p[0] * p[1] * p[1] + 1.0, p[1]);
        assert!((v - exact).norm() < 1e-12);
        assert!(f.interpolate(&[5.0, 0.0]).is_err());
    }
}
