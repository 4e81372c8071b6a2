//! Differential polynomials `𝔖(∂/2πi)` as Fourier multipliers, smooth
//! division by a symbol vanishing on its zero set, symbol powers and the
//! Sobolev-ratio experiment for `(∂₁/i)^k - σ(∂₂/i)^l`.

use crate::error::{invalid, Error, Result};
use crate::field::{fourier_transform, inverse_fourier_transform, lp_norm, Domain, Grid, SampledField};
use crate::fit::fit_power_law;
use crate::poly::Polynomial;
use crate::profile::{mollifier, plateau};
use crate::quadrature::gauss_legendre;
use crate::restriction::transform_at;
use crate::surface::Surface;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Boundary-decay limit for multiplier inputs.
pub const APPLY_DECAY: f64 = 1e-8;
const SPHERE_SAMPLES: usize = 720;

/// A real polynomial symbol with its growth certificate and (optionally)
/// sample points of its zero set with a lower bound on `|∇𝔖|` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffPolynomial {
    poly: Polynomial,
    grad: Vec<Polynomial>,
    /// `min |leading form|` over the unit sphere when positive.
    growth_margin: Option<f64>,
    zero_set: Vec<Vec<f64>>,
    gradient_min: Option<f64>,
}

fn unit_sphere(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..SPHERE_SAMPLES)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / SPHERE_SAMPLES as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let (zs, _) = gauss_legendre(32, -1.0, 1.0);
            zs.iter()
                .flat_map(|z| {
                    let r = (1.0 - z * z).sqrt();
                    (0..64).map(move |j| {
                        let p = 2.0 * PI * j as f64 / 64.0;
                        vec![r * p.cos(), r * p.sin(), *z]
                    })
                })
                .collect()
        }
    }
}

impl DiffPolynomial {
    pub fn new(poly: Polynomial) -> Self {
        let grad = (0..poly.dim()).map(|a| poly.partial(a)).collect();
        let lead = poly.leading_form();
        let values: Vec<f64> = unit_sphere(poly.dim()).iter().map(|x| lead.eval(x).abs()).collect();
        let max = values.iter().cloned().fold(0.0, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let growth_margin = (poly.degree() > 0 && min > 1e-9 * max).then_some(min);
        Self { poly, grad, growth_margin, zero_set: Vec::new(), gradient_min: None }
    }

    /// `|ξ|² - 1`, whose multiplier is `-(Δ/4π² + 1)`.
    pub fn helmholtz(dim: usize) -> Self {
        Self::new(Polynomial::sphere(dim, 1.0))
    }

    /// `(2πξ)^k - σ(2πη)^l`, the symbol of `(∂₁/i)^k - σ(∂₂/i)^l`.
    pub fn anisotropic(k: u32, l: u32, sigma: f64) -> Self {
        let a = (2.0 * PI).powi(k as i32);
        let b = -sigma * (2.0 * PI).powi(l as i32);
        Self::new(Polynomial::new(2, [(vec![k, 0], a), (vec![0, l], b)]))
    }

    /// Attaches zero-set samples; each must satisfy `|𝔖| ≤ 1e-8` with `∇𝔖 ≠ 0`.
    pub fn with_zero_set(mut self, points: Vec<Vec<f64>>) -> Result<Self> {
        let mut g_min = f64::INFINITY;
        for p in &points {
            if p.len() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: p.len() });
            }
            let v = self.eval(p);
            if v.abs() > 1e-8 {
                return Err(invalid(format!("point {p:?} is not on the zero set (𝔖 = {v:.3e})")));
            }
            g_min = g_min.min(self.gradient_norm(p));
        }
        if !(g_min > 0.0) {
            return Err(Error::Precondition("∇𝔖 vanishes on the zero set".into()));
        }
        self.zero_set = points;
        self.gradient_min = Some(g_min);
        Ok(self)
    }

    pub fn with_surface(self, surface: &Surface) -> Result<Self> {
        self.with_zero_set(surface.points().to_vec())
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn grows(&self) -> bool {
        self.growth_margin.is_some()
    }

    pub fn growth_margin(&self) -> Option<f64> {
        self.growth_margin
    }

    pub fn zero_set(&self) -> &[Vec<f64>] {
        &self.zero_set
    }

    pub fn gradient_min(&self) -> Option<f64> {
        self.gradient_min
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        self.gradient(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Newton projection onto `{𝔖 = 0}` along `∇𝔖`.
    pub fn project(&self, start: &[f64]) -> Result<Vec<f64>> {
        let mut x = start.to_vec();
        for _ in 0..60 {
            let v = self.eval(&x);
            let g = self.gradient(&x);
            let g2: f64 = g.iter().map(|c| c * c).sum();
            if g2 == 0.0 || !v.is_finite() {
                break;
            }
            if v.abs() <= 1e-15 * (1.0 + g2.sqrt()) {
                return Ok(x);
            }
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= v * gi / g2;
            }
        }
        let v = self.eval(&x);
        if v.abs() <= 1e-13 * (1.0 + self.gradient_norm(&x)) {
            return Ok(x);
        }
        Err(Error::ProjectionDiverged { start: start.to_vec() })
    }
}

/// `F⁻¹[m·ĝ]` for a space-domain `g`.
pub fn apply_multiplier<M>(g: &SampledField, m: M) -> Result<SampledField>
where
    M: Fn(&[f64]) -> Complex64 + Sync,
{
    let spec = fourier_transform(g)?;
    inverse_fourier_transform(&spec.map(|xi, v| v * m(xi)))
}

/// `𝔖(∂/2πi) g = F⁻¹[𝔖(ξ)ĝ(ξ)]`.
pub fn apply_diff_poly(symbol: &DiffPolynomial, g: &SampledField) -> Result<SampledField> {
    check_input(symbol, g)?;
    apply_multiplier(g, |xi| Complex64::new(symbol.eval(xi), 0.0))
}

/// `F⁻¹[𝔖(ξ)^k ĝ(ξ)]`.
pub fn power_space_member(symbol: &DiffPolynomial, k: u32, g: &SampledField) -> Result<SampledField> {
    if k == 0 {
        return Err(invalid("power k must be at least 1"));
    }
    check_input(symbol, g)?;
    apply_multiplier(g, |xi| Complex64::new(symbol.eval(xi).powi(k as i32), 0.0))
}

fn check_input(symbol: &DiffPolynomial, g: &SampledField) -> Result<()> {
    if g.grid().dim() != symbol.dim() {
        return Err(Error::DimensionMismatch { expected: symbol.dim(), found: g.grid().dim() });
    }
    if g.domain() != Domain::Space {
        return Err(Error::WrongDomain { expected: Domain::Space, found: g.domain() });
    }
    g.check_decay(APPLY_DECAY)
}

/// A frequency-side function known off the grid, optionally with cheaper
/// values at the grid nodes.
pub trait FrequencyFunction: Sync {
    fn at(&self, xi: &[f64]) -> Complex64;

    fn at_node(&self, grid: &Grid, index: usize) -> Complex64 {
        self.at(&grid.point(Domain::Frequency, index))
    }
}

impl<F> FrequencyFunction for F
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    fn at(&self, xi: &[f64]) -> Complex64 {
        self(xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisionOptions {
    /// Tube half-width in grid cells, measured in `𝔖`-values: `|𝔖| < cells·Δξ·|∇𝔖|`.
    pub cutoff_cells: f64,
    /// Allowed `max |φ̂|` on the zero set relative to the peak.
    pub vanish_tol: f64,
    /// Step of the transversal difference quotient.
    pub step: f64,
}

impl Default for DivisionOptions {
    fn default() -> Self {
        Self { cutoff_cells: 4.0, vanish_tol: 1e-8, step: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Division {
    pub quotient: SampledField,
    /// `max |𝔖ĝ - φ̂| / max |φ̂|` over the grid.
    pub residual: f64,
    pub tube_nodes: usize,
}

fn lagrange4(nodes: [f64; 4], values: [Complex64; 4], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..4 {
        let w: f64 = (0..4).filter(|&j| j != m).map(|j| (x - nodes[j]) / (nodes[m] - nodes[j])).product();
        acc += values[m] * w;
    }
    acc
}

/// `ĝ = φ̂/𝔖` on the frequency grid, regularized near the zero set by
/// `(φ̂(ξ) - φ̂(π(ξ)))/𝔖(ξ)` with `π` the Newton projection.
///
/// Within `2·step` of the zero set the quotient is interpolated from four
/// points at `±2·step, ±4·step` along the line through `π(ξ)` and `ξ`.
pub fn smooth_divide<F>(phi_hat: &F, grid: &Grid, symbol: &DiffPolynomial, opts: DivisionOptions) -> Result<Division>
where
    F: FrequencyFunction + ?Sized,
{
    if grid.dim() != symbol.dim() {
        return Err(Error::DimensionMismatch { expected: symbol.dim(), found: grid.dim() });
    }
    if symbol.zero_set().is_empty() {
        return Err(Error::Precondition("symbol has no zero-set samples attached".into()));
    }
    let values: Vec<Complex64> = (0..grid.len()).into_par_iter().map(|i| phi_hat.at_node(grid, i)).collect();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let on_zero = symbol.zero_set().par_iter().map(|p| phi_hat.at(p).norm()).reduce(|| 0.0, f64::max);
    if on_zero > opts.vanish_tol * peak {
        return Err(Error::TraceNotVanishing { max: on_zero, limit: opts.vanish_tol * peak });
    }
    if peak == 0.0 {
        return Ok(Division { quotient: SampledField::zeros(grid.clone(), Domain::Frequency), residual: 0.0, tube_nodes: 0 });
    }
    let cell = (0..grid.dim()).map(|a| grid.dual_spacing(a)).fold(0.0, f64::max);
    let h = opts.step;
    let out: Vec<(Complex64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.point(Domain::Frequency, i);
            let v = symbol.eval(&xi);
            let g = symbol.gradient_norm(&xi);
            if v.abs() >= opts.cutoff_cells * cell * g {
                return Ok((values[i] / v, false));
            }
            let pi = symbol.project(&xi)?;
            let base = phi_hat.at(&pi);
            let offset: Vec<f64> = xi.iter().zip(&pi).map(|(a, b)| a - b).collect();
            let tau = offset.iter().map(|c| c * c).sum::<f64>().sqrt();
            if tau >= 2.0 * h {
                return Ok(((values[i] - base) / v, true));
            }
            let dir: Vec<f64> = if tau > 0.0 {
                offset.iter().map(|c| c / tau).collect()
            } else {
                let gp = symbol.gradient(&pi);
                let n = symbol.gradient_norm(&pi);
                gp.iter().map(|c| c / n).collect()
            };
            let nodes = [-4.0 * h, -2.0 * h, 2.0 * h, 4.0 * h];
            let mut q = [Complex64::new(0.0, 0.0); 4];
            for (qm, s) in q.iter_mut().zip(nodes) {
                let y: Vec<f64> = pi.iter().zip(&dir).map(|(p, d)| p + s * d).collect();
                *qm = (phi_hat.at(&y) - base) / symbol.eval(&y);
            }
            Ok((lagrange4(nodes, q, tau), true))
        })
        .collect::<Result<_>>()?;
    let tube_nodes = out.iter().filter(|o| o.1).count();
    let quotient: Vec<Complex64> = out.into_iter().map(|o| o.0).collect();
    let residual = (0..grid.len())
        .into_par_iter()
        .map(|i| (quotient[i] * symbol.eval(&grid.point(Domain::Frequency, i)) - values[i]).norm())
        .reduce(|| 0.0, f64::max)
        / peak;
    Ok(Division {
        quotient: SampledField::from_values(grid.clone(), Domain::Frequency, quotient)?,
        residual,
        tube_nodes,
    })
}

/// `χ = 1` where `|𝔖| ≤ inner`, `0` where `|𝔖| ≥ outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodBump {
    pub inner: f64,
    pub outer: f64,
}

impl Default for NeighborhoodBump {
    fn default() -> Self {
        Self { inner: 0.25, outer: 0.5 }
    }
}

impl NeighborhoodBump {
    pub fn eval(&self, symbol_value: f64) -> f64 {
        plateau(symbol_value, self.inner, self.outer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub g: SampledField,
    /// `‖𝔖(∂/2πi)g - f‖₂ / ‖f‖₂`.
    pub residual: f64,
    pub division_residual: f64,
}

struct NearPiece<'a> {
    f: &'a SampledField,
    spectrum: &'a SampledField,
    symbol: &'a DiffPolynomial,
    bump: NeighborhoodBump,
}

impl FrequencyFunction for NearPiece<'_> {
    fn at(&self, xi: &[f64]) -> Complex64 {
        let chi = self.bump.eval(self.symbol.eval(xi));
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        transform_at(self.f, xi) * chi
    }

    fn at_node(&self, grid: &Grid, index: usize) -> Complex64 {
        let chi = self.bump.eval(self.symbol.eval(&grid.point(Domain::Frequency, index)));
        self.spectrum.values()[index] * chi
    }
}

/// Solves `𝔖(∂/2πi) g = f` for `f̂` vanishing on the zero set: the piece of
/// `f̂` near the zero set goes through [`smooth_divide`], the rest is divided
/// directly (the growth certificate keeps `𝔖` away from 0 there).
pub fn solve_diff_equation(
    f: &SampledField,
    symbol: &DiffPolynomial,
    bump: NeighborhoodBump,
    opts: DivisionOptions,
) -> Result<Solution> {
    if !symbol.grows() {
        return Err(Error::Precondition("symbol does not grow at infinity".into()));
    }
    check_input(symbol, f)?;
    let grid = f.grid().clone();
    let spectrum = fourier_transform(f)?;
    let near = NearPiece { f, spectrum: &spectrum, symbol, bump };
    let division = smooth_divide(&near, &grid, symbol, opts)?;
    let g_hat: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.point(Domain::Frequency, i);
            let s = symbol.eval(&xi);
            let far = 1.0 - bump.eval(s);
            let direct = if far > 0.0 { spectrum.values()[i] * far / s } else { Complex64::new(0.0, 0.0) };
            direct + division.quotient.values()[i]
        })
        .collect();
    let g = inverse_fourier_transform(&SampledField::from_values(grid, Domain::Frequency, g_hat)?)?;
    let back = apply_multiplier(&g, |xi| Complex64::new(symbol.eval(xi), 0.0))?;
    let norm = lp_norm(f, 2.0)?;
    let residual = if norm == 0.0 { lp_norm(&back, 2.0)? } else { lp_norm(&back.sub(f)?, 2.0)? / norm };
    Ok(Solution { g, residual, division_residual: division.residual })
}

/// Largest `|∂_τ^j F(π + τn)|` over the zero-set samples for `j < orders`,
/// by five-point central differences with step `h` (orders up to 4).
pub fn transversal_derivatives<F>(big_f: &F, symbol: &DiffPolynomial, orders: usize, h: f64) -> Result<Vec<f64>>
where
    F: FrequencyFunction + ?Sized,
{
    if orders == 0 || orders > 4 {
        return Err(invalid("transversal orders must be 1..=4"));
    }
    const STENCILS: [[f64; 5]; 4] = [
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
        [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        [-0.5, 1.0, 0.0, -1.0, 0.5],
    ];
    let mut max = vec![0.0f64; orders];
    for p in symbol.zero_set() {
        let g = symbol.gradient(p);
        let n = symbol.gradient_norm(p);
        let vals: Vec<Complex64> = (-2..=2)
            .map(|m| {
                let y: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + m as f64 * h * b / n).collect();
                big_f.at(&y)
            })
            .collect();
        for (j, stencil) in STENCILS.iter().enumerate().take(orders) {
            let d: Complex64 = stencil.iter().zip(&vals).map(|(c, v)| v * *c).sum::<Complex64>() / h.powi(j as i32);
            max[j] = max[j].max(d.norm());
        }
    }
    Ok(max)
}

/// Frequency center shifted by half a cell on every axis where a node would
/// otherwise sit on `ξ_a = 0`.
fn off_axis(grid: &Grid) -> Result<Grid> {
    let center: Vec<f64> = (0..grid.dim())
        .map(|a| {
            let c = grid.freq_center()[a];
            let h = grid.dual_spacing(a);
            let k = c / h;
            if (k - k.round()).abs() < 1e-9 {
                c + 0.5 * h
            } else {
                c
            }
        })
        .collect();
    grid.clone().with_freq_center(&center)
}

/// `‖F⁻¹[F[f](ξ,η)|ξ|^α|η|^β]‖_{L_q}` with frequency nodes kept off the axes.
pub fn sobolev_norm(f: &SampledField, alpha: f64, beta: f64, q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    if f.grid().dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: f.grid().dim() });
    }
    if f.domain() != Domain::Space {
        return Err(Error::WrongDomain { expected: Domain::Space, found: f.domain() });
    }
    let shifted = f.with_grid(off_axis(f.grid())?)?;
    let out = apply_multiplier(&shifted, |x| Complex64::new(x[0].abs().powf(alpha) * x[1].abs().powf(beta), 0.0))?;
    lp_norm(&out, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevParams {
    pub k: u32,
    pub l: u32,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
}

pub const HOMOGENEITY_TOL: f64 = 1e-12;

impl SobolevParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 {
            return Err(invalid("k and l must be positive"));
        }
        if self.sigma == 0.0 || !self.sigma.is_finite() {
            return Err(invalid("σ must be a nonzero real"));
        }
        for e in [self.p, self.q] {
            if !(e > 1.0 && e.is_finite()) {
                return Err(Error::InvalidExponent(e));
            }
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(invalid("α and β must be finite"));
        }
        Ok(())
    }

    fn gap(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }

    /// The value `α` must take: `k(1 - (1/p - 1/q)(1/k + 1/l) - β/l)`.
    fn balanced_alpha(k: u32, l: u32, beta: f64, p: f64, q: f64) -> f64 {
        let (kf, lf) = (k as f64, l as f64);
        let gap = 1.0 / p - 1.0 / q;
        kf * (1.0 - gap * (1.0 / kf + 1.0 / lf) - beta / lf)
    }

    /// `|α/k + β/l - 1 + (1/p - 1/q)(1/k + 1/l)|`, evaluated as `|α - α*|/k`.
    pub fn homogeneity_residual(&self) -> f64 {
        (self.alpha - Self::balanced_alpha(self.k, self.l, self.beta, self.p, self.q)).abs() / self.k as f64
    }

    pub fn is_consistent(&self) -> bool {
        self.homogeneity_residual() <= HOMOGENEITY_TOL
    }

    /// Parameters with `α` solved from the homogeneity relation.
    pub fn solve_alpha(k: u32, l: u32, sigma: f64, beta: f64, p: f64, q: f64) -> Result<Self> {
        let alpha = Self::balanced_alpha(k, l, beta, p, q);
        let out = Self { k, l, sigma, alpha, beta, p, q };
        out.validate()?;
        Ok(out)
    }

    /// `q` with `1/p - 1/q = gap`.
    pub fn q_for_gap(p: f64, gap: f64) -> Result<f64> {
        let inv = 1.0 / p - gap;
        if !(inv > 0.0 && inv < 1.0) {
            return Err(invalid(format!("no q in (1, ∞) with 1/{p} - 1/q = {gap}")));
        }
        Ok(1.0 / inv)
    }

    /// `3(1/p - 1/q) - 2`: growth exponent of the ratio on Knapp caps.
    pub fn knapp_prediction(&self) -> f64 {
        3.0 * self.gap() - 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Caps of tangential width δ and normal thickness δ².
    KnappCap { deltas: Vec<f64> },
    /// Curve measure near the cap point, mollified across the curve at width w.
    SurfaceMeasureMollified { widths: Vec<f64> },
}

impl Family {
    pub fn params(&self) -> &[f64] {
        match self {
            Family::KnappCap { deltas } => deltas,
            Family::SurfaceMeasureMollified { widths } => widths,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::KnappCap { .. } => "knapp_cap",
            Family::SurfaceMeasureMollified { .. } => "surface_measure_mollified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Unbounded,
    Bounded,
    Inconclusive,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Trend::Unbounded => "unbounded",
            Trend::Bounded => "bounded",
            Trend::Inconclusive => "inconclusive",
        })
    }
}

/// Sign of the fitted exponent in the vanishing parameter, with a dead band.
pub fn classify_trend(exponent: f64, band: f64) -> Trend {
    if exponent <= -band {
        Trend::Unbounded
    } else if exponent >= band {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    }
}

pub const TREND_BAND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub family_param: f64,
    pub numerator_norm: f64,
    pub denominator_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: SobolevParams,
    pub family: String,
    /// Point of the zero curve on the unit circle where the family sits.
    pub cap_point: [f64; 2],
    pub rows: Vec<ExperimentRow>,
    pub fitted_exponent: f64,
    pub fit_residual: f64,
    pub trend: Trend,
    pub knapp_prediction: f64,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["family_param", "numerator_norm", "denominator_norm", "ratio", "fitted_exponent"])?;
        for r in &self.rows {
            out.write_record([
                format!("{:.12e}", r.family_param),
                format!("{:.12e}", r.numerator_norm),
                format!("{:.12e}", r.denominator_norm),
                format!("{:.12e}", r.ratio),
                format!("{:.6}", self.fitted_exponent),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    /// Points per axis for Knapp caps.
    pub knapp_n: usize,
    /// Points per axis for the mollified curve measure.
    pub surface_n: usize,
    /// Tangential half-width of the curve-measure profile.
    pub surface_cap: f64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self { knapp_n: 256, surface_n: 512, surface_cap: 0.25 }
    }
}

/// First zero of `𝔖` on the unit circle (counterclockwise from angle 0,
/// upper half first) with nonvanishing gradient.
fn cap_point(symbol: &DiffPolynomial) -> Result<[f64; 2]> {
    let m = 7200;
    let at = |t: f64| symbol.eval(&[t.cos(), t.sin()]);
    for i in 0..m {
        let (a, b) = (2.0 * PI * i as f64 / m as f64, 2.0 * PI * (i + 1) as f64 / m as f64);
        if at(a) == 0.0 || at(a).signum() != at(b).signum() {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if at(lo).signum() == at(mid).signum() && at(lo) != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let p = [t.cos(), t.sin()];
            let p = symbol.project(&p)?;
            if symbol.gradient_norm(&p) > 1e-6 {
                return Ok([p[0], p[1]]);
            }
        }
    }
    Err(Error::Precondition("zero curve misses the unit circle".into()))
}

/// Frequency map `ζ ↦ p₀ + ζ_t t̂ + ζ_n n̂` of a cap-aligned grid.
struct CapFrame {
    p0: [f64; 2],
    t: [f64; 2],
    n: [f64; 2],
    grad: f64,
}

impl CapFrame {
    fn new(symbol: &DiffPolynomial, p0: [f64; 2]) -> Self {
        let g = symbol.gradient(&p0);
        let grad = (g[0] * g[0] + g[1] * g[1]).sqrt();
        let n = [g[0] / grad, g[1] / grad];
        Self { p0, t: [-n[1], n[0]], n, grad }
    }

    fn actual(&self, z: &[f64]) -> [f64; 2] {
        [
            self.p0[0] + z[0] * self.t[0] + z[1] * self.n[0],
            self.p0[1] + z[0] * self.t[1] + z[1] * self.n[1],
        ]
    }
}

fn ratio_on_grid<P>(params: &SobolevParams, symbol: &DiffPolynomial, frame: &CapFrame, grid: Grid, profile: P) -> Result<(f64, f64)>
where
    P: Fn(f64, f64) -> f64 + Sync,
{
    let spec = SampledField::from_fn(grid, Domain::Frequency, |z| {
        let x = frame.actual(z);
        Complex64::new(profile(z[0], symbol.eval(&x) / frame.grad), 0.0)
    });
    let num = spec.map(|z, v| {
        let x = frame.actual(z);
        v * x[0].abs().powf(params.alpha) * x[1].abs().powf(params.beta)
    });
    let den = spec.map(|z, v| v * symbol.eval(&frame.actual(z)));
    let numerator = lp_norm(&inverse_fourier_transform(&num)?, params.q)?;
    let denominator = lp_norm(&inverse_fourier_transform(&den)?, params.p)?;
    Ok((numerator, denominator))
}

/// `‖f‖_{W_q^{α,β}} / ‖((∂₁/i)^k - σ(∂₂/i)^l) f‖_p` over a family vanishing in
/// its parameter, with the fitted growth exponent in that parameter.
///
/// Norms are rotation invariant, so each member is sampled on a grid aligned
/// with the tangent and normal of the zero curve at the cap point.
pub fn sobolev_ratio_experiment(params: &SobolevParams, family: &Family, grids: ExperimentGrid) -> Result<ExperimentReport> {
    params.validate()?;
    if !params.is_consistent() {
        return Err(Error::HomogeneityViolated { residual: params.homogeneity_residual() });
    }
    if family.params().len() < 2 || family.params().iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(invalid("family needs at least two parameters in (0, 1)"));
    }
    let symbol = DiffPolynomial::anisotropic(params.k, params.l, params.sigma);
    let p0 = cap_point(&symbol)?;
    let frame = CapFrame::new(&symbol, p0);
    let rows: Vec<ExperimentRow> = family
        .params()
        .par_iter()
        .map(|&v| {
            let (numerator_norm, denominator_norm) = match family {
                Family::KnappCap { .. } => {
                    let n = grids.knapp_n;
                    let grid = Grid::anisotropic(&[(n / 8) as f64 / v, (n / 8) as f64 / (v * v)], n)?;
                    ratio_on_grid(params, &symbol, &frame, grid, |zt, d| {
                        plateau(zt / v, 0.25, 0.5) * plateau(d / (v * v), 0.25, 0.5)
                    })?
                }
                Family::SurfaceMeasureMollified { .. } => {
                    let n = grids.surface_n;
                    let cap = grids.surface_cap;
                    let grid = Grid::anisotropic(&[n as f64 / (8.0 * cap), (n / 8) as f64 / v], n)?;
                    let mass = mollifier_mass();
                    ratio_on_grid(params, &symbol, &frame, grid, |zt, d| {
                        plateau(zt / cap, 0.5, 1.0) * mollifier(d / v) / (mass * v)
                    })?
                }
            };
            Ok(ExperimentRow { family_param: v, numerator_norm, denominator_norm, ratio: numerator_norm / denominator_norm })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.family_param).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let fit = fit_power_law(&xs, &ys)?;
    Ok(ExperimentReport {
        params: *params,
        family: family.name().to_string(),
        cap_point: p0,
        rows,
        fitted_exponent: fit.exponent,
        fit_residual: fit.residual,
        trend: classify_trend(fit.exponent, TREND_BAND),
        knapp_prediction: params.knapp_prediction(),
    })
}

/// `∫ mollifier(t) dt` over `[-1, 1]`.
fn mollifier_mass() -> f64 {
    let (x, w) = gauss_legendre(200, -1.0, 1.0);
    x.iter().zip(&w).map(|(x, w)| mollifier(*x) * w).sum()
}
