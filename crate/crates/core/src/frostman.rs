//! Frostman-type dimension certificates for discrete complex measures:
//! the smoothed-ball statistic, its `r^α` certificate, the weighted potential
//! `I(ν, α)` and the Cauchy–Schwarz chain linking the two.

use crate::error::{invalid, Error, Result};
use crate::field::{inverse_fourier_transform, Domain, Grid, SampledField};
use crate::fit::fit_power_law;
use crate::profile::plateau;
use crate::restriction::{classify_tail, TailClass};
use crate::surface::SurfaceDensity;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: Complex64,
}

/// A finite combination of point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.point.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: a.point.len() });
        }
        if atoms.iter().any(|a| a.point.iter().any(|x| !x.is_finite()) || !a.weight.norm().is_finite()) {
            return Err(invalid("atoms must be finite"));
        }
        Ok(Self { dim, atoms })
    }

    pub fn dirac(point: &[f64]) -> Self {
        Self { dim: point.len(), atoms: vec![Atom { point: point.to_vec(), weight: Complex64::new(1.0, 0.0) }] }
    }

    /// `ζ dσ` as quadrature atoms `ζ(node)·w(node)` at the nodes.
    pub fn from_density(zeta: &SurfaceDensity) -> Self {
        let s = zeta.surface();
        let atoms = s
            .points()
            .iter()
            .zip(s.weights())
            .zip(zeta.values())
            .map(|((p, w), v)| Atom { point: p.clone(), weight: v * w })
            .collect();
        Self { dim: s.dim(), atoms }
    }

    /// Lebesgue measure on `[-1/2, 1/2]²` as `m²` midpoint atoms.
    pub fn unit_square(m: usize) -> Self {
        let h = 1.0 / m as f64;
        let w = Complex64::new(h * h, 0.0);
        let atoms = (0..m * m)
            .map(|i| Atom {
                point: vec![-0.5 + ((i / m) as f64 + 0.5) * h, -0.5 + ((i % m) as f64 + 0.5) * h],
                weight: w,
            })
            .collect();
        Self { dim: 2, atoms }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, atoms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum()
    }

    /// `F⁻¹[ν](x) = Σ w·e^{2πi⟨x,p⟩}`.
    pub fn inverse_transform_at(&self, x: &[f64]) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| {
                let phase: f64 = a.point.iter().zip(x).map(|(p, y)| p * y).sum();
                a.weight * Complex64::from_polar(1.0, 2.0 * PI * phase)
            })
            .sum()
    }
}

/// Radial hat `φ(ξ) = Ψ(|ξ|)`: 1 for `|ξ| ≤ plateau`, 0 for `|ξ| ≥ support`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatFunction {
    dim: usize,
    plateau: f64,
    support: f64,
}

impl HatFunction {
    pub fn new(dim: usize, plateau: f64, support: f64) -> Result<Self> {
        if !(plateau > 0.0 && support > plateau && support.is_finite()) {
            return Err(invalid(format!("hat needs 0 < plateau < support, got {plateau}, {support}")));
        }
        Ok(Self { dim, plateau, support })
    }

    /// Plateau radius 1/2, support radius 1.
    pub fn standard(dim: usize) -> Self {
        Self { dim, plateau: 0.5, support: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        plateau(r, self.plateau, self.support)
    }
}

fn check_pair(mu: &DiscreteMeasure, phi: &HatFunction) -> Result<()> {
    if mu.dim != phi.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, found: phi.dim });
    }
    Ok(())
}

fn check_scale(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("scale r = {r} outside (0, 1)")));
    }
    Ok(())
}

/// `|Σ_atoms w·φ(p/r + η)|`.
pub fn frostman_statistic(mu: &DiscreteMeasure, phi: &HatFunction, r: f64, eta: &[f64]) -> Result<f64> {
    check_pair(mu, phi)?;
    check_scale(r)?;
    if eta.len() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, found: eta.len() });
    }
    let s: Complex64 = mu
        .atoms
        .iter()
        .map(|a| {
            let y: Vec<f64> = a.point.iter().zip(eta).map(|(p, e)| p / r + e).collect();
            a.weight * phi.eval(&y)
        })
        .sum();
    Ok(s.norm())
}

/// Atoms bucketed by cells of side `support` in rescaled coordinates `p/r`.
struct ScaledIndex<'a> {
    mu: &'a DiscreteMeasure,
    phi: HatFunction,
    r: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> ScaledIndex<'a> {
    fn new(mu: &'a DiscreteMeasure, phi: HatFunction, r: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, a) in mu.atoms.iter().enumerate() {
            let key = a.point.iter().map(|p| (p / r / phi.support).floor() as i64).collect();
            cells.entry(key).or_default().push(i);
        }
        Self { mu, phi, r, cells }
    }

    /// Statistic for the window centered at `c = -η` (rescaled coordinates).
    fn statistic(&self, center: &[f64]) -> f64 {
        let d = center.len();
        let base: Vec<i64> = center.iter().map(|c| (c / self.phi.support).floor() as i64).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..3usize.pow(d as u32) {
            let mut key = base.clone();
            let mut rem = m;
            for k in key.iter_mut() {
                *k += (rem % 3) as i64 - 1;
                rem /= 3;
            }
            if let Some(ids) = self.cells.get(&key) {
                for &i in ids {
                    let a = &self.mu.atoms[i];
                    let y: Vec<f64> = a.point.iter().zip(center).map(|(p, c)| p / self.r - c).collect();
                    acc += a.weight * self.phi.eval(&y);
                }
            }
        }
        acc.norm()
    }

    /// Lattice of window centers with spacing equal to the plateau radius,
    /// restricted to cells touching rescaled atoms.
    fn centers(&self) -> Vec<Vec<f64>> {
        let h = self.phi.plateau;
        let d = self.mu.dim;
        let mut set: HashSet<Vec<i64>> = HashSet::new();
        for a in &self.mu.atoms {
            let base: Vec<i64> = a.point.iter().map(|p| (p / self.r / h).round() as i64).collect();
            for m in 0..3usize.pow(d as u32) {
                let mut key = base.clone();
                let mut rem = m;
                for k in key.iter_mut() {
                    *k += (rem % 3) as i64 - 1;
                    rem /= 3;
                }
                set.insert(key);
            }
        }
        let mut keys: Vec<Vec<i64>> = set.into_iter().collect();
        keys.sort();
        keys.into_iter().map(|k| k.iter().map(|v| *v as f64 * h).collect()).collect()
    }
}

/// One row of the certificate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub alpha: f64,
    /// `sup_{r,η} statistic / r^α`.
    pub sup_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionCertificate {
    pub table: Vec<CertificateRow>,
    /// Largest `α` in the grid whose ratio stays below `constant`.
    pub bound: Option<f64>,
    pub constant: f64,
    /// `sup` of the statistic itself (the `α = 0` ratio).
    pub baseline: f64,
}

impl DimensionCertificate {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["alpha", "sup_statistic_over_r_alpha", "pass", "C"])?;
        for row in &self.table {
            out.write_record([
                format!("{:.6}", row.alpha),
                format!("{:.12e}", row.sup_ratio),
                row.pass.to_string(),
                format!("{:.12e}", self.constant),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Default certificate constant relative to the `α = 0` baseline.
pub const CERTIFICATE_FACTOR: f64 = 10.0;

/// Largest `α` with `sup_{r,η} statistic/r^α ≤ C`, `C = 10 × baseline`.
///
/// For each `r` the windows range over the lattice of [`ScaledIndex::centers`].
pub fn dimension_lower_bound(
    mu: &DiscreteMeasure,
    phi: &HatFunction,
    alpha_grid: &[f64],
    r_grid: &[f64],
) -> Result<DimensionCertificate> {
    dimension_lower_bound_with_factor(mu, phi, alpha_grid, r_grid, CERTIFICATE_FACTOR)
}

pub fn dimension_lower_bound_with_factor(
    mu: &DiscreteMeasure,
    phi: &HatFunction,
    alpha_grid: &[f64],
    r_grid: &[f64],
    factor: f64,
) -> Result<DimensionCertificate> {
    check_pair(mu, phi)?;
    if alpha_grid.is_empty() || r_grid.is_empty() {
        return Err(invalid("α and r grids must be nonempty"));
    }
    for r in r_grid {
        check_scale(*r)?;
    }
    // Largest statistic at each scale.
    let sup_by_r: Vec<f64> = r_grid
        .iter()
        .map(|&r| {
            let index = ScaledIndex::new(mu, *phi, r);
            index.centers().par_iter().map(|c| index.statistic(c)).reduce(|| 0.0, f64::max)
        })
        .collect();
    let baseline = sup_by_r.iter().cloned().fold(0.0, f64::max);
    let constant = factor * baseline;
    let table: Vec<CertificateRow> = alpha_grid
        .iter()
        .map(|&alpha| {
            let sup_ratio =
                r_grid.iter().zip(&sup_by_r).map(|(r, s)| s / r.powf(alpha)).fold(0.0, f64::max);
            CertificateRow { alpha, sup_ratio, pass: sup_ratio <= constant }
        })
        .collect();
    let bound = table.iter().filter(|r| r.pass).map(|r| r.alpha).fold(None, |m: Option<f64>, a| {
        Some(m.map_or(a, |m| m.max(a)))
    });
    Ok(DimensionCertificate { table, bound, constant, baseline })
}

/// Mass of one dyadic ring of the potential integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialRing {
    pub inner: f64,
    pub outer: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub alpha: f64,
    /// `∫_box |F⁻¹ν|²(1+|x|)^{α-d}`.
    pub total: f64,
    /// Rings `[0,1)`, `[1,2)`, `[2,4)`, … inside the inscribed ball of the box.
    pub rings: Vec<PotentialRing>,
    /// Power-law exponent of dyadic ring masses (rings from radius 2 on).
    pub trend_exponent: f64,
    /// Convergent when ring masses decay, divergent when they grow (band ±0.1).
    pub trend: TailClass,
}

/// `I(ν, α) = ∫ |F⁻¹[ν](x)|² (1+|x|)^{α-d} dx` over the space box of `grid`.
pub fn potential(nu: &DiscreteMeasure, alpha: f64, grid: &Grid) -> Result<PotentialReport> {
    let d = nu.dim as f64;
    if !(alpha > 0.0 && alpha < d) {
        return Err(invalid(format!("α = {alpha} outside (0, {d})")));
    }
    if grid.dim() != nu.dim {
        return Err(Error::DimensionMismatch { expected: nu.dim, found: grid.dim() });
    }
    let vol = grid.cell_volume();
    let samples: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(Domain::Space, i);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            (r, nu.inverse_transform_at(&x).norm_sqr() * (1.0 + r).powf(alpha - d) * vol)
        })
        .collect();
    let total = samples.iter().map(|s| s.1).sum();
    let reach = (0..grid.dim()).map(|a| grid.half_width(a)).fold(f64::INFINITY, f64::min);
    let mut edges = vec![0.0, 1.0];
    while edges[edges.len() - 1] * 2.0 <= reach {
        let next = edges[edges.len() - 1] * 2.0;
        edges.push(next);
    }
    let mut rings: Vec<PotentialRing> =
        edges.windows(2).map(|e| PotentialRing { inner: e[0], outer: e[1], mass: 0.0 }).collect();
    for (r, m) in &samples {
        if let Some(ring) = rings.iter_mut().find(|g| *r >= g.inner && *r < g.outer) {
            ring.mass += m;
        }
    }
    let tail: Vec<&PotentialRing> = rings.iter().filter(|g| g.inner >= 2.0).collect();
    if tail.len() < 2 {
        return Err(invalid("grid box too small for a dyadic ring trend"));
    }
    let xs: Vec<f64> = tail.iter().map(|g| g.inner).collect();
    let ys: Vec<f64> = tail.iter().map(|g| g.mass).collect();
    let fit = fit_power_law(&xs, &ys)?;
    Ok(PotentialReport {
        alpha,
        total,
        rings,
        trend_exponent: fit.exponent,
        trend: classify_tail(fit.exponent - 1.0, 0.1),
    })
}

/// `∫ |F⁻¹[φ_r](x)|² (1+|x|²)^{(d-α)/2} dx` with `φ_r = φ(·/r)`.
///
/// `F⁻¹[φ_r]` is taken by inverse FFT on `base` rescaled by `1/r`, so the
/// frequency samples of `φ_r` coincide with those of `φ` on `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelIntegral {
    pub r: f64,
    pub value: f64,
    /// The same integral after substituting `z = r x`: `r^d ∫|F⁻¹φ(z)|²(1+|z|²/r²)^{(d-α)/2}`.
    pub substituted: f64,
}

pub fn kernel_integral(phi: &HatFunction, alpha: f64, r: f64, base: &Grid) -> Result<KernelIntegral> {
    let d = phi.dim as f64;
    if base.dim() != phi.dim || !base.is_cube() {
        return Err(Error::InvalidGrid("kernel grid must be a centered cube of the hat's dimension".into()));
    }
    if base.freq_half_width(0) <= phi.support {
        return Err(Error::InvalidGrid("frequency box does not contain the hat's support".into()));
    }
    let scaled = Grid::new(base.dim(), base.half_width(0) / r, base.n())?;
    let spec = SampledField::from_fn(scaled.clone(), Domain::Frequency, |xi| {
        let y: Vec<f64> = xi.iter().map(|v| v / r).collect();
        Complex64::new(phi.eval(&y), 0.0)
    });
    let field = inverse_fourier_transform(&spec)?;
    let value: f64 = field
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let x = scaled.point(Domain::Space, i);
            let r2: f64 = x.iter().map(|c| c * c).sum();
            v.norm_sqr() * (1.0 + r2).powf((d - alpha) / 2.0)
        })
        .sum::<f64>()
        * scaled.cell_volume();
    let unit = SampledField::from_fn(base.clone(), Domain::Frequency, |xi| Complex64::new(phi.eval(xi), 0.0));
    let unit_field = inverse_fourier_transform(&unit)?;
    let substituted: f64 = unit_field
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let z = base.point(Domain::Space, i);
            let z2: f64 = z.iter().map(|c| c * c).sum();
            v.norm_sqr() * (1.0 + z2 / (r * r)).powf((d - alpha) / 2.0)
        })
        .sum::<f64>()
        * base.cell_volume()
        * r.powf(d);
    Ok(KernelIntegral { r, value, substituted })
}

/// One `(r, η)` test of `|⟨ν, φ_r(·+η)⟩| ≤ I^{1/2}(r^α K_φ)^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub r: f64,
    pub eta: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub alpha: f64,
    pub potential: f64,
    /// `K_φ = ∫|F⁻¹φ|²(1+|z|²)^{(d-α)/2}`.
    pub kernel: f64,
    pub rows: Vec<ChainRow>,
    pub worst_slack: f64,
    /// Largest `|J(r) - substituted|/J(r)` over the r grid.
    pub scaling_residual: f64,
    /// Whether `J(r) ≤ r^α K_φ` held at every r.
    pub scaling_bound_holds: bool,
}

/// Checks the Cauchy–Schwarz chain from the potential to the Frostman bound.
///
/// `potential_grid` carries the box for `I(ν, α)`; `kernel_grid` is the
/// frequency/space grid on which `K_φ` is computed.
pub fn frostman_from_potential_check(
    nu: &DiscreteMeasure,
    phi: &HatFunction,
    alpha: f64,
    r_grid: &[f64],
    eta_sample: &[Vec<f64>],
    potential_grid: &Grid,
    kernel_grid: &Grid,
) -> Result<ChainReport> {
    check_pair(nu, phi)?;
    if r_grid.is_empty() || eta_sample.is_empty() {
        return Err(invalid("r and η samples must be nonempty"));
    }
    let pot = if nu.atoms.is_empty() { 0.0 } else { potential(nu, alpha, potential_grid)?.total };
    let kernel = kernel_integral(phi, alpha, 1.0, kernel_grid)?.value;
    let mut rows = Vec::new();
    let mut scaling_residual: f64 = 0.0;
    let mut scaling_bound_holds = true;
    for &r in r_grid {
        check_scale(r)?;
        let j = kernel_integral(phi, alpha, r, kernel_grid)?;
        scaling_residual = scaling_residual.max((j.value - j.substituted).abs() / j.value);
        scaling_bound_holds &= j.value <= r.powf(alpha) * kernel * (1.0 + 1e-10);
        let rhs = (pot * r.powf(alpha) * kernel).sqrt();
        for eta in eta_sample {
            let lhs = frostman_statistic(nu, phi, r, eta)?;
            rows.push(ChainRow { r, eta: eta.clone(), lhs, rhs, slack: rhs - lhs });
        }
    }
    let worst_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Ok(ChainReport { alpha, potential: pot, kernel, rows, worst_slack, scaling_residual, scaling_bound_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_statistic_is_one() {
        let mu = DiscreteMeasure::dirac(&[0.0, 0.0]);
        let phi = HatFunction::standard(2);
        for r in [0.5, 0.01, 1e-9] {
            assert_eq!(frostman_statistic(&mu, &phi, r, &[0.0, 0.0]).unwrap(), 1.0);
        }
        assert!(frostman_statistic(&mu, &phi, 1.5, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn hashed_statistic_matches_direct() {
        let mu = DiscreteMeasure::unit_square(40);
        let phi = HatFunction::standard(2);
        let r = 0.1;
        let index = ScaledIndex::new(&mu, phi, r);
        for c in index.centers().iter().step_by(7) {
            let eta: Vec<f64> = c.iter().map(|v| -v).collect();
            let direct = frostman_statistic(&mu, &phi, r, &eta).unwrap();
            assert!((index.statistic(c) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn empty_grids_rejected() {
        let mu = DiscreteMeasure::dirac(&[0.0]);
        let phi = HatFunction::standard(1);
        assert!(dimension_lower_bound(&mu, &phi, &[], &[0.5]).is_err());
        assert!(dimension_lower_bound(&mu, &phi, &[0.5], &[]).is_err());
    }

    #[test]
    fn dirac_potential_diverges() {
        let mu = DiscreteMeasure::dirac(&[0.0, 0.0]);
        let grid = Grid::new(2, 32.0, 64).unwrap();
        let p = potential(&mu, 0.5, &grid).unwrap();
        assert_eq!(p.trend, TailClass::Divergent);
        assert!(p.trend_exponent > 0.5 && p.trend_exponent < 0.9);
        assert!(potential(&mu, 2.5, &grid).is_err());
    }

    #[test]
    fn kernel_substitution_is_exact() {
        let phi = HatFunction::standard(2);
        let grid = Grid::new(2, 16.0, 128).unwrap();
        for r in [0.5, 0.25, 0.125] {
            let k = kernel_integral(&phi, 0.5, r, &grid).unwrap();
            assert!((k.value - k.substituted).abs() <= 1e-8 * k.value);
        }
    }
}
