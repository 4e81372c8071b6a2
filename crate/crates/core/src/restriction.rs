//! The restriction operator `f ↦ f̂|_Σ`, the extension `ζ ↦ F⁻¹[ζ dσ]`,
//! Knapp cap functions, envelope decay fits and `L_q` tail profiles.

use crate::error::{invalid, Error, Result};
use crate::field::{inverse_fourier_transform, lp_norm, Domain, Grid, SampledField};
use crate::fit::fit_power_law;
use crate::profile::plateau;
use crate::quadrature::composite_gauss_legendre;
use crate::surface::{
    make_circle, make_sphere, signed_freq, trig_coefficients, SphereResolution, Surface,
    SurfaceDensity, SurfaceKind,
};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

/// Boundary/peak ratio `restrict` accepts by default.
pub const RESTRICT_DECAY: f64 = 1e-6;

/// Envelope samples per decay window.
const WINDOW_SAMPLES: usize = 16;

/// `R_Σ f` by direct summation `Δx^d Σ_x f(x) e^{-2πi⟨x,ξ⟩}` at every node.
///
/// The sampled field stands for a function band-limited to its frequency
/// box, so nodes outside the box receive 0.
pub fn restrict(f: &SampledField, surface: &Arc<Surface>) -> Result<SurfaceDensity> {
    restrict_with_limit(f, surface, RESTRICT_DECAY)
}

pub fn restrict_with_limit(f: &SampledField, surface: &Arc<Surface>, decay_limit: f64) -> Result<SurfaceDensity> {
    if f.domain() != Domain::Space {
        return Err(Error::WrongDomain { expected: Domain::Space, found: f.domain() });
    }
    if f.grid().dim() != surface.dim() {
        return Err(Error::DimensionMismatch { expected: f.grid().dim(), found: surface.dim() });
    }
    f.check_decay(decay_limit)?;
    let values = surface.points().par_iter().map(|xi| transform_at(f, xi)).collect();
    SurfaceDensity::new(surface.clone(), values)
}

/// Direct-sum value of `f̂(ξ)` at one frequency; 0 outside the frequency box.
pub fn transform_at(f: &SampledField, xi: &[f64]) -> Complex64 {
    let g = f.grid();
    if !g.contains_freq(xi) {
        return Complex64::new(0.0, 0.0);
    }
    let n = g.n();
    let d = g.dim();
    let phases: Vec<Vec<Complex64>> = (0..d)
        .map(|a| {
            (0..n)
                .map(|j| Complex64::from_polar(1.0, -2.0 * PI * g.space_coord(a, j) * xi[a]))
                .collect()
        })
        .collect();
    // Contract the last axis first, then the remaining ones.
    let mut current: Vec<Complex64> = f
        .values()
        .chunks(n)
        .map(|row| row.iter().zip(&phases[d - 1]).map(|(v, e)| v * e).sum())
        .collect();
    for a in (0..d - 1).rev() {
        current = current
            .chunks(n)
            .map(|row| row.iter().zip(&phases[a]).map(|(v, e)| v * e).sum())
            .collect();
    }
    current[0] * g.cell_volume()
}

/// Values of `∫_Σ ζ(ξ) e^{2πi⟨x,ξ⟩} dσ(ξ)` at a list of points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionEvaluation {
    pub density: SurfaceDensity,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
}

pub fn extend(zeta: &SurfaceDensity, points: &[Vec<f64>]) -> ExtensionEvaluation {
    let values = points.par_iter().map(|x| extend_at(zeta, x)).collect();
    ExtensionEvaluation { density: zeta.clone(), points: points.to_vec(), values }
}

pub fn extend_at(zeta: &SurfaceDensity, x: &[f64]) -> Complex64 {
    let s = zeta.surface();
    zeta.values()
        .iter()
        .zip(s.points())
        .zip(s.weights())
        .map(|((z, p), w)| {
            let phase: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum();
            z * Complex64::from_polar(*w, 2.0 * PI * phase)
        })
        .sum()
}

/// `(⟨R_Σ f, ζ⟩_{L₂(σ)}, Δx^d Σ_x f(x)·conj(E[ζ](x)))`.
pub fn adjoint_check(f: &SampledField, zeta: &SurfaceDensity) -> Result<(Complex64, Complex64)> {
    let rf = restrict(f, zeta.surface())?;
    let lhs = rf.inner(zeta)?;
    let g = f.grid();
    let s = zeta.surface();
    // Only nodes inside the frequency box carry the band-limited field.
    let inside: Vec<(Complex64, &Vec<f64>, f64)> = zeta
        .values()
        .iter()
        .zip(s.points())
        .zip(s.weights())
        .filter(|((_, p), _)| g.contains_freq(p))
        .map(|((z, p), w)| (*z, p, *w))
        .collect();
    let rhs: Complex64 = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let x = g.point(Domain::Space, i);
            let e: Complex64 = inside
                .iter()
                .map(|(z, p, w)| {
                    let phase: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                    z * Complex64::from_polar(*w, 2.0 * PI * phase)
                })
                .sum();
            f.values()[i] * e.conj()
        })
        .sum();
    Ok((lhs, rhs * g.cell_volume()))
}

/// A Knapp cap function and the data needed to check its scaling.
#[derive(Debug, Clone)]
pub struct KnappField {
    pub field: SampledField,
    pub delta: f64,
    pub radius: f64,
    pub center_angle: f64,
}

/// Samples per axis of the default Knapp grid.
pub const KNAPP_SAMPLES: usize = 256;

/// Knapp function for the cap of tangential width `δ` and normal thickness
/// `δ²` centered at node `cap_node` of a circle.
///
/// `f̂ = Ψ(s/(δ/2))·Ψ((ρ - r)/(δ²/2))` in arclength/radial coordinates about
/// the cap center, with `Ψ` a plateau equal to 1 on `[-1/2, 1/2]` and vanishing
/// outside `(-1, 1)`. The grid is anisotropic and centered in frequency at the
/// cap, so the cap must sit on a coordinate axis.
pub fn knapp_function(surface: &Surface, cap_node: usize, delta: f64) -> Result<KnappField> {
    knapp_function_with_samples(surface, cap_node, delta, KNAPP_SAMPLES)
}

pub fn knapp_function_with_samples(surface: &Surface, cap_node: usize, delta: f64, n: usize) -> Result<KnappField> {
    let SurfaceKind::Circle { radius, .. } = *surface.kind() else {
        return Err(Error::UnsupportedSurface("Knapp caps are built on circles".into()));
    };
    if !(1.0 / 64.0 - 1e-15..=0.25 + 1e-15).contains(&delta) {
        return Err(invalid(format!("cap scale {delta} outside [1/64, 1/4]")));
    }
    if cap_node >= surface.len() {
        return Err(invalid(format!("cap node {cap_node} out of range")));
    }
    let c = &surface.points()[cap_node];
    let normal_axis = if c[0].abs() >= c[1].abs() { 0 } else { 1 };
    if c[1 - normal_axis].abs() > 1e-12 * radius {
        return Err(Error::InvalidGrid(
            "an axis-aligned grid resolves δ² only for caps centered on a coordinate axis".into(),
        ));
    }
    let center_angle = surface.params()[cap_node][0];
    let quarter = n as f64 / 8.0;
    let mut half_widths = [0.0; 2];
    half_widths[normal_axis] = quarter / (delta * delta);
    half_widths[1 - normal_axis] = quarter / delta;
    let grid = Grid::anisotropic(&half_widths, n)?.with_freq_center(c)?;
    if grid.dual_spacing(normal_axis) > delta * delta / 16.0 {
        return Err(Error::InvalidGrid(format!("{n} samples cannot resolve δ² = {}", delta * delta)));
    }
    let spectrum = SampledField::from_fn(grid, Domain::Frequency, |xi| {
        Complex64::new(knapp_profile(xi, radius, center_angle, delta), 0.0)
    });
    let field = inverse_fourier_transform(&spectrum)?;
    Ok(KnappField { field, delta, radius, center_angle })
}

/// The Knapp bump `f̂(ξ)`.
pub fn knapp_profile(xi: &[f64], radius: f64, center_angle: f64, delta: f64) -> f64 {
    let rho = xi[0].hypot(xi[1]);
    let mut dth = xi[1].atan2(xi[0]) - center_angle;
    dth = (dth + PI).rem_euclid(2.0 * PI) - PI;
    plateau(radius * dth / (0.5 * delta), 0.5, 1.0) * plateau((rho - radius) / (0.5 * delta * delta), 0.5, 1.0)
}

impl KnappField {
    /// `∫|f̂|²` by tensor Gauss–Legendre in polar coordinates about the cap.
    pub fn spectrum_energy(&self) -> f64 {
        let (r, d) = (self.radius, self.delta);
        let (ts, wt) = composite_gauss_legendre(16, 8, -d / r, d / r);
        let (rs, wr) = composite_gauss_legendre(16, 8, r - d * d, r + d * d);
        let mut acc = 0.0;
        for (t, w1) in ts.iter().zip(&wt) {
            for (rho, w2) in rs.iter().zip(&wr) {
                let th = self.center_angle + t;
                let v = knapp_profile(&[rho * th.cos(), rho * th.sin()], r, self.center_angle, d);
                acc += w1 * w2 * rho * v * v;
            }
        }
        acc
    }

    /// `‖f‖₂²` by Riemann sum on the space grid.
    pub fn energy(&self) -> f64 {
        lp_norm(&self.field, 2.0).map(|v| v * v).unwrap_or(f64::NAN)
    }
}

/// Least-squares fit of an oscillation envelope against radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub exponent: f64,
    pub residual: f64,
}

impl DecayFit {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["radius_or_ring", "magnitude_or_mass", "fitted_exponent", "residual", "classification"])?;
        for (r, m) in self.radii.iter().zip(&self.magnitudes) {
            out.write_record([
                format!("{r:.12e}"),
                format!("{m:.12e}"),
                format!("{:.12e}", self.exponent),
                format!("{:.12e}", self.residual),
                String::new(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Envelope decay of `|E[ζ](R·direction)|`.
///
/// The envelope at `R` is the largest modulus over a window of width
/// `1/spread` centered at `R`, where `spread` is the extent of the surface
/// along `direction`; this is one beat period of the two stationary points.
pub fn decay_exponent(zeta: &SurfaceDensity, direction: &[f64], radii: &[f64]) -> Result<DecayFit> {
    let s = zeta.surface();
    if direction.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: direction.len() });
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(invalid("direction must be nonzero"));
    }
    let dir: Vec<f64> = direction.iter().map(|x| x / norm).collect();
    if radii.len() < 8 {
        return Err(invalid(format!("{} radii given, at least 8 needed", radii.len())));
    }
    if radii.windows(2).any(|p| !(p[1] > p[0])) || !(radii[0] > 0.0) {
        return Err(invalid("radii must be positive and strictly increasing"));
    }
    if radii[radii.len() - 1] < 10.0 * radii[0] {
        return Err(invalid("radii must span at least one decade"));
    }
    let proj = s.points().iter().map(|p| p.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>());
    let (lo, hi) = proj.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    let spread = (hi - lo).max(1e-3);
    let window = 1.0 / spread;
    let magnitudes: Vec<f64> = radii
        .par_iter()
        .map(|r| {
            (0..WINDOW_SAMPLES)
                .map(|k| {
                    let t = r + window * ((k as f64 + 0.5) / WINDOW_SAMPLES as f64 - 0.5);
                    let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
                    extend_at(zeta, &x).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    const FLOOR: f64 = 1e-14;
    if magnitudes.iter().all(|m| *m < FLOOR) {
        return Err(Error::NothingToFit(FLOOR));
    }
    let fit = fit_power_law(radii, &magnitudes)?;
    Ok(DecayFit { radii: radii.to_vec(), magnitudes, exponent: fit.exponent, residual: fit.residual })
}

/// `n` radii in geometric progression from `lo` to `hi`.
pub fn geometric_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailClass {
    Convergent,
    Divergent,
    Marginal,
}

impl std::fmt::Display for TailClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TailClass::Convergent => "convergent",
            TailClass::Divergent => "divergent",
            TailClass::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub inner: f64,
    pub outer: f64,
    pub mass: f64,
}

/// Ring masses of `|E[ζ]|^q` and their power-law trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub q: f64,
    pub rings: Vec<Ring>,
    /// Exponent of ring mass per unit radius; the tail converges iff it is below -1.
    pub exponent: f64,
    pub residual: f64,
    /// Exponent of the mass of a dyadic ring `[R, 2R]`, i.e. `exponent + 1`.
    pub dyadic_exponent: f64,
    pub classification: TailClass,
    /// Mass inside `R_max` plus the power-law tail beyond it, when that converges.
    pub extrapolated_total: Option<f64>,
}

/// Half-width of the marginal band around the critical exponent -1.
pub const MARGINAL_BAND: f64 = 0.1;

impl TailProfile {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["radius_or_ring", "magnitude_or_mass", "fitted_exponent", "residual", "classification"])?;
        for ring in &self.rings {
            out.write_record([
                format!("{:.12e}", ring.inner),
                format!("{:.12e}", ring.mass),
                format!("{:.12e}", self.exponent),
                format!("{:.12e}", self.residual),
                self.classification.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn classify_tail(exponent: f64, band: f64) -> TailClass {
    if exponent < -1.0 - band {
        TailClass::Convergent
    } else if exponent > -1.0 + band {
        TailClass::Divergent
    } else {
        TailClass::Marginal
    }
}

/// Ring masses `∫_{R_j<|x|<R_{j+1}} |E[ζ]|^q dx` over geometric rings from
/// `R_max/16` to `R_max`, with deterministic polar quadrature.
pub fn lq_tail_profile(zeta: &SurfaceDensity, q: f64, r_max: f64, ring_count: usize) -> Result<TailProfile> {
    if !(q > 2.0 && q < 8.0) {
        return Err(Error::InvalidExponent(q));
    }
    if !(r_max >= 50.0) {
        return Err(invalid(format!("R_max = {r_max} must be at least 50")));
    }
    if ring_count < 10 {
        return Err(invalid(format!("{ring_count} rings given, at least 10 needed")));
    }
    let edges = geometric_radii(r_max / 16.0, r_max, ring_count + 1);
    let shell: Box<dyn Fn(f64) -> f64 + Sync> = match zeta.surface().kind() {
        SurfaceKind::Circle { .. } => Box::new(circle_shell(zeta, q, r_max)),
        _ => Box::new(direct_shell(zeta, q, r_max)?),
    };
    let rings: Vec<Ring> = edges
        .windows(2)
        .map(|e| {
            let panels = ((e[1] - e[0]) / 0.125).ceil() as usize;
            let (rs, ws) = composite_gauss_legendre(8, panels, e[0], e[1]);
            let mass: f64 = rs.par_iter().zip(&ws).map(|(r, w)| w * shell(*r)).sum();
            Ring { inner: e[0], outer: e[1], mass }
        })
        .collect();
    let mids: Vec<f64> = rings.iter().map(|r| (r.inner * r.outer).sqrt()).collect();
    let density: Vec<f64> = rings.iter().map(|r| r.mass / (r.outer - r.inner)).collect();
    if density.iter().all(|m| *m < 1e-300) {
        return Err(Error::NothingToFit(1e-300));
    }
    let fit = fit_power_law(&mids, &density)?;
    let inside: f64 = rings.iter().map(|r| r.mass).sum();
    let extrapolated_total = (fit.exponent < -1.0)
        .then(|| inside + fit.prefactor * r_max.powf(fit.exponent + 1.0) / -(fit.exponent + 1.0));
    Ok(TailProfile {
        q,
        rings,
        exponent: fit.exponent,
        residual: fit.residual,
        dyadic_exponent: fit.exponent + 1.0,
        classification: classify_tail(fit.exponent, MARGINAL_BAND),
        extrapolated_total,
    })
}

/// `r ↦ r ∫_0^{2π} |E(r, θ)|^q dθ` on the circle via FFT circular convolution
/// of the (upsampled) density with the kernel `e^{2πi r cos(θ)}`.
fn circle_shell(zeta: &SurfaceDensity, q: f64, r_max: f64) -> impl Fn(f64) -> f64 + Sync {
    let s = zeta.surface();
    let SurfaceKind::Circle { radius, .. } = *s.kind() else { unreachable!() };
    let n0 = s.len();
    let need = (4.0 * PI * radius * r_max + 64.0).ceil() as usize;
    let n = need.max(n0).next_power_of_two();
    // Zero-pad the trigonometric coefficients to n nodes.
    let c = trig_coefficients(zeta.values());
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in c.iter().enumerate() {
        let m = signed_freq(k, n0);
        if n0 % 2 == 0 && m == (n0 / 2) as i64 {
            spec[n0 / 2] += v * 0.5;
            spec[n - n0 / 2] += v * 0.5;
        } else {
            spec[m.rem_euclid(n as i64) as usize] += v;
        }
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // Upsampled density values at phase + 2πj/n, transformed once.
    let mut dens = spec.clone();
    inv.process(&mut dens);
    let w = 2.0 * PI * radius / n as f64;
    let mut dens_hat = dens.iter().map(|v| v * w).collect::<Vec<_>>();
    fwd.process(&mut dens_hat);
    move |r: f64| {
        // E(r, phase + 2πj/n) = Σ_k ζ_k w e^{2πi r R cos(2π(j-k)/n)}.
        let mut kern: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(1.0, 2.0 * PI * r * radius * (2.0 * PI * m as f64 / n as f64).cos()))
            .collect();
        fwd.process(&mut kern);
        let mut e: Vec<Complex64> = kern.iter().zip(&dens_hat).map(|(a, b)| a * b).collect();
        inv.process(&mut e);
        let scale = 1.0 / n as f64;
        let dth = 2.0 * PI / n as f64;
        r * dth * e.iter().map(|v| (v.norm() * scale).powf(q)).sum::<f64>()
    }
}

/// `r ↦ r^{d-1} ∫_{S^{d-1}} |E(rω)|^q dω` by direct summation over a direction rule.
fn direct_shell(zeta: &SurfaceDensity, q: f64, r_max: f64) -> Result<impl Fn(f64) -> f64 + Sync> {
    let s = zeta.surface();
    let d = s.dim();
    let extent = s.extent().max(1e-3);
    let band = 2.0 * PI * extent * r_max;
    let dirs: Surface = if d == 2 {
        make_circle(1.0, ((2.0 * band + 64.0) as usize).next_power_of_two())?
    } else {
        let n_theta = ((band + 32.0) as usize).max(16);
        make_sphere(1.0, SphereResolution { n_theta, n_phi: (2 * n_theta).max(32) })?
    };
    let zeta = zeta.clone();
    Ok(move |r: f64| {
        let total: f64 = dirs
            .points()
            .iter()
            .zip(dirs.weights())
            .map(|(w_dir, w)| {
                let x: Vec<f64> = w_dir.iter().map(|v| v * r).collect();
                w * extend_at(&zeta, &x).norm().powf(q)
            })
            .sum();
        total * r.powi(d as i32 - 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{fourier_transform, schwartz_generator, TestFunction};
    use crate::surface::{make_circle, trace_fn};

    fn circle(n: usize) -> Arc<Surface> {
        Arc::new(make_circle(1.0, n).unwrap())
    }

    #[test]
    fn restrict_gaussian_to_circle() {
        let g = Grid::new(2, 6.0, 128).unwrap();
        let f = schwartz_generator(&g, &TestFunction::gaussian(2)).unwrap();
        let r = restrict(&f, &circle(64)).unwrap();
        for v in r.values() {
            assert!((v - (-PI).exp()).norm() < 1e-8);
        }
        let z = restrict(&SampledField::zeros(g, Domain::Space), &circle(64)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn restrict_matches_fft_at_nodes() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let f = schwartz_generator(
            &g,
            &TestFunction::ModulatedGaussian { center: vec![0.3, -0.2], width: 0.8, frequency: vec![0.5, 0.25] },
        )
        .unwrap();
        let ft = fourier_transform(&f).unwrap();
        for i in [0usize, 17, 300, 777] {
            let xi = ft.node(i);
            assert!((transform_at(&f, &xi) - ft.values()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn extend_total_measure() {
        let s = circle(128);
        let one = SurfaceDensity::constant(s, Complex64::new(1.0, 0.0));
        let e = extend(&one, &[vec![0.0, 0.0]]);
        assert!((e.values[0] - 2.0 * PI).norm() < 1e-12);
    }

    #[test]
    fn adjoint_pairings_agree() {
        let g = Grid::new(2, 5.0, 64).unwrap();
        let f = schwartz_generator(&g, &TestFunction::gaussian(2)).unwrap();
        let s = circle(64);
        let one = SurfaceDensity::constant(s.clone(), Complex64::new(1.0, 0.0));
        let (a, b) = adjoint_check(&f, &one).unwrap();
        let exact = 2.0 * PI * (-PI).exp();
        assert!((a - exact).norm() < 1e-6 * exact);
        assert!((b - exact).norm() < 1e-6 * exact);
        let zero = SurfaceDensity::constant(s, Complex64::new(0.0, 0.0));
        assert_eq!(adjoint_check(&f, &zero).unwrap(), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn decay_rejects_bad_radii_and_zero_density() {
        let s = circle(256);
        let zero = SurfaceDensity::constant(s.clone(), Complex64::new(0.0, 0.0));
        let radii = geometric_radii(1.0, 20.0, 8);
        assert!(matches!(decay_exponent(&zero, &[1.0, 0.0], &radii), Err(Error::NothingToFit(_))));
        let one = SurfaceDensity::constant(s, Complex64::new(1.0, 0.0));
        assert!(decay_exponent(&one, &[1.0, 0.0], &radii[..5]).is_err());
        assert!(decay_exponent(&one, &[1.0, 0.0], &geometric_radii(1.0, 5.0, 8)).is_err());
    }

    #[test]
    fn tail_rejects_bad_exponent() {
        let one = SurfaceDensity::constant(circle(64), Complex64::new(1.0, 0.0));
        assert!(matches!(lq_tail_profile(&one, 1.5, 64.0, 12), Err(Error::InvalidExponent(_))));
        assert!(lq_tail_profile(&one, 4.0, 20.0, 12).is_err());
    }

    #[test]
    fn circle_shell_matches_direct_sum() {
        let density = |p: &[f64]| Complex64::new(1.0 + 0.5 * p[0], p[1] * p[1]);
        let fine = trace_fn(density, &circle(1024));
        let coarse = trace_fn(density, &circle(64));
        let fast = circle_shell(&fine, 3.0, 60.0);
        let upsampled = circle_shell(&coarse, 3.0, 60.0);
        let slow = direct_shell(&fine, 3.0, 60.0).unwrap();
        for r in [3.7, 12.0, 55.5] {
            let (a, b, c) = (fast(r), slow(r), upsampled(r));
            assert!((a - b).abs() < 1e-9 * b, "{r}: {a} vs {b}");
            assert!((c - b).abs() < 1e-9 * b, "{r}: {c} vs {b}");
        }
    }

    #[test]
    fn knapp_requires_axis_aligned_cap() {
        let s = make_circle(1.0, 256).unwrap();
        assert!(matches!(knapp_function(&s, 3, 0.125), Err(Error::InvalidGrid(_))));
        assert!(knapp_function(&s, 0, 0.5).is_err());
        let k = knapp_function(&s, 64, 0.125).unwrap();
        assert_eq!(knapp_profile(&[0.0, 1.0], 1.0, k.center_angle, 0.125), 1.0);
    }
}
