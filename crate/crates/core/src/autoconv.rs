//! Self-convolution of a density on a convex graph chart: the sumset map
//! `(s, t) ↦ (s+t, h(s)+h(t))`, its change of variables, the closed-form
//! convolution density and the `S_N` slabs along the diagonal.
//!
//! Densities on the chart are measures `ζ(t) dt` in the chart abscissa.

use crate::error::{invalid, Error, Result};
use crate::field::{fourier_transform, inverse_fourier_transform, Domain, Grid, SampledField};
use crate::profile::mollifier;
use crate::quadrature::{composite_gauss_legendre, gauss_legendre};
use crate::surface::{GraphFunction, SurfaceDensity, SurfaceKind};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

pub const DEFAULT_RATIO_LIMIT: f64 = 1.25;
pub const DEGENERACY_MARGIN: f64 = 1e-4;
pub const LEBESGUE_FRACTION: f64 = 0.9;
const RESIDUAL_LIMIT: f64 = 1e-10;
const SAMPLES: usize = 2001;

/// Convex `h` on `(-ε, ε)` with `h'(0) = 0` and `h''` almost constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveChart {
    graph: GraphFunction,
    epsilon: f64,
    /// Dense coefficients of `h`, lowest degree first.
    coeffs: Vec<f64>,
    hpp_min: f64,
    hpp_max: f64,
}

impl CurveChart {
    pub fn new(graph: GraphFunction, epsilon: f64) -> Result<Self> {
        Self::with_ratio_limit(graph, epsilon, DEFAULT_RATIO_LIMIT)
    }

    pub fn with_ratio_limit(graph: GraphFunction, epsilon: f64, ratio_limit: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("chart half-width {epsilon} must be positive")));
        }
        if graph.tilt() != 0.0 {
            return Err(Error::Precondition(format!("h'(0) = {} must vanish", graph.tilt())));
        }
        let degree = graph.poly().degree() as usize;
        let mut coeffs = vec![0.0; degree + 1];
        for m in graph.poly().terms() {
            coeffs[m.exponents[0] as usize] += m.coeff;
        }
        let mut chart = Self { graph, epsilon, coeffs, hpp_min: f64::INFINITY, hpp_max: 0.0 };
        for i in 0..SAMPLES {
            let t = -epsilon + 2.0 * epsilon * i as f64 / (SAMPLES - 1) as f64;
            let h2 = chart.derivs(t)[2];
            if !(h2 > 0.0) {
                return Err(Error::NotConvex { at: t, value: h2 });
            }
            chart.hpp_min = chart.hpp_min.min(h2);
            chart.hpp_max = chart.hpp_max.max(h2);
        }
        if chart.hpp_max / chart.hpp_min > ratio_limit {
            return Err(Error::Precondition(format!(
                "h'' ratio {:.4} exceeds {ratio_limit}",
                chart.hpp_max / chart.hpp_min
            )));
        }
        Ok(chart)
    }

    /// `h(t) = t²/2` on `(-ε, ε)`.
    pub fn parabola(epsilon: f64) -> Result<Self> {
        Self::new(GraphFunction::parabola(0.5), epsilon)
    }

    pub fn graph(&self) -> &GraphFunction {
        &self.graph
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `max h'' / min h''` over the chart.
    pub fn curvature_ratio(&self) -> f64 {
        self.hpp_max / self.hpp_min
    }

    /// `[h, h', h'']` by Horner.
    pub fn derivs(&self, t: f64) -> [f64; 3] {
        let (mut p0, mut p1, mut p2) = (0.0, 0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            p2 = p2 * t + 2.0 * p1;
            p1 = p1 * t + p0;
            p0 = p0 * t + c;
        }
        [p0, p1, p2]
    }

    pub fn h(&self, t: f64) -> f64 {
        self.derivs(t)[0]
    }

    pub fn dh(&self, t: f64) -> f64 {
        self.derivs(t)[1]
    }

    /// `(s+t, h(s)+h(t))`.
    pub fn sum_map(&self, s: f64, t: f64) -> [f64; 2] {
        [s + t, self.h(s) + self.h(t)]
    }

    /// `|h'(s) - h'(t)|`.
    pub fn jacobian(&self, s: f64, t: f64) -> f64 {
        (self.dh(s) - self.dh(t)).abs()
    }
}

/// `Φ̃(s, t) = Φ(s+t, h(s)+h(t))`.
pub fn phi_tilde<'a, F>(phi: F, chart: &'a CurveChart) -> impl Fn(f64, f64) -> f64 + 'a
where
    F: Fn(f64, f64) -> f64 + 'a,
{
    move |s, t| {
        let [xi, eta] = chart.sum_map(s, t);
        phi(xi, eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumsetPoint {
    pub xi: f64,
    pub eta: f64,
    pub s: f64,
    pub t: f64,
    pub jacobian: f64,
}

impl SumsetPoint {
    pub fn residuals(&self, chart: &CurveChart) -> [f64; 2] {
        let [a, b] = chart.sum_map(self.s, self.t);
        [(a - self.xi).abs(), (b - self.eta).abs()]
    }
}

/// `F(u) = h(m - u/2) + h(m + u/2) - η`, increasing in `u > 0`.
fn gap(chart: &CurveChart, m: f64, u: f64, eta: f64) -> f64 {
    chart.h(m - 0.5 * u) + chart.h(m + 0.5 * u) - eta
}

/// Solves `s + t = ξ`, `h(s) + h(t) = η` with `s < t` in `(-ε, ε)`.
pub fn solve_sumset(chart: &CurveChart, xi: f64, eta: f64) -> Result<SumsetPoint> {
    let m = 0.5 * xi;
    let outside = Error::OutsideSumset { xi, eta };
    if !(m.abs() < chart.epsilon) || !eta.is_finite() {
        return Err(outside);
    }
    let u_max = 2.0 * (chart.epsilon - m.abs());
    let f0 = gap(chart, m, 0.0, eta);
    let scale = 1.0 + eta.abs();
    if f0.abs() <= 4.0 * f64::EPSILON * scale {
        return Err(Error::Degenerate { xi, eta, gap: 0.0 });
    }
    if f0 > 0.0 || gap(chart, m, u_max, eta) <= 0.0 {
        return Err(outside);
    }
    let (mut lo, mut hi) = (0.0, u_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(chart, m, mid, eta) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let u = 0.5 * (lo + hi);
    let (s, t) = (m - 0.5 * u, m + 0.5 * u);
    let p = SumsetPoint { xi, eta, s, t, jacobian: chart.jacobian(s, t) };
    let [r1, r2] = p.residuals(chart);
    if r1 > RESIDUAL_LIMIT * scale || r2 > RESIDUAL_LIMIT * scale {
        return Err(invalid(format!("sumset solve residuals {r1:.3e}, {r2:.3e} at ({xi}, {eta})")));
    }
    if !(s < t) {
        return Err(Error::Degenerate { xi, eta, gap: t - s });
    }
    Ok(p)
}

/// Smooth bump `a·mollifier(|x - c|/ρ)`, optionally times `(ξ - c_ξ)/ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumsetBump {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    pub odd: bool,
}

impl SumsetBump {
    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        let dx = xi - self.center[0];
        let dy = eta - self.center[1];
        let r = (dx * dx + dy * dy).sqrt() / self.radius;
        let v = self.amplitude * mollifier(r);
        if self.odd {
            v * dx / self.radius
        } else {
            v
        }
    }

    /// `[[ξ_min, ξ_max], [η_min, η_max]]`.
    pub fn support(&self) -> [[f64; 2]; 2] {
        let [a, b] = self.center;
        [[a - self.radius, a + self.radius], [b - self.radius, b + self.radius]]
    }
}

const PANEL_ORDER: usize = 16;

fn panels(node_count: usize) -> usize {
    node_count.div_ceil(PANEL_ORDER).max(1)
}

/// Both sides of `∬ Φ̃|h'(s) - h'(t)| ds dt = 2∬_{sumset} Φ dξ dη`.
///
/// Left: nested Gauss–Legendre over the triangle `s < t`, doubled (`Φ̃` is
/// symmetric). Right: tensor Gauss–Legendre over `support`, with every node
/// where `Φ ≠ 0` required to lie in the sumset.
pub fn change_of_variables_check<F>(
    phi: F,
    support: [[f64; 2]; 2],
    chart: &CurveChart,
    node_count: usize,
) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let eps = chart.epsilon;
    let p = panels(node_count);
    let (ts, wt) = composite_gauss_legendre(PANEL_ORDER, p, -eps, eps);
    let left: f64 = ts
        .par_iter()
        .zip(&wt)
        .map(|(&t, &w_t)| {
            let (ss, ws) = composite_gauss_legendre(PANEL_ORDER, p, -eps, t);
            let inner: f64 = ss
                .iter()
                .zip(&ws)
                .map(|(&s, &w_s)| {
                    let [xi, eta] = chart.sum_map(s, t);
                    phi(xi, eta) * chart.jacobian(s, t) * w_s
                })
                .sum();
            inner * w_t
        })
        .sum::<f64>()
        * 2.0;

    let (xs, wx) = composite_gauss_legendre(PANEL_ORDER, p, support[0][0], support[0][1]);
    let (ys, wy) = composite_gauss_legendre(PANEL_ORDER, p, support[1][0], support[1][1]);
    let rows: Result<Vec<f64>> = xs
        .par_iter()
        .zip(&wx)
        .map(|(&xi, &w_x)| {
            let mut acc = 0.0;
            for (&eta, &w_y) in ys.iter().zip(&wy) {
                let v = phi(xi, eta);
                if v != 0.0 {
                    solve_sumset(chart, xi, eta).map_err(|_| Error::OutsideSumset { xi, eta })?;
                }
                acc += v * w_y;
            }
            Ok(acc * w_x)
        })
        .collect();
    let right = 2.0 * rows?.iter().sum::<f64>();
    Ok((left, right))
}

/// A chart density `t ↦ ζ(t)` read off a graph-curve [`SurfaceDensity`].
pub fn chart_density(zeta: &SurfaceDensity, chart: &CurveChart) -> Result<impl Fn(f64) -> Complex64 + Sync> {
    match zeta.surface().kind() {
        SurfaceKind::GraphCurve { graph, epsilon } if graph == chart.graph() && *epsilon == chart.epsilon() => {}
        _ => return Err(invalid("density must live on the chart's graph curve")),
    }
    let interp = zeta.interpolant();
    Ok(move |t: f64| interp.eval_param([t, 0.0]))
}

/// `μ*μ(ξ, η) = 2ζ(s)ζ(t)/|h'(s) - h'(t)|` for `μ = ζ(t) dt` pushed to the curve.
pub fn autoconvolution_density(zeta: &SurfaceDensity, chart: &CurveChart, xi: f64, eta: f64) -> Result<Complex64> {
    let f = chart_density(zeta, chart)?;
    autoconvolution_density_fn(&f, chart, xi, eta, DEGENERACY_MARGIN)
}

pub fn autoconvolution_density_fn<F>(zeta: &F, chart: &CurveChart, xi: f64, eta: f64, margin: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let p = solve_sumset(chart, xi, eta)?;
    if p.t - p.s < margin {
        return Err(Error::Degenerate { xi, eta, gap: p.t - p.s });
    }
    Ok(2.0 * zeta(p.s) * zeta(p.t) / p.jacobian)
}

/// Quadrature node of an `S_N` covering: image point, `dξ dη` weight and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnNode {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
    pub s: f64,
    pub t: f64,
    pub jacobian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnRegion {
    pub n: usize,
    pub interval: [f64; 2],
    pub nodes: Vec<SnNode>,
    pub measure: f64,
    pub jacobian_min: f64,
    pub jacobian_max: f64,
}

const SN_U_NODES: usize = 16;
const SN_M_NODES: usize = 64;

/// `S_N = {(ξ,η) : s, t ∈ I, 1/N ≤ t - s ≤ 1.1/N}` covered in `(m, u)`
/// coordinates, `s = m - u/2`, `t = m + u/2`, where `dξ dη = |h'(t) - h'(s)| dm du`.
pub fn sn_region(chart: &CurveChart, interval: [f64; 2], n: usize) -> Result<SnRegion> {
    let [a, b] = interval;
    if n < 4 {
        return Err(invalid(format!("N = {n} must be at least 4")));
    }
    if !(a < b && a > -chart.epsilon && b < chart.epsilon) {
        return Err(invalid(format!("interval [{a}, {b}] must lie inside the chart")));
    }
    let (u_lo, u_hi) = (1.0 / n as f64, 1.1 / n as f64);
    if u_hi >= b - a {
        return Err(invalid(format!("1.1/N = {u_hi} does not fit in |I| = {}", b - a)));
    }
    let (us, wu) = gauss_legendre(SN_U_NODES, u_lo, u_hi);
    let mut nodes = Vec::with_capacity(SN_U_NODES * SN_M_NODES);
    for (&u, &w_u) in us.iter().zip(&wu) {
        let (ms, wm) = gauss_legendre(SN_M_NODES, a + 0.5 * u, b - 0.5 * u);
        for (&m, &w_m) in ms.iter().zip(&wm) {
            let (s, t) = (m - 0.5 * u, m + 0.5 * u);
            let jacobian = chart.jacobian(s, t);
            let [xi, eta] = chart.sum_map(s, t);
            nodes.push(SnNode { xi, eta, weight: w_u * w_m * jacobian, s, t, jacobian });
        }
    }
    let measure = nodes.iter().map(|p| p.weight).sum();
    let jacobian_min = nodes.iter().map(|p| p.jacobian).fold(f64::INFINITY, f64::min);
    let jacobian_max = nodes.iter().map(|p| p.jacobian).fold(0.0, f64::max);
    Ok(SnRegion { n, interval, nodes, measure, jacobian_min, jacobian_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub n: usize,
    pub measure: f64,
    pub min_density: f64,
    pub l2_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub rows: Vec<BlowupRow>,
    /// Running sums of `l2_mass` over the list.
    pub cumulative: Vec<f64>,
    /// Fraction of the interval where `|ζ| ≥ 1`.
    pub fraction: f64,
}

impl BlowupReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["N", "measure_S_N", "min_density_on_S_N", "L2_mass"])?;
        for r in &self.rows {
            out.write_record([
                r.n.to_string(),
                format!("{:.12e}", r.measure),
                format!("{:.12e}", r.min_density),
                format!("{:.12e}", r.l2_mass),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn mass_spread(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.l2_mass).fold(0.0, f64::max);
        let min = self.rows.iter().map(|r| r.l2_mass).fold(f64::INFINITY, f64::min);
        max / min
    }
}

pub fn blowup_test(zeta: &SurfaceDensity, chart: &CurveChart, interval: [f64; 2], n_list: &[usize]) -> Result<BlowupReport> {
    let f = chart_density(zeta, chart)?;
    blowup_test_fn(&f, chart, interval, n_list)
}

/// `∫_{S_N} |μ*μ|² dξ dη` for each `N`, after checking `|ζ| ≥ 1` on 90% of `I`.
pub fn blowup_test_fn<F>(zeta: &F, chart: &CurveChart, interval: [f64; 2], n_list: &[usize]) -> Result<BlowupReport>
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    let [a, b] = interval;
    let hits = (0..SAMPLES)
        .filter(|i| zeta(a + (b - a) * *i as f64 / (SAMPLES - 1) as f64).norm() >= 1.0)
        .count();
    let fraction = hits as f64 / SAMPLES as f64;
    if fraction < LEBESGUE_FRACTION {
        return Err(Error::Precondition(format!(
            "|ζ| ≥ 1 on a {fraction:.3} fraction of the interval, need {LEBESGUE_FRACTION}"
        )));
    }
    let rows: Vec<BlowupRow> = n_list
        .par_iter()
        .map(|&n| {
            let region = sn_region(chart, interval, n)?;
            let mut l2_mass = 0.0;
            let mut min_density = f64::INFINITY;
            for p in &region.nodes {
                let d = (2.0 * zeta(p.s) * zeta(p.t) / p.jacobian).norm();
                min_density = min_density.min(d);
                l2_mass += d * d * p.weight;
            }
            Ok(BlowupRow { n, measure: region.measure, min_density, l2_mass })
        })
        .collect::<Result<_>>()?;
    let cumulative = rows
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r.l2_mass;
            Some(*acc)
        })
        .collect();
    Ok(BlowupReport { rows, cumulative, fraction })
}

/// Brute-force reference for `μ*μ`: Gaussian-mollified `μ` on a grid,
/// squared in frequency, and the width extrapolated to zero in `w²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionOracle {
    pub half_width: f64,
    pub n: usize,
    pub widths: [f64; 2],
    pub atoms: usize,
}

impl Default for ConvolutionOracle {
    fn default() -> Self {
        Self { half_width: 1.5, n: 1024, widths: [0.012, 0.008], atoms: 2048 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub xi: f64,
    pub eta: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub relative_error: f64,
}

impl ConvolutionOracle {
    /// `g*g` for `g = μ * G_w` on the configured grid.
    pub fn mollified_square<F>(&self, zeta: &F, chart: &CurveChart, width: f64) -> Result<SampledField>
    where
        F: Fn(f64) -> Complex64 + Sync + ?Sized,
    {
        let grid = Grid::new(2, self.half_width, self.n)?;
        let h = grid.spacing(0);
        let reach = (6.0 * width / h).ceil() as isize;
        let (ts, wt) = gauss_legendre(self.atoms, -chart.epsilon, chart.epsilon);
        let norm = 1.0 / (2.0 * PI * width * width);
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let x0 = grid.space_coord(0, 0);
        let n = self.n as isize;
        for (&t, &w) in ts.iter().zip(&wt) {
            let weight = zeta(t) * w * norm;
            let (px, py) = (t, chart.h(t));
            let (ci, cj) = (((px - x0) / h).round() as isize, ((py - x0) / h).round() as isize);
            for i in (ci - reach).max(0)..=(ci + reach).min(n - 1) {
                let dx = x0 + i as f64 * h - px;
                for j in (cj - reach).max(0)..=(cj + reach).min(n - 1) {
                    let dy = x0 + j as f64 * h - py;
                    values[(i * n + j) as usize] += weight * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp();
                }
            }
        }
        let g = SampledField::from_values(grid.clone(), Domain::Space, values)?;
        let spec = fourier_transform(&g)?;
        let squared = spec.map(|_, v| v * v);
        inverse_fourier_transform(&squared)
    }

    pub fn compare<F>(&self, zeta: &F, chart: &CurveChart, points: &[[f64; 2]]) -> Result<Vec<OracleRow>>
    where
        F: Fn(f64) -> Complex64 + Sync + ?Sized,
    {
        let [w1, w2] = self.widths;
        let f1 = self.mollified_square(zeta, chart, w1)?;
        let f2 = self.mollified_square(zeta, chart, w2)?;
        points
            .iter()
            .map(|&[xi, eta]| {
                let closed_form = autoconvolution_density_fn(zeta, chart, xi, eta, DEGENERACY_MARGIN)?.norm();
                let d1 = f1.interpolate(&[xi, eta])?.re;
                let d2 = f2.interpolate(&[xi, eta])?.re;
                let oracle = (w1 * w1 * d2 - w2 * w2 * d1) / (w1 * w1 - w2 * w2);
                Ok(OracleRow {
                    xi,
                    eta,
                    closed_form,
                    oracle,
                    relative_error: (closed_form - oracle).abs() / closed_form.abs(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_derivatives() {
        let c = CurveChart::parabola(1.5).unwrap();
        let d = c.derivs(0.4);
        assert!((d[0] - 0.08).abs() < 1e-15 && d[1] == 0.4 && d[2] == 1.0);
        assert_eq!(c.curvature_ratio(), 1.0);
    }

    #[test]
    fn parabola_closed_forms() {
        let c = CurveChart::parabola(1.5).unwrap();
        let p = solve_sumset(&c, 0.0, 1.0).unwrap();
        assert!((p.s + 1.0).abs() < 1e-10 && (p.t - 1.0).abs() < 1e-10);
        assert!((p.jacobian - 2.0).abs() < 1e-10);
        let p = solve_sumset(&c, 0.4, 0.5).unwrap();
        let r = (0.5f64 - 0.04).sqrt();
        assert!((p.s - (0.2 - r)).abs() < 1e-10 && (p.t - (0.2 + r)).abs() < 1e-10);
        assert!(matches!(solve_sumset(&c, 0.0, 0.0), Err(Error::Degenerate { .. })));
        assert!(matches!(solve_sumset(&c, 0.0, -0.1), Err(Error::OutsideSumset { .. })));
        assert!(matches!(solve_sumset(&c, 0.0, 3.0), Err(Error::OutsideSumset { .. })));
    }

    #[test]
    fn tilted_or_flat_charts_rejected() {
        let tilted = GraphFunction::new(crate::Polynomial::new(1, [(vec![1], 0.3), (vec![2], 0.5)])).unwrap();
        assert!(CurveChart::new(tilted, 0.5).is_err());
        let quartic = GraphFunction::new(crate::Polynomial::new(1, [(vec![2], 0.5), (vec![4], 1.0)])).unwrap();
        assert!(CurveChart::new(quartic, 0.5).is_err());
    }

    #[test]
    fn sn_region_rejects_bad_input() {
        let c = CurveChart::parabola(1.0).unwrap();
        assert!(sn_region(&c, [-0.5, 0.5], 3).is_err());
        assert!(sn_region(&c, [-1.5, 0.5], 8).is_err());
        assert!(sn_region(&c, [-0.01, 0.01], 8).is_err());
    }
}
