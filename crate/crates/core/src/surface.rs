//! Compact hypersurfaces with surface-measure quadrature, the trace map,
//! partitions of unity over graph charts and the chart extension operator.

use crate::error::{invalid, Error, Result};
use crate::field::{Domain, Grid, SampledField};
use crate::poly::Polynomial;
use crate::profile::mollifier;
use crate::quadrature::{barycentric_eval, gauss_legendre, gauss_legendre_barycentric};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub const MIN_CIRCLE_NODES: usize = 32;
pub const MIN_GRAPH_NODES: usize = 64;
const CONVEXITY_SAMPLES: usize = 2001;

/// A convex graph function, normalized so that its derivative vanishes at 0.
///
/// A polynomial `p` with `p'(0) = a ≠ 0` is rotated about `(0, p(0))` by
/// `-atan(a)`; the rotated curve is evaluated as a graph through Newton's
/// method on the rotated abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFunction {
    poly: Polynomial,
    tilt: f64,
}

impl GraphFunction {
    pub fn new(poly: Polynomial) -> Result<Self> {
        if poly.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: poly.dim() });
        }
        let tilt = poly.partial(0).eval(&[0.0]);
        Ok(Self { poly, tilt })
    }

    /// `h(t) = c·t²`.
    pub fn parabola(c: f64) -> Self {
        Self { poly: Polynomial::new(1, [(vec![2], c)]), tilt: 0.0 }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// Slope of the input polynomial at 0, removed by the normalization.
    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    fn raw(&self, t: f64) -> [f64; 3] {
        let d1 = self.poly.partial(0);
        let d2 = d1.partial(0);
        [self.poly.eval(&[t]), d1.eval(&[t]), d2.eval(&[t])]
    }

    /// `[h(u), h'(u), h''(u)]`.
    pub fn derivs(&self, u: f64) -> Result<[f64; 3]> {
        if self.tilt == 0.0 {
            return Ok(self.raw(u));
        }
        let a = self.tilt;
        let c = 1.0 / (1.0 + a * a).sqrt();
        let p0 = self.poly.eval(&[0.0]);
        let x_of = |t: f64, p: f64| c * t + a * c * (p - p0);
        let mut t = u * c;
        for _ in 0..60 {
            let [p, p1, _] = self.raw(t);
            let x1 = c * (1.0 + a * p1);
            if !(x1 > 0.0) {
                break;
            }
            let step = (x_of(t, p) - u) / x1;
            t -= step;
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                let [p, p1, p2] = self.raw(t);
                let x1 = c * (1.0 + a * p1);
                let y1 = c * (p1 - a);
                return Ok([p0 + c * (p - p0 - a * t), y1 / x1, p2 / x1.powi(3)]);
            }
        }
        Err(invalid(format!("rotated graph is not single-valued near u = {u}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Nodes at `phase + 2πk/n`.
    Circle { radius: f64, phase: f64 },
    /// Gauss–Legendre in `z = cos θ` times uniform `φ`.
    Sphere { radius: f64, n_theta: usize, n_phi: usize },
    GraphCurve { graph: GraphFunction, epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    kind: SurfaceKind,
    points: Vec<Vec<f64>>,
    /// Circle: angle; sphere: `(z/r, φ)`; graph: abscissa.
    params: Vec<[f64; 2]>,
    weights: Vec<f64>,
    normals: Vec<Vec<f64>>,
    curvature: Vec<f64>,
}

pub fn make_circle(radius: f64, node_count: usize) -> Result<Surface> {
    make_circle_with_phase(radius, node_count, 0.0)
}

/// Circle with the node set rotated by `phase`.
pub fn make_circle_with_phase(radius: f64, node_count: usize, phase: f64) -> Result<Surface> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius {radius} must be positive")));
    }
    if node_count < MIN_CIRCLE_NODES {
        return Err(invalid(format!("circle needs at least {MIN_CIRCLE_NODES} nodes, got {node_count}")));
    }
    let w = 2.0 * PI * radius / node_count as f64;
    let mut s = Surface::empty(SurfaceKind::Circle { radius, phase });
    for k in 0..node_count {
        let th = phase + 2.0 * PI * k as f64 / node_count as f64;
        let (sn, cs) = th.sin_cos();
        s.points.push(vec![radius * cs, radius * sn]);
        s.params.push([th, 0.0]);
        s.weights.push(w);
        s.normals.push(vec![cs, sn]);
        s.curvature.push(1.0 / radius);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereResolution {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SphereResolution {
    fn default() -> Self {
        Self { n_theta: 32, n_phi: 64 }
    }
}

pub fn make_sphere(radius: f64, resolution: SphereResolution) -> Result<Surface> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius {radius} must be positive")));
    }
    let SphereResolution { n_theta, n_phi } = resolution;
    if n_theta < 16 || n_phi < 32 {
        return Err(invalid(format!("sphere rule {n_theta}x{n_phi} below the 16x32 minimum")));
    }
    let (zs, wz) = gauss_legendre(n_theta, -1.0, 1.0);
    let mut s = Surface::empty(SurfaceKind::Sphere { radius, n_theta, n_phi });
    let dphi = 2.0 * PI / n_phi as f64;
    for (z, wz) in zs.iter().zip(&wz) {
        let rho = (1.0 - z * z).sqrt();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let (sp, cp) = phi.sin_cos();
            let n = vec![rho * cp, rho * sp, *z];
            s.points.push(n.iter().map(|v| radius * v).collect());
            s.params.push([*z, phi]);
            s.weights.push(radius * radius * wz * dphi);
            s.normals.push(n);
            s.curvature.push(1.0 / radius);
        }
    }
    Ok(s)
}

pub fn make_graph_curve(graph: GraphFunction, epsilon: f64, node_count: usize) -> Result<Surface> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("half-interval {epsilon} must be positive")));
    }
    if node_count < MIN_GRAPH_NODES {
        return Err(invalid(format!("graph curve needs at least {MIN_GRAPH_NODES} nodes, got {node_count}")));
    }
    for i in 0..CONVEXITY_SAMPLES {
        let t = -epsilon + 2.0 * epsilon * i as f64 / (CONVEXITY_SAMPLES - 1) as f64;
        let [_, _, h2] = graph.derivs(t)?;
        if !(h2 > 0.0) {
            return Err(Error::NotConvex { at: t, value: h2 });
        }
    }
    let (ts, wt) = gauss_legendre(node_count, -epsilon, epsilon);
    let mut s = Surface::empty(SurfaceKind::GraphCurve { graph: graph.clone(), epsilon });
    for (t, w) in ts.iter().zip(&wt) {
        let [h, h1, h2] = graph.derivs(*t)?;
        let arc = (1.0 + h1 * h1).sqrt();
        s.points.push(vec![*t, h]);
        s.params.push([*t, 0.0]);
        s.weights.push(w * arc);
        s.normals.push(vec![-h1 / arc, 1.0 / arc]);
        s.curvature.push(h2 / arc.powi(3));
    }
    Ok(s)
}

impl Surface {
    fn empty(kind: SurfaceKind) -> Self {
        Self {
            kind,
            points: Vec::new(),
            params: Vec::new(),
            weights: Vec::new(),
            normals: Vec::new(),
            curvature: Vec::new(),
        }
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SurfaceKind::Sphere { .. } => 3,
            _ => 2,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn params(&self) -> &[[f64; 2]] {
        &self.params
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Radius of a centered circle or sphere.
    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            SurfaceKind::Circle { radius, .. } | SurfaceKind::Sphere { radius, .. } => Some(radius),
            SurfaceKind::GraphCurve { .. } => None,
        }
    }

    pub fn is_rotation_invariant(&self) -> bool {
        self.radius().is_some()
    }

    /// Largest distance from the origin to a node.
    pub fn extent(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Thickness of the thinnest chart tube in which the surface is a graph.
    pub fn chart_thickness(&self) -> f64 {
        match &self.kind {
            SurfaceKind::Circle { radius, .. } => radius * (1.0 - circle_half_angle(4).cos()),
            SurfaceKind::Sphere { radius, .. } => radius * (1.0 - sphere_half_angle().cos()),
            SurfaceKind::GraphCurve { epsilon, .. } => *epsilon,
        }
    }
}

/// A complex density on the quadrature nodes of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDensity {
    surface: Arc<Surface>,
    values: Vec<Complex64>,
}

impl SurfaceDensity {
    pub fn new(surface: Arc<Surface>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != surface.len() {
            return Err(invalid(format!(
                "{} density values for {} nodes",
                values.len(),
                surface.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("density values must be finite"));
        }
        Ok(Self { surface, values })
    }

    pub fn constant(surface: Arc<Surface>, c: Complex64) -> Self {
        let values = vec![c; surface.len()];
        Self { surface, values }
    }

    /// Evaluates `f(point, param)` at each node.
    pub fn from_fn<F>(surface: Arc<Surface>, f: F) -> Self
    where
        F: Fn(&[f64], [f64; 2]) -> Complex64,
    {
        let values = surface.points.iter().zip(&surface.params).map(|(p, q)| f(p, *q)).collect();
        Self { surface, values }
    }

    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `∫ ζ dσ`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.surface.weights).map(|(v, w)| v * w).sum()
    }

    /// `∫ ζ·conj(other) dσ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.surface.weights)
            .map(|((a, b), w)| a * b.conj() * w)
            .sum())
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().zip(&self.surface.weights).map(|(v, w)| v.norm() * w).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { surface: self.surface.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { surface: self.surface.clone(), values })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { surface: self.surface.clone(), values })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.surface, &other.surface) && self.surface != other.surface {
            return Err(invalid("densities live on different surfaces"));
        }
        Ok(())
    }

    pub fn interpolant(&self) -> DensityInterpolant {
        DensityInterpolant::new(self)
    }
}

/// Evaluates a density between nodes: trigonometric on the circle,
/// barycentric on graph curves, local order-4 on the sphere.
#[derive(Debug, Clone)]
pub struct DensityInterpolant {
    surface: Arc<Surface>,
    inner: Interp,
}

#[derive(Debug, Clone)]
enum Interp {
    Trig { phase: f64, coeffs: Vec<Complex64> },
    Sphere { zs: Vec<f64>, n_phi: usize, values: Vec<Complex64> },
    Graph { nodes: Vec<f64>, weights: Vec<f64>, values: Vec<Complex64> },
}

impl DensityInterpolant {
    fn new(zeta: &SurfaceDensity) -> Self {
        let s = &zeta.surface;
        let inner = match &s.kind {
            SurfaceKind::Circle { phase, .. } => {
                Interp::Trig { phase: *phase, coeffs: trig_coefficients(&zeta.values) }
            }
            SurfaceKind::Sphere { n_theta, n_phi, .. } => Interp::Sphere {
                zs: (0..*n_theta).map(|i| s.params[i * n_phi][0]).collect(),
                n_phi: *n_phi,
                values: zeta.values.clone(),
            },
            SurfaceKind::GraphCurve { .. } => Interp::Graph {
                nodes: s.params.iter().map(|p| p[0]).collect(),
                weights: gauss_legendre_barycentric(s.len()),
                values: zeta.values.clone(),
            },
        };
        Self { surface: s.clone(), inner }
    }

    /// Value at the surface parameter (angle; `(z, φ)`; abscissa).
    pub fn eval_param(&self, param: [f64; 2]) -> Complex64 {
        match &self.inner {
            Interp::Trig { phase, coeffs } => trig_eval(coeffs, param[0] - phase),
            Interp::Sphere { zs, n_phi, values } => sphere_eval(zs, *n_phi, values, param),
            Interp::Graph { nodes, weights, values } => {
                let SurfaceKind::GraphCurve { epsilon, .. } = self.surface.kind else { unreachable!() };
                if param[0].abs() >= epsilon {
                    return Complex64::new(0.0, 0.0);
                }
                barycentric_eval(nodes, weights, values, param[0])
            }
        }
    }

    /// Value at the surface point nearest in parameter to `point`.
    pub fn eval_point(&self, point: &[f64]) -> Complex64 {
        self.eval_param(param_of(&self.surface, point))
    }
}

/// Parameter of a point: angle (circle), `(z/|p|, φ)` (sphere), abscissa (graph).
pub fn param_of(surface: &Surface, point: &[f64]) -> [f64; 2] {
    match surface.kind {
        SurfaceKind::Circle { .. } => [point[1].atan2(point[0]), 0.0],
        SurfaceKind::Sphere { .. } => {
            let r = (point[0] * point[0] + point[1] * point[1] + point[2] * point[2]).sqrt();
            [(point[2] / r).clamp(-1.0, 1.0), point[1].atan2(point[0]).rem_euclid(2.0 * PI)]
        }
        SurfaceKind::GraphCurve { .. } => [point[0], 0.0],
    }
}

/// Coefficients `c_k`, `k = 0..n` in FFT order, of the trigonometric interpolant.
pub fn trig_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut c);
    let inv = 1.0 / n as f64;
    c.iter_mut().for_each(|v| *v *= inv);
    c
}

/// Signed frequency of FFT slot `k` with the Nyquist slot reported as `n/2`.
pub(crate) fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

pub(crate) fn trig_eval(coeffs: &[Complex64], theta: f64) -> Complex64 {
    let n = coeffs.len();
    let step = Complex64::from_polar(1.0, theta);
    let mut acc = coeffs[0];
    let mut pos = Complex64::new(1.0, 0.0);
    let top = (n - 1) / 2;
    for k in 1..=top {
        pos *= step;
        acc += coeffs[k] * pos + coeffs[n - k] * pos.conj();
    }
    if n % 2 == 0 {
        let k = n / 2;
        acc += coeffs[k] * (k as f64 * theta).cos();
    }
    acc
}

fn lagrange4(nodes: &[f64], x: f64) -> (usize, [f64; 4]) {
    let n = nodes.len();
    let upper = nodes.partition_point(|v| *v <= x);
    let base = upper.saturating_sub(2).min(n - 4);
    let mut w = [0.0; 4];
    for (m, wm) in w.iter_mut().enumerate() {
        let xm = nodes[base + m];
        *wm = (0..4)
            .filter(|l| *l != m)
            .map(|l| (x - nodes[base + l]) / (xm - nodes[base + l]))
            .product();
    }
    (base, w)
}

fn sphere_eval(zs: &[f64], n_phi: usize, values: &[Complex64], param: [f64; 2]) -> Complex64 {
    let (zb, wz) = lagrange4(zs, param[0]);
    let dphi = 2.0 * PI / n_phi as f64;
    let u = param[1].rem_euclid(2.0 * PI) / dphi;
    let j0 = u.floor() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..4i64 {
        let j = j0 - 1 + m;
        let wp: f64 = (0..4i64)
            .filter(|l| *l != m)
            .map(|l| (u - (j0 - 1 + l) as f64) / (m - l) as f64)
            .product();
        if wp == 0.0 {
            continue;
        }
        let col = j.rem_euclid(n_phi as i64) as usize;
        for (a, w) in wz.iter().enumerate() {
            acc += values[(zb + a) * n_phi + col] * (w * wp);
        }
    }
    acc
}

/// The trace of a sampled frequency field with an interpolation error estimate.
#[derive(Debug, Clone)]
pub struct Trace {
    pub density: SurfaceDensity,
    /// Largest difference between order-4 and order-6 interpolation over the nodes.
    pub error_estimate: f64,
}

/// Values of a closed-form frequency function at the nodes.
pub fn trace_fn<F>(f: F, surface: &Arc<Surface>) -> SurfaceDensity
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let values = surface.points.par_iter().map(|p| f(p)).collect();
    SurfaceDensity { surface: surface.clone(), values }
}

/// Order-4 interpolation of a frequency field at the nodes.
pub fn trace(field: &SampledField, surface: &Arc<Surface>) -> Result<Trace> {
    if field.domain() != Domain::Frequency {
        return Err(Error::WrongDomain { expected: Domain::Frequency, found: field.domain() });
    }
    if field.grid().dim() != surface.dim() {
        return Err(Error::DimensionMismatch { expected: field.grid().dim(), found: surface.dim() });
    }
    let pairs: Vec<(Complex64, f64)> = surface
        .points
        .par_iter()
        .map(|p| {
            let v4 = field.interpolate_with_order(p, 4)?;
            let v6 = field.interpolate_with_order(p, 6)?;
            Ok((v4, (v4 - v6).norm()))
        })
        .collect::<Result<_>>()?;
    let error_estimate = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    let values = pairs.into_iter().map(|p| p.0).collect();
    Ok(Trace { density: SurfaceDensity { surface: surface.clone(), values }, error_estimate })
}

/// Smooth bump `ψ(t) = mollifier(t / support)` with `ψ(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    support: f64,
}

impl BumpProfile {
    pub fn new(support: f64) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(invalid(format!("bump support {support} must be positive")));
        }
        Ok(Self { support })
    }

    /// One tenth of the surface's chart thickness.
    pub fn default_for(surface: &Surface) -> Self {
        Self { support: 0.1 * surface.chart_thickness() }
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval(&self, t: f64) -> f64 {
        mollifier(t / self.support)
    }
}

/// Cap half-angle for an `m`-chart circle atlas: midway between the
/// covering angle `π/m` and the graph limit `π/2`.
pub fn circle_half_angle(m: usize) -> f64 {
    0.5 * (PI / m as f64 + 0.5 * PI)
}

/// Cap half-angle for the six coordinate caps of the sphere.
pub fn sphere_half_angle() -> f64 {
    0.5 * ((1.0 / 3f64.sqrt()).acos() + 0.5 * PI)
}

/// Overlapping caps on a centered circle or sphere, each a graph over its tangent plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    radius: f64,
    centers: Vec<Vec<f64>>,
    half_angle: f64,
}

impl Atlas {
    pub fn new(surface: &Surface, chart_count: usize) -> Result<Self> {
        match surface.kind {
            SurfaceKind::Circle { radius, .. } => {
                if chart_count < 3 {
                    return Err(Error::AtlasTooSmall { count: chart_count });
                }
                let centers = (0..chart_count)
                    .map(|j| {
                        let th = 2.0 * PI * j as f64 / chart_count as f64;
                        vec![th.cos(), th.sin()]
                    })
                    .collect();
                Ok(Self { radius, centers, half_angle: circle_half_angle(chart_count) })
            }
            SurfaceKind::Sphere { radius, .. } => {
                if chart_count != 6 {
                    return Err(Error::AtlasTooSmall { count: chart_count });
                }
                let mut centers = Vec::new();
                for axis in 0..3 {
                    for sign in [1.0, -1.0] {
                        let mut c = vec![0.0; 3];
                        c[axis] = sign;
                        centers.push(c);
                    }
                }
                Ok(Self { radius, centers, half_angle: sphere_half_angle() })
            }
            SurfaceKind::GraphCurve { .. } => {
                Err(Error::UnsupportedSurface("graph curves are a single chart".into()))
            }
        }
    }

    pub fn chart_count(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    fn bump(&self, j: usize, point: &[f64]) -> f64 {
        let r = point.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cosang: f64 = point.iter().zip(&self.centers[j]).map(|(a, b)| a * b).sum::<f64>() / r;
        mollifier(cosang.clamp(-1.0, 1.0).acos() / self.half_angle)
    }

    /// Partition function of chart `j` at a point of the surface.
    pub fn weight(&self, j: usize, point: &[f64]) -> f64 {
        let total: f64 = (0..self.chart_count()).map(|i| self.bump(i, point)).sum();
        self.bump(j, point) / total
    }
}

/// Nonnegative densities summing to one, each supported in one chart.
pub fn partition_of_unity(surface: &Arc<Surface>, chart_count: usize) -> Result<Vec<SurfaceDensity>> {
    if let SurfaceKind::GraphCurve { .. } = surface.kind {
        if chart_count != 1 {
            return Err(invalid("a graph curve is covered by exactly one chart"));
        }
        return Ok(vec![SurfaceDensity::constant(surface.clone(), Complex64::new(1.0, 0.0))]);
    }
    let atlas = Atlas::new(surface, chart_count)?;
    Ok((0..chart_count)
        .map(|j| {
            SurfaceDensity::from_fn(surface.clone(), |p, _| Complex64::new(atlas.weight(j, p), 0.0))
        })
        .collect())
}

/// `Ext[φ]`: a frequency-side function whose trace on the surface is `φ`.
///
/// On a graph chart `Ext[φ](x, y) = φ(x)·ψ(y - h(x))`; on a circle or sphere
/// the same formula is applied in each cap's tangent frame to `φ·p_j` and summed.
#[derive(Debug, Clone)]
pub struct Extension {
    surface: Arc<Surface>,
    interp: DensityInterpolant,
    bump: BumpProfile,
    atlas: Option<Atlas>,
}

pub fn ext_operator(phi: &SurfaceDensity, psi: BumpProfile) -> Result<Extension> {
    let count = match phi.surface.kind {
        SurfaceKind::Circle { .. } => 4,
        SurfaceKind::Sphere { .. } => 6,
        SurfaceKind::GraphCurve { .. } => 1,
    };
    ext_operator_with_charts(phi, psi, count)
}

pub fn ext_operator_with_charts(phi: &SurfaceDensity, psi: BumpProfile, chart_count: usize) -> Result<Extension> {
    let surface = phi.surface.clone();
    let atlas = match surface.kind {
        SurfaceKind::GraphCurve { .. } => None,
        _ => Some(Atlas::new(&surface, chart_count)?),
    };
    let thickness = match &atlas {
        Some(a) => a.radius * (1.0 - a.half_angle.cos()),
        None => surface.chart_thickness(),
    };
    if psi.support > thickness {
        return Err(Error::TubeTooWide(format!(
            "bump support {} exceeds chart thickness {thickness}",
            psi.support
        )));
    }
    Ok(Extension { interp: phi.interpolant(), surface, bump: psi, atlas })
}

impl Extension {
    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn bump(&self) -> BumpProfile {
        self.bump
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match &self.atlas {
            None => {
                let SurfaceKind::GraphCurve { graph, epsilon } = &self.surface.kind else { unreachable!() };
                if xi[0].abs() >= *epsilon {
                    return zero;
                }
                let Ok([h, _, _]) = graph.derivs(xi[0]) else { return zero };
                let psi = self.bump.eval(xi[1] - h);
                if psi == 0.0 {
                    return zero;
                }
                self.interp.eval_param([xi[0], 0.0]) * psi
            }
            Some(atlas) => {
                let r = atlas.radius;
                let reach = r * atlas.half_angle.sin();
                let mut acc = zero;
                for (j, c) in atlas.centers.iter().enumerate() {
                    let a: f64 = xi.iter().zip(c).map(|(x, y)| x * y).sum();
                    let tangential: Vec<f64> = xi.iter().zip(c).map(|(x, y)| x - a * y).collect();
                    let b2: f64 = tangential.iter().map(|x| x * x).sum();
                    if b2 >= reach * reach {
                        continue;
                    }
                    let g = (r * r - b2).sqrt();
                    let psi = self.bump.eval(a - g);
                    if psi == 0.0 {
                        continue;
                    }
                    let foot: Vec<f64> = tangential.iter().zip(c).map(|(t, y)| t + g * y).collect();
                    let pj = atlas.weight(j, &foot);
                    if pj == 0.0 {
                        continue;
                    }
                    acc += self.interp.eval_point(&foot) * (pj * psi);
                }
                acc
            }
        }
    }

    /// Samples the extension on the frequency nodes of `grid`; the tube must fit in the box.
    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        if grid.dim() != self.surface.dim() {
            return Err(Error::DimensionMismatch { expected: self.surface.dim(), found: grid.dim() });
        }
        let s = self.bump.support;
        for a in 0..grid.dim() {
            let lo = grid.freq_coord(a, 0);
            let hi = grid.freq_coord(a, grid.n() - 1);
            let (pmin, pmax) = self
                .surface
                .points
                .iter()
                .map(|p| p[a])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            if pmin - s < lo || pmax + s > hi {
                return Err(Error::TubeTooWide(format!(
                    "tube [{}, {}] on axis {a} leaves the frequency box [{lo}, {hi}]",
                    pmin - s,
                    pmax + s
                )));
            }
        }
        Ok(SampledField::from_fn(grid.clone(), Domain::Frequency, |xi| self.eval(xi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn circle_basics() {
        let s = make_circle(1.0, 256).unwrap();
        assert!((s.total_measure() - 2.0 * PI).abs() < 1e-12);
        let s2 = make_circle(2.0, 256).unwrap();
        assert!(s2.curvature().iter().all(|k| *k == 0.5));
        assert!(make_circle(1.0, 8).is_err());
        assert!(s.normals().iter().all(|n| (n[0].hypot(n[1]) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sphere_moments() {
        let s = Arc::new(make_sphere(1.0, SphereResolution::default()).unwrap());
        assert!((s.total_measure() - 4.0 * PI).abs() < 1e-10);
        let z = trace_fn(|p| c(p[2]), &s).integral();
        assert!(z.norm() < 1e-12);
        let z2 = trace_fn(|p| c(p[2] * p[2]), &s).integral();
        assert!((z2.re - 4.0 * PI / 3.0).abs() < 1e-8);
        assert!(make_sphere(1.0, SphereResolution { n_theta: 8, n_phi: 32 }).is_err());
    }

    #[test]
    fn parabola_arclength_and_curvature() {
        let s = make_graph_curve(GraphFunction::parabola(0.5), 1.0, 64).unwrap();
        let exact = 2f64.sqrt() + 1f64.asinh();
        assert!((s.total_measure() - exact).abs() < 1e-8);
        assert!((exact - 2.29559).abs() < 1e-5);
        let cubic = GraphFunction::new(Polynomial::new(1, [(vec![3], 1.0)])).unwrap();
        assert!(matches!(make_graph_curve(cubic, 1.0, 64), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn tilted_graph_is_normalized() {
        // p(t) = t + t², rotated so the tangent at 0 is horizontal.
        let g = GraphFunction::new(Polynomial::new(1, [(vec![1], 1.0), (vec![2], 1.0)])).unwrap();
        let [h, h1, h2] = g.derivs(0.0).unwrap();
        assert!(h.abs() < 1e-15 && h1.abs() < 1e-14);
        // Curvature of the original at 0 is 2/(1+1)^{3/2}; rotation preserves it.
        assert!((h2 - 2.0 / 2f64.powf(1.5)).abs() < 1e-12);
        let s = make_graph_curve(g, 0.3, 64).unwrap();
        for p in s.points() {
            let u = p[0];
            let [h, ..] = s_graph(&s).derivs(u).unwrap();
            assert!((h - p[1]).abs() < 1e-14);
        }
    }

    fn s_graph(s: &Surface) -> &GraphFunction {
        match s.kind() {
            SurfaceKind::GraphCurve { graph, .. } => graph,
            _ => unreachable!(),
        }
    }

    #[test]
    fn trace_of_closed_forms() {
        let s = Arc::new(make_circle(1.0, 64).unwrap());
        let one = trace_fn(|_| c(1.0), &s);
        assert!(one.values().iter().all(|v| *v == c(1.0)));
        let sph = trace_fn(|x| c(x[0] * x[0] + x[1] * x[1] - 1.0), &s);
        assert!(sph.max_abs() < 1e-15);
        let g = trace_fn(|x| c((-PI * (x[0] * x[0] + x[1] * x[1])).exp()), &s);
        assert!(g.values().iter().all(|v| (v.re - (-PI).exp()).abs() < 1e-15));
    }

    #[test]
    fn trace_of_sampled_gaussian() {
        let grid = Grid::new(2, 8.0, 128).unwrap();
        let f = SampledField::from_fn(grid, Domain::Frequency, |x| {
            c((-PI * (x[0] * x[0] + x[1] * x[1])).exp())
        });
        let s = Arc::new(make_circle(1.0, 64).unwrap());
        let t = trace(&f, &s).unwrap();
        let err = t.density.values().iter().map(|v| (v.re - (-PI).exp()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert!(t.error_estimate < 1e-3 && t.error_estimate >= 0.0);
        let far = Arc::new(make_circle(10.0, 64).unwrap());
        assert!(matches!(trace(&f, &far), Err(Error::OutsideBox { .. })));
    }

    #[test]
    fn partitions_sum_to_one() {
        for s in [
            Arc::new(make_circle(1.0, 128).unwrap()),
            Arc::new(make_sphere(1.0, SphereResolution::default()).unwrap()),
        ] {
            let count = if s.dim() == 2 { 4 } else { 6 };
            let parts = partition_of_unity(&s, count).unwrap();
            let atlas = Atlas::new(&s, count).unwrap();
            for i in 0..s.len() {
                let total: f64 = parts.iter().map(|p| p.values()[i].re).sum();
                assert!((total - 1.0).abs() < 1e-12);
                for (j, p) in parts.iter().enumerate() {
                    let v = p.values()[i].re;
                    assert!(v >= 0.0);
                    let cosang: f64 =
                        s.points()[i].iter().zip(&atlas.centers()[j]).map(|(a, b)| a * b).sum();
                    if cosang.acos() >= atlas.half_angle() {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
        let s = Arc::new(make_circle(1.0, 64).unwrap());
        assert!(matches!(partition_of_unity(&s, 2), Err(Error::AtlasTooSmall { .. })));
    }

    #[test]
    fn ext_is_right_inverse_on_parabola() {
        let s = Arc::new(make_graph_curve(GraphFunction::parabola(0.5), 1.0, 64).unwrap());
        let phi = SurfaceDensity::from_fn(s.clone(), |_, q| c(q[0].cos()));
        let ext = ext_operator(&phi, BumpProfile::default_for(&s)).unwrap();
        for (p, v) in s.points().iter().zip(phi.values()) {
            assert!((ext.eval(p) - v).norm() < 1e-12);
        }
        let u = 0.05;
        assert!((ext.eval(&[0.0, u]).re - ext.bump().eval(u)).abs() < 1e-14);
        assert!(matches!(
            ext_operator(&phi, BumpProfile::new(2.0).unwrap()),
            Err(Error::TubeTooWide(_))
        ));
    }

    #[test]
    fn ext_is_right_inverse_on_circle_and_sphere() {
        let s = Arc::new(make_circle(1.0, 128).unwrap());
        let phi = SurfaceDensity::from_fn(s.clone(), |_, q| Complex64::from_polar(1.0, 3.0 * q[0]));
        let ext = ext_operator(&phi, BumpProfile::default_for(&s)).unwrap();
        for (p, v) in s.points().iter().zip(phi.values()) {
            assert!((ext.eval(p) - v).norm() < 1e-12);
        }
        let sph = Arc::new(make_sphere(1.0, SphereResolution::default()).unwrap());
        let phi = SurfaceDensity::from_fn(sph.clone(), |p, _| c(1.0 + p[0] * p[2]));
        let ext = ext_operator(&phi, BumpProfile::default_for(&sph)).unwrap();
        for (p, v) in sph.points().iter().zip(phi.values()) {
            assert!((ext.eval(p) - v).norm() < 1e-10);
        }
    }

    #[test]
    fn trig_interpolation_is_exact_for_low_modes() {
        let s = Arc::new(make_circle_with_phase(1.0, 32, 0.3).unwrap());
        let zeta = SurfaceDensity::from_fn(s, |_, q| c((2.0 * q[0]).cos() + (5.0 * q[0]).sin()));
        let it = zeta.interpolant();
        for th in [0.0f64, 1.0, 2.5, -3.0] {
            let exact = (2.0 * th).cos() + (5.0 * th).sin();
            assert!((it.eval_param([th, 0.0]).re - exact).abs() < 1e-12);
        }
    }
}
