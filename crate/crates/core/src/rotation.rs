//! Averaging of surface densities and fields over rotations near the identity.

use crate::error::{invalid, Error, Result};
use crate::field::{Domain, SampledField};
use crate::profile::mollifier;
use crate::surface::{param_of, SurfaceDensity, SurfaceKind};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boundary/peak ratio above which averaging a field is refused.
pub const AVERAGE_DECAY: f64 = 1e-8;

/// A rotation of `R^2` or `R^3` stored as a row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    dim: usize,
    matrix: Vec<f64>,
}

impl Rotation {
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { dim: 2, matrix: vec![c, -s, s, c] }
    }

    /// Rodrigues rotation about `v/|v|` by `|v|`.
    pub fn axis_angle(v: [f64; 3]) -> Self {
        let th = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if th == 0.0 {
            return Self { dim: 3, matrix: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0] };
        }
        let k = [v[0] / th, v[1] / th, v[2] / th];
        let (s, c) = th.sin_cos();
        let t = 1.0 - c;
        let matrix = vec![
            c + k[0] * k[0] * t,
            k[0] * k[1] * t - k[2] * s,
            k[0] * k[2] * t + k[1] * s,
            k[1] * k[0] * t + k[2] * s,
            c + k[1] * k[1] * t,
            k[1] * k[2] * t - k[0] * s,
            k[2] * k[0] * t - k[1] * s,
            k[2] * k[1] * t + k[0] * s,
            c + k[2] * k[2] * t,
        ];
        Self { dim: 3, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.matrix[i * d + j] * x[j]).sum()).collect()
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.matrix[j * d + i] * x[j]).sum()).collect()
    }

    /// Geodesic distance to the identity, the rotation angle.
    pub fn angle(&self) -> f64 {
        let tr: f64 = (0..self.dim).map(|i| self.matrix[i * self.dim + i]).sum();
        let c = if self.dim == 2 { tr / 2.0 } else { (tr - 1.0) / 2.0 };
        c.clamp(-1.0, 1.0).acos()
    }

    /// Planar angle of a 2-D rotation.
    pub fn planar_angle(&self) -> Option<f64> {
        (self.dim == 2).then(|| self.matrix[2].atan2(self.matrix[0]))
    }
}

/// Quadrature for `φ_n dμ` on rotations within angle `1/n` of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationWeight {
    dim: usize,
    n: usize,
    rotations: Vec<Rotation>,
    weights: Vec<f64>,
}

pub fn make_rotation_weight(dim: usize, n: usize, sample_count: usize) -> Result<RotationWeight> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedSurface(format!("rotation averaging in dimension {dim}")));
    }
    if n < 1 {
        return Err(invalid("concentration index n must be at least 1"));
    }
    if sample_count < 16 {
        return Err(invalid(format!("{sample_count} rotation samples given, at least 16 needed")));
    }
    let radius = 1.0 / n as f64;
    let mut rotations = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        // Trapezoid nodes on [-1/n, 1/n]; the endpoint weights vanish.
        for i in 1..sample_count {
            let th = -radius + 2.0 * radius * i as f64 / sample_count as f64;
            let w = mollifier(th / radius);
            if w > 0.0 {
                rotations.push(Rotation::planar(th));
                weights.push(w);
            }
        }
    } else {
        let m = ((sample_count as f64).cbrt().ceil() as usize).max(3);
        let h = 2.0 * radius / m as f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let v = [i, j, k].map(|a| -radius + (a as f64 + 0.5) * h);
                    let t = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    let haar = if t == 0.0 { 1.0 } else { (2.0 - 2.0 * t.cos()) / (t * t) };
                    let w = mollifier(t / radius) * haar;
                    if w > 0.0 {
                        rotations.push(Rotation::axis_angle(v));
                        weights.push(w);
                    }
                }
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(RotationWeight { dim, n, rotations, weights })
}

impl RotationWeight {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_i w_i e^{-ikα_i}`, the factor multiplying Fourier coefficient `k`
    /// of a circle density under averaging.
    pub fn circle_multiplier(&self, k: i64) -> Complex64 {
        self.rotations
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| Complex64::from_polar(*w, -(k as f64) * r.planar_angle().unwrap_or(0.0)))
            .sum()
    }
}

/// `ζ_T(ξ) = ζ(T⁻¹ξ)` at the nodes, by trigonometric (circle) or local
/// order-4 (sphere) interpolation.
pub fn rotate_density(zeta: &SurfaceDensity, rotation: &Rotation) -> Result<SurfaceDensity> {
    let s = zeta.surface();
    if !s.is_rotation_invariant() {
        return Err(Error::UnsupportedSurface("rotation needs a centered circle or sphere".into()));
    }
    if rotation.dim != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: rotation.dim });
    }
    let interp = zeta.interpolant();
    let values = match s.kind() {
        SurfaceKind::Circle { .. } => {
            let alpha = rotation.planar_angle().unwrap_or(0.0);
            s.params().iter().map(|p| interp.eval_param([p[0] - alpha, 0.0])).collect()
        }
        _ => s
            .points()
            .par_iter()
            .map(|p| interp.eval_param(param_of(s, &rotation.apply_inverse(p))))
            .collect(),
    };
    SurfaceDensity::new(s.clone(), values)
}

/// `ζ_n = Σ_i w_i ζ_{T_i}`.
pub fn average_density(zeta: &SurfaceDensity, weight: &RotationWeight) -> Result<SurfaceDensity> {
    if weight.dim != zeta.surface().dim() {
        return Err(Error::DimensionMismatch { expected: zeta.surface().dim(), found: weight.dim });
    }
    let parts: Vec<Vec<Complex64>> = weight
        .rotations
        .par_iter()
        .zip(&weight.weights)
        .map(|(r, w)| rotate_density(zeta, r).map(|z| z.values().iter().map(|v| v * w).collect()))
        .collect::<Result<_>>()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); zeta.values().len()];
    for p in &parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    SurfaceDensity::new(zeta.surface().clone(), acc)
}

/// `g_n(x) = Σ_i w_i g(T_i x)`.
///
/// Each `g∘T_i` is computed exactly for band-limited periodic samples by FFT
/// shears; in 3-D, `T = R_z R_y R_x` and each planar factor is three shears.
/// Works on either domain of a cube grid.
pub fn average_field(g: &SampledField, weight: &RotationWeight) -> Result<SampledField> {
    let grid = g.grid();
    if grid.dim() != weight.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: weight.dim });
    }
    if !grid.is_cube() {
        return Err(Error::InvalidGrid("rotation averaging needs a centered cube grid".into()));
    }
    g.check_decay(AVERAGE_DECAY)?;
    let parts: Vec<Vec<Complex64>> = weight
        .rotations
        .par_iter()
        .zip(&weight.weights)
        .map(|(r, w)| {
            let mut v = compose_with_rotation(g, r);
            v.iter_mut().for_each(|x| *x *= w);
            v
        })
        .collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); g.values().len()];
    for p in &parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    SampledField::from_values(grid.clone(), g.domain(), acc)
}

/// Samples of `x ↦ g(Tx)`.
pub fn compose_with_rotation(g: &SampledField, rotation: &Rotation) -> Vec<Complex64> {
    let mut v = g.values().to_vec();
    let h = match g.domain() {
        Domain::Space => g.grid().spacing(0),
        Domain::Frequency => g.grid().dual_spacing(0),
    };
    let n = g.grid().n();
    let m = &rotation.matrix;
    if rotation.dim == 2 {
        rotate_plane(&mut v, n, 2, h, 0, 1, m[2].atan2(m[0]));
    } else {
        // T = R_z(c) R_y(b) R_x(a); g∘T applies the factors left to right.
        let b = (-m[6]).clamp(-1.0, 1.0).asin();
        let a = m[7].atan2(m[8]);
        let c = m[3].atan2(m[0]);
        rotate_plane(&mut v, n, 3, h, 0, 1, c);
        rotate_plane(&mut v, n, 3, h, 2, 0, b);
        rotate_plane(&mut v, n, 3, h, 1, 2, a);
    }
    v
}

/// Replaces samples of `g` by samples of `g∘R`, with `R` the rotation by `theta`
/// taking axis `p` toward axis `q`.
fn rotate_plane(v: &mut [Complex64], n: usize, dim: usize, h: f64, p: usize, q: usize, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let a = -(theta / 2.0).tan();
    let b = theta.sin();
    shear(v, n, dim, h, p, q, a);
    shear(v, n, dim, h, q, p, b);
    shear(v, n, dim, h, p, q, a);
}

/// `g(x) ↦ g(x + a·x_q·e_p)`: each line along axis `p` is shifted by `a·x_q`.
fn shear(v: &mut [Complex64], n: usize, dim: usize, h: f64, p: usize, q: usize, a: f64) {
    let stride_p = n.pow((dim - 1 - p) as u32);
    let stride_q = n.pow((dim - 1 - q) as u32);
    let starts: Vec<usize> = (0..v.len()).filter(|i| (i / stride_p) % n == 0).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let period = n as f64 * h;
    let lines: Vec<Vec<Complex64>> = starts
        .par_iter()
        .map(|&s| {
            let xq = (((s / stride_q) % n) as f64 - (n / 2) as f64) * h;
            let shift = a * xq;
            let mut line: Vec<Complex64> = (0..n).map(|j| v[s + j * stride_p]).collect();
            fwd.process(&mut line);
            for (k, c) in line.iter_mut().enumerate() {
                let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                if k == n / 2 {
                    *c *= (2.0 * PI * (n / 2) as f64 * shift / period).cos();
                } else {
                    *c *= Complex64::from_polar(1.0, 2.0 * PI * kk * shift / period);
                }
            }
            inv.process(&mut line);
            line.iter_mut().for_each(|c| *c /= n as f64);
            line
        })
        .collect();
    for (s, line) in starts.iter().zip(lines) {
        for (j, c) in line.into_iter().enumerate() {
            v[s + j * stride_p] = c;
        }
    }
}

/// Relative size of rounding noise in averaged samples.
const ROUNDING_FLOOR: f64 = 1e-12;

/// One radial ring of a polar `L_q` distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingDistance {
    pub inner: f64,
    pub outer: f64,
    /// `∫_ring |g - g_n|^q`.
    pub value: f64,
    /// `2^q ∫_ring |g|^q` plus a rounding floor of `(1e-12·max|g|)^q` per unit volume.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarDistance {
    pub q: f64,
    /// `∫ |g - g_n|^q`.
    pub total: f64,
    /// `‖g - g_n‖_q`.
    pub norm: f64,
    pub rings: Vec<RingDistance>,
    pub dominated: bool,
}

/// `∫_0^∞ (∫_{S^{d-1}} |g - g_n|^q dσ) r^{d-1} dr` as a sum over radial rings of
/// grid cells, with the per-ring domination check against `2^q |g|^q`.
pub fn polar_lq_distance(g: &SampledField, g_n: &SampledField, q: f64, ring_count: usize) -> Result<PolarDistance> {
    if !(q >= 1.0) || q.is_infinite() {
        return Err(Error::InvalidExponent(q));
    }
    if ring_count < 8 {
        return Err(invalid(format!("{ring_count} rings given, at least 8 needed")));
    }
    if g.grid() != g_n.grid() || g.domain() != g_n.domain() {
        return Err(invalid("fields live on different grids or domains"));
    }
    let grid = g.grid();
    let d = grid.dim();
    let r_max = (0..d).map(|a| grid.half_width(a).powi(2)).sum::<f64>().sqrt();
    let dr = r_max / ring_count as f64;
    let mut value = vec![0.0; ring_count];
    let mut mass = vec![0.0; ring_count];
    let mut cells = vec![0usize; ring_count];
    let vol = match g.domain() {
        Domain::Space => grid.cell_volume(),
        Domain::Frequency => grid.dual_cell_volume(),
    };
    for (i, (a, b)) in g.values().iter().zip(g_n.values()).enumerate() {
        let x = g.node(i);
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let k = ((r / dr) as usize).min(ring_count - 1);
        value[k] += (a - b).norm().powf(q) * vol;
        mass[k] += a.norm().powf(q) * vol;
        cells[k] += 1;
    }
    let floor = (ROUNDING_FLOOR * g.peak()).powf(q) * vol;
    let factor = 2f64.powf(q);
    let rings: Vec<RingDistance> = (0..ring_count)
        .map(|k| RingDistance {
            inner: k as f64 * dr,
            outer: (k + 1) as f64 * dr,
            value: value[k],
            bound: factor * mass[k] + floor * cells[k] as f64,
        })
        .collect();
    let total: f64 = value.iter().sum();
    let dominated = rings.iter().all(|r| r.value <= r.bound);
    Ok(PolarDistance { q, total, norm: total.powf(1.0 / q), rings, dominated })
}
