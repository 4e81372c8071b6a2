//! The acceptance suite: eleven criteria with pinned configurations.

use crate::experiments::{random_bumps, rel_l2};
use crate::report::Check;
use anyhow::{bail, Result};
use fv_core::autoconv::{blowup_test_fn, ConvolutionOracle};
use fv_core::frostman::{kernel_integral, DiscreteMeasure};
use fv_core::restriction::{geometric_radii, restrict_with_limit, transform_at};
use fv_core::surface::{make_graph_curve, make_sphere, trig_coefficients, SphereResolution};
use fv_core::symbol::{transversal_derivatives, DivisionOptions, ExperimentGrid, NeighborhoodBump};
use fv_core::{
    adjoint_check, apply_diff_poly, average_density, average_field, change_of_variables_check,
    decay_exponent, dimension_lower_bound, ext_operator, extend, fourier_transform, frostman_from_potential_check,
    inverse_fourier_transform, lp_norm, lq_tail_profile, make_circle, make_rotation_weight, polar_lq_distance,
    power_space_member, schwartz_generator, smooth_divide, sobolev_ratio_experiment, solve_diff_equation,
    BumpProfile, Complex64, CurveChart, DiffPolynomial, Domain, Family, Grid, GraphFunction, HatFunction,
    Polynomial, SampledField, SobolevParams, SurfaceDensity, TailClass, TestFunction,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

pub type Transform = dyn Fn(&SampledField) -> fv_core::Result<SampledField>;

pub struct Criterion {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
    pub budget_seconds: f64,
    run: fn() -> Result<Vec<Check>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub key: String,
    pub title: String,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub pass: bool,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {:>2} {:<14} {:>8.2}s / {:>4}s  {}",
            self.id, self.key, self.seconds, self.budget_seconds, self.title
        );
        if let Some(e) = &self.error {
            s.push_str(&format!("  error: {e}"));
        }
        for c in self.checks.iter().filter(|c| !c.pass) {
            s.push_str(&format!("  [{} = {:.6e} not in {:?}..{:?}]", c.name, c.value, c.lower, c.upper));
        }
        s
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, key: "transform", title: "fixed point, Plancherel, round trip", budget_seconds: 2.0, run: transform },
        Criterion { id: 2, key: "extension", title: "extension closed forms", budget_seconds: 5.0, run: extension_closed_forms },
        Criterion { id: 3, key: "decay", title: "envelope decay exponents", budget_seconds: 30.0, run: decay },
        Criterion { id: 4, key: "tails", title: "L_q tail classification", budget_seconds: 60.0, run: tails },
        Criterion { id: 5, key: "right_inverse", title: "trace of extension is identity", budget_seconds: 5.0, run: right_inverse },
        Criterion { id: 6, key: "adjoint", title: "adjoint pairings", budget_seconds: 10.0, run: adjointness },
        Criterion { id: 7, key: "smoothing", title: "rotation smoothing", budget_seconds: 30.0, run: smoothing },
        Criterion { id: 8, key: "frostman", title: "Frostman certificates", budget_seconds: 60.0, run: frostman },
        Criterion { id: 9, key: "autoconv", title: "curve auto-convolution", budget_seconds: 120.0, run: autoconv },
        Criterion { id: 10, key: "division", title: "division solver", budget_seconds: 30.0, run: division },
        Criterion { id: 11, key: "sobolev", title: "Sobolev ratio trends", budget_seconds: 300.0, run: sobolev },
    ]
}

fn select(only: Option<&str>) -> Result<Vec<Criterion>> {
    let all = criteria();
    let Some(sel) = only else { return Ok(all) };
    let picked: Vec<Criterion> = all.into_iter().filter(|c| c.key == sel || c.id.to_string() == sel).collect();
    if picked.is_empty() {
        let keys: Vec<&str> = criteria().iter().map(|c| c.key).collect();
        bail!("unknown criterion '{sel}'; expected an id 1-11 or one of {}", keys.join(", "));
    }
    Ok(picked)
}

pub fn evaluate(id: u8, key: &str, title: &str, budget: f64, run: impl FnOnce() -> Result<Vec<Check>>) -> CriterionResult {
    let start = Instant::now();
    let outcome = run();
    let seconds = start.elapsed().as_secs_f64();
    let (mut checks, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(format!("{e:#}"))),
    };
    checks.push(Check::at_most("runtime_seconds", seconds, budget));
    let pass = error.is_none() && checks.iter().all(|c| c.pass);
    CriterionResult {
        id,
        key: key.into(),
        title: title.into(),
        checks,
        error,
        seconds,
        budget_seconds: budget,
        pass,
    }
}

/// Runs the selected criteria in order, one at a time.
pub fn run(only: Option<&str>) -> Result<Vec<CriterionResult>> {
    Ok(select(only)?.into_iter().map(|c| evaluate(c.id, c.key, c.title, c.budget_seconds, c.run)).collect())
}

pub fn summary_csv(results: &[CriterionResult]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "key", "check", "value", "lower", "upper", "pass"])?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for r in results {
        for c in r.checks.iter().filter(|c| c.name != "runtime_seconds") {
            w.write_record([
                r.id.to_string(),
                r.key.clone(),
                c.name.clone(),
                format!("{:.12e}", c.value),
                opt(c.lower),
                opt(c.upper),
                c.pass.to_string(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn one(s: fv_core::Surface) -> SurfaceDensity {
    SurfaceDensity::constant(Arc::new(s), Complex64::new(1.0, 0.0))
}

fn transform() -> Result<Vec<Check>> {
    transform_checks(&fourier_transform)
}

/// Criterion 1 with the forward transform supplied by the caller.
pub fn transform_checks(forward: &Transform) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (dim, half_width, n) in [(1usize, 16.0, 1024usize), (2, 8.0, 256)] {
        let grid = Grid::new(dim, half_width, n)?;
        let g = schwartz_generator(&grid, &TestFunction::gaussian(dim))?;
        let big_g = forward(&g)?;
        let exact_g: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let xi = big_g.grid().point(Domain::Frequency, i);
                Complex64::new((-PI * xi.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
            })
            .collect();
        checks.push(Check::at_most(format!("d{dim}_gaussian_fixed_point"), max_abs_diff(big_g.values(), &exact_g), 1e-8));

        let center: Vec<f64> = [0.5, -0.3][..dim].to_vec();
        let frequency: Vec<f64> = [1.5, -0.75][..dim].to_vec();
        let width = 0.8;
        let kind = TestFunction::ModulatedGaussian { center: center.clone(), width, frequency: frequency.clone() };
        let f = schwartz_generator(&grid, &kind)?;
        let big_f = forward(&f)?;
        let (a, b) = (lp_norm(&f, 2.0)?, lp_norm(&big_f, 2.0)?);
        checks.push(Check::at_most(format!("d{dim}_plancherel_relative"), (a - b).abs() / a, 1e-8));
        // e^{-2πi⟨c, ξ-k⟩} w^d e^{-πw²|ξ-k|²}
        let exact_f: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let xi = big_f.grid().point(Domain::Frequency, i);
                let (mut r2, mut phase) = (0.0, 0.0);
                for ax in 0..dim {
                    let s = xi[ax] - frequency[ax];
                    r2 += s * s;
                    phase -= 2.0 * PI * center[ax] * s;
                }
                Complex64::from_polar(width.powi(dim as i32) * (-PI * width * width * r2).exp(), phase)
            })
            .collect();
        let peak = width.powi(dim as i32);
        checks.push(Check::at_most(
            format!("d{dim}_modulated_closed_form"),
            max_abs_diff(big_f.values(), &exact_f) / peak,
            1e-8,
        ));
        let back = inverse_fourier_transform(&big_f)?;
        checks.push(Check::at_most(format!("d{dim}_round_trip_relative_l2"), rel_l2(&back, &f)?, 1e-10));
    }
    Ok(checks)
}

/// `J₀` by Miller's backward recurrence, normalized with `J₀ + 2ΣJ_{2k} = 1`.
pub fn bessel_j0(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let start = 2 * ((x.abs() as usize + 40) / 2 + 20);
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let (mut norm, mut j0) = (0.0, 0.0);
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k > 1 && (k - 1) % 2 == 0 {
            norm += 2.0 * cur;
        }
        if k == 1 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 / (norm + j0)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn extension_closed_forms() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let circle = one(make_circle(1.0, 512)?);
    for r in [1.0, 5.0, 20.0] {
        let v = extend(&circle, &[vec![0.6 * r, 0.8 * r]]).values[0];
        let exact = 2.0 * PI * bessel_j0(2.0 * PI * r);
        checks.push(Check::at_most(format!("circle_R{r}_relative"), (v - exact).norm() / exact.abs(), 1e-6));
    }
    let sphere = one(make_sphere(1.0, SphereResolution { n_theta: 64, n_phi: 128 })?);
    for r in [1.0, 5.0, 1.25, 5.25] {
        let v = extend(&sphere, &[vec![0.48 * r, 0.6 * r, 0.64 * r]]).values[0];
        let radial = 2.0 * PI * simpson(|z| (2.0 * PI * r * z).cos(), -1.0, 1.0, 4000);
        // the closed form vanishes at integer R; measure against |S²| there
        let scale = if r.fract() == 0.0 { 4.0 * PI } else { radial.abs() };
        checks.push(Check::at_most(format!("sphere_R{r}_relative"), (v - radial).norm() / scale, 1e-6));
    }
    Ok(checks)
}

fn decay() -> Result<Vec<Check>> {
    let radii = geometric_radii(10.0, 200.0, 12);
    let circle = decay_exponent(&one(make_circle(1.0, 4096)?), &[0.6, 0.8], &radii)?;
    let sphere = one(make_sphere(1.0, SphereResolution { n_theta: 1024, n_phi: 32 })?);
    let sphere = decay_exponent(&sphere, &[0.0, 0.0, 1.0], &radii)?;
    Ok(vec![
        Check::near("circle_exponent", circle.exponent, -0.5, 0.05),
        Check::near("sphere_exponent", sphere.exponent, -1.0, 0.05),
    ])
}

fn tails() -> Result<Vec<Check>> {
    let zeta = one(make_circle(1.0, 256)?);
    let mut checks = Vec::new();
    for (q, class) in [(3.0, TailClass::Divergent), (4.0, TailClass::Marginal), (6.0, TailClass::Convergent)] {
        let t = lq_tail_profile(&zeta, q, 100.0, 12)?;
        checks.push(Check::near(format!("q{q}_exponent"), t.exponent, 1.0 - q / 2.0, 0.1));
        checks.push(Check::holds(format!("q{q}_is_{class}"), t.classification == class));
    }
    Ok(checks)
}

fn right_inverse() -> Result<Vec<Check>> {
    let parabola = Arc::new(make_graph_curve(GraphFunction::parabola(0.5), 1.0, 64)?);
    let chart: [fn(f64) -> Complex64; 5] = [
        |_| Complex64::new(1.0, 0.0),
        |t| Complex64::new(t.cos(), 0.0),
        |t| Complex64::new(t * t, -t),
        |t| Complex64::from_polar(1.0, 3.0 * t),
        |t| Complex64::new(1.0 / (2.0 + t), 0.0),
    ];
    let circle = Arc::new(make_circle(1.0, 128)?);
    let atlas: [fn(f64) -> Complex64; 5] = [
        |_| Complex64::new(1.0, 0.0),
        |t| Complex64::new(t.cos(), 0.0),
        |t| Complex64::from_polar(1.0, 3.0 * t),
        |t| Complex64::new((2.0 * t).sin() + 0.5, 0.0),
        |t| Complex64::new(t.cos().exp(), (5.0 * t).cos()),
    ];
    let mut checks = Vec::new();
    for (name, surface, densities) in [("parabola", parabola, chart), ("circle", circle, atlas)] {
        for (i, f) in densities.iter().enumerate() {
            let phi = SurfaceDensity::from_fn(surface.clone(), |_, q| f(q[0]));
            let ext = ext_operator(&phi, BumpProfile::default_for(&surface))?;
            let worst = surface.points().iter().zip(phi.values()).map(|(p, v)| (ext.eval(p) - v).norm()).fold(0.0, f64::max);
            checks.push(Check::at_most(format!("{name}_density{i}_max_error"), worst, 1e-8));
        }
    }
    Ok(checks)
}

fn adjointness() -> Result<Vec<Check>> {
    let grid = Grid::new(2, 6.0, 64)?;
    let circle = Arc::new(make_circle(1.0, 128)?);
    let mut checks = Vec::new();
    for i in 0..10 {
        let t = i as f64;
        let kind = TestFunction::ModulatedGaussian {
            center: vec![0.3 * (t * 0.7).cos(), -0.2 * (t * 1.3).sin()],
            width: 0.7 + 0.05 * t,
            frequency: vec![0.5 * (t * 0.9).sin(), 0.4 * (t * 0.4).cos()],
        };
        let f = schwartz_generator(&grid, &kind)?;
        let zeta = SurfaceDensity::from_fn(circle.clone(), move |_, q| {
            Complex64::new(1.0 + 0.5 * (i as f64 * q[0]).cos(), 0.3 * ((i + 1) as f64 * q[0]).sin())
        });
        let (a, b) = adjoint_check(&f, &zeta)?;
        let scale = a.norm().max(b.norm());
        checks.push(Check::at_most(format!("pair{i}_relative"), (a - b).norm() / scale, 1e-6));
    }
    Ok(checks)
}

fn smoothing() -> Result<Vec<Check>> {
    let grid = Grid::new(2, 8.0, 128)?;
    let fields = [
        TestFunction::Gaussian { center: vec![1.0, -0.5], width: 1.0 },
        TestFunction::ModulatedGaussian { center: vec![0.0, 0.5], width: 1.2, frequency: vec![0.6, 0.3] },
    ];
    let weights = [2, 4, 8, 16, 32]
        .iter()
        .map(|n| make_rotation_weight(2, *n, 64))
        .collect::<fv_core::Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for (fi, kind) in fields.iter().enumerate() {
        let g = schwartz_generator(&grid, kind)?;
        let smoothed = weights.iter().map(|w| average_field(&g, w)).collect::<fv_core::Result<Vec<_>>>()?;
        for q in [4.0 / 3.0, 2.0, 4.0] {
            let norm = lp_norm(&g, q)?;
            let mut d = Vec::new();
            for gn in &smoothed {
                d.push(polar_lq_distance(&g, gn, q, 16)?.norm);
            }
            let rise = d.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::at_most(format!("field{fi}_q{q:.3}_largest_increase"), rise, 1e-9));
            checks.push(Check::at_most(format!("field{fi}_q{q:.3}_final_relative"), d[4] / norm, 1e-3));
        }
    }
    let s = Arc::new(make_circle(1.0, 128)?);
    let zeta = SurfaceDensity::from_fn(s, |_, q| {
        Complex64::new((3.0 * q[0]).cos() + 0.2 * (7.0 * q[0]).sin(), (q[0] + 0.4).cos().exp())
    });
    let w = make_rotation_weight(2, 8, 64)?;
    let (c0, c1) = (trig_coefficients(zeta.values()), trig_coefficients(average_density(&zeta, &w)?.values()));
    let worst = (0..128usize)
        .map(|idx| {
            let k = if idx < 64 { idx as i64 } else { idx as i64 - 128 };
            (c1[idx] - c0[idx] * w.circle_multiplier(k)).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("circle_multiplier_law", worst, 1e-8));
    Ok(checks)
}

fn frostman() -> Result<Vec<Check>> {
    let phi = HatFunction::standard(2);
    let alphas: Vec<f64> = (0..=50).map(|i| i as f64 * 0.05).collect();
    let dyadic = |from: i32, to: i32| -> Vec<f64> { (from..=to).map(|k| 2f64.powi(-k)).collect() };
    let arclength = |n: usize| -> Result<DiscreteMeasure> {
        Ok(DiscreteMeasure::from_density(&one(make_circle(1.0, n)?)))
    };
    let dirac_r: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
    let dirac = dimension_lower_bound(&DiscreteMeasure::dirac(&[0.0, 0.0]), &phi, &alphas, &dirac_r)?;
    let circle = dimension_lower_bound(&arclength(16384)?, &phi, &alphas, &dyadic(1, 9))?;
    let square = dimension_lower_bound(&DiscreteMeasure::unit_square(512), &phi, &alphas, &dyadic(1, 5))?;
    let mut checks = vec![
        Check::at_most("dirac_bound", dirac.bound.unwrap_or(0.0), 0.1),
        Check::at_least("circle_bound", circle.bound.unwrap_or(0.0), 0.9),
        Check::at_least("square_bound", square.bound.unwrap_or(0.0), 1.9),
    ];
    let mu = arclength(1024)?;
    let pot_grid = Grid::new(2, 32.0, 128)?;
    let ker_grid = Grid::new(2, 16.0, 128)?;
    let etas: Vec<Vec<f64>> = (0..8)
        .map(|k| {
            let t = k as f64 * PI / 4.0;
            vec![-2.0 * t.cos(), -2.0 * t.sin()]
        })
        .chain(std::iter::once(vec![0.0, 0.0]))
        .collect();
    let chain = frostman_from_potential_check(&mu, &phi, 0.5, &[0.5, 0.25, 0.125], &etas, &pot_grid, &ker_grid)?;
    checks.push(Check::at_least("chain_worst_slack", chain.worst_slack, 0.0));
    let mut scaling = chain.scaling_residual;
    for r in [0.5, 0.25, 0.125] {
        let j = kernel_integral(&phi, 0.5, r, &ker_grid)?;
        scaling = scaling.max((j.value - j.substituted).abs() / j.value);
    }
    checks.push(Check::at_most("scaling_identity_relative", scaling, 1e-8));
    checks.push(Check::holds("scaling_bound_r_alpha", chain.scaling_bound_holds));
    Ok(checks)
}

fn autoconv() -> Result<Vec<Check>> {
    let chart = CurveChart::parabola(1.0)?;
    let mut worst = 0.0f64;
    for bump in random_bumps(1.0, 20, 7) {
        let (l, r) = change_of_variables_check(|a, b| bump.eval(a, b), bump.support(), &chart, 1024)?;
        worst = worst.max((l - r).abs() / r.abs());
    }
    let unit = |_: f64| Complex64::new(1.0, 0.0);
    let rows = ConvolutionOracle::default().compare(
        &unit,
        &CurveChart::parabola(0.5)?,
        &[[0.0, 0.09], [0.2, 0.1], [-0.1, 0.12]],
    )?;
    let oracle = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    let report = blowup_test_fn(&unit, &chart, [-0.5, 0.5], &[8, 16, 32, 64])?;
    let min_mass = report.rows.iter().map(|r| r.l2_mass).fold(f64::INFINITY, f64::min);
    let growth = report.cumulative.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::at_most("change_of_variables_relative", worst, 1e-6),
        Check::at_most("fft_oracle_relative", oracle, 0.03),
        Check::at_least("min_l2_mass", min_mass, f64::MIN_POSITIVE),
        Check::at_most("mass_max_over_min", report.mass_spread(), 4.0),
        Check::at_least("min_cumulative_step", growth, f64::MIN_POSITIVE),
    ])
}

fn division() -> Result<Vec<Check>> {
    let circle = Arc::new(make_circle(1.0, 256)?);
    let s = DiffPolynomial::helmholtz(2).with_surface(&circle)?;
    let grid = Grid::new(2, 6.0, 128)?;
    let g0 = SampledField::from_fn(grid.clone(), Domain::Space, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((-PI * ((x[0] - 0.3).powi(2) + 2.0 * x[1] * x[1])).exp(), 0.2 * x[0] * (-PI * r2).exp())
    });
    let f = apply_diff_poly(&s, &g0)?;
    let sol = solve_diff_equation(&f, &s, NeighborhoodBump::default(), DivisionOptions::default())?;
    let mut checks = vec![Check::at_most("helmholtz_round_trip_relative_l2", rel_l2(&sol.g, &g0)?, 1e-6)];

    let grid1 = Grid::new(1, 8.0, 256)?;
    let linear = DiffPolynomial::new(Polynomial::coordinate(1, 0)).with_zero_set(vec![vec![0.0]])?;
    let phi1 = |x: &[f64]| Complex64::new(x[0] * (-PI * x[0] * x[0]).exp(), 0.0);
    let d1 = smooth_divide(&phi1, &grid1, &linear, DivisionOptions::default())?;
    let e1 = d1
        .quotient
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (v - (-PI * grid1.freq_coord(0, i).powi(2)).exp()).norm())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("divide_by_xi_max_error", e1, 1e-8));
    let phi2 = |x: &[f64]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((r2 - 1.0) * (-PI * r2).exp(), 0.0)
    };
    let d2 = smooth_divide(&phi2, &grid, &s, DivisionOptions::default())?;
    let e2 = d2
        .quotient
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = grid.point(Domain::Frequency, i);
            (v - (-PI * (x[0] * x[0] + x[1] * x[1])).exp()).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("divide_by_circle_symbol_max_error", e2, 1e-8));

    let gauss = SampledField::from_fn(grid, Domain::Space, |x| Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
    let two = power_space_member(&s, 2, &gauss)?;
    let peak = fourier_transform(&two)?.peak();
    let spectrum = |x: &[f64]| transform_at(&two, x);
    let d = transversal_derivatives(&spectrum, &s, 2, 1e-2)?;
    checks.push(Check::at_most("order0_trace_relative", d[0] / peak, 1e-6));
    checks.push(Check::at_most("order1_trace_relative", d[1] / peak, 1e-6));
    let trace = restrict_with_limit(&two, &circle, 1e-8)?;
    checks.push(Check::at_most("restricted_trace", trace.max_abs(), 1e-8));
    Ok(checks)
}

fn sobolev() -> Result<Vec<Check>> {
    let knapp = Family::KnappCap { deltas: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] };
    let surface = Family::SurfaceMeasureMollified { widths: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] };
    let band = fv_core::symbol::TREND_BAND;
    let below = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 1.3, SobolevParams::q_for_gap(1.3, 0.6)?)?;
    let above = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 1.3, SobolevParams::q_for_gap(1.3, 0.7)?)?;
    let endpoint = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 4.0 / 3.0, 12.0)?;
    let grids = ExperimentGrid::default();
    let r1 = sobolev_ratio_experiment(&below, &knapp, grids)?;
    let r2 = sobolev_ratio_experiment(&above, &knapp, grids)?;
    let r3 = sobolev_ratio_experiment(&endpoint, &surface, grids)?;
    Ok(vec![
        Check::at_most("knapp_gap0.6_exponent", r1.fitted_exponent, -band),
        Check::at_least("knapp_gap0.7_exponent", r2.fitted_exponent, band),
        Check::at_most("surface_p4/3_exponent", r3.fitted_exponent, -band),
    ])
}
