use fv_core::restriction::restrict_with_limit;
use fv_core::surface::make_circle;
use fv_core::symbol::{
    apply_multiplier, transversal_derivatives, DivisionOptions, ExperimentGrid, NeighborhoodBump,
};
use fv_core::{
    apply_diff_poly, lp_norm, power_space_member, smooth_divide, sobolev_norm, sobolev_ratio_experiment,
    solve_diff_equation, Complex64, DiffPolynomial, Domain, Error, Family, Grid, Polynomial, SampledField,
    SobolevParams, Trend,
};
use std::f64::consts::PI;
use std::sync::Arc;

fn gaussian(grid: &Grid) -> SampledField {
    SampledField::from_fn(grid.clone(), Domain::Space, |x| {
        Complex64::new((-PI * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    })
}

fn circle_symbol() -> DiffPolynomial {
    let c = make_circle(1.0, 256).unwrap();
    DiffPolynomial::helmholtz(2).with_surface(&c).unwrap()
}

fn rel_l2(a: &SampledField, b: &SampledField) -> f64 {
    lp_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}

/// Fourth-order central second difference along `axis` (periodic indices are never reached).
fn fd_second(f: &SampledField, axis: usize) -> Vec<Complex64> {
    let g = f.grid();
    let n = g.n();
    let h = g.spacing(axis);
    let stride = if g.dim() == 2 && axis == 0 { n } else { 1 };
    let v = f.values();
    (0..v.len())
        .map(|i| {
            let j = if stride == 1 { i % n } else { i / n };
            if j < 2 || j + 2 >= n {
                return Complex64::new(0.0, 0.0);
            }
            (-v[i - 2 * stride] + v[i - stride] * 16.0 - v[i] * 30.0 + v[i + stride] * 16.0 - v[i + 2 * stride])
                / (12.0 * h * h)
        })
        .collect()
}

#[test]
fn helmholtz_matches_finite_differences() {
    let grid = Grid::new(2, 4.0, 256).unwrap();
    let g = gaussian(&grid);
    let out = apply_diff_poly(&DiffPolynomial::helmholtz(2), &g).unwrap();
    let (dxx, dyy) = (fd_second(&g, 0), fd_second(&g, 1));
    let fd: Vec<Complex64> = (0..g.values().len())
        .map(|i| -((dxx[i] + dyy[i]) / (4.0 * PI * PI) + g.values()[i]))
        .collect();
    let fd = SampledField::from_values(grid, Domain::Space, fd).unwrap();
    assert!(rel_l2(&out, &fd) <= 1e-4, "{}", rel_l2(&out, &fd));
}

#[test]
fn constant_and_coordinate_symbols() {
    let grid = Grid::new(1, 8.0, 256).unwrap();
    let g = gaussian(&grid);
    let id = apply_diff_poly(&DiffPolynomial::new(Polynomial::constant(1, 1.0)), &g).unwrap();
    assert!(rel_l2(&id, &g) < 1e-13);
    // F⁻¹[ξĝ] = g'/(2πi) with g' = -2πx g
    let out = apply_diff_poly(&DiffPolynomial::new(Polynomial::coordinate(1, 0)), &g).unwrap();
    let exact = SampledField::from_fn(grid, Domain::Space, |x| {
        Complex64::new(0.0, x[0] * (-PI * x[0] * x[0]).exp())
    });
    assert!(rel_l2(&out, &exact) < 1e-10);
}

#[test]
fn multiplier_algebra() {
    let grid = Grid::new(2, 6.0, 128).unwrap();
    let g = gaussian(&grid);
    let a = DiffPolynomial::helmholtz(2);
    let b = DiffPolynomial::new(Polynomial::new(2, [(vec![1, 0], 1.0), (vec![0, 1], -2.0), (vec![0, 0], 0.5)]));
    let ab = DiffPolynomial::new(a.poly().mul(b.poly()));
    let lhs = apply_diff_poly(&a, &apply_diff_poly(&b, &g).unwrap()).unwrap();
    let rhs = apply_diff_poly(&ab, &g).unwrap();
    assert!(rel_l2(&lhs, &rhs) <= 1e-10);
}

#[test]
fn explicit_factor_divisions() {
    let grid1 = Grid::new(1, 8.0, 256).unwrap();
    let s1 = DiffPolynomial::new(Polynomial::coordinate(1, 0)).with_zero_set(vec![vec![0.0]]).unwrap();
    let phi = |x: &[f64]| Complex64::new(x[0] * (-PI * x[0] * x[0]).exp(), 0.0);
    let d = smooth_divide(&phi, &grid1, &s1, DivisionOptions::default()).unwrap();
    for (i, v) in d.quotient.values().iter().enumerate() {
        let x = grid1.freq_coord(0, i);
        assert!((v - (-PI * x * x).exp()).norm() <= 1e-8, "{x}: {v}");
    }
    assert!(d.tube_nodes > 0);

    let grid2 = Grid::new(2, 6.0, 128).unwrap();
    let s2 = circle_symbol();
    let phi = |x: &[f64]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((r2 - 1.0) * (-PI * r2).exp(), 0.0)
    };
    let d = smooth_divide(&phi, &grid2, &s2, DivisionOptions::default()).unwrap();
    let worst = d
        .quotient
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = grid2.point(Domain::Frequency, i);
            (v - (-PI * (x[0] * x[0] + x[1] * x[1])).exp()).norm()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
    assert!(d.residual <= 1e-8);

    let bad = |x: &[f64]| Complex64::new((-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0);
    assert!(matches!(
        smooth_divide(&bad, &grid2, &s2, DivisionOptions::default()),
        Err(Error::TraceNotVanishing { .. })
    ));
}

#[test]
fn helmholtz_round_trip() {
    let grid = Grid::new(2, 6.0, 128).unwrap();
    let g0 = SampledField::from_fn(grid.clone(), Domain::Space, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((-PI * ((x[0] - 0.3).powi(2) + 2.0 * x[1] * x[1])).exp(), 0.2 * x[0] * (-PI * r2).exp())
    });
    let s = circle_symbol();
    let f = apply_diff_poly(&s, &g0).unwrap();
    let sol = solve_diff_equation(&f, &s, NeighborhoodBump::default(), DivisionOptions::default()).unwrap();
    assert!(rel_l2(&sol.g, &g0) <= 1e-6, "{}", rel_l2(&sol.g, &g0));
    assert!(sol.residual <= 1e-6);

    let zero = SampledField::zeros(grid, Domain::Space);
    let sol = solve_diff_equation(&zero, &s, NeighborhoodBump::default(), DivisionOptions::default()).unwrap();
    assert!(sol.g.peak() == 0.0);
}

#[test]
fn antiderivative_in_one_dimension() {
    let grid = Grid::new(1, 8.0, 256).unwrap();
    let s = DiffPolynomial::new(Polynomial::coordinate(1, 0)).with_zero_set(vec![vec![0.0]]).unwrap();
    // (1/2πi) d/dx e^{-πx²} = i x e^{-πx²}
    let f = SampledField::from_fn(grid.clone(), Domain::Space, |x| Complex64::new(0.0, x[0] * (-PI * x[0] * x[0]).exp()));
    let sol = solve_diff_equation(&f, &s, NeighborhoodBump::default(), DivisionOptions::default()).unwrap();
    assert!(rel_l2(&sol.g, &gaussian(&grid)) <= 1e-6);
}

#[test]
fn symbol_powers() {
    let grid = Grid::new(2, 6.0, 128).unwrap();
    let g = gaussian(&grid);
    let s = circle_symbol();
    let one = power_space_member(&s, 1, &g).unwrap();
    assert!(rel_l2(&one, &apply_diff_poly(&s, &g).unwrap()) < 1e-15);
    let two = power_space_member(&s, 2, &g).unwrap();
    let twice = apply_multiplier(&apply_diff_poly(&s, &g).unwrap(), |x| Complex64::new(s.eval(x), 0.0)).unwrap();
    assert!(rel_l2(&two, &twice) <= 1e-10);
    assert!(power_space_member(&s, 0, &g).is_err());

    let exact = |x: &[f64]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::new((r2 - 1.0).powi(2) * (-PI * r2).exp(), 0.0)
    };
    let peak = fv_core::fourier_transform(&two).unwrap().peak();
    let spectrum_of = |x: &[f64]| fv_core::restriction::transform_at(&two, x);
    let d = transversal_derivatives(&spectrum_of, &s, 2, 1e-2).unwrap();
    assert!(d[0] <= 1e-6 * peak && d[1] <= 1e-6 * peak, "{d:?} peak {peak}");
    let d2 = transversal_derivatives(&exact, &s, 3, 1e-2).unwrap();
    assert!(d2[2] > 1e-3, "second derivative should not vanish: {d2:?}");
}

#[test]
fn easy_inclusion_traces_vanish() {
    let grid = Grid::new(2, 6.0, 128).unwrap();
    let s = circle_symbol();
    let f = apply_diff_poly(&s, &gaussian(&grid)).unwrap();
    let c = Arc::new(make_circle(1.0, 128).unwrap());
    let tr = restrict_with_limit(&f, &c, 1e-8).unwrap();
    assert!(tr.max_abs() <= 1e-8);
}

#[test]
fn sobolev_norm_examples() {
    let grid = Grid::new(2, 6.0, 128).unwrap();
    let g = gaussian(&grid);
    for q in [1.5, 2.0, 4.0] {
        let a = sobolev_norm(&g, 0.0, 0.0, q).unwrap();
        let b = lp_norm(&g, q).unwrap();
        assert!((a - b).abs() <= 1e-13 * b);
    }
    // ‖ξ₁²ĝ‖₂² = ∫ξ⁴e^{-2πξ²}dξ · ∫e^{-2πη²}dη with a = 2π
    let a = 2.0 * PI;
    let exact = (0.75 * PI.sqrt() * a.powf(-2.5) * (PI / a).sqrt()).sqrt();
    let v = sobolev_norm(&g, 2.0, 0.0, 2.0).unwrap();
    assert!((v - exact).abs() <= 1e-6 * exact, "{v} vs {exact}");

    // f(λx) on the grid scaled by 1/λ: norm scales by λ^{α+β-2/q}
    let (alpha, beta, q, lam) = (0.7, 0.4, 3.0, 2.0);
    let scaled_grid = Grid::new(2, 6.0 / lam, 128).unwrap();
    let f = SampledField::from_fn(grid.clone(), Domain::Space, |x| {
        Complex64::new((-PI * (x[0] * x[0] + 0.5 * x[1] * x[1])).exp() * (1.0 + x[0]), 0.0)
    });
    let f_lam = SampledField::from_values(scaled_grid, Domain::Space, f.values().to_vec()).unwrap();
    let base = sobolev_norm(&f, alpha, beta, q).unwrap();
    let scaled = sobolev_norm(&f_lam, alpha, beta, q).unwrap();
    let expected = lam.powf(alpha + beta - 2.0 / q);
    assert!((scaled / base - expected).abs() <= 1e-8 * expected);
    assert!(sobolev_norm(&g, 1.0, 0.0, 1.0).is_err());
}

#[test]
fn sobolev_experiment_refuses_inhomogeneous_params() {
    let mut p = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 1.3, SobolevParams::q_for_gap(1.3, 0.6).unwrap()).unwrap();
    p.alpha += 0.05;
    let fam = Family::KnappCap { deltas: vec![0.125, 0.0625] };
    assert!(matches!(
        sobolev_ratio_experiment(&p, &fam, ExperimentGrid::default()),
        Err(Error::HomogeneityViolated { .. })
    ));
}

#[test]
fn knapp_family_trends() {
    let deltas = vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
    let fam = Family::KnappCap { deltas };
    let below = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 1.3, SobolevParams::q_for_gap(1.3, 0.6).unwrap()).unwrap();
    let r = sobolev_ratio_experiment(&below, &fam, ExperimentGrid::default()).unwrap();
    assert_eq!(r.trend, Trend::Unbounded);
    let above = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 1.3, SobolevParams::q_for_gap(1.3, 0.7).unwrap()).unwrap();
    let r = sobolev_ratio_experiment(&above, &fam, ExperimentGrid::default()).unwrap();
    assert!(r.fitted_exponent > 0.0);
}

#[test]
fn surface_family_at_four_thirds() {
    let fam = Family::SurfaceMeasureMollified { widths: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] };
    let p = SobolevParams::solve_alpha(1, 2, 1.0, 0.0, 4.0 / 3.0, 12.0).unwrap();
    let r = sobolev_ratio_experiment(&p, &fam, ExperimentGrid::default()).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert_eq!(r.trend, Trend::Unbounded, "{}", r.fitted_exponent);
}
