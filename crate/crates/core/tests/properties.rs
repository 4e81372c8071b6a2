use fv_core::restriction::{restrict_with_limit, transform_at};
use fv_core::surface::make_circle_with_phase;
use fv_core::{
    adjoint_check, apply_diff_poly, average_density, extend, fourier_transform, inverse_fourier_transform,
    lp_norm, make_circle, make_rotation_weight, restrict, schwartz_generator, solve_sumset, sobolev_norm,
    Complex64, CurveChart, DiffPolynomial, Grid, Polynomial, SampledField, SobolevParams, SurfaceDensity,
    TestFunction,
};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn rel_l2(a: &SampledField, b: &SampledField) -> f64 {
    lp_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}

fn modulated(center: Vec<f64>, width: f64, frequency: Vec<f64>) -> TestFunction {
    TestFunction::ModulatedGaussian { center, width, frequency }
}

fn point2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2)
}

fn trig_density(surface: Arc<fv_core::Surface>, c: [f64; 3]) -> SurfaceDensity {
    SurfaceDensity::from_fn(surface, |p, _| {
        let th = p[1].atan2(p[0]);
        Complex64::new(c[0] + c[1] * th.cos(), c[2] * (2.0 * th).sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plancherel_and_round_trip_1d(c in -2.0..2.0f64, w in 0.6..1.5f64, k in -3.0..3.0f64) {
        let grid = Grid::new(1, 10.0, 1024).unwrap();
        let f = schwartz_generator(&grid, &modulated(vec![c], w, vec![k])).unwrap();
        let big_f = fourier_transform(&f).unwrap();
        let (a, b) = (lp_norm(&f, 2.0).unwrap(), lp_norm(&big_f, 2.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a);
        let back = inverse_fourier_transform(&big_f).unwrap();
        prop_assert!(rel_l2(&back, &f) <= 1e-10);
    }

    #[test]
    fn plancherel_and_round_trip_2d(c in point2(), w in 0.6..1.2f64, k in point2()) {
        let grid = Grid::new(2, 6.0, 128).unwrap();
        let f = schwartz_generator(&grid, &modulated(c, w, k)).unwrap();
        let big_f = fourier_transform(&f).unwrap();
        let (a, b) = (lp_norm(&f, 2.0).unwrap(), lp_norm(&big_f, 2.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a);
        let back = inverse_fourier_transform(&big_f).unwrap();
        prop_assert!(rel_l2(&back, &f) <= 1e-10);
    }

    #[test]
    fn lp_norm_is_homogeneous(re in -5.0..5.0f64, im in -5.0..5.0f64, p in 1.0..8.0f64) {
        let grid = Grid::new(2, 6.0, 64).unwrap();
        let f = schwartz_generator(&grid, &TestFunction::gaussian(2)).unwrap();
        let c = Complex64::new(re, im);
        let lhs = lp_norm(&f.scale(c), p).unwrap();
        let rhs = c.norm() * lp_norm(&f, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
    }

    #[test]
    fn restrict_and_extend_are_linear(c in point2(), k in point2(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let grid = Grid::new(2, 6.0, 64).unwrap();
        let f = schwartz_generator(&grid, &modulated(c, 0.8, k)).unwrap();
        let g = schwartz_generator(&grid, &TestFunction::gaussian(2)).unwrap();
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(0.0, b));
        let s = Arc::new(make_circle(1.0, 64).unwrap());
        let combo = f.scale(ca).add(&g.scale(cb)).unwrap();
        let lhs = restrict(&combo, &s).unwrap();
        let (rf, rg) = (restrict(&f, &s).unwrap(), restrict(&g, &s).unwrap());
        let scale = rf.max_abs() + rg.max_abs();
        for ((l, x), y) in lhs.values().iter().zip(rf.values()).zip(rg.values()) {
            prop_assert!((l - (ca * x + cb * y)).norm() <= 1e-12 * scale.max(1.0));
        }
        let pts = vec![vec![0.3, -1.1], vec![2.0, 0.5]];
        let e = extend(&rf.scale(ca).add(&rg.scale(cb)).unwrap(), &pts).values;
        let (ef, eg) = (extend(&rf, &pts).values, extend(&rg, &pts).values);
        for i in 0..pts.len() {
            prop_assert!((e[i] - (ca * ef[i] + cb * eg[i])).norm() <= 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn restriction_commutes_with_rotation(c in point2(), k in point2(), m in 1usize..64) {
        let nodes = 64;
        let th = 2.0 * PI * m as f64 / nodes as f64;
        let rot = |v: &[f64]| vec![th.cos() * v[0] - th.sin() * v[1], th.sin() * v[0] + th.cos() * v[1]];
        let grid = Grid::new(2, 6.0, 128).unwrap();
        let f = schwartz_generator(&grid, &modulated(c.clone(), 0.8, k.clone())).unwrap();
        let f_rot = schwartz_generator(&grid, &modulated(rot(&c), 0.8, rot(&k))).unwrap();
        let s = Arc::new(make_circle(1.0, nodes).unwrap());
        let (r, r_rot) = (restrict(&f, &s).unwrap(), restrict(&f_rot, &s).unwrap());
        for j in 0..nodes {
            let shifted = r.values()[(j + nodes - m) % nodes];
            prop_assert!((r_rot.values()[j] - shifted).norm() <= 1e-8 * r.max_abs().max(1e-3));
        }
    }

    #[test]
    fn adjoint_pairings_agree(c in point2(), k in point2(), coef in prop::array::uniform3(-1.0..1.0f64)) {
        let grid = Grid::new(2, 6.0, 64).unwrap();
        let f = schwartz_generator(&grid, &modulated(c, 0.9, k)).unwrap();
        let zeta = trig_density(Arc::new(make_circle(1.0, 128).unwrap()), [1.0 + coef[0].abs(), coef[1], coef[2]]);
        let (a, b) = adjoint_check(&f, &zeta).unwrap();
        prop_assert!((a - b).norm() <= 1e-6 * a.norm().max(b.norm()).max(1e-6));
    }

    #[test]
    fn averaging_preserves_constants(n in 1usize..64, re in -3.0..3.0f64) {
        let weight = make_rotation_weight(2, n, 64).unwrap();
        prop_assert!((weight.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        let s = Arc::new(make_circle(1.0, 64).unwrap());
        let c = Complex64::new(re, 1.0);
        let avg = average_density(&SurfaceDensity::constant(s, c), &weight).unwrap();
        for v in avg.values() {
            prop_assert!((v - c).norm() <= 1e-13 * c.norm());
        }
    }

    #[test]
    fn circle_integrals_ignore_node_phase(phase in 0.0..(2.0 * PI), a in -1.0..1.0f64) {
        let base = Arc::new(make_circle(1.5, 96).unwrap());
        let turned = Arc::new(make_circle_with_phase(1.5, 96, phase).unwrap());
        let radial = |s: Arc<fv_core::Surface>| SurfaceDensity::from_fn(s, |p, _| {
            Complex64::new(a + (p[0] * p[0] + p[1] * p[1]).sqrt(), 0.0)
        });
        let (i0, i1) = (radial(base).integral(), radial(turned).integral());
        prop_assert!((i0 - i1).norm() <= 1e-13 * i0.norm().max(1.0));
    }

    #[test]
    fn circle_quadrature_is_stable_under_refinement(coef in prop::array::uniform3(-1.0..1.0f64)) {
        let coarse = trig_density(Arc::new(make_circle(1.0, 64).unwrap()), coef);
        let fine = trig_density(Arc::new(make_circle(1.0, 128).unwrap()), coef);
        let bound = 1e-8 * fine.max_abs() * 2.0 * PI;
        prop_assert!((coarse.integral() - fine.integral()).norm() <= bound.max(1e-15));
    }

    #[test]
    fn sumset_solve_inverts_sum_map(eps in 0.3..1.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        prop_assume!((a - b).abs() > 1e-2);
        let chart = CurveChart::parabola(eps).unwrap();
        let (s, t) = (a * 0.95 * eps, b * 0.95 * eps);
        let [xi, eta] = chart.sum_map(s, t);
        let p = solve_sumset(&chart, xi, eta).unwrap();
        let [r1, r2] = p.residuals(&chart);
        prop_assert!(r1 <= 1e-10 && r2 <= 1e-10);
        prop_assert!(p.s < p.t);
        prop_assert!((chart.dh(p.t) - chart.dh(p.s) - (p.t - p.s)).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn solved_alpha_has_zero_residual(
        k in 1u32..4, l in 1u32..4, beta in 0.0..2.0f64, p in 1.05..3.0f64, q in 1.05..20.0f64,
    ) {
        let params = SobolevParams::solve_alpha(k, l, 1.0, beta, p, q).unwrap();
        prop_assert_eq!(params.homogeneity_residual(), 0.0);
        prop_assert!(params.is_consistent());
    }

    #[test]
    fn multiplier_algebra(coef in prop::collection::vec(-1.0..1.0f64, 6)) {
        let grid = Grid::new(2, 6.0, 64).unwrap();
        let g = schwartz_generator(&grid, &TestFunction::gaussian(2)).unwrap();
        let a = Polynomial::new(2, [(vec![1, 0], coef[0]), (vec![0, 2], coef[1]), (vec![0, 0], coef[2])]);
        let b = Polynomial::new(2, [(vec![0, 1], coef[3]), (vec![1, 1], coef[4]), (vec![0, 0], coef[5])]);
        let (da, db) = (DiffPolynomial::new(a.clone()), DiffPolynomial::new(b.clone()));
        let lhs = apply_diff_poly(&da, &apply_diff_poly(&db, &g).unwrap()).unwrap();
        let rhs = apply_diff_poly(&DiffPolynomial::new(a.mul(&b)), &g).unwrap();
        let scale = lp_norm(&rhs, 2.0).unwrap();
        prop_assume!(scale > 1e-6);
        prop_assert!(lp_norm(&lhs.sub(&rhs).unwrap(), 2.0).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn plain_sobolev_norm_is_lp_norm(c in point2(), k in point2(), q in 1.1..6.0f64) {
        let grid = Grid::new(2, 6.0, 64).unwrap();
        let f = schwartz_generator(&grid, &modulated(c, 0.9, k)).unwrap();
        let (a, b) = (sobolev_norm(&f, 0.0, 0.0, q).unwrap(), lp_norm(&f, q).unwrap());
        prop_assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn easy_inclusion(c in point2()) {
        let grid = Grid::new(2, 6.0, 128).unwrap();
        let g = schwartz_generator(&grid, &TestFunction::Gaussian { center: c, width: 1.0 }).unwrap();
        let s = Arc::new(make_circle(1.0, 128).unwrap());
        let symbol = DiffPolynomial::helmholtz(2).with_surface(&s).unwrap();
        let f = apply_diff_poly(&symbol, &g).unwrap();
        let tr = restrict_with_limit(&f, &s, 1e-8).unwrap();
        prop_assert!(tr.max_abs() <= 1e-8);
        prop_assert!(transform_at(&f, &[0.0, 1.0]).norm() <= 1e-8);
    }
}
