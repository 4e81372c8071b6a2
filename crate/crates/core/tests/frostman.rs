mod common;

use common::simpson;
use fv_core::frostman::{kernel_integral, DiscreteMeasure, HatFunction};
use fv_core::profile::plateau;
use fv_core::surface::make_circle;
use fv_core::{
    dimension_lower_bound, frostman_from_potential_check, frostman_statistic, potential, Complex64, Grid,
    SurfaceDensity, TailClass,
};
use std::f64::consts::PI;
use std::sync::Arc;

fn arclength(n: usize) -> DiscreteMeasure {
    let s = Arc::new(make_circle(1.0, n).unwrap());
    DiscreteMeasure::from_density(&SurfaceDensity::constant(s, Complex64::new(1.0, 0.0)))
}

fn alphas() -> Vec<f64> {
    (0..=50).map(|i| i as f64 * 0.05).collect()
}

fn dyadic(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

#[test]
fn circle_window_matches_arc_integral() {
    let mu = arclength(16384);
    let phi = HatFunction::standard(2);
    for r in [0.25, 0.05, 0.01] {
        // window centered on the circle at angle 0
        let stat = frostman_statistic(&mu, &phi, r, &[-1.0 / r, 0.0]).unwrap();
        let half = 2.0 * (r / 2.0).asin();
        let exact = simpson(
            |t| plateau(((t.cos() - 1.0).powi(2) + t.sin().powi(2)).sqrt() / r, 0.5, 1.0),
            -half,
            half,
            4000,
        );
        assert!((stat - exact).abs() < 1e-3 * exact, "r={r}: {stat} vs {exact}");
    }
}

#[test]
fn square_window_matches_area() {
    let mu = DiscreteMeasure::unit_square(512);
    let phi = HatFunction::standard(2);
    for r in [0.2, 0.05] {
        let stat = frostman_statistic(&mu, &phi, r, &[0.0, 0.0]).unwrap();
        // ∫ plateau(|x|/r) dx = 2π r² ∫ ρ plateau(ρ) dρ
        let exact = 2.0 * PI * r * r * simpson(|p| p * plateau(p, 0.5, 1.0), 0.0, 1.0, 4000);
        assert!((stat - exact).abs() < 1e-3 * exact, "r={r}: {stat} vs {exact}");
    }
}

#[test]
fn certificates_order_test_measures() {
    let phi = HatFunction::standard(2);
    let dirac_r: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
    let dirac = dimension_lower_bound(&DiscreteMeasure::dirac(&[0.0, 0.0]), &phi, &alphas(), &dirac_r).unwrap();
    let circle = dimension_lower_bound(&arclength(16384), &phi, &alphas(), &dyadic(1, 9)).unwrap();
    let square = dimension_lower_bound(&DiscreteMeasure::unit_square(512), &phi, &alphas(), &dyadic(1, 5)).unwrap();
    let (d, c, s) = (dirac.bound.unwrap_or(0.0), circle.bound.unwrap(), square.bound.unwrap());
    assert!(d <= 0.1, "dirac {d}");
    assert!(c >= 0.9, "circle {c}");
    assert!(s >= 1.9, "square {s}");
    assert!(d < c && c < s);
    assert_eq!(circle.constant, 10.0 * circle.baseline);
}

#[test]
fn shrinking_support_does_not_increase_statistic() {
    let mu = arclength(4096);
    let wide = HatFunction::new(2, 0.5, 1.0).unwrap();
    let narrow = HatFunction::new(2, 0.5, 0.75).unwrap();
    for eta in [[-4.0, 0.0], [-2.8, -2.8], [0.0, 0.0]] {
        let a = frostman_statistic(&mu, &wide, 0.25, &eta).unwrap();
        let b = frostman_statistic(&mu, &narrow, 0.25, &eta).unwrap();
        assert!(b <= a + 1e-15);
    }
}

#[test]
fn circle_potential_trend_depends_on_alpha() {
    let mu = arclength(1024);
    let grid = Grid::new(2, 32.0, 128).unwrap();
    let low = potential(&mu, 0.5, &grid).unwrap();
    let high = potential(&mu, 1.5, &grid).unwrap();
    assert_eq!(low.trend, TailClass::Convergent, "{}", low.trend_exponent);
    assert_eq!(high.trend, TailClass::Divergent, "{}", high.trend_exponent);
    assert!((low.trend_exponent + 0.5).abs() < 0.15);
    assert!((high.trend_exponent - 0.5).abs() < 0.15);
}

#[test]
fn cauchy_schwarz_chain_holds() {
    let mu = arclength(1024);
    let phi = HatFunction::standard(2);
    let pot_grid = Grid::new(2, 32.0, 128).unwrap();
    let ker_grid = Grid::new(2, 16.0, 128).unwrap();
    let etas: Vec<Vec<f64>> = (0..8)
        .map(|k| {
            let t = k as f64 * PI / 4.0;
            vec![-t.cos() * 2.0, -t.sin() * 2.0]
        })
        .chain(std::iter::once(vec![0.0, 0.0]))
        .collect();
    let report = frostman_from_potential_check(&mu, &phi, 0.5, &[0.5, 0.25, 0.125], &etas, &pot_grid, &ker_grid)
        .unwrap();
    assert!(report.worst_slack > 0.0, "{}", report.worst_slack);
    assert!(report.scaling_residual <= 1e-8);
    assert!(report.scaling_bound_holds);

    let zero = frostman_from_potential_check(
        &DiscreteMeasure::zero(2),
        &phi,
        0.5,
        &[0.5],
        &etas,
        &pot_grid,
        &ker_grid,
    )
    .unwrap();
    assert!(zero.rows.iter().all(|r| r.lhs == 0.0 && r.rhs == 0.0));
}

#[test]
fn kernel_side_scales_by_r_alpha() {
    let phi = HatFunction::standard(2);
    let grid = Grid::new(2, 16.0, 128).unwrap();
    let k = kernel_integral(&phi, 0.5, 1.0, &grid).unwrap().value;
    for r in [0.5, 0.25, 0.125] {
        let j = kernel_integral(&phi, 0.5, r, &grid).unwrap();
        assert!((j.value - j.substituted).abs() <= 1e-8 * j.value);
        assert!(j.value <= r.powf(0.5) * k);
    }
}
