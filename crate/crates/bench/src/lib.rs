//! Shared fixtures for the benchmarks.

use fv_core::{make_circle, schwartz_generator, Complex64, Grid, SampledField, SurfaceDensity, TestFunction};
use std::sync::Arc;

pub fn gaussian_field(dim: usize, half_width: f64, n: usize) -> SampledField {
    let grid = Grid::new(dim, half_width, n).expect("benchmark grid");
    let kind = TestFunction::ModulatedGaussian {
        center: vec![0.25; dim],
        width: 0.9,
        frequency: vec![0.5; dim],
    };
    schwartz_generator(&grid, &kind).expect("benchmark generator")
}

pub fn circle_measure(nodes: usize) -> SurfaceDensity {
    let circle = Arc::new(make_circle(1.0, nodes).expect("benchmark circle"));
    SurfaceDensity::constant(circle, Complex64::new(1.0, 0.0))
}
