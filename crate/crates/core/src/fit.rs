//! Least-squares power-law fits on log–log data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    /// `c` in `y ≈ c·x^exponent`.
    pub prefactor: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

impl PowerLaw {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

/// Fits `y ≈ c·x^e` by ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLaw> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(crate::error::invalid("power-law fit needs at least two paired samples"));
    }
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(crate::error::invalid("power-law abscissae must be positive"));
    }
    if ys.iter().any(|y| !(*y > 0.0)) {
        return Err(Error::NothingToFit(0.0));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(crate::error::invalid("power-law abscissae must not all coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    Ok(PowerLaw { exponent, prefactor: intercept.exp(), residual: (ss / n).sqrt() })
}
