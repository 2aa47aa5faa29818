//! Power-law fits on log-log axes.

use crate::error::{Error, Result};
use alloc::format;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

/// Least-squares fit of `y = a·x^b` through `ln y = ln a + b ln x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::Config("a fit needs at least two points".into()));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Config(format!("point ({x}, {y}) is not positive")));
    }
    let n = points.len() as f64;
    let logs = points.iter().map(|(x, y)| (libm::log(*x), libm::log(*y)));
    let (sx, sy) = logs.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = logs
        .clone()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return Err(Error::Config("all x values coincide".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let max_residual = logs
        .map(|(x, y)| (y - intercept - exponent * x).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        exponent,
        prefactor: libm::exp(intercept),
        max_residual,
    })
}
