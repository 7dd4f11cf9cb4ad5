use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::SampleTooSmall(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-sided p-value of a standard normal deviate.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteigerTest {
    pub z: f64,
    pub p: f64,
}

/// Steiger's Z for two dependent correlations sharing variable `j`.
///
/// `r_jk` and `r_jh` are the correlations being compared, `r_kh` the
/// correlation between the two non-shared variables. Uses the pooled
/// `r̄ = (r_jk + r_jh) / 2` in the covariance of the Fisher-transformed
/// correlations:
///
/// ```text
/// s = [ r_kh (1 - 2 r̄²) - ½ r̄² (1 - 2 r̄² - r_kh²) ] / (1 - r̄²)²
/// Z = (atanh r_jk - atanh r_jh) · sqrt((n - 3) / (2 - 2 s))
/// ```
pub fn steiger_z(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> Result<SteigerTest> {
    if n <= 3 {
        return Err(Error::SampleTooSmall(n));
    }
    if r_jk.abs() >= 1.0 || r_jh.abs() >= 1.0 || !(r_jk.is_finite() && r_jh.is_finite()) {
        return Err(Error::DegenerateCorrelation);
    }
    if r_jk == r_jh {
        return Ok(SteigerTest { z: 0.0, p: 1.0 });
    }
    if r_kh.abs() >= 1.0 || !r_kh.is_finite() {
        return Err(Error::DegenerateCorrelation);
    }
    let rbar = (r_jk + r_jh) / 2.0;
    let rbar2 = rbar * rbar;
    let s = (r_kh * (1.0 - 2.0 * rbar2) - 0.5 * rbar2 * (1.0 - 2.0 * rbar2 - r_kh * r_kh))
        / ((1.0 - rbar2) * (1.0 - rbar2));
    // s estimates a correlation; inconsistent inputs can push it to 1 or beyond.
    if !(s < 1.0) {
        return Err(Error::DegenerateCorrelation);
    }
    let z = (r_jk.atanh() - r_jh.atanh()) * ((n as f64 - 3.0) / (2.0 - 2.0 * s)).sqrt();
    Ok(SteigerTest {
        z,
        p: normal_two_sided_p(z),
    })
}
