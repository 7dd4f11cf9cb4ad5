use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::report::fmt_num;

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

/// Least-squares fit with an intercept; `coefficients[0]` is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub n: usize,
    pub df_residual: usize,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Tab-separated coefficient table, one row per term, intercept first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# R2={}\tn={}\tdf={}",
            fmt_num(self.r_squared),
            self.n,
            self.df_residual
        );
        out.push_str("term\tEstimate\tStd. Error\tt-value\tp-value\n");
        for c in &self.coefficients {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                c.name,
                fmt_num(c.estimate),
                fmt_num(c.std_error),
                fmt_num(c.t_value),
                fmt_num(c.p_value)
            );
        }
        out
    }
}

/// Ordinary least squares of `y` on the predictor rows `x` plus an intercept.
///
/// Solved through a Householder QR of the design matrix. Standard errors are
/// `sqrt(sigma^2 * diag((X'X)^-1))` with `(X'X)^-1 = R^-1 R^-T`; p-values are
/// two-sided from Student's t with `n - k - 1` degrees of freedom.
pub fn ols_regress(x: &[Vec<f64>], y: &[f64], names: &[String]) -> Result<RegressionFit> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::LengthMismatch(x.len(), n));
    }
    let k = names.len();
    if let Some(row) = x.iter().find(|r| r.len() != k) {
        return Err(Error::LengthMismatch(row.len(), k));
    }
    let p = k + 1;
    if n <= p {
        return Err(Error::SampleTooSmall(n));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("non-finite value in regression input".into()));
    }

    let design = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let col_norms: Vec<f64> = (0..p).map(|j| design.column(j).norm()).collect();
    let qr = design.clone().qr();
    let r = qr.r();
    for j in 0..p {
        if col_norms[j] == 0.0 || r[(j, j)].abs() <= 1e-10 * col_norms[j] {
            return Err(Error::SingularDesign);
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::SingularDesign)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::SingularDesign)?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let residuals = &yv - &design * &beta;
    let ssr = residuals.norm_squared();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if sst == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let df = n - p;
    let sigma2 = ssr / df as f64;
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");

    let coefficients = (0..p)
        .map(|j| {
            let estimate = beta[j];
            let std_error = (sigma2 * xtx_inv[(j, j)]).sqrt();
            let t_value = estimate / std_error;
            let p_value = if t_value.is_nan() {
                f64::NAN
            } else {
                (2.0 * t_dist.sf(t_value.abs())).min(1.0)
            };
            Coefficient {
                name: if j == 0 {
                    INTERCEPT.to_owned()
                } else {
                    names[j - 1].clone()
                },
                estimate,
                std_error,
                t_value,
                p_value,
            }
        })
        .collect();

    Ok(RegressionFit {
        coefficients,
        r_squared: (1.0 - ssr / sst).clamp(0.0, 1.0),
        n,
        df_residual: df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn four_point_closed_form() {
        // x = 0..3, y = 1,3,2,5: Sxx = 5, Sxy = 5.5, slope 1.1, intercept 1.1.
        // Residuals -0.1, 0.8, -1.3, 0.6: SSR = 2.7, sigma^2 = 1.35, SST = 8.75.
        let x: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let fit = ols_regress(&x, &[1.0, 3.0, 2.0, 5.0], &names(&["x"])).unwrap();
        let (b0, b1) = (&fit.coefficients[0], &fit.coefficients[1]);
        assert!((b0.estimate - 1.1).abs() < 1e-12);
        assert!((b1.estimate - 1.1).abs() < 1e-12);
        assert!((b1.std_error - 0.27f64.sqrt()).abs() < 1e-12);
        assert!((b0.std_error - (1.35f64 * (0.25 + 2.25 / 5.0)).sqrt()).abs() < 1e-12);
        assert!((fit.r_squared - (1.0 - 2.7 / 8.75)).abs() < 1e-12);
        // With 2 dof the two-sided tail is 1 - |t| / sqrt(t^2 + 2).
        let t = b1.t_value;
        assert!((t - 1.1 / 0.27f64.sqrt()).abs() < 1e-12);
        assert!((b1.p_value - (1.0 - t.abs() / (t * t + 2.0).sqrt())).abs() < 1e-10);
        assert_eq!(fit.df_residual, 2);
    }

    #[test]
    fn collinear_design_is_singular() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0]).collect();
        let y: Vec<f64> = (0..6).map(|i| (i * i) as f64).collect();
        assert!(matches!(
            ols_regress(&x, &y, &names(&["a", "b"])),
            Err(Error::SingularDesign)
        ));
        let x: Vec<Vec<f64>> = (0..6).map(|_| vec![3.0]).collect();
        assert!(matches!(ols_regress(&x, &y, &names(&["c"])), Err(Error::SingularDesign)));
    }

    #[test]
    fn too_few_rows() {
        let x = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0]];
        assert!(matches!(
            ols_regress(&x, &[1.0, 2.0, 3.0], &names(&["a", "b"])),
            Err(Error::SampleTooSmall(3))
        ));
    }

    #[test]
    fn coefficient_table_schema() {
        let x: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let fit = ols_regress(&x, &[1.0, 3.0, 2.0, 5.0], &names(&["LD"])).unwrap();
        let tsv = fit.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[1], "term\tEstimate\tStd. Error\tt-value\tp-value");
        assert!(lines[2].starts_with("(Intercept)\t1.1\t"));
        assert!(lines[3].starts_with("LD\t1.1\t0.519615242\t"));
        assert_eq!(lines.len(), 4);
    }

    proptest! {
        #[test]
        fn exact_linear_data_is_recovered(
            beta in prop::collection::vec(-5.0f64..5.0, 4),
            rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 8..30),
        ) {
            let y: Vec<f64> = rows
                .iter()
                .map(|r| beta[0] + r.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let fit = ols_regress(&rows, &y, &names(&["a", "b", "c"]));
            prop_assume!(!matches!(fit, Err(Error::SingularDesign) | Err(Error::ZeroVariance)));
            let fit = fit.unwrap();
            for (c, b) in fit.coefficients.iter().zip(&beta) {
                prop_assert!((c.estimate - b).abs() < 1e-10, "{} vs {}", c.estimate, b);
            }
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-10);
        }
    }
}
