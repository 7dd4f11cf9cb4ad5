use crate::error::{Error, Result};

fn sample_variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Cronbach's alpha over a raters x items score matrix.
///
/// Rows with any missing cell are dropped before computing
/// `k/(k-1) * (1 - sum(item variances) / variance(row sums))`
/// with sample (n - 1) variances.
pub fn cronbach_alpha(rows: &[Vec<Option<f64>>]) -> Result<f64> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::InsufficientData("ragged rating matrix".into()));
    }
    if k < 2 {
        return Err(Error::InsufficientData(format!("{k} item(s); need at least 2")));
    }
    let complete: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| r.iter().copied().collect::<Option<Vec<f64>>>())
        .collect();
    if complete.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} complete row(s); need at least 2",
            complete.len()
        )));
    }
    let item_var: f64 = (0..k)
        .map(|j| sample_variance(complete.iter().map(move |r| r[j])))
        .sum();
    let total_var = sample_variance(complete.iter().map(|r| r.iter().sum::<f64>()));
    if total_var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}
