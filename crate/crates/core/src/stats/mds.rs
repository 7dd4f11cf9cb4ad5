use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MdsResult {
    /// `n` rows of `k` coordinates, column-centred.
    pub coordinates: Vec<Vec<f64>>,
    /// All eigenvalues of the double-centred matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Share of the positive eigenvalue mass carried by the retained axes.
    pub explained_variance: f64,
}

fn validate(d: &[Vec<f64>], k: usize) -> Result<f64> {
    let n = d.len();
    let bad = |msg: String| Err(Error::InvalidDistanceMatrix(msg));
    if n < 2 {
        return bad(format!("{n} point(s)"));
    }
    if k == 0 || k >= n {
        return bad(format!("cannot embed {n} points in {k} dimensions"));
    }
    if let Some(row) = d.iter().find(|r| r.len() != n) {
        return bad(format!("row of length {} in a {n}x{n} matrix", row.len()));
    }
    let scale = d.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale.max(1.0);
    for i in 0..n {
        if d[i][i] != 0.0 {
            return bad(format!("nonzero diagonal at {i}"));
        }
        for j in 0..n {
            let v = d[i][j];
            if !v.is_finite() || v < 0.0 {
                return bad(format!("entry ({i}, {j}) = {v}"));
            }
            if (v - d[j][i]).abs() > tol {
                return bad(format!("asymmetric at ({i}, {j})"));
            }
        }
    }
    Ok(scale)
}

/// Torgerson's classical scaling of a distance matrix into `k` dimensions.
///
/// Only positive eigenvalues contribute coordinates; if fewer than `k` are
/// positive the remaining axes are zero. Each axis is signed so that its
/// largest-magnitude coordinate is positive.
pub fn classical_mds(d: &[Vec<f64>], k: usize) -> Result<MdsResult> {
    validate(d, k)?;
    let n = d.len();
    let sq = DMatrix::from_fn(n, n, |i, j| {
        let v = 0.5 * (d[i][j] + d[j][i]);
        v * v
    });
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));

    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let top = eigenvalues[0].abs().max(eigenvalues[n - 1].abs());
    let tol = top * n as f64 * f64::EPSILON;
    let positive: Vec<usize> = (0..n).filter(|&i| eigenvalues[i] > tol).collect();
    if positive.is_empty() {
        return Err(Error::DegenerateGeometry);
    }
    let kept = positive.len().min(k);

    let mut coordinates = vec![vec![0.0; k]; n];
    for axis in 0..kept {
        let v = eig.eigenvectors.column(order[axis]);
        let pivot = (0..n).fold(0, |m, i| if v[i].abs() > v[m].abs() { i } else { m });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let s = eigenvalues[axis].sqrt() * sign;
        for i in 0..n {
            coordinates[i][axis] = v[i] * s;
        }
    }
    let total: f64 = positive.iter().map(|&i| eigenvalues[i]).sum();
    let retained: f64 = eigenvalues[..kept].iter().sum();

    Ok(MdsResult {
        coordinates,
        eigenvalues,
        explained_variance: (retained / total).clamp(0.0, 1.0),
    })
}

/// Euclidean distance matrix of a point set.
pub fn distance_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .collect()
        })
        .collect()
}
