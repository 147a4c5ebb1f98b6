use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// `n × k` projections of the centered inputs.
    pub projected: Vec<Vec<f64>>,
    /// Share of total variance captured by each kept component.
    pub explained_ratio: Vec<f64>,
    /// `d × k`, orthonormal columns, by decreasing variance.
    pub components: DMatrix<f64>,
}

impl Pca {
    /// Map projections back to the input space (adding the mean back).
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        self.projected
            .iter()
            .map(|p| {
                let v = &self.components * nalgebra::DVector::from_column_slice(p);
                v.iter().zip(&self.mean).map(|(x, m)| x + m).collect()
            })
            .collect()
    }
}

/// Principal components from the eigendecomposition of the sample covariance.
pub fn pca_project(vectors: &[Vec<f64>], k: usize) -> Result<Pca> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::Analysis("PCA needs at least two points".into()));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Dimension("PCA inputs differ in length".into()));
    }
    let mean: Vec<f64> = (0..d)
        .map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / n as f64)
        .collect();
    let centered = DMatrix::from_fn(n, d, |i, j| vectors[i][j] - mean[j]);
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > 1e-12 * top.max(f64::MIN_POSITIVE))
        .count();
    if k == 0 || k > rank {
        return Err(Error::Analysis(format!(
            "requested {k} components but the centered data has rank {rank}"
        )));
    }
    let total: f64 = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).sum();
    let components = DMatrix::from_fn(d, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let projected_m = &centered * &components;
    let projected = (0..n)
        .map(|i| projected_m.row(i).iter().copied().collect())
        .collect();
    let explained_ratio = order[..k]
        .iter()
        .map(|&i| eig.eigenvalues[i].max(0.0) / total)
        .collect();
    Ok(Pca {
        mean,
        projected,
        explained_ratio,
        components,
    })
}
