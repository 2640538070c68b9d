//! Eigenanalysis of covariance surfaces: eigenvalue/eigenfunction pairs,
//! principal component scores, and the modified eigenvalue-ratio criterion
//! for choosing how many components to keep.
//!
//! The eigenproblem is quadrature-weighted so that eigenfunctions are
//! orthonormal in L2 rather than in the raw coordinate sense: with
//! `W = diag(quadrature weights)` we decompose `W^(1/2) C W^(1/2)` and map
//! eigenvectors back through `W^(-1/2)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fda::{quadrature_weights, Curve, FunctionalTimeSeries};
use crate::longrun::CovarianceSurface;

/// Descending eigenvalues (negatives clipped to zero) with eigenfunctions
/// orthonormal under the quadrature inner product.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<Curve>,
}

/// `n x K` matrix of principal component scores.
pub type ScoreMatrix = DMatrix<f64>;

/// Solve the quadrature-weighted eigenproblem of a covariance surface.
///
/// Eigenvalues are sorted descending and clipped at zero (non-PSD kernels
/// such as the flat-top can produce small negatives). Each eigenfunction's
/// sign is fixed so its entry of largest magnitude is positive, making
/// results reproducible across eigensolvers.
pub fn eigendecompose(cov: &CovarianceSurface) -> Result<EigenDecomposition> {
    let j = cov.grid().len();
    let w = quadrature_weights(cov.grid());
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();

    let m = cov.matrix();
    let mut s = DMatrix::<f64>::zeros(j, j);
    for b in 0..j {
        for a in 0..j {
            // symmetrize while weighting
            s[(a, b)] = 0.5 * (m[(a, b)] + m[(b, a)]) * sqrt_w[a] * sqrt_w[b];
        }
    }
    let eig = s.symmetric_eigen();

    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut eigenvalues = Vec::with_capacity(j);
    let mut eigenfunctions = Vec::with_capacity(j);
    for &k in &order {
        eigenvalues.push(eig.eigenvalues[k].max(0.0));
        let mut f = DVector::<f64>::zeros(j);
        for a in 0..j {
            f[a] = eig.eigenvectors[(a, k)] / sqrt_w[a];
        }
        // sign convention: largest-magnitude entry positive
        let mut idx = 0;
        for a in 1..j {
            if f[a].abs() > f[idx].abs() {
                idx = a;
            }
        }
        if f[idx] < 0.0 {
            f.neg_mut();
        }
        eigenfunctions.push(Curve::new(cov.grid().to_vec(), f.iter().copied().collect())?);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenfunctions,
    })
}

/// Only the descending, clipped eigenvalues of a covariance surface.
///
/// Cheaper than [`eigendecompose`] when eigenfunctions are not needed
/// (eigenvalue-ratio criteria, null distributions).
pub fn eigenvalues_only(cov: &CovarianceSurface) -> Vec<f64> {
    let j = cov.grid().len();
    let w = quadrature_weights(cov.grid());
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let m = cov.matrix();
    let mut s = DMatrix::<f64>::zeros(j, j);
    for b in 0..j {
        for a in 0..j {
            s[(a, b)] = 0.5 * (m[(a, b)] + m[(b, a)]) * sqrt_w[a] * sqrt_w[b];
        }
    }
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Scores `beta_{t,k} = <X_t - mean, zeta_k>` for every observation and
/// every supplied eigenfunction.
pub fn fpc_scores(
    fts: &FunctionalTimeSeries,
    eigenfunctions: &[Curve],
    mean: &Curve,
) -> Result<ScoreMatrix> {
    if mean.grid() != fts.grid() {
        return Err(Error::DimensionMismatch("mean curve grid differs from series".into()));
    }
    for f in eigenfunctions {
        if f.grid() != fts.grid() {
            return Err(Error::DimensionMismatch(
                "eigenfunction grid differs from series".into(),
            ));
        }
    }
    let n = fts.n();
    let j = fts.grid_len();
    let k = eigenfunctions.len();
    let w = quadrature_weights(fts.grid());
    // scores = (X - mean) * diag(w) * Z where Z columns are eigenfunctions
    let mut weighted_basis = DMatrix::<f64>::zeros(j, k);
    for (c, f) in eigenfunctions.iter().enumerate() {
        for a in 0..j {
            weighted_basis[(a, c)] = w[a] * f.values()[a];
        }
    }
    let mut xc = fts.values().clone();
    for t in 0..n {
        for a in 0..j {
            xc[(t, a)] -= mean.values()[a];
        }
    }
    Ok(xc * weighted_basis)
}

/// Modified eigenvalue-ratio criterion for the number of components.
///
/// `k_max` counts the eigenvalues at least as large as their grand sum
/// divided by `n`; the threshold `theta = 1 / ln(max(lambda_1, n))`
/// penalizes ratios formed from negligible eigenvalues. Ties resolve to the
/// smallest k.
pub fn eigenvalue_ratio_r(eigenvalues: &[f64], n: usize) -> Result<usize> {
    if eigenvalues.is_empty() || eigenvalues[0] <= 0.0 {
        return Err(Error::Degenerate("all eigenvalues are zero".into()));
    }
    let lambda1 = eigenvalues[0];
    let total: f64 = eigenvalues.iter().sum();
    let cutoff = total / n as f64;
    let mut k_max = eigenvalues.iter().take_while(|&&l| l >= cutoff).count();
    // ratios need lambda_{k+1}; keep k_max addressable
    k_max = k_max.min(eigenvalues.len().saturating_sub(1)).max(1);

    let theta = 1.0 / lambda1.max(n as f64).ln();
    let mut best_k = 1;
    let mut best = f64::INFINITY;
    for k in 1..=k_max {
        let lk = eigenvalues[k - 1];
        let objective = if lk / lambda1 >= theta {
            let next = if k < eigenvalues.len() { eigenvalues[k] } else { 0.0 };
            next / lk
        } else {
            1.0
        };
        if objective < best {
            best = objective;
            best_k = k;
        }
    }
    Ok(best_k)
}

/// Rebuild curves from `mean + sum_k scores[t,k] * zeta_k`, truncated at `k`.
pub fn reconstruct(
    mean: &Curve,
    eigenfunctions: &[Curve],
    scores: &ScoreMatrix,
    k: usize,
) -> Result<FunctionalTimeSeries> {
    if k > eigenfunctions.len() || k > scores.ncols() {
        return Err(Error::InvalidArgument(format!(
            "cannot reconstruct with {k} components from {} eigenfunctions and {} score columns",
            eigenfunctions.len(),
            scores.ncols()
        )));
    }
    let n = scores.nrows();
    let j = mean.len();
    let mut values = DMatrix::<f64>::zeros(n, j);
    for t in 0..n {
        for a in 0..j {
            let mut v = mean.values()[a];
            for c in 0..k {
                v += scores[(t, c)] * eigenfunctions[c].values()[a];
            }
            values[(t, a)] = v;
        }
    }
    FunctionalTimeSeries::new(mean.grid().to_vec(), values, None)
}
